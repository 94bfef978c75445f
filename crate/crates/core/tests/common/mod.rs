//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use chronon_core::stats::TrialBatch;
use num_complex::Complex64;

/// Bound state of a finite well with walls `v_left` on `x < 0`, `v_right`
/// on `x > width` and zero inside, in closed form.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticState {
    pub energy: f64,
    k: f64,
    kappa_l: f64,
    kappa_r: f64,
    delta: f64,
    width: f64,
    scale: f64,
}

/// Solves `k·L = n·π − atan(k/κ_L) − atan(k/κ_R)` for level `n` (1-based) by bisection.
pub fn analytic_level(width: f64, v_left: f64, v_right: f64, n: usize) -> Option<AnalyticState> {
    let top = v_left.min(v_right);
    let f = |e: f64| {
        let k = (2.0 * e).sqrt();
        let kl = (2.0 * (v_left - e)).sqrt();
        let kr = (2.0 * (v_right - e)).sqrt();
        k * width + (k / kl).atan() + (k / kr).atan() - n as f64 * std::f64::consts::PI
    };
    let (mut lo, mut hi) = (0.0, top);
    if f(hi * (1.0 - 1e-15)) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    let k = (2.0 * e).sqrt();
    let kappa_l = (2.0 * (v_left - e)).sqrt();
    let kappa_r = (2.0 * (v_right - e)).sqrt();
    let delta = (k / kappa_l).atan();
    let end = k * width + delta;
    let norm =
        delta.sin().powi(2) / (2.0 * kappa_l) + end.sin().powi(2) / (2.0 * kappa_r) + width / 2.0
            - ((2.0 * end).sin() - (2.0 * delta).sin()) / (4.0 * k);
    Some(AnalyticState {
        energy: e,
        k,
        kappa_l,
        kappa_r,
        delta,
        width,
        scale: norm.sqrt().recip(),
    })
}

impl AnalyticState {
    /// Normalized amplitude at `x` (well spans `[0, width]`), positive inside near the left wall.
    pub fn value(&self, x: f64) -> f64 {
        let v = if x < 0.0 {
            self.delta.sin() * (self.kappa_l * x).exp()
        } else if x > self.width {
            (self.k * self.width + self.delta).sin() * (-self.kappa_r * (x - self.width)).exp()
        } else {
            (self.k * x + self.delta).sin()
        };
        v * self.scale
    }
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Outermost detectable window centers found by explicit per-window loops.
pub fn brute_force_front(
    xs: &[f64],
    psi0: &[Complex64],
    psi1: &[Complex64],
    dx: f64,
    len: usize,
    n: f64,
    k: f64,
) -> Option<(f64, f64)> {
    let mut hits = Vec::new();
    for start in 0..=xs.len() - len {
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for j in start..start + len {
            p0 += psi0[j].norm_sqr() * dx;
            p1 += psi1[j].norm_sqr() * dx;
        }
        let m = (p0 + p1) / 2.0;
        let se = (m * (1.0 - m) / n).sqrt();
        if (p1 - p0).abs() > k * se {
            hits.push((xs[start] + xs[start + len - 1]) / 2.0);
        }
    }
    Some((*hits.first()?, *hits.last()?))
}

/// Standard normal upper tail by Simpson integration of the density.
pub fn normal_tail(z: f64) -> f64 {
    let z = z.abs();
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let upper = z + 40.0;
    simpson(pdf, z, upper, 200_000)
}

/// Pooled two-proportion z and two-sided p-value computed from raw counts.
pub fn direct_z(a: &TrialBatch, b: &TrialBatch) -> (f64, f64) {
    let (x1, n1) = (a.n_hits as f64, a.n_trials as f64);
    let (x2, n2) = (b.n_hits as f64, b.n_trials as f64);
    let pooled = (x1 + x2) / (n1 + n2);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    let z = (x1 / n1 - x2 / n2) / se;
    (z, 2.0 * normal_tail(z))
}

/// Crank–Nicolson steps of `i∂ψ/∂t = Hψ` for a tridiagonal `H` with
/// constant off-diagonal `off`, solved by plain elimination. `steps` lists
/// the successive step sizes.
pub fn crank_nicolson(diag: &[f64], off: f64, psi: &[Complex64], steps: &[f64]) -> Vec<Complex64> {
    let n = diag.len();
    let i = Complex64::new(0.0, 1.0);
    let mut cur = psi.to_vec();
    for &h in steps {
        let a = i * (h / 2.0);
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut hp = cur[j] * diag[j];
            if j > 0 {
                hp += cur[j - 1] * off;
            }
            if j + 1 < n {
                hp += cur[j + 1] * off;
            }
            rhs[j] = cur[j] - a * hp;
        }
        // (1 + aH) x = rhs
        let lower = a * off;
        let mut cp = vec![Complex64::new(0.0, 0.0); n];
        let mut dp = vec![Complex64::new(0.0, 0.0); n];
        let b0 = Complex64::new(1.0, 0.0) + a * diag[0];
        cp[0] = lower / b0;
        dp[0] = rhs[0] / b0;
        for j in 1..n {
            let m = Complex64::new(1.0, 0.0) + a * diag[j] - lower * cp[j - 1];
            cp[j] = lower / m;
            dp[j] = (rhs[j] - lower * dp[j - 1]) / m;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[n - 1] = dp[n - 1];
        for j in (0..n - 1).rev() {
            x[j] = dp[j] - cp[j] * x[j + 1];
        }
        cur = x;
    }
    cur
}

/// `(mean, variance)` of a slice.
pub fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
