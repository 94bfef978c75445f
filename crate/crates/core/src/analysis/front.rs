use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::wavefunction::Wavefunction;
use crate::well::WellConfig;

/// A detector window of `len` consecutive nodes starting at node `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    /// Number of nodes a window of physical `width` spans on `grid` (at least one).
    pub fn nodes_for(grid: &Grid, width: f64) -> usize {
        ((width / grid.dx()).round() as usize).max(1)
    }

    pub fn center(&self, grid: &Grid) -> f64 {
        0.5 * (grid.x(self.start) + grid.x(self.start + self.len - 1))
    }

    /// `(nearest, farthest)` distance from `x` to the nodes of the window.
    pub fn distance_range(&self, grid: &Grid, x: f64) -> (f64, f64) {
        let a = grid.x(self.start) - x;
        let b = grid.x(self.start + self.len - 1) - x;
        let near = if a <= 0.0 && b >= 0.0 {
            0.0
        } else {
            a.abs().min(b.abs())
        };
        (near, a.abs().max(b.abs()))
    }
}

/// Probability in every window of `len` consecutive nodes; entry `i` covers
/// nodes `i .. i + len`. Each window is summed directly rather than by
/// prefix differences, which would swamp the far tails with rounding noise.
pub fn window_probabilities(psi: &Wavefunction, len: usize) -> Vec<f64> {
    let dx = psi.grid().dx();
    let n = psi.amplitudes().len();
    if len == 0 || len > n {
        return Vec::new();
    }
    let dens = psi.density();
    (0..=n - len)
        .map(|i| dens[i..i + len].iter().sum::<f64>() * dx)
        .collect()
}

/// Outermost detector positions where ψ₀ and ψ₁ differ beyond statistical noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoints {
    /// Leftmost detectable window center, if any.
    pub x_a_prime: Option<f64>,
    /// Rightmost detectable window center, if any.
    pub x_b_prime: Option<f64>,
    /// `max(|x_A − A′|, |B′ − x_A|)`; zero when nothing is detectable.
    pub l_prime: f64,
    pub n_assumed: f64,
    pub k_sigma: f64,
    pub detector_width: f64,
    /// Set when `L′` falls short of the well width; reported, not clamped.
    pub below_well_width: bool,
}

impl FrontPoints {
    pub fn is_empty(&self) -> bool {
        self.x_a_prime.is_none()
    }
}

/// Whether a window difference `|p1 − p0|` exceeds `k_sigma` pooled standard errors at ensemble size `n`.
pub(crate) fn detectable(p0: f64, p1: f64, n: f64, k_sigma: f64) -> bool {
    let pbar = 0.5 * (p0 + p1);
    let sigma = (pbar * (1.0 - pbar) / n).max(0.0).sqrt();
    (p1 - p0).abs() > k_sigma * sigma
}

/// Slides a detector window of `detector_width` across the grid and returns
/// the outermost window centers where ψ₁ and ψ₀ are distinguishable with
/// `n` systems at a `k_sigma` threshold.
pub fn locate_front_points(
    psi0: &Wavefunction,
    psi1: &Wavefunction,
    well: &WellConfig,
    detector_width: f64,
    n: f64,
    k_sigma: f64,
) -> Result<FrontPoints> {
    let grid = *psi0.grid();
    if psi1.grid() != &grid {
        return Err(Error::param("psi1", "psi0 and psi1 must share one grid"));
    }
    if !(n.is_finite() && n >= 2.0) {
        return Err(Error::param(
            "n",
            format!("ensemble size {n} must be at least 2"),
        ));
    }
    if !(detector_width.is_finite() && detector_width >= grid.dx() * (1.0 - 1e-9)) {
        return Err(Error::param(
            "detector_width",
            format!(
                "width {detector_width} is below the grid spacing {}",
                grid.dx()
            ),
        ));
    }
    if !(k_sigma.is_finite() && k_sigma > 0.0) {
        return Err(Error::param(
            "k_sigma",
            format!("{k_sigma} must be positive"),
        ));
    }
    let len = Window::nodes_for(&grid, detector_width);
    let p0 = window_probabilities(psi0, len);
    let p1 = window_probabilities(psi1, len);
    let mut first = None;
    let mut last = None;
    for i in 0..p0.len() {
        if detectable(p0[i], p1[i], n, k_sigma) {
            first.get_or_insert(i);
            last = Some(i);
        }
    }
    let center = |i: usize| Window { start: i, len }.center(&grid);
    let x_a_prime = first.map(center);
    let x_b_prime = last.map(center);
    let l_prime = match (x_a_prime, x_b_prime) {
        (Some(a), Some(b)) => (well.x_a - a).abs().max((b - well.x_a).abs()),
        _ => 0.0,
    };
    Ok(FrontPoints {
        x_a_prime,
        x_b_prime,
        l_prime,
        n_assumed: n,
        k_sigma,
        detector_width,
        below_well_width: l_prime < well.width(),
    })
}

/// Minimal response delay `τ = L′/v`.
pub fn compute_tau(l_prime: f64, v: f64) -> Result<f64> {
    if !(l_prime.is_finite() && l_prime > 0.0) {
        return Err(Error::param(
            "l_prime",
            format!("L' = {l_prime} must be positive"),
        ));
    }
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::param("v", format!("v = {v} must be positive")));
    }
    Ok(l_prime / v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_rejects_nonpositive_inputs() {
        assert!(compute_tau(0.0, 1.0).is_err());
        assert!(compute_tau(1.0, -1.0).is_err());
        assert_eq!(compute_tau(1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn windows_cover_consecutive_nodes() {
        let g = Grid::new(-1.0, 1.0, 101).unwrap();
        let psi = Wavefunction::from_fn(g, 0.0, |x| num_complex::Complex64::new((-x * x).exp(), x));
        let w = window_probabilities(&psi, 7);
        assert_eq!(w.len(), 95);
        for (i, p) in w.iter().enumerate() {
            let direct: f64 = psi.amplitudes()[i..i + 7]
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
                * g.dx();
            assert!((p - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_states_give_empty_interval() {
        let well = WellConfig::reference();
        let g = Grid::around_well(&well, 512, 2.0).unwrap();
        let mut psi = Wavefunction::from_fn(g, 0.0, |x| {
            num_complex::Complex64::new((-(x - 0.5).powi(2) * 20.0).exp(), 0.0)
        });
        psi.normalize().unwrap();
        let fp = locate_front_points(&psi, &psi, &well, 0.02, 1e6, 3.0).unwrap();
        assert!(fp.is_empty());
        assert_eq!(fp.l_prime, 0.0);
        assert!(fp.below_well_width);
    }
}
