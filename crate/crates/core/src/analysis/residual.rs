use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::wavefunction::Wavefunction;

/// How far a path is from solving `i ∂ψ/∂t = Hψ` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `‖i(ψ₊ − ψ₋)/(2h) − H(ψ₊ + ψ₋)/2‖ / ‖(ψ₊ + ψ₋)/2‖`.
    pub raw: f64,
    /// Same, minimized over a constant energy shift `H → H − λ`.
    /// Insensitive to a global phase convention, so a frozen eigenstate scores zero.
    pub phase_free: f64,
}

/// Residual of `path` at `t` with a centered difference of half-width `dt_probe`.
///
/// The Hamiltonian term is averaged over the two probe points, which makes
/// the measure exact for the Crank–Nicolson propagator when the probes sit
/// on adjacent lattice times.
pub fn equation_residual<F>(path: F, h: &Hamiltonian, t: f64, dt_probe: f64) -> Result<Residual>
where
    F: Fn(f64) -> Result<Wavefunction>,
{
    if !(dt_probe.is_finite() && dt_probe > 0.0) {
        return Err(Error::param(
            "dt_probe",
            format!("{dt_probe} must be positive"),
        ));
    }
    let plus = path(t + dt_probe)?;
    let minus = path(t - dt_probe)?;
    if plus.grid() != h.grid() || minus.grid() != h.grid() {
        return Err(Error::param(
            "path",
            "states must live on the Hamiltonian's grid",
        ));
    }
    let n = plus.amplitudes().len();
    let mid: Vec<Complex64> = plus
        .amplitudes()
        .iter()
        .zip(minus.amplitudes())
        .map(|(p, m)| (p + m) * 0.5)
        .collect();
    let mut h_mid = vec![Complex64::new(0.0, 0.0); n];
    h.apply_slice(&mid, &mut h_mid);
    let scale = Complex64::new(0.0, 0.5 / dt_probe);
    let a: Vec<Complex64> = plus
        .amplitudes()
        .iter()
        .zip(minus.amplitudes())
        .zip(&h_mid)
        .map(|((p, m), hm)| (p - m) * scale - hm)
        .collect();
    let mid_sq: f64 = mid.iter().map(|m| m.norm_sqr()).sum();
    if !(mid_sq > 0.0) {
        return Err(Error::Numerical("path vanishes at the probe time".into()));
    }
    let a_sq: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let overlap: f64 = mid.iter().zip(&a).map(|(m, x)| (m.conj() * x).re).sum();
    let lambda = -overlap / mid_sq;
    let shifted: f64 = a
        .iter()
        .zip(&mid)
        .map(|(x, m)| (x + m * lambda).norm_sqr())
        .sum();
    Ok(Residual {
        raw: (a_sq / mid_sq).sqrt(),
        phase_free: (shifted.max(0.0) / mid_sq).sqrt(),
    })
}

/// Raw residual of the exact stationary path `e^{−iEt}ψ_E` at probe half-width `h`:
/// `|tan(Eh)/h − E|`, which is `E³h²/3` to leading order.
pub fn eigenstate_baseline(energy: f64, dt_probe: f64) -> f64 {
    ((energy * dt_probe).tan() / dt_probe - energy).abs()
}
