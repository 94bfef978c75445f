//! Bound states of a tridiagonal Hamiltonian.
//!
//! The k-th eigenvalue is located by bisection on the Sturm count of the
//! shifted matrix; the eigenvector follows from inverse iteration with the
//! converged eigenvalue as shift. Both steps are O(n) per sweep, so even the
//! 4095-point refinement used for extrapolation solves in milliseconds.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hamiltonian::{build_hamiltonian, Hamiltonian};
use crate::tridiag::solve_pivoted;
use crate::wavefunction::Wavefunction;
use crate::well::{Phase, WellConfig};

/// Largest acceptable relative residual `‖Hψ − Eψ‖/‖ψ‖` of a returned eigenstate.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Number of eigenvalues of `h` strictly below `x`.
fn sturm_count(diag: &[f64], off_sq: f64, pivmin: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for &d in &diag[1..] {
        q = d - x - off_sq / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `level`-th smallest eigenvalue (1-based) by Sturm bisection.
pub fn eigenvalue(h: &Hamiltonian, level: usize) -> Result<f64> {
    let n = h.grid().n_points();
    if level == 0 || level > n {
        return Err(Error::param(
            "level",
            format!("level {level} outside 1..={n}"),
        ));
    }
    let diag = h.diagonals();
    let off = h.off_diagonal();
    let off_sq = off * off;
    let radius = 2.0 * off.abs();
    let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - radius;
    let mut hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + radius;
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * off_sq);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(&diag, off_sq, pivmin, mid) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Relative residual `‖Hψ − Eψ‖ / ‖ψ‖`.
pub fn eigen_residual(h: &Hamiltonian, energy: f64, psi: &Wavefunction) -> f64 {
    let h_psi = h.apply(psi);
    let num: f64 = h_psi
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum();
    let den: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    (num / den).sqrt()
}

fn inverse_iteration(h: &Hamiltonian, energy: f64) -> Result<Vec<f64>> {
    let n = h.grid().n_points();
    let off = h.off_diagonal();
    let sub = vec![off; n - 1];
    let shifted: Vec<f64> = (0..n).map(|i| h.diagonal(i) - energy).collect();
    let tiny = f64::EPSILON * (h.diagonal(0).abs() + 2.0 * off.abs());
    // Deterministic, non-symmetric start so that no level is orthogonal to it.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.61803398875).sin())
        .collect();
    let mut hv = vec![0.0; n];
    for _ in 0..8 {
        let mut w = solve_pivoted(&sub, &shifted, &sub, &v, tiny);
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical("inverse iteration diverged".into()));
        }
        w.iter_mut().for_each(|a| *a /= norm);
        v = w;
        h.apply_real(&v, &mut hv);
        let res = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - energy * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if res <= 1e-3 * EIGEN_RESIDUAL_TOL * energy.abs().max(1.0) {
            break;
        }
    }
    Ok(v)
}

/// Normalized `level`-th eigenstate of `h` (1-based) and its energy.
///
/// The sign is fixed so that the largest-magnitude amplitude is positive.
/// Fails with [`Error::NoBoundState`] when the level lies at or above the
/// lower of the two outer wall heights.
pub fn solve_stationary(h: &Hamiltonian, level: usize) -> Result<(f64, Wavefunction)> {
    let energy = eigenvalue(h, level)?;
    let wall = h.bound_threshold();
    if energy >= wall {
        return Err(Error::NoBoundState {
            level,
            energy,
            wall,
        });
    }
    let mut v = inverse_iteration(h, energy)?;
    let (imax, _) =
        v.iter().enumerate().fold(
            (0, 0.0),
            |(bi, bv), (i, a)| if a.abs() > bv { (i, a.abs()) } else { (bi, bv) },
        );
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
    }
    let mut psi = Wavefunction::new(
        *h.grid(),
        v.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        0.0,
    )?;
    psi.normalize()?;
    let residual = eigen_residual(h, energy, &psi);
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "eigenstate {level} residual {residual:e} exceeds {EIGEN_RESIDUAL_TOL:e}"
        )));
    }
    Ok((energy, psi))
}

/// Bound-state energy with the leading `dx²` discretization error removed.
///
/// Solves on `grid` and on its nested refinement (spacing halved) and
/// combines them as `(4·E_fine − E_coarse)/3`. On the 2048-point reference
/// grid this moves the first three levels from ~1e-4 to ~1e-7 of the
/// continuum values.
pub fn extrapolated_energy(
    grid: &Grid,
    well: &WellConfig,
    phase: Phase,
    level: usize,
) -> Result<f64> {
    let coarse = build_hamiltonian(grid, well, phase)?;
    let fine = build_hamiltonian(&grid.refined(), well, phase)?;
    let e_coarse = solve_stationary(&coarse, level)?.0;
    let e_fine = solve_stationary(&fine, level)?.0;
    Ok((4.0 * e_fine - e_coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference() -> (Grid, WellConfig) {
        let well = WellConfig::reference();
        (Grid::around_well(&well, 2048, 2.0).unwrap(), well)
    }

    #[test]
    fn sturm_count_matches_small_matrix() {
        // 2x2 [[2, -1], [-1, 2]] has eigenvalues 1 and 3.
        let diag = [2.0, 2.0];
        assert_eq!(sturm_count(&diag, 1.0, 1e-300, 0.5), 0);
        assert_eq!(sturm_count(&diag, 1.0, 1e-300, 2.0), 1);
        assert_eq!(sturm_count(&diag, 1.0, 1e-300, 3.5), 2);
    }

    #[test]
    fn eigenstates_are_normalized_and_orthogonal() {
        let (g, well) = reference();
        let h = build_hamiltonian(&g, &well, Phase::Pre).unwrap();
        let (e1, s1) = solve_stationary(&h, 1).unwrap();
        let (e2, s2) = solve_stationary(&h, 2).unwrap();
        assert!(e1 < e2);
        assert!((s1.norm() - 1.0).abs() < 1e-10);
        assert!((s2.norm() - 1.0).abs() < 1e-10);
        assert!(s1.inner(&s2).norm() < 1e-8);
        assert!(eigen_residual(&h, e1, &s1) < EIGEN_RESIDUAL_TOL);
        assert!(eigen_residual(&h, e2, &s2) < EIGEN_RESIDUAL_TOL);
        let n = g.n_points();
        assert!(s1.amplitudes()[0].norm() < 1e-6);
        assert!(s1.amplitudes()[n - 1].norm() < 1e-6);
    }

    #[test]
    fn hard_wall_limit() {
        let well = WellConfig {
            v0: 1e6,
            v1: 1e6,
            ..WellConfig::reference()
        };
        let g = Grid::around_well(&well, 2048, 2.0).unwrap();
        let h = build_hamiltonian(&g, &well, Phase::Pre).unwrap();
        let (e1, _) = solve_stationary(&h, 1).unwrap();
        let exact = PI * PI / 2.0;
        assert!((e1 - exact).abs() / exact < 0.01, "E1 = {e1}");
    }

    #[test]
    fn unbound_level_is_reported() {
        let well = WellConfig {
            v0: 10.0,
            v1: 10.0,
            ..WellConfig::reference()
        };
        let g = Grid::around_well(&well, 1024, 2.0).unwrap();
        let h = build_hamiltonian(&g, &well, Phase::Pre).unwrap();
        assert!(solve_stationary(&h, 1).is_ok());
        assert!(matches!(
            solve_stationary(&h, 5),
            Err(Error::NoBoundState { level: 5, .. })
        ));
        assert!(solve_stationary(&h, 0).is_err());
    }

    #[test]
    fn symmetric_ground_state_is_even() {
        let (g, well) = reference();
        let h = build_hamiltonian(&g, &well, Phase::Pre).unwrap();
        let (_, s) = solve_stationary(&h, 1).unwrap();
        let n = g.n_points();
        for i in 0..n / 2 {
            let d = (s.amplitudes()[i] - s.amplitudes()[n - 1 - i]).norm();
            assert!(d < 1e-8, "node {i}: {d}");
        }
    }

    #[test]
    fn extrapolation_improves_on_raw_energy() {
        let (g, well) = reference();
        let raw = solve_stationary(&build_hamiltonian(&g, &well, Phase::Pre).unwrap(), 1)
            .unwrap()
            .0;
        let fine = solve_stationary(
            &build_hamiltonian(&g.refined(), &well, Phase::Pre).unwrap(),
            1,
        )
        .unwrap()
        .0;
        let ex = extrapolated_energy(&g, &well, Phase::Pre, 1).unwrap();
        assert!((ex - fine).abs() < (raw - fine).abs());
    }
}
