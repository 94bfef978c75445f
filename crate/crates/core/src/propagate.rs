//! Unitary time stepping by the Cayley (Crank–Nicolson) form
//! `(1 + i·dt·H/2) ψ' = (1 − i·dt·H/2) ψ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::wavefunction::Wavefunction;

/// Default evolution step. Well above `0.1·dx²` on the reference grid, which
/// only costs phase accuracy in the highest discrete levels; the bound
/// states of interest stay accurate to ~(E·dt)³.
pub const DEFAULT_DT: f64 = 1e-4;

/// Fraction of a step below which a time is treated as lying on the lattice.
const LATTICE_SLACK: f64 = 1e-9;

/// A prefactored one-step propagator for a fixed Hamiltonian and step size.
#[derive(Debug, Clone)]
pub struct Propagator {
    dt: f64,
    diag: Vec<f64>,
    off: f64,
    factors: crate::tridiag::ThomasFactors,
}

impl Propagator {
    pub fn new(h: &Hamiltonian, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param(
                "dt",
                format!("dt = {dt} must be positive and finite"),
            ));
        }
        let diag = h.diagonals();
        let off = h.off_diagonal();
        let half = Complex64::new(0.0, 0.5 * dt);
        let lhs: Vec<Complex64> = diag
            .iter()
            .map(|&d| Complex64::new(1.0, 0.0) + half * d)
            .collect();
        let factors = crate::tridiag::ThomasFactors::new(&lhs, half * off)?;
        Ok(Propagator {
            dt,
            diag,
            off,
            factors,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances raw amplitudes by one step in place; `scratch` is resized as needed.
    pub fn step_in_place(&self, amps: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = amps.len();
        scratch.resize(n, Complex64::new(0.0, 0.0));
        let half = Complex64::new(0.0, 0.5 * self.dt);
        let e = half * self.off;
        for i in 0..n {
            let mut acc = amps[i] * (Complex64::new(1.0, 0.0) - half * self.diag[i]);
            if i > 0 {
                acc -= amps[i - 1] * e;
            }
            if i + 1 < n {
                acc -= amps[i + 1] * e;
            }
            scratch[i] = acc;
        }
        self.factors.solve_in_place(scratch);
        amps.copy_from_slice(scratch);
    }

    /// One step; the result's timestamp is advanced by `dt`.
    pub fn step(&self, psi: &Wavefunction) -> Wavefunction {
        let mut out = psi.clone();
        let mut scratch = Vec::new();
        self.step_in_place(out.amplitudes_mut(), &mut scratch);
        out.set_timestamp(psi.timestamp() + self.dt);
        out
    }
}

/// Advances `psi` by a single step of `dt` under `h`.
pub fn evolve_step(psi: &Wavefunction, h: &Hamiltonian, dt: f64) -> Result<Wavefunction> {
    if psi.grid() != h.grid() {
        return Err(Error::param(
            "psi",
            "wavefunction and Hamiltonian grids differ",
        ));
    }
    Ok(Propagator::new(h, dt)?.step(psi))
}

/// Evolution from a fixed origin on a time lattice `origin + k·dt`.
///
/// A time `t` is reached by `k = ⌊(t − origin)/dt⌋` full steps followed by one
/// partial step for the remainder, so the state at `t` does not depend on
/// which other times were requested alongside it.
#[derive(Debug, Clone)]
pub struct LatticeEvolver {
    h: Hamiltonian,
    start: Wavefunction,
    origin: f64,
    full: Propagator,
}

impl LatticeEvolver {
    pub fn new(h: Hamiltonian, start: Wavefunction, origin: f64, dt: f64) -> Result<Self> {
        if start.grid() != h.grid() {
            return Err(Error::param(
                "start",
                "wavefunction and Hamiltonian grids differ",
            ));
        }
        if !origin.is_finite() {
            return Err(Error::param("origin", "must be finite"));
        }
        let full = Propagator::new(&h, dt)?;
        Ok(LatticeEvolver {
            h,
            start: start.with_timestamp(origin),
            origin,
            full,
        })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn dt(&self) -> f64 {
        self.full.dt()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    /// Splits `t − origin` into whole steps and a remainder in `[0, dt)`.
    fn split(&self, t: f64) -> Result<(u64, f64)> {
        let span = t - self.origin;
        if !(span.is_finite() && span >= -LATTICE_SLACK * self.dt()) {
            return Err(Error::param(
                "t",
                format!("t = {t} precedes the evolution origin {}", self.origin),
            ));
        }
        let dt = self.dt();
        let k = (span / dt + LATTICE_SLACK).floor().max(0.0);
        let rem = span - k * dt;
        let rem = if rem <= LATTICE_SLACK * dt { 0.0 } else { rem };
        Ok((k as u64, rem))
    }

    fn finish(&self, amps: &[Complex64], rem: f64, t: f64) -> Result<Wavefunction> {
        let mut out = Wavefunction::new(*self.start.grid(), amps.to_vec(), t)?;
        if rem > 0.0 {
            let mut scratch = Vec::new();
            Propagator::new(&self.h, rem)?.step_in_place(out.amplitudes_mut(), &mut scratch);
        }
        Ok(out)
    }

    pub fn evolve_to(&self, t: f64) -> Result<Wavefunction> {
        let (k, rem) = self.split(t)?;
        let mut amps = self.start.amplitudes().to_vec();
        let mut scratch = Vec::new();
        for _ in 0..k {
            self.full.step_in_place(&mut amps, &mut scratch);
        }
        self.finish(&amps, rem, t)
    }

    /// States at every requested time; `times` must be non-decreasing.
    /// Each entry equals `evolve_to` at that time bit for bit.
    pub fn trajectory(&self, times: &[f64]) -> Result<Vec<Wavefunction>> {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("times", "sample times must be non-decreasing"));
        }
        let mut amps = self.start.amplitudes().to_vec();
        let mut scratch = Vec::new();
        let mut done = 0u64;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let (k, rem) = self.split(t)?;
            while done < k {
                self.full.step_in_place(&mut amps, &mut scratch);
                done += 1;
            }
            out.push(self.finish(&amps, rem, t)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::solve_stationary;
    use crate::grid::Grid;
    use crate::hamiltonian::build_hamiltonian;
    use crate::well::{Phase, WellConfig};

    fn reference_h() -> Hamiltonian {
        let well = WellConfig::reference();
        let g = Grid::around_well(&well, 2048, 2.0).unwrap();
        build_hamiltonian(&g, &well, Phase::Pre).unwrap()
    }

    #[test]
    fn eigenstate_only_rotates_phase() {
        let h = reference_h();
        let (e, psi) = solve_stationary(&h, 1).unwrap();
        let dt = h.grid().recommended_dt();
        let next = evolve_step(&psi, &h, dt).unwrap();
        assert!((next.timestamp() - dt).abs() < 1e-18);
        let phase = Complex64::from_polar(1.0, -e * dt);
        for (a, b) in next.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < 1e-8);
            assert!((a - b * phase).norm() < 1e-8);
        }
    }

    #[test]
    fn free_gaussian_spreads_analytically() {
        let g = Grid::new(-40.0, 40.0, 4001).unwrap();
        let h = Hamiltonian::from_potential(g, vec![0.0; g.n_points()]).unwrap();
        let s0: f64 = 1.0;
        let mut psi = Wavefunction::from_fn(g, 0.0, |x| {
            Complex64::new((-x * x / (4.0 * s0 * s0)).exp(), 0.0)
        });
        psi.normalize().unwrap();
        let t = 4.0;
        let ev = LatticeEvolver::new(h, psi, 0.0, 1e-3).unwrap();
        let out = ev.evolve_to(t).unwrap();
        let dx = g.dx();
        let var: f64 = g
            .positions()
            .zip(out.amplitudes())
            .map(|(x, a)| x * x * a.norm_sqr() * dx)
            .sum();
        let expected = s0 * (1.0 + (t / (2.0 * s0 * s0)).powi(2)).sqrt();
        assert!(
            (var.sqrt() - expected).abs() / expected < 5e-3,
            "{} vs {expected}",
            var.sqrt()
        );
    }

    #[test]
    fn trajectory_matches_evolve_to_bitwise() {
        let h = reference_h();
        let (_, psi) = solve_stationary(&h, 1).unwrap();
        let mut kicked = psi.clone();
        for (i, a) in kicked.amplitudes_mut().iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, 0.01 * i as f64);
        }
        let ev = LatticeEvolver::new(h, kicked, 1.0, 1e-3).unwrap();
        let times = [1.0, 1.0005, 1.003, 1.01, 1.01237];
        let traj = ev.trajectory(&times).unwrap();
        for (t, s) in times.iter().zip(&traj) {
            assert_eq!(&ev.evolve_to(*t).unwrap(), s);
        }
        assert!(ev.evolve_to(0.5).is_err());
    }

    #[test]
    fn rejects_bad_dt() {
        let h = reference_h();
        assert!(Propagator::new(&h, 0.0).is_err());
        assert!(Propagator::new(&h, f64::NAN).is_err());
    }
}
