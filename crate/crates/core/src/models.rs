//! The four rules for how the wavefunction reacts to the quench at `t1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigen_residual, solve_stationary, EIGEN_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hamiltonian::{build_hamiltonian, Hamiltonian};
use crate::propagate::{LatticeEvolver, DEFAULT_DT};
use crate::wavefunction::Wavefunction;
use crate::well::{Phase, WellConfig};

/// Which side of `x_A` a [`ResponseModel::Front`] spreads into.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontDirection {
    Rightward,
    #[default]
    Bidirectional,
}

/// Response rule applied after the quench.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseModel {
    /// ψ₀ evolves under the post-quench Hamiltonian from `t1` on.
    Instantaneous,
    /// ψ₁ inside a front of speed `v` around `x_A`, ψ₀ outside; no evolution.
    Front {
        v: f64,
        #[serde(default)]
        direction: FrontDirection,
    },
    /// ψ₀ plus an odd bump at `x_A` whose half-width grows at `growth_speed`.
    LocalPerturbation {
        epsilon: f64,
        growth_speed: f64,
        /// Cap on the bump half-width; `None` means a quarter of the well width.
        #[serde(default)]
        d_max: Option<f64>,
    },
    /// ψ₀ until `t1 + L′/v + jump_offset`, then ψ₁ evolving under the post-quench Hamiltonian.
    DiscreteDelay {
        v: f64,
        l_prime: f64,
        #[serde(default)]
        jump_offset: f64,
    },
}

impl ResponseModel {
    pub fn name(&self) -> &'static str {
        match self {
            ResponseModel::Instantaneous => "instantaneous",
            ResponseModel::Front { .. } => "front",
            ResponseModel::LocalPerturbation { .. } => "local_perturbation",
            ResponseModel::DiscreteDelay { .. } => "discrete_delay",
        }
    }

    /// Checks speed bounds and lengths against the light speed `c_sim`.
    pub fn validate(&self, c_sim: f64) -> Result<()> {
        if !(c_sim.is_finite() && c_sim > 0.0) {
            return Err(Error::param(
                "c_sim",
                format!("c_sim = {c_sim} must be positive"),
            ));
        }
        let speed = |name: &'static str, v: f64| -> Result<()> {
            if !(v.is_finite() && v > 0.0 && v <= c_sim) {
                return Err(Error::param(
                    name,
                    format!("speed {v} must lie in (0, c_sim = {c_sim}]"),
                ));
            }
            Ok(())
        };
        match *self {
            ResponseModel::Instantaneous => Ok(()),
            ResponseModel::Front { v, .. } => speed("model.v", v),
            ResponseModel::LocalPerturbation {
                epsilon,
                growth_speed,
                d_max,
            } => {
                speed("model.growth_speed", growth_speed)?;
                if !epsilon.is_finite() {
                    return Err(Error::param("model.epsilon", "must be finite"));
                }
                if let Some(d) = d_max {
                    if !(d.is_finite() && d > 0.0) {
                        return Err(Error::param(
                            "model.d_max",
                            format!("d_max = {d} must be positive"),
                        ));
                    }
                }
                Ok(())
            }
            ResponseModel::DiscreteDelay {
                v,
                l_prime,
                jump_offset,
            } => {
                speed("model.v", v)?;
                if !(l_prime.is_finite() && l_prime > 0.0) {
                    return Err(Error::param(
                        "model.l_prime",
                        format!("L' = {l_prime} must be positive"),
                    ));
                }
                if !(jump_offset.is_finite() && jump_offset >= 0.0) {
                    return Err(Error::param(
                        "model.jump_offset",
                        format!("offset {jump_offset} must be non-negative"),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Classical speed `√(2E)` of a particle with kinetic energy `E` (ħ = m = 1).
pub fn classical_speed(energy: f64) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::param(
            "energy",
            format!("E = {energy} must be positive"),
        ));
    }
    Ok((2.0 * energy).sqrt())
}

/// ψ₁ on the nodes within `v·dt_since` of `x_a` (and right of it for
/// [`FrontDirection::Rightward`]), ψ₀ elsewhere. The result is not renormalized.
pub fn front_mix(
    psi0: &Wavefunction,
    psi1: &Wavefunction,
    x_a: f64,
    v: f64,
    dt_since: f64,
    direction: FrontDirection,
) -> Result<Wavefunction> {
    if psi0.grid() != psi1.grid() {
        return Err(Error::param("psi1", "psi0 and psi1 must share one grid"));
    }
    if !(dt_since.is_finite() && dt_since >= 0.0) {
        return Err(Error::param(
            "dt_since",
            format!("{dt_since} must be non-negative"),
        ));
    }
    let mut out = psi0.clone();
    if dt_since == 0.0 {
        return Ok(out);
    }
    let reach = v * dt_since;
    let grid = *psi0.grid();
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        let x = grid.x(i);
        let inside = match direction {
            FrontDirection::Bidirectional => (x - x_a).abs() <= reach,
            FrontDirection::Rightward => x >= x_a && x - x_a <= reach,
        };
        if inside {
            *a = psi1.amplitudes()[i];
        }
    }
    Ok(out)
}

/// Accepts a bump half-width `d` at time `delta_t` after the quench only if `d ≤ c·δt`.
pub fn check_perturbation_width(d: f64, delta_t: f64, c_sim: f64) -> Result<()> {
    let limit = c_sim * delta_t;
    if d > limit * (1.0 + 1e-12) {
        return Err(Error::Constraint(format!(
            "d <= c*dt: half-width {d} exceeds c_sim*dt = {limit}"
        )));
    }
    Ok(())
}

fn re_inner(a: &[Complex64], b: &[Complex64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p.conj() * q).re).sum::<f64>() * dx
}

/// ψ₀ plus an odd, compactly supported bump of half-width `d` centered on `x_a`,
/// with the norm of ψ₀ restored exactly.
///
/// `epsilon` is measured relative to the largest odd-part amplitude of ψ₀
/// inside the support. The bump is a sine-squared lobe pair made orthogonal
/// to ψ₀; the quadratic norm excess is cancelled by a small multiple of the
/// windowed odd part of ψ₀.
pub fn perturbed_state(
    psi0: &Wavefunction,
    x_a: f64,
    epsilon: f64,
    d: f64,
) -> Result<Wavefunction> {
    let grid = *psi0.grid();
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::param(
            "d",
            format!("half-width {d} must be positive"),
        ));
    }
    if !epsilon.is_finite() {
        return Err(Error::param("epsilon", "must be finite"));
    }
    if !grid.contains(x_a - d) || !grid.contains(x_a + d) {
        return Err(Error::param(
            "d",
            format!(
                "support [{}, {}] leaves the grid domain [{}, {}]",
                x_a - d,
                x_a + d,
                grid.x_min(),
                grid.x_max()
            ),
        ));
    }
    if epsilon == 0.0 {
        return Ok(psi0.clone());
    }
    let dx = grid.dx();
    let c = grid.nearest_index(x_a);
    let reach = ((d / dx - 1e-9).ceil() as usize).saturating_sub(1);
    // One node pair spans only the odd part itself; nothing orthogonal fits.
    if reach < 2 {
        return Ok(psi0.clone());
    }
    if c < reach || c + reach >= grid.n_points() {
        return Err(Error::param("d", "support reaches the grid boundary"));
    }
    let amps = psi0.amplitudes();
    let len = 2 * reach + 1;
    // Local vectors indexed by c - reach .. c + reach.
    let mut odd = vec![Complex64::new(0.0, 0.0); len];
    let mut odd_w = vec![Complex64::new(0.0, 0.0); len];
    let mut bump = vec![Complex64::new(0.0, 0.0); len];
    for j in 1..=reach {
        let s = j as f64 * dx;
        let o = (amps[c + j] - amps[c - j]) * 0.5;
        let w = (std::f64::consts::PI * s / (2.0 * d)).cos().powi(2);
        let g = (std::f64::consts::PI * s / d).sin().powi(2);
        odd[reach + j] = o;
        odd[reach - j] = -o;
        odd_w[reach + j] = o * w;
        odd_w[reach - j] = -o * w;
        bump[reach + j] = Complex64::new(g, 0.0);
        bump[reach - j] = Complex64::new(-g, 0.0);
    }
    let amp = odd.iter().map(|o| o.norm()).fold(0.0, f64::max);
    if amp == 0.0 {
        return Ok(psi0.clone());
    }
    let q = re_inner(&odd, &odd_w, dx);
    if !(q > 0.0) {
        return Err(Error::Numerical(
            "odd part of psi0 vanishes near x_a".into(),
        ));
    }
    let proj = re_inner(&odd, &bump, dx) / q;
    let mut eta: Vec<Complex64> = bump.iter().zip(&odd_w).map(|(g, o)| g - o * proj).collect();
    let peak = eta.iter().map(|e| e.norm()).fold(0.0, f64::max);
    if !(peak > 1e-9) {
        return Err(Error::Numerical("bump degenerates after projection".into()));
    }
    eta.iter_mut().for_each(|e| *e /= peak);
    let ea = epsilon * amp;
    let b = q + ea * re_inner(&eta, &odd_w, dx);
    let cc = ea * ea * re_inner(&eta, &eta, dx);
    let w = re_inner(&odd_w, &odd_w, dx);
    let disc = b * b - w * cc;
    if disc < 0.0 {
        return Err(Error::Numerical(format!(
            "epsilon = {epsilon} is too large to restore the norm"
        )));
    }
    let a = -cc / (b + b.signum() * disc.sqrt());
    let mut out = psi0.clone();
    let dst = out.amplitudes_mut();
    for k in 0..len {
        dst[c - reach + k] += eta[k] * ea + odd_w[k] * a;
    }
    Ok(out)
}

/// Everything needed to produce ψ(x, t) around the quench.
#[derive(Debug, Clone)]
pub struct QuenchScenario {
    well: WellConfig,
    psi0: Wavefunction,
    psi1: Wavefunction,
    h_pre: Hamiltonian,
    h_post: Hamiltonian,
    model: ResponseModel,
    c_sim: f64,
    dt: f64,
}

impl QuenchScenario {
    /// Solves both wells on `grid` and uses their `level`-th eigenstates as ψ₀ and ψ₁.
    pub fn new(
        grid: &Grid,
        well: WellConfig,
        level: usize,
        model: ResponseModel,
        c_sim: f64,
    ) -> Result<Self> {
        let h_pre = build_hamiltonian(grid, &well, Phase::Pre)?;
        let h_post = build_hamiltonian(grid, &well, Phase::Post)?;
        let (_, psi0) = solve_stationary(&h_pre, level)?;
        let (_, psi1) = solve_stationary(&h_post, level)?;
        Self::from_states(well, psi0, psi1, h_pre, h_post, model, c_sim)
    }

    /// Assembles a scenario from precomputed states, checking that they are
    /// normalized, share one grid and that ψ₁ is stationary under `h_post`.
    pub fn from_states(
        well: WellConfig,
        psi0: Wavefunction,
        psi1: Wavefunction,
        h_pre: Hamiltonian,
        h_post: Hamiltonian,
        model: ResponseModel,
        c_sim: f64,
    ) -> Result<Self> {
        well.validate()?;
        model.validate(c_sim)?;
        let grid = psi0.grid();
        if psi1.grid() != grid || h_pre.grid() != grid || h_post.grid() != grid {
            return Err(Error::param(
                "psi1",
                "states and Hamiltonians must share one grid",
            ));
        }
        for (name, s) in [("psi0", &psi0), ("psi1", &psi1)] {
            if (s.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::param(name, format!("norm {} is not 1", s.norm())));
            }
        }
        let e1 = h_post.expectation(&psi1);
        let r = eigen_residual(&h_post, e1, &psi1);
        if r > EIGEN_RESIDUAL_TOL {
            return Err(Error::param(
                "psi1",
                format!("not an eigenstate of the post-quench Hamiltonian (residual {r:e})"),
            ));
        }
        Ok(QuenchScenario {
            well,
            psi0: psi0.with_timestamp(0.0),
            psi1: psi1.with_timestamp(0.0),
            h_pre,
            h_post,
            model,
            c_sim,
            dt: DEFAULT_DT,
        })
    }

    pub fn with_model(&self, model: ResponseModel) -> Result<Self> {
        model.validate(self.c_sim)?;
        Ok(QuenchScenario {
            model,
            ..self.clone()
        })
    }

    /// Replaces the evolution step used by the evolving variants.
    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("dt = {dt} must be positive")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn well(&self) -> &WellConfig {
        &self.well
    }

    pub fn grid(&self) -> &Grid {
        self.psi0.grid()
    }

    pub fn psi0(&self) -> &Wavefunction {
        &self.psi0
    }

    pub fn psi1(&self) -> &Wavefunction {
        &self.psi1
    }

    pub fn h_pre(&self) -> &Hamiltonian {
        &self.h_pre
    }

    pub fn h_post(&self) -> &Hamiltonian {
        &self.h_post
    }

    /// Hamiltonian in force at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> &Hamiltonian {
        if t < self.well.t1 {
            &self.h_pre
        } else {
            &self.h_post
        }
    }

    pub fn model(&self) -> &ResponseModel {
        &self.model
    }

    pub fn c_sim(&self) -> f64 {
        self.c_sim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Delay before the discrete jump, `L′/v + offset`; `None` for other variants.
    pub fn tau(&self) -> Option<f64> {
        match self.model {
            ResponseModel::DiscreteDelay {
                v,
                l_prime,
                jump_offset,
            } => Some(l_prime / v + jump_offset),
            _ => None,
        }
    }

    /// Bump half-width at `delta_t` after the quench.
    pub fn perturbation_width(&self, delta_t: f64) -> Option<f64> {
        match self.model {
            ResponseModel::LocalPerturbation {
                growth_speed,
                d_max,
                ..
            } => {
                let cap = d_max.unwrap_or(0.25 * self.well.width());
                Some((growth_speed * delta_t).min(cap))
            }
            _ => None,
        }
    }

    /// Lattice evolver the model uses after the quench, if it evolves at all.
    fn evolver(&self) -> Result<Option<LatticeEvolver>> {
        let t1 = self.well.t1;
        Ok(match self.model {
            ResponseModel::Instantaneous => Some(LatticeEvolver::new(
                self.h_post.clone(),
                self.psi0.clone(),
                t1,
                self.dt,
            )?),
            ResponseModel::DiscreteDelay { .. } => Some(LatticeEvolver::new(
                self.h_post.clone(),
                self.psi1.clone(),
                t1 + self.tau().unwrap_or(0.0),
                self.dt,
            )?),
            _ => None,
        })
    }

    /// The state the model assigns to time `t`, or `None` if it needs evolution.
    fn kinematic_state(&self, t: f64) -> Result<Option<Wavefunction>> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param(
                "t",
                format!("t = {t} must be finite and non-negative"),
            ));
        }
        let t1 = self.well.t1;
        if t < t1 {
            return Ok(Some(self.psi0.clone().with_timestamp(t)));
        }
        let delta = t - t1;
        let state = match self.model {
            ResponseModel::Instantaneous => None,
            ResponseModel::Front { v, direction } => Some(front_mix(
                &self.psi0,
                &self.psi1,
                self.well.x_a,
                v,
                delta,
                direction,
            )?),
            ResponseModel::LocalPerturbation { epsilon, .. } => {
                let d = self.perturbation_width(delta).unwrap_or(0.0);
                if d < self.grid().dx() {
                    Some(self.psi0.clone())
                } else {
                    Some(perturbed_state(&self.psi0, self.well.x_a, epsilon, d)?)
                }
            }
            ResponseModel::DiscreteDelay { .. } => {
                if delta < self.tau().unwrap_or(0.0) {
                    Some(self.psi0.clone())
                } else {
                    None
                }
            }
        };
        Ok(state.map(|s| s.with_timestamp(t)))
    }

    pub fn state_at(&self, t: f64) -> Result<Wavefunction> {
        if let Some(s) = self.kinematic_state(t)? {
            return Ok(s);
        }
        self.evolver()?.expect("evolving variant").evolve_to(t)
    }

    /// States at non-decreasing `times`; each equals [`Self::state_at`] bit for bit.
    pub fn trajectory(&self, times: &[f64]) -> Result<Vec<Wavefunction>> {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("times", "sample times must be non-decreasing"));
        }
        let mut out = Vec::with_capacity(times.len());
        let mut pending = Vec::new();
        for (i, &t) in times.iter().enumerate() {
            match self.kinematic_state(t)? {
                Some(s) => out.push(Some(s)),
                None => {
                    out.push(None);
                    pending.push(i);
                }
            }
        }
        if !pending.is_empty() {
            let ev = self.evolver()?.expect("evolving variant");
            let ts: Vec<f64> = pending.iter().map(|&i| times[i]).collect();
            for (i, s) in pending.into_iter().zip(ev.trajectory(&ts)?) {
                out[i] = Some(s);
            }
        }
        Ok(out.into_iter().map(|s| s.expect("filled")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(model: ResponseModel) -> QuenchScenario {
        let well = WellConfig::reference();
        let grid = Grid::around_well(&well, 2048, 2.0).unwrap();
        QuenchScenario::new(&grid, well, 1, model, 1.0).unwrap()
    }

    #[test]
    fn every_variant_is_psi0_before_the_quench() {
        let base = scenario(ResponseModel::Instantaneous);
        let models = [
            ResponseModel::Instantaneous,
            ResponseModel::Front {
                v: 1.0,
                direction: FrontDirection::Bidirectional,
            },
            ResponseModel::LocalPerturbation {
                epsilon: 0.05,
                growth_speed: 1.0,
                d_max: None,
            },
            ResponseModel::DiscreteDelay {
                v: 1.0,
                l_prime: 1.2,
                jump_offset: 0.0,
            },
        ];
        for m in models {
            let s = base.with_model(m).unwrap();
            let st = s.state_at(1.0 - 1e-9).unwrap();
            assert_eq!(st.amplitudes(), s.psi0().amplitudes(), "{}", m.name());
        }
    }

    #[test]
    fn speeds_above_light_are_rejected() {
        let s = scenario(ResponseModel::Instantaneous);
        let m = ResponseModel::LocalPerturbation {
            epsilon: 0.05,
            growth_speed: 1.5,
            d_max: None,
        };
        assert!(s.with_model(m).is_err());
        assert!(s
            .with_model(ResponseModel::Front {
                v: 0.0,
                direction: FrontDirection::Rightward
            })
            .is_err());
        assert!(s.state_at(-1.0).is_err());
    }

    #[test]
    fn front_zero_width_and_full_coverage() {
        let s = scenario(ResponseModel::Instantaneous);
        let (p0, p1) = (s.psi0(), s.psi1());
        let z = front_mix(p0, p1, 0.0, 1.0, 0.0, FrontDirection::Bidirectional).unwrap();
        assert_eq!(&z, p0);
        let g = s.grid();
        let span = (g.x_max() - 0.0).max(0.0 - g.x_min());
        let full = front_mix(p0, p1, 0.0, 1.0, span, FrontDirection::Bidirectional).unwrap();
        assert_eq!(full.amplitudes(), p1.amplitudes());
        assert!((full.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rightward_front_leaves_left_side_alone() {
        let s = scenario(ResponseModel::Instantaneous);
        let m = front_mix(s.psi0(), s.psi1(), 0.0, 1.0, 0.5, FrontDirection::Rightward).unwrap();
        let g = s.grid();
        for i in 0..g.n_points() {
            let x = g.x(i);
            let expect = if (0.0..=0.5).contains(&x) {
                s.psi1()
            } else {
                s.psi0()
            };
            assert_eq!(m.amplitudes()[i], expect.amplitudes()[i]);
        }
    }

    #[test]
    fn perturbation_zero_epsilon_is_identity() {
        let s = scenario(ResponseModel::Instantaneous);
        let p = perturbed_state(s.psi0(), 0.0, 0.0, 0.1).unwrap();
        assert_eq!(&p, s.psi0());
    }

    #[test]
    fn perturbation_keeps_norm_and_is_odd() {
        let s = scenario(ResponseModel::Instantaneous);
        let p = perturbed_state(s.psi0(), 0.0, 0.05, 0.1).unwrap();
        assert!((p.norm_sqr() - 1.0).abs() <= 1e-10);
        let g = s.grid();
        let c = g.nearest_index(0.0);
        let diff: Vec<Complex64> = p
            .amplitudes()
            .iter()
            .zip(s.psi0().amplitudes())
            .map(|(a, b)| a - b)
            .collect();
        assert!(diff.iter().any(|d| d.norm() > 1e-6));
        for j in 0..200 {
            assert!((diff[c + j] + diff[c - j]).norm() < 1e-10);
        }
        let beyond = (0.1 / g.dx()).ceil() as usize;
        for j in beyond..beyond + 20 {
            assert_eq!(diff[c + j], Complex64::new(0.0, 0.0));
            assert_eq!(diff[c - j], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn perturbation_support_must_fit() {
        let s = scenario(ResponseModel::Instantaneous);
        assert!(perturbed_state(s.psi0(), 0.0, 0.05, 10.0).is_err());
        assert!(perturbed_state(s.psi0(), 0.0, 0.05, -0.1).is_err());
    }

    #[test]
    fn width_bound_boundary() {
        assert!(check_perturbation_width(0.1, 0.1, 1.0).is_ok());
        assert!(check_perturbation_width(0.2, 0.1, 1.0).is_err());
    }

    #[test]
    fn discrete_delay_holds_then_jumps() {
        let s = scenario(ResponseModel::DiscreteDelay {
            v: 1.0,
            l_prime: 1.2,
            jump_offset: 0.0,
        });
        assert_eq!(s.tau(), Some(1.2));
        assert_eq!(s.state_at(2.0).unwrap().amplitudes(), s.psi0().amplitudes());
        let at_jump = s.state_at(2.2).unwrap();
        assert_eq!(at_jump.amplitudes(), s.psi1().amplitudes());
        let later = s.state_at(2.3).unwrap();
        assert!((later.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trajectory_agrees_with_state_at() {
        let s = scenario(ResponseModel::Instantaneous);
        let times = [0.5, 1.0, 1.01, 1.0123, 1.05];
        let traj = s.trajectory(&times).unwrap();
        for (t, st) in times.iter().zip(&traj) {
            assert_eq!(&s.state_at(*t).unwrap(), st);
        }
    }

    #[test]
    fn model_serde_is_tagged() {
        let m = ResponseModel::Front {
            v: 0.5,
            direction: FrontDirection::Rightward,
        };
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"{"kind":"front","v":0.5,"direction":"rightward"}"#);
        let back: ResponseModel = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn classical_speed_of_unit_energy() {
        assert!((classical_speed(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(classical_speed(-1.0).is_err());
    }
}
