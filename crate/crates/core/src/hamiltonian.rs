use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::wavefunction::Wavefunction;
use crate::well::{Phase, WellConfig};

/// Discrete `H = −½ d²/dx² + V(x)` on a grid with hard outer walls.
///
/// Stored as a symmetric tridiagonal matrix: diagonal `1/dx² + Vᵢ`, constant
/// off-diagonal `−1/(2dx²)`. Amplitudes beyond either end of the grid are
/// taken to be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    grid: Grid,
    potential: Vec<f64>,
}

/// Minimum number of cells across the well before the discretization is accepted.
pub const MIN_CELLS_PER_WIDTH: f64 = 64.0;

/// Grid margin (in units of the well width) required on each side of the well.
pub const WELL_MARGIN: f64 = 2.0;

impl Hamiltonian {
    pub fn from_potential(grid: Grid, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != grid.n_points() {
            return Err(Error::param(
                "potential",
                format!(
                    "length {} does not match the grid's {} points",
                    potential.len(),
                    grid.n_points()
                ),
            ));
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("potential", "values must be finite"));
        }
        Ok(Hamiltonian { grid, potential })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Off-diagonal kinetic coupling `−1/(2dx²)`.
    #[inline]
    pub fn off_diagonal(&self) -> f64 {
        let dx = self.grid.dx();
        -0.5 / (dx * dx)
    }

    #[inline]
    pub fn diagonal(&self, i: usize) -> f64 {
        let dx = self.grid.dx();
        1.0 / (dx * dx) + self.potential[i]
    }

    pub fn diagonals(&self) -> Vec<f64> {
        (0..self.grid.n_points())
            .map(|i| self.diagonal(i))
            .collect()
    }

    /// Matrix element `Hᵢⱼ`.
    pub fn element(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diagonal(i),
            1 => self.off_diagonal(),
            _ => 0.0,
        }
    }

    /// Energy below which a state cannot escape through either outer wall.
    pub fn bound_threshold(&self) -> f64 {
        self.potential[0].min(self.potential[self.potential.len() - 1])
    }

    pub fn apply_slice(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = psi.len();
        let e = self.off_diagonal();
        for i in 0..n {
            let mut acc = psi[i] * self.diagonal(i);
            if i > 0 {
                acc += psi[i - 1] * e;
            }
            if i + 1 < n {
                acc += psi[i + 1] * e;
            }
            out[i] = acc;
        }
    }

    pub fn apply_real(&self, v: &[f64], out: &mut [f64]) {
        let n = v.len();
        let e = self.off_diagonal();
        for i in 0..n {
            let mut acc = v[i] * self.diagonal(i);
            if i > 0 {
                acc += v[i - 1] * e;
            }
            if i + 1 < n {
                acc += v[i + 1] * e;
            }
            out[i] = acc;
        }
    }

    /// `Hψ` as a new wavefunction carrying the input's timestamp.
    pub fn apply(&self, psi: &Wavefunction) -> Wavefunction {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.amplitudes().len()];
        self.apply_slice(psi.amplitudes(), &mut out);
        Wavefunction::new(*psi.grid(), out, psi.timestamp()).expect("same grid")
    }

    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, psi: &Wavefunction) -> f64 {
        let h_psi = self.apply(psi);
        psi.inner(&h_psi).re / psi.norm_sqr()
    }
}

/// Cell-averaged well profile: each node carries the mean of the piecewise
/// potential over `[xᵢ − dx/2, xᵢ + dx/2]`, so a node sitting on a well edge
/// gets half the wall height. This keeps the eigenvalues second-order
/// accurate in `dx`.
pub fn well_potential(grid: &Grid, well: &WellConfig, phase: Phase) -> Vec<f64> {
    let (v_left, v_right) = well.walls(phase);
    let dx = grid.dx();
    grid.positions()
        .map(|x| {
            let lo = x - 0.5 * dx;
            let hi = x + 0.5 * dx;
            let left = snap((hi.min(well.x_a) - lo) / dx);
            let right = snap((hi - lo.max(well.x_b)) / dx);
            v_left * left + v_right * right
        })
        .collect()
}

/// Clamps a cell fraction to [0, 1], absorbing rounding near either end.
fn snap(f: f64) -> f64 {
    const EPS: f64 = 1e-9;
    if f <= EPS {
        0.0
    } else if f >= 1.0 - EPS {
        1.0
    } else {
        f
    }
}

/// Assembles the pre- or post-quench Hamiltonian of the well.
pub fn build_hamiltonian(grid: &Grid, well: &WellConfig, phase: Phase) -> Result<Hamiltonian> {
    well.validate()?;
    grid.check_margins(well, WELL_MARGIN)?;
    let limit = well.width() / MIN_CELLS_PER_WIDTH;
    if grid.dx() > limit {
        return Err(Error::UnderResolved {
            dx: grid.dx(),
            limit,
        });
    }
    Hamiltonian::from_potential(*grid, well_potential(grid, well, phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_grid() -> Grid {
        Grid::around_well(&WellConfig::reference(), 2048, 2.0).unwrap()
    }

    #[test]
    fn pre_quench_profile() {
        let well = WellConfig::reference();
        let g = reference_grid();
        let h = build_hamiltonian(&g, &well, Phase::Pre).unwrap();
        for (i, x) in g.positions().enumerate() {
            let v = h.potential()[i];
            if x > well.x_a + 1e-9 && x < well.x_b - 1e-9 {
                assert_eq!(v, 0.0, "x = {x}");
            } else if x < well.x_a - 1e-9 || x > well.x_b + 1e-9 {
                assert_eq!(v, 200.0, "x = {x}");
            }
        }
    }

    #[test]
    fn post_quench_raises_only_left_wall() {
        let well = WellConfig::reference();
        let g = reference_grid();
        let h = build_hamiltonian(&g, &well, Phase::Post).unwrap();
        for (i, x) in g.positions().enumerate() {
            let v = h.potential()[i];
            if x < well.x_a - 1e-9 {
                assert_eq!(v, 400.0);
            } else if x > well.x_b + 1e-9 {
                assert_eq!(v, 200.0);
            } else if x > well.x_a + 1e-9 && x < well.x_b - 1e-9 {
                assert_eq!(v, 0.0);
            }
        }
        let ia = g.nearest_index(well.x_a);
        assert!((h.potential()[ia] - 200.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_on_small_grid() {
        let well = WellConfig::reference();
        let g = Grid::around_well(&well, 5 * 64 + 1, 2.0).unwrap();
        assert!(g.dx() <= well.width() / 64.0);
        let h = build_hamiltonian(&g, &well, Phase::Post).unwrap();
        let n = 64;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(h.element(i, j), h.element(j, i));
            }
        }
        assert_eq!(h.off_diagonal(), -0.5 / (g.dx() * g.dx()));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let well = WellConfig::reference();
        let g = Grid::around_well(&well, 200, 2.0).unwrap();
        assert!(matches!(
            build_hamiltonian(&g, &well, Phase::Pre),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn cramped_domain_is_rejected() {
        let well = WellConfig::reference();
        let g = Grid::new(-0.5, 1.5, 2048).unwrap();
        assert!(matches!(
            build_hamiltonian(&g, &well, Phase::Pre),
            Err(Error::InvalidGrid(_))
        ));
    }
}
