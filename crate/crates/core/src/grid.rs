use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::well::WellConfig;

/// Uniform 1-D grid in natural units (ħ = m = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

/// Relative slack used when deciding whether a coordinate sits on a node.
const NODE_TOL: f64 = 1e-9;

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is below the minimum of {}",
                Self::MIN_POINTS
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "domain [{x_min}, {x_max}] must be finite with x_min < x_max"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Builds a grid whose nodes fall exactly on both well edges, with at least
    /// `margin · L` of evanescent room on each side.
    ///
    /// The well spans an integer number of cells and both margins hold the
    /// same integer number of cells, so `x_a` and `x_b` are nodes. With
    /// `n_points = 2048` and `margin = 2` the well holds 409 cells.
    pub fn around_well(well: &WellConfig, n_points: usize, margin: f64) -> Result<Self> {
        well.validate()?;
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is below the minimum of {}",
                Self::MIN_POINTS
            )));
        }
        if !(margin.is_finite() && margin > 0.0) {
            return Err(Error::param(
                "grid.margin",
                format!("margin = {margin} must be positive"),
            ));
        }
        let intervals = n_points - 1;
        let mut well_cells = (intervals as f64 / (1.0 + 2.0 * margin)).floor() as usize;
        if (intervals - well_cells) % 2 == 1 {
            well_cells -= 1;
        }
        if well_cells == 0 {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points cannot resolve the well with margin {margin}"
            )));
        }
        let margin_cells = (intervals - well_cells) / 2;
        let dx = well.width() / well_cells as f64;
        Grid::new(
            well.x_a - margin_cells as f64 * dx,
            well.x_b + margin_cells as f64 * dx,
            n_points,
        )
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Position of node `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Index of the node closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let s = ((x - self.x_min) / self.dx()).round();
        s.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// First node index with `x_i >= x` (within a tiny tolerance).
    pub(crate) fn ceil_index(&self, x: f64) -> usize {
        let s = (x - self.x_min) / self.dx();
        let i = (s - NODE_TOL).ceil();
        i.clamp(0.0, self.n_points as f64) as usize
    }

    /// True when `x` lies inside the closed domain, up to a rounding slack.
    pub fn contains(&self, x: f64) -> bool {
        let slack = NODE_TOL * self.dx();
        x >= self.x_min - slack && x <= self.x_max + slack
    }

    /// Same domain with the spacing halved; every old node is a node of the new grid.
    pub fn refined(&self) -> Grid {
        Grid {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    /// Time step below which the Crank–Nicolson propagator resolves the whole
    /// discrete spectrum: `0.1 · dx²`. Larger steps stay unitary and are
    /// accurate for low-lying levels only.
    pub fn recommended_dt(&self) -> f64 {
        0.1 * self.dx() * self.dx()
    }

    /// Checks that the domain strictly contains the well with `margin · L` of room on both sides.
    pub fn check_margins(&self, well: &WellConfig, margin: f64) -> Result<()> {
        let room = margin * well.width();
        let slack = NODE_TOL * self.dx();
        let left = well.x_a - self.x_min;
        let right = self.x_max - well.x_b;
        if left + slack < room || right + slack < room {
            return Err(Error::InvalidGrid(format!(
                "domain [{}, {}] leaves margins ({left}, {right}); at least {room} (= {margin}·L) is required on each side of the well",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }
}
