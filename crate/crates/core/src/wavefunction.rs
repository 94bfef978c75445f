use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex amplitudes on a [`Grid`] at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    timestamp: f64,
}

impl Wavefunction {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>, timestamp: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::param(
                "amplitudes",
                format!(
                    "length {} does not match the grid's {} points",
                    amplitudes.len(),
                    grid.n_points()
                ),
            ));
        }
        Ok(Wavefunction {
            grid,
            amplitudes,
            timestamp,
        })
    }

    pub fn from_real(grid: Grid, values: &[f64], timestamp: f64) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            timestamp,
        )
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, timestamp: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.positions().map(f).collect();
        Wavefunction {
            grid,
            amplitudes,
            timestamp,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn set_timestamp(&mut self, t: f64) {
        self.timestamp = t;
    }

    pub fn with_timestamp(mut self, t: f64) -> Self {
        self.timestamp = t;
        self
    }

    /// `Σ |ψᵢ|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!(
                "cannot normalize a state of norm {n}"
            )));
        }
        let s = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Discrete inner product `⟨self|other⟩ = Σ conj(selfᵢ)·otherᵢ dx`.
    pub fn inner(&self, other: &Wavefunction) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    /// `‖self − other‖` in the discrete L² norm.
    pub fn l2_distance(&self, other: &Wavefunction) -> f64 {
        let s: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (s * self.grid.dx()).sqrt()
    }

    /// Serializes as CSV: a `#` metadata line, a `x,re,im` header, one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.amplitudes.len() * 48);
        let _ = writeln!(
            out,
            "# timestamp={} x_min={} x_max={} n_points={}",
            self.timestamp,
            self.grid.x_min(),
            self.grid.x_max(),
            self.grid.n_points()
        );
        out.push_str("x,re,im\n");
        for (i, a) in self.amplitudes.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.grid.x(i), a.re, a.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let meta = lines
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .ok_or_else(|| Error::Config("wavefunction CSV is missing its metadata line".into()))?;
        let mut timestamp = None;
        let mut x_min = None;
        let mut x_max = None;
        let mut n_points = None;
        for field in meta.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("malformed metadata field `{field}`")))?;
            match k {
                "timestamp" => timestamp = Some(parse_f64(v)?),
                "x_min" => x_min = Some(parse_f64(v)?),
                "x_max" => x_max = Some(parse_f64(v)?),
                "n_points" => {
                    n_points = Some(
                        v.parse::<usize>()
                            .map_err(|e| Error::Config(format!("bad n_points `{v}`: {e}")))?,
                    )
                }
                _ => {}
            }
        }
        let missing = |name: &str| Error::Config(format!("metadata line lacks `{name}`"));
        let grid = Grid::new(
            x_min.ok_or_else(|| missing("x_min"))?,
            x_max.ok_or_else(|| missing("x_max"))?,
            n_points.ok_or_else(|| missing("n_points"))?,
        )?;
        match lines.next() {
            Some(h) if h.trim() == "x,re,im" => {}
            _ => return Err(Error::Config("expected `x,re,im` header".into())),
        }
        let mut amplitudes = Vec::with_capacity(grid.n_points());
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut cols = line.split(',');
            let _x = cols.next();
            let re = parse_f64(cols.next().unwrap_or(""))?;
            let im = parse_f64(cols.next().unwrap_or(""))?;
            amplitudes.push(Complex64::new(re, im));
        }
        Wavefunction::new(
            grid,
            amplitudes,
            timestamp.ok_or_else(|| missing("timestamp"))?,
        )
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Config(format!("bad number `{s}`: {e}")))
}

/// Half-open node range `[lo, hi)` covered by a region, after validation.
pub(crate) fn region_indices(grid: &Grid, x_lo: f64, x_hi: f64) -> Result<(usize, usize)> {
    if !(x_lo.is_finite() && x_hi.is_finite()) {
        return Err(Error::param("region", "bounds must be finite"));
    }
    if x_lo > x_hi {
        return Err(Error::param(
            "region",
            format!("inverted region: x_lo = {x_lo} > x_hi = {x_hi}"),
        ));
    }
    if !grid.contains(x_lo) || !grid.contains(x_hi) {
        return Err(Error::param(
            "region",
            format!(
                "[{x_lo}, {x_hi}] is not inside the grid domain [{}, {}]",
                grid.x_min(),
                grid.x_max()
            ),
        ));
    }
    let lo = grid.ceil_index(x_lo);
    let hi = if x_hi >= grid.x_max() {
        grid.n_points()
    } else {
        grid.ceil_index(x_hi)
    };
    Ok((lo, hi.max(lo)))
}

/// Probability of finding the particle in `[x_lo, x_hi)`: `Σ |ψᵢ|² dx` over the
/// nodes in the region. The right end is open so that adjacent regions are
/// disjoint; a region reaching `x_max` includes the last node.
pub fn prob_in_region(psi: &Wavefunction, x_lo: f64, x_hi: f64) -> Result<f64> {
    let (lo, hi) = region_indices(psi.grid(), x_lo, x_hi)?;
    Ok(psi.amplitudes()[lo..hi]
        .iter()
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        * psi.grid().dx())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid) -> Wavefunction {
        let mut psi = Wavefunction::from_fn(grid, 0.0, |x| {
            Complex64::new((-(x - 0.3) * (x - 0.3) * 4.0).exp(), 0.2 * x)
        });
        psi.normalize().unwrap();
        psi
    }

    #[test]
    fn full_domain_holds_all_probability() {
        let psi = gaussian(Grid::new(-4.0, 4.0, 801).unwrap());
        let p = prob_in_region(&psi, -4.0, 4.0).unwrap();
        assert!((p - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_region_is_zero() {
        let psi = gaussian(Grid::new(-4.0, 4.0, 801).unwrap());
        assert_eq!(prob_in_region(&psi, 0.31, 0.31).unwrap(), 0.0);
        assert_eq!(prob_in_region(&psi, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverted_or_outside_regions_are_rejected() {
        let psi = gaussian(Grid::new(-4.0, 4.0, 801).unwrap());
        assert!(prob_in_region(&psi, 1.0, 0.0).is_err());
        assert!(prob_in_region(&psi, -5.0, 0.0).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let psi = gaussian(Grid::new(-4.0, 4.0, 65).unwrap()).with_timestamp(1.25);
        let back = Wavefunction::from_csv(&psi.to_csv()).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        assert!(Wavefunction::new(g, vec![Complex64::new(0.0, 0.0); 3], 0.0).is_err());
    }
}
