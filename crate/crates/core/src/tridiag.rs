//! Tridiagonal linear solvers.
//!
//! Two flavours are needed: a complex Thomas factorization for the implicit
//! propagator (whose matrix is strictly diagonally dominant, so no pivoting is
//! required), and a real solver with partial pivoting for inverse iteration,
//! where the shifted matrix is nearly singular by construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// LU factors of a complex tridiagonal matrix with constant off-diagonals,
/// ready for repeated O(n) solves.
#[derive(Debug, Clone)]
pub struct ThomasFactors {
    off: Complex64,
    c_prime: Vec<Complex64>,
    inv_denom: Vec<Complex64>,
}

impl ThomasFactors {
    /// Factors the matrix with diagonal `diag` and both off-diagonals equal to `off`.
    pub fn new(diag: &[Complex64], off: Complex64) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::Numerical("empty tridiagonal system".into()));
        }
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denom = vec![Complex64::new(0.0, 0.0); n];
        let mut denom = diag[0];
        for i in 0..n {
            if i > 0 {
                denom = diag[i] - off * c_prime[i - 1];
            }
            if denom.norm() < 1e-300 {
                return Err(Error::Numerical(format!("zero pivot in row {i}")));
            }
            let inv = denom.inv();
            inv_denom[i] = inv;
            c_prime[i] = off * inv;
        }
        Ok(ThomasFactors {
            off,
            c_prime,
            inv_denom,
        })
    }

    pub fn len(&self) -> usize {
        self.c_prime.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_prime.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_denom[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.off * rhs[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.c_prime[i] * rhs[i + 1];
        }
    }
}

/// Solves `A x = b` for a real tridiagonal `A` given by `sub` (length n−1),
/// `diag` (n) and `sup` (n−1), using Gaussian elimination with partial
/// pivoting. Exactly-zero pivots are replaced by `tiny_pivot`, which lets
/// inverse iteration run with a shift equal to an eigenvalue.
pub fn solve_pivoted(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    b: &[f64],
    tiny_pivot: f64,
) -> Vec<f64> {
    let n = diag.len();
    assert!(n > 0);
    assert_eq!(sub.len() + 1, n);
    assert_eq!(sup.len() + 1, n);
    assert_eq!(b.len(), n);

    // Row i of U holds u0[i] (diagonal), u1[i], u2[i] (two superdiagonals).
    let mut u0 = diag.to_vec();
    let mut u1: Vec<f64> = sup.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut l = vec![0.0; n];
    let mut x = b.to_vec();

    for i in 0..n - 1 {
        let below = sub[i];
        if below.abs() > u0[i].abs() {
            // Swap rows i and i+1.
            let next_diag = u0[i + 1];
            let next_sup = if i + 1 < n - 1 { u1[i + 1] } else { 0.0 };
            let (r0, r1, r2) = (u0[i], u1[i], u2[i]);
            u0[i] = below;
            u1[i] = next_diag;
            u2[i] = next_sup;
            let m = r0 / below;
            l[i] = m;
            u0[i + 1] = r1 - m * next_diag;
            u1[i + 1] = r2 - m * next_sup;
            x.swap(i, i + 1);
        } else {
            let pivot = if u0[i] == 0.0 { tiny_pivot } else { u0[i] };
            u0[i] = pivot;
            let m = below / pivot;
            l[i] = m;
            u0[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
        }
        let xi = x[i];
        x[i + 1] -= l[i] * xi;
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = tiny_pivot;
    }

    // Back substitution on the banded upper factor.
    for i in (0..n).rev() {
        let mut acc = x[i];
        if i + 1 < n {
            acc -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= u2[i] * x[i + 2];
        }
        x[i] = acc / u0[i];
    }
    x
}
