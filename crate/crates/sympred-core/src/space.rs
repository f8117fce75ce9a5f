//! The ambient symplectic vector space R^(2n+2) with the canonical form.
//!
//! Convention: coordinates come in consecutive pairs (x_0, x_1), (x_2, x_3),
//! ... and omega(e_{2i}, e_{2i+1}) = 1 with all other independent pairings
//! zero. Every adapted basis elsewhere in the crate is stored as a
//! change-of-basis matrix into these canonical coordinates.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Matrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpace {
    n: usize,
}

impl SymplecticSpace {
    /// The standard form on R^(2n+2).
    pub fn standard_form(n: usize) -> Self {
        SymplecticSpace { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension 2n+2.
    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    /// The matrix of omega in canonical coordinates: block-diagonal
    /// [[0,1],[-1,0]] per coordinate pair. Determinant 1, skew-symmetric.
    pub fn omega_matrix(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for i in 0..d / 2 {
            m[(2 * i, 2 * i + 1)] = 1.0;
            m[(2 * i + 1, 2 * i)] = -1.0;
        }
        m
    }

    /// omega(u, v) evaluated pairwise, without forming the matrix.
    pub fn omega(&self, u: &Vector, v: &Vector) -> f64 {
        let d = self.dim();
        assert_eq!(u.len(), d, "omega: first argument dimension");
        assert_eq!(v.len(), d, "omega: second argument dimension");
        let mut acc = 0.0;
        for i in 0..d / 2 {
            acc += u[2 * i] * v[2 * i + 1] - u[2 * i + 1] * v[2 * i];
        }
        acc
    }

    /// Apply the omega matrix: (Omega v) without forming it.
    pub fn omega_apply(&self, v: &Vector) -> Vector {
        let d = self.dim();
        assert_eq!(v.len(), d, "omega_apply: dimension");
        let mut out = Vector::zeros(d);
        for i in 0..d / 2 {
            out[2 * i] = v[2 * i + 1];
            out[2 * i + 1] = -v[2 * i];
        }
        out
    }

    /// Largest |omega(Au,v) + omega(u,Av)| over canonical basis pairs,
    /// i.e. the max-abs entry of A^T Omega + Omega A.
    pub fn sp_residual(&self, a: &Matrix) -> Result<f64> {
        let d = self.dim();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.nrows().max(a.ncols()),
            });
        }
        let omega = self.omega_matrix();
        Ok(max_abs(&(a.transpose() * &omega + &omega * a)))
    }

    /// Membership test for the symplectic Lie algebra, with the residual.
    pub fn is_symplectic_algebra(&self, a: &Matrix, tol: f64) -> Result<(bool, f64)> {
        let r = self.sp_residual(a)?;
        Ok((r <= tol, r))
    }

    /// Max-abs entry of M^T Omega M - Omega; zero iff M preserves omega.
    pub fn symplectic_matrix_residual(&self, m: &Matrix) -> Result<f64> {
        let d = self.dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.nrows().max(m.ncols()),
            });
        }
        let omega = self.omega_matrix();
        Ok(max_abs(&(m.transpose() * &omega * m - &omega)))
    }

    /// Build an algebra element from a symmetric matrix: A = Omega^{-1} S.
    /// Every algebra element arises this way; used for randomized tests.
    pub fn sp_from_symmetric(&self, s: &Matrix) -> Result<Matrix> {
        let d = self.dim();
        if s.nrows() != d || s.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.nrows().max(s.ncols()),
            });
        }
        // Omega^{-1} = -Omega = Omega^T.
        Ok(-self.omega_matrix() * s)
    }
}
