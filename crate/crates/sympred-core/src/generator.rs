//! Generators: elements A of the symplectic Lie algebra with case metadata.
//!
//! The four constructor families cover every square structure of A
//! (A^2 = -Id, +Id, 0) plus the four-dimensional complex-eigenvalue example;
//! arbitrary algebra elements enter through `from_explicit`. Entries of the
//! constructed matrices are 0 or +-1 (or exact rationals for the
//! complex-eigenvalue family), so the algebraic identities below hold exactly
//! in floating point.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Matrix};
use crate::space::SymplecticSpace;
use crate::tol;
use alloc::format;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// A^2 = -Id; the quadric fibers over a complex projective base.
    CaseMinusId,
    /// A^2 = +Id; a pair of supplementary lagrangian eigenspaces.
    CasePlusId,
    /// A^2 = 0 with A != 0.
    CaseNilpotent,
    /// Four-dimensional example with eigenvalues a+-ib, -a+-ib.
    CaseRemark,
    /// User-supplied matrix, structure detected numerically.
    Explicit,
}

#[derive(Clone, Debug)]
pub struct Generator {
    space: SymplecticSpace,
    a: Matrix,
    case_tag: CaseTag,
    p: usize,
    q: usize,
    lambda: Option<f64>,
    basis: Matrix,
}

impl Generator {
    /// A^2 = -Id with signature (p, q), p + q = n + 1: the quadratic form
    /// H restricted to the i-th coordinate pair is positive for i < p and
    /// negative after. The canonical basis is already adapted.
    pub fn make_case_minus_id(n: usize, p: usize) -> Result<Generator> {
        let space = SymplecticSpace::standard_form(n);
        if p > n + 1 {
            return Err(Error::InvalidInput(format!(
                "signature p={p} exceeds n+1={}",
                n + 1
            )));
        }
        let d = space.dim();
        let mut a = Matrix::zeros(d, d);
        for i in 0..d / 2 {
            if i < p {
                a[(2 * i + 1, 2 * i)] = 1.0;
                a[(2 * i, 2 * i + 1)] = -1.0;
            } else {
                a[(2 * i + 1, 2 * i)] = -1.0;
                a[(2 * i, 2 * i + 1)] = 1.0;
            }
        }
        Ok(Generator {
            space,
            a,
            case_tag: CaseTag::CaseMinusId,
            p,
            q: n + 1 - p,
            lambda: Some(-1.0),
            basis: Matrix::identity(d, d),
        })
    }

    /// A^2 = +Id: the +-1 eigenspaces are supplementary lagrangian
    /// subspaces. Adapted basis columns are the +1 eigenvectors e_1..e_{n+1}
    /// followed by the -1 eigenvectors f_1..f_{n+1}, with omega(e_i, f_j)
    /// equal to delta_ij.
    pub fn make_case_plus_id(n: usize) -> Result<Generator> {
        let space = SymplecticSpace::standard_form(n);
        let d = space.dim();
        let mut a = Matrix::zeros(d, d);
        let mut basis = Matrix::zeros(d, d);
        for i in 0..d / 2 {
            a[(2 * i, 2 * i)] = 1.0;
            a[(2 * i + 1, 2 * i + 1)] = -1.0;
            basis[(2 * i, i)] = 1.0;
            basis[(2 * i + 1, d / 2 + i)] = 1.0;
        }
        Ok(Generator {
            space,
            a,
            case_tag: CaseTag::CasePlusId,
            p: 0,
            q: 0,
            lambda: Some(1.0),
            basis,
        })
    }

    /// A^2 = 0, rank p, with omega(e_k, A e_k) = +1 for the first q of the
    /// p rank directions and -1 for the rest. Adapted basis columns are
    /// e_1..e_p, then Ae_1..Ae_p, then the untouched coordinate pairs.
    pub fn make_case_nilpotent(n: usize, p: usize, q: usize) -> Result<Generator> {
        let space = SymplecticSpace::standard_form(n);
        if p == 0 || p > n + 1 {
            return Err(Error::InvalidInput(format!(
                "rank p={p} outside 1..={}",
                n + 1
            )));
        }
        if q > p {
            return Err(Error::InvalidInput(format!("positive count q={q} exceeds p={p}")));
        }
        let d = space.dim();
        let mut a = Matrix::zeros(d, d);
        let mut basis = Matrix::zeros(d, d);
        for k in 0..d / 2 {
            if k < q {
                // e_k is the first pair coordinate, Ae_k the second.
                a[(2 * k + 1, 2 * k)] = 1.0;
            } else if k < p {
                // Reversed roles flip the sign of omega(e_k, Ae_k).
                a[(2 * k, 2 * k + 1)] = 1.0;
            }
        }
        for k in 0..p {
            let (e_row, ae_row) = if k < q { (2 * k, 2 * k + 1) } else { (2 * k + 1, 2 * k) };
            basis[(e_row, k)] = 1.0;
            basis[(ae_row, p + k)] = 1.0;
        }
        for k in p..d / 2 {
            basis[(2 * k, 2 * p + 2 * (k - p))] = 1.0;
            basis[(2 * k + 1, 2 * p + 2 * (k - p) + 1)] = 1.0;
        }
        Ok(Generator {
            space,
            a,
            case_tag: CaseTag::CaseNilpotent,
            p,
            q,
            lambda: Some(0.0),
            basis,
        })
    }

    /// The four-dimensional generator with complex eigenvalues a+-ib and
    /// -a+-ib (a, b != 0), for which A^2 is not proportional to the
    /// identity. Built on the adapted basis e_1..e_4 with pairings
    /// omega(e_1,e_3) = 1/2 = -omega(e_2,e_4), then conjugated into
    /// canonical coordinates.
    pub fn make_remark(a_param: f64, b_param: f64) -> Result<Generator> {
        if a_param == 0.0 || b_param == 0.0 || !a_param.is_finite() || !b_param.is_finite() {
            return Err(Error::InvalidInput(format!(
                "complex-eigenvalue generator needs a*b != 0, got a={a_param}, b={b_param}"
            )));
        }
        let space = SymplecticSpace::standard_form(1);
        // Adapted basis vectors in canonical coordinates; the 1/2 scaling
        // realizes omega(e_1,e_3) = 1/2 exactly.
        let basis = Matrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.5, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -0.5,
            ],
        );
        // Action in the adapted basis: Ae1 = a e1 - b e2, Ae2 = b e1 + a e2,
        // Ae3 = -a e3 + b e4, Ae4 = -b e3 - a e4.
        let (a, b) = (a_param, b_param);
        let action = Matrix::from_row_slice(
            4,
            4,
            &[
                a, b, 0.0, 0.0, //
                -b, a, 0.0, 0.0, //
                0.0, 0.0, -a, -b, //
                0.0, 0.0, b, -a,
            ],
        );
        let basis_inv = basis
            .clone()
            .try_inverse()
            .expect("adapted basis is invertible by construction");
        let matrix = &basis * action * basis_inv;
        Ok(Generator {
            space,
            a: matrix,
            case_tag: CaseTag::CaseRemark,
            p: 0,
            q: 0,
            lambda: None,
            basis,
        })
    }

    /// Wrap a user-supplied algebra element. Rejects matrices outside the
    /// algebra or identically zero; detects A^2 = lambda Id by the trace
    /// estimate lambda* = tr(A^2)/(2n+2).
    pub fn from_explicit(matrix: Matrix) -> Result<Generator> {
        let d = matrix.nrows();
        if d != matrix.ncols() || d < 2 || d % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "generator matrix must be square of even dimension >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("generator matrix has non-finite entries".into()));
        }
        if max_abs(&matrix) == 0.0 {
            return Err(Error::InvalidInput("generator matrix must be nonzero".into()));
        }
        let n = d / 2 - 1;
        let space = SymplecticSpace::standard_form(n);
        let residual = space.sp_residual(&matrix)?;
        if residual > tol::ALGEBRAIC {
            return Err(Error::InvalidInput(format!(
                "matrix is not in the symplectic algebra: residual {residual:e}"
            )));
        }
        let a2 = &matrix * &matrix;
        let lambda_star = a2.trace() / d as f64;
        let lambda = if max_abs(&(&a2 - Matrix::identity(d, d) * lambda_star)) <= tol::DERIVATIVE {
            Some(lambda_star)
        } else {
            None
        };
        Ok(Generator {
            space,
            a: matrix,
            case_tag: CaseTag::Explicit,
            p: 0,
            q: 0,
            lambda,
            basis: Matrix::identity(d, d),
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// Columns are the adapted basis vectors in canonical coordinates.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// The level value each family's quadric is cataloged at: +1 when the
    /// quadratic form has a positive direction, -1 otherwise, and -2 for
    /// the lagrangian-pair family whose natural level is x.y = 1.
    pub fn default_mu0(&self) -> f64 {
        match self.case_tag {
            CaseTag::CaseMinusId => {
                if self.p >= 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            CaseTag::CasePlusId => -2.0,
            CaseTag::CaseNilpotent => {
                if self.q >= 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            CaseTag::CaseRemark => 1.0,
            CaseTag::Explicit => 1.0,
        }
    }
}
