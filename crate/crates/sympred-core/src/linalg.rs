//! Dense linear-algebra helpers shared across the crate.
//!
//! Everything is f64 over dynamically sized nalgebra types; ambient
//! dimensions stay small (at most 12), so direct solves are always adequate.

use crate::error::{Error, Result};
use alloc::format;
use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Largest absolute entry; 0 for empty.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, &v| acc.max(v.abs()))
}

/// Largest absolute component; 0 for empty.
pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
}

/// Deterministic dense matrix with standard-normal entries, for stress
/// directions in randomized identity checks. Same counter-based generator
/// as point sampling: one seed, one stream per consumer.
pub fn standard_normal_matrix(d: usize, seed: u64, stream: u64) -> Matrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Matrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

/// Column-sum norm, the scaling estimate for the exponential.
pub fn norm1(m: &Matrix) -> f64 {
    let mut best = 0.0f64;
    for c in m.column_iter() {
        best = best.max(c.iter().map(|v| v.abs()).sum());
    }
    best
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &Matrix, b: &Vector) -> Result<Vector> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::NumericalFailure(format!("singular {}x{} system", a.nrows(), a.ncols())))
}

/// Solve `a X = B` columnwise by LU with partial pivoting.
pub fn solve_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::NumericalFailure(format!("singular {}x{} system", a.nrows(), a.ncols())))
}

/// Expand `v` over the columns of `basis` (assumed independent and
/// well-conditioned): least-squares via the normal equations.
pub fn expand_in_span(basis: &Matrix, v: &Vector) -> Result<Vector> {
    let gram = basis.transpose() * basis;
    let rhs = basis.transpose() * v;
    gram.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::BadBasis(format!("rank-deficient span of {} columns", basis.ncols())))
}

// Pade-13 numerator coefficients (denominator uses the same values with
// alternating signs), standard scaling-and-squaring constants.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm threshold below which the [13/13] approximant is full precision.
const PADE13_THETA: f64 = 5.371920351148152;

/// Squaring cap: beyond this the result overflows f64 anyway.
const MAX_SQUARINGS: i32 = 60;

/// Matrix exponential by [13/13] Pade approximation with scaling and
/// squaring. Accurate to ~1e-15 relative for the dimensions used here.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "exponential of a matrix with non-finite entries"
        )));
    }
    let nrm = norm1(a);
    let mut s: i32 = 0;
    if nrm > PADE13_THETA {
        s = libm::ceil(libm::log2(nrm / PADE13_THETA)) as i32;
        if s > MAX_SQUARINGS {
            return Err(Error::NumericalFailure(format!(
                "exponential does not converge in f64: 1-norm bound {nrm:e}"
            )));
        }
    }
    let scaled = a * libm::scalbn(1.0, -s);
    let ident = Matrix::identity(n, n);

    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = &a6 * (b[13] * &a6 + b[11] * &a4 + b[9] * &a2)
        + b[7] * &a6
        + b[5] * &a4
        + b[3] * &a2
        + b[1] * &ident;
    let u = &scaled * u_inner;
    let v = &a6 * (b[12] * &a6 + b[10] * &a4 + b[8] * &a2)
        + b[6] * &a6
        + b[4] * &a4
        + b[2] * &a2
        + b[0] * &ident;

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut result = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalFailure(format!("singular Pade denominator, 1-norm {nrm:e}")))?;
    for _ in 0..s {
        result = &result * &result;
    }
    if result.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "exponential overflowed during squaring, 1-norm bound {nrm:e}"
        )));
    }
    Ok(result)
}
