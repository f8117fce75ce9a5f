//! Deterministic horizontal bases. At each surface point the horizontal
//! space has dimension 2n; a basis with near-canonical pairing Gram is built
//! from the projected canonical vectors by pairwise symplectic elimination.

use crate::error::{Error, Result};
use crate::linalg::{solve, solve_matrix, Matrix, Vector};
use crate::quadric::{Quadric, QuadricPoint};
use alloc::format;
use alloc::vec::Vec;

/// Basis of the horizontal space at a point, ordered in Darboux-style pairs
/// (u_0, v_0, u_1, v_1, ...) with omega(u_i, v_i) = 1; the two members of a
/// pair share the same euclidean norm so tensor entries over the frame
/// carry a uniform scale.
#[derive(Clone, Debug)]
pub struct HorizontalFrame {
    vectors: Vec<Vector>,
    gram: Matrix,
}

/// A pairing below this threshold (relative to vector norms) means the
/// remaining pool no longer spans a symplectic subspace.
const PAIRING_FLOOR: f64 = 1e-8;

impl HorizontalFrame {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &Vector {
        &self.vectors[i]
    }

    /// The pairing Gram g[(i,j)] = omega(b_i, b_j); block-canonical to
    /// rounding by construction, but always used explicitly.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// Ambient (2n+2) x 2n matrix whose columns are the frame vectors.
    pub fn as_matrix(&self) -> Matrix {
        let d = self.vectors[0].len();
        Matrix::from_fn(d, self.vectors.len(), |i, j| self.vectors[j][i])
    }

    /// Coefficients of a horizontal ambient vector over the frame, obtained
    /// from pairings against the frame through the Gram.
    pub fn coords_of(&self, q: &Quadric, w: &Vector) -> Result<Vector> {
        let rhs = Vector::from_fn(self.len(), |i, _| q.space().omega(&self.vectors[i], w));
        solve(&self.gram, &rhs)
    }

    /// Same, columnwise for a set of vectors.
    pub fn coords_of_columns(&self, q: &Quadric, ws: &[Vector]) -> Result<Matrix> {
        let rhs = Matrix::from_fn(self.len(), ws.len(), |i, j| {
            q.space().omega(&self.vectors[i], &ws[j])
        });
        solve_matrix(&self.gram, &rhs)
    }

    /// The ambient vector with the given frame coefficients.
    pub fn from_coords(&self, c: &Vector) -> Vector {
        let d = self.vectors[0].len();
        let mut out = Vector::zeros(d);
        for (j, b) in self.vectors.iter().enumerate() {
            out += b * c[j];
        }
        out
    }
}

/// Build the horizontal frame at a point: project the canonical basis, then
/// repeatedly extract the largest remaining vector u (normalized), its
/// strongest symplectic partner v (scaled so omega(u,v)=1), and eliminate
/// the pair from the rest of the pool.
pub fn horizontal_frame(q: &Quadric, p: &QuadricPoint) -> Result<HorizontalFrame> {
    let d = q.dim();
    let target = d - 2;
    let omega = q.space();
    let mut pool: Vec<Vector> = (0..d)
        .map(|i| {
            let mut e = Vector::zeros(d);
            e[i] = 1.0;
            q.project_horizontal(p, &e).into_vector()
        })
        .collect();
    let mut vectors: Vec<Vector> = Vec::with_capacity(target);

    while vectors.len() < target {
        let (ui, unorm) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w.norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or_else(|| Error::BadBasis(format!("horizontal pool exhausted")))?;
        if unorm < PAIRING_FLOOR {
            return Err(Error::BadBasis(format!(
                "horizontal pool degenerate: best remaining norm {unorm:.3e}"
            )));
        }
        let u = pool.swap_remove(ui) / unorm;
        let (vi, pairing) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let wn = w.norm();
                let score = if wn == 0.0 {
                    0.0
                } else {
                    omega.omega(&u, w).abs() / wn
                };
                (i, score)
            })
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or_else(|| Error::BadBasis(format!("no symplectic partner left")))?;
        if pairing < PAIRING_FLOOR {
            return Err(Error::BadBasis(format!(
                "pairing degenerate: best |omega(u,v)|/|v| is {pairing:.3e}"
            )));
        }
        let v = {
            let w = pool.swap_remove(vi);
            let c = omega.omega(&u, &w);
            w / c
        };
        // Balance the pair symplectically: (u, v) -> (s u, v/s) keeps
        // omega(u, v) = 1 exactly while equalizing euclidean norms. Where
        // the horizontal pairing is weak the partner would otherwise be
        // long, and everything cubic in frame steps (finite-difference
        // truncation above all) pays for that in lost digits.
        let s = libm::sqrt(v.norm() / u.norm());
        let u = u * s;
        let v = v / s;
        for w in pool.iter_mut() {
            let a = omega.omega(w, &v);
            let b = omega.omega(w, &u);
            *w -= &u * a;
            *w += &v * b;
        }
        vectors.push(u);
        vectors.push(v);
    }

    let m = vectors.len();
    let gram = Matrix::from_fn(m, m, |i, j| omega.omega(&vectors[i], &vectors[j]));
    // Nondegeneracy witness: the construction already guarantees unit
    // pairings, so a tiny determinant can only mean a logic error upstream.
    if gram.determinant().abs() < 1e-6 {
        return Err(Error::BadBasis(format!(
            "frame Gram nearly singular: det {:.3e}",
            gram.determinant()
        )));
    }
    Ok(HorizontalFrame { vectors, gram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Generator;
    use crate::linalg::max_abs;

    fn cases() -> Vec<Quadric> {
        alloc::vec![
            Quadric::new(Generator::make_case_minus_id(1, 2).unwrap(), 1.0).unwrap(),
            Quadric::new(Generator::make_case_minus_id(3, 2).unwrap(), 1.0).unwrap(),
            Quadric::new(Generator::make_case_plus_id(2).unwrap(), -2.0).unwrap(),
            Quadric::new(Generator::make_case_nilpotent(2, 2, 1).unwrap(), 1.0).unwrap(),
            Quadric::new(Generator::make_remark(1.0, 0.7).unwrap(), 1.0).unwrap(),
        ]
    }

    #[test]
    fn frame_spans_the_horizontal_space_with_canonical_gram() {
        for q in cases() {
            for s in 0..4u64 {
                let p = q.sample_point(5, s).unwrap();
                let f = horizontal_frame(&q, &p).unwrap();
                assert_eq!(f.len(), q.dim() - 2);
                for b in f.vectors() {
                    assert!(q.horizontality_residual(&p, b) < 1e-11);
                }
                let mut expected = Matrix::zeros(f.len(), f.len());
                for k in 0..f.len() / 2 {
                    expected[(2 * k, 2 * k + 1)] = 1.0;
                    expected[(2 * k + 1, 2 * k)] = -1.0;
                }
                assert!(max_abs(&(f.gram() - expected)) < 1e-10);
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let q = &cases()[1];
        let p = q.sample_point(9, 0).unwrap();
        let f = horizontal_frame(q, &p).unwrap();
        let c = Vector::from_fn(f.len(), |i, _| 0.3 * (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -1.0 });
        let w = f.from_coords(&c);
        let back = f.coords_of(q, &w).unwrap();
        assert!((back - c).norm() < 1e-10);
    }

    #[test]
    fn frame_is_deterministic() {
        let q = &cases()[0];
        let p = q.sample_point(13, 1).unwrap();
        let f1 = horizontal_frame(q, &p).unwrap();
        let f2 = horizontal_frame(q, &p).unwrap();
        for (a, b) in f1.vectors().iter().zip(f2.vectors()) {
            assert_eq!(a, b);
        }
    }
}
