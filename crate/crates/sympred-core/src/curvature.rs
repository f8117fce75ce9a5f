//! Closed-form curvature of the reduced connection over a horizontal frame:
//! the five-term tensor, its Ricci contraction and the constant kappa, the
//! Ricci-built model component E with remainder W, and the symmetry
//! one-form whose vanishing detects local symmetry.
//!
//! Tensor layout: a (1,3)-tensor T(b_i, b_j) b_l = sum_k T[i,j,l,k] b_k is a
//! flat vec indexed by ((i*m + j)*m + l)*m + k over a frame of size m.

use crate::error::{Error, Result};
use crate::frame::{horizontal_frame, HorizontalFrame};
use crate::linalg::{max_abs, norm1, solve_matrix, Matrix, Vector};
use crate::quadric::{Quadric, QuadricPoint};
use crate::tol;
use alloc::format;
use alloc::vec::Vec;

#[inline]
pub(crate) fn idx4(m: usize, i: usize, j: usize, l: usize, k: usize) -> usize {
    ((i * m + j) * m + l) * m + k
}

#[inline]
pub(crate) fn idx3(m: usize, k: usize, i: usize, j: usize) -> usize {
    (k * m + i) * m + j
}

/// Closed value of the Ricci proportionality constant in this crate's trace
/// convention: contracting the five-term template gives
/// ricci = ((2n+2)/mu0) * Gram * A_y for every generator.
pub fn kappa_closed_form(n: usize, mu0: f64) -> f64 {
    (2 * n + 2) as f64 / mu0
}

/// The descended generator action on a horizontal frame:
/// U -> A u - (omega(A u, Ax)/mu0) x, expressed as a frame matrix.
#[derive(Clone, Debug)]
pub struct AyOperator {
    matrix: Matrix,
    sp_residual: f64,
    horizontality_residual: f64,
}

impl AyOperator {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Residual of Omega(A_y U, V) + Omega(U, A_y V) = 0 over the frame.
    pub fn sp_residual(&self) -> f64 {
        self.sp_residual
    }

    pub fn horizontality_residual(&self) -> f64 {
        self.horizontality_residual
    }
}

pub fn ay_operator(q: &Quadric, p: &QuadricPoint, frame: &HorizontalFrame) -> Result<AyOperator> {
    let x = p.coords();
    let a = q.generator().matrix();
    let ax = a * x;
    let a_scale = norm1(a);
    let mut horizontality_residual = 0.0f64;
    let lifted: Vec<Vector> = frame
        .vectors()
        .iter()
        .map(|b| {
            let ab = a * b;
            let c = q.space().omega(&ab, &ax) / q.mu0();
            let w = &ab - x * c;
            // measure against the generator's action scale on the frame
            // vector, not just |A b|: a nilpotent generator can send a frame
            // vector to rounding dust, and a noise-over-noise ratio says
            // nothing about horizontality
            let scale = w.norm().max(ab.norm()).max(a_scale * b.norm()).max(1e-300);
            let r = (q.space().omega(&w, &ax).abs() / ax.norm())
                .max(q.space().omega(&w, x).abs() / x.norm())
                / scale;
            horizontality_residual = horizontality_residual.max(r);
            w
        })
        .collect();
    let matrix = frame.coords_of_columns(q, &lifted)?;
    let gm = frame.gram() * &matrix;
    let sp_residual = max_abs(&(&gm - gm.transpose()));
    Ok(AyOperator {
        matrix,
        sp_residual,
        horizontality_residual,
    })
}

/// The five-term curvature shape with B in place of the descended generator
/// (overall 1/mu0 factor NOT included):
/// T(e_i,e_j)e_l = G_jl B e_i - G_il B e_j - 2 G_ij B e_l
///               + (GB)_lj e_i - (GB)_li e_j.
pub fn five_term_template(gram: &Matrix, b: &Matrix) -> Vec<f64> {
    let m = gram.nrows();
    let gb = gram * b;
    let mut t = alloc::vec![0.0; m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let base = idx4(m, i, j, l, 0);
                for k in 0..m {
                    let mut val = gram[(j, l)] * b[(k, i)]
                        - gram[(i, l)] * b[(k, j)]
                        - 2.0 * gram[(i, j)] * b[(k, l)];
                    if k == i {
                        val += gb[(l, j)];
                    }
                    if k == j {
                        val -= gb[(l, i)];
                    }
                    t[base + k] = val;
                }
            }
        }
    }
    t
}

/// Ricci contraction in the fixed convention ricci(U,V) = trace(T -> R(T,U)V).
pub fn ricci_from_tensor(m: usize, r: &[f64]) -> Matrix {
    Matrix::from_fn(m, m, |i, j| (0..m).map(|t| r[idx4(m, t, i, j, t)]).sum())
}

/// Least-squares fit ricci ~ kappa * (Gram * ay). Returns (kappa, relative
/// max-abs fit residual). A vanishing descended generator with vanishing
/// Ricci fits kappa = 0; a vanishing generator with nonvanishing Ricci
/// cannot be fit.
pub fn fit_kappa(gram: &Matrix, ay: &Matrix, ricci: &Matrix) -> Result<(f64, f64)> {
    let gm = gram * ay;
    let gm_max = max_abs(&gm);
    let ricci_max = max_abs(ricci);
    if gm_max < tol::ALGEBRAIC {
        if ricci_max < tol::ALGEBRAIC {
            return Ok((0.0, 0.0));
        }
        return Err(Error::FitImpossible);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in ricci.iter().zip(gm.iter()) {
        num += a * b;
        den += b * b;
    }
    let kappa = num / den;
    let residual = max_abs(&(ricci - gm * kappa)) / 1.0f64.max(ricci_max);
    Ok((kappa, residual))
}

/// The Ricci-determined component and remainder of a curvature-shaped
/// tensor.
#[derive(Clone, Debug)]
pub struct RicciTypeSplit {
    e: Vec<f64>,
    w: Vec<f64>,
    w_norm: f64,
    scalar: f64,
    ricci_match_residual: f64,
}

impl RicciTypeSplit {
    pub fn e(&self) -> &[f64] {
        &self.e
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Max-abs entry of the remainder W = R - E.
    pub fn w_norm(&self) -> f64 {
        self.w_norm
    }

    /// Fitted template scale; (2n+2)^-1 for genuine reduced curvature.
    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    /// How exactly Ricci(E) reproduces the Ricci of the input.
    pub fn ricci_match_residual(&self) -> f64 {
        self.ricci_match_residual
    }
}

/// Split R = E + W where E is the five-term template built from the
/// endomorphism B with Gram * B = ricci(R), scaled so that Ricci(E) matches
/// ricci(R); W carries everything the Ricci tensor does not see.
pub fn ricci_type_split(gram: &Matrix, r: &[f64], ricci: &Matrix) -> Result<RicciTypeSplit> {
    let m = gram.nrows();
    let ricci_max = max_abs(ricci);
    if ricci_max < tol::ALGEBRAIC {
        let w = r.to_vec();
        let w_norm = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        return Ok(RicciTypeSplit {
            e: alloc::vec![0.0; r.len()],
            w,
            w_norm,
            scalar: 0.0,
            ricci_match_residual: 0.0,
        });
    }
    let b = solve_matrix(gram, ricci)?;
    let template = five_term_template(gram, &b);
    let template_ricci = ricci_from_tensor(m, &template);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, t) in ricci.iter().zip(template_ricci.iter()) {
        num += a * t;
        den += t * t;
    }
    if den < tol::ALGEBRAIC * tol::ALGEBRAIC {
        return Err(Error::FitImpossible);
    }
    let scalar = num / den;
    let ricci_match_residual = max_abs(&(ricci - template_ricci * scalar)) / 1.0f64.max(ricci_max);
    let e: Vec<f64> = template.iter().map(|v| v * scalar).collect();
    let w: Vec<f64> = r.iter().zip(e.iter()).map(|(a, b)| a - b).collect();
    let w_norm = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(RicciTypeSplit {
        e,
        w,
        w_norm,
        scalar,
        ricci_match_residual,
    })
}

/// Curvature data of the reduced connection at one surface point.
#[derive(Clone, Debug)]
pub struct CurvatureAtPoint {
    m: usize,
    gram: Matrix,
    r: Vec<f64>,
    ricci: Matrix,
    kappa: f64,
    kappa_residual: f64,
    split: RicciTypeSplit,
}

impl CurvatureAtPoint {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn tensor(&self) -> &[f64] {
        &self.r
    }

    pub fn entry(&self, i: usize, j: usize, l: usize, k: usize) -> f64 {
        self.r[idx4(self.m, i, j, l, k)]
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn ricci(&self) -> &Matrix {
        &self.ricci
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kappa_residual(&self) -> f64 {
        self.kappa_residual
    }

    pub fn split(&self) -> &RicciTypeSplit {
        &self.split
    }

    pub fn w_norm(&self) -> f64 {
        self.split.w_norm
    }

    /// max |R(Y,Z) + R(Z,Y)|.
    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    for k in 0..m {
                        let v = self.r[idx4(m, i, j, l, k)] + self.r[idx4(m, j, i, l, k)];
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        worst
    }

    /// max |R(Y,Z)T + R(Z,T)Y + R(T,Y)Z| over the frame.
    pub fn bianchi_residual(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    for k in 0..m {
                        let v = self.r[idx4(m, i, j, l, k)]
                            + self.r[idx4(m, j, l, i, k)]
                            + self.r[idx4(m, l, i, j, k)];
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        worst
    }

    /// max |Omega(R(Y,Z)T, U) - Omega(R(Y,Z)U, T)|.
    pub fn symplectic_symmetry_residual(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    for u in 0..l {
                        let mut s_lu = 0.0;
                        let mut s_ul = 0.0;
                        for k in 0..m {
                            s_lu += self.r[idx4(m, i, j, l, k)] * self.gram[(k, u)];
                            s_ul += self.r[idx4(m, i, j, u, k)] * self.gram[(k, l)];
                        }
                        worst = worst.max((s_lu - s_ul).abs());
                    }
                }
            }
        }
        worst
    }

    /// max-abs Ricci contraction of the W remainder.
    pub fn ricci_of_w_residual(&self) -> f64 {
        max_abs(&ricci_from_tensor(self.m, &self.split.w))
    }
}

/// Evaluate the closed-form curvature of the reduced connection at a point
/// over the given horizontal frame, including the Ricci fit and the
/// Ricci-type split.
pub fn closed_form_curvature(
    q: &Quadric,
    p: &QuadricPoint,
    frame: &HorizontalFrame,
) -> Result<CurvatureAtPoint> {
    let m = frame.len();
    let ay = ay_operator(q, p, frame)?;
    if ay.horizontality_residual() > tol::DERIVATIVE {
        return Err(Error::InternalConsistency(format!(
            "descended generator not horizontal: residual {:.3e}",
            ay.horizontality_residual()
        )));
    }
    let template = five_term_template(frame.gram(), ay.matrix());
    let scale = 1.0 / q.mu0();
    let r: Vec<f64> = template.iter().map(|v| v * scale).collect();
    let ricci = ricci_from_tensor(m, &r);
    let (kappa, kappa_residual) = fit_kappa(frame.gram(), ay.matrix(), &ricci)?;
    let split = ricci_type_split(frame.gram(), &r, &ricci)?;
    Ok(CurvatureAtPoint {
        m,
        gram: frame.gram().clone(),
        r,
        ricci,
        kappa,
        kappa_residual,
        split,
    })
}

/// Closed-form covariant derivative of the Ricci tensor over the frame:
/// N[k,i,j] = (kappa/mu0) [ omega(b_j, A^2 x) G_ik + omega(b_i, A^2 x) G_jk ].
pub fn nabla_ricci_closed(
    q: &Quadric,
    p: &QuadricPoint,
    frame: &HorizontalFrame,
    kappa: f64,
) -> Vec<f64> {
    let m = frame.len();
    let x = p.coords();
    let a = q.generator().matrix();
    let a2x = a * (a * x);
    let pair: Vec<f64> = frame
        .vectors()
        .iter()
        .map(|b| q.space().omega(b, &a2x))
        .collect();
    let factor = kappa / q.mu0();
    let gram = frame.gram();
    let mut out = alloc::vec![0.0; m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                out[idx3(m, k, i, j)] =
                    factor * (pair[j] * gram[(i, k)] + pair[i] * gram[(j, k)]);
            }
        }
    }
    out
}

/// The one-form obstructing local symmetry, over the frame.
#[derive(Clone, Debug)]
pub struct OneFormU {
    values: Vector,
    norm: f64,
}

impl OneFormU {
    pub fn values(&self) -> &Vector {
        &self.values
    }

    /// max_k |u(b_k)| / |b_k|.
    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// u(V) = (kappa/mu0) omega(V, A^2 x), evaluated on the frame.
pub fn one_form_u(q: &Quadric, p: &QuadricPoint, frame: &HorizontalFrame, kappa: f64) -> OneFormU {
    let x = p.coords();
    let a = q.generator().matrix();
    let a2x = a * (a * x);
    let factor = kappa / q.mu0();
    let values = Vector::from_fn(frame.len(), |k, _| {
        factor * q.space().omega(frame.vector(k), &a2x)
    });
    let norm = frame
        .vectors()
        .iter()
        .enumerate()
        .map(|(k, b)| values[k].abs() / b.norm())
        .fold(0.0, f64::max);
    OneFormU { values, norm }
}

/// Aggregated local-symmetry decision over sampled points.
#[derive(Clone, Debug)]
pub struct SymmetryVerdict {
    max_u_norm: f64,
    locally_symmetric: bool,
    globally_symmetric_catalog: bool,
    points: usize,
}

impl SymmetryVerdict {
    pub fn max_u_norm(&self) -> f64 {
        self.max_u_norm
    }

    pub fn locally_symmetric(&self) -> bool {
        self.locally_symmetric
    }

    /// True when the generator is a catalog constructor with A^2 = lambda Id,
    /// where local symmetry is known to extend globally. Not verified
    /// numerically here.
    pub fn globally_symmetric_catalog(&self) -> bool {
        self.globally_symmetric_catalog
    }

    pub fn points(&self) -> usize {
        self.points
    }
}

pub fn symmetry_verdict(q: &Quadric, samples: usize, seed: u64) -> Result<SymmetryVerdict> {
    let mut max_u_norm = 0.0f64;
    for s in 0..samples {
        let p = q.sample_point(seed, s as u64)?;
        let frame = horizontal_frame(q, &p)?;
        let curv = closed_form_curvature(q, &p, &frame)?;
        let u = one_form_u(q, &p, &frame, curv.kappa());
        max_u_norm = max_u_norm.max(u.norm());
    }
    let locally_symmetric = max_u_norm <= tol::SYMMETRY_VERDICT;
    let globally_symmetric_catalog = q.generator().lambda().is_some()
        && !matches!(
            q.generator().case_tag(),
            crate::generator::CaseTag::Explicit
        );
    Ok(SymmetryVerdict {
        max_u_norm,
        locally_symmetric,
        globally_symmetric_catalog,
        points: samples,
    })
}
