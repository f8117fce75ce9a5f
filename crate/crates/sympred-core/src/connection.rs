//! The induced connection on the quadric, the defect functionals behind the
//! geodesic and affine-flow statements, and the reduced connection on the
//! orbit quotient together with its lift identities.
//!
//! All checks here run on polynomial vector fields: derivatives and brackets
//! are exact, so every identity that holds on the surface is verified to
//! rounding accuracy, with no finite-difference layer.

use crate::error::{Error, Result};
use crate::generator::{CaseTag, Generator};
use crate::linalg::{Matrix, Vector};
use crate::poly::{hamiltonian_vector_field, Poly, PolyField};
use crate::quadric::{HorizontalVector, Quadric, QuadricPoint, TangentVector};
use crate::tol;
use alloc::vec::Vec;

/// Covariant derivative value split into its flat and correction parts.
#[derive(Clone, Debug)]
pub struct ConnectionValue {
    value: TangentVector,
    flat: Vector,
    correction: Vector,
}

impl ConnectionValue {
    pub fn value(&self) -> &TangentVector {
        &self.value
    }

    pub fn flat(&self) -> &Vector {
        &self.flat
    }

    pub fn correction(&self) -> &Vector {
        &self.correction
    }
}

/// Residual of the pairings of `value` against x and Ax, measured against an
/// explicit cancellation scale instead of |value| itself: a covariant
/// derivative that cancels to zero is still exactly tangent.
fn constraint_residual(q: &Quadric, p: &QuadricPoint, value: &Vector, scale: f64, radial: bool) -> f64 {
    let x = p.coords();
    let ax = q.generator().matrix() * x;
    let denom = scale.max(1e-300);
    let mut r = q.space().omega(value, &ax).abs() / ax.norm() / denom;
    if radial {
        r = r.max(q.space().omega(value, x).abs() / x.norm() / denom);
    }
    r
}

fn require_tangent(q: &Quadric, p: &QuadricPoint, v: &Vector) -> Result<()> {
    let residual = q.tangency_residual(p, v);
    if residual > tol::DERIVATIVE {
        return Err(Error::NotTangent {
            residual,
            tolerance: tol::DERIVATIVE,
        });
    }
    Ok(())
}

/// The quadratic Hamiltonian omega(x, Ax) as a polynomial.
pub fn hamiltonian_poly(q: &Quadric) -> Poly {
    let d = q.dim();
    PolyField::identity(d).omega_poly(&PolyField::linear(q.generator().matrix()))
}

/// The covariant derivative of `z` along `y` as a polynomial field:
/// flat derivative plus the radial correction (1/mu0) omega(Z, AY) x.
pub fn sigma_connection_field(q: &Quadric, y: &PolyField, z: &PolyField) -> PolyField {
    let d = q.dim();
    let ay = y.apply_matrix(q.generator().matrix());
    let correction = PolyField::identity(d)
        .scalar_mul(&z.omega_poly(&ay))
        .scale(1.0 / q.mu0());
    z.derivative_along(y).add(&correction)
}

/// Covariant derivative of the surface connection at a point. Both fields
/// must be tangent at the point; the result is tangent with its residual
/// recorded.
pub fn sigma_connection(
    q: &Quadric,
    y: &PolyField,
    z: &PolyField,
    p: &QuadricPoint,
) -> Result<ConnectionValue> {
    let x = p.coords();
    let yx = y.eval(x);
    let zx = z.eval(x);
    require_tangent(q, p, &yx)?;
    require_tangent(q, p, &zx)?;
    let flat = z.flat_derivative(x, &yx);
    let ayx = q.generator().matrix() * &yx;
    let correction = x * (q.space().omega(&zx, &ayx) / q.mu0());
    let value = &flat + &correction;
    let scale = value.norm().max(flat.norm()).max(correction.norm());
    let residual = constraint_residual(q, p, &value, scale, false);
    Ok(ConnectionValue {
        value: TangentVector::from_raw(value, residual),
        flat,
        correction,
    })
}

/// Norm of the acceleration of the Hamiltonian flow line through the point,
/// up to the constant speed factor: || A^2 x + (1/mu0) omega(Ax, A^2 x) x ||.
/// Vanishes exactly when A^2 is a multiple of the identity.
pub fn geodesic_defect(q: &Quadric, p: &QuadricPoint) -> f64 {
    let x = p.coords();
    let a = q.generator().matrix();
    let ax = a * x;
    let a2x = a * &ax;
    let r = &a2x + x * (q.space().omega(&ax, &a2x) / q.mu0());
    r.norm()
}

/// Defect of the flow-affinity identity
/// [X_H, nabla_Y Z] - nabla_[X_H,Y] Z - nabla_Y [X_H,Z] at the point.
/// Contract: zero for tangent fields, any generator.
pub fn affine_defect(q: &Quadric, y: &PolyField, z: &PolyField, p: &QuadricPoint) -> Result<f64> {
    let x = p.coords();
    require_tangent(q, p, &y.eval(x))?;
    require_tangent(q, p, &z.eval(x))?;
    let xh = PolyField::linear(&(q.generator().matrix() * -2.0));
    let nabla = sigma_connection_field(q, y, z);
    let t1 = xh.bracket(&nabla).eval(x);
    let t2 = sigma_connection_field(q, &xh.bracket(y), z).eval(x);
    let t3 = sigma_connection_field(q, y, &xh.bracket(&z)).eval(x);
    Ok((t1 - t2 - t3).norm())
}

/// Polynomial field tangent along the whole surface:
/// v -> Bv - (omega(Bv, Av)/mu0) v. On the surface this agrees with the
/// tangent projection of the linear field Bv.
pub fn tangent_family(q: &Quadric, b: &Matrix) -> PolyField {
    let d = q.dim();
    let identity = PolyField::identity(d);
    let bv = PolyField::linear(b);
    let av = PolyField::linear(q.generator().matrix());
    identity
        .scalar_mul(&bv.omega_poly(&av))
        .scale(-1.0 / q.mu0())
        .add(&bv)
}

/// Polynomial field horizontal along the whole surface: the tangent family
/// plus (omega(Bv, v)/mu0) Av. Flow-invariant exactly when [A, B] = 0.
pub fn horizontal_family(q: &Quadric, b: &Matrix) -> PolyField {
    let d = q.dim();
    let identity = PolyField::identity(d);
    let bv = PolyField::linear(b);
    let av = PolyField::linear(q.generator().matrix());
    tangent_family(q, b).add(
        &av.scalar_mul(&bv.omega_poly(&identity))
            .scale(1.0 / q.mu0()),
    )
}

/// Hamiltonian field of (H - mu0) g: tangent along the surface for any
/// polynomial g, vertical on it (a multiple of X_H there).
pub fn hamiltonian_family(q: &Quadric, g: &Poly) -> PolyField {
    let d = q.dim();
    let mut f = hamiltonian_poly(q);
    f = f.add(&Poly::constant(d, -q.mu0()));
    hamiltonian_vector_field(&f.mul(g))
}

/// How far `field` is from being an invariant horizontal lift at the point:
/// the larger of the horizontality residual and the normalized bracket with
/// the Hamiltonian field (flow invariance).
pub fn lift_residual(q: &Quadric, p: &QuadricPoint, field: &PolyField) -> f64 {
    let x = p.coords();
    let v = field.eval(x);
    let hres = q.horizontality_residual(p, &v);
    let xh = PolyField::linear(&(q.generator().matrix() * -2.0));
    let br = xh.bracket(field).eval(x);
    let scale = 1.0f64.max(v.norm());
    hres.max(br.norm() / scale)
}

pub fn require_lift(q: &Quadric, p: &QuadricPoint, field: &PolyField) -> Result<()> {
    let residual = lift_residual(q, p, field);
    if residual > tol::DERIVATIVE {
        return Err(Error::NotALift {
            residual,
            tolerance: tol::DERIVATIVE,
        });
    }
    Ok(())
}

/// Reduced covariant derivative from pointwise data: the caller supplies the
/// lift values and the flat derivative of the z-lift along the y-lift, and
/// gets the lift of the reduced value
/// D_y z + (1/mu0) omega(z, Ay) x + (1/mu0) omega(y, z) Ax.
pub fn reduced_pointwise(
    q: &Quadric,
    x: &Vector,
    ybar: &Vector,
    zbar: &Vector,
    flat_yz: &Vector,
) -> Vector {
    let a = q.generator().matrix();
    let omega = q.space();
    let ay = a * ybar;
    flat_yz
        + x * (omega.omega(zbar, &ay) / q.mu0())
        + (a * x) * (omega.omega(ybar, zbar) / q.mu0())
}

/// Lift of the reduced covariant derivative for invariant horizontal lifts
/// given as polynomial fields. The result is horizontal; its residual is the
/// content of the radial-pairing identity and is recorded, not projected
/// away.
pub fn reduced_connection(
    q: &Quadric,
    yh: &PolyField,
    zh: &PolyField,
    p: &QuadricPoint,
) -> Result<HorizontalVector> {
    require_lift(q, p, yh)?;
    require_lift(q, p, zh)?;
    let x = p.coords();
    let ybar = yh.eval(x);
    let zbar = zh.eval(x);
    let flat = zh.flat_derivative(x, &ybar);
    let value = reduced_pointwise(q, x, &ybar, &zbar, &flat);
    let scale = value
        .norm()
        .max(flat.norm())
        .max(ybar.norm() * zbar.norm());
    let residual = constraint_residual(q, p, &value, scale, true);
    Ok(HorizontalVector::from_raw(value, residual))
}

/// The reduced symplectic form: omega of the two lift values. Errors if
/// either vector fails the horizontality check.
pub fn reduced_form(q: &Quadric, p: &QuadricPoint, ybar: &Vector, zbar: &Vector) -> Result<f64> {
    for v in [ybar, zbar] {
        // vectors at rounding scale are horizontal by convention
        if v.norm() <= 1e-12 {
            continue;
        }
        let residual = q.horizontality_residual(p, v);
        if residual > tol::DERIVATIVE {
            return Err(Error::NotTangent {
                residual,
                tolerance: tol::DERIVATIVE,
            });
        }
    }
    Ok(q.space().omega(ybar, zbar))
}

/// Lift of the bracket of the projected fields: the horizontal part of
/// [ybar, zbar], which equals [ybar, zbar] + (2/mu0) omega(ybar, zbar) Ax.
/// Returns the value and the residual between those two expressions.
pub fn lift_bracket(
    q: &Quadric,
    yh: &PolyField,
    zh: &PolyField,
    p: &QuadricPoint,
) -> Result<(Vector, f64)> {
    require_lift(q, p, yh)?;
    require_lift(q, p, zh)?;
    let x = p.coords();
    let ybar = yh.eval(x);
    let zbar = zh.eval(x);
    let br = yh.bracket(zh).eval(x);
    let ax = q.generator().matrix() * x;
    let value = &br + &ax * (2.0 * q.space().omega(&ybar, &zbar) / q.mu0());
    let projected = q.project_horizontal(p, &br).into_vector();
    let residual = (&value - projected).norm() / 1.0f64.max(value.norm());
    Ok((value, residual))
}

/// Residual of the radial-pairing identity omega(nabla_Y Z, x) = -omega(Z, Y)
/// for a tangent y-field and an everywhere-horizontal z-field, normalized by
/// the field magnitudes.
pub fn radial_pairing_residual(
    q: &Quadric,
    y: &PolyField,
    z: &PolyField,
    p: &QuadricPoint,
) -> Result<f64> {
    let x = p.coords();
    let yx = y.eval(x);
    let zx = z.eval(x);
    require_tangent(q, p, &yx)?;
    let hres = q.horizontality_residual(p, &zx);
    if hres > tol::DERIVATIVE {
        return Err(Error::NotTangent {
            residual: hres,
            tolerance: tol::DERIVATIVE,
        });
    }
    let nabla = sigma_connection(q, y, z, p)?;
    let lhs = q.space().omega(nabla.value().vector(), x);
    let rhs = -q.space().omega(&zx, &yx);
    let scale = 1.0f64.max(yx.norm() * zx.norm());
    Ok((lhs - rhs).abs() / scale)
}

/// Deterministic matrices commuting with the generator, expressed in the
/// canonical basis. Horizontal families built from them are invariant lifts;
/// the list avoids matrices that are polynomials in A when those produce
/// fields vanishing on the surface.
pub fn invariant_lift_matrices(gen: &Generator) -> Result<Vec<Matrix>> {
    let d = gen.dim();
    let mut adapted: Vec<Matrix> = Vec::new();
    match gen.case_tag() {
        CaseTag::CaseMinusId => {
            let pairs = d / 2;
            // Per-pair identity and per-pair rotation commute with the
            // blockwise complex structure regardless of the block sign.
            for k in 0..pairs {
                let mut pk = Matrix::zeros(d, d);
                pk[(2 * k, 2 * k)] = 1.0;
                pk[(2 * k + 1, 2 * k + 1)] = 1.0;
                adapted.push(pk);
                let mut rk = Matrix::zeros(d, d);
                rk[(2 * k + 1, 2 * k)] = 1.0;
                rk[(2 * k, 2 * k + 1)] = -1.0;
                adapted.push(rk);
            }
            // One complex-linear swap inside a same-sign group when possible.
            let p = gen.p();
            let group = if p >= 2 {
                Some((0usize, 1usize))
            } else if pairs - p >= 2 {
                Some((p, p + 1))
            } else {
                None
            };
            if let Some((i, j)) = group {
                let mut s = Matrix::zeros(d, d);
                s[(2 * j, 2 * i)] = 1.0;
                s[(2 * j + 1, 2 * i + 1)] = 1.0;
                s[(2 * i, 2 * j)] = 1.0;
                s[(2 * i + 1, 2 * j + 1)] = 1.0;
                adapted.push(s);
            }
        }
        CaseTag::CasePlusId => {
            let half = d / 2;
            // Anything block-diagonal over the two eigenspaces commutes.
            for (block, k) in [(0usize, 0usize), (1, 0), (0, half - 1), (1, half - 1)] {
                let mut b = Matrix::zeros(d, d);
                let o = block * half;
                b[(o + k, o + k)] = 1.0;
                adapted.push(b);
            }
            if half >= 2 {
                let mut b = Matrix::zeros(d, d);
                b[(0, 1)] = 1.0;
                b[(1, 0)] = 1.0;
                adapted.push(b);
                let mut c = Matrix::zeros(d, d);
                c[(half, half + 1)] = 1.0;
                c[(half + 1, half)] = -1.0;
                adapted.push(c);
            }
        }
        CaseTag::CaseNilpotent => {
            let p = gen.p();
            // Adapted coordinate layout: e_0..e_{p-1}, Ae_0..Ae_{p-1}, then
            // the kernel pairs.
            for k in 0..p {
                let mut b = Matrix::zeros(d, d);
                b[(k, k)] = 1.0;
                b[(p + k, p + k)] = 1.0;
                adapted.push(b);
            }
            if p >= 2 {
                let mut s = Matrix::zeros(d, d);
                s[(1, 0)] = 1.0;
                s[(p + 1, p)] = 1.0;
                s[(0, 1)] = 1.0;
                s[(p, p + 1)] = 1.0;
                adapted.push(s);
            }
            if d > 2 * p {
                // Kernel-pair rotation, e_0 -> kernel, kernel -> Ae_0: all
                // commute because A kills both the image and the kernel pairs.
                let w = 2 * p;
                let mut rot = Matrix::zeros(d, d);
                rot[(w + 1, w)] = 1.0;
                rot[(w, w + 1)] = -1.0;
                adapted.push(rot);
                let mut cross = Matrix::zeros(d, d);
                cross[(w, 0)] = 1.0;
                adapted.push(cross);
                let mut back = Matrix::zeros(d, d);
                back[(p, w)] = 1.0;
                adapted.push(back);
            }
        }
        CaseTag::CaseRemark => {
            // The generator is cyclic, so its commutant is its polynomial
            // algebra; A^2 and A^3 are the members whose horizontal families
            // do not vanish on the surface.
            let a = gen.matrix();
            let a2 = a * a;
            let a3 = &a2 * a;
            return Ok(alloc::vec![a2, a3]);
        }
        CaseTag::Explicit => {
            return Err(Error::UnsupportedClassification(alloc::format!(
                "no invariant lift catalog for explicit generators"
            )));
        }
    }
    let basis = gen.basis();
    let inv = basis.clone().try_inverse().ok_or_else(|| {
        Error::InternalConsistency(alloc::format!("adapted basis is not invertible"))
    })?;
    Ok(adapted.into_iter().map(|b| basis * b * &inv).collect())
}
