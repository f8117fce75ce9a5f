//! The level set H(x) = mu0 of the quadratic Hamiltonian H(x) = omega(x, Ax),
//! with its tangent/horizontal structure and the flow of X_H = -2Ax.

use crate::error::{Error, Result};
use crate::generator::{CaseTag, Generator};
use crate::linalg::{expm, Matrix, Vector};
use crate::space::SymplecticSpace;
use crate::tol;
use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug)]
pub struct Quadric {
    gen: Generator,
    mu0: f64,
}

/// A point with its recorded level residual |H(x) - mu0|.
#[derive(Clone, Debug)]
pub struct QuadricPoint {
    x: Vector,
    residual: f64,
}

impl QuadricPoint {
    pub fn coords(&self) -> &Vector {
        &self.x
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Ambient vector v at a base point with omega(v, Ax) = 0; `residual` is the
/// relative defect of that identity.
#[derive(Clone, Debug)]
pub struct TangentVector {
    v: Vector,
    residual: f64,
}

impl TangentVector {
    pub(crate) fn from_raw(v: Vector, residual: f64) -> TangentVector {
        TangentVector { v, residual }
    }

    pub fn vector(&self) -> &Vector {
        &self.v
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn into_vector(self) -> Vector {
        self.v
    }
}

/// Tangent and additionally omega-orthogonal to the radial direction x.
#[derive(Clone, Debug)]
pub struct HorizontalVector {
    v: Vector,
    residual: f64,
}

impl HorizontalVector {
    pub(crate) fn from_raw(v: Vector, residual: f64) -> HorizontalVector {
        HorizontalVector { v, residual }
    }

    pub fn vector(&self) -> &Vector {
        &self.v
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn into_vector(self) -> Vector {
        self.v
    }
}

/// Acceptance threshold for the direction draw: |H(u)| must carry at least
/// this fraction of |u|^2, which bounds the retracted point by
/// sqrt(10*|mu0|) and keeps downstream bases well conditioned. Cubic test
/// fields and finite-difference stencils both lose a digit per power of
/// |x|, so the bound is what keeps absolute defect tolerances meaningful.
const DIRECTION_FLOOR: f64 = 1e-1;

impl Quadric {
    pub fn new(gen: Generator, mu0: f64) -> Result<Quadric> {
        if mu0 == 0.0 || !mu0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "quadric level must be finite and nonzero, got {mu0}"
            )));
        }
        Ok(Quadric { gen, mu0 })
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    pub fn space(&self) -> &SymplecticSpace {
        self.gen.space()
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn dim(&self) -> usize {
        self.gen.dim()
    }

    /// H(x) = omega(x, Ax).
    pub fn hamiltonian(&self, x: &Vector) -> f64 {
        self.space().omega(x, &(self.gen.matrix() * x))
    }

    /// Scale reference for on-surface residual checks.
    fn surface_scale(&self, x: &Vector) -> f64 {
        let sup = x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        self.mu0.abs().max(1.0).max(sup * sup)
    }

    /// Wrap coordinates as a point, verifying the level residual.
    pub fn point(&self, x: Vector) -> Result<QuadricPoint> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let residual = (self.hamiltonian(&x) - self.mu0).abs();
        if residual > tol::ON_SURFACE * self.surface_scale(&x) {
            return Err(Error::InvalidInput(format!(
                "point is off the level set: |H(x) - mu0| = {residual:e}"
            )));
        }
        Ok(QuadricPoint { x, residual })
    }

    /// X_H(x) = -2Ax; tangent because omega(Ax, Ax) = 0.
    pub fn hamiltonian_field(&self, p: &QuadricPoint) -> TangentVector {
        let v = -(self.gen.matrix() * &p.x) * 2.0;
        let residual = self.tangency_residual(p, &v);
        TangentVector { v, residual }
    }

    /// exp(-2At), the time-t flow map of X_H.
    pub fn flow_matrix(&self, t: f64) -> Result<Matrix> {
        expm(&(self.gen.matrix() * (-2.0 * t)))
    }

    /// Flow the point for time t. H is conserved exactly; the residual of
    /// the result records the floating-point drift.
    pub fn flow(&self, p: &QuadricPoint, t: f64) -> Result<QuadricPoint> {
        let x = self.flow_matrix(t)? * &p.x;
        let residual = (self.hamiltonian(&x) - self.mu0).abs();
        if residual > tol::ON_SURFACE * self.surface_scale(&x) {
            return Err(Error::NumericalFailure(format!(
                "flow drifted off the level set: residual {residual:e} at t = {t}"
            )));
        }
        Ok(QuadricPoint { x, residual })
    }

    /// Remove the radial component: v - (omega(v,Ax)/mu0) x satisfies
    /// omega(., Ax) = 0 on the level set.
    pub fn project_tangent(&self, p: &QuadricPoint, v: &Vector) -> TangentVector {
        let ax = self.gen.matrix() * &p.x;
        let alpha = self.space().omega(v, &ax) / self.mu0;
        let out = v - &p.x * alpha;
        let residual = self.tangency_residual(p, &out);
        TangentVector { v: out, residual }
    }

    /// Kill both span(x, Ax) components: v - alpha x - beta Ax with
    /// alpha = omega(v,Ax)/mu0 and beta = -omega(v,x)/mu0.
    pub fn project_horizontal(&self, p: &QuadricPoint, v: &Vector) -> HorizontalVector {
        let ax = self.gen.matrix() * &p.x;
        let alpha = self.space().omega(v, &ax) / self.mu0;
        let beta = -self.space().omega(v, &p.x) / self.mu0;
        let out = v - &p.x * alpha - ax * beta;
        let residual = self.horizontality_residual(p, &out);
        HorizontalVector { v: out, residual }
    }

    /// Relative size of omega(v, Ax).
    pub fn tangency_residual(&self, p: &QuadricPoint, v: &Vector) -> f64 {
        let ax = self.gen.matrix() * &p.x;
        let scale = v.norm() * ax.norm();
        if scale == 0.0 {
            0.0
        } else {
            self.space().omega(v, &ax).abs() / scale
        }
    }

    /// Relative size of the larger of omega(v, Ax) and omega(v, x).
    pub fn horizontality_residual(&self, p: &QuadricPoint, v: &Vector) -> f64 {
        let radial_scale = v.norm() * p.x.norm();
        let radial = if radial_scale == 0.0 {
            0.0
        } else {
            self.space().omega(v, &p.x).abs() / radial_scale
        };
        self.tangency_residual(p, v).max(radial)
    }

    /// One step of the radial retraction x -> x sqrt(mu0/H(x)); valid on
    /// the cone sign H = sign mu0.
    pub fn retract(&self, x: &Vector) -> Result<Vector> {
        let h = self.hamiltonian(x);
        let ratio = self.mu0 / h;
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::NumericalFailure(format!(
                "radial retraction undefined: H(x) = {h:e} against level {}",
                self.mu0
            )));
        }
        Ok(x * libm::sqrt(ratio))
    }

    /// Draw a seeded point on the level set. The direction is standard
    /// normal; draws whose H-value is too small relative to |u|^2 are
    /// rejected for conditioning. Deterministic in (seed, stream).
    pub fn sample_point(&self, seed: u64, stream: u64) -> Result<QuadricPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let d = self.dim();
        for _ in 0..tol::SAMPLE_RETRIES {
            let u = Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let h = self.hamiltonian(&u);
            if h == 0.0 || h.signum() != self.mu0.signum() {
                continue;
            }
            if h.abs() < DIRECTION_FLOOR * u.norm_squared() {
                continue;
            }
            let mut x = &u * libm::sqrt(self.mu0 / h);
            // Two more retraction sweeps push the level residual to the
            // rounding floor.
            for _ in 0..2 {
                x = self.retract(&x)?;
            }
            let residual = (self.hamiltonian(&x) - self.mu0).abs();
            return Ok(QuadricPoint { x, residual });
        }
        Err(Error::SamplingFailed {
            retries: tol::SAMPLE_RETRIES,
        })
    }

    /// Independent seeded points; point k uses RNG stream k.
    pub fn sample_points(&self, seed: u64, count: usize) -> Result<Vec<QuadricPoint>> {
        (0..count)
            .map(|k| self.sample_point(seed, k as u64))
            .collect()
    }

    /// The unique point on the flow orbit of p satisfying the family's
    /// normalization. Exact (no exponential) for the +Id and nilpotent
    /// families; the complex-eigenvalue family flows by the computed time.
    pub fn orbit_representative(&self, p: &QuadricPoint) -> Result<QuadricPoint> {
        match self.gen.case_tag() {
            CaseTag::CasePlusId => {
                let d = self.dim();
                let mut s = 0.0;
                for i in 0..d / 2 {
                    s += p.x[2 * i] * p.x[2 * i];
                }
                if s <= 0.0 {
                    return Err(Error::NumericalFailure(
                        "degenerate orbit: the +1-eigenspace coordinates vanish".into(),
                    ));
                }
                // Flow scales the +1-eigenspace part by e^{-2t}; pick the
                // scale that lands on the unit sphere of that part.
                let scale = 1.0 / libm::sqrt(s);
                let mut x = p.x.clone();
                for i in 0..d / 2 {
                    x[2 * i] *= scale;
                    x[2 * i + 1] /= scale;
                }
                let residual = (self.hamiltonian(&x) - self.mu0).abs();
                Ok(QuadricPoint { x, residual })
            }
            CaseTag::CaseNilpotent => {
                // With A nilpotent the flow is affine: x(t) = x - 2t Ax, and
                // the signed pairing sum S(t) = S(0) - 2 t mu0 is linear in
                // t; t* zeroes it.
                let (p_rank, q) = (self.gen.p(), self.gen.q());
                let mut s = 0.0;
                for k in 0..p_rank {
                    let (xi, eta, eps) = if k < q {
                        (p.x[2 * k], p.x[2 * k + 1], 1.0)
                    } else {
                        (p.x[2 * k + 1], p.x[2 * k], -1.0)
                    };
                    s += eps * xi * eta;
                }
                let t_star = s / (2.0 * self.mu0);
                let x = &p.x - (self.gen.matrix() * &p.x) * (2.0 * t_star);
                let residual = (self.hamiltonian(&x) - self.mu0).abs();
                Ok(QuadricPoint { x, residual })
            }
            CaseTag::CaseRemark => {
                // In adapted coordinates the first eigenplane evolves as
                // w(t) = w(0) e^{-2(a-ib)t}; |w| = 1 picks the section.
                let w_re = p.x[0];
                let w_im = p.x[2];
                let norm = libm::hypot(w_re, w_im);
                if norm <= 1e-12 {
                    return Err(Error::NumericalFailure(
                        "degenerate orbit: the contracting eigenplane coordinates vanish".into(),
                    ));
                }
                // The eigenvalue's real part is the (0,0) entry of the
                // adapted action.
                let a_param = {
                    let basis = self.gen.basis();
                    let col0 = Vector::from_column_slice(basis.column(0).as_slice());
                    let acted = self.gen.matrix() * col0;
                    // Coefficient of e1 in A e1: read off via the pairing
                    // omega(., e3)/omega(e1, e3).
                    let e3 = Vector::from_column_slice(basis.column(2).as_slice());
                    self.space().omega(&acted, &e3) / 0.5
                };
                let t_star = libm::log(norm) / (2.0 * a_param);
                self.flow(p, t_star)
            }
            CaseTag::CaseMinusId | CaseTag::Explicit => Err(Error::UnsupportedOrbitSection),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_vec;

    fn sphere_quadric(n: usize) -> Quadric {
        Quadric::new(Generator::make_case_minus_id(n, n + 1).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn hamiltonian_is_the_squared_norm_for_the_complex_structure() {
        let q = sphere_quadric(1);
        let x = Vector::from_column_slice(&[0.3, -1.1, 0.7, 0.2]);
        assert!((q.hamiltonian(&x) - x.norm_squared()).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_homogeneous_of_degree_two() {
        let q = Quadric::new(Generator::make_remark(1.0, 1.0).unwrap(), 1.0).unwrap();
        let x = Vector::from_column_slice(&[0.4, -0.9, 1.3, 0.8]);
        assert_eq!(q.hamiltonian(&(&x * 2.0)), 4.0 * q.hamiltonian(&x));
    }

    #[test]
    fn lagrangian_pair_hamiltonian_in_adapted_coordinates() {
        // In the +Id family's adapted coordinates H = -2 sum x^i y^i.
        let gen = Generator::make_case_plus_id(2).unwrap();
        let q = Quadric::new(gen, -2.0).unwrap();
        let coords = Vector::from_column_slice(&[0.5, -0.3, 1.2, 0.8, -0.6, 0.9]);
        let x = q.generator().basis() * &coords;
        let dot: f64 = (0..3).map(|i| coords[i] * coords[3 + i]).sum();
        assert!((q.hamiltonian(&x) + 2.0 * dot).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_field_satisfies_the_defining_identity() {
        // omega(X_H, v) = dH(v) = omega(v, Ax) + omega(x, Av) for all v.
        let q = Quadric::new(Generator::make_remark(0.8, -1.2).unwrap(), 1.0).unwrap();
        let p = q.sample_point(3, 0).unwrap();
        let a = q.generator().matrix();
        let xh = q.hamiltonian_field(&p);
        for c in 0..4 {
            let v = Vector::from_fn(4, |i, _| if i == c { 1.0 } else { 0.0 });
            let dh = q.space().omega(&v, &(a * p.coords())) + q.space().omega(p.coords(), &(a * &v));
            let lhs = q.space().omega(xh.vector(), &v);
            assert!((lhs - dh).abs() < 1e-12, "component {c}");
        }
        assert!(xh.residual() < 1e-14);
    }

    #[test]
    fn flow_at_time_zero_is_the_identity() {
        let q = sphere_quadric(2);
        let p = q.sample_point(7, 0).unwrap();
        let moved = q.flow(&p, 0.0).unwrap();
        assert_eq!(max_abs_vec(&(moved.coords() - p.coords())), 0.0);
    }

    #[test]
    fn flow_preserves_the_level() {
        let q = Quadric::new(Generator::make_case_plus_id(1).unwrap(), -2.0).unwrap();
        let p = q.sample_point(11, 0).unwrap();
        for &t in &[-2.0, -0.7, 0.3, 1.9] {
            let moved = q.flow(&p, t).unwrap();
            assert!(moved.residual() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn lagrangian_pair_flow_matches_the_exponential_coordinates() {
        // Adapted coordinates evolve as x^i e^{-2t}, y^i e^{2t}.
        let q = Quadric::new(Generator::make_case_plus_id(1).unwrap(), -2.0).unwrap();
        let p = q.sample_point(5, 0).unwrap();
        let t = 0.37;
        let moved = q.flow(&p, t).unwrap();
        for i in 0..2 {
            let ex = p.coords()[2 * i] * libm::exp(-2.0 * t);
            let ey = p.coords()[2 * i + 1] * libm::exp(2.0 * t);
            assert!((moved.coords()[2 * i] - ex).abs() < 1e-12);
            assert!((moved.coords()[2 * i + 1] - ey).abs() < 1e-12);
        }
    }

    #[test]
    fn flow_map_is_symplectic() {
        let q = Quadric::new(Generator::make_remark(1.0, 1.0).unwrap(), 1.0).unwrap();
        let m = q.flow_matrix(0.9).unwrap();
        assert!(q.space().symplectic_matrix_residual(&m).unwrap() < 1e-12);
    }

    #[test]
    fn tangent_projection_fixes_tangents_and_kills_the_radius() {
        let q = sphere_quadric(1);
        let p = q.sample_point(13, 0).unwrap();
        let xh = q.hamiltonian_field(&p).into_vector();
        let fixed = q.project_tangent(&p, &xh);
        assert!(max_abs_vec(&(fixed.vector() - &xh)) < 1e-13);
        let radial = q.project_tangent(&p, p.coords());
        assert!(max_abs_vec(radial.vector()) < 1e-13);
        let v = Vector::from_column_slice(&[1.0, -2.0, 0.5, 3.0]);
        assert!(q.project_tangent(&p, &v).residual() < 1e-13);
    }

    #[test]
    fn horizontal_projection_kills_both_spanning_directions_and_is_idempotent() {
        let q = Quadric::new(Generator::make_case_nilpotent(2, 2, 1).unwrap(), 1.0).unwrap();
        let p = q.sample_point(17, 0).unwrap();
        assert!(max_abs_vec(q.project_horizontal(&p, p.coords()).vector()) < 1e-12);
        let ax = q.generator().matrix() * p.coords();
        assert!(max_abs_vec(q.project_horizontal(&p, &ax).vector()) < 1e-12);
        let v = Vector::from_fn(6, |i, _| ((i * i) as f64).sin() + 0.3);
        let once = q.project_horizontal(&p, &v);
        let twice = q.project_horizontal(&p, once.vector());
        assert!(once.residual() < 1e-12);
        assert!(max_abs_vec(&(twice.vector() - once.vector())) < 1e-12);
    }

    #[test]
    fn sampling_lands_on_the_level_set_and_is_deterministic() {
        let q = sphere_quadric(2);
        let p1 = q.sample_point(42, 3).unwrap();
        let p2 = q.sample_point(42, 3).unwrap();
        assert_eq!(p1.coords(), p2.coords());
        assert!(p1.residual() < 1e-12);
        let other = q.sample_point(42, 4).unwrap();
        assert!(max_abs_vec(&(other.coords() - p1.coords())) > 1e-3);
    }

    #[test]
    fn sampling_the_empty_level_fails() {
        let q = Quadric::new(Generator::make_case_minus_id(1, 2).unwrap(), -1.0).unwrap();
        assert!(matches!(
            q.sample_point(1, 0),
            Err(Error::SamplingFailed { .. })
        ));
    }

    #[test]
    fn sampled_points_are_norm_bounded() {
        // The conditioning floor caps |x| at 10 sqrt|mu0|.
        let q = Quadric::new(Generator::make_case_plus_id(2).unwrap(), -2.0).unwrap();
        for k in 0..50 {
            let p = q.sample_point(9, k).unwrap();
            assert!(p.coords().norm() <= 10.0 * libm::sqrt(2.0) + 1e-9);
        }
    }

    #[test]
    fn lagrangian_pair_representative_lies_on_the_unit_sphere_section() {
        let q = Quadric::new(Generator::make_case_plus_id(2).unwrap(), -2.0).unwrap();
        let p = q.sample_point(23, 0).unwrap();
        let rep = q.orbit_representative(&p).unwrap();
        let s: f64 = (0..3).map(|i| rep.coords()[2 * i] * rep.coords()[2 * i]).sum();
        assert!((s - 1.0).abs() < 1e-12);
        // The section decomposition: y = x + z with x.z = 0 and H fixed.
        let xz: f64 = (0..3)
            .map(|i| rep.coords()[2 * i] * (rep.coords()[2 * i + 1] - rep.coords()[2 * i]))
            .sum();
        assert!(xz.abs() < 1e-12);
        // Orbit invariance of the representative.
        let moved = q.flow(&p, 0.8).unwrap();
        let rep2 = q.orbit_representative(&moved).unwrap();
        assert!(max_abs_vec(&(rep2.coords() - rep.coords())) < 1e-10);
    }

    #[test]
    fn nilpotent_representative_zeroes_the_signed_pairing_sum() {
        let q = Quadric::new(Generator::make_case_nilpotent(2, 2, 1).unwrap(), 1.0).unwrap();
        let p = q.sample_point(29, 1).unwrap();
        let rep = q.orbit_representative(&p).unwrap();
        let s = rep.coords()[0] * rep.coords()[1] - rep.coords()[3] * rep.coords()[2];
        assert!(s.abs() < 1e-12);
        let moved = q.flow(&p, -1.3).unwrap();
        let rep2 = q.orbit_representative(&moved).unwrap();
        assert!(max_abs_vec(&(rep2.coords() - rep.coords())) < 1e-10);
    }

    #[test]
    fn complex_eigenvalue_representative_normalizes_the_eigenplane() {
        let q = Quadric::new(Generator::make_remark(0.9, 1.1).unwrap(), 1.0).unwrap();
        let p = q.sample_point(31, 2).unwrap();
        let rep = q.orbit_representative(&p).unwrap();
        let norm = libm::hypot(rep.coords()[0], rep.coords()[2]);
        assert!((norm - 1.0).abs() < 1e-10);
        let moved = q.flow(&p, 0.45).unwrap();
        let rep2 = q.orbit_representative(&moved).unwrap();
        assert!(max_abs_vec(&(rep2.coords() - rep.coords())) < 1e-9);
    }

    #[test]
    fn rotation_family_has_no_global_section() {
        let q = sphere_quadric(1);
        let p = q.sample_point(37, 0).unwrap();
        assert!(matches!(
            q.orbit_representative(&p),
            Err(Error::UnsupportedOrbitSection)
        ));
    }

    #[test]
    fn zero_level_is_rejected() {
        assert!(Quadric::new(Generator::make_case_plus_id(1).unwrap(), 0.0).is_err());
    }

    #[test]
    fn off_surface_points_are_rejected() {
        let q = sphere_quadric(1);
        assert!(q.point(Vector::from_column_slice(&[2.0, 0.0, 0.0, 0.0])).is_err());
        assert!(q
            .point(Vector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]))
            .is_ok());
    }
}
