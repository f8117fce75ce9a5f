//! Step-based cross-checks of the closed-form connection and curvature.
//!
//! Everything here differentiates chart data numerically: Christoffel
//! symbols from central differences of the coordinate lift map, the
//! curvature tensor from central differences of those Christoffels, and the
//! covariant derivative of the Ricci tensor from a fourth-order stencil of
//! the pointwise Ricci. None of it reuses the exact second-derivative
//! formulas of the chart module, so agreement with the closed forms is an
//! independent confirmation rather than an identity.
//!
//! All comparisons happen in the chart coordinate frame at the chart
//! center, where the coordinate lifts coincide with the center's horizontal
//! frame; closed-form tensors over that frame therefore compare entrywise,
//! with no basis matching step.

use crate::chart::{Chart, ChartData};
use crate::connection::reduced_pointwise;
use crate::curvature::{
    closed_form_curvature, five_term_template, idx3, idx4, nabla_ricci_closed, ricci_from_tensor,
};
use crate::error::{Error, Result};
use crate::linalg::{solve_matrix, Matrix, Vector};
use crate::quadric::Quadric;
use crate::tol;
use alloc::format;
use alloc::vec::Vec;

fn check_step(chart: &Chart, reach: f64, h: f64) -> Result<()> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidInput(format!("step {h:.3e} must be positive")));
    }
    if reach >= chart.radius() {
        return Err(Error::InvalidInput(format!(
            "stencil reach {:.3e} exceeds the chart radius {:.3e}",
            reach,
            chart.radius()
        )));
    }
    Ok(())
}

/// Expand ambient horizontal values over the lift frame of a chart point.
fn expand_over_lifts(q: &Quadric, data: &ChartData, values: &[Vec<Vector>]) -> Result<Vec<f64>> {
    let m = data.dim();
    let mut rhs = Matrix::zeros(m, m * m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                rhs[(k, i * m + j)] = q.space().omega(data.lift(k), &values[i][j]);
            }
        }
    }
    let coeffs = solve_matrix(data.gram(), &rhs)?;
    let mut gamma = alloc::vec![0.0; m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                gamma[(i * m + j) * m + k] = coeffs[(k, i * m + j)];
            }
        }
    }
    Ok(gamma)
}

/// Christoffel symbols of the reduced connection at chart coordinates u,
/// with the flat derivative of the lift field taken by central differences
/// of step h along each coordinate direction. The vertical component of the
/// differentiation direction is handled by the exact invariance rule
/// D_{A sigma} E = A E, which involves no step. Layout matches the chart
/// module: (i*m + j)*m + k holds Gamma^k_{ij}.
pub fn christoffels_fd(chart: &Chart, u: &Vector, h: f64) -> Result<Vec<f64>> {
    check_step(chart, u.norm() + h, h)?;
    let q = chart.quadric();
    let m = chart.dim();
    let amat = q.generator().matrix();
    let center = chart.data(u)?;
    let mut values: Vec<Vec<Vector>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut up = u.clone();
        let mut dn = u.clone();
        up[i] += h;
        dn[i] -= h;
        let dup = chart.data(&up)?;
        let ddn = chart.data(&dn)?;
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let slice = (dup.lift(j) - ddn.lift(j)) / (2.0 * h);
            let full = &slice - (amat * center.lift(j)) * center.beta(i);
            row.push(reduced_pointwise(
                q,
                center.point().coords(),
                center.lift(i),
                center.lift(j),
                &full,
            ));
        }
        values.push(row);
    }
    expand_over_lifts(q, &center, &values)
}

/// Curvature tensor of the reduced connection at the chart center, from
/// coordinate derivatives of step-h Christoffels:
/// R(d_i, d_j) d_l = [d_i Gamma^k_jl - d_j Gamma^k_il
///                    + Gamma^k_it Gamma^t_jl - Gamma^k_jt Gamma^t_il] d_k.
/// Layout matches the closed-form tensor: ((i*m + j)*m + l)*m + k.
pub fn curvature_fd(chart: &Chart, h: f64) -> Result<Vec<f64>> {
    check_step(chart, 2.0 * h, h)?;
    let m = chart.dim();
    let zero = Vector::zeros(m);
    let gamma0 = christoffels_fd(chart, &zero, h)?;
    let mut dgamma: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut up = zero.clone();
        let mut dn = zero.clone();
        up[i] += h;
        dn[i] -= h;
        let gp = christoffels_fd(chart, &up, h)?;
        let gm = christoffels_fd(chart, &dn, h)?;
        dgamma.push(
            gp.iter()
                .zip(gm.iter())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        );
    }
    let mut r = alloc::vec![0.0; m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                for k in 0..m {
                    let mut val =
                        dgamma[i][(j * m + l) * m + k] - dgamma[j][(i * m + l) * m + k];
                    for t in 0..m {
                        val += gamma0[(i * m + t) * m + k] * gamma0[(j * m + l) * m + t]
                            - gamma0[(j * m + t) * m + k] * gamma0[(i * m + l) * m + t];
                    }
                    r[idx4(m, i, j, l, k)] = val;
                }
            }
        }
    }
    Ok(r)
}

/// Outcome of comparing the step-based curvature against the closed form in
/// the chart frame at the center, at steps h and h/2.
#[derive(Clone, Debug)]
pub struct OracleReport {
    h: f64,
    closed_max: f64,
    discrepancy: f64,
    discrepancy_half: f64,
}

impl OracleReport {
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Largest closed-form tensor entry, the scale of the comparison.
    pub fn closed_max(&self) -> f64 {
        self.closed_max
    }

    pub fn discrepancy(&self) -> f64 {
        self.discrepancy
    }

    pub fn discrepancy_half(&self) -> f64 {
        self.discrepancy_half
    }

    /// discrepancy(h) / discrepancy(h/2); 4 for clean second-order error.
    pub fn richardson_ratio(&self) -> f64 {
        self.discrepancy / self.discrepancy_half
    }

    /// The ratio is meaningless when there is no curvature signal to
    /// converge to: both discrepancies are then rounding noise, which grows
    /// rather than shrinks as the step decreases.
    pub fn ratio_is_measurable(&self) -> bool {
        self.closed_max > 1e-9 && self.discrepancy_half > 1e-12
    }
}

/// Run the step-based curvature at h and h/2 against the closed form.
pub fn oracle_compare(chart: &Chart, h: f64) -> Result<OracleReport> {
    let closed = closed_form_curvature(chart.quadric(), chart.center(), chart.frame())?;
    let diff_max = |fd: &[f64]| -> f64 {
        fd.iter()
            .zip(closed.tensor().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let r_h = curvature_fd(chart, h)?;
    let discrepancy = diff_max(&r_h);
    let r_half = curvature_fd(chart, h / 2.0)?;
    let discrepancy_half = diff_max(&r_half);
    let closed_max = closed.tensor().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(OracleReport {
        h,
        closed_max,
        discrepancy,
        discrepancy_half,
    })
}

/// Fitted Ricci over the lift frame of a chart point: descend the generator
/// to the frame, build the five-term curvature there, and trace-contract.
/// Exact at each point; only consumers differentiate it.
fn ricci_in_lift_frame(q: &Quadric, data: &ChartData) -> Result<Matrix> {
    let m = data.dim();
    let x = data.point().coords();
    let amat = q.generator().matrix();
    let ax = amat * x;
    let mut rhs = Matrix::zeros(m, m);
    for j in 0..m {
        let ab = amat * data.lift(j);
        let c = q.space().omega(&ab, &ax) / q.mu0();
        let w = &ab - x * c;
        for i in 0..m {
            rhs[(i, j)] = q.space().omega(data.lift(i), &w);
        }
    }
    let descended = solve_matrix(data.gram(), &rhs)?;
    let template = five_term_template(data.gram(), &descended);
    let scale = 1.0 / q.mu0();
    let r: Vec<f64> = template.iter().map(|v| v * scale).collect();
    Ok(ricci_from_tensor(m, &r))
}

/// Covariant derivative of the Ricci tensor at the chart center, by direct
/// differentiation in chart coordinates: a fourth-order five-point stencil
/// for d_k Ric_ij, with the (exactly known) center Christoffels subtracted.
/// Layout matches the closed form: out[(k*m + i)*m + j] = (nabla_k Ric)_ij.
pub fn nabla_ricci_direct(chart: &Chart, h: f64) -> Result<Vec<f64>> {
    check_step(chart, 2.0 * h, h)?;
    let q = chart.quadric();
    let m = chart.dim();
    let zero = Vector::zeros(m);
    let center = chart.data(&zero)?;
    let gamma0 = chart.christoffels(&center)?;
    let ric0 = ricci_in_lift_frame(q, &center)?;
    let mut out = alloc::vec![0.0; m * m * m];
    for k in 0..m {
        let at = |t: f64| -> Result<Matrix> {
            let mut u = zero.clone();
            u[k] = t;
            ricci_in_lift_frame(q, &chart.data(&u)?)
        };
        let f2p = at(2.0 * h)?;
        let f1p = at(h)?;
        let f1n = at(-h)?;
        let f2n = at(-2.0 * h)?;
        let dric = (-&f2p + f1p * 8.0 - f1n * 8.0 + &f2n) / (12.0 * h);
        for i in 0..m {
            for j in 0..m {
                let mut val = dric[(i, j)];
                for l in 0..m {
                    val -= gamma0[(k * m + i) * m + l] * ric0[(l, j)]
                        + gamma0[(k * m + j) * m + l] * ric0[(i, l)];
                }
                out[idx3(m, k, i, j)] = val;
            }
        }
    }
    Ok(out)
}

/// Both routes to the covariant derivative of the Ricci tensor at the chart
/// center, and their largest entrywise gap.
#[derive(Clone, Debug)]
pub struct NablaRicciComparison {
    direct: Vec<f64>,
    closed: Vec<f64>,
    discrepancy: f64,
}

impl NablaRicciComparison {
    pub fn direct(&self) -> &[f64] {
        &self.direct
    }

    pub fn closed(&self) -> &[f64] {
        &self.closed
    }

    pub fn discrepancy(&self) -> f64 {
        self.discrepancy
    }
}

/// Compare the stencil derivative of the fitted Ricci against the two-term
/// closed formula. Disagreement beyond the cross-check tolerance means one
/// of the two derivations is wrong, which is an internal fault rather than
/// a property of the input.
pub fn nabla_ricci_compare(chart: &Chart, h: f64) -> Result<NablaRicciComparison> {
    let q = chart.quadric();
    let curv = closed_form_curvature(q, chart.center(), chart.frame())?;
    let closed = nabla_ricci_closed(q, chart.center(), chart.frame(), curv.kappa());
    let direct = nabla_ricci_direct(chart, h)?;
    let discrepancy = direct
        .iter()
        .zip(closed.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if discrepancy > tol::FD_CROSS {
        return Err(Error::InternalConsistency(format!(
            "Ricci derivative routes disagree by {discrepancy:.3e}"
        )));
    }
    Ok(NablaRicciComparison {
        direct,
        closed,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Generator;
    use crate::quadric::Quadric;
    use crate::tol;

    fn catalog() -> Vec<Quadric> {
        alloc::vec![
            Quadric::new(Generator::make_case_minus_id(1, 2).unwrap(), 1.0).unwrap(),
            Quadric::new(Generator::make_case_minus_id(2, 3).unwrap(), 1.0).unwrap(),
            Quadric::new(Generator::make_case_plus_id(1).unwrap(), -2.0).unwrap(),
            Quadric::new(Generator::make_case_nilpotent(1, 2, 1).unwrap(), 1.0).unwrap(),
            Quadric::new(Generator::make_remark(1.0, 1.0).unwrap(), 1.0).unwrap(),
        ]
    }

    fn chart_for(q: &Quadric, seed: u64) -> Chart<'_> {
        Chart::new(q, q.sample_point(seed, 0).unwrap()).unwrap()
    }

    #[test]
    fn fd_christoffels_match_the_exact_ones_away_from_the_center() {
        for q in catalog() {
            let chart = chart_for(&q, 127);
            let m = chart.dim();
            let u = Vector::from_fn(m, |k, _| 0.03 * if k % 2 == 0 { 1.0 } else { -1.0 });
            let data = chart.data(&u).unwrap();
            let exact = chart.christoffels(&data).unwrap();
            let fd = christoffels_fd(&chart, &u, tol::FD_STEP).unwrap();
            let mut worst = 0.0f64;
            let mut sym = 0.0f64;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        worst = worst.max((fd[(i * m + j) * m + k] - exact[(i * m + j) * m + k]).abs());
                        sym = sym.max((fd[(i * m + j) * m + k] - fd[(j * m + i) * m + k]).abs());
                    }
                }
            }
            assert!(worst < 1e-4, "case {:?}: {worst:.3e}", q.generator().case_tag());
            assert!(
                sym < 1e-9 + 10.0 * tol::FD_STEP * tol::FD_STEP,
                "case {:?}: {sym:.3e}",
                q.generator().case_tag()
            );
        }
    }

    #[test]
    fn fd_curvature_matches_the_closed_form() {
        for q in catalog() {
            let chart = chart_for(&q, 131);
            let report = oracle_compare(&chart, tol::FD_STEP).unwrap();
            assert!(
                report.discrepancy() < tol::ORACLE,
                "case {:?}: {:.3e}",
                q.generator().case_tag(),
                report.discrepancy()
            );
        }
    }

    #[test]
    fn richardson_ratio_indicates_second_order_convergence() {
        for q in catalog() {
            let chart = chart_for(&q, 137);
            let report = oracle_compare(&chart, tol::FD_STEP).unwrap();
            if report.ratio_is_measurable() {
                let ratio = report.richardson_ratio();
                assert!(
                    (2.8..=5.2).contains(&ratio),
                    "case {:?}: ratio {ratio:.3}",
                    q.generator().case_tag()
                );
            } else {
                // no curvature signal: the closed form itself must be flat
                assert!(report.closed_max() < 1e-9);
            }
        }
    }

    #[test]
    fn flat_quotient_measures_zero_curvature_through_the_step_machinery() {
        let q = Quadric::new(Generator::make_case_nilpotent(1, 1, 1).unwrap(), 1.0).unwrap();
        let chart = chart_for(&q, 139);
        let report = oracle_compare(&chart, tol::FD_STEP).unwrap();
        assert!(report.closed_max() < 1e-12);
        assert!(report.discrepancy() < 1e-8);
        assert!(!report.ratio_is_measurable());
    }

    #[test]
    fn direct_ricci_derivative_matches_the_closed_formula() {
        for q in catalog() {
            let chart = chart_for(&q, 149);
            let cmp = nabla_ricci_compare(&chart, tol::FD_STEP).unwrap();
            assert!(
                cmp.discrepancy() < tol::FD_CROSS,
                "case {:?}: {:.3e}",
                q.generator().case_tag(),
                cmp.discrepancy()
            );
            // the derivative vanishes identically when the generator squares
            // to a multiple of the identity, and must not for the generic one
            let worst = cmp.closed().iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if q.generator().lambda().is_some() {
                assert!(worst < 1e-10);
            } else {
                assert!(worst > 1e-3);
            }
        }
    }

    #[test]
    fn stencils_reject_steps_that_leave_the_coordinate_ball() {
        let q = catalog().remove(0);
        let chart = chart_for(&q, 151);
        let err = curvature_fd(&chart, chart.radius()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        let err = nabla_ricci_direct(&chart, chart.radius()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}

