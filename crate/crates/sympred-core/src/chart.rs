//! Local coordinates on the orbit quotient: a slice of the flow action
//! through a center point, parametrized over the horizontal space there.
//!
//! A coordinate value u determines the surface point
//!   sigma(u) = x0 + sum_k u^k h_k + a(u) x0 + b(u) A x0
//! through the two constraints H(sigma) = mu0 and omega(sigma, x0) = 0,
//! solved by Newton iteration in (a, b). The slice constraint is chosen for
//! its flow-transversality: its derivative along the Hamiltonian field at
//! the center is exactly 2 mu0.
//!
//! Because the constraints are quadratic, all first and second derivatives
//! of sigma, of the coordinate lifts, and of the reduced connection in the
//! chart follow in closed form from the solved point — no finite
//! differences. The step-based oracle built on top of this chart lives in a
//! separate module and only shares the Newton solve and first derivatives.

use crate::connection::reduced_pointwise;
use crate::error::{Error, Result};
use crate::frame::{horizontal_frame, HorizontalFrame};
use crate::linalg::{solve_matrix, Matrix, Vector};
use crate::quadric::{Quadric, QuadricPoint};
use crate::tol;
use alloc::format;
use alloc::vec::Vec;

pub struct Chart<'a> {
    quadric: &'a Quadric,
    center: QuadricPoint,
    frame: HorizontalFrame,
    radius: f64,
    newton_tol: f64,
    newton_max_iter: usize,
}

/// The solved chart point with every derivative the connection needs,
/// all exact given the Newton solution.
pub struct ChartData {
    m: usize,
    point: QuadricPoint,
    dsigma: Vec<Vector>,
    betas: Vec<f64>,
    lifts: Vec<Vector>,
    /// d/du_i of the lift map u -> E_j(sigma(u)) (slice derivative).
    slice_dlifts: Vec<Vec<Vector>>,
    /// Flat ambient derivative of the invariant lift field E_j along E_i:
    /// the slice derivative corrected by the vertical rule D_{A sigma} E = A E.
    full_dlifts: Vec<Vec<Vector>>,
    gram: Matrix,
}

impl ChartData {
    pub fn point(&self) -> &QuadricPoint {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn dsigma(&self, j: usize) -> &Vector {
        &self.dsigma[j]
    }

    pub fn beta(&self, j: usize) -> f64 {
        self.betas[j]
    }

    pub fn lift(&self, j: usize) -> &Vector {
        &self.lifts[j]
    }

    pub fn lifts(&self) -> &[Vector] {
        &self.lifts
    }

    pub fn slice_dlift(&self, i: usize, j: usize) -> &Vector {
        &self.slice_dlifts[i][j]
    }

    pub fn full_dlift(&self, i: usize, j: usize) -> &Vector {
        &self.full_dlifts[i][j]
    }

    /// Pairing Gram of the lift frame at this point.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }
}

impl<'a> Chart<'a> {
    pub fn new(quadric: &'a Quadric, center: QuadricPoint) -> Result<Chart<'a>> {
        let frame = horizontal_frame(quadric, &center)?;
        Ok(Chart {
            quadric,
            center,
            frame,
            radius: tol::CHART_RADIUS,
            newton_tol: tol::NEWTON,
            newton_max_iter: tol::NEWTON_MAX_ITER,
        })
    }

    pub fn with_radius(mut self, radius: f64) -> Chart<'a> {
        self.radius = radius;
        self
    }

    pub fn quadric(&self) -> &Quadric {
        self.quadric
    }

    pub fn center(&self) -> &QuadricPoint {
        &self.center
    }

    /// The coordinate directions h_k at the center.
    pub fn frame(&self) -> &HorizontalFrame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Newton-solve the two slice constraints for the correction (a, b).
    fn solve(&self, u: &Vector) -> Result<(Vector, f64, f64)> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if u.norm() >= self.radius {
            return Err(Error::InvalidInput(format!(
                "coordinate norm {:.3e} outside the chart radius {:.3e}",
                u.norm(),
                self.radius
            )));
        }
        let q = self.quadric;
        let x0 = self.center.coords();
        let ax0 = q.generator().matrix() * x0;
        let mut base = x0.clone();
        for (k, h) in self.frame.vectors().iter().enumerate() {
            base += h * u[k];
        }
        let mu0 = q.mu0();
        let scale = 1.0f64.max(mu0.abs());
        let mut a = 0.0f64;
        let mut b = 0.0f64;
        for _ in 0..self.newton_max_iter {
            let x = &base + x0 * a + &ax0 * b;
            let f1 = q.hamiltonian(&x) - mu0;
            let f2 = q.space().omega(&x, x0);
            if f1.abs() <= self.newton_tol * scale && f2.abs() <= self.newton_tol * scale {
                return Ok((x, a, b));
            }
            let ax = q.generator().matrix() * &x;
            let j00 = 2.0 * q.space().omega(x0, &ax);
            let j01 = 2.0 * q.space().omega(&ax0, &ax);
            let j11 = -mu0; // d f2 / d b; d f2 / d a is exactly zero
            let det = j00 * j11;
            if det.abs() < 1e-12 * scale * scale {
                return Err(Error::ChartBreakdown(format!(
                    "constraint Jacobian singular at |u| = {:.3e}",
                    u.norm()
                )));
            }
            let db = f2 / j11;
            let da = (f1 - j01 * db) / j00;
            a -= da;
            b -= db;
        }
        Err(Error::ChartBreakdown(format!(
            "no Newton convergence within {} iterations at |u| = {:.3e}",
            self.newton_max_iter,
            u.norm()
        )))
    }

    /// The surface point with chart coordinates u.
    pub fn to_surface(&self, u: &Vector) -> Result<QuadricPoint> {
        let (x, _, _) = self.solve(u)?;
        self.quadric.point(x)
    }

    /// Solve the chart point and assemble all exact derivative data there.
    pub fn data(&self, u: &Vector) -> Result<ChartData> {
        let (x, _, _) = self.solve(u)?;
        let q = self.quadric;
        let m = self.dim();
        let mu0 = q.mu0();
        let x0 = self.center.coords();
        let amat = q.generator().matrix();
        let ax0 = amat * x0;
        let asigma = amat * &x;
        let denom = q.space().omega(x0, &asigma);
        if denom.abs() < 1e-6 * 1.0f64.max(mu0.abs()) {
            return Err(Error::ChartBreakdown(format!(
                "slice transversality lost: omega(x0, A sigma) = {denom:.3e}"
            )));
        }

        // First derivatives: d_j sigma = h_j + a_j x0 + b_j A x0, from
        // differentiating the two constraints. b_j is a rounding-size
        // constant because the h_j are horizontal at the center.
        let mut dsigma = Vec::with_capacity(m);
        for j in 0..m {
            let h = self.frame.vector(j);
            let b_j = q.space().omega(h, x0) / mu0;
            let a_j = -(q.space().omega(h, &asigma) + b_j * q.space().omega(&ax0, &asigma)) / denom;
            dsigma.push(h + x0 * a_j + &ax0 * b_j);
        }

        // Lifts: horizontal projection of the chart pushforward. The
        // pushforward is already tangent, so only the radial pairing is
        // removed: E_j = d_j sigma - beta_j A sigma.
        let betas: Vec<f64> = dsigma
            .iter()
            .map(|v| -q.space().omega(v, &x) / mu0)
            .collect();
        let lifts: Vec<Vector> = dsigma
            .iter()
            .zip(betas.iter())
            .map(|(v, &beta)| v - &asigma * beta)
            .collect();

        // Second derivatives: d_i d_j sigma = (d_i a_j) x0.
        let mut slice_dlifts: Vec<Vec<Vector>> = Vec::with_capacity(m);
        let mut full_dlifts: Vec<Vec<Vector>> = Vec::with_capacity(m);
        for i in 0..m {
            let adsigma_i = amat * &dsigma[i];
            let mut row_slice = Vec::with_capacity(m);
            let mut row_full = Vec::with_capacity(m);
            for j in 0..m {
                let da_ij = -q.space().omega(&dsigma[j], &adsigma_i) / denom;
                let d2sigma = x0 * da_ij;
                let dbeta_ij = -(q.space().omega(&d2sigma, &x)
                    + q.space().omega(&dsigma[j], &dsigma[i]))
                    / mu0;
                let slice = &d2sigma - &asigma * dbeta_ij - &adsigma_i * betas[j];
                let full = &slice - (amat * &lifts[j]) * betas[i];
                row_slice.push(slice);
                row_full.push(full);
            }
            slice_dlifts.push(row_slice);
            full_dlifts.push(row_full);
        }

        let gram = Matrix::from_fn(m, m, |i, j| q.space().omega(&lifts[i], &lifts[j]));
        let point = q.point(x)?;
        Ok(ChartData {
            m,
            point,
            dsigma,
            betas,
            lifts,
            slice_dlifts,
            full_dlifts,
            gram,
        })
    }

    /// Lifted values of the reduced covariant derivatives of the coordinate
    /// fields, nabla_{d_i} d_j at the chart point, exactly.
    pub fn connection_values(&self, data: &ChartData) -> Vec<Vec<Vector>> {
        let q = self.quadric;
        let x = data.point.coords();
        (0..data.m)
            .map(|i| {
                (0..data.m)
                    .map(|j| {
                        reduced_pointwise(q, x, &data.lifts[i], &data.lifts[j], &data.full_dlifts[i][j])
                    })
                    .collect()
            })
            .collect()
    }

    /// Christoffel symbols at the chart point: coefficients of the reduced
    /// covariant derivatives over the lift frame. Layout: (i*m + j)*m + k
    /// holds the k-th coefficient of nabla_{d_i} d_j.
    pub fn christoffels(&self, data: &ChartData) -> Result<Vec<f64>> {
        let q = self.quadric;
        let m = data.m;
        let values = self.connection_values(data);
        let mut rhs = Matrix::zeros(m, m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    rhs[(k, i * m + j)] = q.space().omega(&data.lifts[k], &values[i][j]);
                }
            }
        }
        let coeffs = solve_matrix(&data.gram, &rhs)?;
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

    /// Exact coordinate derivatives of the reduced-form Gram:
    /// dgram[i][(j,k)] = d_i omega(E_j, E_k).
    pub fn gram_derivatives(&self, data: &ChartData) -> Vec<Matrix> {
        let q = self.quadric;
        let m = data.m;
        (0..m)
            .map(|i| {
                Matrix::from_fn(m, m, |j, k| {
                    q.space().omega(&data.slice_dlifts[i][j], &data.lifts[k])
                        + q.space().omega(&data.lifts[j], &data.slice_dlifts[i][k])
                })
            })
            .collect()
    }
}
