//! Central tolerance ladder.
//!
//! Every check in the crate pulls its threshold from here, so a report can
//! state exactly which tolerance a residual was measured against and callers
//! can override thresholds by name without touching call sites.
//!
//! The ladder is ordered by how much numerical machinery sits between the
//! inputs and the residual:
//!
//! * `algebraic` (1e-12): plain arithmetic identities (pairings, projections,
//!   constructor structure). One or two multiplies per term, no solves.
//! * `derivative` (1e-10): identities involving exact polynomial derivatives
//!   or one linear solve (tangency of connection values, torsion, flow
//!   group/symplecticity which pass through the matrix exponential).
//! * `transport` (1e-9): identities that also move data along orbits or
//!   through chart frames (reduced torsion/parallelism, Ricci-type defect,
//!   proportionality fits).
//! * `fd_cross` (1e-6): cross-checks where one side is a finite-difference
//!   derivative of a smooth scalar.
//! * `oracle` (1e-4): full finite-difference curvature versus the closed
//!   form at the default step `fd_step` = 1e-3 (second-order stencils).

use crate::error::{Error, Result};
use alloc::string::String;

/// Plain arithmetic identities.
pub const ALGEBRAIC: f64 = 1e-12;
/// Exact-derivative identities and single linear solves.
pub const DERIVATIVE: f64 = 1e-10;
/// Orbit-transport and chart-frame identities.
pub const TRANSPORT: f64 = 1e-9;
/// Finite-difference cross-checks of smooth scalars.
pub const FD_CROSS: f64 = 1e-6;
/// Finite-difference curvature oracle versus closed form.
pub const ORACLE: f64 = 1e-4;
/// Level-set membership residual |H(x) - mu0| for stored points.
pub const ON_SURFACE: f64 = 1e-10;
/// Newton convergence target for chart solves.
pub const NEWTON: f64 = 1e-13;
/// Maximum Newton iterations for chart solves.
pub const NEWTON_MAX_ITER: usize = 25;
/// Default finite-difference step for the oracle.
pub const FD_STEP: f64 = 1e-3;
/// Default chart coordinate radius.
pub const CHART_RADIUS: f64 = 1e-1;
/// Verdict threshold on the symmetry one-form: below this the space is
/// declared locally symmetric.
pub const SYMMETRY_VERDICT: f64 = 1e-8;
/// Positive-direction threshold: defects that must be *visible* (non-flat
/// cases) are required to exceed this.
pub const MUST_EXCEED: f64 = 1e-3;
/// Sampling retry cap.
pub const SAMPLE_RETRIES: u32 = 64;

/// Runtime-overridable tolerance set. Unknown names are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub algebraic: f64,
    pub derivative: f64,
    pub transport: f64,
    pub fd_cross: f64,
    pub oracle: f64,
    pub on_surface: f64,
    pub newton: f64,
    pub fd_step: f64,
    pub chart_radius: f64,
    pub symmetry_verdict: f64,
    pub must_exceed: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: ALGEBRAIC,
            derivative: DERIVATIVE,
            transport: TRANSPORT,
            fd_cross: FD_CROSS,
            oracle: ORACLE,
            on_surface: ON_SURFACE,
            newton: NEWTON,
            fd_step: FD_STEP,
            chart_radius: CHART_RADIUS,
            symmetry_verdict: SYMMETRY_VERDICT,
            must_exceed: MUST_EXCEED,
        }
    }
}

impl Tolerances {
    /// Override a tolerance by name. Unknown names are an error so that a
    /// typo in a config file cannot silently leave a default in place.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidInput(String::from(
                "tolerance values must be finite and positive",
            )));
        }
        match name {
            "algebraic" => self.algebraic = value,
            "derivative" => self.derivative = value,
            "transport" => self.transport = value,
            "fd_cross" => self.fd_cross = value,
            "oracle" => self.oracle = value,
            "on_surface" => self.on_surface = value,
            "newton" => self.newton = value,
            "fd_step" => self.fd_step = value,
            "chart_radius" => self.chart_radius = value,
            "symmetry_verdict" => self.symmetry_verdict = value,
            "must_exceed" => self.must_exceed = value,
            other => return Err(Error::UnknownTolerance(String::from(other))),
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "algebraic" => self.algebraic,
            "derivative" => self.derivative,
            "transport" => self.transport,
            "fd_cross" => self.fd_cross,
            "oracle" => self.oracle,
            "on_surface" => self.on_surface,
            "newton" => self.newton,
            "fd_step" => self.fd_step,
            "chart_radius" => self.chart_radius,
            "symmetry_verdict" => self.symmetry_verdict,
            "must_exceed" => self.must_exceed,
            other => return Err(Error::UnknownTolerance(String::from(other))),
        })
    }

    /// Names accepted by [`Tolerances::set`], for error messages and docs.
    pub const NAMES: &'static [&'static str] = &[
        "algebraic",
        "derivative",
        "transport",
        "fd_cross",
        "oracle",
        "on_surface",
        "newton",
        "fd_step",
        "chart_radius",
        "symmetry_verdict",
        "must_exceed",
    ];
}
