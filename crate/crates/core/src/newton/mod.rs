//! Full-step Newton iteration and fixed-step parameter continuation.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{norm_inf, solve_linear, GridFunction, OperatorMatrix};

/// A square nonlinear system with an analytical Jacobian.
///
/// Implementations hold only configuration and operators; every call is a
/// pure function of `u`.
pub trait ProblemDef {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn residual(&self, u: &[f64]) -> Result<GridFunction>;
    fn jacobian(&self, u: &[f64]) -> Result<OperatorMatrix>;

    /// Residual row blocks as `(name, size)`, used to localize Jacobian errors.
    fn row_blocks(&self) -> Vec<(String, usize)> {
        vec![("F".into(), self.dim())]
    }

    /// Unknown column blocks as `(name, size)`.
    fn col_blocks(&self) -> Vec<(String, usize)> {
        vec![("u".into(), self.dim())]
    }
}

/// A one-parameter family of problems.
pub trait Continuable: ProblemDef + Sized {
    fn parameter_name(&self) -> &str;
    fn parameter(&self) -> f64;
    fn with_parameter(&self, value: f64) -> Self;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonConfig {
    /// Stop once `‖F‖_∞ ≤ res_tol`.
    pub res_tol: f64,
    pub max_iters: usize,
    /// Stop once `‖δu‖_∞ ≤ delta_tol`; 0 disables the test.
    pub delta_tol: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            res_tol: 1e-8,
            max_iters: 20,
            delta_tol: 0.0,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.res_tol > 0.0) || self.max_iters == 0 || !(self.delta_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Newton needs res_tol > 0, max_iters ≥ 1 and delta_tol ≥ 0 (got {}, {}, {})",
                self.res_tol, self.max_iters, self.delta_tol
            )));
        }
        Ok(())
    }
}

fn seconds<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// `‖F‖_∞` at the initial iterate and after every step.
    pub residual_history: Vec<f64>,
    /// `‖δu‖_∞` of every step.
    pub step_norm_history: Vec<f64>,
    pub converged: bool,
    #[serde(rename = "wall_time_s", serialize_with = "seconds")]
    pub wall_time: Duration,
}

/// One line of the JSON-lines iteration log.
#[derive(Debug, Serialize)]
struct IterationRecord<'a> {
    problem: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<f64>,
    iteration: usize,
    residual_norm: f64,
    step_norm: Option<f64>,
}

impl NewtonReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history holds the initial residual")
    }

    /// One JSON record per iteration, iteration 0 being the initial iterate.
    pub fn to_json_lines(&self, problem: &str, parameter: Option<f64>) -> String {
        let mut out = String::new();
        for (k, r) in self.residual_history.iter().enumerate() {
            let rec = IterationRecord {
                problem,
                parameter,
                iteration: k,
                residual_norm: *r,
                step_norm: k.checked_sub(1).map(|i| self.step_norm_history[i]),
            };
            out.push_str(&serde_json::to_string(&rec).expect("plain record serializes"));
            out.push('\n');
        }
        out
    }
}

fn checked_residual<P: ProblemDef + ?Sized>(problem: &P, u: &[f64]) -> Result<GridFunction> {
    let r = problem.residual(u)?;
    if let Some(i) = r.first_non_finite() {
        return Err(Error::NonFinite {
            context: "residual",
            index: i,
        });
    }
    Ok(r)
}

/// Full Newton steps `u ← u - J⁻¹F` until the residual or step test passes
/// or the iteration budget runs out. Running out is not an error; check
/// `report.converged`.
pub fn newton_solve<P: ProblemDef + ?Sized>(
    problem: &P,
    u0: &[f64],
    cfg: &NewtonConfig,
) -> Result<(GridFunction, NewtonReport)> {
    cfg.validate()?;
    crate::matrix::check_len("initial iterate", problem.dim(), u0.len())?;
    let start = Instant::now();
    let mut u = GridFunction::from(u0);
    let mut res = checked_residual(problem, &u)?;
    let mut residual_history = vec![res.norm_inf()];
    let mut step_norm_history = Vec::new();
    while residual_history[residual_history.len() - 1] > cfg.res_tol
        && step_norm_history.len() < cfg.max_iters
    {
        let jac = problem.jacobian(&u)?;
        let delta = solve_linear(&jac, &res)?;
        u = u.axpy(-1.0, &delta)?;
        res = checked_residual(problem, &u)?;
        residual_history.push(res.norm_inf());
        let step = norm_inf(&delta);
        step_norm_history.push(step);
        if step <= cfg.delta_tol {
            break;
        }
    }
    let converged = residual_history[residual_history.len() - 1] <= cfg.res_tol;
    Ok((
        u,
        NewtonReport {
            iterations: step_norm_history.len(),
            residual_history,
            step_norm_history,
            converged,
            wall_time: start.elapsed(),
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationSchedule {
    pub param_name: String,
    pub start: f64,
    pub step: f64,
    pub target: f64,
}

impl ContinuationSchedule {
    pub fn new(param_name: impl Into<String>, start: f64, step: f64, target: f64) -> Self {
        Self {
            param_name: param_name.into(),
            start,
            step,
            target,
        }
    }

    /// Stage values `start, start ± step, …`, with the last one clamped to
    /// land exactly on `target`. Works in either direction.
    pub fn stages(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.target.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "continuation needs a positive step and finite end points (got {} → {} by {})",
                self.start, self.target, self.step
            )));
        }
        let dir = if self.target >= self.start { 1.0 } else { -1.0 };
        let span = (self.target - self.start).abs();
        let tol = 1e-12 * self.target.abs().max(1.0);
        let mut out = Vec::new();
        let mut k = 0usize;
        while (k as f64) * self.step < span - tol {
            out.push(self.start + dir * (k as f64) * self.step);
            k += 1;
        }
        out.push(self.target);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub parameter: f64,
    pub report: NewtonReport,
}

/// A continuation run that stopped before reaching its target.
#[derive(Debug, Clone)]
pub struct ContinuationError {
    pub param_name: String,
    /// Parameter of the stage that failed.
    pub failed_at: f64,
    /// Last parameter value at which Newton converged, if any.
    pub last_converged: Option<f64>,
    /// Reports of every attempted stage, including the failed one when it ran.
    pub reports: Vec<StageReport>,
    /// Set when the stage aborted with an error rather than running out of iterations.
    pub cause: Option<Error>,
}

impl fmt::Display for ContinuationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "continuation failed at {} = {}", self.param_name, self.failed_at)?;
        match &self.cause {
            Some(e) => write!(f, ": {e}"),
            None => {
                let last = self.reports.last().map(|s| s.report.final_residual());
                write!(f, ": no convergence (final residual {:e})", last.unwrap_or(f64::NAN))
            }
        }
    }
}

impl std::error::Error for ContinuationError {}

/// Solve along the schedule, warm-starting each stage from the previous one.
pub fn continuation_solve<P: Continuable>(
    family: &P,
    schedule: &ContinuationSchedule,
    u0: &[f64],
    cfg: &NewtonConfig,
) -> std::result::Result<(GridFunction, Vec<StageReport>), ContinuationError> {
    continuation_solve_with(family, schedule, u0, cfg, |_, _, _| {})
}

/// As [`continuation_solve`], calling `on_stage(parameter, solution, report)`
/// after every converged stage.
pub fn continuation_solve_with<P: Continuable>(
    family: &P,
    schedule: &ContinuationSchedule,
    u0: &[f64],
    cfg: &NewtonConfig,
    mut on_stage: impl FnMut(f64, &GridFunction, &NewtonReport),
) -> std::result::Result<(GridFunction, Vec<StageReport>), ContinuationError> {
    let fail = |at: f64, last: Option<f64>, reports: Vec<StageReport>, cause: Option<Error>| ContinuationError {
        param_name: schedule.param_name.clone(),
        failed_at: at,
        last_converged: last,
        reports,
        cause,
    };
    let stages = schedule
        .stages()
        .map_err(|e| fail(schedule.start, None, Vec::new(), Some(e)))?;
    let mut u = GridFunction::from(u0);
    let mut reports = Vec::with_capacity(stages.len());
    let mut last = None;
    for p in stages {
        let problem = family.with_parameter(p);
        match newton_solve(&problem, &u, cfg) {
            Ok((next, report)) => {
                let converged = report.converged;
                reports.push(StageReport {
                    parameter: p,
                    report,
                });
                if !converged {
                    return Err(fail(p, last, reports, None));
                }
                on_stage(p, &next, &reports[reports.len() - 1].report);
                u = next;
                last = Some(p);
            }
            Err(e) => return Err(fail(p, last, reports, Some(e))),
        }
    }
    Ok((u, reports))
}
