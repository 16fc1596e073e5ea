//! Forward-marching solver for the equality dynamics
//!
//! ```text
//! H(t) = A t^a (log t)^(-b) (log(t/R))^c
//!        + B (log t)^x int_R^t ds int_R^s r^y (log(r/R))^z H(r)^p dr,
//! ```
//!
//! the equality instance of the inequality system: both added terms are
//! nonnegative, so a solution of the equality satisfies the inequalities
//! and inherits the lifespan bound.  The solver marches node by node with
//! a predictor that excludes the node's own cell contribution and one or
//! more corrector sweeps re-evaluating it, and reports finite-time
//! blow-up as the first cap crossing.  Cap crossing under-approximates the
//! true blow-up time, which keeps comparisons against the bound sound.

use crate::bound::bound;
use crate::error::{Error, Result};
use crate::frames::IndexMode;
use crate::params::ProblemParams;
use crate::quad::{first_cell, first_cell_outer, inner_weight, LocalModel, LogGrid};

/// Default step in sigma = log(t/R).
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default cap: 1e12 * max(1, sup of forcing over the grid).
pub const DEFAULT_CAP_FACTOR: f64 = 1e12;
/// Default horizon: 1.2 * log T_bound, so surviving a run is evidence
/// rather than an artifact of a short grid.
pub const DEFAULT_HORIZON_FACTOR: f64 = 1.2;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    BlewUp {
        /// Cap-crossing time (a lower bound for the true blow-up time).
        t_num: f64,
        node: usize,
        /// The forcing alone crossed the cap at this node; frame checks
        /// against such a run are not meaningful.
        forcing_dominated: bool,
    },
    Survived {
        horizon_time: f64,
    },
}

/// Specification of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveSpec {
    pub grid: LogGrid,
    /// Absolute blow-up threshold on H.
    pub cap: f64,
    /// Corrector sweeps per node (>= 1; a second sweep is a diagnostic).
    pub corrector_sweeps: u32,
    /// Recorded for downstream consumers (the dynamics themselves are
    /// mode-independent).
    pub mode: IndexMode,
}

impl SolveSpec {
    pub fn new(grid: LogGrid, cap: f64, corrector_sweeps: u32, mode: IndexMode) -> Result<Self> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(Error::SpecError(format!(
                "cap must be positive and finite, got {cap}"
            )));
        }
        if corrector_sweeps == 0 {
            return Err(Error::SpecError(
                "at least one corrector sweep is required".into(),
            ));
        }
        Ok(Self {
            grid,
            cap,
            corrector_sweeps,
            mode,
        })
    }

    /// Default spec: horizon 1.2 * log T_bound, cap 1e12 * max(1, sup F).
    pub fn for_params(params: &ProblemParams, mode: IndexMode, step: f64) -> Result<Self> {
        let ceiling = bound(params, mode)?;
        let sigma_max = DEFAULT_HORIZON_FACTOR * ceiling.log_t_bound - params.base_time.ln();
        let grid = LogGrid::from_horizon(params.base_time, step, sigma_max)?;
        let cap = default_cap(params, &grid)?;
        Self::new(grid, cap, 1, mode)
    }
}

/// Solver output: node values up to (and including) the terminal node.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub params: ProblemParams,
    pub mode: IndexMode,
    pub grid: LogGrid,
    pub cap: f64,
    pub status: SolveStatus,
    /// H at each computed node.
    pub values: Vec<f64>,
    /// Forcing F at each computed node.
    pub forcing: Vec<f64>,
    /// Inner accumulator I at each computed node.
    pub inner: Vec<f64>,
    /// Outer accumulator J at each computed node.
    pub outer: Vec<f64>,
    /// Largest one-step ratio H_k / H_{k-1} observed.
    pub max_growth_ratio: f64,
}

impl Solution {
    pub fn blew_up(&self) -> bool {
        matches!(self.status, SolveStatus::BlewUp { .. })
    }

    pub fn t_num(&self) -> Option<f64> {
        match self.status {
            SolveStatus::BlewUp { t_num, .. } => Some(t_num),
            SolveStatus::Survived { .. } => None,
        }
    }

    pub fn forcing_dominated(&self) -> bool {
        matches!(
            self.status,
            SolveStatus::BlewUp {
                forcing_dominated: true,
                ..
            }
        )
    }
}

/// The default cap 1e12 * max(1, sup of the forcing over the grid).
pub fn default_cap(params: &ProblemParams, grid: &LogGrid) -> Result<f64> {
    let mut sup_forcing = 0.0f64;
    for k in 0..grid.len() {
        let f = forcing_value(params, grid.time(k));
        if !f.is_finite() {
            return Err(Error::NumericalFailure {
                node: k,
                time: grid.time(k),
                detail: format!("forcing {f} is not finite"),
            });
        }
        sup_forcing = sup_forcing.max(f);
    }
    let cap = DEFAULT_CAP_FACTOR * sup_forcing.max(1.0);
    if !cap.is_finite() {
        return Err(Error::SpecError(format!(
            "default cap overflows for sup forcing {sup_forcing}"
        )));
    }
    Ok(cap)
}

/// The forcing term F(t) = A t^a (log t)^(-b) (log(t/R))^c.
pub fn forcing_value(params: &ProblemParams, t: f64) -> f64 {
    let log_t = t.ln();
    let sliced = (t / params.base_time).ln();
    let mut value = params.amplitude * t.powf(params.a);
    if params.b != 0.0 {
        value *= log_t.powf(-params.b);
    }
    if params.c != 0.0 {
        value *= sliced.powf(params.c);
    } else if sliced == 0.0 {
        // 0^0 = 1: the forcing is A R^a (log R)^(-b) at t = R when c = 0.
        value *= 1.0;
    }
    value
}

fn validate_for_solve(params: &ProblemParams) -> Result<()> {
    if params.coupling == 0.0 {
        // Feedback-off diagnostic runs are allowed: B = 0 turns the
        // dynamics into H = F.  Everything else must still be admissible.
        let mut relaxed = *params;
        relaxed.coupling = 1.0;
        relaxed.validated()?;
    } else {
        params.validated()?;
    }
    Ok(())
}

/// Marches the equality dynamics over the grid.
///
/// Each node k >= 2 is computed as predictor (accumulators without the
/// node's own half-cell) followed by `corrector_sweeps` re-evaluations of
/// the node's cell with the current H_k.  Node 1 uses the closed-form
/// singular first cell, which depends on the forcing local model rather
/// than on H_1.  The dynamics keep H >= F > 0 past the base time, so
/// |H|^p is evaluated as H^p with a positivity guard.
pub fn solve(params: &ProblemParams, spec: &SolveSpec) -> Result<Solution> {
    validate_for_solve(params)?;
    if spec.corrector_sweeps == 0 {
        return Err(Error::SpecError(
            "at least one corrector sweep is required".into(),
        ));
    }
    let grid = &spec.grid;
    if (grid.base_time - params.base_time).abs() > 1e-12 * params.base_time {
        return Err(Error::SpecError(format!(
            "grid base time {} does not match params R = {}",
            grid.base_time, params.base_time
        )));
    }

    let n = grid.len();
    let h = grid.step;
    let model = LocalModel {
        kappa: params.amplitude
            * params.base_time.powf(params.a)
            * params.base_time.ln().powf(-params.b),
        c_loc: params.c,
    };

    let mut forcing = Vec::with_capacity(n);
    for k in 0..n {
        let f = forcing_value(params, grid.time(k));
        if !f.is_finite() {
            return Err(Error::NumericalFailure {
                node: k,
                time: grid.time(k),
                detail: format!("forcing {f} is not finite"),
            });
        }
        forcing.push(f);
    }
    if spec.cap <= forcing[0] {
        return Err(Error::SpecError(format!(
            "cap {} is below the forcing {} at the base time",
            spec.cap, forcing[0]
        )));
    }

    let mut values = vec![forcing[0]];
    let mut inner = vec![0.0f64];
    let mut outer = vec![0.0f64];
    let mut max_growth_ratio = 0.0f64;
    let mut status = None;

    for k in 1..n {
        let t_k = grid.time(k);
        let feedback_scale = params.coupling * t_k.ln().powf(params.x);

        let (inner_k, outer_k, value_k) = if k == 1 {
            let inner_1 = first_cell(grid, params.y, params.z, params.p, &model)?;
            let outer_1 = first_cell_outer(grid, params.z, params.p, &model, inner_1);
            (inner_1, outer_1, forcing[1] + feedback_scale * outer_1)
        } else {
            let weight_prev = inner_weight(grid, params.y, params.z, k - 1);
            let weight_here = inner_weight(grid, params.y, params.z, k);
            let time_prev = grid.time(k - 1);
            let phi_prev = weight_prev * values[k - 1].powf(params.p);

            // Predictor: the node's own half-cell excluded.
            let inner_pred = inner[k - 1] + 0.5 * h * phi_prev;
            let outer_pred = outer[k - 1] + 0.5 * h * (time_prev * inner[k - 1] + t_k * inner_pred);
            let mut value_k = forcing[k] + feedback_scale * outer_pred;

            let mut inner_k = inner_pred;
            let mut outer_k = outer_pred;
            for _ in 0..spec.corrector_sweeps {
                if !value_k.is_finite() {
                    break;
                }
                inner_k = inner[k - 1]
                    + 0.5 * h * (phi_prev + weight_here * value_k.max(0.0).powf(params.p));
                outer_k = outer[k - 1] + 0.5 * h * (time_prev * inner[k - 1] + t_k * inner_k);
                value_k = forcing[k] + feedback_scale * outer_k;
            }
            (inner_k, outer_k, value_k)
        };

        if value_k.is_nan() {
            return Err(Error::NumericalFailure {
                node: k,
                time: t_k,
                detail: "H is NaN below the cap".into(),
            });
        }
        debug_assert!(
            value_k >= forcing[k] || !value_k.is_finite(),
            "H < F at node {k}"
        );

        if values[k - 1] > 0.0 && value_k.is_finite() {
            max_growth_ratio = max_growth_ratio.max(value_k / values[k - 1]);
        }
        values.push(value_k);
        inner.push(inner_k);
        outer.push(outer_k);

        if !value_k.is_finite() || value_k > spec.cap {
            status = Some(SolveStatus::BlewUp {
                t_num: t_k,
                node: k,
                forcing_dominated: forcing[k] >= spec.cap,
            });
            break;
        }
    }

    let status = status.unwrap_or(SolveStatus::Survived {
        horizon_time: grid.time(n - 1),
    });
    let computed = values.len();
    forcing.truncate(computed);

    Ok(Solution {
        params: *params,
        mode: spec.mode,
        grid: grid.clone(),
        cap: spec.cap,
        status,
        values,
        forcing,
        inner,
        outer,
        max_growth_ratio,
    })
}

/// One refinement level of a blow-up time study.
#[derive(Debug, Clone, Copy)]
pub struct RefinementLevel {
    pub step: f64,
    pub log_t_num: Option<f64>,
}

/// Outcome of [`blowup_time`].
#[derive(Debug, Clone)]
pub struct RefinementReport {
    pub levels: Vec<RefinementLevel>,
    /// |delta log T_num| between consecutive blown-up levels.
    pub log_deltas: Vec<f64>,
    /// Blow-up time at the finest level, when every level blew up.
    pub t_num: Option<f64>,
    /// Last delta below 1% of |log T_num|.
    pub converged: bool,
    /// Some level survived to the horizon: "no blow-up before horizon".
    pub survived: bool,
}

/// Re-solves with step h, h/2, h/4, ... and reports the convergence of
/// log T_num.  A survived level is a result, not an error; a
/// non-converging delta sequence comes back with `converged = false`.
pub fn blowup_time(
    params: &ProblemParams,
    spec: &SolveSpec,
    refinements: u32,
) -> Result<RefinementReport> {
    if refinements < 2 {
        return Err(Error::InvalidInput(format!(
            "refinement study needs at least 2 levels, got {refinements}"
        )));
    }
    let sigma_max = spec.grid.step * (spec.grid.len() - 1) as f64;
    let mut levels = Vec::new();
    let mut log_ts = Vec::new();
    let mut survived = false;

    for level in 0..refinements {
        let step = spec.grid.step / (2f64).powi(level as i32);
        let grid = LogGrid::from_horizon(spec.grid.base_time, step, sigma_max)?;
        let refined = SolveSpec::new(grid, spec.cap, spec.corrector_sweeps, spec.mode)?;
        let solution = solve(params, &refined)?;
        match solution.status {
            SolveStatus::BlewUp { t_num, .. } => {
                levels.push(RefinementLevel {
                    step,
                    log_t_num: Some(t_num.ln()),
                });
                log_ts.push(t_num.ln());
            }
            SolveStatus::Survived { .. } => {
                levels.push(RefinementLevel {
                    step,
                    log_t_num: None,
                });
                survived = true;
            }
        }
    }

    let log_deltas: Vec<f64> = log_ts.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let converged = !survived
        && log_ts.len() == refinements as usize
        && log_deltas
            .last()
            .map(|&d| d < 0.01 * log_ts.last().unwrap().abs())
            .unwrap_or(false);

    Ok(RefinementReport {
        levels,
        log_deltas,
        t_num: if survived {
            None
        } else {
            log_ts.last().map(|l| l.exp())
        },
        converged,
        survived,
    })
}
