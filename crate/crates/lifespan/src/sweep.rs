//! Amplitude sweeps: bound vs. numerical blow-up across an amplitude
//! grid, with the bound-consistency margin log T_bound - log T_num per
//! record and a least-squares fit of the lifespan scaling.
//!
//! Records are independent; a failing amplitude is noted on its own
//! record and never aborts the others.  Computation fans out across
//! threads but results keep input order, so output is deterministic.

use crate::bound::{bound, Branch};
use crate::error::{Error, Result};
use crate::frames::IndexMode;
use crate::params::ProblemParams;
use crate::volterra::{blowup_time, SolveSpec};

/// Sweep amplitudes default to D / {13, ..., 1} so log T_bound spans
/// [1, 13] on the formula branch; bounds past this horizon are refused
/// per record rather than attempted.
pub const MAX_LOG_HORIZON: f64 = 13.0;

/// Controls for [`run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub mode: IndexMode,
    /// Marching step of the coarsest refinement level.
    pub step: f64,
    /// Refinement levels per record (h, h/2, ...).
    pub refinements: u32,
    /// Refuse amplitudes whose bound exceeds this log horizon.
    pub max_log_horizon: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: IndexMode::AsPrinted,
            step: crate::volterra::DEFAULT_STEP,
            refinements: 3,
            max_log_horizon: MAX_LOG_HORIZON,
        }
    }
}

/// One amplitude's worth of sweep output.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub amplitude: f64,
    pub p: f64,
    pub coupling: f64,
    pub base_time: f64,
    pub theta: f64,
    pub branch: Option<Branch>,
    pub log_t_bound: Option<f64>,
    /// Blow-up time at the finest refinement level; None when the run
    /// survived, was refused, or failed.
    pub log_t_num: Option<f64>,
    /// log T_bound - log T_num; nonnegative for every converged blown-up
    /// record when the implementation is consistent with the bound.
    pub margin: Option<f64>,
    pub step: f64,
    pub cap: Option<f64>,
    pub converged: bool,
    /// Failure or refusal note; never aborts sibling records.
    pub note: Option<String>,
}

impl SweepRecord {
    /// Converged, blown-up records are the ones fits may use.
    pub fn usable_for_fit(&self) -> bool {
        self.converged && self.log_t_num.is_some() && self.note.is_none()
    }
}

fn sweep_one(base: &ProblemParams, amplitude: f64, options: &SweepOptions) -> SweepRecord {
    let mut record = SweepRecord {
        amplitude,
        p: base.p,
        coupling: base.coupling,
        base_time: base.base_time,
        theta: base.theta(),
        branch: None,
        log_t_bound: None,
        log_t_num: None,
        margin: None,
        step: options.step,
        cap: None,
        converged: false,
        note: None,
    };

    let mut params = *base;
    params.amplitude = amplitude;

    let ceiling = match bound(&params, options.mode) {
        Ok(b) => b,
        Err(err) => {
            record.note = Some(err.to_string());
            return record;
        }
    };
    record.branch = Some(ceiling.branch);
    record.log_t_bound = Some(ceiling.log_t_bound);

    if ceiling.log_t_bound > options.max_log_horizon {
        record.note = Some(format!(
            "horizon too large: log T_bound = {} exceeds {}",
            ceiling.log_t_bound, options.max_log_horizon
        ));
        return record;
    }

    let spec = match SolveSpec::for_params(&params, options.mode, options.step) {
        Ok(s) => s,
        Err(err) => {
            record.note = Some(err.to_string());
            return record;
        }
    };
    record.cap = Some(spec.cap);

    match blowup_time(&params, &spec, options.refinements) {
        Ok(report) => {
            record.converged = report.converged;
            if let Some(t_num) = report.t_num {
                record.log_t_num = Some(t_num.ln());
                record.margin = Some(ceiling.log_t_bound - t_num.ln());
            } else {
                record.note = Some("no blow-up before horizon".into());
            }
        }
        Err(err) => {
            record.note = Some(err.to_string());
        }
    }
    record
}

/// Runs one record per amplitude, in parallel, preserving input order.
pub fn run_sweep(
    base: &ProblemParams,
    amplitudes: &[f64],
    options: &SweepOptions,
) -> Result<Vec<SweepRecord>> {
    if amplitudes.is_empty() {
        return Err(Error::InvalidInput("amplitude list is empty".into()));
    }
    let records: Vec<SweepRecord> = std::thread::scope(|scope| {
        let handles: Vec<_> = amplitudes
            .iter()
            .map(|&amplitude| scope.spawn(move || sweep_one(base, amplitude, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    Ok(records)
}

/// Default amplitude grid D/13, D/12, ..., D/1.
pub fn default_amplitudes(base: &ProblemParams) -> Result<Vec<f64>> {
    let d_const = crate::params::constant_d(base)?;
    Ok((1..=13).rev().map(|k| d_const / k as f64).collect())
}

/// Least-squares fit of log T_num against A^(-(p-1)/theta).
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits the lifespan scaling over the converged blown-up records.
///
/// `lifespan_exponent` is (p-1)/theta; the regressor is
/// A^(-lifespan_exponent), so on the formula branch the pointwise bound
/// log T_num <= D^exp * A^(-exp) caps the cloud from above.
pub fn scaling_fit(records: &[SweepRecord], lifespan_exponent: f64) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.usable_for_fit())
        .map(|r| (r.amplitude.powf(-lifespan_exponent), r.log_t_num.unwrap()))
        .collect();
    if points.len() < 3 {
        return Err(Error::FitError(format!(
            "need at least 3 converged blown-up records, got {}",
            points.len()
        )));
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points
        .iter()
        .map(|(x, _)| (x - mean_x) * (x - mean_x))
        .sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let syy: f64 = points
        .iter()
        .map(|(_, y)| (y - mean_y) * (y - mean_y))
        .sum();
    if sxx == 0.0 {
        return Err(Error::FitError("all regressor values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };

    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
    })
}
