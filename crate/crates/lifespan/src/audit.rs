//! Numerical verification of the proof-chain inequalities.
//!
//! Three checks, all pure functions of their inputs:
//!
//! 1. the solution dominates the forcing at every node,
//! 2. the solution dominates each iteration frame on the frame's domain
//!    (compared in log space, where frames far below machine range count
//!    as trivially dominated),
//! 3. the integral operator applied to frame j dominates frame j+1 — the
//!    iteration step — evaluated against the slow oracle at sample times.
//!
//! The step check must pass with margin: the iteration discards the
//! s-integral outside a slice and relaxes (log r)^(-p b_j) to
//! (log t)^(-p b_j), and the full integral keeps what the step discards.
//! Margins are reported, never assumed.  All checks use the frames' own
//! slice radii R_j, so they are valid in both index modes.

use crate::error::{Error, Result};
use crate::frames::{advance, eval_log, Frame};
use crate::params::ProblemParams;
use crate::quad::double_integral_oracle;
use crate::volterra::Solution;

/// Additive log-space tolerance for domination checks; well above the
/// trapezoid error of the default grid on the calibration cases.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

/// Additive log-space tolerance for the iteration-step check.
pub const STEP_TOL: f64 = 1e-6;

/// Step checks are capped here: the oracle integrand frame_j^p spans
/// ~p^j orders of magnitude, and beyond j = 6 samples underflow and the
/// check is vacuous.
pub const MAX_STEP_INDEX: u32 = 6;

/// Log of the smallest positive normal f64; frame logs below this mean
/// the frame value underflows every representable positive number.
const LOG_TINY: f64 = -708.0;

/// Node-wise domination report (checks 1 and 2).
#[derive(Debug, Clone)]
pub struct DominationReport {
    pub check: &'static str,
    pub frame_index: u32,
    /// Nodes compared (excludes nodes outside the frame domain).
    pub checked: usize,
    /// Nodes where the frame value is below representable range.
    pub trivially_dominated: usize,
    /// Worst margin over the compared nodes; +inf when everything was
    /// trivially dominated.  Check 1 reports H - F, check 2 reports
    /// log H - log frame.
    pub worst_margin: f64,
    /// Node indices that violate the tolerance, with their margins.
    pub violations: Vec<(usize, f64)>,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check 1: H(t_k) >= F(t_k) * (1 - 1e-12) at every node.
pub fn check_first_inequality(
    solution: &Solution,
    params: &ProblemParams,
) -> Result<DominationReport> {
    if solution.params != *params {
        return Err(Error::InvalidInput(
            "solution was produced under different parameters".into(),
        ));
    }
    let mut worst = f64::INFINITY;
    let mut violations = Vec::new();
    for (k, (&h, &f)) in solution.values.iter().zip(&solution.forcing).enumerate() {
        let margin = h - f;
        if margin.is_nan() {
            continue; // h = +inf at a blow-up node dominates trivially
        }
        if h < f * (1.0 - 1e-12) {
            violations.push((k, margin));
        }
        worst = worst.min(margin);
    }
    Ok(DominationReport {
        check: "first-inequality",
        frame_index: 0,
        checked: solution.values.len(),
        trivially_dominated: 0,
        worst_margin: worst,
        violations,
    })
}

/// Check 2: log H(t_k) >= eval_log(frame, t_k) - rel_tol on the frame's
/// domain t_k >= R_j * (1 + 1e-9).
pub fn check_frame_dominates(
    solution: &Solution,
    frame: &Frame,
    rel_tol: f64,
) -> Result<DominationReport> {
    if frame.mode != solution.mode {
        return Err(Error::ModeMismatch {
            frame_mode: frame.mode.label(),
            solution_mode: solution.mode.label(),
        });
    }
    if solution.forcing_dominated() {
        return Err(Error::InvalidInput(
            "forcing-dominated solution carries no information about frames".into(),
        ));
    }
    let floor = frame.slice_radius * (1.0 + 1e-9);
    let mut checked = 0usize;
    let mut trivial = 0usize;
    let mut worst = f64::INFINITY;
    let mut violations = Vec::new();

    for (k, &h) in solution.values.iter().enumerate() {
        let t = solution.grid.time(k);
        if t < floor {
            continue;
        }
        checked += 1;
        let frame_log = eval_log(frame, t)?;
        if frame_log < LOG_TINY {
            trivial += 1;
            continue;
        }
        let margin = h.ln() - frame_log;
        if !(margin >= -rel_tol) {
            violations.push((k, margin));
        }
        worst = worst.min(margin);
    }

    Ok(DominationReport {
        check: "frame-dominates",
        frame_index: frame.index,
        checked,
        trivially_dominated: trivial,
        worst_margin: worst,
        violations,
    })
}

/// One sample of the iteration-step check.
#[derive(Debug, Clone, Copy)]
pub struct StepSample {
    pub time: f64,
    /// log RHS_j(t) - log frame_{j+1}(t); None when the sample was
    /// skipped because the shifted oracle value underflowed.
    pub margin: Option<f64>,
}

/// Report of check 3 for one frame index.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub frame_index: u32,
    pub samples: Vec<StepSample>,
    pub samples_skipped: usize,
    /// Worst margin over evaluated samples.
    pub worst_margin: f64,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.samples
            .iter()
            .filter_map(|s| s.margin)
            .all(|m| m >= -STEP_TOL)
            && self.samples.len() > self.samples_skipped
    }
}

/// Geometric sample times in [1.05, 5.0] * radius, all above the
/// precondition floor 1.01 * radius.
pub fn default_step_samples(radius: f64, count: usize) -> Vec<f64> {
    let lo = 1.05f64;
    let hi = 5.0f64;
    (0..count)
        .map(|i| {
            let fraction = i as f64 / (count.max(2) - 1) as f64;
            radius * lo * (hi / lo).powf(fraction)
        })
        .collect()
}

/// Check 3: at each sample time t > R_{j+1} * 1.01,
///
/// ```text
/// log[ B (log t)^x * double_integral(t; phi = frame_j) ]
///     >= eval_log(frame_{j+1}, t) - 1e-6.
/// ```
///
/// The frame is fed to the oracle through an amplitude shift so the
/// integrand stays in comfortable floating range; the shift is added back
/// in log space.
pub fn check_iteration_step(
    frame: &Frame,
    params: &ProblemParams,
    sample_times: &[f64],
    oracle_min_points: usize,
    oracle_levels: usize,
) -> Result<StepReport> {
    params.validated()?;
    if frame.index > MAX_STEP_INDEX {
        return Err(Error::InvalidInput(format!(
            "step check is capped at frame index {MAX_STEP_INDEX}; got {}",
            frame.index
        )));
    }
    if sample_times.is_empty() {
        return Err(Error::InvalidInput(
            "step check needs at least one sample time".into(),
        ));
    }
    let next = advance(frame, params);
    let floor = next.slice_radius * 1.01;
    if let Some(&bad) = sample_times.iter().find(|&&t| !(t > floor)) {
        return Err(Error::InvalidInput(format!(
            "sample time {bad} is not above 1.01 * R_(j+1) = {floor}"
        )));
    }

    let mut samples = Vec::with_capacity(sample_times.len());
    let mut skipped = 0usize;
    let mut worst = f64::INFINITY;

    for &t in sample_times {
        // Shift by the largest frame log over the support so the oracle
        // integrand peaks near 1.
        let mut shift = f64::NEG_INFINITY;
        for i in 0..=64 {
            let r = frame.slice_radius * (t / frame.slice_radius).powf((i as f64 + 0.5) / 65.0);
            if r > frame.slice_radius {
                shift = shift.max(eval_log(frame, r)?);
            }
        }
        let radius = frame.slice_radius;
        let shifted_frame = |r: f64| -> f64 {
            if r <= radius {
                return 0.0;
            }
            match eval_log(frame, r) {
                Ok(log_value) => (log_value - shift).exp(),
                Err(_) => 0.0,
            }
        };

        let oracle = double_integral_oracle(
            t,
            &shifted_frame,
            params.y,
            params.z,
            params.p,
            params.base_time,
            radius.max(params.base_time),
            oracle_min_points,
            oracle_levels,
        )?;

        if !(oracle.value > 0.0) || !oracle.value.is_finite() {
            samples.push(StepSample {
                time: t,
                margin: None,
            });
            skipped += 1;
            continue;
        }

        let log_rhs =
            params.coupling.ln() + params.x * t.ln().ln() + params.p * shift + oracle.value.ln();
        let margin = log_rhs - eval_log(&next, t)?;
        worst = worst.min(margin);
        samples.push(StepSample {
            time: t,
            margin: Some(margin),
        });
    }

    Ok(StepReport {
        frame_index: frame.index,
        samples,
        samples_skipped: skipped,
        worst_margin: worst,
    })
}

/// Options for [`run_full_audit`].
#[derive(Debug, Clone)]
pub struct AuditOptions {
    /// Frames 0..=this are checked for domination.
    pub max_domination_index: u32,
    /// Steps 0..=this are checked against the oracle.
    pub max_step_index: u32,
    pub rel_tol: f64,
    pub samples_per_step: usize,
    /// Oracle evaluation floor; 0 derives 10x the default marching grid
    /// over the sample horizon.
    pub oracle_min_points: usize,
    pub oracle_levels: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            max_domination_index: 4,
            max_step_index: 3,
            rel_tol: DEFAULT_REL_TOL,
            samples_per_step: 20,
            oracle_min_points: 0,
            oracle_levels: 3,
        }
    }
}

/// Flat pass/fail row for the audit table.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub check: &'static str,
    pub frame_index: u32,
    pub worst_margin: f64,
    pub samples_skipped: usize,
    pub passed: bool,
}

/// Runs the whole chain against one solution and flattens the reports.
pub fn run_full_audit(
    solution: &Solution,
    params: &ProblemParams,
    options: &AuditOptions,
) -> Result<Vec<AuditRow>> {
    let mut rows = Vec::new();

    let first = check_first_inequality(solution, params)?;
    rows.push(AuditRow {
        check: first.check,
        frame_index: 0,
        worst_margin: first.worst_margin,
        samples_skipped: 0,
        passed: first.passed(),
    });

    let mut frame = crate::frames::initial_frame(params, solution.mode)?;
    for j in 0..=options.max_domination_index.max(options.max_step_index) {
        if j <= options.max_domination_index {
            let report = check_frame_dominates(solution, &frame, options.rel_tol)?;
            rows.push(AuditRow {
                check: report.check,
                frame_index: j,
                worst_margin: report.worst_margin,
                samples_skipped: 0,
                passed: report.passed(),
            });
        }
        if j <= options.max_step_index {
            let next_radius = advance(&frame, params).slice_radius;
            let samples = default_step_samples(next_radius, options.samples_per_step);
            let min_points = if options.oracle_min_points > 0 {
                options.oracle_min_points
            } else {
                let sigma = (samples.last().unwrap() / params.base_time).ln();
                10 * ((sigma / crate::volterra::DEFAULT_STEP).ceil() as usize + 1)
            };
            let report =
                check_iteration_step(&frame, params, &samples, min_points, options.oracle_levels)?;
            rows.push(AuditRow {
                check: "iteration-step",
                frame_index: j,
                worst_margin: report.worst_margin,
                samples_skipped: report.samples_skipped,
                passed: report.passed(),
            });
        }
        frame = advance(&frame, params);
    }

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{initial_frame, IndexMode};
    use crate::volterra::{solve, SolveSpec, DEFAULT_STEP};

    fn canonical(amplitude: f64, coupling: f64) -> ProblemParams {
        ProblemParams::glassey_tuple(2.0, amplitude, coupling, 2.0)
    }

    fn canonical_solution(
        amplitude: f64,
        coupling: f64,
        mode: IndexMode,
    ) -> (ProblemParams, Solution) {
        let params = canonical(amplitude, coupling);
        let spec = SolveSpec::for_params(&params, mode, DEFAULT_STEP).unwrap();
        let solution = solve(&params, &spec).unwrap();
        (params, solution)
    }

    #[test]
    fn feedback_off_run_has_zero_margins() {
        let params = canonical(100.0, 0.0);
        let grid = crate::quad::LogGrid::from_horizon(2.0, 1e-3, 2.0).unwrap();
        let spec = SolveSpec::new(grid, 1e9, 1, IndexMode::AsPrinted).unwrap();
        let solution = solve(&params, &spec).unwrap();
        let report = check_first_inequality(&solution, &params).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst_margin, 0.0);
    }

    #[test]
    fn canonical_solution_dominates_forcing() {
        let (params, solution) = canonical_solution(100.0, 1.0, IndexMode::AsPrinted);
        let report = check_first_inequality(&solution, &params).unwrap();
        assert!(report.passed());
        assert!(report.worst_margin >= 0.0);
    }

    #[test]
    fn corrupted_solution_yields_exactly_one_violation() {
        let (params, mut solution) = canonical_solution(100.0, 1.0, IndexMode::AsPrinted);
        let node = solution.values.len() / 2;
        solution.values[node] *= 0.5;
        let report = check_first_inequality(&solution, &params).unwrap();
        assert!(!report.passed());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].0, node);
    }

    #[test]
    fn frame_zero_matches_first_inequality() {
        let (params, solution) = canonical_solution(100.0, 1.0, IndexMode::AsPrinted);
        let frame = initial_frame(&params, IndexMode::AsPrinted).unwrap();
        let report = check_frame_dominates(&solution, &frame, 1e-6).unwrap();
        assert!(report.passed(), "worst margin {}", report.worst_margin);
    }

    #[test]
    fn intermediate_frames_are_dominated() {
        // Strict mode keeps every slice radius below the blow-up time, so
        // the domination checks all see nodes.
        let (params, solution) = canonical_solution(100.0, 1.0, IndexMode::Strict);
        let mut frame = initial_frame(&params, IndexMode::Strict).unwrap();
        for j in 1..=4u32 {
            frame = advance(&frame, &params);
            let report = check_frame_dominates(&solution, &frame, 1e-6).unwrap();
            assert!(report.passed(), "frame {j}: worst {}", report.worst_margin);
            assert!(report.checked > 0, "frame {j} had no nodes in range");
        }
    }

    #[test]
    fn as_printed_radii_can_outrun_the_blowup() {
        // In as-printed mode R_3 = 7.5 already exceeds the numerical
        // blow-up time of the A=100 run; the check passes vacuously and
        // reports zero compared nodes.
        let (params, solution) = canonical_solution(100.0, 1.0, IndexMode::AsPrinted);
        let mut frame = initial_frame(&params, IndexMode::AsPrinted).unwrap();
        for _ in 0..3 {
            frame = advance(&frame, &params);
        }
        assert!(frame.slice_radius > solution.t_num().unwrap());
        let report = check_frame_dominates(&solution, &frame, 1e-6).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 0);
    }

    #[test]
    fn tiny_frame_is_trivially_dominated() {
        let (params, solution) = canonical_solution(100.0, 1.0, IndexMode::AsPrinted);
        let mut frame = initial_frame(&params, IndexMode::AsPrinted).unwrap();
        frame.log_amplitude = -1e6;
        let report = check_frame_dominates(&solution, &frame, 1e-6).unwrap();
        assert!(report.passed());
        assert_eq!(report.trivially_dominated, report.checked);
        assert_eq!(report.worst_margin, f64::INFINITY);
    }

    #[test]
    fn mode_mismatch_is_an_input_error() {
        let (params, solution) = canonical_solution(100.0, 1.0, IndexMode::AsPrinted);
        let frame = initial_frame(&params, IndexMode::Strict).unwrap();
        assert!(matches!(
            check_frame_dominates(&solution, &frame, 1e-6),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn iteration_step_passes_with_positive_margin() {
        let params = canonical(100.0, 1.0);
        let frame = initial_frame(&params, IndexMode::AsPrinted).unwrap();
        let next_radius = advance(&frame, &params).slice_radius;
        let samples: Vec<f64> = [1.1, 2.0, 5.0].iter().map(|m| m * next_radius).collect();
        let report = check_iteration_step(&frame, &params, &samples, 20_000, 3).unwrap();
        assert!(report.passed(), "worst margin {}", report.worst_margin);
        assert!(report.worst_margin > 0.0);
        assert_eq!(report.samples_skipped, 0);
    }

    #[test]
    fn iteration_step_rejects_samples_below_floor() {
        let params = canonical(100.0, 1.0);
        let frame = initial_frame(&params, IndexMode::AsPrinted).unwrap();
        let next_radius = advance(&frame, &params).slice_radius;
        let samples = vec![next_radius * 1.005];
        assert!(check_iteration_step(&frame, &params, &samples, 1000, 3).is_err());
    }

    #[test]
    fn both_modes_pass_the_step_check() {
        let params = canonical(100.0, 1.0);
        for mode in [IndexMode::AsPrinted, IndexMode::Strict] {
            let frame = initial_frame(&params, mode).unwrap();
            let next_radius = advance(&frame, &params).slice_radius;
            let samples = default_step_samples(next_radius, 8);
            let report = check_iteration_step(&frame, &params, &samples, 20_000, 3).unwrap();
            assert!(
                report.passed(),
                "{}: worst {}",
                mode.label(),
                report.worst_margin
            );
        }
        // Strict mode has the smaller next radius, hence samples reach
        // further down.
        let printed = initial_frame(&params, IndexMode::AsPrinted).unwrap();
        let strict = initial_frame(&params, IndexMode::Strict).unwrap();
        assert!(advance(&strict, &params).slice_radius < advance(&printed, &params).slice_radius);
    }
}
