//! Command-line front end: config parsing, subcommand dispatch, and
//! structured output.
//!
//! Exit codes: 0 on success, 1 for validation/config failures, 2 for
//! numerical failures (solver non-finite, oracle non-convergence), 3 when
//! a bound-consistency margin comes out negative — the one code that
//! means the computation contradicts the bound.
//!
//! All floats in file outputs are printed with 17 significant digits so
//! round-trips are lossless, and the same config and flags always produce
//! byte-identical files.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::audit::{run_full_audit, AuditOptions};
use crate::bound::bound;
use crate::error::{Error, Result};
use crate::frames::{advance, closed_form, initial_frame, IndexMode};
use crate::params::{derived_constants, validate, ProblemParams};
use crate::quad::LogGrid;
use crate::sweep::{default_amplitudes, run_sweep, scaling_fit, SweepOptions, SweepRecord};
use crate::volterra::{
    blowup_time, default_cap, solve, SolveSpec, SolveStatus, DEFAULT_HORIZON_FACTOR, DEFAULT_STEP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    AsPrinted,
    Strict,
}

impl From<ModeArg> for IndexMode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::AsPrinted => IndexMode::AsPrinted,
            ModeArg::Strict => IndexMode::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "lifespan",
    version,
    about = "Blow-up bounds, iteration frames, and equality dynamics for a log-weighted Volterra inequality system"
)]
struct Cli {
    /// TOML config naming the problem parameters (see configs/ for a template).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Slice-width indexing of the iteration.
    #[arg(long, global = true, value_enum, default_value = "as-printed")]
    mode: ModeArg,

    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Write primary output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the exponent tuple against the admissibility conditions.
    Validate,
    /// Compute the lifespan bound and its branch.
    Bound,
    /// Print the frame table (j, b_j, c_j, R_j, log A_j exact and closed form).
    Iterate {
        /// Largest frame index.
        #[arg(long)]
        max_index: Option<u32>,
    },
    /// March the equality dynamics and report blow-up.
    Solve {
        /// Emit the per-node trace (t, sigma, F, H, I, J) instead of the summary.
        #[arg(long)]
        trace: bool,
        /// Override the marching step in sigma.
        #[arg(long)]
        step: Option<f64>,
        /// Override the blow-up cap.
        #[arg(long)]
        cap: Option<f64>,
        /// Refinement levels for the blow-up time study.
        #[arg(long)]
        refinements: Option<u32>,
    },
    /// Audit the proof-chain inequalities on a fresh solve.
    Audit {
        /// Override samples per iteration-step check.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run the amplitude sweep and report bound-consistency margins.
    Sweep {
        /// Comma-separated amplitude list (defaults to D/13..D).
        #[arg(long, value_delimiter = ',')]
        amplitudes: Option<Vec<f64>>,
        /// Override the marching step in sigma.
        #[arg(long)]
        step: Option<f64>,
        /// Refinement levels per record.
        #[arg(long)]
        refinements: Option<u32>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveSection {
    step: Option<f64>,
    cap: Option<f64>,
    /// Horizon sigma_max; defaults to 1.2 * log T_bound - log R.
    horizon: Option<f64>,
    corrector_sweeps: Option<u32>,
    refinements: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    amplitudes: Option<Vec<f64>>,
    step: Option<f64>,
    refinements: Option<u32>,
    max_log_horizon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditSection {
    rel_tol: Option<f64>,
    max_domination_index: Option<u32>,
    max_step_index: Option<u32>,
    samples_per_step: Option<usize>,
    oracle_min_points: Option<usize>,
    oracle_levels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IterateSection {
    max_index: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    params: ProblemParams,
    #[serde(default)]
    solve: SolveSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    audit: AuditSection,
    #[serde(default)]
    iterate: IterateSection,
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// 17 significant digits; enough for a lossless f64 round-trip.
fn fmt(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        format!("{value}")
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt).unwrap_or_default()
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NumericalFailure { .. } | Error::OracleFailure(_) => 2,
        _ => 1,
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let config = load_config(&cli.config)?;
    let params = config.params;
    let mode: IndexMode = cli.mode.into();

    match &cli.command {
        Command::Validate => cmd_validate(cli, &params),
        Command::Bound => cmd_bound(cli, &params, mode),
        Command::Iterate { max_index } => {
            let max = max_index
                .or(config.iterate.max_index)
                .unwrap_or(crate::frames::DEFAULT_MAX_INDEX);
            cmd_iterate(cli, &params, mode, max)
        }
        Command::Solve {
            trace,
            step,
            cap,
            refinements,
        } => cmd_solve(
            cli,
            &params,
            mode,
            &config.solve,
            *trace,
            *step,
            *cap,
            *refinements,
        ),
        Command::Audit { samples } => cmd_audit(cli, &params, mode, &config, *samples),
        Command::Sweep {
            amplitudes,
            step,
            refinements,
        } => cmd_sweep(
            cli,
            &params,
            mode,
            &config.sweep,
            amplitudes.clone(),
            *step,
            *refinements,
        ),
    }
}

fn cmd_validate(cli: &Cli, params: &ProblemParams) -> Result<i32> {
    let report = validate(params)?;
    let mut lines = Vec::new();
    lines.push(format!("pass = {}", report.pass()));
    for violation in &report.violations {
        lines.push(format!(
            "violated = {} ({})",
            violation.condition, violation.detail
        ));
    }
    for warning in &report.warnings {
        lines.push(format!("warning = {warning}"));
    }
    let body = match cli.format {
        FormatArg::Csv => format!("{}\n", lines.join("\n")),
        FormatArg::Json => {
            let json = serde_json::json!({
                "pass": report.pass(),
                "violations": report
                    .violations
                    .iter()
                    .map(|v| format!("{} ({})", v.condition, v.detail))
                    .collect::<Vec<_>>(),
                "warnings": report.warnings,
            });
            format!("{json}\n")
        }
    };
    emit(&cli.out, &body)?;
    Ok(if report.pass() { 0 } else { 1 })
}

fn cmd_bound(cli: &Cli, params: &ProblemParams, mode: IndexMode) -> Result<i32> {
    let derived = derived_constants(params)?;
    let ceiling = bound(params, mode)?;
    let body = match cli.format {
        FormatArg::Csv => format!(
            "branch = {}\ntheta = {}\nC = {}\nD = {}\nR_inf = {}\nlog_T_bound = {}\nT_bound = {}\nmode = {}\n",
            ceiling.branch.label(),
            fmt(ceiling.theta),
            fmt(derived.c_const),
            fmt(derived.d_const),
            fmt(derived.r_infinity),
            fmt(ceiling.log_t_bound),
            fmt(ceiling.t_bound),
            mode.label(),
        ),
        FormatArg::Json => {
            let json = serde_json::json!({
                "branch": ceiling.branch.label(),
                "theta": ceiling.theta,
                "C": derived.c_const,
                "D": derived.d_const,
                "R_inf": derived.r_infinity,
                "log_T_bound": ceiling.log_t_bound,
                "T_bound": ceiling.t_bound,
                "mode": mode.label(),
            });
            format!("{json}\n")
        }
    };
    emit(&cli.out, &body)?;
    Ok(0)
}

fn cmd_iterate(cli: &Cli, params: &ProblemParams, mode: IndexMode, max_index: u32) -> Result<i32> {
    let mut rows = Vec::new();
    let mut frame = initial_frame(params, mode)?;
    for j in 0..=max_index {
        let lower = closed_form(j, params, mode)?;
        rows.push((
            j,
            frame.loglog_exponent,
            frame.slicedlog_exponent,
            frame.slice_radius,
            frame.log_amplitude,
            lower.log_amplitude,
        ));
        frame = advance(&frame, params);
    }

    let body = match cli.format {
        FormatArg::Csv => {
            let mut out = String::from("j,b_j,c_j,R_j,log_A_exact,log_A_closed_form\n");
            for (j, b, c, r, exact, lower) in &rows {
                out.push_str(&format!(
                    "{j},{},{},{},{},{}\n",
                    fmt(*b),
                    fmt(*c),
                    fmt(*r),
                    fmt(*exact),
                    fmt(*lower)
                ));
            }
            out
        }
        FormatArg::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(j, b, c, r, exact, lower)| {
                    serde_json::json!({
                        "j": j,
                        "b_j": b,
                        "c_j": c,
                        "R_j": r,
                        "log_A_exact": exact,
                        "log_A_closed_form": lower,
                    })
                })
                .collect();
            format!("{}\n", serde_json::Value::Array(items))
        }
    };
    emit(&cli.out, &body)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    cli: &Cli,
    params: &ProblemParams,
    mode: IndexMode,
    section: &SolveSection,
    trace: bool,
    step_flag: Option<f64>,
    cap_flag: Option<f64>,
    refinements_flag: Option<u32>,
) -> Result<i32> {
    let ceiling = bound(params, mode)?;
    let step = step_flag.or(section.step).unwrap_or(DEFAULT_STEP);
    let sigma_max = section
        .horizon
        .unwrap_or(DEFAULT_HORIZON_FACTOR * ceiling.log_t_bound - params.base_time.ln());
    let grid = LogGrid::from_horizon(params.base_time, step, sigma_max)?;
    let cap = match cap_flag.or(section.cap) {
        Some(c) => c,
        None => default_cap(params, &grid)?,
    };
    let sweeps = section.corrector_sweeps.unwrap_or(1);
    let spec = SolveSpec::new(grid, cap, sweeps, mode)?;
    let solution = solve(params, &spec)?;

    if trace {
        let mut out = String::from("t,sigma,F,H,I,J\n");
        for k in 0..solution.values.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt(solution.grid.time(k)),
                fmt(solution.grid.sigma(k)),
                fmt(solution.forcing[k]),
                fmt(solution.values[k]),
                fmt(solution.inner[k]),
                fmt(solution.outer[k]),
            ));
        }
        emit(&cli.out, &out)?;
    }

    let refinements = refinements_flag.or(section.refinements).unwrap_or(3);
    let (status_line, margin) = match solution.status {
        SolveStatus::BlewUp {
            t_num,
            node,
            forcing_dominated,
        } => {
            let report = blowup_time(params, &spec, refinements)?;
            let t_fine = report.t_num.unwrap_or(t_num);
            let margin = ceiling.log_t_bound - t_fine.ln();
            (
                format!(
                    "status = blew-up\nt_num = {}\nlog_t_num = {}\nnode = {node}\nforcing_dominated = {forcing_dominated}\nconverged = {}\nlog_T_bound = {}\nmargin = {}\n",
                    fmt(t_fine),
                    fmt(t_fine.ln()),
                    report.converged,
                    fmt(ceiling.log_t_bound),
                    fmt(margin),
                ),
                Some(margin),
            )
        }
        SolveStatus::Survived { horizon_time } => (
            format!(
                "status = survived\nhorizon_time = {}\nlog_T_bound = {}\n",
                fmt(horizon_time),
                fmt(ceiling.log_t_bound),
            ),
            None,
        ),
    };

    let summary = format!(
        "{status_line}cap = {}\nstep = {}\nnodes = {}\nmax_growth_ratio = {}\n",
        fmt(spec.cap),
        fmt(step),
        solution.grid.len(),
        fmt(solution.max_growth_ratio),
    );
    if trace {
        eprint!("{summary}");
    } else {
        match cli.format {
            FormatArg::Csv => emit(&cli.out, &summary)?,
            FormatArg::Json => {
                let json = serde_json::json!({
                    "status": if solution.blew_up() { "blew-up" } else { "survived" },
                    "t_num": solution.t_num(),
                    "log_t_num": solution.t_num().map(|t| t.ln()),
                    "log_T_bound": ceiling.log_t_bound,
                    "margin": margin,
                    "cap": spec.cap,
                    "step": step,
                    "nodes": solution.grid.len(),
                    "max_growth_ratio": solution.max_growth_ratio,
                });
                emit(&cli.out, &format!("{json}\n"))?;
            }
        }
    }

    if let Some(m) = margin {
        if m < 0.0 {
            eprintln!("bound-consistency violation: margin = {m}");
            return Ok(3);
        }
    }
    Ok(0)
}

fn cmd_audit(
    cli: &Cli,
    params: &ProblemParams,
    mode: IndexMode,
    config: &ConfigFile,
    samples_flag: Option<usize>,
) -> Result<i32> {
    let step = config.solve.step.unwrap_or(DEFAULT_STEP);
    let spec = SolveSpec::for_params(params, mode, step)?;
    let solution = solve(params, &spec)?;

    let defaults = AuditOptions::default();
    let section = &config.audit;
    let options = AuditOptions {
        max_domination_index: section
            .max_domination_index
            .unwrap_or(defaults.max_domination_index),
        max_step_index: section.max_step_index.unwrap_or(defaults.max_step_index),
        rel_tol: section.rel_tol.unwrap_or(defaults.rel_tol),
        samples_per_step: samples_flag
            .or(section.samples_per_step)
            .unwrap_or(defaults.samples_per_step),
        oracle_min_points: section
            .oracle_min_points
            .unwrap_or(defaults.oracle_min_points),
        oracle_levels: section.oracle_levels.unwrap_or(defaults.oracle_levels),
    };

    let rows = run_full_audit(&solution, params, &options)?;
    let all_passed = rows.iter().all(|r| r.passed);

    let body = match cli.format {
        FormatArg::Csv => {
            let mut out = String::from("check,j,worst_margin,samples_skipped,passed\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.check,
                    row.frame_index,
                    fmt(row.worst_margin),
                    row.samples_skipped,
                    row.passed
                ));
            }
            out
        }
        FormatArg::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "check": row.check,
                        "j": row.frame_index,
                        "worst_margin": row.worst_margin,
                        "samples_skipped": row.samples_skipped,
                        "passed": row.passed,
                    })
                })
                .collect();
            format!("{}\n", serde_json::Value::Array(items))
        }
    };
    emit(&cli.out, &body)?;
    Ok(if all_passed { 0 } else { 3 })
}

fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out =
        String::from("A,p,B,R,theta,branch,log_T_bound,log_T_num,margin,h,cap,converged\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(r.amplitude),
            fmt(r.p),
            fmt(r.coupling),
            fmt(r.base_time),
            fmt(r.theta),
            r.branch.map(|b| b.label()).unwrap_or(""),
            fmt_opt(r.log_t_bound),
            fmt_opt(r.log_t_num),
            fmt_opt(r.margin),
            fmt(r.step),
            fmt_opt(r.cap),
            r.converged
        ));
    }
    out
}

fn sweep_json(records: &[SweepRecord]) -> String {
    let items: Vec<_> = records
        .iter()
        .map(|r| {
            serde_json::json!({
                "A": r.amplitude,
                "p": r.p,
                "B": r.coupling,
                "R": r.base_time,
                "theta": r.theta,
                "branch": r.branch.map(|b| b.label()),
                "log_T_bound": r.log_t_bound,
                "log_T_num": r.log_t_num,
                "margin": r.margin,
                "h": r.step,
                "cap": r.cap,
                "converged": r.converged,
            })
        })
        .collect();
    format!("{}\n", serde_json::Value::Array(items))
}

fn cmd_sweep(
    cli: &Cli,
    params: &ProblemParams,
    mode: IndexMode,
    section: &SweepSection,
    amplitudes_flag: Option<Vec<f64>>,
    step_flag: Option<f64>,
    refinements_flag: Option<u32>,
) -> Result<i32> {
    let defaults = SweepOptions::default();
    let options = SweepOptions {
        mode,
        step: step_flag.or(section.step).unwrap_or(defaults.step),
        refinements: refinements_flag
            .or(section.refinements)
            .unwrap_or(defaults.refinements),
        max_log_horizon: section.max_log_horizon.unwrap_or(defaults.max_log_horizon),
    };
    let amplitudes = match amplitudes_flag.or_else(|| section.amplitudes.clone()) {
        Some(list) => list,
        None => default_amplitudes(params)?,
    };

    let records = run_sweep(params, &amplitudes, &options)?;
    for record in &records {
        if let Some(note) = &record.note {
            eprintln!("A = {}: {note}", record.amplitude);
        }
    }

    let body = match cli.format {
        FormatArg::Csv => sweep_csv(&records),
        FormatArg::Json => sweep_json(&records),
    };
    emit(&cli.out, &body)?;

    let derived = derived_constants(params)?;
    match scaling_fit(&records, derived.lifespan_exponent) {
        Ok(fit) => eprintln!(
            "fit: slope = {}, intercept = {}, r_squared = {}, points = {}",
            fit.slope, fit.intercept, fit.r_squared, fit.points
        ),
        Err(err) => eprintln!("fit unavailable: {err}"),
    }

    let violated = records
        .iter()
        .any(|r| r.converged && r.margin.map(|m| m < 0.0).unwrap_or(false));
    Ok(if violated { 3 } else { 0 })
}
