//! Slicing-iteration frames.
//!
//! A frame is a lower bound of the shape
//!
//! ```text
//! A_j * t^a * (log t)^(-b_j) * (log(t/R_j))^(c_j),   t >= R_j,
//! ```
//!
//! and the iteration maps frame j to frame j+1 by the exact recursions
//!
//! ```text
//! b_{j+1} = p*b_j - x
//! c_{j+1} = p*c_j + z + 1
//! R_{j+1} = (1 + delta_j) * R_j
//! log A_{j+1} = p*log A_j + log B - log(1 + 1/delta_j) - log c_{j+1}
//! ```
//!
//! Amplitudes exist only as logarithms: A_j grows or shrinks doubly
//! exponentially in j and is never materialized.  Closed forms for b_j,
//! c_j, R_j and a closed-form *lower bound* for log A_j are available for
//! any index without marching.

use crate::error::{Error, Result};
use crate::params::{constant_c, derived_constants, ProblemParams};

/// Default cap on the iteration index.
///
/// For p >= 1.1 the exponents grow like p^j; by j = 40 every evaluation of
/// interest has saturated far beyond machine range.
pub const DEFAULT_MAX_INDEX: u32 = 40;

/// Slice-width schedule.
///
/// The iteration shrinks its slices by delta = 2^-k, and the two natural
/// indexings of that schedule disagree about where k starts: starting at
/// k = 0 drives the slice radii to 2 * R_inf, while the constant R_inf
/// itself is the product over k >= 1.  Both conventions are implemented
/// and nothing downstream guesses between them: the auditor always checks
/// against the frames' own R_j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexMode {
    /// delta_j = 2^-j for j = 0, 1, 2, ...; sup_j R_j = 2 * R_inf.
    #[default]
    AsPrinted,
    /// delta starts one step later (the step j -> j+1 uses 2^-(j+1));
    /// sup_j R_j = R_inf, matching the constant of the product branch.
    Strict,
}

impl IndexMode {
    /// Slice width used by the step from frame `j` to frame `j+1`.
    pub fn delta(self, j: u32) -> f64 {
        match self {
            IndexMode::AsPrinted => (2f64).powi(-(j as i32)),
            IndexMode::Strict => (2f64).powi(-(j as i32) - 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IndexMode::AsPrinted => "as-printed",
            IndexMode::Strict => "strict",
        }
    }
}

/// How the `log_amplitude` of a [`Frame`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeKind {
    /// Produced by running the exact recursion.
    ExactRecursion,
    /// The closed-form lower bound; at the same index it never exceeds the
    /// exact recursion value.
    ClosedFormLowerBound,
}

/// One iterate of the lower-bound family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub index: u32,
    /// log A_j; the amplitude itself is never stored.
    pub log_amplitude: f64,
    /// Exponent of t (equal to the tuple's `a`, constant in j).
    pub power: f64,
    /// Exponent b_j of (log t)^(-b_j).
    pub loglog_exponent: f64,
    /// Exponent c_j of (log(t/R_j))^(c_j).
    pub slicedlog_exponent: f64,
    /// Slice radius R_j; the frame is a valid lower bound for t >= R_j.
    pub slice_radius: f64,
    pub mode: IndexMode,
    pub amplitude_kind: AmplitudeKind,
}

/// Frame 0: the forcing term itself.
pub fn initial_frame(params: &ProblemParams, mode: IndexMode) -> Result<Frame> {
    params.validated()?;
    Ok(Frame {
        index: 0,
        log_amplitude: params.amplitude.ln(),
        power: params.a,
        loglog_exponent: params.b,
        slicedlog_exponent: params.c,
        slice_radius: params.base_time,
        mode,
        amplitude_kind: AmplitudeKind::ExactRecursion,
    })
}

/// One exact iteration step, frame j -> frame j+1.
pub fn advance(frame: &Frame, params: &ProblemParams) -> Frame {
    let p = params.p;
    let delta = frame.mode.delta(frame.index);
    let next_c = p * frame.slicedlog_exponent + params.z + 1.0;
    let next_b = p * frame.loglog_exponent - params.x;
    let log_amplitude =
        p * frame.log_amplitude + params.coupling.ln() - (1.0 / delta).ln_1p() - next_c.ln();

    debug_assert!(next_b >= -1e-12, "b_{} = {next_b} < 0", frame.index + 1);
    debug_assert!(next_c > 0.0, "c_{} = {next_c} <= 0", frame.index + 1);

    Frame {
        index: frame.index + 1,
        log_amplitude,
        power: frame.power,
        loglog_exponent: next_b,
        slicedlog_exponent: next_c,
        slice_radius: (1.0 + delta) * frame.slice_radius,
        mode: frame.mode,
        amplitude_kind: frame.amplitude_kind,
    }
}

/// Frame at index `j` from closed forms, without marching.
///
/// b_j, c_j and R_j are exact; the amplitude is the closed-form lower bound
///
/// ```text
/// log A_j >= p^j * log(A / E) + j * log(2p)/(p-1) + log E,
/// E = (2p)^(p/(p-1)^2) * C^(1/(p-1)),
/// ```
///
/// so the returned frame is tagged [`AmplitudeKind::ClosedFormLowerBound`].
pub fn closed_form(j: u32, params: &ProblemParams, mode: IndexMode) -> Result<Frame> {
    let c_const = constant_c(params)?;
    let p = params.p;
    let pm1 = p - 1.0;
    let p_pow_j = p.powi(j as i32);

    let b_j = p_pow_j * (params.b - params.x / pm1) + params.x / pm1;
    let c_j = p_pow_j * (params.c + (params.z + 1.0) / pm1) - (params.z + 1.0) / pm1;

    let mut radius = params.base_time;
    for k in 0..j {
        radius *= 1.0 + mode.delta(k);
    }

    // log E with E = (2p)^(p/(p-1)^2) * C^(1/(p-1)).
    let log_floor = (p / (pm1 * pm1)) * (2.0 * p).ln() + c_const.ln() / pm1;
    let log_amplitude = p_pow_j * (params.amplitude.ln() - log_floor)
        + (j as f64) * (2.0 * p).ln() / pm1
        + log_floor;

    Ok(Frame {
        index: j,
        log_amplitude,
        power: params.a,
        loglog_exponent: b_j,
        slicedlog_exponent: c_j,
        slice_radius: radius,
        mode,
        amplitude_kind: AmplitudeKind::ClosedFormLowerBound,
    })
}

/// log of the frame value at time `t`, for `t > R_j`.
///
/// Returns `log A_j + a*log t - b_j*log(log t) + c_j*log(log(t/R_j))`,
/// never the frame value itself: at large j the value spans far more
/// orders of magnitude than a float holds.
pub fn eval_log(frame: &Frame, t: f64) -> Result<f64> {
    if !(t > frame.slice_radius) || !(t > 1.0) {
        return Err(Error::Domain(format!(
            "frame {} is only a lower bound for t > R_j = {}; got t = {t}",
            frame.index, frame.slice_radius
        )));
    }
    let log_t = t.ln();
    let mut value = frame.log_amplitude + frame.power * log_t;
    if frame.loglog_exponent != 0.0 {
        value -= frame.loglog_exponent * log_t.ln();
    }
    if frame.slicedlog_exponent != 0.0 {
        value += frame.slicedlog_exponent * (t / frame.slice_radius).ln().ln();
    }
    Ok(value)
}

/// log of the constant dividing A in the blow-up criterion:
/// `2^(c + (z+1)/(p-1)) * (2p)^(p/(p-1)^2) * C^(1/(p-1))`.
///
/// This is the factored route to the lifespan constant D; the params
/// module assembles independently.
pub fn criterion_denominator_log(params: &ProblemParams) -> Result<f64> {
    let c_const = constant_c(params)?;
    let p = params.p;
    let pm1 = p - 1.0;
    Ok((params.c + (params.z + 1.0) / pm1) * 2f64.ln()
        + (p / (pm1 * pm1)) * (2.0 * p).ln()
        + c_const.ln() / pm1)
}

/// Blow-up criterion value
/// `Q(T) = A * (log T)^(theta/(p-1)) / (2^(c+(z+1)/(p-1)) (2p)^(p/(p-1)^2) C^(1/(p-1)))`.
///
/// Q(T) > 1 certifies that no solution of the system can stay finite at T;
/// the criterion applies for T >= R_inf^2, and the domain check enforces a
/// strict version of that.
pub fn q_value(params: &ProblemParams, t: f64) -> Result<f64> {
    let derived = derived_constants(params)?;
    if derived.theta == 0.0 {
        return Err(Error::DegenerateExponent {
            theta: derived.theta,
        });
    }
    let r_sq = derived.r_infinity * derived.r_infinity;
    if !(t > r_sq) {
        return Err(Error::Domain(format!(
            "blow-up criterion applies for t >= R_inf^2 = {r_sq}; got t = {t}"
        )));
    }
    q_value_unchecked(params, t)
}

/// Criterion value without the `t >= R_inf^2` domain restriction.
///
/// Used by the critical-time identity, which probes the algebraic
/// relation between the constants rather than certifying blow-up.
pub fn q_value_unchecked(params: &ProblemParams, t: f64) -> Result<f64> {
    params.validated()?;
    if !(t > 1.0) {
        return Err(Error::Domain(format!("criterion needs t > 1, got t = {t}")));
    }
    let theta = params.theta();
    let log_q = params.amplitude.ln() + (theta / (params.p - 1.0)) * t.ln().ln()
        - criterion_denominator_log(params)?;
    Ok(log_q.exp())
}
