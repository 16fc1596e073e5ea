//! Shared helpers for the integration suites.

use lifespan::params::derived_constants;
use lifespan::ProblemParams;
use rand::{Rng, RngExt};

pub fn canonical(amplitude: f64, coupling: f64) -> ProblemParams {
    ProblemParams::glassey_tuple(2.0, amplitude, coupling, 2.0)
}

/// Draws a tuple from the admissible region by construction, then
/// re-validates as a belt-and-braces check.
pub fn random_valid_params<R: Rng>(rng: &mut R) -> ProblemParams {
    loop {
        let p: f64 = rng.random_range(1.3..3.0);
        let a: f64 = rng.random_range(0.2..1.0);
        let x: f64 = rng.random_range(-2.0..2.0);
        let b = (x / (p - 1.0)).max(0.0) + rng.random_range(0.0..2.0);
        let c: f64 = rng.random_range(0.1..2.0);
        let w = (c - 1.0).max(-0.9) + rng.random_range(0.05..2.0);
        let params = ProblemParams {
            a,
            b,
            c,
            x,
            y: -1.0 - p * a,
            z: w - c * p,
            p,
            amplitude: rng.random_range(0.5..50.0),
            coupling: rng.random_range(0.3..4.0),
            base_time: rng.random_range(1.5..4.0),
        };
        if lifespan::validate(&params).unwrap().pass() {
            return params;
        }
    }
}

/// Valid tuple with theta comfortably positive and a critical time
/// exp((D/A)^((p-1)/theta)) away from both overflow and the t = 1
/// neighbourhood, where storing exp(L) as a double costs ulp(1)/L in the
/// recovered logarithm and swamps a 1e-12 identity check.
pub fn random_positive_theta_params<R: Rng>(rng: &mut R) -> ProblemParams {
    loop {
        let params = random_valid_params(rng);
        if params.theta() <= 0.05 {
            continue;
        }
        let derived = derived_constants(&params).unwrap();
        let log_critical = (derived.d_const / params.amplitude).powf(derived.lifespan_exponent);
        if log_critical.is_finite() && (0.05..300.0).contains(&log_critical) {
            return params;
        }
    }
}

pub fn rel_err(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
}
