//! Parameter validation and derived constants.
//!
//! The integral inequality system is governed by an exponent tuple
//! (a, b, c, x, y, z, p) together with an amplitude A, a coupling B and a
//! base time R > 1.  The admissible region is
//!
//! ```text
//! p > 1,  a <= 1,  b >= max{0, x/(p-1)},
//! y + p*a = -1,  z + c*p > -1,  z + c*p >= c - 1.
//! ```
//!
//! From a valid tuple this module computes the iteration constant C, the
//! lifespan constant D, the exponent theta = x + z + 1 + (c - b)(p - 1)
//! and the truncated infinite product R_inf.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for the equality constraint y + p*a = -1.
pub const EQUALITY_TOL: f64 = 1e-12;

/// Default relative tolerance for the truncated product `r_infinity`.
pub const R_INFINITY_TOL: f64 = 1e-12;

/// Full parameter set of the inequality system.
///
/// Exponent fields keep their single-letter names: they are the knobs the
/// system is written in and the names users type in config files.  The
/// amplitude, coupling and base time serialize as `A`, `B` and `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub p: f64,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "B")]
    pub coupling: f64,
    #[serde(rename = "R")]
    pub base_time: f64,
}

/// One violated admissibility condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// The condition, written the way the user would type it.
    pub condition: &'static str,
    /// What the offending values actually are.
    pub detail: String,
}

/// Outcome of [`validate`]: hard failures and soft warnings.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Derived constants of a valid tuple.
#[derive(Debug, Clone, Copy)]
pub struct DerivedConstants {
    /// Iteration constant C = (1/B) * max{c + (z+1)/(p-1), c + (z+1)/p}.
    pub c_const: f64,
    /// Lifespan constant D (see [`constant_d`]).
    pub d_const: f64,
    /// theta = x + z + 1 + (c - b)(p - 1).
    pub theta: f64,
    /// Truncated product R * prod_{k=1..K} (1 + 2^-k) at tolerance 1e-12.
    pub r_infinity: f64,
    /// (p - 1) / theta; only meaningful when theta > 0.
    pub lifespan_exponent: f64,
}

impl ProblemParams {
    /// The tuple (a=1, b=0, c=1, x=-p, y=-p-1, z=1) that the system takes
    /// for wave equations with derivative nonlinearity |∇u|^p; valid for
    /// every p > 1.
    pub fn glassey_tuple(p: f64, amplitude: f64, coupling: f64, base_time: f64) -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 1.0,
            x: -p,
            y: -p - 1.0,
            z: 1.0,
            p,
            amplitude,
            coupling,
            base_time,
        }
    }

    /// theta = x + z + 1 + (c - b)(p - 1), the denominator of the lifespan
    /// bound exponent.
    pub fn theta(&self) -> f64 {
        self.x + self.z + 1.0 + (self.c - self.b) * (self.p - 1.0)
    }

    fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("x", self.x),
            ("y", self.y),
            ("z", self.z),
            ("p", self.p),
            ("A", self.amplitude),
            ("B", self.coupling),
            ("R", self.base_time),
        ]
    }

    /// Returns `self` if the tuple passes validation, otherwise an
    /// `InvalidParams` error naming the first violated condition.
    pub fn validated(&self) -> Result<&Self> {
        let report = validate(self)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidParams(format!(
                "{} ({})",
                v.condition, v.detail
            )));
        }
        Ok(self)
    }
}

/// Checks every admissibility condition.
///
/// Violations are collected, not short-circuited, so a config with several
/// bad fields reports them all at once.  `theta <= 0` is a warning, not a
/// failure: the admissible region allows it, but the lifespan bound formula
/// degenerates there and the bound module refuses that branch.
pub fn validate(params: &ProblemParams) -> Result<ValidationReport> {
    for (field, value) in params.fields() {
        if !value.is_finite() {
            return Err(Error::NonFiniteInput { field });
        }
    }

    let mut report = ValidationReport::default();
    let p = params.p;

    if !(p > 1.0) {
        report.violations.push(Violation {
            condition: "p > 1",
            detail: format!("p = {p}"),
        });
        // Conditions below divide by p - 1; without p > 1 they are noise.
        return Ok(report);
    }
    if !(params.a <= 1.0) {
        report.violations.push(Violation {
            condition: "a <= 1",
            detail: format!("a = {}", params.a),
        });
    }
    let b_floor = (params.x / (p - 1.0)).max(0.0);
    if !(params.b >= b_floor) {
        report.violations.push(Violation {
            condition: "b >= max{0, x/(p-1)}",
            detail: format!("b = {}, floor = {}", params.b, b_floor),
        });
    }
    let equality_residual = params.y + p * params.a + 1.0;
    if equality_residual.abs() > EQUALITY_TOL {
        report.violations.push(Violation {
            condition: "y + p*a = -1",
            detail: format!("residual = {equality_residual:e}"),
        });
    }
    let w = params.z + params.c * p;
    if !(w > -1.0) {
        report.violations.push(Violation {
            condition: "z + c*p > -1",
            detail: format!("z + c*p = {w}"),
        });
    }
    if !(w >= params.c - 1.0) {
        report.violations.push(Violation {
            condition: "z + c*p >= c - 1",
            detail: format!("z + c*p = {}, c - 1 = {}", w, params.c - 1.0),
        });
    }
    if !(params.amplitude > 0.0) {
        report.violations.push(Violation {
            condition: "A > 0",
            detail: format!("A = {}", params.amplitude),
        });
    }
    if !(params.coupling > 0.0) {
        report.violations.push(Violation {
            condition: "B > 0",
            detail: format!("B = {}", params.coupling),
        });
    }
    if !(params.base_time > 1.0) {
        report.violations.push(Violation {
            condition: "R > 1",
            detail: format!("R = {}", params.base_time),
        });
    }

    if report.pass() {
        // Admissibility propagates to the iteration coefficients; these
        // hold by algebra whenever the conditions above do.
        debug_assert!(params.b - params.x / (p - 1.0) >= -1e-12);
        debug_assert!(params.c + (params.z + 1.0) / (p - 1.0) >= -1e-12);

        let theta = params.theta();
        if theta <= 0.0 {
            report.warnings.push(format!(
                "theta = {theta} <= 0: the lifespan bound formula branch degenerates \
                 and will be refused"
            ));
        }
    }

    Ok(report)
}

/// Iteration constant C = (1/B) * max{c + (z+1)/(p-1), c + (z+1)/p}.
///
/// C bounds the per-step amplitude loss of the iteration: the step factor
/// (1 + 2^j) * c_{j+1} never exceeds (2p)^{j+1} * B * C.
pub fn constant_c(params: &ProblemParams) -> Result<f64> {
    params.validated()?;
    let pm1 = params.p - 1.0;
    let lhs = params.c + (params.z + 1.0) / pm1;
    let rhs = params.c + (params.z + 1.0) / params.p;
    Ok(lhs.max(rhs) / params.coupling)
}

/// Lifespan constant D, assembled as
/// `2^(c + (p + (z+1)(p-1)) / (p-1)^2) * p^(p/(p-1)^2) * C^(1/(p-1))`.
///
/// Algebraically identical to the factored form
/// `2^(c + (z+1)/(p-1)) * (2p)^(p/(p-1)^2) * C^(1/(p-1))`; the blow-up
/// criterion in the frames module computes the factored form independently
/// and the two routes are checked against each other in tests.
pub fn constant_d(params: &ProblemParams) -> Result<f64> {
    let c_const = constant_c(params)?;
    let p = params.p;
    let pm1 = p - 1.0;
    let two_exp = params.c + (p + (params.z + 1.0) * pm1) / (pm1 * pm1);
    Ok(2f64.powf(two_exp) * p.powf(p / (pm1 * pm1)) * c_const.powf(1.0 / pm1))
}

/// Truncated infinite product R * prod_{k=1..K} (1 + 2^-k).
///
/// K is the smallest integer with 2^-K <= tol; the log-tail of the dropped
/// factors is below sum_{k>K} 2^-k = 2^-K, so the truncation is a certified
/// under-approximation within relative error `tol`.  The raw truncation is
/// returned (not a rounded limit value) so repeated calls with the same tol
/// are bit-identical.
pub fn r_infinity(base_time: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!(
            "r_infinity tol must be > 0, got {tol}"
        )));
    }
    if !(base_time > 0.0) || !base_time.is_finite() {
        return Err(Error::InvalidInput(format!(
            "r_infinity base time must be positive and finite, got {base_time}"
        )));
    }
    let levels = (-tol.log2()).ceil().max(1.0) as u32;
    let mut product = base_time;
    for k in 1..=levels {
        product *= 1.0 + (2f64).powi(-(k as i32));
    }
    Ok(product)
}

/// Computes all derived constants of a valid tuple in one pass.
pub fn derived_constants(params: &ProblemParams) -> Result<DerivedConstants> {
    let c_const = constant_c(params)?;
    let d_const = constant_d(params)?;
    let theta = params.theta();
    Ok(DerivedConstants {
        c_const,
        d_const,
        theta,
        r_infinity: r_infinity(params.base_time, R_INFINITY_TOL)?,
        lifespan_exponent: (params.p - 1.0) / theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn canonical(amplitude: f64, coupling: f64) -> ProblemParams {
        ProblemParams::glassey_tuple(2.0, amplitude, coupling, 2.0)
    }

    #[test]
    fn canonical_tuple_passes() {
        let report = validate(&canonical(100.0, 1.0)).unwrap();
        assert!(report.pass(), "violations: {:?}", report.violations);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn negative_b_fails_floor_condition() {
        let mut params = canonical(100.0, 1.0);
        params.b = -1.0;
        let report = validate(&params).unwrap();
        assert!(!report.pass());
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "b >= max{0, x/(p-1)}"));
    }

    #[test]
    fn broken_equality_constraint_fails() {
        let mut params = canonical(100.0, 1.0);
        params.y = -2.0; // y + p*a = 0, not -1
        let report = validate(&params).unwrap();
        assert!(!report.pass());
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "y + p*a = -1"));
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let mut params = canonical(100.0, 1.0);
        params.z = f64::NAN;
        assert!(matches!(
            validate(&params),
            Err(Error::NonFiniteInput { field: "z" })
        ));
    }

    #[test]
    fn theta_nonpositive_warns_without_failing() {
        // a=1, b=3, c=1, p=2 -> theta = x+z+1+(c-b) = -2+1+1-2 = -2
        let mut params = canonical(100.0, 1.0);
        params.b = 3.0;
        let report = validate(&params).unwrap();
        assert!(report.pass());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn constant_c_canonical() {
        assert_eq!(constant_c(&canonical(100.0, 1.0)).unwrap(), 3.0);
        assert_eq!(constant_c(&canonical(100.0, 3.0)).unwrap(), 1.0);
    }

    #[test]
    fn constant_c_equal_max_arguments() {
        // z = -1 makes both max arguments equal to c.
        let params = ProblemParams {
            a: 1.0,
            b: 0.0,
            c: 2.0,
            x: 0.0,
            y: -3.0,
            z: -1.0,
            p: 2.0,
            amplitude: 1.0,
            coupling: 1.0,
            base_time: 2.0,
        };
        assert!(validate(&params).unwrap().pass());
        assert_eq!(constant_c(&params).unwrap(), 2.0);
    }

    #[test]
    fn constant_d_canonical() {
        let d = constant_d(&canonical(100.0, 1.0)).unwrap();
        assert!((d - 384.0).abs() < 1e-9, "d = {d}");
        let d = constant_d(&canonical(100.0, 3.0)).unwrap();
        assert!((d - 128.0).abs() < 1e-9, "d = {d}");
    }

    #[test]
    fn r_infinity_matches_partial_product_oracle() {
        // Oracle: explicit partial product to K = 40.
        let mut oracle = 1.0;
        for k in 1..=40 {
            oracle *= 1.0 + (2f64).powi(-k);
        }
        let got = r_infinity(1.0, 1e-12).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-15);
        assert!(((got - 2.384231029031) / got).abs() < 1e-12);

        let scaled = r_infinity(2.0, 1e-12).unwrap();
        assert!(((scaled - 2.0 * got) / scaled).abs() < 1e-15);
    }

    #[test]
    fn r_infinity_truncation_is_monotone_in_tol() {
        let coarse = r_infinity(1.0, 0.5).unwrap();
        let fine = r_infinity(1.0, 1e-12).unwrap();
        assert!(coarse <= fine);
    }

    #[test]
    fn r_infinity_rejects_bad_tol() {
        assert!(r_infinity(2.0, 0.0).is_err());
        assert!(r_infinity(2.0, -1.0).is_err());
    }

    #[test]
    fn derived_constants_canonical() {
        let derived = derived_constants(&canonical(100.0, 1.0)).unwrap();
        assert!((derived.theta - 1.0).abs() < 1e-14);
        assert!((derived.lifespan_exponent - 1.0).abs() < 1e-14);
        assert!(derived.r_infinity > 2.0);
    }
}
