//! Numerical machinery for a family of log-weighted Volterra integral
//! inequality systems with finite-time blow-up.
//!
//! The system couples a power-and-log forcing lower bound with a doubly
//! iterated integral feedback:
//!
//! ```text
//! H(t) >= A t^a (log t)^(-b) (log(t/R))^c
//! H(t) >= B (log t)^x int_R^t ds int_R^s r^y (log(r/R))^z |H(r)|^p dr
//! ```
//!
//! for t in [R, T) with R > 1.  Under the admissibility conditions on the
//! exponents, every continuous solution blows up before an explicit bound,
//! and this crate computes that bound, runs the slicing-iteration frames
//! behind it, solves the equality dynamics numerically to watch the
//! blow-up happen, and audits each inequality of the chain against slow
//! quadrature oracles.
//!
//! Modules:
//! - [`params`]: exponent validation and the derived constants C, D, R_inf.
//! - [`frames`]: the iteration frames, exact recursion and closed forms,
//!   with amplitudes kept in log space.
//! - [`quad`]: the sigma = log(t/R) marching quadrature and the
//!   independent double-integral oracle.
//! - [`volterra`]: the equality-dynamics solver and blow-up detection.
//! - [`audit`]: numerical verification of the inequality chain.
//! - [`mod@bound`]: the lifespan bound, its branches, and the small-amplitude
//!   translation.
//! - [`sweep`]: amplitude sweeps with bound-consistency margins and the
//!   scaling fit.

// Guards are written `!(x > 0.0)` rather than `x <= 0.0` so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod bound;
pub mod cli;
pub mod error;
pub mod frames;
pub mod params;
pub mod quad;
pub mod sweep;
pub mod volterra;

pub use bound::{bound, critical_time_identity, glassey_bound, Branch, LifespanBound};
pub use error::{Error, Result};
pub use frames::{advance, closed_form, eval_log, initial_frame, q_value, Frame, IndexMode};
pub use params::{derived_constants, r_infinity, validate, DerivedConstants, ProblemParams};
pub use quad::{double_integral_oracle, LocalModel, LogGrid};
pub use sweep::{run_sweep, scaling_fit, SweepRecord};
pub use volterra::{blowup_time, solve, Solution, SolveSpec, SolveStatus};
