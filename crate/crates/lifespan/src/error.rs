use thiserror::Error;

/// Crate-wide error type.
///
/// The CLI maps these onto exit codes: input/validation problems exit 1,
/// numerical failures (solver non-finite, oracle non-convergence) exit 2.
/// A bound-consistency violation is not an `Error` — it is a computed
/// result that the CLI turns into exit 3.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-finite input in field `{field}`")]
    NonFiniteInput { field: &'static str },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular kernel not integrable: z + p*c_loc = {exponent} <= -1")]
    Singularity { exponent: f64 },

    #[error("degenerate lifespan exponent: theta = {theta} <= 0, bound formula does not apply")]
    DegenerateExponent { theta: f64 },

    #[error("solve spec error: {0}")]
    SpecError(String),

    #[error("numerical failure at node {node} (t = {time}): {detail}")]
    NumericalFailure {
        node: usize,
        time: f64,
        detail: String,
    },

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("fit error: {0}")]
    FitError(String),

    #[error(
        "mode mismatch: frame uses {frame_mode} but solution was produced under {solution_mode}"
    )]
    ModeMismatch {
        frame_mode: &'static str,
        solution_mode: &'static str,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
