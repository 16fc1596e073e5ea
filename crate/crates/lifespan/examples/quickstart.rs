//! Minimal tour: compute the lifespan bound for the canonical tuple,
//! march the equality dynamics until blow-up, and compare the two.
//!
//! Run with `cargo run --release --example quickstart`.

use lifespan::volterra::{solve, SolveSpec, DEFAULT_STEP};
use lifespan::{bound, IndexMode, ProblemParams};

fn main() -> lifespan::Result<()> {
    let params = ProblemParams::glassey_tuple(2.0, 100.0, 1.0, 2.0);

    let theorem = bound(&params, IndexMode::AsPrinted)?;
    println!(
        "bound: log T <= {:.6} ({} branch, D = {})",
        theorem.log_t_bound,
        theorem.branch.label(),
        theorem.d_const
    );

    let spec = SolveSpec::for_params(&params, IndexMode::AsPrinted, DEFAULT_STEP)?;
    let solution = solve(&params, &spec)?;
    match solution.t_num() {
        Some(t_num) => println!(
            "equality dynamics blew up at t = {:.6} (log t = {:.6}, margin {:.6})",
            t_num,
            t_num.ln(),
            theorem.log_t_bound - t_num.ln()
        ),
        None => println!("no blow-up before the horizon"),
    }
    Ok(())
}
