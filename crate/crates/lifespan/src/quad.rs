//! Quadrature for the doubly iterated, endpoint-singular integrals
//!
//! ```text
//! J(t) = int_R^t ds int_R^s r^y * (log(r/R))^z * phi(r)^p dr.
//! ```
//!
//! All marching happens on a uniform grid in sigma = log(t/R): every
//! estimate of the system lives in powers of log t, and blow-up horizons
//! like e^12 stay reachable with ~10^4 nodes.  In sigma-coordinates, with
//! r = R e^u, the inner integrand becomes
//!
//! ```text
//! g(u) = (R e^u)^(y+1) * u^z * phi(R e^u)^p,
//! ```
//!
//! which is smooth away from u = 0.  The u = 0 endpoint carries the
//! singular weight u^(z + p*c_loc); the admissibility condition
//! z + c*p > -1 makes it integrable and the first grid cell is integrated
//! by a closed form around a local power model instead of the trapezoid.
//!
//! The independent oracle swaps the order of integration,
//! `J(t) = int_R^t (t - r) r^y (log(r/R))^z phi(r)^p dr`, and integrates
//! that single weighted integral over geometrically graded cells with
//! Gauss-Legendre panels — a deliberately different route from the
//! marching accumulators it is used to check.

use crate::error::{Error, Result};

/// Uniform grid in sigma = log(t/R).
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    /// Base time R; node k sits at t_k = R * exp(k*h).
    pub base_time: f64,
    /// Step h in sigma.
    pub step: f64,
    /// Node count (node 0 is sigma = 0).
    pub nodes: usize,
}

impl LogGrid {
    pub fn new(base_time: f64, step: f64, nodes: usize) -> Result<Self> {
        if !(base_time >= 1.0) || !base_time.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid base time must be >= 1, got {base_time}"
            )));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid step must be > 0, got {step}"
            )));
        }
        if nodes < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 nodes, got {nodes}"
            )));
        }
        Ok(Self {
            base_time,
            step,
            nodes,
        })
    }

    /// Grid covering sigma in [0, sigma_max] at step `step`.
    pub fn from_horizon(base_time: f64, step: f64, sigma_max: f64) -> Result<Self> {
        if !(sigma_max > 0.0) || !sigma_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "horizon must be > 0, got {sigma_max}"
            )));
        }
        let nodes = (sigma_max / step).ceil() as usize + 1;
        Self::new(base_time, step, nodes)
    }

    #[inline]
    pub fn sigma(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.base_time * self.sigma(k).exp()
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }
}

/// Local behaviour of phi near the base time: phi(r) ~ kappa * (log(r/R))^c_loc.
///
/// For the equality dynamics the forcing dominates near r = R, so
/// kappa = A R^a (log R)^(-b) and c_loc = c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalModel {
    pub kappa: f64,
    pub c_loc: f64,
}

/// Running accumulators of one march.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MarchState {
    /// I_k ~ int_R^{t_k} r^y (log(r/R))^z phi^p dr.
    pub inner: f64,
    /// J_k ~ int_R^{t_k} I(s) ds.
    pub outer: f64,
}

/// Inner-integrand weight at node k: t_k^(y+1) * sigma_k^z.
///
/// Node 0 is only meaningful for z >= 0; the first cell never samples it.
#[inline]
pub fn inner_weight(grid: &LogGrid, y: f64, z: f64, k: usize) -> f64 {
    let sigma = grid.sigma(k);
    let base = grid.time(k).powf(y + 1.0);
    if z == 0.0 {
        base
    } else {
        base * sigma.powf(z)
    }
}

/// Closed-form integral of the first cell [0, h]:
///
/// ```text
/// int_0^h R^(y+1) e^((y+1)u) u^(z + p*c_loc) kappa^p du
///   ~ kappa^p R^(y+1) e^((y+1)h/2) h^(z + p*c_loc + 1) / (z + p*c_loc + 1),
/// ```
///
/// with the slowly varying exponential frozen at the cell midpoint.  The
/// frozen factor trades an O(h) relative error inside an O(h^(z+pc+1))
/// cell.
pub fn first_cell(grid: &LogGrid, y: f64, z: f64, p: f64, model: &LocalModel) -> Result<f64> {
    let exponent = z + p * model.c_loc;
    if exponent <= -1.0 {
        return Err(Error::Singularity { exponent });
    }
    if !(model.kappa >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "local model amplitude must be >= 0, got {}",
            model.kappa
        )));
    }
    if model.kappa == 0.0 {
        return Ok(0.0);
    }
    let h = grid.step;
    Ok(model.kappa.powf(p)
        * grid.base_time.powf(y + 1.0)
        * ((y + 1.0) * h / 2.0).exp()
        * h.powf(exponent + 1.0)
        / (exponent + 1.0))
}

/// First cell of the outer accumulator, using the local power model
/// I(v) ~ I_1 (v/h)^(alpha+1) and the midpoint-frozen time jacobian.
pub fn first_cell_outer(
    grid: &LogGrid,
    z: f64,
    p: f64,
    model: &LocalModel,
    inner_first: f64,
) -> f64 {
    let alpha = z + p * model.c_loc;
    grid.base_time * (grid.step / 2.0).exp() * inner_first * grid.step / (alpha + 2.0)
}

/// Advances the accumulators across the cell [t_{k-1}, t_k].
///
/// `phi` holds nonnegative samples of |H| at nodes 0..=k.  The cell uses
/// the trapezoid rule in sigma on the full integrand; the first cell
/// (k = 1) uses the singular closed form instead.
#[allow(clippy::too_many_arguments)]
pub fn march_step(
    state: &MarchState,
    grid: &LogGrid,
    k: usize,
    phi: &[f64],
    y: f64,
    z: f64,
    p: f64,
    model: &LocalModel,
) -> Result<MarchState> {
    if k == 0 || k >= grid.len() {
        return Err(Error::InvalidInput(format!(
            "march step index {k} outside 1..{}",
            grid.len()
        )));
    }
    if phi.len() <= k {
        return Err(Error::InvalidInput(format!(
            "march step {k} needs phi at nodes 0..={k}, got {}",
            phi.len()
        )));
    }
    // Sequential marching revalidates each node exactly once: the cell
    // endpoints here, earlier nodes at earlier steps.
    for node in [k - 1, k] {
        let value = phi[node];
        if !value.is_finite() {
            return Err(Error::NumericalFailure {
                node,
                time: grid.time(node),
                detail: format!("non-finite phi sample {value}"),
            });
        }
        if value < 0.0 {
            return Err(Error::InvalidInput(format!(
                "phi must be nonnegative (the system uses |H|^p); node {node} has {value}"
            )));
        }
    }

    let h = grid.step;
    let inner_cell = if k == 1 {
        first_cell(grid, y, z, p, model)?
    } else {
        let left = inner_weight(grid, y, z, k - 1) * phi[k - 1].powf(p);
        let right = inner_weight(grid, y, z, k) * phi[k].powf(p);
        0.5 * h * (left + right)
    };
    let inner = state.inner + inner_cell;

    let outer_cell = if k == 1 {
        first_cell_outer(grid, z, p, model, inner)
    } else {
        0.5 * h * (grid.time(k - 1) * state.inner + grid.time(k) * inner)
    };

    Ok(MarchState {
        inner,
        outer: state.outer + outer_cell,
    })
}

/// Runs the march over the whole grid for a phi known at every node.
///
/// Returns the accumulator values at each node; entry k approximates the
/// inner and outer integrals at t_k.
pub fn march(
    grid: &LogGrid,
    phi: &[f64],
    y: f64,
    z: f64,
    p: f64,
    model: &LocalModel,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if phi.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "phi has {} samples for a grid of {} nodes",
            phi.len(),
            grid.len()
        )));
    }
    let mut inner = Vec::with_capacity(grid.len());
    let mut outer = Vec::with_capacity(grid.len());
    let mut state = MarchState::default();
    inner.push(0.0);
    outer.push(0.0);
    for k in 1..grid.len() {
        state = march_step(&state, grid, k, phi, y, z, p, model)?;
        inner.push(state.inner);
        outer.push(state.outer);
    }
    Ok((inner, outer))
}

/// Result of the slow reference evaluation.
#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub value: f64,
    /// Estimated absolute error (difference of the last two refinement
    /// levels; conservative for the Gauss panels used).
    pub error_estimate: f64,
    /// Integrand evaluations spent.
    pub evaluations: usize,
}

// 8-point Gauss-Legendre rule on [-1, 1].
const GL8_NODES: [f64; 4] = [
    0.1834346424956498,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975362,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362683783378362,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// Independent evaluation of the double integral by order swap:
///
/// ```text
/// J(t) = int_{support_start}^t (t - r) r^y (log(r/R))^z phi(r)^p dr,
/// ```
///
/// integrated in sigma-coordinates over cells graded geometrically toward
/// the support start (where the integrand is singular or loses
/// smoothness), 8-point Gauss-Legendre per subcell, refined `levels`
/// times with the refinement differences as error estimates.
///
/// `min_points` is the integrand-evaluation floor of the coarsest level;
/// callers checking a march pass at least 10x the march node count.
/// Refinement differences must not grow; if they do, the refinement is
/// not converging and an oracle failure is reported rather than a value.
#[allow(clippy::too_many_arguments)]
pub fn double_integral_oracle(
    t: f64,
    phi: &dyn Fn(f64) -> f64,
    y: f64,
    z: f64,
    p: f64,
    base_time: f64,
    support_start: f64,
    min_points: usize,
    levels: usize,
) -> Result<OracleResult> {
    if !(t > base_time) {
        return Err(Error::Domain(format!(
            "oracle needs t > R = {base_time}, got t = {t}"
        )));
    }
    if !(support_start >= base_time) || !(support_start < t) {
        return Err(Error::InvalidInput(format!(
            "support start {support_start} must lie in [R, t) = [{base_time}, {t})"
        )));
    }
    if levels < 2 {
        return Err(Error::InvalidInput(format!(
            "oracle needs at least 2 refinement levels, got {levels}"
        )));
    }

    let sigma_end = (t / base_time).ln();
    let shift = (support_start / base_time).ln();
    let length = sigma_end - shift;
    let mut evaluations = 0usize;

    // Integrand in the shifted variable v = sigma - shift.
    let mut eval = |v: f64| -> Result<f64> {
        let u = shift + v;
        let r = base_time * u.exp();
        let sample = phi(r);
        if !sample.is_finite() || sample < 0.0 {
            return Err(Error::OracleFailure(format!(
                "phi({r}) = {sample} is not a finite nonnegative value"
            )));
        }
        evaluations += 1;
        let weight = if u > 0.0 {
            u.powf(z)
        } else if z == 0.0 {
            1.0
        } else {
            0.0
        };
        Ok(r.powf(y + 1.0) * weight * sample.powf(p) * (t - r))
    };

    let subcell_target = min_points.max(64).div_ceil(8);
    let mut value = 0.0_f64;
    let mut prev_diff = f64::INFINITY;
    let mut error_estimate = f64::INFINITY;

    for level in 0..levels {
        let graded_cells = 32 + 4 * level;
        let subcells = subcell_target << level;

        // Cell boundaries: [0, L*2^-G], then geometric doubling up to [L/2, L].
        let mut total = 0.0_f64;
        let mut lo = 0.0_f64;
        for i in 0..=graded_cells {
            let hi = length * (2f64).powi(i as i32 - graded_cells as i32);
            let width = hi - lo;
            let pieces = ((subcells as f64) * width / length).round().max(1.0) as usize;
            let piece_width = width / pieces as f64;
            for piece in 0..pieces {
                let a = lo + piece as f64 * piece_width;
                let mid = a + 0.5 * piece_width;
                let half = 0.5 * piece_width;
                let mut acc = 0.0;
                for q in 0..4 {
                    acc += GL8_WEIGHTS[q]
                        * (eval(mid - half * GL8_NODES[q])? + eval(mid + half * GL8_NODES[q])?);
                }
                total += acc * half;
            }
            lo = hi;
        }

        if level > 0 {
            let diff = (total - value).abs();
            let floor = 1e-14 * total.abs();
            if diff <= floor {
                return Ok(OracleResult {
                    value: total,
                    error_estimate: diff,
                    evaluations,
                });
            }
            if diff > prev_diff * 1.25 {
                return Err(Error::OracleFailure(format!(
                    "refinement differences grew from {prev_diff:e} to {diff:e} at level {level}"
                )));
            }
            prev_diff = diff;
            error_estimate = diff;
        }
        value = total;
    }

    Ok(OracleResult {
        value,
        error_estimate,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FLAT: LocalModel = LocalModel {
        kappa: 1.0,
        c_loc: 0.0,
    };

    fn rel(lhs: f64, rhs: f64) -> f64 {
        (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
    }

    /// Case 1: y=-1, z=0, phi=1, R=1 -> I(t)=log t, J(t)=t log t - t + 1.
    fn case1(grid_step: f64, sigma_end: f64) -> (LogGrid, Vec<f64>) {
        let grid = LogGrid::from_horizon(1.0, grid_step, sigma_end).unwrap();
        let phi = vec![1.0; grid.len()];
        (grid, phi)
    }

    #[test]
    fn gauss_legendre_rule_is_exact_on_polynomials() {
        // Degree-15 exactness validates the transcribed nodes and weights.
        for degree in 0..=15u32 {
            let mut acc = 0.0;
            for q in 0..4 {
                acc += GL8_WEIGHTS[q]
                    * ((-GL8_NODES[q]).powi(degree as i32) + GL8_NODES[q].powi(degree as i32));
            }
            let exact = if degree % 2 == 0 {
                2.0 / (degree as f64 + 1.0)
            } else {
                0.0
            };
            assert!(
                (acc - exact).abs() < 2e-15,
                "degree {degree}: {acc} vs {exact}"
            );
        }
    }

    #[test]
    fn zero_phi_marches_to_zero() {
        let grid = LogGrid::from_horizon(2.0, 1e-2, 1.0).unwrap();
        let phi = vec![0.0; grid.len()];
        let model = LocalModel {
            kappa: 0.0,
            c_loc: 1.0,
        };
        let (inner, outer) = march(&grid, &phi, -3.0, 1.0, 2.0, &model).unwrap();
        assert!(inner.iter().all(|&v| v == 0.0));
        assert!(outer.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negative_phi_is_rejected() {
        let grid = LogGrid::from_horizon(2.0, 1e-2, 1.0).unwrap();
        let mut phi = vec![1.0; grid.len()];
        phi[3] = -0.5;
        assert!(march(&grid, &phi, -3.0, 1.0, 2.0, &FLAT).is_err());
    }

    #[test]
    fn closed_form_case_log_weight_zero() {
        // I(e) = 1 and J(e) = 1 at h = 1e-3, relative error <= 1e-6.
        let (grid, phi) = case1(1e-3, 1.0);
        let (inner, outer) = march(&grid, &phi, -1.0, 0.0, 2.0, &FLAT).unwrap();
        let k = grid.len() - 1;
        assert!(rel(inner[k], 1.0) <= 1e-6, "I = {}", inner[k]);
        assert!(rel(outer[k], 1.0) <= 1e-6, "J = {}", outer[k]);
    }

    #[test]
    fn closed_form_case_log_weight_one() {
        // I(e^2) = 2 and J(e^2) = e^2 - 1 at h = 1e-3.
        let grid = LogGrid::from_horizon(1.0, 1e-3, 2.0).unwrap();
        let phi = vec![1.0; grid.len()];
        let (inner, outer) = march(&grid, &phi, -1.0, 1.0, 2.0, &FLAT).unwrap();
        let k = grid.len() - 1;
        let exact_outer = 2f64.exp() - 1.0;
        assert!(rel(inner[k], 2.0) <= 1e-6, "I = {}", inner[k]);
        assert!(rel(outer[k], exact_outer) <= 1e-6, "J = {}", outer[k]);
    }

    #[test]
    fn trapezoid_error_drops_fourfold_on_halving() {
        // The outer integral of case 1 carries genuine O(h^2) error.
        let exact = 1.0;
        let mut errors = Vec::new();
        for &h in &[2e-3, 1e-3, 5e-4] {
            let (grid, phi) = case1(h, 1.0);
            let (_, outer) = march(&grid, &phi, -1.0, 0.0, 2.0, &FLAT).unwrap();
            errors.push((outer[grid.len() - 1] - exact).abs());
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (3.0..5.0).contains(&ratio),
                "ratio {ratio}, errors {errors:?}"
            );
        }
    }

    #[test]
    fn first_cell_flat_case_is_exact() {
        let grid = LogGrid::new(1.0, 1e-3, 8).unwrap();
        let cell = first_cell(&grid, -1.0, 0.0, 2.0, &FLAT).unwrap();
        assert_eq!(cell, 1e-3);
    }

    #[test]
    fn first_cell_zero_amplitude() {
        let grid = LogGrid::new(2.0, 1e-3, 8).unwrap();
        let model = LocalModel {
            kappa: 0.0,
            c_loc: 1.0,
        };
        assert_eq!(first_cell(&grid, -3.0, 1.0, 2.0, &model).unwrap(), 0.0);
    }

    #[test]
    fn first_cell_power_law_scaling() {
        // Exponent z + p*c_loc = 3: the cell scales like h^4, so halving h
        // divides it by 16 up to the frozen-factor drift e^((y+1)h/4).
        let model = LocalModel {
            kappa: 1.0,
            c_loc: 1.0,
        };
        let coarse =
            first_cell(&LogGrid::new(2.0, 1e-3, 8).unwrap(), -3.0, 1.0, 2.0, &model).unwrap();
        let fine =
            first_cell(&LogGrid::new(2.0, 5e-4, 8).unwrap(), -3.0, 1.0, 2.0, &model).unwrap();
        let ratio = coarse / fine;
        assert!((ratio / 16.0 - 1.0).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn first_cell_consistent_with_analytic_cell_value() {
        // Against the true cell integral (computed by fine midpoint
        // quadrature) the frozen-factor error shrinks like O(h).
        let model = LocalModel {
            kappa: 2.0,
            c_loc: 1.0,
        };
        let (y, z, p, base) = (-3.0, 1.0, 2.0, 2.0);
        let mut deviations = Vec::new();
        for &h in &[1e-2, 1e-3, 1e-4] {
            let grid = LogGrid::new(base, h, 8).unwrap();
            let cell = first_cell(&grid, y, z, p, &model).unwrap();
            let n = 20_000;
            let mut exact = 0.0;
            for i in 0..n {
                let u = (i as f64 + 0.5) * h / n as f64;
                exact += base.powf(y + 1.0)
                    * ((y + 1.0) * u).exp()
                    * u.powf(z + p * model.c_loc)
                    * model.kappa.powf(p);
            }
            exact *= h / n as f64;
            deviations.push((cell / exact - 1.0).abs());
        }
        for pair in deviations.windows(2) {
            assert!(
                pair[1] < pair[0],
                "deviations not shrinking: {deviations:?}"
            );
        }
        assert!(deviations.last().unwrap() < &1e-4);
    }

    #[test]
    fn first_cell_detects_nonintegrable_singularity() {
        let grid = LogGrid::new(2.0, 1e-3, 8).unwrap();
        let model = LocalModel {
            kappa: 1.0,
            c_loc: 0.0,
        };
        assert!(matches!(
            first_cell(&grid, -3.0, -1.5, 2.0, &model),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn oracle_reproduces_closed_forms() {
        let one = |_: f64| 1.0;
        let at_e =
            double_integral_oracle(1f64.exp(), &one, -1.0, 0.0, 2.0, 1.0, 1.0, 10_000, 3).unwrap();
        assert!(rel(at_e.value, 1.0) <= 1e-8, "J(e) = {}", at_e.value);
        assert!(at_e.evaluations >= 10_000);

        let t2 = 2f64.exp();
        let at_e2 = double_integral_oracle(t2, &one, -1.0, 1.0, 2.0, 1.0, 1.0, 10_000, 3).unwrap();
        assert!(
            rel(at_e2.value, t2 - 1.0) <= 1e-8,
            "J(e^2) = {}",
            at_e2.value
        );
    }

    #[test]
    fn oracle_matches_march_within_march_error() {
        let (grid, phi) = case1(1e-3, 1.0);
        let (_, outer) = march(&grid, &phi, -1.0, 0.0, 2.0, &FLAT).unwrap();
        let oracle = double_integral_oracle(
            1f64.exp(),
            &|_| 1.0,
            -1.0,
            0.0,
            2.0,
            1.0,
            1.0,
            10 * grid.len(),
            3,
        )
        .unwrap();
        assert!(rel(outer[grid.len() - 1], oracle.value) <= 1.1e-6);
    }

    #[test]
    fn oracle_matches_march_on_a_singular_integrand() {
        // phi shaped like the forcing A t (log(t/R)): the first cell
        // carries the genuine u^(z + p*c_loc) singularity (exponent 3),
        // unlike the flat calibration cases.
        let (amplitude, base) = (100.0, 2.0);
        let (y, z, p) = (-3.0, 1.0, 2.0);
        let shape = move |r: f64| amplitude * r * (r / base).ln();
        let grid = LogGrid::from_horizon(base, 1e-3, 1.5).unwrap();
        let phi: Vec<f64> = (0..grid.len()).map(|k| shape(grid.time(k))).collect();
        let model = LocalModel { kappa: amplitude * base, c_loc: 1.0 };
        let (_, outer) = march(&grid, &phi, y, z, p, &model).unwrap();

        let t_end = grid.time(grid.len() - 1);
        let oracle = double_integral_oracle(
            t_end,
            &shape,
            y,
            z,
            p,
            base,
            base,
            10 * grid.len(),
            3,
        )
        .unwrap();
        assert!(oracle.error_estimate < 1e-10 * oracle.value);
        let deviation = rel(outer[grid.len() - 1], oracle.value);
        assert!(deviation <= 1e-5, "march vs oracle deviation {deviation:e}");
    }

    #[test]
    fn oracle_zero_integrand() {
        let zero = |_: f64| 0.0;
        let got = double_integral_oracle(10.0, &zero, -3.0, 1.0, 2.0, 2.0, 2.0, 1000, 3).unwrap();
        assert_eq!(got.value, 0.0);
        assert_eq!(got.error_estimate, 0.0);
    }

    #[test]
    fn oracle_monotone_in_horizon() {
        let bump = |r: f64| (r - 2.0).clamp(0.0, 1.0);
        let lo = double_integral_oracle(5.0, &bump, -3.0, 1.0, 2.0, 2.0, 2.0, 2000, 3).unwrap();
        let hi = double_integral_oracle(8.0, &bump, -3.0, 1.0, 2.0, 2.0, 2.0, 2000, 3).unwrap();
        assert!(hi.value > lo.value);
    }

    #[test]
    fn oracle_rejects_bad_domain() {
        let one = |_: f64| 1.0;
        assert!(double_integral_oracle(1.5, &one, -3.0, 1.0, 2.0, 2.0, 2.0, 100, 3).is_err());
        assert!(double_integral_oracle(5.0, &one, -3.0, 1.0, 2.0, 2.0, 6.0, 100, 3).is_err());
        assert!(double_integral_oracle(5.0, &one, -3.0, 1.0, 2.0, 2.0, 2.0, 100, 1).is_err());
    }

    proptest! {
        #[test]
        fn accumulators_are_monotone_for_nonnegative_phi(
            seed_values in proptest::collection::vec(0.0f64..5.0, 32),
            z in 0.0f64..2.0,
        ) {
            let grid = LogGrid::new(2.0, 0.05, 32).unwrap();
            let model = LocalModel { kappa: seed_values[0].max(0.1), c_loc: 0.5 };
            let (inner, outer) = march(&grid, &seed_values, -3.0, z, 2.0, &model).unwrap();
            for pair in inner.windows(2) {
                prop_assert!(pair[1] >= pair[0]);
            }
            for pair in outer.windows(2) {
                prop_assert!(pair[1] >= pair[0]);
            }
        }
    }
}
