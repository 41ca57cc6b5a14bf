//! Welfare and rate measures evaluated on broadcast-time vectors.

use super::problem::BargainingProblem;

/// Generalized Nash product `prod_i (u_i(x_i) - u_i(x_d))^alpha_i` over the
/// bargaining set. Zero as soon as any gain is non-positive.
pub fn nash_product(problem: &BargainingProblem, x: &[f64]) -> f64 {
    let mut product = 1.0;
    for i in problem.active_indices() {
        let gain = problem.gain(i, x[i]);
        if gain <= 0.0 {
            return 0.0;
        }
        product *= gain.powf(problem.alpha(i));
    }
    product
}

/// `sum_i alpha_i * ln(u_i(x_i) - u_i(x_d))`; negative infinity when any gain
/// is non-positive.
pub fn log_nash_welfare(problem: &BargainingProblem, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in problem.active_indices() {
        let gain = problem.gain(i, x[i]);
        if gain <= 0.0 {
            return f64::NEG_INFINITY;
        }
        total += problem.alpha(i) * gain.ln();
    }
    total
}

/// Aggregate of weighted proportional utility changes when moving from the
/// GNBS point `gnbs` to `other`. Never positive for a feasible `other`.
pub fn wpf_aggregate(problem: &BargainingProblem, gnbs: &[f64], other: &[f64]) -> f64 {
    problem
        .active_indices()
        .map(|i| {
            let base = problem.gain(i, gnbs[i]);
            problem.alpha(i) * (problem.gain(i, other[i]) - base) / base
        })
        .sum()
}

/// Megabits/second of node `k`'s data received by the rest of the group.
pub fn dissemination_rate(problem: &BargainingProblem, x: &[f64], k: usize) -> f64 {
    problem.broadcast_rate() * x[k] / problem.airtime()
}
