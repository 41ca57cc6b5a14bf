use super::problem::{Allocation, BargainingProblem};

/// Residuals of the reduced optimality system for a candidate allocation.
///
/// With `g_i = 1 / L_i(x_i)` the conditions are `multiplier <= g_i`,
/// `(g_i - multiplier) * (x_i - b_i) = 0` and the airtime budget.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// The budget multiplier (`lambda`), one over the common water level.
    pub multiplier: f64,
    /// `|g_i - multiplier|` for players strictly below their cap, else 0.
    pub stationarity: Vec<f64>,
    /// Worst dual-feasibility or complementary-slackness violation.
    pub slackness: f64,
    /// Distance of the used airtime from the budget (or from the total
    /// demand for a saturated allocation).
    pub budget: f64,
    pub max_residual: f64,
}

/// Evaluates the optimality residuals of `allocation` under `multiplier`.
pub fn kkt_residuals(problem: &BargainingProblem, allocation: &Allocation, multiplier: f64) -> KktReport {
    let x = allocation.broadcast();
    let mut stationarity = vec![0.0; problem.len()];
    let mut slackness: f64 = 0.0;

    for i in problem.active_indices() {
        let cap = problem.cap(i);
        let xi = x[i];
        if xi <= problem.player(i).disagreement_s {
            stationarity[i] = f64::INFINITY;
            continue;
        }
        let inv_level = 1.0 / problem.level(i, xi.min(cap)).unwrap_or(f64::NAN);
        let at_cap = xi >= cap - 1e-9 * cap.max(1.0);
        slackness = slackness
            .max((multiplier - inv_level).max(0.0))
            .max(((inv_level - multiplier) * (xi - cap)).abs());
        if !at_cap {
            stationarity[i] = (inv_level - multiplier).abs();
        }
    }

    let used: f64 = (0..problem.len()).map(|i| problem.weight(i) * x[i]).sum();
    let target = if allocation.is_saturated() {
        problem.total_demand()
    } else {
        problem.airtime()
    };
    let budget = (used - target).abs();
    let max_residual = stationarity
        .iter()
        .copied()
        .fold(slackness.max(budget), f64::max);

    KktReport {
        multiplier,
        stationarity,
        slackness,
        budget,
        max_residual,
    }
}
