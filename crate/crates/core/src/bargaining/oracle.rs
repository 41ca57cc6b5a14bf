//! Brute-force maximizer of the weighted Nash product.
//!
//! Shares nothing with the level-function solver: a coarse grid over all but
//! one active player (the last one absorbs the remaining budget), followed by
//! pairwise airtime exchanges with a shrinking step. Meant for checking the
//! solver on small instances, not for production use.

use super::problem::{Allocation, BargainingProblem};
use crate::{Error, Result};

/// Exchange steps stop once they fall below this fraction of the budget.
const FINAL_STEP_FRACTION: f64 = 1e-12;

fn objective(problem: &BargainingProblem, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in problem.active_indices() {
        let g = problem.gain(i, x[i]);
        if g.is_nan() || g <= 0.0 {
            return f64::NEG_INFINITY;
        }
        total += problem.alpha(i) * g.ln();
    }
    total
}

/// Maximizes the weighted Nash product by exhaustive search.
///
/// Comparisons of objective values limit the result to about `1e-7` relative
/// accuracy: near the optimum the objective is flat to second order.
///
/// `resolution` is the number of grid steps across the airtime budget per
/// coordinate; the grid has up to `(resolution + 1)^(n - 1)` points for `n`
/// active players, so keep it modest beyond four players.
pub fn oracle_allocate(problem: &BargainingProblem, resolution: usize) -> Result<Allocation> {
    if resolution == 0 {
        return Err(Error::InvalidProblem("oracle resolution must be at least 1".into()));
    }
    let n = problem.len();
    let active: Vec<usize> = problem.active_indices().collect();
    if !problem.is_contended() {
        let x = (0..n).map(|i| if problem.is_active(i) { problem.cap(i) } else { 0.0 }).collect();
        return Allocation::checked(problem, x);
    }

    // Interior starting point: every player the same fraction of the way
    // from its disagreement point to its cap.
    let floor: f64 = active.iter().map(|&i| problem.weight(i) * problem.player(i).disagreement_s).sum();
    let theta = (problem.airtime() - floor) / (problem.total_demand() - floor);
    let mut best = vec![0.0; n];
    for &i in &active {
        let d = problem.player(i).disagreement_s;
        best[i] = d + theta * (problem.cap(i) - d);
    }
    let mut best_value = objective(problem, &best);

    let step = problem.airtime() / resolution as f64;
    let (free, last) = active.split_at(active.len() - 1);
    let last = last[0];
    let mut x = vec![0.0; n];
    grid_search(problem, free, last, 0, 0.0, step, &mut x, &mut best, &mut best_value);

    refine(problem, &active, &mut best, step);
    Allocation::checked(problem, best)
}

#[allow(clippy::too_many_arguments)]
fn grid_search(
    problem: &BargainingProblem,
    free: &[usize],
    last: usize,
    depth: usize,
    used: f64,
    step: f64,
    x: &mut [f64],
    best: &mut Vec<f64>,
    best_value: &mut f64,
) {
    let budget = problem.airtime();
    if depth == free.len() {
        let rest = (budget - used) / problem.weight(last);
        if rest < 0.0 || rest > problem.cap(last) {
            return;
        }
        x[last] = rest;
        let v = objective(problem, x);
        if v > *best_value {
            *best_value = v;
            best.copy_from_slice(x);
        }
        return;
    }
    let i = free[depth];
    let w = problem.weight(i);
    let mut k = 0usize;
    loop {
        let xi = k as f64 * step;
        if xi > problem.cap(i) || used + w * xi > budget {
            break;
        }
        x[i] = xi;
        grid_search(problem, free, last, depth + 1, used + w * xi, step, x, best, best_value);
        k += 1;
    }
    x[i] = 0.0;
}

/// Moves airtime between pairs of players while that raises the objective,
/// halving the exchanged amount whenever no move helps.
fn refine(problem: &BargainingProblem, active: &[usize], x: &mut [f64], initial: f64) {
    let min_step = FINAL_STEP_FRACTION * problem.airtime();
    let mut value = objective(problem, x);
    let mut h = initial;
    while h >= min_step {
        let mut improved = false;
        for &i in active {
            for &j in active {
                if i == j {
                    continue;
                }
                // Airtime `amount` leaves j and goes to i.
                let amount = h
                    .min((problem.cap(i) - x[i]) * problem.weight(i))
                    .min(x[j] * problem.weight(j));
                if amount <= 0.0 {
                    continue;
                }
                let (old_i, old_j) = (x[i], x[j]);
                x[i] = (old_i + amount / problem.weight(i)).min(problem.cap(i));
                x[j] = (old_j - amount / problem.weight(j)).max(0.0);
                let v = objective(problem, x);
                if v > value {
                    value = v;
                    improved = true;
                } else {
                    x[i] = old_i;
                    x[j] = old_j;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargaining::{Player, Utility};

    #[test]
    fn two_linear_players_split_by_power() {
        // Uncapped linear utilities with beta = 0: x_i = alpha_i T.
        let players = vec![Player::group_owner(1, 110.0, 3.0), Player::client(2, 110.0, 11.0, 1.0)];
        let p = BargainingProblem::unicast_pair(players, 4.0, 11.0).unwrap();
        let a = oracle_allocate(&p, 40).unwrap();
        assert!((a.broadcast()[0] - 3.0).abs() < 1e-6);
        assert!((a.broadcast()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn binding_cap_goes_to_the_other_player() {
        let players = vec![Player::group_owner(1, 110.0, 1.0), Player::client(2, 11.0, 11.0, 3.0)];
        let p = BargainingProblem::new(players, 4.0, 11.0).unwrap();
        // Player 2 would like 3 * 4 / (4 * 2) = 1.5 s but is capped at 1 s.
        let a = oracle_allocate(&p, 40).unwrap();
        assert!((a.broadcast()[1] - 1.0).abs() < 1e-6);
        assert!((a.broadcast()[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn log_utility_stationarity() {
        let players = vec![
            Player::group_owner(1, 50.0, 1.0).with_utility(Utility::LogShifted { shift: 0.5 }),
            Player::client(2, 50.0, 11.0, 1.0).with_utility(Utility::LogShifted { shift: 0.5 }),
        ];
        let p = BargainingProblem::new(players, 3.0, 11.0).unwrap();
        let a = oracle_allocate(&p, 30).unwrap();
        // alpha_i u_i'/u_i / (1 + beta_i) must agree across players.
        let ratio = |i: usize| {
            let pl = p.player(i);
            let x = a.broadcast()[i];
            pl.alpha * pl.utility.derivative(x, p.cap(i)) / p.gain(i, x) / p.weight(i)
        };
        assert!((ratio(0) - ratio(1)).abs() < 1e-6 * ratio(0));
    }

    #[test]
    fn rejects_zero_resolution() {
        let players = vec![Player::group_owner(1, 10.0, 1.0), Player::client(2, 10.0, 11.0, 1.0)];
        let p = BargainingProblem::new(players, 1.0, 11.0).unwrap();
        assert!(oracle_allocate(&p, 0).is_err());
    }
}
