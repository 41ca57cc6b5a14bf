//! Reference allocators: equal broadcast slots (EQL) and slots proportional
//! to data load (WTD).

use super::problem::{Allocation, BargainingProblem};
use crate::numeric::bisect_increasing;
use crate::{Error, Result};

fn saturated(problem: &BargainingProblem) -> Allocation {
    let x = (0..problem.len())
        .map(|i| if problem.is_active(i) { problem.cap(i) } else { 0.0 })
        .collect();
    Allocation::from_parts(problem, x, true)
}

/// Equal broadcast time for everyone, with the surplus of capped players
/// shared equally among the rest until no further cap binds.
pub fn eql_allocate(problem: &BargainingProblem) -> Allocation {
    if !problem.is_contended() {
        return saturated(problem);
    }
    let mut capped = vec![false; problem.len()];
    let share = loop {
        let reserved: f64 = problem
            .active_indices()
            .filter(|&i| capped[i])
            .map(|i| problem.weight(i) * problem.cap(i))
            .sum();
        let open: f64 = problem
            .active_indices()
            .filter(|&i| !capped[i])
            .map(|i| problem.weight(i))
            .sum();
        let share = (problem.airtime() - reserved) / open;
        let mut changed = false;
        for i in problem.active_indices() {
            if !capped[i] && problem.cap(i) <= share {
                capped[i] = true;
                changed = true;
            }
        }
        if !changed {
            break share;
        }
    };
    let x = (0..problem.len())
        .map(|i| if problem.is_active(i) { problem.cap(i).min(share) } else { 0.0 })
        .collect();
    Allocation::from_parts(problem, x, false)
}

/// Broadcast time proportional to each player's data load.
pub fn wtd_allocate(problem: &BargainingProblem) -> Allocation {
    let loads: Vec<f64> = problem.players().iter().map(|p| p.data_mb).collect();
    proportional_allocate(problem, &loads).expect("data loads are valid weights")
}

/// `x_i = min(b_i, c * w_i)` with `c` chosen so the airtime budget is met.
///
/// Used for WTD (weights = loads) and for drawing feasible points.
pub fn proportional_allocate(problem: &BargainingProblem, weights: &[f64]) -> Result<Allocation> {
    if weights.len() != problem.len() || weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::DegenerateAllocation("weights must be finite and non-negative, one per player".into()));
    }
    if !problem.is_contended() {
        return Ok(saturated(problem));
    }
    let active: Vec<usize> = problem.active_indices().filter(|&i| weights[i] > 0.0).collect();
    if active.is_empty() {
        return Err(Error::DegenerateAllocation("no active player has positive weight".into()));
    }
    let airtime_at = |c: f64| -> f64 {
        active
            .iter()
            .map(|&i| problem.weight(i) * problem.cap(i).min(c * weights[i]))
            .sum()
    };
    let c_max = active
        .iter()
        .map(|&i| problem.cap(i) / weights[i])
        .fold(0.0, f64::max);
    if airtime_at(c_max) < problem.airtime() {
        return Err(Error::DegenerateAllocation(
            "players with zero weight hold the demand needed to fill the budget".into(),
        ));
    }
    let c = bisect_increasing(airtime_at, 0.0, c_max, problem.airtime(), 1e-13 * problem.airtime().max(1.0));

    // Re-solve the linear piece containing `c` so the budget holds exactly.
    let (reserved, open) = active.iter().fold((0.0, 0.0), |(r, o), &i| {
        if c * weights[i] >= problem.cap(i) {
            (r + problem.weight(i) * problem.cap(i), o)
        } else {
            (r, o + problem.weight(i) * weights[i])
        }
    });
    let c = if open > 0.0 { (problem.airtime() - reserved) / open } else { c };

    let mut x = vec![0.0; problem.len()];
    for &i in &active {
        x[i] = problem.cap(i).min(c * weights[i]);
    }
    Ok(Allocation::from_parts(problem, x, false))
}
