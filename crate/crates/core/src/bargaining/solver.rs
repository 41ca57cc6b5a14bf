//! The exact GNBS allocator.
//!
//! At the optimum every player either receives its cap or sits on a common
//! "water level" `s = 1/lambda`, where its level function
//! `L_i(x) = (1+beta_i)/alpha_i * (u_i(x) - u_i(x_d)) / u_i'(x)`
//! equals `s`. Players are visited in ascending order of `L_i(b_i)`; each one
//! either saturates or fixes the level shared by everyone after it.

use super::kkt::{kkt_residuals, KktReport};
use super::problem::{Allocation, BargainingProblem};
use crate::numeric::bisect_increasing;
use crate::{Error, Result};

/// Relative residual targeted by the internal inversions.
const INVERSION_TOL: f64 = 1e-12;

impl BargainingProblem {
    fn level_unchecked(&self, i: usize, x: f64) -> f64 {
        let p = self.player(i);
        let cap = self.cap(i);
        self.weight(i) / p.alpha * self.gain(i, x) / p.utility.derivative(x, cap)
    }

    /// The level function `L_i(x)`, strictly increasing on `(x_d, b_i]`.
    pub fn level(&self, i: usize, x: f64) -> Result<f64> {
        self.check_active(i, "level")?;
        let lo = self.player(i).disagreement_s;
        let cap = self.cap(i);
        if !(x > lo && x <= cap) {
            return Err(Error::domain("level", format!("x = {x} outside ({lo}, {cap}]")));
        }
        Ok(self.level_unchecked(i, x))
    }

    /// `L_i(b_i)`: the level at which player `i` saturates.
    pub fn saturation_level(&self, i: usize) -> f64 {
        self.level_unchecked(i, self.cap(i))
    }

    /// Inverse of [`level`](Self::level): the broadcast time of player `i`
    /// when the common level is `s`.
    pub fn fill_at_level(&self, i: usize, s: f64) -> Result<f64> {
        self.check_fill_domain(i, s)?;
        Ok(self.fill_unchecked(i, s))
    }

    /// Same as [`fill_at_level`](Self::fill_at_level) but always by bisection,
    /// bypassing the closed form for linear utilities.
    pub fn fill_at_level_numeric(&self, i: usize, s: f64) -> Result<f64> {
        self.check_fill_domain(i, s)?;
        Ok(self.fill_bisect(i, s))
    }

    fn check_fill_domain(&self, i: usize, s: f64) -> Result<()> {
        self.check_active(i, "fill_at_level")?;
        let top = self.saturation_level(i);
        if !(s > 0.0 && s <= top) {
            return Err(Error::domain("fill_at_level", format!("s = {s} outside (0, {top}]")));
        }
        Ok(())
    }

    fn check_active(&self, i: usize, op: &'static str) -> Result<()> {
        if i >= self.len() {
            return Err(Error::domain(op, format!("player index {i} out of range")));
        }
        if !self.is_active(i) {
            return Err(Error::domain(op, format!("player {} has no data", self.player(i).id)));
        }
        Ok(())
    }

    fn fill_unchecked(&self, i: usize, s: f64) -> f64 {
        let p = self.player(i);
        if p.utility.is_linear() {
            (p.disagreement_s + p.alpha * s / self.weight(i)).min(self.cap(i))
        } else {
            self.fill_bisect(i, s)
        }
    }

    fn fill_bisect(&self, i: usize, s: f64) -> f64 {
        let lo = self.player(i).disagreement_s;
        let cap = self.cap(i);
        if s >= self.saturation_level(i) {
            return cap;
        }
        let level = |x: f64| if x <= lo { 0.0 } else { self.level_unchecked(i, x) };
        bisect_increasing(level, lo, cap, s, INVERSION_TOL * s.max(1.0))
    }

    /// Active players sorted ascending by saturation level, ties by index.
    pub fn level_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.active_indices().collect();
        let levels: Vec<f64> = (0..self.len())
            .map(|i| if self.is_active(i) { self.saturation_level(i) } else { 0.0 })
            .collect();
        order.sort_by(|&a, &b| levels[a].total_cmp(&levels[b]).then(a.cmp(&b)));
        order
    }

    /// Airtime claimed by the players from `rank` onwards (in
    /// [`level_order`](Self::level_order)) when all of them sit on level `s`.
    pub fn tail_demand(&self, rank: usize, s: f64) -> Result<f64> {
        let order = self.level_order();
        self.check_rank(&order, rank, "tail_demand")?;
        let top = self.saturation_level(order[rank]);
        if !(s > 0.0 && s <= top) {
            return Err(Error::domain("tail_demand", format!("s = {s} outside (0, {top}]")));
        }
        Ok(self.tail_demand_in(&order, rank, s))
    }

    /// Inverse of [`tail_demand`](Self::tail_demand): the level at which the
    /// tail from `rank` claims exactly `v` seconds.
    pub fn tail_level(&self, rank: usize, v: f64) -> Result<f64> {
        let order = self.level_order();
        self.check_rank(&order, rank, "tail_level")?;
        self.check_tail_range(&order, rank, v)?;
        Ok(self.tail_level_in(&order, rank, v))
    }

    /// Bisection-only variant of [`tail_level`](Self::tail_level).
    pub fn tail_level_numeric(&self, rank: usize, v: f64) -> Result<f64> {
        let order = self.level_order();
        self.check_rank(&order, rank, "tail_level")?;
        self.check_tail_range(&order, rank, v)?;
        Ok(self.tail_level_bisect(&order, rank, v))
    }

    /// Airtime claimed by all active players at level `s`, each capped at
    /// its saturation point.
    pub fn demand_at_level(&self, s: f64) -> f64 {
        self.active_indices()
            .map(|i| self.weight(i) * if s <= 0.0 { self.player(i).disagreement_s } else { self.fill_unchecked(i, s) })
            .sum()
    }

    fn check_rank(&self, order: &[usize], rank: usize, op: &'static str) -> Result<()> {
        if rank >= order.len() {
            return Err(Error::domain(op, format!("rank {rank} out of range ({} active players)", order.len())));
        }
        Ok(())
    }

    fn check_tail_range(&self, order: &[usize], rank: usize, v: f64) -> Result<()> {
        let floor = self.tail_floor(order, rank);
        let top = self.tail_demand_in(order, rank, self.saturation_level(order[rank]));
        if !(v > floor && v <= top) {
            return Err(Error::domain("tail_level", format!("v = {v} outside ({floor}, {top}]")));
        }
        Ok(())
    }

    fn tail_floor(&self, order: &[usize], rank: usize) -> f64 {
        order[rank..]
            .iter()
            .map(|&n| self.weight(n) * self.player(n).disagreement_s)
            .sum()
    }

    fn tail_demand_in(&self, order: &[usize], rank: usize, s: f64) -> f64 {
        order[rank..].iter().map(|&n| self.weight(n) * self.fill_unchecked(n, s)).sum()
    }

    fn tail_level_in(&self, order: &[usize], rank: usize, v: f64) -> f64 {
        let tail = &order[rank..];
        if tail.iter().all(|&n| self.player(n).utility.is_linear()) {
            let alpha: f64 = tail.iter().map(|&n| self.alpha(n)).sum();
            (v - self.tail_floor(order, rank)) / alpha
        } else {
            self.tail_level_bisect(order, rank, v)
        }
    }

    fn tail_level_bisect(&self, order: &[usize], rank: usize, v: f64) -> f64 {
        let top = self.saturation_level(order[rank]);
        let floor = self.tail_floor(order, rank);
        let demand = |s: f64| if s <= 0.0 { floor } else { self.tail_demand_in(order, rank, s) };
        bisect_increasing(demand, 0.0, top, v, INVERSION_TOL * v.max(1.0))
    }
}

/// Computes the unique generalized Nash bargaining allocation together with
/// its KKT certificate.
///
/// When the budget covers every player's full demand the saturated point
/// (`x_i = b_i`) is returned.
pub fn gnbs_allocate(problem: &BargainingProblem) -> Result<(Allocation, KktReport)> {
    let n = problem.len();
    let mut x = vec![0.0; n];
    let order = problem.level_order();

    if !problem.is_contended() {
        for &i in &order {
            x[i] = problem.cap(i);
        }
        let multiplier = order
            .iter()
            .map(|&i| 1.0 / problem.saturation_level(i))
            .fold(f64::INFINITY, f64::min);
        let multiplier = if multiplier.is_finite() { multiplier } else { 0.0 };
        let allocation = Allocation::from_parts(problem, x, true);
        let report = kkt_residuals(problem, &allocation, multiplier);
        return Ok((allocation, report));
    }

    let budget = problem.airtime();
    let mut used = 0.0;
    let mut level = None;
    for (rank, &i) in order.iter().enumerate() {
        let remaining = budget - used;
        if remaining <= problem.tail_floor(&order, rank) {
            return Err(Error::Infeasible(format!(
                "no airtime left above the disagreement point of player {}",
                problem.player(i).id
            )));
        }
        let top = problem.saturation_level(i);
        let xi = if problem.tail_demand_in(&order, rank, top) <= remaining {
            problem.cap(i)
        } else {
            let s = problem.tail_level_in(&order, rank, remaining);
            level.get_or_insert(s);
            problem.fill_unchecked(i, s).min(problem.cap(i))
        };
        x[i] = xi;
        used += problem.weight(i) * xi;
    }

    let level = level.unwrap_or_else(|| problem.saturation_level(*order.last().expect("contended")));
    let allocation = Allocation::from_parts(problem, x, false);
    let report = kkt_residuals(problem, &allocation, 1.0 / level);
    Ok((allocation, report))
}
