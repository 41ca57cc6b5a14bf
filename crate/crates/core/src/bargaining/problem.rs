use std::collections::BTreeSet;

use super::utility::Utility;
use crate::{Error, NodeId, Result};

/// Absolute tolerance used when checking the airtime budget equality.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    GroupOwner,
    Client,
}

/// One bargaining participant.
#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub id: NodeId,
    /// Data the node wants to disseminate, in megabits.
    pub data_mb: f64,
    /// Upload rate to the group owner in megabits/second. Ignored for the GO.
    pub upload_mbps: f64,
    /// Bargaining power. Any positive weight; the problem normalizes the set.
    pub alpha: f64,
    /// Disagreement broadcast time in seconds.
    pub disagreement_s: f64,
    pub utility: Utility,
    pub role: Role,
}

impl Player {
    pub fn client(id: impl Into<NodeId>, data_mb: f64, upload_mbps: f64, alpha: f64) -> Self {
        Player {
            id: id.into(),
            data_mb,
            upload_mbps,
            alpha,
            disagreement_s: 0.0,
            utility: Utility::NormalizedLinear,
            role: Role::Client,
        }
    }

    pub fn group_owner(id: impl Into<NodeId>, data_mb: f64, alpha: f64) -> Self {
        Player {
            id: id.into(),
            data_mb,
            upload_mbps: f64::INFINITY,
            alpha,
            disagreement_s: 0.0,
            utility: Utility::NormalizedLinear,
            role: Role::GroupOwner,
        }
    }

    pub fn with_utility(mut self, utility: Utility) -> Self {
        self.utility = utility;
        self
    }

    pub fn with_disagreement(mut self, seconds: f64) -> Self {
        self.disagreement_s = seconds;
        self
    }

    pub fn is_group_owner(&self) -> bool {
        self.role == Role::GroupOwner
    }
}

/// A full allocation instance: players, airtime budget and broadcast rate.
///
/// Bargaining powers are normalized to sum to one on construction. Players
/// without data are kept (so indices line up with the caller's list) but sit
/// outside the bargaining set and always receive zero airtime.
#[derive(Debug, Clone, PartialEq)]
pub struct BargainingProblem {
    players: Vec<Player>,
    airtime_s: f64,
    broadcast_mbps: f64,
    direct: bool,
}

impl BargainingProblem {
    /// GO-coordinated problem: clients upload to the GO, which broadcasts.
    pub fn new(players: Vec<Player>, airtime_s: f64, broadcast_mbps: f64) -> Result<Self> {
        Self::build(players, airtime_s, broadcast_mbps, false)
    }

    /// Two-node problem: both nodes transmit directly, so nothing is uploaded.
    pub fn unicast_pair(players: Vec<Player>, airtime_s: f64, broadcast_mbps: f64) -> Result<Self> {
        if players.len() != 2 {
            return Err(Error::InvalidProblem(format!(
                "unicast pair needs exactly 2 players, got {}",
                players.len()
            )));
        }
        Self::build(players, airtime_s, broadcast_mbps, true)
    }

    fn build(mut players: Vec<Player>, airtime_s: f64, broadcast_mbps: f64, direct: bool) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::InvalidProblem("no players".into()));
        }
        if !(airtime_s > 0.0 && airtime_s.is_finite()) {
            return Err(Error::InvalidProblem(format!("airtime must be positive, got {airtime_s}")));
        }
        if !(broadcast_mbps > 0.0 && broadcast_mbps.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "broadcast rate must be positive, got {broadcast_mbps}"
            )));
        }
        let owners = players.iter().filter(|p| p.is_group_owner()).count();
        if owners != 1 {
            return Err(Error::InvalidProblem(format!("expected exactly one group owner, found {owners}")));
        }
        let mut seen = BTreeSet::new();
        for p in &players {
            if !seen.insert(p.id) {
                return Err(Error::InvalidProblem(format!("duplicate player id {}", p.id)));
            }
            if !(p.data_mb >= 0.0 && p.data_mb.is_finite()) {
                return Err(Error::InvalidProblem(format!("player {}: data size {} mb", p.id, p.data_mb)));
            }
            if p.role == Role::Client && (p.upload_mbps.is_nan() || p.upload_mbps <= 0.0) {
                return Err(Error::InvalidProblem(format!("player {}: upload rate must be positive", p.id)));
            }
            if !(p.alpha > 0.0 && p.alpha.is_finite()) {
                return Err(Error::InvalidProblem(format!("player {}: bargaining power must be positive", p.id)));
            }
            if !(p.disagreement_s >= 0.0 && p.disagreement_s.is_finite()) {
                return Err(Error::InvalidProblem(format!("player {}: negative disagreement point", p.id)));
            }
            p.utility.validate()?;
        }

        let alpha_sum: f64 = players.iter().map(|p| p.alpha).sum();
        for p in &mut players {
            p.alpha /= alpha_sum;
        }

        let problem = BargainingProblem {
            players,
            airtime_s,
            broadcast_mbps,
            direct,
        };
        problem.check_mutual_benefit()?;
        Ok(problem)
    }

    fn check_mutual_benefit(&self) -> Result<()> {
        let mut floor = 0.0;
        for i in self.active_indices() {
            let p = &self.players[i];
            if p.disagreement_s >= self.cap(i) {
                return Err(Error::Infeasible(format!(
                    "player {}: disagreement point {} s is not below its cap {} s",
                    p.id,
                    p.disagreement_s,
                    self.cap(i)
                )));
            }
            floor += (1.0 + self.beta(i)) * p.disagreement_s;
        }
        if floor >= self.airtime_s {
            return Err(Error::Infeasible(format!(
                "disagreement points need {floor} s of the {} s budget",
                self.airtime_s
            )));
        }
        Ok(())
    }

    /// Same players and rates with a different airtime budget.
    pub fn with_airtime(&self, airtime_s: f64) -> Result<Self> {
        Self::build(self.players.clone(), airtime_s, self.broadcast_mbps, self.direct)
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn player(&self, i: usize) -> &Player {
        &self.players[i]
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn airtime(&self) -> f64 {
        self.airtime_s
    }

    pub fn broadcast_rate(&self) -> f64 {
        self.broadcast_mbps
    }

    /// True for the two-node unicast mode.
    pub fn is_direct(&self) -> bool {
        self.direct
    }

    pub fn group_owner(&self) -> usize {
        self.players
            .iter()
            .position(Player::is_group_owner)
            .expect("validated on construction")
    }

    /// Normalized bargaining power.
    pub fn alpha(&self, i: usize) -> f64 {
        self.players[i].alpha
    }

    /// Upload seconds needed per broadcast second.
    pub fn beta(&self, i: usize) -> f64 {
        let p = &self.players[i];
        if self.direct || p.is_group_owner() {
            0.0
        } else {
            self.broadcast_mbps / p.upload_mbps
        }
    }

    /// Airtime consumed per broadcast second of player `i`.
    pub fn weight(&self, i: usize) -> f64 {
        1.0 + self.beta(i)
    }

    pub fn betas(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.beta(i)).collect()
    }

    /// Time needed to broadcast all of player `i`'s data.
    pub fn cap(&self, i: usize) -> f64 {
        self.players[i].data_mb / self.broadcast_mbps
    }

    pub fn caps(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.cap(i)).collect()
    }

    /// Players with data to send; only these take part in the bargaining.
    pub fn is_active(&self, i: usize) -> bool {
        self.players[i].data_mb > 0.0
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_active(i))
    }

    /// Airtime needed for everyone to send everything.
    pub fn total_demand(&self) -> f64 {
        self.active_indices().map(|i| self.weight(i) * self.cap(i)).sum()
    }

    pub fn is_contended(&self) -> bool {
        self.total_demand() > self.airtime_s
    }

    /// Utility gain of player `i` over its disagreement point at broadcast time `x`.
    pub fn gain(&self, i: usize, x: f64) -> f64 {
        let p = &self.players[i];
        let cap = self.cap(i);
        p.utility.value(x, cap) - p.utility.value(p.disagreement_s, cap)
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.players.iter().position(|p| p.id == id)
    }
}

/// Paired upload/broadcast airtime per player, aligned with the problem's
/// player order.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    broadcast_s: Vec<f64>,
    upload_s: Vec<f64>,
    saturated: bool,
}

impl Allocation {
    pub(crate) fn from_parts(problem: &BargainingProblem, broadcast_s: Vec<f64>, saturated: bool) -> Self {
        debug_assert_eq!(broadcast_s.len(), problem.len());
        let upload_s = broadcast_s
            .iter()
            .enumerate()
            .map(|(i, &x)| problem.beta(i) * x)
            .collect();
        Allocation {
            broadcast_s,
            upload_s,
            saturated,
        }
    }

    /// Validates an arbitrary broadcast vector against the feasibility
    /// constraints: `0 <= x_i <= b_i` and the airtime budget (or the
    /// saturated point when total demand fits the budget).
    pub fn checked(problem: &BargainingProblem, broadcast_s: Vec<f64>) -> Result<Self> {
        if broadcast_s.len() != problem.len() {
            return Err(Error::DegenerateAllocation(format!(
                "{} entries for {} players",
                broadcast_s.len(),
                problem.len()
            )));
        }
        for (i, &x) in broadcast_s.iter().enumerate() {
            let cap = problem.cap(i);
            if !(x >= 0.0 && x <= cap + BUDGET_TOLERANCE) {
                return Err(Error::DegenerateAllocation(format!(
                    "player {}: broadcast time {x} outside [0, {cap}]",
                    problem.player(i).id
                )));
            }
        }
        let saturated = !problem.is_contended();
        let used: f64 = broadcast_s.iter().enumerate().map(|(i, &x)| problem.weight(i) * x).sum();
        let budget = if saturated { problem.total_demand() } else { problem.airtime() };
        if (used - budget).abs() > BUDGET_TOLERANCE * budget.max(1.0) {
            return Err(Error::DegenerateAllocation(format!(
                "allocation uses {used} s of airtime, expected {budget} s"
            )));
        }
        Ok(Self::from_parts(problem, broadcast_s, saturated))
    }

    /// Broadcast time per player (`x`).
    pub fn broadcast(&self) -> &[f64] {
        &self.broadcast_s
    }

    /// Upload time per player (`y = beta * x`).
    pub fn upload(&self) -> &[f64] {
        &self.upload_s
    }

    /// Total demand fit in the budget, so every player got its cap.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn len(&self) -> usize {
        self.broadcast_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.broadcast_s.is_empty()
    }

    /// Total airtime consumed by uploads and broadcasts.
    pub fn airtime_used(&self) -> f64 {
        self.broadcast_s.iter().sum::<f64>() + self.upload_s.iter().sum::<f64>()
    }
}
