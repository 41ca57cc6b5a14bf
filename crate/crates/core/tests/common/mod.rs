#![allow(dead_code)]

use airtime_core::bargaining::{BargainingProblem, Player, Utility};
use proptest::prelude::*;

pub const BROADCAST_MBPS: f64 = 11.0;

#[derive(Debug, Clone)]
pub struct Spec {
    pub loads: Vec<f64>,
    pub betas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub utilities: Vec<Utility>,
    /// Disagreement points as a fraction of each cap.
    pub disagreement: Vec<f64>,
    /// Where the budget sits between the disagreement floor and full demand.
    pub budget_fraction: f64,
    pub go: usize,
}

fn utility() -> impl Strategy<Value = Utility> {
    prop_oneof![
        Just(Utility::NormalizedLinear),
        (0.05f64..5.0).prop_map(|shift| Utility::LogShifted { shift }),
        (0.2f64..=1.0).prop_map(|exponent| Utility::Power { exponent }),
    ]
}

pub fn spec(max_players: usize, with_disagreement: bool) -> impl Strategy<Value = Spec> {
    (2..=max_players).prop_flat_map(move |n| {
        (
            prop::collection::vec(1.0f64..100.0, n),
            prop::collection::vec(0.0f64..3.0, n),
            prop::collection::vec(0.1f64..5.0, n),
            prop::collection::vec(utility(), n),
            prop::collection::vec(if with_disagreement { 0.0f64..0.3 } else { 0.0f64..1e-300 }, n),
            0.05f64..0.95,
            0..n,
        )
            .prop_map(move |(loads, betas, alphas, utilities, disagreement, budget_fraction, go)| Spec {
                loads,
                betas,
                alphas,
                utilities,
                disagreement: disagreement.into_iter().map(|d| if with_disagreement { d } else { 0.0 }).collect(),
                budget_fraction,
                go,
            })
    })
}

impl Spec {
    pub fn players(&self) -> Vec<Player> {
        (0..self.loads.len())
            .map(|i| {
                let id = i as u32 + 1;
                let cap = self.loads[i] / BROADCAST_MBPS;
                let p = if i == self.go {
                    Player::group_owner(id, self.loads[i], self.alphas[i])
                } else if self.betas[i] == 0.0 {
                    Player::client(id, self.loads[i], f64::INFINITY, self.alphas[i])
                } else {
                    Player::client(id, self.loads[i], BROADCAST_MBPS / self.betas[i], self.alphas[i])
                };
                p.with_utility(self.utilities[i]).with_disagreement(self.disagreement[i] * cap)
            })
            .collect()
    }

    pub fn problem(&self) -> BargainingProblem {
        let players = self.players();
        // Budget between the disagreement floor and the full demand.
        let probe = BargainingProblem::new(players.clone(), 1e9, BROADCAST_MBPS).expect("valid spec");
        let floor: f64 = (0..probe.len()).map(|i| probe.weight(i) * probe.player(i).disagreement_s).sum();
        let demand = probe.total_demand();
        let airtime = floor + self.budget_fraction * (demand - floor);
        probe.with_airtime(airtime).expect("budget above the floor")
    }
}
