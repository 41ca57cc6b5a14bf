use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::rng::{draw_loss, effective_upload_rate, estimate_pcd, stream, Purpose};
use super::scenario::{Connectivity, DataSpec, Scenario};
use crate::bargaining::{
    eql_allocate, gnbs_allocate, nash_product, wpf_aggregate, wtd_allocate, Allocation, BargainingProblem, Player,
};
use crate::grouping::{
    allocation_interval, build_schedule, default_order, select_roles, select_transmission_mode, slot_sizes,
    ConnectivityGraph, ContactEvent, ContactTable, NodeSlots, Schedule, SlotKind, TransmissionMode,
};
use crate::{Error, NodeId, Result};

/// Airtime allocation rule used by the group owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    Gsa,
    Eql,
    Wtd,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Gsa, Policy::Eql, Policy::Wtd];

    pub fn allocate(self, problem: &BargainingProblem) -> Result<Allocation> {
        match self {
            Policy::Gsa => gnbs_allocate(problem).map(|(a, _)| a),
            Policy::Eql => Ok(eql_allocate(problem)),
            Policy::Wtd => Ok(wtd_allocate(problem)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Gsa => "gsa",
            Policy::Eql => "eql",
            Policy::Wtd => "wtd",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gsa" => Ok(Policy::Gsa),
            "eql" => Ok(Policy::Eql),
            "wtd" => Ok(Policy::Wtd),
            _ => Err(Error::InvalidScenario(format!("unknown policy `{s}` (expected gsa, eql or wtd)"))),
        }
    }
}

/// Everything that happened in one allocation round.
///
/// Per-node vectors are aligned with `members` (ascending id).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub index: usize,
    pub start_s: f64,
    pub end_s: f64,
    pub members: Vec<NodeId>,
    pub group_owner: NodeId,
    pub mode: TransmissionMode,
    pub loads_mb: Vec<f64>,
    /// Shortest true contact duration between the GO and its peers, capped
    /// at the next arrival.
    pub interval_s: f64,
    /// The interval the GO planned with, after estimation error.
    pub estimated_interval_s: f64,
    pub loss: Vec<f64>,
    /// The problem the GO solved (estimated interval, lossy upload rates).
    pub problem: BargainingProblem,
    pub allocation: Allocation,
    /// Basic slot actually used; smaller than the scenario's when one cycle
    /// would not fit the planned airtime.
    pub t_slot_s: f64,
    pub slots: Vec<NodeSlots>,
    pub schedule: Schedule,
    /// Broadcast airtime that carried data before the round ended.
    pub realized_broadcast_s: Vec<f64>,
    /// Megabits/second of each member's data broadcast over the round.
    pub realized_rate_mbps: Vec<f64>,
    /// Loss-free problem over the true interval.
    pub ideal_problem: BargainingProblem,
    /// GNBS point of the ideal problem.
    pub ideal_broadcast_s: Vec<f64>,
    pub nash_product_realized: f64,
    /// The policy's own allocation evaluated on the ideal problem.
    pub nash_product_ideal: f64,
    pub wpf_vs_ideal: f64,
}

impl RoundReport {
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.members.iter().position(|&m| m == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub policy: Policy,
    pub rounds: Vec<RoundReport>,
    /// Megabits each node's data occupied on the broadcast channel.
    pub sent_mb: BTreeMap<NodeId, f64>,
    /// Megabits of `from`'s data received by `to`, keyed `(from, to)`.
    pub delivered_mb: BTreeMap<(NodeId, NodeId), f64>,
    /// Means over rounds with at least one member holding data; `None` when
    /// there is no such round.
    pub nash_product_realized: Option<f64>,
    pub nash_product_ideal: Option<f64>,
    pub wpf_aggregate_vs_ideal: Option<f64>,
}

/// Runs the scenario with the bargaining allocator.
pub fn run_scenario(scenario: &Scenario) -> Result<SimulationReport> {
    run_scenario_with(scenario, Policy::Gsa)
}

pub fn run_scenario_with(scenario: &Scenario, policy: Policy) -> Result<SimulationReport> {
    scenario.validate()?;
    let mut state = State::new(scenario);
    let mut rounds = Vec::new();
    for (index, (start, end)) in round_intervals(scenario).into_iter().enumerate() {
        let report = state
            .play_round(index, start, end, policy)
            .map_err(|e| Error::Round {
                index,
                start,
                source: Box::new(e),
            })?;
        if let Some(r) = report {
            rounds.push(r);
        }
    }

    let scored: Vec<&RoundReport> = rounds.iter().filter(|r| r.ideal_problem.active_indices().next().is_some()).collect();
    let mean = |f: fn(&RoundReport) -> f64| {
        (!scored.is_empty()).then(|| scored.iter().map(|r| f(r)).sum::<f64>() / scored.len() as f64)
    };
    Ok(SimulationReport {
        policy,
        nash_product_realized: mean(|r| r.nash_product_realized),
        nash_product_ideal: mean(|r| r.nash_product_ideal),
        wpf_aggregate_vs_ideal: mean(|r| r.wpf_vs_ideal),
        rounds,
        sent_mb: state.sent_total,
        delivered_mb: state.delivered,
    })
}

/// Periods between consecutive distinct event times in which at least two
/// nodes are present throughout.
pub fn round_intervals(scenario: &Scenario) -> Vec<(f64, f64)> {
    let mut times: Vec<f64> = scenario.nodes.iter().flat_map(|n| [n.join_s, n.leave_s]).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(s, e)| members_during(scenario, s, e).len() >= 2)
        .collect()
}

fn members_during(scenario: &Scenario, start: f64, end: f64) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = scenario
        .nodes
        .iter()
        .filter(|n| n.join_s <= start && n.leave_s >= end)
        .map(|n| n.id)
        .collect();
    ids.sort();
    ids
}

struct State<'a> {
    scenario: &'a Scenario,
    tables: BTreeMap<NodeId, ContactTable>,
    /// Megabits of `from`'s data broadcast while `to` was present.
    sent_to: BTreeMap<(NodeId, NodeId), f64>,
    sent_total: BTreeMap<NodeId, f64>,
    delivered: BTreeMap<(NodeId, NodeId), f64>,
}

impl<'a> State<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let zero: BTreeMap<NodeId, f64> = scenario.nodes.iter().map(|n| (n.id, 0.0)).collect();
        State {
            scenario,
            tables: BTreeMap::new(),
            sent_to: BTreeMap::new(),
            sent_total: zero,
            delivered: BTreeMap::new(),
        }
    }

    fn load(&self, id: NodeId, members: &[NodeId]) -> f64 {
        let spec = self.scenario.node(id).expect("member of the scenario");
        let carry = self.scenario.carry_over;
        match spec.data {
            DataSpec::Total(m) if carry => (m - self.sent_total[&id]).max(0.0),
            DataSpec::Total(m) => m,
            DataSpec::PerPeer(d) => members
                .iter()
                .filter(|&&j| j != id)
                .map(|&j| {
                    let sent = if carry { self.sent_to.get(&(id, j)).copied().unwrap_or(0.0) } else { 0.0 };
                    (d - sent).max(0.0)
                })
                .sum(),
        }
    }

    /// Remaining co-presence of two members, seconds from `start`.
    fn pcd(&self, a: NodeId, b: NodeId, start: f64) -> f64 {
        let leave = |id| self.scenario.node(id).expect("scenario node").leave_s;
        leave(a).min(leave(b)) - start
    }

    /// Brings every member's contact table up to date through join and
    /// leave events, then refreshes contact durations and loads.
    fn update_tables(&mut self, members: &[NodeId], loads: &BTreeMap<NodeId, f64>, start: f64) -> Result<()> {
        let current: BTreeSet<NodeId> = members.iter().copied().collect();
        let previous: Vec<NodeId> = self.tables.keys().copied().collect();
        for id in previous.iter().filter(|id| !current.contains(id)) {
            let mut t = self.tables.remove(id).expect("listed above");
            t.apply(ContactEvent::SelfLeave)?;
            for other in self.tables.values_mut() {
                other.apply(ContactEvent::Leave(*id))?;
            }
        }
        for &id in members {
            if self.tables.contains_key(&id) {
                continue;
            }
            let mut own = ContactTable::new(id, loads[&id]);
            let sc = self.scenario;
            for (&peer, table) in self.tables.iter_mut() {
                let pcd_s = sc.node(id).expect("member").leave_s.min(sc.node(peer).expect("member").leave_s) - start;
                table.apply(ContactEvent::Join {
                    id,
                    pcd_s,
                    data_mb: loads[&id],
                })?;
                own.apply(ContactEvent::Join {
                    id: peer,
                    pcd_s,
                    data_mb: loads[&peer],
                })?;
            }
            self.tables.insert(id, own);
        }
        let pcds: Vec<(NodeId, NodeId, f64)> = members
            .iter()
            .flat_map(|&a| members.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
            .map(|(a, b)| (a, b, self.pcd(a, b, start)))
            .collect();
        for (a, b, pcd) in pcds {
            self.tables.get_mut(&a).expect("member table").refresh(b, pcd, loads[&b])?;
        }
        for &id in members {
            self.tables.get_mut(&id).expect("member table").set_owner_data(loads[&id]);
        }
        Ok(())
    }

    fn group_owner(&self, members: &[NodeId]) -> Result<NodeId> {
        if let Some(go) = self.scenario.go.filter(|g| members.contains(g)) {
            return Ok(go);
        }
        let tables: Vec<ContactTable> = members.iter().map(|id| self.tables[id].clone()).collect();
        let roles = match &self.scenario.connectivity {
            Connectivity::Complete => select_roles(&tables, &ConnectivityGraph::complete(members.iter().copied()))?,
            Connectivity::Graph(g) => select_roles(&tables, g)?,
        };
        Ok(roles.group_owner)
    }

    fn play_round(&mut self, index: usize, start: f64, end: f64, policy: Policy) -> Result<Option<RoundReport>> {
        let sc = self.scenario;
        let members = members_during(sc, start, end);
        let mode = select_transmission_mode(members.len());
        if mode == TransmissionMode::Idle {
            return Ok(None);
        }
        let loads: BTreeMap<NodeId, f64> = members.iter().map(|&id| (id, self.load(id, &members))).collect();
        self.update_tables(&members, &loads, start)?;
        let go = self.group_owner(&members)?;

        // The interval ends at the first departure from the GO's table or at
        // the next arrival, whichever comes first.
        let next_arrival = sc
            .nodes
            .iter()
            .map(|n| n.join_s)
            .filter(|&t| t > start)
            .fold(f64::INFINITY, f64::min);
        let interval = allocation_interval(&self.tables[&go], go)?.min(next_arrival - start);
        let mut pcd_rng = stream(sc.seed, go, index, Purpose::PcdError);
        let estimated = estimate_pcd(interval, sc.pcd_error.as_ref(), &mut pcd_rng);

        let loss: Vec<f64> = members
            .iter()
            .map(|&id| draw_loss(sc.loss.as_ref(), &mut stream(sc.seed, id, index, Purpose::Loss)))
            .collect();
        let make_problem = |airtime: f64, lossy: bool| -> Result<BargainingProblem> {
            let players: Vec<Player> = members
                .iter()
                .zip(&loss)
                .map(|(&id, &p)| {
                    let spec = sc.node(id).expect("member");
                    if id == go {
                        Player::group_owner(id, loads[&id], spec.alpha * sc.go_alpha_factor)
                    } else {
                        let rate = if lossy { effective_upload_rate(spec.upload_mbps, p) } else { spec.upload_mbps };
                        Player::client(id, loads[&id], rate, spec.alpha)
                    }
                })
                .collect();
            if mode == TransmissionMode::UnicastPair {
                BargainingProblem::unicast_pair(players, airtime, sc.broadcast_mbps)
            } else {
                BargainingProblem::new(players, airtime, sc.broadcast_mbps)
            }
        };
        let problem = make_problem(estimated, true)?;
        let ideal_problem = make_problem(end - start, false)?;
        let allocation = policy.allocate(&problem)?;
        let (ideal_gnbs, _) = gnbs_allocate(&ideal_problem)?;
        let ideal_policy = policy.allocate(&ideal_problem)?;

        let (t_slot, slots, schedule) = plan_schedule(&members, &problem, &allocation, sc.t_slot_s, go, start)?;

        let realized_mb = self.execute(&members, go, &problem, &loads, &loss, &schedule, index, end);
        let realized: Vec<f64> = realized_mb.iter().map(|mb| mb / sc.broadcast_mbps).collect();
        let duration = end - start;
        let report = RoundReport {
            index,
            start_s: start,
            end_s: end,
            group_owner: go,
            mode,
            loads_mb: members.iter().map(|id| loads[id]).collect(),
            interval_s: interval,
            estimated_interval_s: estimated,
            loss,
            t_slot_s: t_slot,
            slots,
            schedule,
            realized_rate_mbps: realized_mb.iter().map(|mb| mb / duration).collect(),
            nash_product_realized: nash_product(&ideal_problem, &realized),
            nash_product_ideal: nash_product(&ideal_problem, ideal_policy.broadcast()),
            wpf_vs_ideal: wpf_aggregate(&ideal_problem, ideal_gnbs.broadcast(), &realized),
            ideal_broadcast_s: ideal_gnbs.broadcast().to_vec(),
            realized_broadcast_s: realized,
            members,
            problem,
            allocation,
            ideal_problem,
        };
        Ok(Some(report))
    }

    /// Plays the schedule until the true end of the round and returns the
    /// megabits of each member's data that went out on the broadcast channel.
    #[allow(clippy::too_many_arguments)]
    fn execute(
        &mut self,
        members: &[NodeId],
        go: NodeId,
        problem: &BargainingProblem,
        loads: &BTreeMap<NodeId, f64>,
        loss: &[f64],
        schedule: &Schedule,
        index: usize,
        end: f64,
    ) -> Vec<f64> {
        let sc = self.scenario;
        let n = members.len();
        let pos = |id: NodeId| members.iter().position(|&m| m == id).expect("scheduled member");
        let mut uploaded = vec![0.0; n];
        let mut broadcast = vec![0.0; n];
        // Per-peer outstanding data for the round, indexed [sender][receiver].
        let mut outstanding: Vec<Vec<f64>> = members
            .iter()
            .map(|&i| {
                members
                    .iter()
                    .map(|&j| match sc.node(i).expect("member").data {
                        _ if i == j => 0.0,
                        DataSpec::Total(_) => 0.0,
                        DataSpec::PerPeer(d) => {
                            let sent = if sc.carry_over { self.sent_to.get(&(i, j)).copied().unwrap_or(0.0) } else { 0.0 };
                            (d - sent).max(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut receivers: Vec<_> = members
            .iter()
            .map(|&j| stream(sc.seed, j, index, Purpose::Delivery))
            .collect();

        for e in schedule.entries() {
            if e.start_s >= end {
                break;
            }
            let d = e.duration_s.min(end - e.start_s);
            let i = pos(e.node);
            let load = loads[&e.node];
            match e.kind {
                SlotKind::Upload => {
                    let rate = effective_upload_rate(sc.node(e.node).expect("member").upload_mbps, loss[i]);
                    uploaded[i] = (uploaded[i] + d * rate).min(load);
                }
                SlotKind::Broadcast => {
                    let relayed = !problem.is_direct() && e.node != go;
                    let available = if relayed { uploaded[i] } else { load } - broadcast[i];
                    let q = (d * sc.broadcast_mbps).min(available).max(0.0);
                    if q <= 0.0 {
                        continue;
                    }
                    broadcast[i] += q;
                    let per_peer = matches!(sc.node(e.node).expect("member").data, DataSpec::PerPeer(_));
                    let open: f64 = outstanding[i].iter().sum();
                    for j in (0..n).filter(|&j| j != i) {
                        let share = if per_peer {
                            if open <= 0.0 {
                                continue;
                            }
                            let s = q * outstanding[i][j] / open;
                            outstanding[i][j] = (outstanding[i][j] - s).max(0.0);
                            s
                        } else {
                            q
                        };
                        *self.sent_to.entry((e.node, members[j])).or_insert(0.0) += share;
                        if receivers[j].random::<f64>() >= loss[j] {
                            *self.delivered.entry((e.node, members[j])).or_insert(0.0) += share;
                        }
                    }
                }
            }
        }
        for (k, &id) in members.iter().enumerate() {
            *self.sent_total.get_mut(&id).expect("scenario node") += broadcast[k];
        }
        broadcast
    }
}

/// Slot sizes and schedule for one round. The basic slot shrinks when a
/// single cycle would not fit the planned airtime.
fn plan_schedule(
    members: &[NodeId],
    problem: &BargainingProblem,
    allocation: &Allocation,
    t_slot: f64,
    go: NodeId,
    start: f64,
) -> Result<(f64, Vec<NodeSlots>, Schedule)> {
    let x = allocation.broadcast();
    let planned = allocation.airtime_used().min(problem.airtime());
    if !x.iter().any(|&v| v > 0.0) {
        let empty = build_schedule(&[], planned.max(f64::MIN_POSITIVE), &[], start)?;
        return Ok((t_slot, Vec::new(), empty));
    }
    let betas = problem.betas();
    let mut t_slot = t_slot;
    let mut slots = slot_sizes(members, x, &betas, t_slot)?;
    let cycle: f64 = slots.iter().map(|s| s.whole_s).sum();
    if cycle > planned {
        t_slot *= planned / cycle * (1.0 - 1e-12);
        slots = slot_sizes(members, x, &betas, t_slot)?;
    }
    let order = default_order(&slots, go);
    let schedule = build_schedule(&slots, planned, &order, start)?;
    Ok((t_slot, slots, schedule))
}
