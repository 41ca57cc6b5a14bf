use std::collections::BTreeSet;

use crate::grouping::ConnectivityGraph;
use crate::{Error, NodeId, Result};

/// How much data a node brings to the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataSpec {
    /// One piece of content of this size, wanted by every peer.
    Total(f64),
    /// A separate piece of this size for each peer it meets.
    PerPeer(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    pub join_s: f64,
    pub leave_s: f64,
    pub data: DataSpec,
    pub upload_mbps: f64,
    /// Bargaining weight as a client. The group owner's weight is multiplied
    /// by [`Scenario::go_alpha_factor`].
    pub alpha: f64,
}

impl NodeSpec {
    pub fn new(id: impl Into<NodeId>, join_s: f64, leave_s: f64, data: DataSpec, upload_mbps: f64) -> Self {
        NodeSpec {
            id: id.into(),
            join_s,
            leave_s,
            data,
            upload_mbps,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Connectivity {
    Complete,
    Graph(ConnectivityGraph),
}

/// Per-node loss probability, drawn uniformly in `[lo, hi]` each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub lo: f64,
    pub hi: f64,
}

/// Additive normal error on the estimated contact duration, seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcdErrorModel {
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub nodes: Vec<NodeSpec>,
    pub broadcast_mbps: f64,
    pub connectivity: Connectivity,
    pub t_slot_s: f64,
    pub loss: Option<LossModel>,
    pub pcd_error: Option<PcdErrorModel>,
    pub seed: u64,
    /// Forces this node to act as group owner whenever it is present.
    pub go: Option<NodeId>,
    pub go_alpha_factor: f64,
    /// Whether data broadcast in one round is subtracted from later loads.
    pub carry_over: bool,
}

impl Scenario {
    /// Complete connectivity, 20 ms basic slot, no randomness, GO weight
    /// twice a client's, loads carried over between rounds.
    pub fn new(nodes: Vec<NodeSpec>, broadcast_mbps: f64) -> Self {
        Scenario {
            nodes,
            broadcast_mbps,
            connectivity: Connectivity::Complete,
            t_slot_s: 0.020,
            loss: None,
            pcd_error: None,
            seed: 0,
            go: None,
            go_alpha_factor: 2.0,
            carry_over: true,
        }
    }

    /// Six nodes in contact for 10 s with loads 10..80 Mb, node 4 as group
    /// owner, 11 Mb/s links, 20 ms basic slot, loss in `[0, 0.1]` and
    /// N(0, 1) contact-duration error.
    pub fn table1() -> Self {
        let loads = [10.0, 20.0, 40.0, 40.0, 60.0, 80.0];
        let nodes = loads
            .iter()
            .enumerate()
            .map(|(k, &m)| NodeSpec::new(k as u32 + 1, 0.0, 10.0, DataSpec::Total(m), 11.0))
            .collect();
        Scenario {
            t_slot_s: 0.020,
            loss: Some(LossModel { lo: 0.0, hi: 0.1 }),
            pcd_error: Some(PcdErrorModel { mean: 0.0, stddev: 1.0 }),
            seed: 1,
            go: Some(NodeId(4)),
            ..Scenario::new(nodes, 11.0)
        }
    }

    /// Four nodes joining at 0, 0, 4, 12 s and leaving at 8, 16, 20, 20 s,
    /// each with 25, 20, 15, 10 Mb for every peer, 100 ms basic slot.
    pub fn dynamic4() -> Self {
        let joins = [0.0, 0.0, 4.0, 12.0];
        let leaves = [8.0, 16.0, 20.0, 20.0];
        let per_peer = [25.0, 20.0, 15.0, 10.0];
        let nodes = (0..4)
            .map(|k| NodeSpec::new(k as u32 + 1, joins[k], leaves[k], DataSpec::PerPeer(per_peer[k]), 11.0))
            .collect();
        Scenario {
            t_slot_s: 0.100,
            loss: Some(LossModel { lo: 0.0, hi: 0.1 }),
            seed: 1,
            carry_over: false,
            ..Scenario::new(nodes, 11.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return bad(format!("duplicate node id {}", n.id));
            }
            if !(n.join_s.is_finite() && n.leave_s.is_finite() && n.join_s >= 0.0 && n.join_s < n.leave_s) {
                return bad(format!("node {}: need 0 <= join_s < leave_s, got {} and {}", n.id, n.join_s, n.leave_s));
            }
            let data = match n.data {
                DataSpec::Total(m) | DataSpec::PerPeer(m) => m,
            };
            if !(data >= 0.0 && data.is_finite()) {
                return bad(format!("node {}: data size must be non-negative", n.id));
            }
            if !(n.upload_mbps > 0.0 && n.upload_mbps.is_finite()) {
                return bad(format!("node {}: upload rate must be positive", n.id));
            }
            if !(n.alpha > 0.0 && n.alpha.is_finite()) {
                return bad(format!("node {}: alpha must be positive", n.id));
            }
        }
        if !(self.broadcast_mbps > 0.0 && self.broadcast_mbps.is_finite()) {
            return bad("broadcast rate must be positive".into());
        }
        if !(self.t_slot_s > 0.0 && self.t_slot_s.is_finite()) {
            return bad("basic slot size must be positive".into());
        }
        if !(self.go_alpha_factor > 0.0 && self.go_alpha_factor.is_finite()) {
            return bad("group-owner alpha factor must be positive".into());
        }
        if let Some(l) = self.loss {
            if !(0.0 <= l.lo && l.lo <= l.hi && l.hi < 1.0) {
                return bad(format!("loss range must satisfy 0 <= lo <= hi < 1, got [{}, {}]", l.lo, l.hi));
            }
        }
        if let Some(e) = self.pcd_error {
            if !(e.mean.is_finite() && e.stddev >= 0.0 && e.stddev.is_finite()) {
                return bad("contact-duration error needs a finite mean and a non-negative stddev".into());
            }
        }
        if let Some(go) = self.go {
            if !ids.contains(&go) {
                return bad(format!("group owner {go} is not a scenario node"));
            }
        }
        if let Connectivity::Graph(g) = &self.connectivity {
            if let Some(n) = g.nodes().find(|n| !ids.contains(n)) {
                return bad(format!("connectivity graph mentions unknown node {n}"));
            }
        }
        Ok(())
    }

    /// The same scenario with loss and contact-duration error removed.
    pub fn without_randomness(&self) -> Self {
        Scenario {
            loss: None,
            pcd_error: None,
            ..self.clone()
        }
    }

    /// Rescales every join and leave time so the scenario spans `duration`
    /// seconds from the first join.
    pub fn with_contact_duration(&self, duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidScenario(format!("contact duration must be positive, got {duration}")));
        }
        let first = self.nodes.iter().map(|n| n.join_s).fold(f64::INFINITY, f64::min);
        let last = self.nodes.iter().map(|n| n.leave_s).fold(f64::NEG_INFINITY, f64::max);
        let factor = duration / (last - first);
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.join_s = first + (n.join_s - first) * factor;
            n.leave_s = first + (n.leave_s - first) * factor;
        }
        Ok(out)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeSpec> {
        self.nodes.iter().find(|n| n.id == id)
    }
}
