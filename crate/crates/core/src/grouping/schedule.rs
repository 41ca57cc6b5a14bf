use std::fmt::Write as _;

use crate::{Error, NodeId, Result};

/// Slots shorter than this are dropped when the last cycle is cut.
const SLIVER_S: f64 = 1e-12;

/// Per-node slot sizes in one round-robin cycle, seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSlots {
    pub node: NodeId,
    pub whole_s: f64,
    pub upload_s: f64,
    pub broadcast_s: f64,
}

/// Turns broadcast times into slot sizes. The node with the least airtime
/// `(1 + beta) x` gets a whole slot of `t_slot`; the others scale up in
/// proportion. Nodes with zero broadcast time get no slot.
pub fn slot_sizes(nodes: &[NodeId], broadcast_s: &[f64], betas: &[f64], t_slot: f64) -> Result<Vec<NodeSlots>> {
    if nodes.len() != broadcast_s.len() || nodes.len() != betas.len() {
        return Err(Error::domain("slot_sizes", "node, allocation and beta lists differ in length"));
    }
    if !(t_slot > 0.0 && t_slot.is_finite()) {
        return Err(Error::domain("slot_sizes", format!("basic slot must be positive, got {t_slot}")));
    }
    let airtime: Vec<(usize, f64)> = broadcast_s
        .iter()
        .zip(betas)
        .map(|(&x, &b)| (1.0 + b) * x)
        .enumerate()
        .filter(|&(_, a)| a > 0.0)
        .collect();
    let smallest = airtime.iter().map(|&(_, a)| a).fold(f64::INFINITY, f64::min);
    if airtime.is_empty() || !smallest.is_finite() {
        return Err(Error::DegenerateAllocation("no node has positive broadcast time".into()));
    }
    Ok(airtime
        .into_iter()
        .map(|(i, a)| {
            let whole = a / smallest * t_slot;
            NodeSlots {
                node: nodes[i],
                whole_s: whole,
                upload_s: betas[i] * whole / (1.0 + betas[i]),
                broadcast_s: whole / (1.0 + betas[i]),
            }
        })
        .collect())
}

/// Round-robin order: ascending id with the group owner last, so its
/// broadcasts follow the uploads of the same cycle.
pub fn default_order(slots: &[NodeSlots], go: NodeId) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = slots.iter().map(|s| s.node).filter(|&n| n != go).collect();
    order.sort();
    if slots.iter().any(|s| s.node == go) {
        order.push(go);
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Upload,
    Broadcast,
}

impl SlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SlotKind::Upload => "upload",
            SlotKind::Broadcast => "broadcast",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry {
    pub node: NodeId,
    pub kind: SlotKind,
    pub start_s: f64,
    pub duration_s: f64,
}

impl ScheduleEntry {
    pub fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

/// A time-slotted plan for one allocation interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    entries: Vec<ScheduleEntry>,
    cycle_length_s: f64,
    t_start_s: f64,
    interval_s: f64,
}

impl Schedule {
    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    pub fn cycle_length(&self) -> f64 {
        self.cycle_length_s
    }

    pub fn t_start(&self) -> f64 {
        self.t_start_s
    }

    pub fn interval(&self) -> f64 {
        self.interval_s
    }

    pub fn end(&self) -> f64 {
        self.t_start_s + self.interval_s
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total scheduled time of one kind for one node.
    pub fn time_of(&self, node: NodeId, kind: SlotKind) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.node == node && e.kind == kind)
            .map(|e| e.duration_s)
            .sum()
    }

    pub fn total_duration(&self) -> f64 {
        self.entries.iter().map(|e| e.duration_s).sum()
    }

    /// CSV with header `node_id,kind,start_s,duration_s`, six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,kind,start_s,duration_s\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{:.6},{:.6}", e.node, e.kind.as_str(), e.start_s, e.duration_s);
        }
        out
    }
}

/// Repeats the cycle (upload then broadcast per node, in `order`) from
/// `t_start` and cuts the last cycle at `t_start + interval`.
pub fn build_schedule(slots: &[NodeSlots], interval: f64, order: &[NodeId], t_start: f64) -> Result<Schedule> {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(Error::domain("build_schedule", format!("interval must be positive, got {interval}")));
    }
    if order.len() != slots.len() {
        return Err(Error::domain("build_schedule", "order must list every slotted node exactly once"));
    }
    let mut pattern = Vec::with_capacity(2 * slots.len());
    let mut offset = 0.0;
    for (k, &node) in order.iter().enumerate() {
        if order[..k].contains(&node) {
            return Err(Error::domain("build_schedule", format!("node {node} appears twice in the order")));
        }
        let s = slots
            .iter()
            .find(|s| s.node == node)
            .ok_or_else(|| Error::domain("build_schedule", format!("node {node} has no slot")))?;
        for (kind, d) in [(SlotKind::Upload, s.upload_s), (SlotKind::Broadcast, s.broadcast_s)] {
            if d > 0.0 {
                pattern.push((node, kind, offset, d));
                offset += d;
            }
        }
    }
    let cycle = offset;
    if cycle > interval {
        return Err(Error::CycleExceedsInterval { cycle, interval });
    }

    let end = t_start + interval;
    let mut entries = Vec::new();
    if cycle > 0.0 {
        'cycles: for k in 0.. {
            let base = t_start + k as f64 * cycle;
            for &(node, kind, off, d) in &pattern {
                let start = base + off;
                if start >= end - SLIVER_S {
                    break 'cycles;
                }
                let duration = d.min(end - start);
                if duration > SLIVER_S {
                    entries.push(ScheduleEntry { node, kind, start_s: start, duration_s: duration });
                }
            }
        }
    }
    Ok(Schedule {
        entries,
        cycle_length_s: cycle,
        t_start_s: t_start,
        interval_s: interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: u32) -> Vec<NodeId> {
        (1..=n).map(NodeId).collect()
    }

    fn table1_slots() -> Vec<NodeSlots> {
        let c = 5.0 / 7.0;
        let x = [c, c, c, 20.0 / 7.0, c, c];
        let betas = [1.0, 1.0, 1.0, 0.0, 1.0, 1.0];
        slot_sizes(&ids(6), &x, &betas, 0.020).unwrap()
    }

    #[test]
    fn table1_slot_sizes() {
        for s in table1_slots() {
            if s.node == NodeId(4) {
                assert!((s.whole_s - 0.040).abs() < 1e-12);
                assert_eq!(s.upload_s, 0.0);
                assert!((s.broadcast_s - 0.040).abs() < 1e-12);
            } else {
                assert!((s.whole_s - 0.020).abs() < 1e-12);
                assert!((s.upload_s - 0.010).abs() < 1e-12);
                assert!((s.broadcast_s - 0.010).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_and_direct_slots() {
        let s = slot_sizes(&ids(3), &[2.0, 2.0, 2.0], &[0.5, 0.5, 0.5], 0.01).unwrap();
        assert!(s.iter().all(|s| (s.whole_s - 0.01).abs() < 1e-15));
        let s = slot_sizes(&ids(2), &[3.0, 1.0], &[0.0, 0.0], 0.1).unwrap();
        assert_eq!(s[1].upload_s, 0.0);
        assert_eq!(s[1].broadcast_s, s[1].whole_s);
        assert!((s[0].whole_s - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_allocations_are_dropped_or_rejected() {
        let s = slot_sizes(&ids(3), &[1.0, 0.0, 2.0], &[1.0, 1.0, 0.0], 0.01).unwrap();
        assert_eq!(s.iter().map(|s| s.node).collect::<Vec<_>>(), vec![NodeId(1), NodeId(3)]);
        assert!(matches!(
            slot_sizes(&ids(2), &[0.0, 0.0], &[0.0, 0.0], 0.01),
            Err(Error::DegenerateAllocation(_))
        ));
        assert!(slot_sizes(&ids(2), &[1.0, 1.0], &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn table1_schedule_truncates_mid_cycle() {
        let slots = table1_slots();
        let order = default_order(&slots, NodeId(4));
        assert_eq!(order, vec![NodeId(1), NodeId(2), NodeId(3), NodeId(5), NodeId(6), NodeId(4)]);
        let s = build_schedule(&slots, 10.0, &order, 0.0).unwrap();
        assert!((s.cycle_length() - 0.140).abs() < 1e-12);
        // 71 whole cycles fill 9.94 s; the 60 ms left serve nodes 1 to 3.
        for n in [1, 2, 3] {
            assert!((s.time_of(NodeId(n), SlotKind::Broadcast) - 0.72).abs() < 1e-9);
        }
        for n in [5, 6] {
            assert!((s.time_of(NodeId(n), SlotKind::Broadcast) - 0.71).abs() < 1e-9);
        }
        assert!((s.time_of(NodeId(4), SlotKind::Broadcast) - 2.84).abs() < 1e-9);
        assert_eq!(s.time_of(NodeId(4), SlotKind::Upload), 0.0);
        assert!((s.total_duration() - 10.0).abs() < 1e-9);
        // Every scheduled broadcast total is within one whole slot of x.
        for slot in &slots {
            let x = if slot.node == NodeId(4) { 20.0 / 7.0 } else { 5.0 / 7.0 };
            assert!((s.time_of(slot.node, SlotKind::Broadcast) - x).abs() <= slot.whole_s);
        }
    }

    #[test]
    fn entries_are_contiguous_with_upload_before_broadcast() {
        let slots = table1_slots();
        let s = build_schedule(&slots, 1.0, &default_order(&slots, NodeId(4)), 5.0).unwrap();
        let e = s.entries();
        assert_eq!(e[0].start_s, 5.0);
        for w in e.windows(2) {
            assert!((w[0].end_s() - w[1].start_s).abs() < 1e-9);
            if w[0].kind == SlotKind::Upload {
                assert_eq!(w[1].kind, SlotKind::Broadcast);
                assert_eq!(w[1].node, w[0].node);
            }
        }
        assert!(e.last().unwrap().end_s() <= s.end() + 1e-12);
    }

    #[test]
    fn whole_cycles_give_exact_totals() {
        let slots = slot_sizes(&ids(3), &[1.0, 2.0, 1.0], &[0.0, 1.0, 1.0], 0.05).unwrap();
        let cycle: f64 = slots.iter().map(|s| s.whole_s).sum();
        let s = build_schedule(&slots, 4.0 * cycle, &default_order(&slots, NodeId(1)), 0.0).unwrap();
        for slot in &slots {
            assert!((s.time_of(slot.node, SlotKind::Broadcast) - 4.0 * slot.broadcast_s).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_longer_than_interval_fails() {
        let slots = table1_slots();
        let order = default_order(&slots, NodeId(4));
        assert!(matches!(
            build_schedule(&slots, 0.1, &order, 0.0),
            Err(Error::CycleExceedsInterval { .. })
        ));
        assert!(build_schedule(&slots, 1.0, &order[1..], 0.0).is_err());
    }

    #[test]
    fn csv_format() {
        let slots = slot_sizes(&ids(2), &[1.0, 1.0], &[0.0, 0.0], 0.1).unwrap();
        let s = build_schedule(&slots, 0.3, &default_order(&slots, NodeId(2)), 0.0).unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "node_id,kind,start_s,duration_s");
        assert_eq!(lines[1], "1,broadcast,0.000000,0.100000");
        assert_eq!(lines[2], "2,broadcast,0.100000,0.100000");
        assert_eq!(lines[3], "1,broadcast,0.200000,0.100000");
        assert_eq!(lines.len(), 4);
    }
}
