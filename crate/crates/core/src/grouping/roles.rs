use super::contact::{ConnectivityGraph, ContactTable};
use crate::bargaining::Role;
use crate::{Error, NodeId, Result};

/// Outcome of group-owner selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAssignment {
    pub group_owner: NodeId,
    /// Every other member, ascending by id.
    pub clients: Vec<NodeId>,
}

impl RoleAssignment {
    pub fn role_of(&self, id: NodeId) -> Option<Role> {
        if id == self.group_owner {
            Some(Role::GroupOwner)
        } else if self.clients.contains(&id) {
            Some(Role::Client)
        } else {
            None
        }
    }

    pub fn members(&self) -> Vec<NodeId> {
        let mut all = self.clients.clone();
        all.push(self.group_owner);
        all.sort();
        all
    }
}

/// The group owner one node elects from its own table: among the members
/// that reach all others directly, the one with the largest load, smallest
/// id on ties.
pub fn elect_group_owner(table: &ContactTable, graph: &ConnectivityGraph) -> Result<NodeId> {
    let members = table.members();
    let mut best: Option<(NodeId, f64)> = None;
    for &k in &members {
        if !graph.reaches_all(k, &members) {
            continue;
        }
        let load = table.load_of(k).expect("member of its own table");
        // Members are visited by ascending id, so a strict comparison keeps
        // the smallest id among equal loads.
        if best.is_none_or(|(_, b)| load > b) {
            best = Some((k, load));
        }
    }
    best.map(|(k, _)| k).ok_or(Error::NoCandidate)
}

/// Runs the election at every node and checks that all views agree.
pub fn select_roles(tables: &[ContactTable], graph: &ConnectivityGraph) -> Result<RoleAssignment> {
    let first = tables.first().ok_or(Error::NoCandidate)?;
    let go = elect_group_owner(first, graph)?;
    let members = first.members();
    for t in &tables[1..] {
        let other = elect_group_owner(t, graph)?;
        if other != go {
            return Err(Error::InconsistentRoles(format!(
                "node {} elects {go} but node {} elects {other}",
                first.owner(),
                t.owner()
            )));
        }
        if t.members() != members {
            return Err(Error::InconsistentRoles(format!(
                "nodes {} and {} see different member sets",
                first.owner(),
                t.owner()
            )));
        }
    }
    let clients = members.into_iter().filter(|&k| k != go).collect();
    Ok(RoleAssignment { group_owner: go, clients })
}

/// Airtime to spread every member's data when `go` relays: the GO
/// broadcasts its own data once, clients upload and then the GO rebroadcasts.
pub fn total_broadcast_time(loads: &[(NodeId, f64)], go: NodeId, rate: f64) -> Result<f64> {
    if rate.is_nan() || rate <= 0.0 {
        return Err(Error::domain("total_broadcast_time", format!("rate must be positive, got {rate}")));
    }
    if !loads.iter().any(|&(id, _)| id == go) {
        return Err(Error::domain("total_broadcast_time", format!("node {go} is not in the load list")));
    }
    let total: f64 = loads
        .iter()
        .map(|&(id, m)| if id == go { m } else { 2.0 * m })
        .sum();
    Ok(total / rate)
}

/// Allocation interval: the shortest contact duration between the GO and
/// any current member, read from the GO's own table.
pub fn allocation_interval(table: &ContactTable, go: NodeId) -> Result<f64> {
    if table.owner() != go {
        return Err(Error::domain(
            "allocation_interval",
            format!("table belongs to node {}, not to the group owner {go}", table.owner()),
        ));
    }
    table
        .entries()
        .iter()
        .map(|e| e.pcd_s)
        .reduce(f64::min)
        .ok_or_else(|| Error::domain("allocation_interval", "the group owner has no peers"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransmissionMode {
    /// Fewer than two members: nothing to exchange.
    Idle,
    /// Two members send to each other directly; no uploads.
    UnicastPair,
    /// Clients upload to the GO, which broadcasts.
    GoCoordinated,
}

pub fn select_transmission_mode(group_size: usize) -> TransmissionMode {
    match group_size {
        0 | 1 => TransmissionMode::Idle,
        2 => TransmissionMode::UnicastPair,
        _ => TransmissionMode::GoCoordinated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::ContactEvent;

    const A: NodeId = NodeId(1);
    const B: NodeId = NodeId(2);
    const C: NodeId = NodeId(3);
    const D: NodeId = NodeId(4);

    fn tables(loads: &[(NodeId, f64)]) -> Vec<ContactTable> {
        loads
            .iter()
            .map(|&(owner, m)| {
                let mut t = ContactTable::new(owner, m);
                for &(id, data_mb) in loads.iter().filter(|(id, _)| *id != owner) {
                    t.apply(ContactEvent::Join { id, pcd_s: 10.0, data_mb }).unwrap();
                }
                t
            })
            .collect()
    }

    fn fig3_graph() -> ConnectivityGraph {
        ConnectivityGraph::from_edges([(A, B), (A, C), (A, D), (C, B), (C, D)]).unwrap()
    }

    #[test]
    fn fig3_picks_the_heavier_candidate() {
        let loads = [(A, 10.0), (B, 20.0), (C, 30.0), (D, 40.0)];
        let roles = select_roles(&tables(&loads), &fig3_graph()).unwrap();
        assert_eq!(roles.group_owner, C);
        assert_eq!(roles.clients, vec![A, B, D]);
        assert_eq!(roles.role_of(D), Some(Role::Client));
        assert!((total_broadcast_time(&loads, A, 10.0).unwrap() - 19.0).abs() < 1e-12);
        assert!((total_broadcast_time(&loads, C, 10.0).unwrap() - 17.0).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_picks_max_load_and_smallest_id_on_tie() {
        let loads = [(A, 5.0), (B, 9.0), (C, 9.0), (D, 1.0)];
        let g = ConnectivityGraph::complete([A, B, C, D]);
        assert_eq!(select_roles(&tables(&loads), &g).unwrap().group_owner, B);
    }

    #[test]
    fn no_candidate_without_a_hub() {
        let loads = [(A, 1.0), (B, 1.0), (C, 1.0), (D, 1.0)];
        let ring = ConnectivityGraph::from_edges([(A, B), (B, C), (C, D), (D, A)]).unwrap();
        assert_eq!(select_roles(&tables(&loads), &ring), Err(Error::NoCandidate));
    }

    #[test]
    fn disagreeing_views_are_reported() {
        let mut ts = tables(&[(A, 1.0), (B, 2.0)]);
        ts[1].set_owner_data(0.5);
        let g = ConnectivityGraph::complete([A, B]);
        assert!(matches!(select_roles(&ts, &g), Err(Error::InconsistentRoles(_))));
    }

    #[test]
    fn single_node_broadcast_time() {
        assert_eq!(total_broadcast_time(&[(A, 30.0)], A, 10.0).unwrap(), 3.0);
    }

    #[test]
    fn interval_is_shortest_pcd_from_go() {
        let mut t = ContactTable::new(A, 1.0);
        for (id, pcd) in [(B, 5.0), (C, 8.0), (D, 12.0)] {
            t.apply(ContactEvent::Join { id, pcd_s: pcd, data_mb: 1.0 }).unwrap();
        }
        assert_eq!(allocation_interval(&t, A).unwrap(), 5.0);
        t.apply(ContactEvent::Leave(B)).unwrap();
        assert_eq!(allocation_interval(&t, A).unwrap(), 8.0);
        assert!(allocation_interval(&t, B).is_err());
        t.apply(ContactEvent::SelfLeave).unwrap();
        assert!(allocation_interval(&t, A).is_err());
    }

    #[test]
    fn modes_by_size() {
        assert_eq!(select_transmission_mode(1), TransmissionMode::Idle);
        assert_eq!(select_transmission_mode(2), TransmissionMode::UnicastPair);
        assert_eq!(select_transmission_mode(3), TransmissionMode::GoCoordinated);
    }
}
