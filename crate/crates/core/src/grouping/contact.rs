use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, NodeId, Result};

/// What one node knows about a peer in its group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEntry {
    pub id: NodeId,
    /// Estimated pairwise contact duration with the table owner, seconds.
    pub pcd_s: f64,
    /// The peer's data load, megabits.
    pub data_mb: f64,
}

/// Contact-table change seen by the owner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactEvent {
    Join { id: NodeId, pcd_s: f64, data_mb: f64 },
    Leave(NodeId),
    /// The owner itself leaves the group and forgets everyone.
    SelfLeave,
}

/// One node's view of its current group.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactTable {
    owner: NodeId,
    owner_data_mb: f64,
    entries: Vec<ContactEntry>,
}

impl ContactTable {
    pub fn new(owner: impl Into<NodeId>, owner_data_mb: f64) -> Self {
        ContactTable {
            owner: owner.into(),
            owner_data_mb,
            entries: Vec::new(),
        }
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn owner_data(&self) -> f64 {
        self.owner_data_mb
    }

    pub fn set_owner_data(&mut self, data_mb: f64) {
        self.owner_data_mb = data_mb;
    }

    pub fn entries(&self) -> &[ContactEntry] {
        &self.entries
    }

    pub fn entry(&self, id: NodeId) -> Option<&ContactEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The owner plus every peer in the table, ascending by id.
    pub fn members(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.entries.iter().map(|e| e.id).collect();
        ids.push(self.owner);
        ids.sort();
        ids
    }

    /// Data load of a member as seen by this table.
    pub fn load_of(&self, id: NodeId) -> Option<f64> {
        if id == self.owner {
            Some(self.owner_data_mb)
        } else {
            self.entry(id).map(|e| e.data_mb)
        }
    }

    pub fn apply(&mut self, event: ContactEvent) -> Result<()> {
        match event {
            ContactEvent::Join { id, pcd_s, data_mb } => {
                if id == self.owner || self.entry(id).is_some() {
                    return Err(Error::DuplicateJoin(id));
                }
                check_entry(pcd_s, data_mb)?;
                self.entries.push(ContactEntry { id, pcd_s, data_mb });
            }
            ContactEvent::Leave(id) => {
                let pos = self.entries.iter().position(|e| e.id == id).ok_or(Error::UnknownLeave(id))?;
                self.entries.remove(pos);
            }
            ContactEvent::SelfLeave => self.entries.clear(),
        }
        Ok(())
    }

    /// Overwrites the estimated PCD and load of an existing peer, as happens
    /// when nodes re-exchange their information at the start of a round.
    pub fn refresh(&mut self, id: NodeId, pcd_s: f64, data_mb: f64) -> Result<()> {
        check_entry(pcd_s, data_mb)?;
        let entry = self
            .entries
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or(Error::UnknownLeave(id))?;
        entry.pcd_s = pcd_s;
        entry.data_mb = data_mb;
        Ok(())
    }
}

fn check_entry(pcd_s: f64, data_mb: f64) -> Result<()> {
    if !(pcd_s > 0.0 && pcd_s.is_finite()) {
        return Err(Error::domain("contact table", format!("contact duration must be positive, got {pcd_s}")));
    }
    if !(data_mb >= 0.0 && data_mb.is_finite()) {
        return Err(Error::domain("contact table", format!("data load must be non-negative, got {data_mb}")));
    }
    Ok(())
}

/// Functional form of [`ContactTable::apply`].
pub fn update_contact_table(table: &ContactTable, event: ContactEvent) -> Result<ContactTable> {
    let mut next = table.clone();
    next.apply(event)?;
    Ok(next)
}

/// Undirected "can talk directly" relation between nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConnectivityGraph {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl ConnectivityGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every pair of the given nodes is connected.
    pub fn complete(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
        let mut g = Self::new();
        for &a in &nodes {
            let others = nodes.iter().copied().filter(|&b| b != a).collect();
            g.adjacency.insert(a, others);
        }
        g
    }

    pub fn from_edges(edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut g = Self::new();
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, id: NodeId) {
        self.adjacency.entry(id).or_default();
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        if a == b {
            return Err(Error::domain("connectivity graph", format!("self-loop on node {a}")));
        }
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
        Ok(())
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.get(&id).into_iter().flatten().copied()
    }

    /// True when `id` reaches every other node of `members` directly.
    pub fn reaches_all(&self, id: NodeId, members: &[NodeId]) -> bool {
        members.iter().all(|&m| m == id || self.is_adjacent(id, m))
    }
}
