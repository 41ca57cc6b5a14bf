use std::fmt;

use crate::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the function it was passed to.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The problem instance violates a structural invariant.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// No allocation gives every player more than its disagreement utility.
    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("node {0} already joined the contact table")]
    DuplicateJoin(NodeId),

    #[error("node {0} is not in the contact table")]
    UnknownLeave(NodeId),

    #[error("no node can reach every other member, so no group owner can be selected")]
    NoCandidate,

    #[error("contact tables disagree on the group owner: {0}")]
    InconsistentRoles(String),

    #[error("allocation is degenerate: {0}")]
    DegenerateAllocation(String),

    #[error("one scheduling cycle ({cycle:.6} s) exceeds the allocation interval ({interval:.6} s)")]
    CycleExceedsInterval { cycle: f64, interval: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("round {index} at t={start:.3} s: {source}")]
    Round {
        index: usize,
        start: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl fmt::Display) -> Self {
        Error::Domain {
            op,
            detail: detail.to_string(),
        }
    }

    /// True when the root cause is an infeasible allocation problem.
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::Infeasible(_) => true,
            Error::Round { source, .. } => source.is_infeasible(),
            _ => false,
        }
    }
}
