//! Fair airtime allocation for GO-coordinated content dissemination in
//! short-lived wireless contact groups.
//!
//! The crate has three layers:
//!
//! - [`bargaining`]: the generalized Nash bargaining allocator, the EQL/WTD
//!   baselines, welfare metrics, a KKT certificate and a brute-force oracle.
//! - [`grouping`]: contact tables, group-owner selection, allocation
//!   intervals and the round-robin slot scheduler.
//! - [`sim`]: a seeded, deterministic simulation of a group's lifetime with
//!   join/leave events, contact-duration estimation error and packet loss.

use std::fmt;

pub mod bargaining;
pub mod error;
pub mod grouping;
pub mod numeric;
pub mod sim;

pub use error::{Error, Result};

/// Identifier of a node taking part in a contact group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}
