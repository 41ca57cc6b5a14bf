//! Group management around the allocator: contact tables, group-owner
//! selection, allocation intervals and the round-robin slot scheduler.

mod contact;
mod roles;
mod schedule;

pub use contact::{update_contact_table, ConnectivityGraph, ContactEntry, ContactEvent, ContactTable};
pub use roles::{
    allocation_interval, elect_group_owner, select_roles, select_transmission_mode, total_broadcast_time,
    RoleAssignment, TransmissionMode,
};
pub use schedule::{build_schedule, default_order, slot_sizes, NodeSlots, Schedule, ScheduleEntry, SlotKind};
