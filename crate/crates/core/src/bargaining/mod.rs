//! Airtime bargaining among the members of one contact group.

mod baselines;
mod kkt;
mod metrics;
mod oracle;
mod problem;
mod solver;
mod utility;

pub use baselines::{eql_allocate, proportional_allocate, wtd_allocate};
pub use kkt::{kkt_residuals, KktReport};
pub use metrics::{dissemination_rate, log_nash_welfare, nash_product, wpf_aggregate};
pub use oracle::oracle_allocate;
pub use problem::{Allocation, BargainingProblem, Player, Role, BUDGET_TOLERANCE};
pub use solver::gnbs_allocate;
pub use utility::Utility;
