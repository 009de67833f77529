//! Redundant link aggregation: a deterministic discrete-time simulator and
//! the forwarding policies it compares.
//!
//! - [`link`] holds uplinks and validated aggregation groups.
//! - [`forwarding`] implements odd load balancing, round robin, cost
//!   weighted fair queueing and an active/standby VRRP baseline.
//! - [`engine`] runs a demand trace through a group tick by tick.
//! - [`trace`] reads and writes the CSV inputs and builds synthetic traces.
//! - [`report`] turns a run into supply, shortfall, cost and reordering CSV.
//! - [`scenario`] bundles the two reference scenarios.

pub mod cli;
pub mod engine;
pub mod forwarding;
pub mod link;
pub mod report;
pub mod scenario;
pub mod trace;

pub use engine::{
    run, step, EngineConfig, FailureSchedule, SimError, SimulationResult, TickRecord,
};
pub use forwarding::{Forwarder, PolicyId, PolicyState, WfqDirection};
pub use link::{validate_group, AggregationGroup, GroupError, Link};
pub use trace::{parse_links, parse_trace, synth_diurnal, DemandTrace, TraceError};
