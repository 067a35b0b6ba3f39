//! Controlled gossip dissemination on mobile networks.
//!
//! Flooding every contact delivers messages fast but at an enormous
//! transmission cost. This crate tunes the per-contact forwarding
//! probability instead: an infection model over the current contact density
//! is inverted so that a message reaches a chosen fraction of the hosts by a
//! chosen deadline, and a buffer-limited gossip protocol then spreads it at
//! exactly that rate.
//!
//! The pieces compose bottom-up:
//!
//! - [`models`]: SIR/SIS dynamics on a contact graph, solved with fixed-step
//!   RK4.
//! - [`tuner`]: inverts the model — smallest infectivity reaching a target
//!   fraction by a deadline.
//! - [`mobility`]: random-waypoint motion with disk-graph contact snapshots.
//! - [`traces`]: co-location session logs sliced into per-slot contact
//!   graphs.
//! - [`protocol`]: the round-based gossip engine with FIFO buffers, duplicate
//!   suppression, and online rate estimation.
//! - [`metrics`]: delivery/cost accounting over finished runs.
//! - [`baselines`]: untuned fixed-probability flooding for comparison.
//! - [`harness`]: reproducible multi-replication experiments with CSV/JSON
//!   output.
//!
//! Start with the runnable programs in `examples/` — each demonstrates one
//! capability end to end — or with the `epcast` binary (`run`, `tune`,
//! `trace-stats`).

pub mod baselines;
pub mod contact;
pub mod harness;
pub mod metrics;
pub mod mobility;
pub mod models;
pub mod protocol;
pub mod rng;
pub mod traces;
pub mod tuner;

pub use contact::{ContactSnapshot, NodeId};
pub use models::{EpidemicParams, ModelError, ModelKind, Sample, Trajectory};
pub use tuner::{TuneError, TuneRequest, TuneResult};
