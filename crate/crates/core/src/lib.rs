//! Discrete-time simulator for keeping a drone swarm inside its assigned
//! cells under three status-update designs:
//!
//! * `s1`: no state, blind return commands on random timers;
//! * `s2`: a binary inside/outside state sent on change over a collision
//!   tolerant event channel;
//! * `s3`: full position, via periodic distance reports and trilateration.
//!
//! The crate covers arena geometry, drone motion, the three semantic
//! mappings, the channels, the decision-maker, the metrics, and an
//! experiment harness (`sfcsim` binary) with TOML configuration.

pub mod channels;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod semantics;

pub use controller::{ControllerParams, ControllerState};
pub use dynamics::{DroneState, Mode, WalkParams};
pub use error::SimError;
pub use geometry::{Arena, CellId, Vec2};
pub use harness::{
    calibrate, calibrate_false_positive, replicate, run, run_replication, sweep, SimConfig,
};
pub use metrics::{MetricsReport, PooledReport};
pub use semantics::{SchemeId, SemanticState};
