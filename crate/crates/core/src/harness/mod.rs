//! Configuration, the simulation loop, and the experiment drivers built on
//! it (replication, calibration, sweeps), plus file output.

pub mod calibrate;
pub mod config;
pub mod output;
pub mod replicate;
pub mod sim;
pub mod sweep;

pub use calibrate::{calibrate, calibrate_false_positive, FpCalibration, WalkCalibration};
pub use config::{S3Mode, SimConfig, LONG_RUN_SLOTS, SHORT_RUN_SLOTS};
pub use replicate::{replicate, Replication};
pub use sim::{run, run_replication, PathSample, RunArtifacts, Simulation};
pub use sweep::{sweep, SweepRow};
