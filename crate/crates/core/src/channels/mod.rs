//! Communication media between the swarm and the decision-maker.
//!
//! * [`sfc`]: the event channel used by the inside/outside design. Every
//!   true event survives collisions; spurious events appear with a tunable
//!   probability.
//! * [`tdma`] and [`ranging`]: the periodic distance-report pipeline of the
//!   position design, with trilateration at the decision-maker.
//! * [`delay`]: the detection-delay abstraction of that pipeline.
//! * [`control`]: the error-free broadcast channel for return commands.

pub mod control;
pub mod delay;
pub mod ranging;
pub mod sfc;
pub mod tdma;

use serde::{Deserialize, Serialize};

use crate::semantics::Event;

pub use control::{broadcast_command, ControlChannel};
pub use delay::detection_delay_sample;
pub use ranging::{measure_distance, trilaterate, AnchorSet};
pub use sfc::{sfc_deliver, SfcChannel, SfcChannelParams};
pub use tdma::{tdma_slot, TdmaSchedule, TdmaSlot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub anchor: usize,
    pub drone: usize,
    pub distance: f64,
}

/// What the decision-maker receives in one slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelObservation {
    pub slot: u64,
    pub received_events: Vec<Event>,
    pub distance_report: Option<DistanceReport>,
}

impl ChannelObservation {
    pub fn silence(slot: u64) -> Self {
        Self {
            slot,
            ..Self::default()
        }
    }

    pub fn is_silent(&self) -> bool {
        self.received_events.is_empty() && self.distance_report.is_none()
    }
}
