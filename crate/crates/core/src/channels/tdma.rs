use serde::{Deserialize, Serialize};

pub const ANCHORS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TdmaSlot {
    pub anchor: usize,
    pub drone: usize,
}

/// Cyclic schedule serving every (anchor, drone) pair once per frame of
/// `3 × drones` slots, anchor-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdmaSchedule {
    pub drones: usize,
}

impl TdmaSchedule {
    pub fn new(drones: usize) -> Self {
        assert!(drones > 0, "TDMA schedule needs at least one drone");
        Self { drones }
    }

    pub fn frame_len(&self) -> u64 {
        (ANCHORS * self.drones) as u64
    }

    pub fn slot(&self, k: u64) -> TdmaSlot {
        let m = (k % self.frame_len()) as usize;
        TdmaSlot {
            anchor: m / self.drones,
            drone: m % self.drones,
        }
    }
}

/// Schedule for the nine-drone swarm: 27-slot frame.
pub fn tdma_slot(k: u64) -> TdmaSlot {
    TdmaSchedule::new(9).slot(k)
}
