use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ChannelObservation;
use crate::error::ChannelError;
use crate::rng::StreamRng;
use crate::semantics::{Direction, Event, SemanticState, TransmitDecision};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfcChannelParams {
    /// Probability per slot that the receiver registers one spurious event.
    #[serde(default)]
    pub p_fp: f64,
    /// Probability that a true event is lost.
    #[serde(default)]
    pub p_fn: f64,
}

impl SfcChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        for (name, p) in [("p_fp", self.p_fp), ("p_fn", self.p_fn)] {
            if !(0.0..1.0).contains(&p) {
                return Err(ChannelError::InvalidParams(format!(
                    "{name} must lie in [0, 1), got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Delivers one slot's events.
///
/// All true events reach the receiver no matter how many share the slot
/// (each is lost independently with `p_fn`). With probability `p_fp` one
/// spurious event is added for a uniformly chosen drone, pointing away from
/// that drone's current estimated flag.
pub fn sfc_deliver<R: Rng + ?Sized>(
    slot: u64,
    decision: &TransmitDecision,
    estimate: &SemanticState,
    params: &SfcChannelParams,
    rng: &mut R,
) -> ChannelObservation {
    let mut received = if params.p_fn > 0.0 {
        decision
            .events
            .iter()
            .copied()
            .filter(|_| rng.random::<f64>() >= params.p_fn)
            .collect()
    } else {
        decision.events.clone()
    };
    if params.p_fp > 0.0 && rng.random::<f64>() < params.p_fp {
        if let SemanticState::Inside(flags) = estimate {
            if !flags.is_empty() {
                let drone = rng.random_range(0..flags.len());
                let direction = if flags[drone] {
                    Direction::Out
                } else {
                    Direction::In
                };
                received.push(Event::new(drone, direction));
            }
        }
    }
    ChannelObservation {
        slot,
        received_events: received,
        distance_report: None,
    }
}

/// The event channel with its own random stream.
#[derive(Debug, Clone)]
pub struct SfcChannel {
    pub params: SfcChannelParams,
    rng: StreamRng,
}

impl SfcChannel {
    pub fn new(params: SfcChannelParams, rng: StreamRng) -> Result<Self, ChannelError> {
        params.validate()?;
        Ok(Self { params, rng })
    }

    pub fn deliver(
        &mut self,
        slot: u64,
        decision: &TransmitDecision,
        estimate: &SemanticState,
    ) -> ChannelObservation {
        sfc_deliver(slot, decision, estimate, &self.params, &mut self.rng)
    }
}
