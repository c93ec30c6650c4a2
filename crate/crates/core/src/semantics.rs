//! Semantic-functional states of the swarm and the functions acting on them:
//! the state mapping from drone attributes, the transmit-on-change rule
//! (history depth one), the hold-last estimator and the transmission
//! indicator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::ChannelObservation;
use crate::dynamics::DroneState;
use crate::error::SemanticsError;
use crate::geometry::Arena;

/// The three state-space designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    /// No state: blind periodic return commands.
    S1,
    /// Per-drone inside/outside flags, event-triggered reporting.
    S2,
    /// Quantized positions, periodic TDMA ranging.
    S3,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::S1, SchemeId::S2, SchemeId::S3];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::S1 => "s1",
            SchemeId::S2 => "s2",
            SchemeId::S3 => "s3",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(SchemeId::S1),
            "s2" => Ok(SchemeId::S2),
            "s3" => Ok(SchemeId::S3),
            other => Err(format!("unknown scheme '{other}' (expected s1, s2 or s3)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemanticState {
    Empty,
    /// `true` while drone `i` is inside its assigned cell.
    Inside(Vec<bool>),
    /// `(floor(x/q), floor(y/q))` per drone.
    Quantized(Vec<(i64, i64)>),
}

impl SemanticState {
    pub fn variant_name(&self) -> &'static str {
        match self {
            SemanticState::Empty => "empty",
            SemanticState::Inside(_) => "inside-flags",
            SemanticState::Quantized(_) => "quantized",
        }
    }

    pub fn inside_flags(&self) -> Result<&[bool], SemanticsError> {
        match self {
            SemanticState::Inside(f) => Ok(f),
            other => Err(SemanticsError::VariantMismatch {
                expected: "inside-flags",
                found: other.variant_name(),
            }),
        }
    }

    /// In-place form of [`estimate_hold`].
    pub fn apply_observation(&mut self, obs: &ChannelObservation) -> Result<(), SemanticsError> {
        if obs.received_events.is_empty() {
            return Ok(());
        }
        match self {
            SemanticState::Inside(flags) => {
                for ev in &obs.received_events {
                    if let Some(f) = flags.get_mut(ev.drone) {
                        *f = ev.direction == Direction::In;
                    }
                }
                Ok(())
            }
            other => Err(SemanticsError::VariantMismatch {
                expected: "inside-flags",
                found: other.variant_name(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// A border-crossing event of one drone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub drone: usize,
    pub direction: Direction,
}

impl Event {
    pub fn new(drone: usize, direction: Direction) -> Self {
        Self { drone, direction }
    }
}

/// Channel input for one slot. No events means the sensors stay silent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransmitDecision {
    pub events: Vec<Event>,
}

impl TransmitDecision {
    pub fn silent() -> Self {
        Self::default()
    }

    pub fn is_silent(&self) -> bool {
        self.events.is_empty()
    }
}

pub fn quantize(pos: crate::geometry::Vec2, q: f64) -> (i64, i64) {
    ((pos.x / q).floor() as i64, (pos.y / q).floor() as i64)
}

/// Semantic state of the swarm at the current slot. `prev` is the previous
/// slot's attributes (history depth one); none of the three designs needs
/// more than the current sample to form the state itself.
pub fn map_semantic(
    scheme: SchemeId,
    prev: &[DroneState],
    cur: &[DroneState],
    q: f64,
    arena: &Arena,
) -> Result<SemanticState, SemanticsError> {
    if prev.len() != cur.len() {
        return Err(SemanticsError::LengthMismatch(prev.len(), cur.len()));
    }
    match scheme {
        SchemeId::S1 => Ok(SemanticState::Empty),
        SchemeId::S2 => Ok(SemanticState::Inside(
            cur.iter()
                .map(|d| arena.contains(d.assigned_cell, d.pos))
                .collect(),
        )),
        SchemeId::S3 => {
            if !(q.is_finite() && q > 0.0) {
                return Err(SemanticsError::InvalidResolution(q));
            }
            Ok(SemanticState::Quantized(
                cur.iter().map(|d| quantize(d.pos, q)).collect(),
            ))
        }
    }
}

/// Transmit-on-change: one event per drone whose flag differs between the
/// two slots.
pub fn transmit_policy_s2(
    current: &SemanticState,
    previous: &SemanticState,
) -> Result<TransmitDecision, SemanticsError> {
    let cur = current.inside_flags()?;
    let prev = previous.inside_flags()?;
    if cur.len() != prev.len() {
        return Err(SemanticsError::LengthMismatch(prev.len(), cur.len()));
    }
    Ok(TransmitDecision {
        events: crossing_events(prev, cur).collect(),
    })
}

pub(crate) fn crossing_events<'a>(
    prev: &'a [bool],
    cur: &'a [bool],
) -> impl Iterator<Item = Event> + 'a {
    prev.iter()
        .zip(cur)
        .enumerate()
        .filter(|(_, (p, c))| p != c)
        .map(|(i, (_, &c))| Event::new(i, if c { Direction::In } else { Direction::Out }))
}

/// Hold-last recovery: silence keeps the estimate, each received event sets
/// the drone's flag to the event direction.
pub fn estimate_hold(
    prev_estimate: &SemanticState,
    obs: &ChannelObservation,
) -> Result<SemanticState, SemanticsError> {
    let mut next = prev_estimate.clone();
    next.apply_observation(obs)?;
    Ok(next)
}

/// Transmission indicator: 0 for silence, 1 otherwise.
pub fn theta(decision: &TransmitDecision) -> u8 {
    u8::from(!decision.is_silent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DroneState;
    use crate::geometry::Vec2;
    use proptest::prelude::*;

    fn obs_with(events: Vec<Event>) -> ChannelObservation {
        ChannelObservation {
            slot: 0,
            received_events: events,
            distance_report: None,
        }
    }

    #[test]
    fn s2_mapping() {
        let arena = Arena::default();
        let mut swarm = DroneState::swarm(&arena);
        let s = map_semantic(SchemeId::S2, &swarm, &swarm, 1.0, &arena).unwrap();
        assert_eq!(s, SemanticState::Inside(vec![true; 9]));

        // drone 3 lives in cell (1,0); place it in (0,1)'s territory
        swarm[3].pos = Vec2::new(25.0, 10.0);
        let s = map_semantic(SchemeId::S2, &swarm, &swarm, 1.0, &arena).unwrap();
        assert!(!s.inside_flags().unwrap()[3]);
    }

    #[test]
    fn s1_and_s3_mapping() {
        let arena = Arena::default();
        let mut swarm = DroneState::swarm(&arena);
        assert_eq!(
            map_semantic(SchemeId::S1, &swarm, &swarm, 1.0, &arena).unwrap(),
            SemanticState::Empty
        );
        swarm[0].pos = Vec2::new(10.6, 10.2);
        let SemanticState::Quantized(q) =
            map_semantic(SchemeId::S3, &swarm, &swarm, 1.0, &arena).unwrap()
        else {
            panic!("expected quantized state");
        };
        assert_eq!(q[0], (10, 10));
        assert!(map_semantic(SchemeId::S3, &swarm, &swarm, 0.0, &arena).is_err());
        assert!(map_semantic(SchemeId::S2, &swarm[..3], &swarm, 1.0, &arena).is_err());
    }

    #[test]
    fn transmit_on_change() {
        let a = SemanticState::Inside(vec![true; 9]);
        assert!(transmit_policy_s2(&a, &a).unwrap().is_silent());

        let mut f = vec![true; 9];
        f[2] = false;
        let b = SemanticState::Inside(f.clone());
        let d = transmit_policy_s2(&b, &a).unwrap();
        assert_eq!(d.events, vec![Event::new(2, Direction::Out)]);

        let mut g = vec![true; 9];
        g[1] = false;
        g[7] = false;
        let d = transmit_policy_s2(&SemanticState::Inside(g), &a).unwrap();
        assert_eq!(
            d.events,
            vec![Event::new(1, Direction::Out), Event::new(7, Direction::Out)]
        );

        // re-entry
        let d = transmit_policy_s2(&a, &b).unwrap();
        assert_eq!(d.events, vec![Event::new(2, Direction::In)]);

        assert!(transmit_policy_s2(&SemanticState::Empty, &a).is_err());
    }

    #[test]
    fn hold_last_estimate() {
        let est = SemanticState::Inside(vec![true; 9]);
        assert_eq!(estimate_hold(&est, &obs_with(vec![])).unwrap(), est);

        let next = estimate_hold(&est, &obs_with(vec![Event::new(2, Direction::Out)])).unwrap();
        assert!(!next.inside_flags().unwrap()[2]);
        assert_eq!(
            next.inside_flags().unwrap().iter().filter(|f| **f).count(),
            8
        );

        // a spurious out-event for an inside drone makes the estimate diverge
        let truth = SemanticState::Inside(vec![true; 9]);
        let spurious = estimate_hold(&est, &obs_with(vec![Event::new(5, Direction::Out)])).unwrap();
        assert_ne!(spurious, truth);

        assert!(estimate_hold(
            &SemanticState::Empty,
            &obs_with(vec![Event::new(0, Direction::In)])
        )
        .is_err());
    }

    #[test]
    fn theta_indicator() {
        assert_eq!(theta(&TransmitDecision::silent()), 0);
        let one = TransmitDecision {
            events: vec![Event::new(0, Direction::Out)],
        };
        assert_eq!(theta(&one), 1);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("S2".parse::<SchemeId>().unwrap(), SchemeId::S2);
        assert!("s4".parse::<SchemeId>().is_err());
    }

    proptest! {
        // Transmit-on-change plus hold-last is lossless on a perfect channel.
        #[test]
        fn lossless_tracking(flips in prop::collection::vec(prop::collection::vec(any::<bool>(), 9), 1..200)) {
            let mut truth = SemanticState::Inside(vec![true; 9]);
            let mut est = truth.clone();
            for step in flips {
                let next = SemanticState::Inside(step);
                let dec = transmit_policy_s2(&next, &truth).unwrap();
                est = estimate_hold(&est, &obs_with(dec.events)).unwrap();
                truth = next;
                prop_assert_eq!(&est, &truth);
            }
        }

        #[test]
        fn quantization_idempotent_on_grid_corners(i in -100i64..100, j in -100i64..100, q in prop::sample::select(vec![0.25f64, 0.5, 1.0, 2.0])) {
            let p = Vec2::new(i as f64 * q, j as f64 * q);
            let (a, b) = quantize(p, q);
            prop_assert_eq!((a, b), (i, j));
            let back = Vec2::new(a as f64 * q, b as f64 * q);
            prop_assert_eq!(quantize(back, q), (a, b));
        }
    }
}
