//! Decision-maker policies: when to send a return command, given whatever
//! view of the swarm each design provides.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{detection_delay_sample, trilaterate, AnchorSet, ChannelObservation};
use crate::dynamics::{DroneState, Mode};
use crate::error::{ChannelError, SemanticsError};
use crate::geometry::{Arena, CellId};
use crate::semantics::{quantize, Direction, SchemeId, SemanticState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub slot_seconds: f64,
    /// Bounds of the uniform interval between blind commands, seconds.
    pub s1_interval: (f64, f64),
    /// After commanding a drone on an out-event, the decision-maker waits
    /// this many slots for the matching in-event. If none arrives the drone
    /// never left (spurious event) and is back home by now, so its flag is
    /// reset to inside. 0 disables the rule.
    pub reentry_timeout_slots: u64,
    /// Triangulation processing time added to every periodic detection.
    pub proc_delay: f64,
    /// Fire periodic detections even if the drone came back on its own.
    pub command_stale_detections: bool,
    /// Resolution of the quantized position estimate.
    pub q: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            slot_seconds: 0.1,
            s1_interval: (2.0, 5.0),
            reentry_timeout_slots: 10,
            proc_delay: 0.0,
            command_stale_detections: false,
            q: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendingDetection {
    pub drone: usize,
    pub fire_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub scheme: SchemeId,
    pub estimate: SemanticState,
    /// Absolute deadlines (seconds) of the next blind command per drone.
    pub s1_timers: Vec<f64>,
    /// Sorted by `fire_time`.
    pub pending: Vec<PendingDetection>,
    pub params: ControllerParams,
    reentry_deadline: Vec<Option<u64>>,
    last_inside: Vec<bool>,
    ranges: Vec<[Option<f64>; 3]>,
}

impl ControllerState {
    /// Fresh decision-maker for `drones` drones that all start at home.
    /// Blind-command timers get independent initial phases drawn from `rng`.
    pub fn new<R: Rng + ?Sized>(
        scheme: SchemeId,
        drones: &[DroneState],
        params: ControllerParams,
        rng: &mut R,
    ) -> Self {
        let n = drones.len();
        let estimate = match scheme {
            SchemeId::S1 => SemanticState::Empty,
            SchemeId::S2 => SemanticState::Inside(vec![true; n]),
            SchemeId::S3 => {
                SemanticState::Quantized(drones.iter().map(|d| quantize(d.pos, params.q)).collect())
            }
        };
        let s1_timers = if scheme == SchemeId::S1 {
            (0..n).map(|_| draw_interval(&params, rng)).collect()
        } else {
            Vec::new()
        };
        Self {
            scheme,
            estimate,
            s1_timers,
            pending: Vec::new(),
            params,
            reentry_deadline: vec![None; n],
            last_inside: vec![true; n],
            ranges: vec![[None; 3]; n],
        }
    }

    fn schedule(&mut self, drone: usize, fire_time: f64) {
        let at = self.pending.partition_point(|p| p.fire_time <= fire_time);
        self.pending
            .insert(at, PendingDetection { drone, fire_time });
    }

    fn drop_pending(&mut self, drone: usize) {
        self.pending.retain(|p| p.drone != drone);
    }

    /// Detections due at `now`, removed from the queue.
    fn take_due(&mut self, now: f64) -> Vec<PendingDetection> {
        let due = self.pending.partition_point(|p| p.fire_time <= now);
        self.pending.drain(..due).collect()
    }

    /// Blind control: command every drone whose timer has expired and re-arm
    /// it one fresh interval after the old deadline.
    pub fn s1_policy<R: Rng + ?Sized>(&mut self, now: f64, rng: &mut R) -> Vec<usize> {
        let mut commands = Vec::new();
        for i in 0..self.s1_timers.len() {
            if self.s1_timers[i] <= now {
                commands.push(i);
                let next = draw_interval(&self.params, rng);
                self.s1_timers[i] += next;
            }
        }
        commands
    }

    /// Event-triggered control: update the estimate from the observation
    /// and command each drone whose estimated flag just went inside→outside.
    pub fn s2_policy(&mut self, obs: &ChannelObservation) -> Result<Vec<usize>, SemanticsError> {
        let slot = obs.slot;
        let SemanticState::Inside(flags) = &mut self.estimate else {
            return Err(SemanticsError::VariantMismatch {
                expected: "inside-flags",
                found: self.estimate.variant_name(),
            });
        };
        for (i, deadline) in self.reentry_deadline.iter_mut().enumerate() {
            if deadline.is_some_and(|d| slot >= d) {
                flags[i] = true;
                *deadline = None;
            }
        }
        let mut commands = Vec::new();
        for ev in &obs.received_events {
            let Some(flag) = flags.get_mut(ev.drone) else {
                continue;
            };
            let was_inside = *flag;
            *flag = ev.direction == Direction::In;
            match ev.direction {
                Direction::Out if was_inside => {
                    commands.push(ev.drone);
                    if self.params.reentry_timeout_slots > 0 {
                        self.reentry_deadline[ev.drone] =
                            Some(slot + self.params.reentry_timeout_slots);
                    }
                }
                Direction::Out => {}
                Direction::In => self.reentry_deadline[ev.drone] = None,
            }
        }
        Ok(commands)
    }

    /// Periodic control, delay abstraction: a true exit is noticed after a
    /// uniform detection delay; the command fires only if the drone is still
    /// out and not already on its way home.
    pub fn s3_policy<R: Rng + ?Sized>(
        &mut self,
        truth: &[DroneState],
        arena: &Arena,
        now: f64,
        rng: &mut R,
    ) -> Vec<usize> {
        for (i, d) in truth.iter().enumerate() {
            let inside = arena.contains(d.assigned_cell, d.pos);
            if self.last_inside[i] && !inside {
                let delay =
                    detection_delay_sample(self.params.slot_seconds, self.params.proc_delay, rng);
                self.schedule(i, now + delay);
            } else if !self.last_inside[i] && inside && !self.params.command_stale_detections {
                self.drop_pending(i);
            }
            self.last_inside[i] = inside;
        }
        let stale_ok = self.params.command_stale_detections;
        self.take_due(now)
            .into_iter()
            .filter(|p| {
                let d = &truth[p.drone];
                d.mode == Mode::Walking && (stale_ok || !self.last_inside[p.drone])
            })
            .map(|p| p.drone)
            .collect()
    }

    /// Periodic control with explicit ranging: each distance report refreshes
    /// the drone's trilaterated position once all three anchors have
    /// reported; an estimated exit fires a command after the processing delay.
    pub fn s3_explicit_policy(
        &mut self,
        obs: &ChannelObservation,
        anchors: &AnchorSet,
        arena: &Arena,
        cells: &[CellId],
        now: f64,
    ) -> Result<Vec<usize>, ChannelError> {
        if let Some(rep) = obs.distance_report {
            self.ranges[rep.drone][rep.anchor] = Some(rep.distance);
            if let [Some(a), Some(b), Some(c)] = self.ranges[rep.drone] {
                let pos = trilaterate(anchors, [a, b, c])?;
                if let SemanticState::Quantized(q) = &mut self.estimate {
                    q[rep.drone] = quantize(pos, self.params.q);
                }
                let i = rep.drone;
                let inside = arena.contains(cells[i], pos);
                if self.last_inside[i] && !inside {
                    self.schedule(i, now + self.params.proc_delay);
                } else if !self.last_inside[i] && inside && !self.params.command_stale_detections {
                    self.drop_pending(i);
                }
                self.last_inside[i] = inside;
            }
        }
        Ok(self.take_due(now).into_iter().map(|p| p.drone).collect())
    }
}

fn draw_interval<R: Rng + ?Sized>(params: &ControllerParams, rng: &mut R) -> f64 {
    let (lo, hi) = params.s1_interval;
    lo + (hi - lo) * rng.random::<f64>()
}
