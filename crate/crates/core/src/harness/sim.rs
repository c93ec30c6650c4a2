//! The slot loop.
//!
//! Each slot: deliver last slot's return commands, move every drone, form
//! the semantic state, run the scheme's sensing channel and policy, queue
//! new commands, account metrics. State after slot `k` is stamped with time
//! `(k + 1)·T_k`.

use serde::Serialize;

use crate::channels::{
    measure_distance, ChannelObservation, ControlChannel, DistanceReport, SfcChannel, TdmaSchedule,
};
use crate::controller::ControllerState;
use crate::dynamics::{draw_heading, step_return, step_walk_heading, DroneState, Mode};
use crate::error::SimError;
use crate::geometry::{Arena, CellId};
use crate::harness::config::{S3Mode, SimConfig};
use crate::metrics::{theta_rate, CoverageGrid, DroneMetrics, EnergyLedger, MetricsReport};
use crate::rng::{self, labels, StreamRng};
use crate::semantics::{crossing_events, SchemeId, SemanticState, TransmitDecision};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    pub slot: u64,
    pub t_seconds: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub mode: Mode,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub report: MetricsReport,
    /// One decimated path per drone when tracing is enabled.
    pub paths: Option<Vec<Vec<PathSample>>>,
}

/// One replication, steppable slot by slot.
pub struct Simulation {
    config: SimConfig,
    replication: u64,
    seed: u64,
    arena: Arena,
    drones: Vec<DroneState>,
    cells: Vec<CellId>,
    walk_rngs: Vec<StreamRng>,
    controller: ControllerState,
    /// Timer draws for S1, detection delays for S3.
    policy_rng: StreamRng,
    ranging_rng: StreamRng,
    sfc: SfcChannel,
    tdma: TdmaSchedule,
    control: ControlChannel,
    ledger: EnergyLedger,
    coverage: Vec<CoverageGrid>,
    inside: Vec<bool>,
    prev_inside: Vec<bool>,
    outside_slots: Vec<u64>,
    mismatch_slots: u64,
    slot: u64,
    paths: Option<Vec<Vec<PathSample>>>,
}

impl Simulation {
    pub fn new(config: &SimConfig, replication: u64) -> Result<Self, SimError> {
        config.validate()?;
        let seed = rng::replication_seed(config.seed, replication);
        let arena = config.arena;
        let drones = DroneState::swarm(&arena);
        let n = drones.len();
        let cells = drones.iter().map(|d| d.assigned_cell).collect();
        let walk_rngs = (0..n as u64)
            .map(|i| rng::stream(seed, labels::WALK, i))
            .collect();
        let policy_label = match config.scheme {
            SchemeId::S1 => labels::S1_TIMER,
            _ => labels::S3_DELAY,
        };
        let mut policy_rng = rng::stream(seed, policy_label, 0);
        let controller = ControllerState::new(
            config.scheme,
            &drones,
            config.controller_params(),
            &mut policy_rng,
        );
        let coverage = drones
            .iter()
            .map(|d| CoverageGrid::new(&arena, d.assigned_cell, config.coverage.resolution))
            .collect::<Result<_, _>>()?;
        let paths = config.trace.enabled.then(|| vec![Vec::new(); n]);
        Ok(Self {
            config: config.clone(),
            replication,
            seed,
            arena,
            drones,
            cells,
            walk_rngs,
            controller,
            policy_rng,
            ranging_rng: rng::stream(seed, labels::RANGING, 0),
            sfc: SfcChannel::new(
                config.s2.channel_params(),
                rng::stream(seed, labels::SFC, 0),
            )?,
            tdma: TdmaSchedule::new(n),
            control: ControlChannel::new(),
            ledger: EnergyLedger::new(n, config.slot_seconds),
            coverage,
            inside: vec![true; n],
            prev_inside: vec![true; n],
            outside_slots: vec![0; n],
            mismatch_slots: 0,
            slot: 0,
            paths,
        })
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn drones(&self) -> &[DroneState] {
        &self.drones
    }

    pub fn inside_flags(&self) -> &[bool] {
        &self.inside
    }

    pub fn controller(&self) -> &ControllerState {
        &self.controller
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn is_done(&self) -> bool {
        self.slot >= self.config.horizon_slots
    }

    /// Advances one slot and returns the drones commanded in it.
    pub fn step(&mut self) -> Result<Vec<usize>, SimError> {
        let k = self.slot;
        let now = (k + 1) as f64 * self.config.slot_seconds;

        self.control.deliver(&mut self.drones);
        for (d, rng) in self.drones.iter_mut().zip(&mut self.walk_rngs) {
            // One heading per slot in every mode keeps the walk streams
            // aligned across schemes.
            let heading = draw_heading(rng);
            *d = match d.mode {
                Mode::Walking => step_walk_heading(d, &self.config.walk, heading),
                Mode::Returning => step_return(d, &self.config.walk)?,
            };
        }

        std::mem::swap(&mut self.inside, &mut self.prev_inside);
        for (i, d) in self.drones.iter().enumerate() {
            let inside = self.arena.contains(d.assigned_cell, d.pos);
            self.inside[i] = inside;
            if !inside {
                self.outside_slots[i] += 1;
            }
            self.coverage[i].record_step(d, &self.arena, now);
        }

        let commands = match self.config.scheme {
            SchemeId::S1 => self.controller.s1_policy(now, &mut self.policy_rng),
            SchemeId::S2 => {
                let decision = TransmitDecision {
                    events: crossing_events(&self.prev_inside, &self.inside).collect(),
                };
                for ev in &decision.events {
                    self.ledger.record_sensor_tx(ev.drone);
                }
                let obs = self.sfc.deliver(k, &decision, &self.controller.estimate);
                let cmds = self.controller.s2_policy(&obs)?;
                if let SemanticState::Inside(est) = &self.controller.estimate {
                    if est != &self.inside {
                        self.mismatch_slots += 1;
                    }
                }
                cmds
            }
            SchemeId::S3 => {
                self.ledger.record_periodic_tx();
                match self.config.s3.mode {
                    S3Mode::Abstract => self.controller.s3_policy(
                        &self.drones,
                        &self.arena,
                        now,
                        &mut self.policy_rng,
                    ),
                    S3Mode::Explicit => {
                        let pair = self.tdma.slot(k);
                        let anchor = self.config.s3.anchors.get(pair.anchor);
                        let distance = measure_distance(
                            anchor,
                            self.drones[pair.drone].pos,
                            self.config.s3.ranging_sigma,
                            &mut self.ranging_rng,
                        );
                        let obs = ChannelObservation {
                            slot: k,
                            received_events: Vec::new(),
                            distance_report: Some(DistanceReport {
                                anchor: pair.anchor,
                                drone: pair.drone,
                                distance,
                            }),
                        };
                        self.controller.s3_explicit_policy(
                            &obs,
                            &self.config.s3.anchors,
                            &self.arena,
                            &self.cells,
                            now,
                        )?
                    }
                }
            }
        };
        for &c in &commands {
            self.control.broadcast(c, &mut self.ledger);
        }
        self.ledger.advance_slot();

        if let Some(paths) = &mut self.paths {
            if k.is_multiple_of(self.config.trace.stride) {
                for (i, d) in self.drones.iter().enumerate() {
                    paths[i].push(PathSample {
                        slot: k,
                        t_seconds: now,
                        x_m: d.pos.x,
                        y_m: d.pos.y,
                        mode: d.mode,
                        inside: self.inside[i],
                    });
                }
            }
        }
        self.slot += 1;
        Ok(commands)
    }

    pub fn run_to_end(&mut self) -> Result<(), SimError> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(())
    }

    /// Metrics over the slots simulated so far.
    pub fn report(&self) -> Result<MetricsReport, SimError> {
        let elapsed = self.ledger.elapsed();
        let e_t = self.ledger.energy_report()?;
        let drones: Vec<DroneMetrics> = (0..self.drones.len())
            .map(|i| {
                let grid = &self.coverage[i];
                let (v_time_s, censored) = match grid.v_time() {
                    Some(t) => (t, false),
                    None => (elapsed - grid.epoch_start(), true),
                };
                DroneMetrics {
                    drone: i,
                    v_time_minutes: v_time_s / 60.0,
                    v_time_censored: censored,
                    completed_epochs: grid.completed_epochs().len(),
                    v_violation_pct: 100.0 * self.outside_slots[i] as f64 / self.slot as f64,
                    e_t: e_t[i],
                    commands_per_s: self.ledger.command_count[i] as f64 / elapsed,
                    sensor_tx_per_s: self.ledger.sensor_tx_count[i] as f64 / elapsed,
                }
            })
            .collect();
        let n = drones.len() as f64;
        let avg = |f: fn(&DroneMetrics) -> f64| drones.iter().map(f).sum::<f64>() / n;
        let mut report = MetricsReport {
            scheme: self.config.scheme,
            replication: self.replication,
            seed: self.seed,
            slots: self.slot,
            elapsed_s: elapsed,
            mean_v_time_minutes: avg(|d| d.v_time_minutes),
            mean_v_violation_pct: avg(|d| d.v_violation_pct),
            mean_e_t: avg(|d| d.e_t),
            mean_commands_per_s: avg(|d| d.commands_per_s),
            theta_rate: theta_rate(&self.ledger, self.config.scheme)?,
            estimation_error_rate: (self.config.scheme == SchemeId::S2)
                .then(|| self.mismatch_slots as f64 / self.slot as f64),
            drones,
            ledger: self.ledger.clone(),
            pass: None,
        };
        report.evaluate(&self.config.thresholds);
        Ok(report)
    }

    pub fn into_artifacts(self) -> Result<RunArtifacts, SimError> {
        let report = self.report()?;
        Ok(RunArtifacts {
            report,
            paths: self.paths,
        })
    }
}

/// Replication `replication` of `config`, run to the horizon.
pub fn run_replication(config: &SimConfig, replication: u64) -> Result<RunArtifacts, SimError> {
    let mut sim = Simulation::new(config, replication)?;
    sim.run_to_end()?;
    sim.into_artifacts()
}

/// A single run; identical to replication 0 of [`replicate`](super::replicate).
pub fn run(config: &SimConfig) -> Result<RunArtifacts, SimError> {
    run_replication(config, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(scheme: SchemeId) -> SimConfig {
        SimConfig {
            horizon_slots: 20_000,
            ..SimConfig::new(scheme)
        }
    }

    #[test]
    fn commands_take_effect_next_slot() {
        let cfg = short(SchemeId::S1);
        let mut sim = Simulation::new(&cfg, 0).unwrap();
        loop {
            let cmds = sim.step().unwrap();
            if let Some(&d) = cmds.first() {
                assert_eq!(sim.drones()[d].mode, Mode::Walking);
                sim.step().unwrap();
                // the drone may already have arrived if it was within one step
                let st = sim.drones()[d];
                assert!(st.mode == Mode::Returning || st.pos == st.home);
                break;
            }
        }
    }

    #[test]
    fn s1_never_uses_sensing_channel() {
        let r = run(&short(SchemeId::S1)).unwrap().report;
        assert_eq!(r.theta_rate, 0.0);
        assert_eq!(r.ledger.sensor_tx_count.iter().sum::<u64>(), 0);
        assert_eq!(r.ledger.periodic_tx_count, 0);
        assert!(r.estimation_error_rate.is_none());
    }

    #[test]
    fn s3_occupies_every_slot() {
        for mode in [S3Mode::Abstract, S3Mode::Explicit] {
            let mut cfg = short(SchemeId::S3);
            cfg.s3.mode = mode;
            let r = run(&cfg).unwrap().report;
            assert_eq!(r.theta_rate, 10.0);
            assert_eq!(r.ledger.periodic_tx_count, 20_000);
        }
    }

    #[test]
    fn s2_perfect_channel_is_lossless() {
        let r = run(&short(SchemeId::S2)).unwrap().report;
        assert_eq!(r.estimation_error_rate, Some(0.0));
        assert!(r.theta_rate > 0.0);
    }

    #[test]
    fn traces_are_decimated() {
        let mut cfg = short(SchemeId::S2);
        cfg.horizon_slots = 1000;
        cfg.trace.enabled = true;
        cfg.trace.stride = 7;
        let art = run(&cfg).unwrap();
        let paths = art.paths.unwrap();
        assert_eq!(paths.len(), 9);
        assert_eq!(paths[0].len(), 1000usize.div_ceil(7));
        assert_eq!(paths[0][1].slot, 7);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = short(SchemeId::S1);
        cfg.slot_seconds = 0.0;
        assert!(matches!(run(&cfg), Err(e) if e.is_validation()));
    }
}
