//! Performance indicators: coverage time, perimeter violation, transmission
//! energy, channel usage and estimation error, plus the AWGN minimum-energy
//! bound for a periodic report.

use serde::{Deserialize, Serialize};

use crate::dynamics::DroneState;
use crate::error::MetricsError;
use crate::geometry::{Arena, CellId, Vec2};
use crate::semantics::{SchemeId, SemanticState};

/// First-visit coverage of one drone's cell on a square tile grid.
///
/// An epoch ends when every tile has been visited at least once; its
/// duration is stored and the grid starts over. Visits outside the assigned
/// cell do not count.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    cell: CellId,
    origin: Vec2,
    resolution: f64,
    tiles_x: usize,
    tiles_y: usize,
    marked: Vec<bool>,
    marked_count: usize,
    epoch_start: f64,
    completed: Vec<f64>,
}

fn tile_count(extent: f64, r: f64) -> Option<usize> {
    let n = extent / r;
    let rounded = n.round();
    ((n - rounded).abs() <= 1e-9 * n.max(1.0) && rounded >= 1.0).then_some(rounded as usize)
}

impl CoverageGrid {
    pub fn new(arena: &Arena, cell: CellId, resolution: f64) -> Result<Self, MetricsError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(MetricsError::InvalidArgument(format!(
                "coverage resolution must be positive, got {resolution}"
            )));
        }
        let (Some(tiles_x), Some(tiles_y)) = (
            tile_count(arena.cell_width(), resolution),
            tile_count(arena.cell_height(), resolution),
        ) else {
            return Err(MetricsError::InvalidArgument(format!(
                "coverage resolution {resolution} does not divide the {}x{} cell",
                arena.cell_width(),
                arena.cell_height()
            )));
        };
        Ok(Self {
            cell,
            origin: arena.cell_origin(cell),
            resolution,
            tiles_x,
            tiles_y,
            marked: vec![false; tiles_x * tiles_y],
            marked_count: 0,
            epoch_start: 0.0,
            completed: Vec::new(),
        })
    }

    pub fn tile_total(&self) -> usize {
        self.tiles_x * self.tiles_y
    }

    pub fn marked_count(&self) -> usize {
        self.marked_count
    }

    pub fn completed_epochs(&self) -> &[f64] {
        &self.completed
    }

    pub fn epoch_start(&self) -> f64 {
        self.epoch_start
    }

    /// Marks the tile under `drone` (if it is inside its cell) at time `now`
    /// and closes the epoch once the grid is full.
    pub fn record_step(&mut self, drone: &DroneState, arena: &Arena, now: f64) {
        if !arena.contains(self.cell, drone.pos) {
            return;
        }
        let rel = drone.pos - self.origin;
        let tx = ((rel.x / self.resolution) as usize).min(self.tiles_x - 1);
        let ty = ((rel.y / self.resolution) as usize).min(self.tiles_y - 1);
        let idx = ty * self.tiles_x + tx;
        if self.marked[idx] {
            return;
        }
        self.marked[idx] = true;
        self.marked_count += 1;
        if self.marked_count == self.marked.len() {
            self.completed.push(now - self.epoch_start);
            self.marked.fill(false);
            self.marked_count = 0;
            self.epoch_start = now;
        }
    }

    /// Mean completed-epoch duration in seconds; the open epoch is ignored.
    pub fn v_time(&self) -> Option<f64> {
        mean(&self.completed)
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Percentage of slots spent outside, from per-slot inside flags.
pub fn violation_rate(inside_trace: &[bool]) -> Result<f64, MetricsError> {
    if inside_trace.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    let outside = inside_trace.iter().filter(|inside| !**inside).count();
    Ok(100.0 * outside as f64 / inside_trace.len() as f64)
}

/// Fraction of slots where the estimated state differs from the truth.
pub fn estimation_error_rate(
    truth: &[SemanticState],
    estimate: &[SemanticState],
) -> Result<f64, MetricsError> {
    if truth.len() != estimate.len() {
        return Err(MetricsError::Misaligned(truth.len(), estimate.len()));
    }
    if truth.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    let wrong = truth.iter().zip(estimate).filter(|(t, e)| t != e).count();
    Ok(wrong as f64 / truth.len() as f64)
}

/// Per-transmission bookkeeping. Every transmission, command or sensor
/// report, costs the same energy `energy_per_tx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub command_count: Vec<u64>,
    /// Event reports, attributed to the drone that crossed.
    pub sensor_tx_count: Vec<u64>,
    /// Periodic ranging reports, shared by all subareas.
    pub periodic_tx_count: u64,
    pub slots: u64,
    pub slot_seconds: f64,
    pub energy_per_tx: f64,
}

impl EnergyLedger {
    pub fn new(drones: usize, slot_seconds: f64) -> Self {
        Self {
            command_count: vec![0; drones],
            sensor_tx_count: vec![0; drones],
            periodic_tx_count: 0,
            slots: 0,
            slot_seconds,
            energy_per_tx: 1.0,
        }
    }

    pub fn drones(&self) -> usize {
        self.command_count.len()
    }

    pub fn record_command(&mut self, drone: usize) {
        self.command_count[drone] += 1;
    }

    pub fn record_sensor_tx(&mut self, drone: usize) {
        self.sensor_tx_count[drone] += 1;
    }

    pub fn record_periodic_tx(&mut self) {
        self.periodic_tx_count += 1;
    }

    pub fn advance_slot(&mut self) {
        self.slots += 1;
    }

    pub fn elapsed(&self) -> f64 {
        self.slots as f64 * self.slot_seconds
    }

    pub fn total_transmissions(&self) -> u64 {
        self.command_count.iter().sum::<u64>()
            + self.sensor_tx_count.iter().sum::<u64>()
            + self.periodic_tx_count
    }

    /// Per-subarea transmissions per second, in units of `energy_per_tx`.
    /// Periodic reports are split evenly across subareas.
    pub fn energy_report(&self) -> Result<Vec<f64>, MetricsError> {
        if self.slots == 0 || self.slot_seconds <= 0.0 {
            return Err(MetricsError::NoElapsedTime);
        }
        let elapsed = self.elapsed();
        let shared = self.periodic_tx_count as f64 / (self.drones() as f64 * elapsed);
        Ok(self
            .command_count
            .iter()
            .zip(&self.sensor_tx_count)
            .map(|(&c, &s)| c as f64 / elapsed + s as f64 / elapsed + shared)
            .collect())
    }

    pub fn merge(&mut self, other: &EnergyLedger) {
        assert_eq!(
            self.drones(),
            other.drones(),
            "ledgers cover different swarms"
        );
        for (a, b) in self.command_count.iter_mut().zip(&other.command_count) {
            *a += b;
        }
        for (a, b) in self.sensor_tx_count.iter_mut().zip(&other.sensor_tx_count) {
            *a += b;
        }
        self.periodic_tx_count += other.periodic_tx_count;
        self.slots += other.slots;
    }
}

/// Sensing-channel transmissions per second.
pub fn theta_rate(ledger: &EnergyLedger, scheme: SchemeId) -> Result<f64, MetricsError> {
    if ledger.slots == 0 || ledger.slot_seconds <= 0.0 {
        return Err(MetricsError::NoElapsedTime);
    }
    Ok(match scheme {
        SchemeId::S1 => 0.0,
        SchemeId::S2 => ledger.sensor_tx_count.iter().sum::<u64>() as f64 / ledger.elapsed(),
        SchemeId::S3 => {
            (ledger.periodic_tx_count as f64 / ledger.slots as f64) / ledger.slot_seconds
        }
    })
}

/// Least energy per slot that carries `bits` over an AWGN channel of the
/// given bandwidth within one slot: `(2^(bits/(T·B)) − 1) · N0 · B · T`.
pub fn shannon_min_energy(
    bits: f64,
    slot_seconds: f64,
    bandwidth: f64,
    noise_psd: f64,
) -> Result<f64, MetricsError> {
    if !(bits >= 0.0 && bits.is_finite()) {
        return Err(MetricsError::InvalidArgument(format!(
            "bits must be nonnegative, got {bits}"
        )));
    }
    for (name, v) in [
        ("slot_seconds", slot_seconds),
        ("bandwidth", bandwidth),
        ("noise_psd", noise_psd),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(MetricsError::InvalidArgument(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let spectral_eff = bits / (slot_seconds * bandwidth);
    let snr = (spectral_eff * std::f64::consts::LN_2).exp_m1();
    Ok(snr * noise_psd * bandwidth * slot_seconds)
}

/// Upper bounds a run must stay below.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub delta_time_minutes: Option<f64>,
    pub delta_violation_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneMetrics {
    pub drone: usize,
    /// Mean coverage time. When no epoch completed this is the length of the
    /// open epoch, a lower bound, and `v_time_censored` is set.
    pub v_time_minutes: f64,
    pub v_time_censored: bool,
    pub completed_epochs: usize,
    pub v_violation_pct: f64,
    pub e_t: f64,
    pub commands_per_s: f64,
    pub sensor_tx_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassFail {
    pub time: Option<bool>,
    pub violation: Option<bool>,
    pub all: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scheme: SchemeId,
    pub replication: u64,
    pub seed: u64,
    pub slots: u64,
    pub elapsed_s: f64,
    pub drones: Vec<DroneMetrics>,
    pub mean_v_time_minutes: f64,
    pub mean_v_violation_pct: f64,
    pub mean_e_t: f64,
    pub mean_commands_per_s: f64,
    /// Sensing-channel transmissions per second, system-wide.
    pub theta_rate: f64,
    /// Only defined for the inside/outside design.
    pub estimation_error_rate: Option<f64>,
    pub ledger: EnergyLedger,
    pub pass: Option<PassFail>,
}

impl MetricsReport {
    pub fn evaluate(&mut self, thresholds: &Thresholds) {
        if thresholds.delta_time_minutes.is_none() && thresholds.delta_violation_pct.is_none() {
            self.pass = None;
            return;
        }
        let time = thresholds
            .delta_time_minutes
            .map(|d| self.drones.iter().all(|m| m.v_time_minutes < d));
        let violation = thresholds
            .delta_violation_pct
            .map(|d| self.drones.iter().all(|m| m.v_violation_pct < d));
        self.pass = Some(PassFail {
            time,
            violation,
            all: time.unwrap_or(true) && violation.unwrap_or(true),
        });
    }
}

/// Mean and standard error of one metric across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn from_samples(xs: &[f64]) -> Option<Self> {
        let n = xs.len();
        let mean = mean(xs)?;
        let std_err = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std_err, n })
    }

    /// Standard error of the difference of two independent means.
    pub fn pooled_se(&self, other: &MeanSe) -> f64 {
        self.std_err.hypot(other.std_err)
    }
}

/// Replication results pooled per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledReport {
    pub scheme: SchemeId,
    pub replications: usize,
    pub v_time_minutes: MeanSe,
    pub v_violation_pct: MeanSe,
    pub e_t: MeanSe,
    pub commands_per_s: MeanSe,
    pub theta_rate: MeanSe,
    pub estimation_error_rate: Option<MeanSe>,
    /// Per-drone means over replications.
    pub drone_v_time_minutes: Vec<f64>,
    pub drone_v_violation_pct: Vec<f64>,
    pub drone_e_t: Vec<f64>,
    pub censored_drones: usize,
}

/// Pools replication reports. Input order does not matter: reports are
/// sorted by replication index first so the floating-point sums are always taken in the
/// same order.
pub fn pool(reports: &[MetricsReport]) -> Option<PooledReport> {
    let first = reports.first()?;
    let mut sorted: Vec<&MetricsReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.replication);
    let col = |f: &dyn Fn(&MetricsReport) -> f64| -> MeanSe {
        MeanSe::from_samples(&sorted.iter().map(|r| f(r)).collect::<Vec<_>>()).expect("nonempty")
    };
    let per_drone = |f: &dyn Fn(&DroneMetrics) -> f64| -> Vec<f64> {
        (0..first.drones.len())
            .map(|i| sorted.iter().map(|r| f(&r.drones[i])).sum::<f64>() / sorted.len() as f64)
            .collect()
    };
    let err: Vec<f64> = sorted
        .iter()
        .filter_map(|r| r.estimation_error_rate)
        .collect();
    Some(PooledReport {
        scheme: first.scheme,
        replications: sorted.len(),
        v_time_minutes: col(&|r| r.mean_v_time_minutes),
        v_violation_pct: col(&|r| r.mean_v_violation_pct),
        e_t: col(&|r| r.mean_e_t),
        commands_per_s: col(&|r| r.mean_commands_per_s),
        theta_rate: col(&|r| r.theta_rate),
        estimation_error_rate: MeanSe::from_samples(&err),
        drone_v_time_minutes: per_drone(&|d| d.v_time_minutes),
        drone_v_violation_pct: per_drone(&|d| d.v_violation_pct),
        drone_e_t: per_drone(&|d| d.e_t),
        censored_drones: sorted
            .iter()
            .map(|r| r.drones.iter().filter(|d| d.v_time_censored).count())
            .sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DroneState;

    fn grid() -> (Arena, CoverageGrid, DroneState) {
        let arena = Arena::default();
        let cell = CellId::new(0, 0);
        let g = CoverageGrid::new(&arena, cell, 1.0).unwrap();
        (arena, g, DroneState::at_home(0, cell, &arena))
    }

    #[test]
    fn fresh_grid_marks_one_tile() {
        let (arena, mut g, d) = grid();
        assert_eq!(g.tile_total(), 400);
        g.record_step(&d, &arena, 0.1);
        assert_eq!(g.marked_count(), 1);
        g.record_step(&d, &arena, 0.2);
        assert_eq!(g.marked_count(), 1);
    }

    #[test]
    fn outside_steps_mark_nothing() {
        let (arena, mut g, mut d) = grid();
        d.pos = Vec2::new(25.0, 5.0);
        g.record_step(&d, &arena, 0.1);
        d.pos = Vec2::new(-1.0, 5.0);
        g.record_step(&d, &arena, 0.2);
        assert_eq!(g.marked_count(), 0);
    }

    #[test]
    fn lawnmower_epochs() {
        // Boustrophedon over tile centers, one new tile per 0.1 s slot.
        let (arena, mut g, mut d) = grid();
        let t_k = 0.1;
        let mut slot = 0u64;
        for _epoch in 0..3 {
            for row in 0..20 {
                for i in 0..20 {
                    let col = if row % 2 == 0 { i } else { 19 - i };
                    d.pos = Vec2::new(col as f64 + 0.5, row as f64 + 0.5);
                    slot += 1;
                    g.record_step(&d, &arena, slot as f64 * t_k);
                }
            }
        }
        assert_eq!(g.completed_epochs(), &[40.0, 40.0, 40.0]);
        assert_eq!(g.v_time(), Some(40.0));
    }

    #[test]
    fn resolution_must_divide_cell() {
        let arena = Arena::default();
        assert!(CoverageGrid::new(&arena, CellId::new(0, 0), 3.0).is_err());
        assert!(CoverageGrid::new(&arena, CellId::new(0, 0), 0.0).is_err());
        assert_eq!(
            CoverageGrid::new(&arena, CellId::new(0, 0), 0.5)
                .unwrap()
                .tile_total(),
            1600
        );
    }

    #[test]
    fn violation_examples() {
        let mut trace = vec![true; 1000];
        trace[1] = false;
        trace[500] = false;
        trace[999] = false;
        assert!((violation_rate(&trace).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(violation_rate(&[true; 10]).unwrap(), 0.0);
        assert_eq!(violation_rate(&[]), Err(MetricsError::EmptyTrace));
    }

    #[test]
    fn estimation_error_examples() {
        let ok = SemanticState::Inside(vec![true; 9]);
        let truth = vec![ok.clone(); 100];
        assert_eq!(estimation_error_rate(&truth, &truth).unwrap(), 0.0);

        // estimate wrong for drone 6 until its first event arrives at slot 37
        let mut wrong_flags = vec![true; 9];
        wrong_flags[6] = false;
        let wrong = SemanticState::Inside(wrong_flags);
        let est: Vec<_> = (0..100)
            .map(|k| if k < 37 { wrong.clone() } else { ok.clone() })
            .collect();
        assert!((estimation_error_rate(&truth, &est).unwrap() - 0.37).abs() < 1e-15);

        assert_eq!(
            estimation_error_rate(&truth, &est[..50]),
            Err(MetricsError::Misaligned(100, 50))
        );
    }

    #[test]
    fn energy_and_theta() {
        let mut l = EnergyLedger::new(9, 0.1);
        assert_eq!(l.energy_report(), Err(MetricsError::NoElapsedTime));
        for _ in 0..1000 {
            l.record_periodic_tx();
            l.advance_slot();
        }
        l.record_command(3);
        l.record_sensor_tx(3);
        l.record_sensor_tx(4);
        let e = l.energy_report().unwrap();
        // 1000 reports over 100 s split across 9 subareas
        assert!((e[0] - 10.0 / 9.0).abs() < 1e-12);
        assert!((e[3] - (10.0 / 9.0 + 0.02)).abs() < 1e-12);
        assert!((e[4] - (10.0 / 9.0 + 0.01)).abs() < 1e-12);
        let total: f64 = e.iter().map(|x| x * l.elapsed()).sum();
        assert!((total - l.total_transmissions() as f64).abs() < 1e-9);
        assert_eq!(theta_rate(&l, SchemeId::S3).unwrap(), 10.0);
        assert_eq!(theta_rate(&l, SchemeId::S1).unwrap(), 0.0);
        assert!((theta_rate(&l, SchemeId::S2).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn shannon_bound() {
        assert_eq!(shannon_min_energy(0.0, 0.1, 1e3, 1e-15).unwrap(), 0.0);
        // low-SNR limit: bits · ln 2 · N0
        let tiny = shannon_min_energy(1e-9, 0.1, 1e3, 1e-15).unwrap();
        assert!((tiny / (1e-9 * std::f64::consts::LN_2 * 1e-15) - 1.0).abs() < 1e-9);
        // one bit per second per hertz: SNR = 1
        let e = shannon_min_energy(100.0, 0.1, 1e3, 1e-15).unwrap();
        assert!((e - 1e-15 * 1e3 * 0.1).abs() < 1e-28);
        let e = shannon_min_energy(16.0, 0.1, 1e3, 1e-15).unwrap();
        let expect = (2f64.powf(0.16) - 1.0) * 1e-15 * 1e3 * 0.1;
        assert!((e - expect).abs() < 1e-27);
        assert!((e - 1.17e-14).abs() < 0.01e-14);
        assert!(shannon_min_energy(16.0, 0.0, 1e3, 1e-15).is_err());
        assert!(shannon_min_energy(-1.0, 0.1, 1e3, 1e-15).is_err());
    }

    #[test]
    fn mean_se() {
        let m = MeanSe::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        // sample sd = sqrt(5/3)
        assert!((m.std_err - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(MeanSe::from_samples(&[7.0]).unwrap().std_err, 0.0);
        assert!(MeanSe::from_samples(&[]).is_none());
    }
}
