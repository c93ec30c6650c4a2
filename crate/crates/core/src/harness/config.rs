//! Simulation configuration, stored as TOML.
//!
//! ```toml
//! scheme = "s2"
//! seed = 42
//! slot_seconds = 0.1
//! horizon_slots = 2000000
//!
//! [walk]
//! step_len = 0.5
//!
//! [s2]
//! p_fp = 0.0002
//! ```
//!
//! Every section is optional and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{AnchorSet, SfcChannelParams};
use crate::controller::ControllerParams;
use crate::dynamics::WalkParams;
use crate::error::{ConfigError, FieldError};
use crate::geometry::Arena;
use crate::metrics::Thresholds;
use crate::semantics::SchemeId;

/// Slots in the short-walk preset (200 s at 0.1 s per slot).
pub const SHORT_RUN_SLOTS: u64 = 20_000;
/// Slots in the long-walk preset (2·10^5 s at 0.1 s per slot).
pub const LONG_RUN_SLOTS: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: SchemeId,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::slot_seconds")]
    pub slot_seconds: f64,
    #[serde(default = "defaults::horizon_slots")]
    pub horizon_slots: u64,
    #[serde(default = "defaults::replications")]
    pub replications: usize,
    #[serde(default)]
    pub arena: Arena,
    #[serde(default)]
    pub walk: WalkParams,
    #[serde(default)]
    pub s1: S1Config,
    #[serde(default)]
    pub s2: S2Config,
    #[serde(default)]
    pub s3: S3Config,
    #[serde(default)]
    pub coverage: CoverageConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub trace: TraceConfig,
}

mod defaults {
    pub fn seed() -> u64 {
        1
    }
    pub fn slot_seconds() -> f64 {
        0.1
    }
    pub fn horizon_slots() -> u64 {
        super::LONG_RUN_SLOTS
    }
    pub fn replications() -> usize {
        20
    }
    pub fn interval_min() -> f64 {
        2.0
    }
    pub fn interval_max() -> f64 {
        5.0
    }
    pub fn reentry_timeout_slots() -> u64 {
        10
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn stride() -> u64 {
        10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct S1Config {
    #[serde(default = "defaults::interval_min")]
    pub interval_min: f64,
    #[serde(default = "defaults::interval_max")]
    pub interval_max: f64,
}

impl Default for S1Config {
    fn default() -> Self {
        Self {
            interval_min: defaults::interval_min(),
            interval_max: defaults::interval_max(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct S2Config {
    #[serde(default)]
    pub p_fp: f64,
    #[serde(default)]
    pub p_fn: f64,
    #[serde(default = "defaults::reentry_timeout_slots")]
    pub reentry_timeout_slots: u64,
}

impl Default for S2Config {
    fn default() -> Self {
        Self {
            p_fp: 0.0,
            p_fn: 0.0,
            reentry_timeout_slots: defaults::reentry_timeout_slots(),
        }
    }
}

impl S2Config {
    pub fn channel_params(&self) -> SfcChannelParams {
        SfcChannelParams {
            p_fp: self.p_fp,
            p_fn: self.p_fn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum S3Mode {
    /// Exit noticed after a uniform detection delay.
    #[default]
    Abstract,
    /// TDMA ranging and trilateration simulated slot by slot.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct S3Config {
    #[serde(default)]
    pub mode: S3Mode,
    #[serde(default)]
    pub anchors: AnchorSet,
    /// Position quantization, meters.
    #[serde(default = "defaults::one")]
    pub q: f64,
    #[serde(default)]
    pub proc_delay: f64,
    #[serde(default)]
    pub ranging_sigma: f64,
    #[serde(default)]
    pub command_stale: bool,
}

impl Default for S3Config {
    fn default() -> Self {
        Self {
            mode: S3Mode::Abstract,
            anchors: AnchorSet::default(),
            q: 1.0,
            proc_delay: 0.0,
            ranging_sigma: 0.0,
            command_stale: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageConfig {
    #[serde(default = "defaults::one")]
    pub resolution: f64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self { resolution: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    #[serde(default)]
    pub enabled: bool,
    /// Keep every `stride`-th slot of the path traces.
    #[serde(default = "defaults::stride")]
    pub stride: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            stride: defaults::stride(),
        }
    }
}

impl SimConfig {
    /// Defaults for `scheme`.
    pub fn new(scheme: SchemeId) -> Self {
        Self {
            scheme,
            seed: defaults::seed(),
            slot_seconds: defaults::slot_seconds(),
            horizon_slots: defaults::horizon_slots(),
            replications: defaults::replications(),
            arena: Arena::default(),
            walk: WalkParams::default(),
            s1: S1Config::default(),
            s2: S2Config::default(),
            s3: S3Config::default(),
            coverage: CoverageConfig::default(),
            thresholds: Thresholds::default(),
            trace: TraceConfig::default(),
        }
    }

    pub fn with_scheme(&self, scheme: SchemeId) -> Self {
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn drones(&self) -> usize {
        self.arena.cell_count()
    }

    pub fn controller_params(&self) -> ControllerParams {
        ControllerParams {
            slot_seconds: self.slot_seconds,
            s1_interval: (self.s1.interval_min, self.s1.interval_max),
            reentry_timeout_slots: self.s2.reentry_timeout_slots,
            proc_delay: self.s3.proc_delay,
            command_stale_detections: self.s3.command_stale,
            q: self.s3.q,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::Invalid(vec![FieldError {
                field: "config".into(),
                message: format!("cannot read {}: {e}", path.display()),
            }])
        })?;
        Self::from_toml_str(&text)
    }

    /// Checks every field and reports all offenders at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        let mut bad = |field: &str, message: String| {
            errs.push(FieldError {
                field: field.to_string(),
                message,
            })
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;

        if !positive(self.slot_seconds) {
            bad(
                "slot_seconds",
                format!("must be positive, got {}", self.slot_seconds),
            );
        }
        if self.horizon_slots == 0 {
            bad("horizon_slots", "must be at least 1".into());
        }
        if self.replications == 0 {
            bad("replications", "must be at least 1".into());
        }
        if let Err(e) = self.arena.validate() {
            bad("arena", e.to_string());
        }
        if let Err(e) = self.walk.validate() {
            bad("walk", e.to_string());
        }
        if !(positive(self.s1.interval_min)
            && self.s1.interval_max.is_finite()
            && self.s1.interval_max >= self.s1.interval_min)
        {
            bad(
                "s1",
                format!(
                    "need 0 < interval_min <= interval_max, got [{}, {}]",
                    self.s1.interval_min, self.s1.interval_max
                ),
            );
        }
        if let Err(e) = self.s2.channel_params().validate() {
            bad("s2", e.to_string());
        }
        if !positive(self.s3.q) {
            bad("s3.q", format!("must be positive, got {}", self.s3.q));
        }
        if !nonneg(self.s3.proc_delay) {
            bad(
                "s3.proc_delay",
                format!("must be nonnegative, got {}", self.s3.proc_delay),
            );
        }
        if !nonneg(self.s3.ranging_sigma) {
            bad(
                "s3.ranging_sigma",
                format!("must be nonnegative, got {}", self.s3.ranging_sigma),
            );
        }
        if self.arena.validate().is_ok() {
            if let Err(e) = crate::metrics::CoverageGrid::new(
                &self.arena,
                crate::geometry::CellId::new(0, 0),
                self.coverage.resolution,
            ) {
                bad("coverage.resolution", e.to_string());
            }
        }
        if let Some(d) = self.thresholds.delta_time_minutes {
            if !positive(d) {
                bad(
                    "thresholds.delta_time_minutes",
                    format!("must be positive, got {d}"),
                );
            }
        }
        if let Some(d) = self.thresholds.delta_violation_pct {
            if !positive(d) {
                bad(
                    "thresholds.delta_violation_pct",
                    format!("must be positive, got {d}"),
                );
            }
        }
        if self.trace.stride == 0 {
            bad("trace.stride", "must be at least 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = SimConfig::from_toml_str("scheme = \"s2\"\n").unwrap();
        assert_eq!(cfg, SimConfig::new(SchemeId::S2));
        assert_eq!(cfg.horizon_slots, 2_000_000);
        assert_eq!(cfg.drones(), 9);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(SimConfig::from_toml_str("scheme = \"s1\"\nfoo = 1\n").is_err());
        assert!(SimConfig::from_toml_str("scheme = \"s1\"\n[walk]\nstep = 1.0\n").is_err());
    }

    #[test]
    fn validation_lists_every_offender() {
        let text = r#"
scheme = "s3"
slot_seconds = -1.0
horizon_slots = 0
[s2]
p_fp = 1.5
[s3]
q = 0.0
"#;
        let Err(ConfigError::Invalid(errs)) = SimConfig::from_toml_str(text) else {
            panic!("expected validation failure");
        };
        let fields: Vec<_> = errs.iter().map(|e| e.field.as_str()).collect();
        assert_eq!(fields, ["slot_seconds", "horizon_slots", "s2", "s3.q"]);
    }

    #[test]
    fn collinear_anchors_rejected_at_parse() {
        let text = "scheme = \"s3\"\n[s3]\nanchors = [[0.0, 0.0], [30.0, 0.0], [60.0, 0.0]]\n";
        assert!(SimConfig::from_toml_str(text).is_err());
    }

    proptest! {
        #[test]
        fn toml_round_trip(
            scheme in prop::sample::select(SchemeId::ALL.to_vec()),
            seed in 0u64..(i64::MAX as u64),
            step in 0.01f64..3.0,
            p_fp in 0.0f64..0.5,
            horizon in 1u64..10_000_000,
            explicit in any::<bool>(),
        ) {
            let mut cfg = SimConfig::new(scheme);
            cfg.seed = seed;
            cfg.walk.step_len = step;
            cfg.s2.p_fp = p_fp;
            cfg.horizon_slots = horizon;
            cfg.s3.mode = if explicit { S3Mode::Explicit } else { S3Mode::Abstract };
            cfg.thresholds.delta_violation_pct = Some(5.0);
            let text = cfg.to_toml_string().unwrap();
            let back = SimConfig::from_toml_str(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_toml_string().unwrap(), text);
        }
    }
}
