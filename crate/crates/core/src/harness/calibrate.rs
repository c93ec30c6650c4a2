//! Fitting unobserved model parameters to reported rates.
//!
//! * [`calibrate`] picks the walk step length that produces a target rate
//!   of sensing-channel events under the event-triggered design.
//! * [`calibrate_false_positive`] picks the spurious-event probability that
//!   produces a target estimation-error rate.
//!
//! Both run full replications with a fixed seed, so the measured rate is a
//! deterministic function of the parameter and the search is reproducible.

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::sim::run_replication;
use crate::dynamics::WalkParams;
use crate::error::{ConfigError, FieldError, SimError};
use crate::semantics::SchemeId;

/// Step-length bracket searched by [`calibrate`], meters per slot.
pub const STEP_BRACKET: (f64, f64) = (0.01, 5.0);
const MAX_BISECTIONS: usize = 40;
const MAX_FP_ITERATIONS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkCalibration {
    pub walk: WalkParams,
    pub target_rate: f64,
    pub achieved_rate: f64,
    pub tolerance: f64,
    /// Every `(step_len, rate)` evaluated, in evaluation order.
    pub probes: Vec<(f64, f64)>,
    /// Whether the probed rates are nondecreasing in step length.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpCalibration {
    pub p_fp: f64,
    pub target_error_rate: f64,
    pub achieved_error_rate: f64,
    pub tolerance: f64,
    pub probes: Vec<(f64, f64)>,
}

fn invalid(field: &str, message: String) -> SimError {
    ConfigError::Invalid(vec![FieldError {
        field: field.into(),
        message,
    }])
    .into()
}

fn check_target(field: &str, target: f64, tol: f64) -> Result<(), SimError> {
    if !(target.is_finite() && target > 0.0) {
        return Err(invalid(
            field,
            format!("target must be positive, got {target}"),
        ));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid("tolerance", format!("must be positive, got {tol}")));
    }
    Ok(())
}

fn event_rate(base: &SimConfig, step_len: f64) -> Result<f64, SimError> {
    let mut cfg = base.clone();
    cfg.walk = WalkParams {
        step_len,
        arrival_eps: base.walk.arrival_eps.min(0.5 * step_len),
    };
    Ok(run_replication(&cfg, 0)?.report.theta_rate)
}

fn is_monotone(probes: &[(f64, f64)]) -> bool {
    let mut sorted = probes.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    sorted.windows(2).all(|w| w[0].1 <= w[1].1)
}

/// Bisects the step length (geometrically) until the system-wide event
/// rate of the event-triggered design is within `tol · target` of
/// `target_event_rate` events per second. Runs on a clean channel,
/// whatever `config.scheme` and `config.s2` say.
pub fn calibrate(
    config: &SimConfig,
    target_event_rate: f64,
    tol: f64,
) -> Result<WalkCalibration, SimError> {
    check_target("target_event_rate", target_event_rate, tol)?;
    let mut base = config.with_scheme(SchemeId::S2);
    base.s2.p_fp = 0.0;
    base.s2.p_fn = 0.0;
    base.trace.enabled = false;
    base.validate()?;

    let within = |rate: f64| (rate - target_event_rate).abs() <= tol * target_event_rate;
    let finish = |step: f64, rate: f64, probes: Vec<(f64, f64)>| WalkCalibration {
        walk: WalkParams {
            step_len: step,
            arrival_eps: base.walk.arrival_eps.min(0.5 * step),
        },
        target_rate: target_event_rate,
        achieved_rate: rate,
        tolerance: tol,
        monotone: is_monotone(&probes),
        probes,
    };

    let (mut lo, mut hi) = STEP_BRACKET;
    let r_lo = event_rate(&base, lo)?;
    let r_hi = event_rate(&base, hi)?;
    let mut probes = vec![(lo, r_lo), (hi, r_hi)];
    if within(r_lo) {
        return Ok(finish(lo, r_lo, probes));
    }
    if within(r_hi) {
        return Ok(finish(hi, r_hi, probes));
    }
    if !(r_lo < target_event_rate && target_event_rate < r_hi) {
        return Err(SimError::Calibration(format!(
            "target {target_event_rate}/s outside the achievable range [{r_lo}, {r_hi}]/s \
             for step lengths in [{lo}, {hi}] m"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo * hi).sqrt();
        let rate = event_rate(&base, mid)?;
        probes.push((mid, rate));
        if within(rate) {
            return Ok(finish(mid, rate, probes));
        }
        if rate < target_event_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(SimError::Calibration(format!(
        "no step length in [{lo}, {hi}] m reached {target_event_rate}/s within {tol} \
         after {MAX_BISECTIONS} bisections"
    )))
}

/// Finds `p_fp` such that the estimation-error rate of the event-triggered
/// design is within `tol · target` of `target_error_rate`. The error rate is
/// close to proportional in `p_fp`, so a rescaling iteration converges in a
/// few runs.
pub fn calibrate_false_positive(
    config: &SimConfig,
    target_error_rate: f64,
    tol: f64,
) -> Result<FpCalibration, SimError> {
    check_target("target_error_rate", target_error_rate, tol)?;
    let mut base = config.with_scheme(SchemeId::S2);
    base.trace.enabled = false;
    base.validate()?;
    let hold = base.s2.reentry_timeout_slots.max(1) as f64;
    let mut p = (target_error_rate / hold).min(0.5);
    let mut probes = Vec::new();
    for _ in 0..MAX_FP_ITERATIONS {
        base.s2.p_fp = p;
        let err = run_replication(&base, 0)?
            .report
            .estimation_error_rate
            .expect("event-triggered runs report an error rate");
        probes.push((p, err));
        if (err - target_error_rate).abs() <= tol * target_error_rate {
            return Ok(FpCalibration {
                p_fp: p,
                target_error_rate,
                achieved_error_rate: err,
                tolerance: tol,
                probes,
            });
        }
        p = if err > 0.0 {
            (p * target_error_rate / err).min(0.99)
        } else {
            (p * 10.0).min(0.99)
        };
    }
    Err(SimError::Calibration(format!(
        "false-positive probability did not reach error rate {target_error_rate} within {tol}; \
         probes: {probes:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_targets_rejected() {
        let cfg = SimConfig::new(SchemeId::S2);
        assert!(calibrate(&cfg, 0.0, 0.05).unwrap_err().is_validation());
        assert!(calibrate(&cfg, 0.05, 0.0).unwrap_err().is_validation());
        assert!(calibrate_false_positive(&cfg, -1.0, 0.2)
            .unwrap_err()
            .is_validation());
    }

    #[test]
    fn unreachable_target_reports_range() {
        let mut cfg = SimConfig::new(SchemeId::S2);
        cfg.horizon_slots = 2_000;
        let err = calibrate(&cfg, 1e6, 0.05).unwrap_err();
        assert!(matches!(err, SimError::Calibration(ref m) if m.contains("achievable range")));
    }

    #[test]
    fn monotone_check() {
        assert!(is_monotone(&[(0.1, 0.0), (1.0, 2.0), (0.5, 1.0)]));
        assert!(!is_monotone(&[(0.1, 0.5), (1.0, 2.0), (0.5, 0.4)]));
    }
}
