use rayon::prelude::*;
use serde::Serialize;

use super::config::SimConfig;
use super::sim::run_replication;
use crate::error::SimError;
use crate::metrics::{pool, MetricsReport, PooledReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub pooled: PooledReport,
    /// In replication order.
    pub reports: Vec<MetricsReport>,
}

/// Runs `n` replications (in parallel) and pools them. Replication `r`
/// draws every stream from the sub-seed `replication_seed(seed, r)`, so the
/// result does not depend on scheduling.
pub fn replicate(config: &SimConfig, n: usize) -> Result<Replication, SimError> {
    if n == 0 {
        return Err(
            crate::error::ConfigError::Invalid(vec![crate::error::FieldError {
                field: "replications".into(),
                message: "must be at least 1".into(),
            }])
            .into(),
        );
    }
    config.validate()?;
    let mut cfg = config.clone();
    cfg.trace.enabled = false;
    let reports = (0..n as u64)
        .into_par_iter()
        .map(|r| run_replication(&cfg, r).map(|a| a.report))
        .collect::<Result<Vec<_>, _>>()?;
    let pooled = pool(&reports).expect("n >= 1");
    Ok(Replication { pooled, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run;
    use crate::semantics::SchemeId;

    fn cfg() -> SimConfig {
        SimConfig {
            horizon_slots: 5_000,
            ..SimConfig::new(SchemeId::S2)
        }
    }

    #[test]
    fn single_replication_matches_run() {
        let one = replicate(&cfg(), 1).unwrap();
        let single = run(&cfg()).unwrap().report;
        assert_eq!(one.reports, vec![single.clone()]);
        assert_eq!(one.pooled.v_time_minutes.mean, single.mean_v_time_minutes);
        assert_eq!(one.pooled.theta_rate.std_err, 0.0);
    }

    #[test]
    fn pooling_ignores_completion_order() {
        let rep = replicate(&cfg(), 5).unwrap();
        let mut shuffled = rep.reports.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        assert_eq!(pool(&shuffled).unwrap(), rep.pooled);
    }

    #[test]
    fn zero_replications_rejected() {
        assert!(replicate(&cfg(), 0).unwrap_err().is_validation());
    }
}
