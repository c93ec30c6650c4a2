use serde::Serialize;

use super::config::SimConfig;
use super::replicate::replicate;
use crate::semantics::SchemeId;

/// One row of the scheme comparison table. Failed configs keep their row
/// with `error` set and the numeric fields empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub scheme: SchemeId,
    pub replications: usize,
    pub e_t: Option<f64>,
    pub e_t_se: Option<f64>,
    pub v_time_minutes: Option<f64>,
    pub v_time_se: Option<f64>,
    pub v_violation_pct: Option<f64>,
    pub v_violation_se: Option<f64>,
    pub theta_rate: Option<f64>,
    pub estimation_error_rate: Option<f64>,
    pub error: Option<String>,
}

/// Replicates every labelled config; one row per input, in input order.
pub fn sweep(configs: &[(String, SimConfig)]) -> Vec<SweepRow> {
    configs
        .iter()
        .map(|(label, cfg)| match replicate(cfg, cfg.replications) {
            Ok(r) => {
                let p = r.pooled;
                SweepRow {
                    label: label.clone(),
                    scheme: cfg.scheme,
                    replications: p.replications,
                    e_t: Some(p.e_t.mean),
                    e_t_se: Some(p.e_t.std_err),
                    v_time_minutes: Some(p.v_time_minutes.mean),
                    v_time_se: Some(p.v_time_minutes.std_err),
                    v_violation_pct: Some(p.v_violation_pct.mean),
                    v_violation_se: Some(p.v_violation_pct.std_err),
                    theta_rate: Some(p.theta_rate.mean),
                    estimation_error_rate: p.estimation_error_rate.map(|m| m.mean),
                    error: None,
                }
            }
            Err(e) => SweepRow {
                label: label.clone(),
                scheme: cfg.scheme,
                replications: 0,
                e_t: None,
                e_t_se: None,
                v_time_minutes: None,
                v_time_se: None,
                v_violation_pct: None,
                v_violation_se: None,
                theta_rate: None,
                estimation_error_rate: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::replicate;

    #[test]
    fn one_row_per_config_even_on_error() {
        let mut good = SimConfig::new(SchemeId::S1);
        good.horizon_slots = 2_000;
        good.replications = 2;
        let mut bad = good.clone();
        bad.slot_seconds = -1.0;
        let rows = sweep(&[("good".into(), good.clone()), ("bad".into(), bad)]);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.as_deref().unwrap().contains("slot_seconds"));

        let rep = replicate(&good, 2).unwrap();
        assert_eq!(rows[0].v_time_minutes, Some(rep.pooled.v_time_minutes.mean));
        assert_eq!(rows[0].theta_rate, Some(0.0));
    }
}
