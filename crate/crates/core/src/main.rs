use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sfcsim::error::{ConfigError, FieldError, SimError};
use sfcsim::harness::output::{
    write_metrics_csv, write_paths, write_summary_json, write_sweep_csv,
};
use sfcsim::harness::{
    calibrate, calibrate_false_positive, replicate, run, sweep, FpCalibration, SimConfig,
    WalkCalibration,
};
use sfcsim::metrics::{MetricsReport, PooledReport};
use sfcsim::semantics::SchemeId;

#[derive(Parser)]
#[command(
    name = "sfcsim",
    version,
    about = "Drone swarm status-update simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one replication.
    Run(Common),
    /// Run independent replications and pool them.
    Replicate(Common),
    /// Compare configurations (or the three schemes of one configuration).
    Sweep(Common),
    /// Fit the walk step length, and optionally the spurious-event probability.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Target event rate of the inside/outside design, events per second.
        #[arg(long, default_value_t = 0.0577)]
        target: f64,
        /// Relative tolerance on the event rate.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Also fit p_fp to this estimation-error rate.
        #[arg(long)]
        target_error: Option<f64>,
        /// Relative tolerance on the estimation-error rate.
        #[arg(long, default_value_t = 0.2)]
        error_tol: f64,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file. `sweep` accepts several.
    #[arg(long)]
    config: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<SchemeId>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write per-drone path traces.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    trace_stride: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
}

fn invalid(field: &str, message: impl Into<String>) -> SimError {
    ConfigError::Invalid(vec![FieldError {
        field: field.into(),
        message: message.into(),
    }])
    .into()
}

impl Common {
    fn apply(&self, mut cfg: SimConfig) -> Result<SimConfig, SimError> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(scheme) = self.scheme {
            cfg.scheme = scheme;
        }
        if self.trace {
            cfg.trace.enabled = true;
        }
        if let Some(stride) = self.trace_stride {
            cfg.trace.stride = stride;
        }
        if let Some(reps) = self.reps {
            cfg.replications = reps;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn base(&self, path: Option<&Path>) -> Result<SimConfig, SimError> {
        match path {
            Some(p) => Ok(SimConfig::load(p)?),
            None => Ok(SimConfig::new(self.scheme.unwrap_or(SchemeId::S2))),
        }
    }

    /// The single configuration for `run`, `replicate` and `calibrate`.
    fn single(&self) -> Result<SimConfig, SimError> {
        if self.config.len() > 1 {
            return Err(invalid("config", "this subcommand takes one --config"));
        }
        self.apply(self.base(self.config.first().map(PathBuf::as_path))?)
    }

    fn out_dir(&self) -> Result<&Path, SimError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(&self.out)
    }
}

#[derive(Serialize)]
struct RunSummary<'a> {
    config: &'a SimConfig,
    report: &'a MetricsReport,
}

#[derive(Serialize)]
struct ReplicateSummary<'a> {
    config: &'a SimConfig,
    pooled: &'a PooledReport,
    replications: &'a [MetricsReport],
}

#[derive(Serialize)]
struct CalibrateSummary<'a> {
    config: &'a SimConfig,
    walk: &'a WalkCalibration,
    false_positive: Option<&'a FpCalibration>,
}

fn cmd_run(common: &Common) -> Result<(), SimError> {
    let cfg = common.single()?;
    let out = common.out_dir()?;
    let artifacts = run(&cfg)?;
    write_summary_json(
        &out.join("summary.json"),
        &RunSummary {
            config: &cfg,
            report: &artifacts.report,
        },
    )?;
    write_metrics_csv(
        &out.join("metrics.csv"),
        std::slice::from_ref(&artifacts.report),
    )?;
    if let Some(paths) = &artifacts.paths {
        write_paths(out, paths)?;
    }
    Ok(())
}

fn cmd_replicate(common: &Common) -> Result<(), SimError> {
    let cfg = common.single()?;
    let out = common.out_dir()?;
    let rep = replicate(&cfg, cfg.replications)?;
    write_summary_json(
        &out.join("summary.json"),
        &ReplicateSummary {
            config: &cfg,
            pooled: &rep.pooled,
            replications: &rep.reports,
        },
    )?;
    write_metrics_csv(&out.join("metrics.csv"), &rep.reports)?;
    Ok(())
}

fn cmd_sweep(common: &Common) -> Result<(), SimError> {
    let configs: Vec<(String, SimConfig)> = if common.config.len() > 1 {
        common
            .config
            .iter()
            .map(|p| {
                let label = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string());
                Ok((label, common.apply(common.base(Some(p))?)?))
            })
            .collect::<Result<_, SimError>>()?
    } else {
        let base = common.apply(common.base(common.config.first().map(PathBuf::as_path))?)?;
        let schemes: Vec<SchemeId> = match common.scheme {
            Some(s) => vec![s],
            None => SchemeId::ALL.to_vec(),
        };
        schemes
            .into_iter()
            .map(|s| (s.to_string(), base.with_scheme(s)))
            .collect()
    };
    let out = common.out_dir()?;
    let rows = sweep(&configs);
    write_sweep_csv(&out.join("sweep.csv"), &rows)?;
    write_summary_json(&out.join("summary.json"), &rows)?;
    Ok(())
}

fn cmd_calibrate(
    common: &Common,
    target: f64,
    tol: f64,
    target_error: Option<f64>,
    error_tol: f64,
) -> Result<(), SimError> {
    let cfg = common.single()?;
    let out = common.out_dir()?;
    let walk = calibrate(&cfg, target, tol)?;
    let mut calibrated = cfg.clone();
    calibrated.walk = walk.walk;
    let fp = match target_error {
        Some(e) => {
            let fp = calibrate_false_positive(&calibrated, e, error_tol)?;
            calibrated.s2.p_fp = fp.p_fp;
            Some(fp)
        }
        None => None,
    };
    write_summary_json(
        &out.join("summary.json"),
        &CalibrateSummary {
            config: &calibrated,
            walk: &walk,
            false_positive: fp.as_ref(),
        },
    )?;
    std::fs::write(out.join("calibrated.toml"), calibrated.to_toml_string()?)?;
    println!(
        "step_len = {} m/slot, event rate {:.6}/s (target {target}/s)",
        walk.walk.step_len, walk.achieved_rate
    );
    if let Some(fp) = &fp {
        println!(
            "p_fp = {}, estimation error {:.6} (target {})",
            fp.p_fp, fp.achieved_error_rate, fp.target_error_rate
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::Replicate(c) => cmd_replicate(c),
        Command::Sweep(c) => cmd_sweep(c),
        Command::Calibrate {
            common,
            target,
            tol,
            target_error,
            error_tol,
        } => cmd_calibrate(common, *target, *tol, *target_error, *error_tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
