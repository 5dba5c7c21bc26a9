use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use clustersync::analysis::{theoretical_bounds, verify_bounds, BoundParams, BoundValues};
use clustersync::engine::{run, run_until, Trace};
use clustersync::experiments::{
    intra_delay_study, preset, rate_study, tau_sweep, ScenarioSpec, SweepResult,
};
use clustersync::topology::spectral_summary;
use serde::Serialize;

use crate::artifacts::{write_json, write_report, write_sweep_csv, write_trace};
use crate::config::load_config;
use crate::error::{CliError, Result};
use crate::manifest::{Admissibility, Artifacts, Outcome, RunManifest, TOOL_VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "clustersync",
    version,
    about = "Clustered two-time-scale consensus simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print per-cluster mixing rates, the leader mixing rate and the
    /// admissible leader step size.
    Spectral {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Simulate until the leader-average threshold is met and write the
    /// trace and a run manifest.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Manifest path; defaults to `<trace>.manifest.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Append theoretical bound columns to the trace.
        #[arg(long)]
        with_bounds: bool,
    },
    /// Simulate the full horizon and check every applicable bound.
    VerifyBounds {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Iterations to threshold across inter-leader delays.
    SweepTau {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,10,20,30,40,50")]
        taus: Vec<usize>,
        #[command(flatten)]
        out: SweepOutput,
    },
    /// Residual and gap supremum with `gamma = beta^(1/3)`.
    RateStudy {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.008")]
        betas: Vec<f64>,
        #[command(flatten)]
        out: SweepOutput,
    },
    /// Follower and global convergence across intra-cluster delays.
    IntraDelay {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long = "tau-intra", value_delimiter = ',', default_value = "0,2,15")]
        tau_intra: Vec<usize>,
        #[command(flatten)]
        out: SweepOutput,
    },
    /// Print a built-in scenario (small, large, large-desk) as JSON.
    Preset { name: String },
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario document or run manifest.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

impl ScenarioArgs {
    pub fn load(&self) -> Result<ScenarioSpec> {
        let mut spec = load_config(&self.config)?;
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(n) = self.max_iters {
            spec.max_iters = n;
        }
        if let Some(t) = self.threshold {
            spec.threshold = t;
        }
        spec.validate().map_err(|e| match e {
            clustersync::Error::Config { field, reason } => CliError::Config { field, reason },
            other => other.into(),
        })?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct SweepOutput {
    /// JSON summary.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// One CSV row per swept value.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status, printing any error to stderr.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectral { scenario, report } => spectral(&scenario.load()?, report.as_deref()),
        Command::Run {
            scenario,
            trace,
            report,
            with_bounds,
        } => run_command(
            &scenario.load()?,
            trace.as_deref(),
            report.as_deref(),
            with_bounds,
        )
        .map(|_| ()),
        Command::VerifyBounds {
            scenario,
            report,
            trace,
        } => verify_command(&scenario.load()?, report.as_deref(), trace.as_deref()),
        Command::SweepTau {
            scenario,
            taus,
            out,
        } => emit_sweep(tau_sweep(&scenario.load()?, &taus)?, &out),
        Command::RateStudy {
            scenario,
            betas,
            out,
        } => emit_sweep(rate_study(&scenario.load()?, &betas)?, &out),
        Command::IntraDelay {
            scenario,
            tau_intra,
            out,
        } => emit_sweep(intra_delay_study(&scenario.load()?, &tau_intra)?, &out),
        Command::Preset { name } => {
            let spec = preset(&name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset {name:?} (small, large, large-desk)"
                ))
            })?;
            print_json(&spec)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::io("<stdout>", e.into()))?;
    println!("{text}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct SpectralReport {
    sigma_per_cluster: Vec<f64>,
    delta_c: f64,
    tau: usize,
    #[serde(flatten)]
    admissibility: Admissibility,
}

fn spectral(spec: &ScenarioSpec, report: Option<&Path>) -> Result<()> {
    let network = spec.build_network()?;
    let summary = spectral_summary(&network, spec.tau)?;
    let out = SpectralReport {
        admissibility: Admissibility::evaluate(spec.beta, &summary),
        sigma_per_cluster: summary.sigma_per_cluster,
        delta_c: summary.delta_c,
        tau: summary.tau,
    };
    match report {
        Some(p) => write_report(&out, p),
        None => print_json(&out),
    }
}

fn bound_values(params: &BoundParams, trace: &Trace) -> Vec<BoundValues> {
    trace
        .records
        .iter()
        .map(|r| theoretical_bounds(params, r.k))
        .collect()
}

/// Default manifest location next to the trace: `run.csv` -> `run.manifest.json`.
pub fn manifest_path_for(trace: &Path) -> PathBuf {
    trace.with_extension("manifest.json")
}

/// Executes `run` and returns the manifest that was written.
pub fn run_command(
    spec: &ScenarioSpec,
    trace_path: Option<&Path>,
    report: Option<&Path>,
    with_bounds: bool,
) -> Result<RunManifest> {
    let network = spec.build_network()?;
    let config = spec.run_config()?;
    let summary = spectral_summary(&network, spec.tau)?;
    let outcome = run_until(&network, &config, spec.threshold)?;
    let trace = &outcome.trace;

    if let Some(path) = trace_path {
        let bounds = if with_bounds {
            Some(bound_values(
                &BoundParams::for_run(&network, &config)?,
                trace,
            ))
        } else {
            None
        };
        write_trace(trace, bounds.as_deref(), path)?;
    }
    let manifest_path = report
        .map(Path::to_path_buf)
        .or_else(|| trace_path.map(manifest_path_for));
    let last = trace.last().expect("a trace holds the initial record");
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        config: spec.clone(),
        admissibility: Admissibility::evaluate(spec.beta, &summary),
        spectral: summary,
        outcome: Outcome {
            iterations: outcome.iterations,
            capped: outcome.capped(),
            final_global_error: last.global_error,
            final_leader_deviation: last.leader_deviation,
        },
        artifacts: Artifacts {
            trace: trace_path.map(|p| p.display().to_string()),
            manifest: manifest_path.as_ref().map(|p| p.display().to_string()),
        },
        seed: spec.seed,
        fingerprint: trace.fingerprint.clone(),
    };
    match &manifest_path {
        Some(p) => write_json(&manifest, p)?,
        None => print_json(&manifest)?,
    }
    match outcome.iterations {
        Some(k) => {
            eprintln!("threshold {} met at k = {k}", spec.threshold);
            Ok(manifest)
        }
        None => Err(CliError::Capped {
            max_iters: spec.max_iters,
        }),
    }
}

fn verify_command(
    spec: &ScenarioSpec,
    report: Option<&Path>,
    trace_path: Option<&Path>,
) -> Result<()> {
    let network = spec.build_network()?;
    let config = spec.run_config()?;
    let params = BoundParams::for_run(&network, &config)?;
    let trace = run(&network, &config)?;
    if let Some(path) = trace_path {
        write_trace(&trace, Some(&bound_values(&params, &trace)), path)?;
    }
    let result = verify_bounds(&trace, &params)?;
    match report {
        Some(p) => write_report(&result, p)?,
        None => print_json(&(&result.applicability, &result.summary))?,
    }
    if result.all_satisfied() {
        eprintln!("{} bound checks passed", result.summary.total_checks);
        Ok(())
    } else {
        Err(CliError::BoundFailures {
            failed: result.summary.failed_checks,
            total: result.summary.total_checks,
        })
    }
}

fn emit_sweep(result: SweepResult, out: &SweepOutput) -> Result<()> {
    if let Some(p) = &out.csv {
        write_sweep_csv(&result, p)?;
    }
    match &out.report {
        Some(p) => write_report(&result, p)?,
        None if out.csv.is_none() => print_json(&result)?,
        None => {}
    }
    if result.note.is_some() {
        return Err(CliError::Capped {
            max_iters: result.base.max_iters,
        });
    }
    Ok(())
}
