use std::path::PathBuf;

use serde_json::json;

use qst::protocols::{protocol_by_id, ProtocolSpec};
use qst::simulate::{robustness_experiment, ExperimentOptions, NoiseModel};

use crate::config::{Budget, RobustnessConfig, StateSource};
use crate::output::{align, num, opt_num, Header, Report, Table};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML (or `.json`) file with `protocols`, `states`, `noise`, `trials`,
    /// `seed` and `budget`.
    #[arg(long)]
    pub config: PathBuf,
    /// Include every trial in the JSON output.
    #[arg(long)]
    pub raw: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Overrides `trials` from the config.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `budget` from the config.
    #[arg(long, value_enum)]
    pub budget: Option<Budget>,
}

pub fn run(args: Args) -> Result<Report, CliError> {
    let mut cfg = RobustnessConfig::load(&args.config)?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if cfg.protocols.is_empty() || cfg.states.is_empty() || cfg.noise.is_empty() {
        return Err(CliError::Usage(
            "config needs at least one protocol, one state and one noise entry".into(),
        ));
    }
    let specs: Vec<ProtocolSpec> = cfg
        .protocols
        .iter()
        .map(|id| protocol_by_id(id))
        .collect::<qst::Result<_>>()?;
    let dim = specs[0].dim;
    if let Some(other) = specs.iter().find(|s| s.dim != dim) {
        return Err(CliError::Usage(format!(
            "protocols {} and {} act on different dimensions ({dim} and {})",
            specs[0].id, other.id, other.dim
        )));
    }
    let base = args.config.parent();
    let mut states = Vec::new();
    for s in &cfg.states {
        states.extend(StateSource::parse(s, base)?.load(dim)?);
    }
    let grid: Vec<NoiseModel> = cfg.noise.iter().flat_map(|n| n.expand(cfg.budget)).collect();
    let options = ExperimentOptions {
        trials: cfg.trials,
        seed: cfg.seed,
        keep_raw: args.raw,
    };
    let experiment = || robustness_experiment(&specs, &states, &grid, &options);
    let table = match args.jobs {
        None => experiment()?,
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("starting {n} worker threads: {e}")))?
            .install(experiment)?,
    };

    let columns = [
        "protocol",
        "name",
        "noise",
        "kappa_A",
        "samples",
        "mean_relative_error",
        "std_relative_error",
        "mean_trace_distance",
        "std_trace_distance",
        "mean_fidelity",
        "min_amplification",
        "max_amplification",
        "bound_violations",
        "psd_projected",
    ];
    let mut csv = Table::new(&columns);
    let mut lines = vec![vec![
        "protocol".to_string(),
        "noise".into(),
        "kappa_A".into(),
        "mean rel. error".into(),
        "mean trace dist.".into(),
        "mean fidelity".into(),
        "amplification".into(),
        "violations".into(),
    ]];
    for r in &table.rows {
        csv.push(vec![
            r.protocol.clone(),
            r.name.clone(),
            r.noise.clone(),
            opt_num(r.kappa_a.value()),
            r.samples.to_string(),
            num(r.mean_relative_error),
            num(r.std_relative_error),
            num(r.mean_trace_distance),
            num(r.std_trace_distance),
            num(r.mean_fidelity),
            opt_num(r.min_amplification),
            opt_num(r.max_amplification),
            r.bound_violations.to_string(),
            r.psd_projected.to_string(),
        ]);
        let amp = match (r.min_amplification, r.max_amplification) {
            (Some(lo), Some(hi)) => format!("{lo:.4}..{hi:.4}"),
            _ => "-".into(),
        };
        lines.push(vec![
            r.protocol.clone(),
            r.noise.clone(),
            r.kappa_a.to_string(),
            format!("{:.6}", r.mean_relative_error),
            format!("{:.6}", r.mean_trace_distance),
            format!("{:.6}", r.mean_fidelity),
            amp,
            r.bound_violations.to_string(),
        ]);
    }
    let mut text = format!(
        "{} states x {} trials per protocol and noise level\n\n",
        states.len(),
        cfg.trials
    );
    text.push_str(&align(&lines));

    let failures: Vec<String> = table
        .rows
        .iter()
        .filter(|r| r.bound_violations > 0)
        .map(|r| {
            format!(
                "protocol {} at {}: {} trials outside [1/kappa, kappa]",
                r.protocol, r.noise, r.bound_violations
            )
        })
        .collect();
    let config = serde_json::to_value(&cfg).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Report {
        header: Header::new("robustness", config, Some(cfg.seed)),
        text,
        json: json!(table),
        csv: Some(csv),
        failures,
    })
}
