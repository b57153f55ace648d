use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use qst::protocols::protocol_by_id;
use qst::simulate::{measure, Reconstructor, NoiseModel};

use crate::config::{Budget, StateSource};
use crate::output::{align, num, Header, Report, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Ideal,
    Poisson,
    Gaussian,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// `NAME` (e.g. phi+, HV, R), `random:SEED` or `file:PATH` to a
    /// density-matrix JSON file.
    #[arg(long, default_value = "phi+")]
    pub state: String,
    /// Protocol id or nickname (1-7, 5b, qudit:D, pauli:N, qubit-optimal, ...).
    #[arg(long, default_value = "1")]
    pub protocol: String,
    #[arg(long, value_enum, default_value = "ideal")]
    pub noise: NoiseKind,
    /// Counts per outcome (per setting) or in total, see `--budget`.
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Relative standard deviation for `--noise gaussian`.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    /// Detector efficiency in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,
    /// Efficiency assumed when converting counts; defaults to `--efficiency`.
    #[arg(long)]
    pub assumed_efficiency: Option<f64>,
    #[arg(long, value_enum, default_value = "per-setting")]
    pub budget: Budget,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn complex_text(re: f64, im: f64) -> String {
    let sign = if im < 0.0 || (im == 0.0 && im.is_sign_negative()) { '-' } else { '+' };
    format!("{re:+.6}{sign}{:.6}i", im.abs())
}

pub fn run(args: Args) -> Result<Report, CliError> {
    let spec = protocol_by_id(&args.protocol)?;
    let source = StateSource::parse(&args.state, None)?;
    let rho = source.load(spec.dim)?.remove(0);
    let noise = match args.noise {
        NoiseKind::Ideal => NoiseModel::ideal(),
        NoiseKind::Poisson => NoiseModel::poisson(args.shots)
            .with_efficiency(args.efficiency, args.assumed_efficiency.unwrap_or(args.efficiency))
            .with_budget(args.budget.into()),
        NoiseKind::Gaussian => NoiseModel::gaussian(args.sigma),
    };
    noise.validate()?;
    let b = measure(&rho, &spec, &noise, args.seed)?;
    let result = Reconstructor::new(spec.clone())?.reconstruct(&b)?.compare_with(&rho)?;
    let cmp = result.comparison.clone().expect("compared with the input state");

    let d = spec.dim;
    let m = result.rho.matrix();
    let mut text = format!(
        "protocol {} ({}), noise {}\nstate {}\n\nreconstructed rho:\n",
        spec.id,
        spec.name,
        noise.label(),
        args.state
    );
    let rows: Vec<Vec<String>> = (0..d)
        .map(|i| (0..d).map(|j| complex_text(m[(i, j)].re, m[(i, j)].im)).collect())
        .collect();
    text.push_str(&align(&rows));
    text.push('\n');
    text.push_str(&align(&[
        vec!["residual ||Ax - b||".into(), num(result.residual)],
        vec!["trace".into(), num(result.trace)],
        vec!["fidelity".into(), num(cmp.fidelity)],
        vec!["trace distance".into(), num(cmp.trace_distance)],
        vec!["relative error".into(), num(cmp.relative_error)],
        vec!["negative eigenvalues clipped".into(), cmp.psd_projected.to_string()],
    ]));

    let mut table = Table::new(&["quantity", "row", "col", "value"]);
    for i in 0..d {
        for j in 0..d {
            table.push(vec!["rho_re".into(), (i + 1).to_string(), (j + 1).to_string(), num(m[(i, j)].re)]);
            table.push(vec!["rho_im".into(), (i + 1).to_string(), (j + 1).to_string(), num(m[(i, j)].im)]);
        }
    }
    for (k, v) in b.iter().enumerate() {
        table.push(vec!["b".into(), (k + 1).to_string(), String::new(), num(*v)]);
    }
    for (name, v) in [
        ("residual", result.residual),
        ("trace", result.trace),
        ("fidelity", cmp.fidelity),
        ("trace_distance", cmp.trace_distance),
        ("relative_error", cmp.relative_error),
    ] {
        table.push(vec![name.into(), String::new(), String::new(), num(v)]);
    }

    let config = json!({
        "state": source,
        "protocol": spec.id,
        "noise": noise,
    });
    let json = json!({
        "protocol": spec.id,
        "noise": noise.label(),
        "observations": b,
        "estimate": result,
    });
    Ok(Report {
        header: Header::new("reconstruct", config, Some(args.seed)),
        text,
        json,
        csv: Some(table),
        failures: Vec::new(),
    })
}
