use std::f64::consts::SQRT_2;

use serde_json::json;

use qst::conditioning::ConditioningReport;
use qst::protocols::{optimal_gpos_qudit, pauli_tensor_protocol};

use super::verdict;
use crate::output::{align, num, opt_num, Header, Report, Table};
use crate::CliError;

/// Agreement required between the computed and the closed-form condition number.
const KAPPA_TOL: f64 = 1e-10;

#[derive(Debug, clap::Args)]
#[group(required = true, multiple = false)]
pub struct Args {
    /// Optimal generalized projectors for a d-level system (kappa = 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=24))]
    pub d: Option<u32>,
    /// Tensor products of Pauli operators on N qubits (kappa = √2).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub qubits: Option<u32>,
}

pub fn run(args: Args) -> Result<Report, CliError> {
    let (spec, expected, config) = match (args.d, args.qubits) {
        (Some(d), _) => (optimal_gpos_qudit(d as usize)?, 1.0, json!({ "d": d })),
        (None, Some(n)) => (pauli_tensor_protocol(n as usize)?, SQRT_2, json!({ "qubits": n })),
        (None, None) => return Err(CliError::Usage("pass --d N or --qubits N".into())),
    };
    let report = ConditioningReport::for_protocol(&spec)?;
    let kappa = report.kappa_a.value();
    let passed = kappa.is_some_and(|k| (k - expected).abs() <= KAPPA_TOL * expected);
    let (rows, cols) = report.shape;
    let smax = report.singular_values_a.first().copied().unwrap_or(0.0);
    let smin = report.singular_values_a.last().copied().unwrap_or(0.0);

    let text = align(&[
        vec!["protocol".into(), format!("{} ({})", spec.id, spec.name)],
        vec!["dimension".into(), spec.dim.to_string()],
        vec!["elements".into(), spec.n_elements().to_string()],
        vec!["rotation matrix".into(), format!("{rows} x {cols}")],
        vec!["sigma_max(A)".into(), num(smax)],
        vec!["sigma_min(A)".into(), num(smin)],
        vec!["kappa(A)".into(), report.kappa_a.to_string()],
        vec!["kappa(C)".into(), report.kappa_c.to_string()],
        vec!["expected kappa(A)".into(), num(expected)],
        vec!["status".into(), verdict(passed)],
    ]);
    let mut csv = Table::new(&[
        "protocol", "dim", "elements", "rows", "cols", "sigma_max_A", "sigma_min_A", "kappa_A", "kappa_C",
        "expected_kappa_A", "status",
    ]);
    csv.push(vec![
        spec.id.clone(),
        spec.dim.to_string(),
        spec.n_elements().to_string(),
        rows.to_string(),
        cols.to_string(),
        num(smax),
        num(smin),
        opt_num(kappa),
        opt_num(report.kappa_c.value()),
        num(expected),
        verdict(passed),
    ]);
    let failures = if passed {
        Vec::new()
    } else {
        vec![format!("protocol {}: kappa(A) = {}, expected {}", spec.id, report.kappa_a, num(expected))]
    };
    Ok(Report {
        header: Header::new("qudit", config, None),
        text,
        json: json!({ "report": report, "expected_kappa_a": expected, "passed": passed }),
        csv: Some(csv),
        failures,
    })
}
