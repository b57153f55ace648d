use std::fs;
use std::path::PathBuf;

use serde_json::json;

use qst::conditioning::{
    table1_checks, table1_report, ConditioningReport, Table1Cell, Tolerance,
    TABLE1_TARGETS,
};
use qst::protocols::import_catalog;

use super::verdict;
use crate::output::{align, num, opt_num, Header, Report, Table};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Protocol catalog (from `export-protocols`) to evaluate instead of the
    /// built-in Protocols 1-7, in the same order.
    #[arg(long)]
    pub protocols: Option<PathBuf>,
}

fn tolerance_text(t: Tolerance) -> String {
    match t {
        Tolerance::Relative(r) => format!("relative {r:e}"),
        Tolerance::Absolute(a) => format!("absolute {a}"),
    }
}

fn describe(cell: &Table1Cell) -> String {
    format!(
        "protocol {} {}: expected {}, got {} ({} tolerance)",
        cell.protocol,
        cell.column,
        num(cell.expected),
        cell.actual.map_or_else(|| "singular".to_string(), num),
        tolerance_text(cell.tolerance)
    )
}

pub fn run(args: Args) -> Result<Report, CliError> {
    let reports: Vec<ConditioningReport> = match &args.protocols {
        None => table1_report()?,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
            let specs = import_catalog(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            if specs.len() != TABLE1_TARGETS.len() {
                return Err(CliError::Usage(format!(
                    "{} holds {} protocols; the table has {} rows",
                    path.display(),
                    specs.len(),
                    TABLE1_TARGETS.len()
                )));
            }
            specs
                .iter()
                .map(ConditioningReport::for_protocol)
                .collect::<qst::Result<_>>()?
        }
    };
    let cells = table1_checks(&reports);
    let row_passed = |id: &str| cells.iter().filter(|c| c.protocol == id).all(|c| c.passed);

    let mut lines = vec![[
        "protocol", "name", "projectors", "kappa_A", "kappa_C", "min_svd_C", "status",
    ]
    .map(String::from)
    .to_vec()];
    let mut table = Table::new(&[
        "protocol",
        "name",
        "n_projectors",
        "kappa_A",
        "kappa_C",
        "min_svd_C",
        "expected_n_projectors",
        "expected_kappa_C",
        "expected_min_svd_C",
        "status",
    ]);
    for (r, &(n, kc, mc)) in reports.iter().zip(TABLE1_TARGETS.iter()) {
        let status = verdict(row_passed(&r.id));
        lines.push(vec![
            r.id.clone(),
            r.name.clone(),
            r.n_projectors.to_string(),
            r.kappa_a.to_string(),
            r.kappa_c.to_string(),
            num(r.min_svd_c),
            status.clone(),
        ]);
        table.push(vec![
            r.id.clone(),
            r.name.clone(),
            r.n_projectors.to_string(),
            opt_num(r.kappa_a.value()),
            opt_num(r.kappa_c.value()),
            num(r.min_svd_c),
            n.to_string(),
            num(kc),
            num(mc),
            status,
        ]);
    }
    let failures: Vec<String> = cells.iter().filter(|c| !c.passed).map(describe).collect();
    let mut text = align(&lines);
    let passed = cells.iter().filter(|c| c.passed).count();
    text.push_str(&format!("\n{passed}/{} cells within tolerance\n", cells.len()));
    for f in &failures {
        text.push_str(&format!("MISMATCH {f}\n"));
    }
    let json = json!({
        "protocols": reports,
        "cells": cells,
        "all_passed": failures.is_empty(),
    });
    let config = json!({ "protocols": args.protocols.as_ref().map(|p| p.display().to_string()) });
    Ok(Report {
        header: Header::new("table1", config, None),
        text,
        json,
        csv: Some(table),
        failures,
    })
}
