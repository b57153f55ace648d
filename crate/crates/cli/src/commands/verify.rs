use serde_json::json;

use qst::optics::{verify_setup, CNOT_TOL};

use super::verdict;
use crate::output::{align, num, Header, Report, Table};
use crate::CliError;

pub fn run() -> Result<Report, CliError> {
    let report = verify_setup()?;
    let mut csv = Table::new(&["section", "item", "detail", "value", "status"]);
    let mut lines = vec![["check", "item", "setting", "value", "status"].map(String::from).to_vec()];
    let mut failures = Vec::new();

    for row in report.table2.iter().chain(&report.table3) {
        let item = format!("GPO {} {}", row.gpo, row.state);
        let section = format!("table{}", row.table);
        if !row.passed {
            failures.push(format!("{section} {item}: fidelity {}", num(row.fidelity)));
        }
        csv.push(vec![section.clone(), item.clone(), row.setting.to_string(), num(row.fidelity), verdict(row.passed)]);
        lines.push(vec![section, item, row.setting.to_string(), format!("F = {:.12}", row.fidelity), verdict(row.passed)]);
    }
    for c in &report.beam_splitter {
        if !c.passed {
            failures.push(format!("{}: deviation {:e}", c.description, c.max_deviation));
        }
        csv.push(vec!["beam_splitter".into(), c.description.clone(), String::new(), num(c.max_deviation), verdict(c.passed)]);
        lines.push(vec![
            "beam splitter".into(),
            c.description.clone(),
            String::new(),
            format!("dev = {:.1e}", c.max_deviation),
            verdict(c.passed),
        ]);
    }
    let checks = report.check_count();
    let passed = report.passed_count();
    let mut text = align(&lines);
    text.push_str(&format!("\n{passed}/{checks} checks passed\n\ncoincidence signatures:\n"));

    let mut extra = Vec::new();
    for s in &report.coincidences {
        if !s.passed {
            failures.push(format!("coincidences of {}: probability {}", s.state, num(s.probability)));
        }
        csv.push(vec!["coincidence".into(), s.state.clone(), s.events.join(" or "), num(s.probability), verdict(s.passed)]);
        extra.push(vec![s.state.clone(), s.events.join(" or "), format!("P = {:.12}", s.probability), verdict(s.passed)]);
    }
    text.push_str(&align(&extra));
    text.push_str("\nCNOT disentangling:\n");
    let mut cnot = Vec::new();
    for e in &report.cnot.entries {
        if !e.passed {
            failures.push(format!("CNOT {} -> {}: overlap {}", e.state, e.matched_state, num(e.overlap)));
        }
        let item = format!("{} (GPO {})", e.state, e.gpo);
        let detail = format!("{} (GPO {})", e.matched_state, e.target_gpo);
        csv.push(vec!["cnot".into(), item.clone(), detail.clone(), num(e.overlap), verdict(e.passed)]);
        cnot.push(vec![item, "->".into(), detail, format!("|overlap| = {:.12}", e.overlap), verdict(e.passed)]);
    }
    text.push_str(&align(&cnot));
    if report.cnot.involution_deviation > CNOT_TOL {
        failures.push(format!("CNOT^2 = I deviation {:e}", report.cnot.involution_deviation));
    }
    text.push_str(&format!("CNOT^2 = I deviation {:.1e}\n", report.cnot.involution_deviation));

    let json = json!({
        "checks": checks,
        "passed": passed,
        "all_passed": report.all_passed(),
        "report": report,
    });
    Ok(Report {
        header: Header::new("verify-setup", json!({}), None),
        text,
        json,
        csv: Some(csv),
        failures,
    })
}
