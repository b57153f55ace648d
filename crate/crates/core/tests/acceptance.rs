//! Acceptance criteria for the library, one PASS/FAIL line each.
//!
//! Run with `cargo test -p qst --test acceptance -- --nocapture` to see the
//! report. The test fails if any criterion other than the documented red
//! cell of criterion 1 fails; see `KNOWN_RED_CELLS`.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use qst::conditioning::{
    condition_number, gastinel_kahan_distance, perturbation_bound_check, table1_checks,
    table1_report, Table1Column,
};
use qst::numerics::{least_squares_solve, svd, RealMatrix};
use qst::optics::{
    coincidence_signatures, setup2_disentangle_check, verify_setup, FIDELITY_TOL,
};
use qst::protocols::{
    cnot_disentangle_check, epr_relations, mub_check, optimal_gpos_qudit, pauli_tensor_protocol,
    protocol_1_optimal, protocol_by_id, single_qubit_protocols, table_protocols, MubVariant,
};
use qst::simulate::{
    random_states, robustness_experiment, ExperimentOptions, NoiseModel, Reconstructor,
};
use qst::states::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Table I cells whose published value disagrees with the computed one.
///
/// Protocol 2's sixteen Pauli products give a rotation matrix whose
/// singular values are 2 (four diagonal-slot columns) and 2√2 (twelve
/// off-diagonal columns), so `min svd(C) = 4`, whereas the table prints 1.
/// Its `kappa(C) = 2` entry agrees. No normalization of the Pauli operators
/// reproduces both published numbers at once: rescaling by 1/2 gives
/// `min svd(C) = 1` but also rescales every other consistency check made
/// against the same operators.
const KNOWN_RED_CELLS: &[(&str, Table1Column)] = &[("2", Table1Column::MinSvdC)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        o.detail = format!("{} [{:.2?}, limit {:?}]", o.detail, elapsed, limit);
        if elapsed > limit {
            o.passed = false;
        }
    } else {
        o.detail = format!("{} [{:.2?}]", o.detail, elapsed);
    }
    o
}

fn criterion_1_table1() -> (Outcome, Vec<(String, Table1Column)>) {
    let reports = table1_report().expect("table 1 reports");
    let cells = table1_checks(&reports);
    let failing: Vec<(String, Table1Column)> = cells
        .iter()
        .filter(|c| !c.passed)
        .map(|c| (c.protocol.clone(), c.column))
        .collect();
    let mut detail = String::new();
    for r in &reports {
        detail.push_str(&format!(
            "P{}: kappa_C={} min_svd_C={}; ",
            r.id,
            r.kappa_c,
            qst::format::significant(r.min_svd_c, 6)
        ));
    }
    for c in cells.iter().filter(|c| !c.passed) {
        detail.push_str(&format!(
            "MISMATCH P{} {}: expected {}, got {}; ",
            c.protocol,
            c.column,
            c.expected,
            c.actual.map_or_else(|| "singular".to_string(), |v| v.to_string())
        ));
    }
    (outcome(failing.is_empty(), detail), failing)
}

const A_TWO_QUBITS: [(usize, usize, f64); 16] = [
    (1, 1, 1.0),
    (2, 8, 1.0),
    (3, 13, 1.0),
    (4, 16, 1.0),
    (5, 2, 1.0),
    (6, 3, -1.0),
    (7, 4, 1.0),
    (8, 5, -1.0),
    (9, 14, 1.0),
    (10, 15, -1.0),
    (11, 11, 1.0),
    (12, 12, -1.0),
    (13, 9, 1.0),
    (14, 10, -1.0),
    (15, 6, 1.0),
    (16, 7, -1.0),
];

fn criterion_2_protocol1_matrix() -> Outcome {
    let mut expected = RealMatrix::zeros(16, 16);
    for &(r, c, v) in &A_TWO_QUBITS {
        expected[(r - 1, c - 1)] = v;
    }
    let a = protocol_1_optimal().rotation_matrix;
    let exact = a == expected;
    let sv = svd(&a).unwrap().singular_values;
    let worst = sv.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    outcome(
        exact && worst <= 1e-12,
        format!("entrywise equal: {exact}; max |sigma - 1| = {worst:e}"),
    )
}

fn criterion_3_worked_example() -> Outcome {
    let a = RealMatrix::from_rows(&[[6.0, 7.0], [5.0, 6.0]]).unwrap();
    let k = condition_number(&a).unwrap().value().unwrap();
    let x1 = least_squares_solve(&a, &[0.7, 0.6]).unwrap();
    let x2 = least_squares_solve(&a, &[0.71, 0.59]).unwrap();
    let err = |x: &[f64], want: [f64; 2]| x.iter().zip(want).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let e1 = err(&x1, [0.0, 0.1]);
    let e2 = err(&x2, [0.13, -0.01]);
    outcome(
        (145.9..=146.1).contains(&k) && e1 <= 1e-12 && e2 <= 1e-12,
        format!("kappa = {k:.6}; x = {x1:?} (err {e1:e}); x' = {x2:?} (err {e2:e})"),
    )
}

fn criterion_4_single_qubit() -> Outcome {
    let q = single_qubit_protocols();
    let m = |rows: &[[f64; 4]]| RealMatrix::from_rows(rows).unwrap();
    let a4opt = m(&[[1., 0., 0., 0.], [0., 0., 0., 1.], [0., 1., 0., 0.], [0., 0., -1., 0.]]);
    let a4pauli = m(&[[0., 2., 0., 0.], [0., 0., -2., 0.], [1., 0., 0., -1.], [1., 0., 0., 1.]]);
    let a3pauli = RealMatrix::from_rows(&[[0., 2., 0.], [0., 0., -2.], [2., 0., 0.]]).unwrap();
    let exact = q.optimal.rotation_matrix == a4opt
        && q.pauli4.rotation_matrix == a4pauli
        && q.pauli3_reduced.rotation_matrix == a3pauli;
    let kappa = |a: &RealMatrix| condition_number(a).unwrap().value().unwrap();
    let ks = [
        kappa(&q.optimal.rotation_matrix),
        kappa(&q.pauli4.rotation_matrix),
        kappa(&q.pauli3_reduced.rotation_matrix),
    ];
    let kappa_ok = (ks[0] - 1.0).abs() <= 1e-12 && (ks[1] - SQRT_2).abs() <= 1e-12 && (ks[2] - 1.0).abs() <= 1e-12;
    let displacement = q.pauli3_reduced.reduction.as_ref().map(|r| r.displacement.clone());
    let displacement_ok = displacement.as_deref() == Some(&[0.0, 0.0, 1.0][..]);
    let rec = Reconstructor::new(q.pauli3_reduced.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = DensityMatrix::random(2, &mut rng);
        let b = qst::simulate::measure(&rho, &q.pauli3_reduced, &NoiseModel::ideal(), 0).unwrap();
        let est = rec.reconstruct(&b).unwrap();
        worst = worst.max(est.rho.matrix().max_abs_diff(rho.matrix()));
    }
    outcome(
        exact && kappa_ok && displacement_ok && worst <= 1e-12,
        format!(
            "matrices exact: {exact}; kappa = {:?}; displacement = {displacement:?}; round-trip max error {worst:e} over 100 states",
            ks
        ),
    )
}

fn criterion_5_qudits() -> Outcome {
    let mut worst_opt: f64 = 0.0;
    for d in 2..=8 {
        let k = condition_number(&optimal_gpos_qudit(d).unwrap().rotation_matrix).unwrap().value().unwrap();
        worst_opt = worst_opt.max((k - 1.0).abs());
    }
    let mut worst_pauli: f64 = 0.0;
    for n in 1..=3 {
        let k = condition_number(&pauli_tensor_protocol(n).unwrap().rotation_matrix).unwrap().value().unwrap();
        worst_pauli = worst_pauli.max((k - SQRT_2).abs());
    }
    let q4 = optimal_gpos_qudit(4).unwrap();
    let p1 = protocol_1_optimal();
    let same_set = p1.elements.len() == q4.elements.len()
        && p1.elements.iter().all(|e| q4.elements.iter().any(|f| f.matrix() == e.matrix()))
        && q4.elements.iter().all(|e| p1.elements.iter().any(|f| f.matrix() == e.matrix()));
    outcome(
        worst_opt <= 1e-10 && worst_pauli <= 1e-10 && same_set,
        format!(
            "max |kappa - 1| (d = 2..8) = {worst_opt:e}; max |kappa - √2| (N = 1..3) = {worst_pauli:e}; d = 4 set equals Protocol 1: {same_set}"
        ),
    )
}

fn criterion_6_perturbation_bounds() -> Outcome {
    let protocols = table_protocols();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    let mut worst_p1: f64 = 0.0;
    let mut max_ratio_over_kappa: f64 = 0.0;
    let trials = 1000;
    for t in 0..trials {
        let spec = &protocols[t % protocols.len()];
        let rho = DensityMatrix::random(4, &mut rng);
        let b = spec.ideal_observations(rho.matrix()).unwrap();
        let scale = 10f64.powf(rng.random_range(-6.0..-1.0));
        let db: Vec<f64> = (0..b.len()).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let r = perturbation_bound_check(&spec.rotation_matrix, &b, &db, None).unwrap();
        if !r.holds {
            violations += 1;
        }
        let ratio = r.amplification_ratio().unwrap();
        max_ratio_over_kappa = max_ratio_over_kappa.max(ratio / r.kappa);
        if spec.id == "1" {
            worst_p1 = worst_p1.max((ratio - 1.0).abs());
        }
    }
    outcome(
        violations == 0 && worst_p1 <= 1e-9,
        format!(
            "{trials} trials over 7 protocols: {violations} violations; max ratio/kappa = {max_ratio_over_kappa:.6}; Protocol 1 max |ratio - 1| = {worst_p1:e}"
        ),
    )
}

fn criterion_7_gastinel_kahan() -> Outcome {
    let mut detail = String::new();
    let mut passed = true;
    let mut square = 0;
    for spec in table_protocols() {
        let a = &spec.rotation_matrix;
        if !a.is_square() {
            continue;
        }
        square += 1;
        let gk = gastinel_kahan_distance(a).unwrap();
        let kappa = condition_number(a).unwrap().value().unwrap();
        let target = 1.0 / kappa;
        let dev = (gk.measured_distance - target).abs() / target;
        let ok = gk.nearest_is_singular() && dev <= 1e-9;
        passed &= ok;
        detail.push_str(&format!(
            "P{}: dist = {:.6}, nearest sigma_min/sigma_max = {:.1e}, rel dev {:.1e}; ",
            spec.id, gk.measured_distance, gk.nearest_relative_sigma_min, dev
        ));
    }
    outcome(passed && square == 4, format!("{square} square protocols. {detail}"))
}

fn criterion_8_optics() -> Outcome {
    let setup = verify_setup().unwrap();
    let worst_fid = setup
        .table2
        .iter()
        .chain(&setup.table3)
        .map(|r| (r.fidelity - 1.0).abs())
        .fold(0.0, f64::max);
    let rows_ok = setup.table2.len() == 20 && setup.table3.len() == 8 && worst_fid <= FIDELITY_TOL;
    let bs_ok = setup.beam_splitter.len() == 5 && setup.beam_splitter.iter().all(|c| c.passed);
    let worst_bs = setup.beam_splitter.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    let cnot_ops = cnot_disentangle_check();
    let cnot_states = setup2_disentangle_check();
    let cnot_ok = cnot_ops.all_passed() && cnot_states.all_passed() && cnot_states.entries.len() == 8;
    let sigs = coincidence_signatures();
    let sig_ok = sigs.iter().filter(|s| s.state.starts_with('Ψ')).count() == 2 && sigs.iter().all(|s| s.passed);
    outcome(
        rows_ok && bs_ok && cnot_ok && sig_ok,
        format!(
            "28 rows max |F - 1| = {worst_fid:e}; 5 BS identities max dev {worst_bs:e}; CNOT operator and state checks: {cnot_ok}; coincidence signatures: {sig_ok}"
        ),
    )
}

/// Seeded regression: 20000 Ginibre states, one Poisson realization each at
/// 10^4 counts per outcome. The Protocol 1 / Protocol 2 gap is about 1% of
/// the mean, so a few hundred states would leave the order to chance. The
/// detail line prints the paired standard error next to the gap.
fn criterion_9_monte_carlo() -> Outcome {
    let states = random_states(4, 20_000, 20_240_601);
    let specs: Vec<_> = ["1", "2", "3"].iter().map(|id| protocol_by_id(id).unwrap()).collect();
    let opts = ExperimentOptions {
        trials: 1,
        seed: 9,
        keep_raw: true,
    };
    let table = robustness_experiment(&specs, &states, &[NoiseModel::poisson(10_000)], &opts).unwrap();
    let mean = |id: &str| table.row(id, 0).unwrap().mean_trace_distance;
    let (m1, m2, m3) = (mean("1"), mean("2"), mean("3"));
    // paired standard error of the P1 - P2 difference
    let raw = table.trials.as_ref().unwrap();
    let td = |id: &str| raw.iter().filter(|t| t.protocol == id).map(|t| t.trace_distance).collect::<Vec<_>>();
    let (t1, t2) = (td("1"), td("2"));
    let diffs: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| b - a).collect();
    let n = diffs.len() as f64;
    let md = diffs.iter().sum::<f64>() / n;
    let se = (diffs.iter().map(|d| (d - md).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    outcome(
        m1 <= m2 && m2 <= m3 && table.total_violations() == 0,
        format!(
            "mean trace distance P1 = {m1:.6}, P2 = {m2:.6}, P3 = {m3:.6}; P2 - P1 = {md:.2e} ± {se:.1e} (paired s.e.); bound violations {}",
            table.total_violations()
        ),
    )
}

fn criterion_10_mub() -> Outcome {
    let mut passed = true;
    let mut detail = String::new();
    for v in [MubVariant::Adamson, MubVariant::Bandyopadhyay] {
        let r = mub_check(v);
        let ok = r.pairs_checked == 160 && r.passed(1e-12);
        passed &= ok;
        let rel = epr_relations(v);
        let worst = rel.iter().map(|e| (e.matched_overlap - 1.0).abs()).fold(0.0, f64::max);
        let relabelled: Vec<String> = rel
            .iter()
            .filter(|e| e.matched_partner != e.literal_partner)
            .map(|e| format!("{}~{} (written {})", e.basis_state, e.matched_partner, e.literal_partner))
            .collect();
        passed &= worst <= 1e-12;
        detail.push_str(&format!(
            "{v:?}: {} pairs, max dev {:.1e}, {} local-equivalence overlaps max |1 - |o|| = {worst:.1e}",
            r.pairs_checked,
            r.max_deviation,
            rel.len()
        ));
        if !relabelled.is_empty() {
            detail.push_str(&format!(", Bell partner swapped for {}", relabelled.join(", ")));
        }
        detail.push_str("; ");
    }
    outcome(passed, detail)
}

#[test]
fn acceptance_criteria() {
    let (c1, red_cells) = {
        let start = Instant::now();
        let (mut o, cells) = criterion_1_table1();
        let elapsed = start.elapsed();
        o.detail = format!("{} [{elapsed:.2?}, limit 1s]", o.detail);
        if elapsed > Duration::from_secs(1) {
            o.passed = false;
        }
        (o, cells)
    };
    let results = vec![
        ("Table I condition numbers", c1),
        ("Protocol 1 rotation matrix", timed(None, criterion_2_protocol1_matrix)),
        ("worked 2x2 example", timed(None, criterion_3_worked_example)),
        ("single-qubit suite", timed(None, criterion_4_single_qubit)),
        ("qudit and multiqubit generality", timed(Some(Duration::from_secs(5)), criterion_5_qudits)),
        ("perturbation bounds", timed(None, criterion_6_perturbation_bounds)),
        ("Gastinel-Kahan distance", timed(None, criterion_7_gastinel_kahan)),
        ("optics suite", timed(None, criterion_8_optics)),
        ("Monte Carlo ordering", timed(Some(Duration::from_secs(60)), criterion_9_monte_carlo)),
        ("MUB property", timed(None, criterion_10_mub)),
    ];
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }

    let known: Vec<(String, Table1Column)> =
        KNOWN_RED_CELLS.iter().map(|(p, c)| (p.to_string(), *c)).collect();
    assert_eq!(
        red_cells, known,
        "Table I mismatches differ from the documented ones"
    );
    let unexpected: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(i, (_, o))| !o.passed && !(*i == 0 && red_cells == known))
        .map(|(i, _)| i + 1)
        .collect();
    assert!(unexpected.is_empty(), "criteria failing: {unexpected:?}");
}
