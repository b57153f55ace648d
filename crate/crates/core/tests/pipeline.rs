//! State in, counts, estimate out, across every protocol.

use qst::protocols::{import_catalog, export_catalog, protocol_by_id, table_protocols};
use qst::simulate::{measure, outcome_count, NoiseModel, Reconstructor, ShotBudget};
use qst::states::{DensityMatrix, NAMED_TWO_QUBIT_STATES};

#[test]
fn named_states_survive_shot_noise_in_every_protocol() {
    for spec in table_protocols() {
        let rec = Reconstructor::new(spec.clone()).unwrap();
        for (k, name) in NAMED_TWO_QUBIT_STATES.iter().enumerate() {
            let rho = DensityMatrix::named(name).unwrap();
            let b = measure(&rho, &spec, &NoiseModel::poisson(1_000_000), k as u64).unwrap();
            let cmp = rec.reconstruct(&b).unwrap().compare_with(&rho).unwrap().comparison.unwrap();
            assert!(cmp.fidelity > 0.99, "protocol {} state {name}: F = {}", spec.id, cmp.fidelity);
        }
    }
}

#[test]
fn total_budget_costs_accuracy_for_overcomplete_protocols() {
    // Protocol 4 spreads the same total count over 36 outcomes instead of 16
    let rho = DensityMatrix::named("Φ+").unwrap();
    let mean_td = |id: &str, budget: ShotBudget| {
        let spec = protocol_by_id(id).unwrap();
        let rec = Reconstructor::new(spec.clone()).unwrap();
        let noise = NoiseModel::poisson(100_000).with_budget(budget);
        (0..200u64)
            .map(|s| {
                let b = measure(&rho, &spec, &noise, s).unwrap();
                rec.reconstruct(&b).unwrap().compare_with(&rho).unwrap().comparison.unwrap().trace_distance
            })
            .sum::<f64>()
            / 200.0
    };
    assert_eq!(outcome_count(&protocol_by_id("4").unwrap()), 36);
    let per_setting = mean_td("4", ShotBudget::PerSetting);
    let total = mean_td("4", ShotBudget::Total);
    assert!(total > 3.0 * per_setting, "total {total} vs per-setting {per_setting}");
}

#[test]
fn gaussian_noise_scales_with_sigma() {
    let spec = protocol_by_id("6").unwrap();
    let rec = Reconstructor::new(spec.clone()).unwrap();
    let rho = DensityMatrix::named("HV").unwrap();
    let err = |sigma: f64| {
        (0..100u64)
            .map(|s| {
                let b = measure(&rho, &spec, &NoiseModel::gaussian(sigma), s).unwrap();
                rec.reconstruct(&b).unwrap().compare_with(&rho).unwrap().comparison.unwrap().relative_error
            })
            .sum::<f64>()
    };
    let ratio = err(0.1) / err(0.001);
    assert!((ratio - 100.0).abs() < 1e-6, "ratio {ratio}");
}

#[test]
fn uncorrected_efficiency_shows_up_in_the_trace() {
    let spec = protocol_by_id("5b").unwrap();
    let rho = DensityMatrix::named("Ψ̄+").unwrap();
    let b = measure(&rho, &spec, &NoiseModel::poisson(10_000_000).with_efficiency(0.6, 1.0), 4).unwrap();
    let est = Reconstructor::new(spec).unwrap().reconstruct(&b).unwrap();
    assert!((est.trace - 0.6).abs() < 2e-3, "trace {}", est.trace);
    let rescaled = est.rho.normalized().unwrap();
    assert!(rescaled.matrix().max_abs_diff(rho.matrix()) < 5e-3);
}

#[test]
fn exported_protocols_reconstruct_like_the_originals() {
    let specs = table_protocols();
    let back = import_catalog(&export_catalog(&specs).unwrap()).unwrap();
    let rho = DensityMatrix::named("RL").unwrap();
    for (a, b) in specs.iter().zip(&back) {
        let obs = measure(&rho, a, &NoiseModel::poisson(5_000), 9).unwrap();
        assert_eq!(obs, measure(&rho, b, &NoiseModel::poisson(5_000), 9).unwrap());
        let ea = Reconstructor::new(a.clone()).unwrap().reconstruct(&obs).unwrap();
        let eb = Reconstructor::new(b.clone()).unwrap().reconstruct(&obs).unwrap();
        assert!(ea.rho.matrix().max_abs_diff(eb.rho.matrix()) < 1e-13);
    }
}

#[test]
fn results_serialize_to_json() {
    let spec = protocol_by_id("1").unwrap();
    let rho = DensityMatrix::named("Φ-").unwrap();
    let b = measure(&rho, &spec, &NoiseModel::poisson(1000), 2).unwrap();
    let result = Reconstructor::new(spec).unwrap().reconstruct(&b).unwrap().compare_with(&rho).unwrap();
    let text = serde_json::to_string(&result).unwrap();
    let back: qst::simulate::ReconstructionResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back.rho, result.rho);
    assert_eq!(back.comparison.unwrap().fidelity, result.comparison.unwrap().fidelity);
}
