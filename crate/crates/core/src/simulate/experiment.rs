//! Monte Carlo comparison of protocols under a grid of noise models.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{measure_with_rng, NoiseModel, Reconstructor};
use crate::conditioning::ConditionNumber;
use crate::error::{QstError, Result};
use crate::numerics::vec_norm;
use crate::protocols::ProtocolSpec;
use crate::states::DensityMatrix;

/// Slack on the amplification bounds for rounding in the solves.
const BOUND_SLACK: f64 = 1e-12;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Generator for one trial.
///
/// The key `(seed, protocol id, noise level)` selects the ChaCha key and
/// `stream` the ChaCha stream, so every trial is independent of scheduling
/// and of which other protocols or levels are in the run.
pub fn substream_rng(seed: u64, protocol: &str, level: usize, stream: u64) -> ChaCha8Rng {
    let mut state = seed ^ fnv1a(protocol).rotate_left(17) ^ (level as u64).wrapping_mul(0xA24B_AED4_963E_E407);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// `count` random full-rank states of dimension `d`, generated in order from `seed`.
pub fn random_states(d: usize, count: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| DensityMatrix::random(d, &mut rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Noise realizations per state.
    pub trials: usize,
    pub seed: u64,
    /// Keep every trial in the output.
    pub keep_raw: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub protocol: String,
    pub noise_index: usize,
    pub state_index: usize,
    pub trial: usize,
    /// `||dx|| / ||x||` in the coordinates of the solved system.
    pub relative_error: f64,
    pub trace_distance: f64,
    pub fidelity: f64,
    /// `(||dx||/||x||) / (||db||/||b||)`, with `db` restricted to the range of `A`.
    pub amplification_ratio: Option<f64>,
    pub bound_holds: bool,
}

/// Aggregate over all states and trials for one protocol and noise level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub protocol: String,
    pub name: String,
    pub noise: String,
    pub noise_index: usize,
    pub kappa_a: ConditionNumber,
    pub samples: usize,
    pub mean_relative_error: f64,
    pub std_relative_error: f64,
    pub mean_trace_distance: f64,
    pub std_trace_distance: f64,
    pub mean_fidelity: f64,
    pub min_amplification: Option<f64>,
    pub max_amplification: Option<f64>,
    pub bound_violations: usize,
    /// Estimates that needed eigenvalue clipping for the fidelity.
    pub psd_projected: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessTable {
    pub rows: Vec<RobustnessRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<TrialRecord>>,
}

impl RobustnessTable {
    pub fn row(&self, protocol: &str, noise_index: usize) -> Option<&RobustnessRow> {
        self.rows
            .iter()
            .find(|r| r.protocol == protocol && r.noise_index == noise_index)
    }

    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.bound_violations).sum()
    }
}

struct Sample {
    record: TrialRecord,
    psd_projected: bool,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Position of one trial in the `(noise level, state, repetition)` grid.
struct TrialId {
    noise_index: usize,
    state_index: usize,
    trial: usize,
}

fn run_trial(
    rec: &Reconstructor,
    kappa: f64,
    rho: &DensityMatrix,
    noise: &NoiseModel,
    id: TrialId,
    rng: &mut ChaCha8Rng,
) -> Result<Sample> {
    let spec = rec.spec();
    let b_ideal = spec.ideal_observations(rho.matrix())?;
    let b = measure_with_rng(rho, spec, noise, rng)?;
    let x = rec.solve_reduced(&b_ideal)?;
    let db: Vec<f64> = b.iter().zip(&b_ideal).map(|(p, q)| p - q).collect();
    // the solve is linear, and A^+ db avoids cancellation in x_hat - x
    let dx = rec.solver().solve(&db)?;
    let relative_error = vec_norm(&dx) / vec_norm(&x);

    let u = &rec.solver().svd().u;
    let range_norm = |v: &[f64]| -> f64 {
        (0..u.cols())
            .map(|k| (0..v.len()).map(|i| u[(i, k)] * v[i]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let relative_db = range_norm(&db) / range_norm(&rec.solver_rhs(&b_ideal));
    let amplification_ratio = (relative_db > 0.0).then(|| relative_error / relative_db);
    let bound_holds = amplification_ratio.is_none_or(|r| {
        r >= (1.0 / kappa) * (1.0 - BOUND_SLACK) && r <= kappa * (1.0 + BOUND_SLACK)
    });

    let result = rec.reconstruct(&b)?.compare_with(rho)?;
    let cmp = result.comparison.expect("comparison filled");
    Ok(Sample {
        record: TrialRecord {
            protocol: spec.id.clone(),
            noise_index: id.noise_index,
            state_index: id.state_index,
            trial: id.trial,
            relative_error,
            trace_distance: cmp.trace_distance,
            fidelity: cmp.fidelity,
            amplification_ratio,
            bound_holds,
        },
        psd_projected: cmp.psd_projected,
    })
}

/// Runs every protocol against every state and noise level, `trials` times.
///
/// Trials run in parallel; results are gathered in `(state, trial)` order
/// before any statistic is computed, so the output does not depend on the
/// number of threads.
pub fn robustness_experiment(
    specs: &[ProtocolSpec],
    states: &[DensityMatrix],
    noise_grid: &[NoiseModel],
    options: &ExperimentOptions,
) -> Result<RobustnessTable> {
    if options.trials == 0 {
        return Err(QstError::InvalidArgument("trials must be at least 1".into()));
    }
    if states.is_empty() {
        return Err(QstError::InvalidArgument("no states to measure".into()));
    }
    for noise in noise_grid {
        noise.validate()?;
    }
    let mut rows = Vec::new();
    let mut raw = options.keep_raw.then(Vec::new);
    for spec in specs {
        let rec = Reconstructor::new(spec.clone())?;
        let kappa_a = ConditionNumber::from_singular_values(&rec.solver().svd().singular_values);
        let kappa = kappa_a.value().ok_or(QstError::Singular {
            sigma_min: rec.solver().svd().sigma_min(),
            sigma_max: rec.solver().svd().sigma_max(),
        })?;
        for (level, noise) in noise_grid.iter().enumerate() {
            let jobs = states.len() * options.trials;
            let samples: Vec<Sample> = (0..jobs)
                .into_par_iter()
                .map(|j| {
                    let (s, t) = (j / options.trials, j % options.trials);
                    let mut rng = substream_rng(options.seed, &spec.id, level, j as u64);
                    let id = TrialId {
                        noise_index: level,
                        state_index: s,
                        trial: t,
                    };
                    run_trial(&rec, kappa, &states[s], noise, id, &mut rng)
                })
                .collect::<Result<_>>()?;
            let rel = samples.iter().map(|s| s.record.relative_error);
            let td = samples.iter().map(|s| s.record.trace_distance);
            let (mean_relative_error, std_relative_error) = mean_std(rel);
            let (mean_trace_distance, std_trace_distance) = mean_std(td);
            let ratios = samples.iter().filter_map(|s| s.record.amplification_ratio);
            rows.push(RobustnessRow {
                protocol: spec.id.clone(),
                name: spec.name.clone(),
                noise: noise.label(),
                noise_index: level,
                kappa_a,
                samples: samples.len(),
                mean_relative_error,
                std_relative_error,
                mean_trace_distance,
                std_trace_distance,
                mean_fidelity: samples.iter().map(|s| s.record.fidelity).sum::<f64>() / samples.len() as f64,
                min_amplification: ratios.clone().reduce(f64::min),
                max_amplification: ratios.reduce(f64::max),
                bound_violations: samples.iter().filter(|s| !s.record.bound_holds).count(),
                psd_projected: samples.iter().filter(|s| s.psd_projected).count(),
            });
            if let Some(raw) = raw.as_mut() {
                raw.extend(samples.into_iter().map(|s| s.record));
            }
        }
    }
    Ok(RobustnessTable { rows, trials: raw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{protocol_1_optimal, protocol_3_james};

    #[test]
    fn substreams_are_distinct_and_stable() {
        use rand::Rng;
        let a: u64 = substream_rng(1, "1", 0, 0).random();
        let b: u64 = substream_rng(1, "1", 0, 1).random();
        let c: u64 = substream_rng(1, "2", 0, 0).random();
        let again: u64 = substream_rng(1, "1", 0, 0).random();
        assert_eq!(a, again);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn protocol_one_ratio_is_one() {
        let states = random_states(4, 5, 3);
        let opts = ExperimentOptions {
            trials: 4,
            seed: 2,
            keep_raw: true,
        };
        let table = robustness_experiment(
            &[protocol_1_optimal(), protocol_3_james()],
            &states,
            &[NoiseModel::poisson(1000), NoiseModel::gaussian(0.01)],
            &opts,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 4);
        assert_eq!(table.total_violations(), 0);
        for t in table.trials.as_ref().unwrap().iter().filter(|t| t.protocol == "1") {
            assert!((t.amplification_ratio.unwrap() - 1.0).abs() < 1e-9);
        }
        let again = robustness_experiment(
            &[protocol_1_optimal(), protocol_3_james()],
            &states,
            &[NoiseModel::poisson(1000), NoiseModel::gaussian(0.01)],
            &opts,
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&table).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn zero_trials_rejected() {
        let opts = ExperimentOptions {
            trials: 0,
            seed: 0,
            keep_raw: false,
        };
        assert!(robustness_experiment(&[protocol_1_optimal()], &random_states(4, 1, 0), &[NoiseModel::ideal()], &opts).is_err());
    }
}
