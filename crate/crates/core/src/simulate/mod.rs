//! Measurement simulation and linear-inversion reconstruction.
//!
//! `measure` turns a true state into an observation vector `b` with the same
//! row layout as the protocol's rotation matrix, and `reconstruct` inverts it
//! by least squares. Operator-kind rows are assembled from the probabilities
//! of their eigenstates, so projector and operator protocols share one path.

mod experiment;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::numerics::{vec_norm, LeastSquares};
use crate::protocols::ProtocolSpec;
use crate::states::{fidelity, trace_distance, DensityMatrix, RealStateVector};

pub use experiment::{
    random_states, robustness_experiment, substream_rng, ExperimentOptions, RobustnessRow,
    RobustnessTable, TrialRecord,
};

/// Probabilities may leave `[0, 1]` by this much before the state is rejected.
pub const PROBABILITY_TOL: f64 = 1e-9;
/// Smallest eigenvalue allowed for an input state.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseMode {
    /// `b = A vec(rho)` exactly.
    Ideal,
    /// Each row gets additive `N(0, sigma_rel * max|b|)` noise.
    Gaussian { sigma_rel: f64 },
    /// Each eigenstate outcome is counted as `Poisson(N eta p)`.
    PoissonCounts,
}

/// How the shot count is shared between measurement outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShotBudget {
    /// Every outcome (projector or eigenstate) receives `shots`.
    #[default]
    PerSetting,
    /// `shots` is split evenly over all outcomes of the protocol.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub shots: u64,
    /// Detection efficiency `eta` in `(0, 1]`.
    pub efficiency: f64,
    /// Efficiency used to turn counts back into probabilities.
    pub assumed_efficiency: f64,
    pub mode: NoiseMode,
    #[serde(default)]
    pub budget: ShotBudget,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            shots: 0,
            efficiency: 1.0,
            assumed_efficiency: 1.0,
            mode: NoiseMode::Ideal,
            budget: ShotBudget::PerSetting,
        }
    }

    /// Calibrated Poisson counting with `shots` per outcome.
    pub fn poisson(shots: u64) -> Self {
        Self {
            shots,
            mode: NoiseMode::PoissonCounts,
            ..Self::ideal()
        }
    }

    pub fn gaussian(sigma_rel: f64) -> Self {
        Self {
            mode: NoiseMode::Gaussian { sigma_rel },
            ..Self::ideal()
        }
    }

    pub fn with_efficiency(mut self, efficiency: f64, assumed_efficiency: f64) -> Self {
        self.efficiency = efficiency;
        self.assumed_efficiency = assumed_efficiency;
        self
    }

    pub fn with_budget(mut self, budget: ShotBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QstError::InvalidNoise(msg));
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return bad(format!("efficiency must lie in (0, 1], got {}", self.efficiency));
        }
        if !(self.assumed_efficiency > 0.0 && self.assumed_efficiency.is_finite()) {
            return bad(format!(
                "assumed efficiency must be positive, got {}",
                self.assumed_efficiency
            ));
        }
        match self.mode {
            NoiseMode::PoissonCounts if self.shots == 0 => bad("Poisson mode needs shots > 0".into()),
            NoiseMode::Gaussian { sigma_rel } if !(sigma_rel >= 0.0 && sigma_rel.is_finite()) => {
                bad(format!("sigma_rel must be finite and nonnegative, got {sigma_rel}"))
            }
            _ => Ok(()),
        }
    }

    /// Short human-readable description, e.g. `poisson N=10000`.
    pub fn label(&self) -> String {
        match self.mode {
            NoiseMode::Ideal => "ideal".into(),
            NoiseMode::Gaussian { sigma_rel } => format!("gaussian sigma_rel={sigma_rel}"),
            NoiseMode::PoissonCounts => {
                let budget = match self.budget {
                    ShotBudget::PerSetting => "per-setting",
                    ShotBudget::Total => "total",
                };
                let eta = if self.efficiency == 1.0 && self.assumed_efficiency == 1.0 {
                    String::new()
                } else {
                    format!(" eta={} eta_assumed={}", self.efficiency, self.assumed_efficiency)
                };
                format!("poisson N={} ({budget}){eta}", self.shots)
            }
        }
    }
}

/// Total number of counted outcomes (eigenstates and projectors) of a protocol.
pub fn outcome_count(spec: &ProtocolSpec) -> usize {
    spec.elements
        .iter()
        .flat_map(|e| e.row_spectra())
        .map(|s| s.len())
        .sum()
}

fn check_state(rho: &DensityMatrix, spec: &ProtocolSpec) -> Result<()> {
    if rho.dim() != spec.dim {
        return Err(QstError::Dimension(format!(
            "protocol {} measures dimension {}, state has dimension {}",
            spec.id,
            spec.dim,
            rho.dim()
        )));
    }
    let v = rho.validity()?;
    if !v.is_positive(PSD_TOL) {
        return Err(QstError::InvalidState(format!(
            "state has eigenvalue {:e} below zero",
            v.min_eigenvalue
        )));
    }
    Ok(())
}

/// Simulated observation vector with a generator seeded from `seed`.
pub fn measure(rho: &DensityMatrix, spec: &ProtocolSpec, noise: &NoiseModel, seed: u64) -> Result<Vec<f64>> {
    measure_with_rng(rho, spec, noise, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Simulated observation vector drawing from `rng`.
///
/// The rows follow the unreduced layout of the protocol; a trace reduction is
/// applied later by [`reconstruct`].
pub fn measure_with_rng<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    spec: &ProtocolSpec,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    noise.validate()?;
    check_state(rho, spec)?;
    match noise.mode {
        NoiseMode::Ideal => spec.ideal_observations(rho.matrix()),
        NoiseMode::Gaussian { sigma_rel } => {
            let mut b = spec.ideal_observations(rho.matrix())?;
            let scale = sigma_rel * b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale > 0.0 {
                let normal = Normal::new(0.0, scale).map_err(|e| QstError::InvalidNoise(e.to_string()))?;
                for v in &mut b {
                    *v += normal.sample(rng);
                }
            }
            Ok(b)
        }
        NoiseMode::PoissonCounts => {
            let shots = match noise.budget {
                ShotBudget::PerSetting => noise.shots as f64,
                ShotBudget::Total => noise.shots as f64 / outcome_count(spec) as f64,
            };
            let mut b = Vec::with_capacity(spec.rotation_matrix.rows());
            for element in &spec.elements {
                for spectrum in element.row_spectra() {
                    let mut row = 0.0;
                    for comp in &spectrum {
                        let p = rho.probability(&comp.state);
                        if !(-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(&p) {
                            return Err(QstError::InvalidState(format!(
                                "probability {p} for outcome {} of {}",
                                comp.label,
                                element.label()
                            )));
                        }
                        let mean = shots * noise.efficiency * p.clamp(0.0, 1.0);
                        let count = if mean > 0.0 {
                            Poisson::new(mean)
                                .map_err(|e| QstError::InvalidNoise(e.to_string()))?
                                .sample(rng)
                        } else {
                            0.0
                        };
                        row += comp.eigenvalue * count / (shots * noise.assumed_efficiency);
                    }
                    b.push(row);
                }
            }
            Ok(b)
        }
    }
}

/// Comparison of a reconstruction with the true state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthComparison {
    /// Fidelity of the unit-trace copies.
    pub fidelity: f64,
    /// Set when the estimate had negative eigenvalues that were clipped.
    pub psd_projected: bool,
    /// Trace distance of the unit-trace copies.
    pub trace_distance: f64,
    /// `|rho_hat_ij - rho_ij|`, row by row.
    pub element_errors: Vec<Vec<f64>>,
    /// `||x_hat - x|| / ||x||` on the full vectorization.
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub x: RealStateVector,
    pub rho: DensityMatrix,
    /// `||A x - b||` of the solved system.
    pub residual: f64,
    /// `Tr rho_hat`, the recovered efficiency for unnormalized data.
    pub trace: f64,
    pub comparison: Option<TruthComparison>,
}

impl ReconstructionResult {
    /// Fills in the comparison with `truth`.
    pub fn compare_with(mut self, truth: &DensityMatrix) -> Result<Self> {
        self.comparison = Some(compare(&self.rho, truth)?);
        Ok(self)
    }
}

fn compare(estimate: &DensityMatrix, truth: &DensityMatrix) -> Result<TruthComparison> {
    if estimate.dim() != truth.dim() {
        return Err(QstError::Dimension(format!(
            "estimate has dimension {}, truth {}",
            estimate.dim(),
            truth.dim()
        )));
    }
    let est_n = estimate.normalized()?;
    let truth_n = truth.normalized()?;
    let f = fidelity(&est_n, &truth_n)?;
    let d = truth.dim();
    let element_errors = (0..d)
        .map(|i| (0..d).map(|j| (estimate.matrix()[(i, j)] - truth.matrix()[(i, j)]).norm()).collect())
        .collect();
    let x_hat = estimate.to_vec();
    let x = truth.to_vec();
    let diff: Vec<f64> = x_hat.values().iter().zip(x.values()).map(|(a, b)| a - b).collect();
    Ok(TruthComparison {
        fidelity: f.value,
        psd_projected: f.psd_projected,
        trace_distance: trace_distance(&est_n, &truth_n)?,
        element_errors,
        relative_error: vec_norm(&diff) / vec_norm(x.values()),
    })
}

/// A protocol together with its cached least-squares solver.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    spec: ProtocolSpec,
    solver: LeastSquares,
}

impl Reconstructor {
    pub fn new(spec: ProtocolSpec) -> Result<Self> {
        let solver = LeastSquares::new(&spec.rotation_matrix)?;
        Ok(Self { spec, solver })
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn solver(&self) -> &LeastSquares {
        &self.solver
    }

    /// `b` as seen by the solver: displaced when the protocol is trace-reduced.
    pub fn solver_rhs(&self, b: &[f64]) -> Vec<f64> {
        match &self.spec.reduction {
            Some(red) => red.displace(b),
            None => b.to_vec(),
        }
    }

    /// Least-squares solution in solver coordinates.
    pub fn solve_reduced(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solver.solve(&self.solver_rhs(b))
    }

    pub fn reconstruct(&self, b: &[f64]) -> Result<ReconstructionResult> {
        let rhs = self.solver_rhs(b);
        let sol = self.solver.solve(&rhs)?;
        let fitted = self.spec.rotation_matrix.mul_vec(&sol)?;
        let residual = vec_norm(&fitted.iter().zip(&rhs).map(|(p, q)| p - q).collect::<Vec<_>>());
        let full = match &self.spec.reduction {
            Some(red) => red.expand(&sol, self.spec.dim),
            None => sol,
        };
        let x = RealStateVector::from_values(full)?;
        let rho = x.to_density_matrix();
        Ok(ReconstructionResult {
            trace: rho.trace(),
            x,
            rho,
            residual,
            comparison: None,
        })
    }
}

/// Linear-inversion estimate of the state behind `b`. No positivity or trace
/// repair is applied.
pub fn reconstruct(b: &[f64], spec: &ProtocolSpec) -> Result<ReconstructionResult> {
    Reconstructor::new(spec.clone())?.reconstruct(b)
}
