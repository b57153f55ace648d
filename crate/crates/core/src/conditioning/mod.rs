//! Error-robustness analysis of rotation matrices.
//!
//! The two-norm condition number `kappa(A) = sigma_max / sigma_min` bounds how
//! much a relative error in the observations can grow in the reconstructed
//! state. Its reciprocal is the relative spectral distance from `A` to the
//! nearest singular matrix.

mod table1;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QstError, Result};
use crate::numerics::{svd, vec_norm, RealMatrix, SvdResult, RANK_TOL};
use crate::protocols::{Locality, ProtocolSpec};

pub use table1::{
    table1_checks, table1_report, Table1Cell, Table1Column, Tolerance, TABLE1_TARGETS,
};

/// A two-norm condition number, or an explicit marker for singular input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionNumber {
    Finite(f64),
    Singular,
}

impl ConditionNumber {
    /// `sigma_max / sigma_min`, or `Singular` when `sigma_min` falls below
    /// the rank tolerance.
    pub fn from_singular_values(values: &[f64]) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if values.is_empty() || max == 0.0 || min <= RANK_TOL * max {
            Self::Singular
        } else {
            Self::Finite(max / min)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(k) => Some(k),
            Self::Singular => None,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, Self::Singular)
    }
}

impl fmt::Display for ConditionNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(k) => write!(f, "{}", crate::format::sig12(*k)),
            Self::Singular => f.write_str("inf"),
        }
    }
}

// JSON has no infinity, so the singular case is the string "singular".
impl Serialize for ConditionNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(k) => s.serialize_f64(*k),
            Self::Singular => s.serialize_str("singular"),
        }
    }
}

impl<'de> Deserialize<'de> for ConditionNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Num(f64),
            Text(String),
        }
        match Wire::deserialize(d)? {
            Wire::Num(k) => Ok(Self::Finite(k)),
            Wire::Text(t) if t == "singular" => Ok(Self::Singular),
            Wire::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"singular\", found \"{t}\""
            ))),
        }
    }
}

pub fn condition_number(a: &RealMatrix) -> Result<ConditionNumber> {
    Ok(ConditionNumber::from_singular_values(&svd(a)?.singular_values))
}

/// `||A||_F ||A^+||_F`. Reported for reference only.
pub fn frobenius_condition_number(a: &RealMatrix) -> Result<ConditionNumber> {
    let values = svd(a)?.singular_values;
    if ConditionNumber::from_singular_values(&values).is_singular() {
        return Ok(ConditionNumber::Singular);
    }
    let norm: f64 = values.iter().map(|s| s * s).sum::<f64>().sqrt();
    let inv: f64 = values.iter().map(|s| 1.0 / (s * s)).sum::<f64>().sqrt();
    Ok(ConditionNumber::Finite(norm * inv))
}

/// `C = A^T A`.
pub fn error_matrix(a: &RealMatrix) -> RealMatrix {
    &a.transpose() * a
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GastinelKahan {
    /// `sigma_min / sigma_max`.
    pub distance: f64,
    /// `A - sigma_min u_min v_min^T`.
    pub nearest_singular: RealMatrix,
    /// `||A - nearest||_2 / ||A||_2`, measured independently of `distance`.
    pub measured_distance: f64,
    /// Smallest singular value of `nearest_singular` relative to its largest.
    pub nearest_relative_sigma_min: f64,
}

impl GastinelKahan {
    pub fn nearest_is_singular(&self) -> bool {
        self.nearest_relative_sigma_min < RANK_TOL
    }
}

/// Relative distance from a square nonsingular matrix to the set of singular
/// matrices, together with the nearest singular matrix.
pub fn gastinel_kahan_distance(a: &RealMatrix) -> Result<GastinelKahan> {
    if !a.is_square() {
        return Err(QstError::Dimension(format!(
            "distance to singularity needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dec = svd(a)?;
    let (smax, smin) = (dec.sigma_max(), dec.sigma_min());
    if ConditionNumber::from_singular_values(&dec.singular_values).is_singular() {
        return Err(QstError::Singular {
            sigma_min: smin,
            sigma_max: smax,
        });
    }
    let k = dec.singular_values.len() - 1;
    let u = dec.u.column(k);
    let v = dec.v.column(k);
    let nearest = RealMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] - smin * u[i] * v[j]);
    let diff = a.sub(&nearest)?;
    let measured_distance = svd(&diff)?.sigma_max() / smax;
    let near = svd(&nearest)?;
    Ok(GastinelKahan {
        distance: smin / smax,
        nearest_singular: nearest,
        measured_distance,
        nearest_relative_sigma_min: near.sigma_min() / near.sigma_max(),
    })
}

/// Outcome of comparing `A x = b` with a perturbed system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub kappa: f64,
    pub x: Vec<f64>,
    pub x_perturbed: Vec<f64>,
    /// `||dx|| / ||x||`.
    pub relative_dx: f64,
    /// `||P db|| / ||P b||` with `P` the projector onto the range of `A`.
    pub relative_db: f64,
    /// `||dA|| / ||A||`, zero when `A` is unperturbed.
    pub relative_da: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub holds: bool,
}

impl PerturbationReport {
    /// `relative_dx / relative_db`; `None` when `db` vanishes.
    pub fn amplification_ratio(&self) -> Option<f64> {
        (self.relative_db > 0.0).then(|| self.relative_dx / self.relative_db)
    }
}

/// Floating-point slack when comparing against the bounds.
const BOUND_SLACK: f64 = 1e-12;

/// Solves `A x = b` and the perturbed system and compares the relative change
/// in `x` with the perturbation bounds.
///
/// With `delta_a = None` the bounds are
/// `(1/kappa) rel(db) <= rel(dx) <= kappa rel(db)`. For a tall `A` only the
/// component of `db` inside the range of `A` reaches the least-squares
/// solution, so `rel(db)` is measured on that component.
///
/// With a matrix perturbation (square `A` only) the upper bound is
/// `kappa / (1 - kappa rel(dA)) (rel(dA) + rel(db))`, valid when
/// `||dA|| < 1/||A^-1||`; larger perturbations are refused.
pub fn perturbation_bound_check(
    a: &RealMatrix,
    b: &[f64],
    delta_b: &[f64],
    delta_a: Option<&RealMatrix>,
) -> Result<PerturbationReport> {
    if b.len() != a.rows() || delta_b.len() != a.rows() {
        return Err(QstError::Dimension(format!(
            "b and delta_b need {} entries, got {} and {}",
            a.rows(),
            b.len(),
            delta_b.len()
        )));
    }
    let dec = svd(a)?;
    let kappa = ConditionNumber::from_singular_values(&dec.singular_values)
        .value()
        .ok_or(QstError::Singular {
            sigma_min: dec.sigma_min(),
            sigma_max: dec.sigma_max(),
        })?;
    if dec.singular_values.len() < a.cols() {
        return Err(QstError::RankDeficient {
            rank: dec.singular_values.len(),
            required: a.cols(),
        });
    }
    let solve = |dec: &SvdResult, rhs: &[f64]| -> Vec<f64> {
        let coeff: Vec<f64> = (0..dec.singular_values.len())
            .map(|k| (0..rhs.len()).map(|i| dec.u[(i, k)] * rhs[i]).sum::<f64>() / dec.singular_values[k])
            .collect();
        (0..dec.v.rows())
            .map(|i| coeff.iter().enumerate().map(|(k, c)| dec.v[(i, k)] * c).sum())
            .collect()
    };
    let project = |rhs: &[f64]| -> f64 {
        (0..dec.singular_values.len())
            .map(|k| (0..rhs.len()).map(|i| dec.u[(i, k)] * rhs[i]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let x = solve(&dec, b);
    let b_pert: Vec<f64> = b.iter().zip(delta_b).map(|(p, q)| p + q).collect();
    let norm_x = vec_norm(&x);
    let norm_b = project(b);
    let relative_db = if norm_b > 0.0 { project(delta_b) / norm_b } else { 0.0 };

    let (x_perturbed, dx, relative_da, lower_bound, upper_bound) = match delta_a {
        // solving for dx directly avoids the cancellation in (x + dx) - x
        None => {
            let dx = solve(&dec, delta_b);
            let xp: Vec<f64> = x.iter().zip(&dx).map(|(p, q)| p + q).collect();
            (xp, dx, 0.0, relative_db / kappa, kappa * relative_db)
        }
        Some(da) => {
            if !a.is_square() || da.shape() != a.shape() {
                return Err(QstError::Dimension(
                    "matrix perturbations are supported for square systems of matching shape".into(),
                ));
            }
            let norm_da = svd(da)?.sigma_max();
            let limit = dec.sigma_min();
            if norm_da >= limit {
                return Err(QstError::PerturbationTooLarge {
                    norm_delta_a: norm_da,
                    limit,
                });
            }
            let rel_da = norm_da / dec.sigma_max();
            let pert = svd(&a.add(da)?)?;
            let upper = kappa / (1.0 - kappa * rel_da) * (rel_da + relative_db);
            let xp = solve(&pert, &b_pert);
            let dx = xp.iter().zip(&x).map(|(p, q)| p - q).collect();
            (xp, dx, rel_da, 0.0, upper)
        }
    };
    let relative_dx = if norm_x > 0.0 { vec_norm(&dx) / norm_x } else { vec_norm(&dx) };
    let holds = relative_dx >= lower_bound * (1.0 - BOUND_SLACK) - f64::MIN_POSITIVE
        && relative_dx <= upper_bound * (1.0 + BOUND_SLACK) + 1e-15;
    Ok(PerturbationReport {
        kappa,
        x,
        x_perturbed,
        relative_dx,
        relative_db,
        relative_da,
        lower_bound,
        upper_bound,
        holds,
    })
}

/// Condition-number summary of one protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditioningReport {
    pub id: String,
    pub name: String,
    pub n_projectors: usize,
    pub locality: Locality,
    pub shape: (usize, usize),
    pub singular_values_a: Vec<f64>,
    pub kappa_a: ConditionNumber,
    /// Computed from the singular values of `C` directly, not by squaring.
    pub kappa_c: ConditionNumber,
    pub min_svd_c: f64,
    /// `sigma_min(A) / sigma_max(A)`: relative distance to the nearest
    /// rank-deficient matrix (the Gastinel-Kahan distance when `A` is square).
    pub dist_to_singular: f64,
}

impl ConditioningReport {
    pub fn for_protocol(spec: &ProtocolSpec) -> Result<Self> {
        let a = &spec.rotation_matrix;
        let sa = svd(a)?.singular_values;
        let sc = svd(&error_matrix(a))?.singular_values;
        let smax = sa.first().copied().unwrap_or(0.0);
        let smin = sa.last().copied().unwrap_or(0.0);
        Ok(Self {
            id: spec.id.clone(),
            name: spec.name.clone(),
            n_projectors: spec.n_elements(),
            locality: spec.locality,
            shape: a.shape(),
            kappa_a: ConditionNumber::from_singular_values(&sa),
            kappa_c: ConditionNumber::from_singular_values(&sc),
            min_svd_c: sc.last().copied().unwrap_or(0.0),
            dist_to_singular: if smax > 0.0 { smin / smax } else { 0.0 },
            singular_values_a: sa,
        })
    }
}
