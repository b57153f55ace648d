//! Measurement protocols and their rotation matrices.
//!
//! A protocol is an ordered list of measurement elements. Each element adds
//! one or two rows to the rotation matrix `A`, which maps `x = vec(rho)` to
//! the vector `b` of ideal measurement means:
//!
//! * a Hermitian operator `M` contributes the row `Tr(E_i M)`;
//! * a pure projector `|psi><psi|` contributes `<psi|E_i|psi>`;
//! * a non-Hermitian operator `G = H + iK` contributes the two rows of `H`
//!   and `K`, i.e. the real and imaginary parts of `Tr(rho G)`.
//!
//! Element order is fixed, so every `A` is reproducible bit for bit.

mod catalog;
mod checks;
mod generalized;
mod two_qubit;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix, RealMatrix};
use crate::states::{slots, Slot};

pub use catalog::{export_catalog, import_catalog, CatalogEntry};
pub use checks::{
    cnot_disentangle_check, epr_relations, mub_check, CnotReport, EprRelation, IdentityCheck,
    MubReport,
};
pub use generalized::{
    optimal_gpos_qudit, pauli_tensor_protocol, single_qubit_protocols, SingleQubitProtocols,
};
pub use two_qubit::{
    gpo, protocol_1_optimal, protocol_2_pauli_products, protocol_3_james,
    protocol_4_separable36, protocol_5_mub, protocol_6_gellmann, protocol_7_patera_zassenhaus,
    mub_bases, LabelledBasis, MubVariant, JAMES_STATES, SEPARABLE36_STATES,
};

/// Residual imaginary parts above this abort the construction of `A`.
pub const IMAGINARY_RESIDUAL_TOL: f64 = 1e-10;

/// One term `lambda |psi><psi|` of a spectral decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenComponent {
    pub eigenvalue: f64,
    pub state: Vec<Complex64>,
    pub label: String,
}

impl EigenComponent {
    pub fn new(eigenvalue: f64, state: Vec<Complex64>, label: impl Into<String>) -> Self {
        Self {
            eigenvalue,
            state,
            label: label.into(),
        }
    }
}

/// Sum of `lambda |psi><psi|` over the components.
pub fn spectral_sum(components: &[EigenComponent], dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    for comp in components {
        let p = ComplexMatrix::projector(&comp.state);
        for r in 0..dim {
            for c in 0..dim {
                out[(r, c)] += p[(r, c)] * comp.eigenvalue;
            }
        }
    }
    out
}

/// Nonzero-eigenvalue components of a Hermitian matrix, computed numerically.
pub fn numeric_spectrum(m: &ComplexMatrix, label: &str) -> Result<Vec<EigenComponent>> {
    let eig = hermitian_eigen(m)?;
    let scale = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 1e-12 * scale.max(1.0))
        .map(|(j, &v)| EigenComponent::new(v, eig.vector(j), format!("{label}#{j}")))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementElement {
    /// Hermitian observable with its spectral decomposition.
    Operator {
        label: String,
        matrix: ComplexMatrix,
        eigen: Vec<EigenComponent>,
    },
    /// Pure-state projector.
    Projector { label: String, state: Vec<Complex64> },
    /// Non-Hermitian operator `H + iK`; both parts carry spectral decompositions.
    General {
        label: String,
        matrix: ComplexMatrix,
        hermitian_eigen: Vec<EigenComponent>,
        anti_hermitian_eigen: Vec<EigenComponent>,
    },
}

impl MeasurementElement {
    pub fn operator(label: impl Into<String>, matrix: ComplexMatrix, eigen: Vec<EigenComponent>) -> Self {
        Self::Operator {
            label: label.into(),
            matrix,
            eigen,
        }
    }

    /// Operator whose spectral decomposition is obtained numerically.
    pub fn operator_numeric(label: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        let label = label.into();
        let eigen = numeric_spectrum(&matrix, &label)?;
        Ok(Self::Operator {
            label,
            matrix,
            eigen,
        })
    }

    pub fn projector(label: impl Into<String>, state: Vec<Complex64>) -> Self {
        Self::Projector {
            label: label.into(),
            state,
        }
    }

    pub fn general(label: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        let label = label.into();
        let hermitian_eigen = numeric_spectrum(&matrix.hermitian_part(), &format!("{label}:H"))?;
        let anti_hermitian_eigen =
            numeric_spectrum(&matrix.anti_hermitian_part(), &format!("{label}:K"))?;
        Ok(Self::General {
            label,
            matrix,
            hermitian_eigen,
            anti_hermitian_eigen,
        })
    }

    pub fn label(&self) -> &str {
        match self {
            Self::Operator { label, .. } | Self::Projector { label, .. } | Self::General { label, .. } => label,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Operator { .. } => "operator",
            Self::Projector { .. } => "projector",
            Self::General { .. } => "general",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Operator { matrix, .. } | Self::General { matrix, .. } => matrix.rows(),
            Self::Projector { state, .. } => state.len(),
        }
    }

    /// Number of rows this element adds to `A`.
    pub fn row_count(&self) -> usize {
        match self {
            Self::General { .. } => 2,
            _ => 1,
        }
    }

    /// The measured operator (`|psi><psi|` for projectors).
    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            Self::Operator { matrix, .. } | Self::General { matrix, .. } => matrix.clone(),
            Self::Projector { state, .. } => ComplexMatrix::projector(state),
        }
    }

    /// Spectral decompositions feeding each row: one list per row.
    pub fn row_spectra(&self) -> Vec<Vec<EigenComponent>> {
        match self {
            Self::Operator { eigen, .. } => vec![eigen.clone()],
            Self::Projector { label, state } => {
                vec![vec![EigenComponent::new(1.0, state.clone(), label.clone())]]
            }
            Self::General {
                hermitian_eigen,
                anti_hermitian_eigen,
                ..
            } => vec![hermitian_eigen.clone(), anti_hermitian_eigen.clone()],
        }
    }

    /// Ideal row values `Tr(rho M)` (split into real and imaginary rows for
    /// general elements).
    pub fn ideal_means(&self, rho: &ComplexMatrix) -> Vec<f64> {
        match self {
            Self::Operator { matrix, .. } => vec![rho.trace_of_product(matrix).re],
            Self::Projector { state, .. } => vec![rho.sandwich(state, state).re],
            Self::General { matrix, .. } => {
                let t = rho.trace_of_product(matrix);
                vec![t.re, t.im]
            }
        }
    }

    /// Rows of `A` contributed by this element.
    pub fn rotation_rows(&self, index: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            Self::Operator { label, matrix, .. } => {
                Ok(vec![real_row(matrix, index, label)?])
            }
            Self::Projector { label, state } => {
                Ok(vec![real_row(&ComplexMatrix::projector(state), index, label)?])
            }
            Self::General { label, matrix, .. } => Ok(vec![
                real_row(&matrix.hermitian_part(), index, label)?,
                real_row(&matrix.anti_hermitian_part(), index, label)?,
            ]),
        }
    }
}

/// `Tr(E_i M)` for every basis slot, evaluated entrywise.
fn trace_row(m: &ComplexMatrix) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    slots(m.rows())
        .into_iter()
        .map(|s| match s {
            Slot::Diagonal(k) => m[(k, k)],
            Slot::Real(k, l) => m[(l, k)] + m[(k, l)],
            Slot::Imag(k, l) => i * m[(l, k)] - i * m[(k, l)],
        })
        .collect()
}

fn real_row(m: &ComplexMatrix, index: usize, label: &str) -> Result<Vec<f64>> {
    let row = trace_row(m);
    let residual = row.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residual > IMAGINARY_RESIDUAL_TOL {
        return Err(QstError::ImaginaryResidual {
            element: index + 1,
            label: label.to_string(),
            residual,
        });
    }
    Ok(row.into_iter().map(|z| z.re).collect())
}

/// Which density-matrix element a reduced parametrization eliminates through
/// the unit-trace condition, and the resulting shift of the data vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReduction {
    /// Index (in the full vectorization) of the eliminated diagonal slot.
    pub eliminated_slot: usize,
    /// Added to the measured `b` before solving the reduced system.
    pub displacement: Vec<f64>,
}

impl TraceReduction {
    /// Eliminates the last diagonal slot from a full rotation matrix.
    pub fn eliminate_last_diagonal(full: &RealMatrix, dim: usize) -> (RealMatrix, Self) {
        let layout = slots(dim);
        let last = layout.len() - 1;
        let diag: Vec<usize> = layout
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Slot::Diagonal(_)))
            .map(|(i, _)| i)
            .collect();
        let kept: Vec<usize> = (0..layout.len()).filter(|&i| i != last).collect();
        let reduced = RealMatrix::from_fn(full.rows(), kept.len(), |r, c| {
            let j = kept[c];
            if diag.contains(&j) {
                full[(r, j)] - full[(r, last)]
            } else {
                full[(r, j)]
            }
        });
        let displacement = (0..full.rows()).map(|r| -full[(r, last)] + 0.0).collect();
        (
            reduced,
            Self {
                eliminated_slot: last,
                displacement,
            },
        )
    }

    pub fn displace(&self, b: &[f64]) -> Vec<f64> {
        b.iter().zip(&self.displacement).map(|(x, d)| x + d).collect()
    }

    /// Rebuilds the full vectorization from the reduced unknowns.
    pub fn expand(&self, reduced: &[f64], dim: usize) -> Vec<f64> {
        let layout = slots(dim);
        let mut full = Vec::with_capacity(layout.len());
        let mut it = reduced.iter();
        let mut diag_sum = 0.0;
        for (i, s) in layout.iter().enumerate() {
            if i == self.eliminated_slot {
                full.push(f64::NAN);
                continue;
            }
            let v = *it.next().expect("reduced vector length");
            if matches!(s, Slot::Diagonal(_)) {
                diag_sum += v;
            }
            full.push(v);
        }
        full[self.eliminated_slot] = 1.0 - diag_sum;
        full
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Local,
    LocalAndGlobal,
}

impl std::fmt::Display for Locality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Locality::Local => "local",
            Locality::LocalAndGlobal => "local & global",
        })
    }
}

/// A named measurement set together with its rotation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub id: String,
    pub name: String,
    pub dim: usize,
    pub locality: Locality,
    /// How the rows of `A` were assembled.
    pub construction: String,
    pub elements: Vec<MeasurementElement>,
    pub rotation_matrix: RealMatrix,
    pub reduction: Option<TraceReduction>,
}

impl ProtocolSpec {
    /// Builds the protocol and its rotation matrix from the element list.
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        locality: Locality,
        elements: Vec<MeasurementElement>,
    ) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.dim())
            .ok_or_else(|| QstError::InvalidArgument("protocol without elements".into()))?;
        let rotation_matrix = build_rotation_matrix(&elements)?;
        let construction = if elements.iter().any(|e| matches!(e, MeasurementElement::General { .. })) {
            "real and imaginary rows of Tr(rho G) for each non-Hermitian element".to_string()
        } else {
            "one row per element".to_string()
        };
        Ok(Self {
            id: id.into(),
            name: name.into(),
            dim,
            locality,
            construction,
            elements,
            rotation_matrix,
            reduction: None,
        })
    }

    /// Replaces `A` by the trace-reduced system (unknowns minus the last diagonal slot).
    pub fn with_trace_reduction(mut self) -> Self {
        let (reduced, reduction) =
            TraceReduction::eliminate_last_diagonal(&self.rotation_matrix, self.dim);
        self.rotation_matrix = reduced;
        self.reduction = Some(reduction);
        self.construction = format!("{}; last diagonal slot eliminated by unit trace", self.construction);
        self
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Rotation matrix before any trace reduction.
    pub fn full_rotation_matrix(&self) -> Result<RealMatrix> {
        build_rotation_matrix(&self.elements)
    }

    /// Ideal observation vector `b` of the raw (unreduced) rows.
    pub fn ideal_observations(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        if rho.rows() != self.dim || !rho.is_square() {
            return Err(QstError::Dimension(format!(
                "protocol {} acts on dimension {}, state is {}x{}",
                self.id,
                self.dim,
                rho.rows(),
                rho.cols()
            )));
        }
        Ok(self.elements.iter().flat_map(|e| e.ideal_means(rho)).collect())
    }

    /// Labels of the rows of `A` in order.
    pub fn row_labels(&self) -> Vec<String> {
        self.elements
            .iter()
            .flat_map(|e| match e {
                MeasurementElement::General { label, .. } => {
                    vec![format!("Re {label}"), format!("Im {label}")]
                }
                other => vec![other.label().to_string()],
            })
            .collect()
    }
}

/// Stacks the rows of every element: `A[j][i] = Tr(E_i M_j)` or `<psi_j|E_i|psi_j>`.
pub fn build_rotation_matrix(elements: &[MeasurementElement]) -> Result<RealMatrix> {
    let dim = elements.first().map_or(0, |e| e.dim());
    let mut rows = Vec::new();
    for (j, e) in elements.iter().enumerate() {
        if e.dim() != dim {
            return Err(QstError::Dimension(format!(
                "element {} ({}) has dimension {}, expected {dim}",
                j + 1,
                e.label(),
                e.dim()
            )));
        }
        rows.extend(e.rotation_rows(j)?);
    }
    RealMatrix::from_rows(&rows)
}

/// The seven two-qubit protocols in table order (Protocol 5 in its default variant).
pub fn table_protocols() -> Vec<ProtocolSpec> {
    vec![
        protocol_1_optimal(),
        protocol_2_pauli_products(),
        protocol_3_james(),
        protocol_4_separable36(),
        protocol_5_mub(MubVariant::Adamson),
        protocol_6_gellmann(),
        protocol_7_patera_zassenhaus(),
    ]
}

/// Resolves a protocol by id or nickname.
///
/// Accepted: `1`..`7`, `5a`/`adamson`, `5b`/`bandyopadhyay`, `optimal`,
/// `pauli`, `james`, `separable`, `mub`, `gellmann`, `patera`,
/// `qudit:<d>`, `pauli:<n_qubits>`, `qubit-optimal`, `qubit-pauli4`,
/// `qubit-pauli3`.
pub fn protocol_by_id(id: &str) -> Result<ProtocolSpec> {
    let key = id.trim().to_lowercase();
    let key = key.strip_prefix('p').filter(|k| k.chars().next().is_some_and(|c| c.is_ascii_digit())).unwrap_or(&key);
    if let Some(d) = key.strip_prefix("qudit:") {
        let d: usize = d.parse().map_err(|_| QstError::UnknownProtocol(id.into()))?;
        return optimal_gpos_qudit(d);
    }
    if let Some(n) = key.strip_prefix("pauli:") {
        let n: usize = n.parse().map_err(|_| QstError::UnknownProtocol(id.into()))?;
        return pauli_tensor_protocol(n);
    }
    Ok(match key {
        "1" | "optimal" => protocol_1_optimal(),
        "2" | "pauli" => protocol_2_pauli_products(),
        "3" | "james" => protocol_3_james(),
        "4" | "separable" | "separable36" => protocol_4_separable36(),
        "5" | "5a" | "mub" | "adamson" => protocol_5_mub(MubVariant::Adamson),
        "5b" | "bandyopadhyay" => protocol_5_mub(MubVariant::Bandyopadhyay),
        "6" | "gellmann" | "gell-mann" => protocol_6_gellmann(),
        "7" | "patera" | "patera-zassenhaus" => protocol_7_patera_zassenhaus(),
        "qubit-optimal" => single_qubit_protocols().optimal,
        "qubit-pauli4" => single_qubit_protocols().pauli4,
        "qubit-pauli3" => single_qubit_protocols().pauli3_reduced,
        _ => return Err(QstError::UnknownProtocol(id.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::BasisMatrixSet;

    #[test]
    fn trace_row_matches_basis_matrices() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i * 3 + j) as f64, i as f64 - j as f64 * 0.5));
        let basis = BasisMatrixSet::new(3);
        for (e, v) in basis.elements().iter().zip(trace_row(&m)) {
            let direct = e.trace_of_product(&m);
            assert!((direct - v).norm() < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_operator_is_rejected_with_its_label() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        let el = MeasurementElement::operator("raise", m, vec![]);
        match build_rotation_matrix(&[el]) {
            Err(QstError::ImaginaryResidual { element, label, .. }) => {
                assert_eq!(element, 1);
                assert_eq!(label, "raise");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lookup_aliases() {
        assert_eq!(protocol_by_id("P3").unwrap().id, "3");
        assert_eq!(protocol_by_id("bandyopadhyay").unwrap().id, "5b");
        assert_eq!(protocol_by_id("qudit:3").unwrap().dim, 3);
        assert!(protocol_by_id("9").is_err());
    }
}
