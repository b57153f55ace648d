//! JSON protocol catalog with explicit `re`/`im` arrays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EigenComponent, Locality, MeasurementElement, ProtocolSpec, TraceReduction};
use crate::error::{QstError, Result};
use crate::numerics::ComplexMatrix;

const FORMAT: &str = "qst-protocol-catalog";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Catalog {
    format: String,
    version: u32,
    protocols: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    pub dim: usize,
    pub locality: Locality,
    pub construction: String,
    pub elements: Vec<ElementEntry>,
    pub rotation_matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<TraceReduction>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenEntry {
    pub eigenvalue: f64,
    pub label: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementEntry {
    Operator {
        label: String,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
        eigen: Vec<EigenEntry>,
    },
    Projector {
        label: String,
        re: Vec<f64>,
        im: Vec<f64>,
    },
    General {
        label: String,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
        hermitian_eigen: Vec<EigenEntry>,
        anti_hermitian_eigen: Vec<EigenEntry>,
    },
}

fn split_vec(v: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (v.iter().map(|z| z.re).collect(), v.iter().map(|z| z.im).collect())
}

fn join_vec(re: &[f64], im: &[f64], what: &str) -> Result<Vec<Complex64>> {
    if re.len() != im.len() {
        return Err(QstError::Dimension(format!("{what}: re and im lengths differ")));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

fn join_matrix(re: &[Vec<f64>], im: &[Vec<f64>], what: &str) -> Result<ComplexMatrix> {
    let n = re.len();
    if im.len() != n {
        return Err(QstError::Dimension(format!("{what}: re and im row counts differ")));
    }
    let mut data = Vec::with_capacity(n * n);
    for (r, i) in re.iter().zip(im) {
        if r.len() != n || i.len() != n {
            return Err(QstError::Dimension(format!("{what}: operator must be square")));
        }
        data.extend(join_vec(r, i, what)?);
    }
    ComplexMatrix::new(n, n, data)
}

fn eigen_to_entries(list: &[EigenComponent]) -> Vec<EigenEntry> {
    list.iter()
        .map(|e| {
            let (re, im) = split_vec(&e.state);
            EigenEntry {
                eigenvalue: e.eigenvalue,
                label: e.label.clone(),
                re,
                im,
            }
        })
        .collect()
}

fn eigen_from_entries(list: &[EigenEntry], what: &str) -> Result<Vec<EigenComponent>> {
    list.iter()
        .map(|e| Ok(EigenComponent::new(e.eigenvalue, join_vec(&e.re, &e.im, what)?, e.label.clone())))
        .collect()
}

impl From<&MeasurementElement> for ElementEntry {
    fn from(e: &MeasurementElement) -> Self {
        match e {
            MeasurementElement::Operator { label, matrix, eigen } => Self::Operator {
                label: label.clone(),
                re: matrix.real_part().to_rows(),
                im: matrix.imag_part().to_rows(),
                eigen: eigen_to_entries(eigen),
            },
            MeasurementElement::Projector { label, state } => {
                let (re, im) = split_vec(state);
                Self::Projector {
                    label: label.clone(),
                    re,
                    im,
                }
            }
            MeasurementElement::General {
                label,
                matrix,
                hermitian_eigen,
                anti_hermitian_eigen,
            } => Self::General {
                label: label.clone(),
                re: matrix.real_part().to_rows(),
                im: matrix.imag_part().to_rows(),
                hermitian_eigen: eigen_to_entries(hermitian_eigen),
                anti_hermitian_eigen: eigen_to_entries(anti_hermitian_eigen),
            },
        }
    }
}

impl ElementEntry {
    fn to_element(&self) -> Result<MeasurementElement> {
        Ok(match self {
            Self::Operator { label, re, im, eigen } => MeasurementElement::Operator {
                label: label.clone(),
                matrix: join_matrix(re, im, label)?,
                eigen: eigen_from_entries(eigen, label)?,
            },
            Self::Projector { label, re, im } => MeasurementElement::Projector {
                label: label.clone(),
                state: join_vec(re, im, label)?,
            },
            Self::General {
                label,
                re,
                im,
                hermitian_eigen,
                anti_hermitian_eigen,
            } => MeasurementElement::General {
                label: label.clone(),
                matrix: join_matrix(re, im, label)?,
                hermitian_eigen: eigen_from_entries(hermitian_eigen, label)?,
                anti_hermitian_eigen: eigen_from_entries(anti_hermitian_eigen, label)?,
            },
        })
    }
}

impl From<&ProtocolSpec> for CatalogEntry {
    fn from(p: &ProtocolSpec) -> Self {
        Self {
            id: p.id.clone(),
            name: p.name.clone(),
            dim: p.dim,
            locality: p.locality,
            construction: p.construction.clone(),
            elements: p.elements.iter().map(ElementEntry::from).collect(),
            rotation_matrix: p.rotation_matrix.to_rows(),
            reduction: p.reduction.clone(),
        }
    }
}

impl CatalogEntry {
    /// Rebuilds the protocol from its elements and checks the stored rotation
    /// matrix against the rebuilt one.
    pub fn to_spec(&self) -> Result<ProtocolSpec> {
        let elements = self
            .elements
            .iter()
            .map(ElementEntry::to_element)
            .collect::<Result<Vec<_>>>()?;
        let mut spec = ProtocolSpec::new(self.id.clone(), self.name.clone(), self.locality, elements)?;
        if spec.dim != self.dim {
            return Err(QstError::Dimension(format!(
                "protocol {}: declared dim {} but elements act on dimension {}",
                self.id, self.dim, spec.dim
            )));
        }
        if self.reduction.is_some() {
            spec = spec.with_trace_reduction();
        }
        spec.construction = self.construction.clone();
        let labels = spec.row_labels();
        let rebuilt = &spec.rotation_matrix;
        if self.rotation_matrix.len() != rebuilt.rows() {
            return Err(QstError::Dimension(format!(
                "protocol {}: stored rotation matrix has {} rows, elements give {}",
                self.id,
                self.rotation_matrix.len(),
                rebuilt.rows()
            )));
        }
        for (r, row) in self.rotation_matrix.iter().enumerate() {
            if row.len() != rebuilt.cols() {
                return Err(QstError::Dimension(format!(
                    "protocol {}: stored rotation matrix row {} has {} entries",
                    self.id,
                    r + 1,
                    row.len()
                )));
            }
            for (col, &v) in row.iter().enumerate() {
                if (v - rebuilt[(r, col)]).abs() > 1e-12 {
                    return Err(QstError::InvalidArgument(format!(
                        "protocol {}: stored A[{}][{}] = {v} disagrees with {} computed from element `{}`",
                        self.id,
                        r + 1,
                        col + 1,
                        rebuilt[(r, col)],
                        labels.get(r).map(String::as_str).unwrap_or("?")
                    )));
                }
            }
        }
        Ok(spec)
    }
}

/// Serializes protocols as a pretty-printed JSON catalog.
pub fn export_catalog(protocols: &[ProtocolSpec]) -> Result<String> {
    let catalog = Catalog {
        format: FORMAT.into(),
        version: 1,
        protocols: protocols.iter().map(CatalogEntry::from).collect(),
    };
    Ok(serde_json::to_string_pretty(&catalog)?)
}

pub fn import_catalog(text: &str) -> Result<Vec<ProtocolSpec>> {
    let catalog: Catalog = serde_json::from_str(text)?;
    if catalog.format != FORMAT {
        return Err(QstError::Serialization(format!(
            "expected format `{FORMAT}`, found `{}`",
            catalog.format
        )));
    }
    catalog.protocols.iter().map(CatalogEntry::to_spec).collect()
}
