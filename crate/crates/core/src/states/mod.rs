//! Density matrices, the real vectorization `x = vec(rho)`, named states and
//! reconstruction-quality metrics.
//!
//! The vectorization walks the upper triangle row by row. A diagonal entry
//! contributes one real slot and every off-diagonal entry `rho_kl` (`k < l`)
//! contributes two, `Re rho_kl` followed by `Im rho_kl`. For two qubits:
//!
//! ```text
//! rho = [ x1        x2+i x3    x4+i x5    x6+i x7  ]
//!       [ .         x8         x9+i x10   x11+i x12]
//!       [ .         .          x13        x14+i x15]
//!       [ .         .          .          x16      ]
//! ```
//!
//! This ordering is the wire format used by every JSON export.

mod metrics;
mod named;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix, HERMITIAN_TOL};

pub use metrics::{fidelity, trace_distance, Fidelity};
pub use named::{named_state, qubit_state, NAMED_TWO_QUBIT_STATES};

/// Position of a real slot inside the vectorized density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    Diagonal(usize),
    Real(usize, usize),
    Imag(usize, usize),
}

/// Slot layout for dimension `d`, in wire order.
pub fn slots(d: usize) -> Vec<Slot> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(Slot::Diagonal(k));
        for l in k + 1..d {
            out.push(Slot::Real(k, l));
            out.push(Slot::Imag(k, l));
        }
    }
    out
}

/// Hermitian, possibly unnormalized and possibly non-positive state.
///
/// Linear inversion of noisy data routinely produces matrices with negative
/// eigenvalues or a trace different from one, so those properties are
/// reported by [`DensityMatrix::validity`] instead of being enforced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityMatrixJson", into = "DensityMatrixJson")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<DensityMatrix> for DensityMatrixJson {
    fn from(rho: DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            re: rho.matrix.real_part().to_rows(),
            im: rho.matrix.imag_part().to_rows(),
        }
    }
}

impl TryFrom<DensityMatrixJson> for DensityMatrix {
    type Error = QstError;

    fn try_from(j: DensityMatrixJson) -> Result<Self> {
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(QstError::Dimension(format!(
                "density matrix JSON declares dim {} but has {} re rows and {} im rows",
                j.dim,
                j.re.len(),
                j.im.len()
            )));
        }
        let mut data = Vec::with_capacity(j.dim * j.dim);
        for (r, i) in j.re.iter().zip(&j.im) {
            if r.len() != j.dim || i.len() != j.dim {
                return Err(QstError::Dimension(format!(
                    "density matrix JSON row length differs from dim {}",
                    j.dim
                )));
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)));
        }
        DensityMatrix::new(ComplexMatrix::new(j.dim, j.dim, data)?)
    }
}

/// Trace, smallest eigenvalue and Hermiticity residue of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub hermitian_deviation: f64,
}

impl ValidityReport {
    pub fn is_positive(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.trace - 1.0).abs() <= tol
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.is_positive(tol) && self.is_normalized(tol)
    }
}

impl DensityMatrix {
    /// Wraps a square matrix that is Hermitian within [`HERMITIAN_TOL`]
    /// (scaled by the largest entry).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QstError::Dimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        check_hermitian(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &[Complex64]) -> Self {
        Self {
            matrix: ComplexMatrix::projector(psi),
        }
    }

    /// Named pure state, see [`named_state`].
    pub fn named(name: &str) -> Result<Self> {
        Ok(Self::from_pure(&named_state(name)?))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
        }
    }

    /// Copy with unit trace. Fails for (numerically) traceless matrices.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t.abs() < 1e-300 {
            return Err(QstError::InvalidState(
                "cannot normalize a traceless matrix".into(),
            ));
        }
        Ok(self.scaled(1.0 / t))
    }

    /// Expectation value `Tr(rho M)`.
    pub fn expectation(&self, m: &ComplexMatrix) -> Complex64 {
        self.matrix.trace_of_product(m)
    }

    /// Probability weight `<psi|rho|psi>`.
    pub fn probability(&self, psi: &[Complex64]) -> f64 {
        self.matrix.sandwich(psi, psi).re
    }

    /// `U rho U^dagger`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self {
            matrix: m.hermitian_part(),
        })
    }

    pub fn validity(&self) -> Result<ValidityReport> {
        let eig = hermitian_eigen(&self.matrix)?;
        Ok(ValidityReport {
            trace: self.trace(),
            min_eigenvalue: eig.values.first().copied().unwrap_or(0.0),
            hermitian_deviation: self.matrix.hermitian_deviation().0,
        })
    }

    pub fn to_vec(&self) -> RealStateVector {
        let d = self.dim();
        let values = slots(d)
            .into_iter()
            .map(|s| match s {
                Slot::Diagonal(k) => self.matrix[(k, k)].re,
                Slot::Real(k, l) => self.matrix[(k, l)].re,
                Slot::Imag(k, l) => self.matrix[(k, l)].im,
            })
            .collect();
        RealStateVector { dim: d, values }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Random full-rank state `G G^dagger / Tr(G G^dagger)` from a complex
    /// Ginibre matrix `G`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let g = random_complex_gaussian(d, d, rng);
        let w = &g * &g.adjoint();
        let t = w.trace().re;
        Self {
            matrix: w.scale(Complex64::new(1.0 / t, 0.0)).hermitian_part(),
        }
    }

    /// Random pure state drawn uniformly from the unit sphere.
    pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let g = random_complex_gaussian(d, 1, rng).into_vec();
        let n = crate::numerics::vec_norm(&g);
        let psi: Vec<Complex64> = g.into_iter().map(|z| z / n).collect();
        Self::from_pure(&psi)
    }
}

/// Random Hermitian matrix with independent standard-normal components; not a state.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_complex_gaussian(d, d, rng).hermitian_part()
}

fn random_complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let (dev, row, col) = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(QstError::NotHermitian {
            max_deviation: dev,
            row,
            col,
        });
    }
    Ok(())
}

/// `x = vec(rho)` of the real vectorization `d^2` slots long.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealStateVectorJson", into = "RealStateVectorJson")]
pub struct RealStateVector {
    dim: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RealStateVectorJson {
    dim: usize,
    x: Vec<f64>,
}

impl From<RealStateVector> for RealStateVectorJson {
    fn from(v: RealStateVector) -> Self {
        Self {
            dim: v.dim,
            x: v.values,
        }
    }
}

impl TryFrom<RealStateVectorJson> for RealStateVector {
    type Error = QstError;

    fn try_from(j: RealStateVectorJson) -> Result<Self> {
        let v = RealStateVector::from_values(j.x)?;
        if v.dim != j.dim {
            return Err(QstError::Dimension(format!(
                "state vector JSON declares dim {} but holds {} entries",
                j.dim,
                v.values.len()
            )));
        }
        Ok(v)
    }
}

impl RealStateVector {
    /// Accepts any vector whose length is a perfect square `d^2`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let d = (n as f64).sqrt().round() as usize;
        if d == 0 || d * d != n {
            return Err(QstError::Dimension(format!(
                "vectorized state needs a square length, got {n}"
            )));
        }
        Ok(Self { dim: d, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let d = self.dim;
        let mut m = ComplexMatrix::zeros(d, d);
        for (slot, &x) in slots(d).into_iter().zip(&self.values) {
            match slot {
                Slot::Diagonal(k) => m[(k, k)] = Complex64::new(x, 0.0),
                Slot::Real(k, l) => {
                    m[(k, l)].re = x;
                    m[(l, k)].re = x;
                }
                Slot::Imag(k, l) => {
                    m[(k, l)].im = x;
                    m[(l, k)].im = -x;
                }
            }
        }
        DensityMatrix { matrix: m }
    }
}

/// `vec(rho)`; rejects non-Hermitian input and names the worst entry.
pub fn vec(rho: &ComplexMatrix) -> Result<RealStateVector> {
    Ok(DensityMatrix::new(rho.clone())?.to_vec())
}

/// Inverse of [`vec`].
pub fn unvec(x: &RealStateVector) -> DensityMatrix {
    x.to_density_matrix()
}

/// Hermitian matrices `E_i` with `rho = sum_i x_i E_i`.
#[derive(Debug, Clone)]
pub struct BasisMatrixSet {
    dim: usize,
    slots: Vec<Slot>,
    elements: Vec<ComplexMatrix>,
}

impl BasisMatrixSet {
    pub fn new(d: usize) -> Self {
        let slots = slots(d);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let elements = slots
            .iter()
            .map(|s| {
                let mut e = ComplexMatrix::zeros(d, d);
                match *s {
                    Slot::Diagonal(k) => e[(k, k)] = one,
                    Slot::Real(k, l) => {
                        e[(k, l)] = one;
                        e[(l, k)] = one;
                    }
                    Slot::Imag(k, l) => {
                        e[(k, l)] = i;
                        e[(l, k)] = -i;
                    }
                }
                e
            })
            .collect();
        Self {
            dim: d,
            slots,
            elements,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// `sum_i x_i E_i`.
    pub fn combine(&self, x: &[f64]) -> Result<ComplexMatrix> {
        if x.len() != self.len() {
            return Err(QstError::Dimension(format!(
                "{} coefficients for {} basis matrices",
                x.len(),
                self.len()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (e, &xi) in self.elements.iter().zip(x) {
            if xi != 0.0 {
                out = out.add(&e.scale(Complex64::new(xi, 0.0)))?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn maximally_mixed_vector() {
        let x = DensityMatrix::maximally_mixed(4).to_vec();
        for (i, v) in x.values().iter().enumerate() {
            let expected = if [0, 7, 12, 15].contains(&i) { 0.25 } else { 0.0 };
            assert_eq!(*v, expected, "slot {}", i + 1);
        }
    }

    #[test]
    fn phi_plus_vector() {
        let x = DensityMatrix::named("phi+").unwrap().to_vec();
        let v = x.values();
        for (i, &val) in v.iter().enumerate() {
            let expected = if [0, 5, 15].contains(&i) { 0.5 } else { 0.0 };
            assert!((val - expected).abs() < 1e-15, "slot {}: {val}", i + 1);
        }
    }

    #[test]
    fn vec_rejects_non_hermitian_and_names_entry() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        match vec(&m) {
            Err(QstError::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unvec_rejects_non_square_length() {
        assert!(RealStateVector::from_values(vec![0.0; 15]).is_err());
        assert!(RealStateVector::from_values(vec![0.0; 9]).is_ok());
    }

    #[test]
    fn basis_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = BasisMatrixSet::new(4);
        for _ in 0..10 {
            let h = random_hermitian(4, &mut rng);
            let x = vec(&h).unwrap();
            let back = basis.combine(x.values()).unwrap();
            assert!(back.approx_eq(&h, 1e-14));
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = DensityMatrix::random(3, &mut rng);
        let text = rho.to_json().unwrap();
        let back = DensityMatrix::from_json(&text).unwrap();
        assert_eq!(back, rho);

        let x = rho.to_vec();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.starts_with("{\"dim\":3,\"x\":["));
        let y: RealStateVector = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn random_state_is_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = DensityMatrix::random(4, &mut rng);
        let v = rho.validity().unwrap();
        assert!(v.is_physical(1e-12), "{v:?}");
    }
}
