//! Cyclic Jacobi eigensolver for symmetric and Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, RealMatrix};
use super::svd::complexify_pairs;
use crate::error::{QstError, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    /// `V f(diag) V^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.vector(j);
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += v[r] * v[c].conj() * w;
                }
            }
        }
        out
    }
}

pub fn symmetric_eigen(a: &RealMatrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(QstError::Dimension(format!(
            "eigen decomposition of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let scale = a.max_abs().max(1e-300);
    let (dev, row, col) = a.hermitian_deviation();
    if dev > 1e-12 * scale {
        return Err(QstError::NotHermitian {
            max_deviation: dev,
            row,
            col,
        });
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = RealMatrix::identity(n);
    let frob = a.frobenius_norm();
    let mut done = n < 2;
    for _ in 0..MAX_SWEEPS {
        if done {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            done = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * kp - s * kq;
                    m[(k, q)] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * pk - s * qk;
                    m[(q, k)] = s * pk + c * qk;
                }
                for k in 0..n {
                    let (kp, kq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * kp - s * kq;
                    v[(k, q)] = s * kp + c * kq;
                }
            }
        }
    }
    if !done {
        return Err(QstError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[(a, a)].total_cmp(&m[(b, b)]));
    let values = order.iter().map(|&j| m[(j, j)]).collect();
    let vectors = RealMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Hermitian eigen decomposition through the real symmetric embedding.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(QstError::Dimension(format!(
            "eigen decomposition of a non-square {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let scale = h.max_abs().max(1e-300);
    let (dev, row, col) = h.hermitian_deviation();
    if dev > 1e-12 * scale {
        return Err(QstError::NotHermitian {
            max_deviation: dev,
            row,
            col,
        });
    }
    let n = h.rows();
    let real = symmetric_eigen(&h.hermitian_part().realify())?;
    let vecs = complexify_pairs(&real.values, &real.vectors, n);
    if vecs.len() != n {
        return Err(QstError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut pairs: Vec<(f64, Vec<Complex64>)> = vecs
        .into_iter()
        .map(|v| (h.sandwich(&v, &v).re, v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (j, (lambda, v)) in pairs.into_iter().enumerate() {
        values.push(lambda);
        vectors.set_column(j, &v);
    }
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_two_by_two() {
        let a = RealMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let back = &(&e.vectors * &RealMatrix::diag(&e.values)) * &e.vectors.transpose();
        assert!(back.approx_eq(&a, 1e-14));
    }

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        let y = ComplexMatrix::new(2, 2, vec![z, -i, i, z]).unwrap();
        let e = hermitian_eigen(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.apply(|x| x).approx_eq(&y, 1e-14));
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn degenerate_hermitian() {
        // identity on C^3 plus a rank-one complex projector: eigenvalues {1, 1, 2}
        let s = 1.0 / 3f64.sqrt();
        let psi = vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(-s, 0.0),
        ];
        let h = ComplexMatrix::identity(3)
            .add(&ComplexMatrix::projector(&psi))
            .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-13);
        assert!((e.values[1] - 1.0).abs() < 1e-13);
        assert!((e.values[2] - 2.0).abs() < 1e-13);
        assert!(e.apply(|x| x).approx_eq(&h, 1e-13));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        assert!(matches!(
            hermitian_eigen(&m),
            Err(QstError::NotHermitian { .. })
        ));
    }
}
