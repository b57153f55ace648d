//! One-sided (Hestenes) Jacobi SVD.
//!
//! Column pairs are rotated until every pair is orthogonal to
//! `ORTHOGONALITY_TOL` relative to the column norms. Small singular values come
//! out with high relative accuracy, which matters for telling `0.1` from `0.09`
//! in the error-matrix spectra. Complex input is handled through the real
//! embedding `[[Re, -Im], [Im, Re]]`, whose spectrum repeats every singular
//! value twice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, RealMatrix};
use crate::error::{QstError, Result};

/// Sweep cap before giving up.
pub const MAX_SWEEPS: usize = 60;
/// Off-diagonal column inner products below this (relative) count as zero.
pub const ORTHOGONALITY_TOL: f64 = 1e-14;
/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvdResult {
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `m x k` left singular vectors, `k = min(m, n)`.
    pub u: RealMatrix,
    /// `n x k` right singular vectors.
    pub v: RealMatrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `RANK_TOL * sigma_max`.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values)
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> RealMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, j)] *= s;
            }
        }
        &us * &self.v.transpose()
    }
}

#[derive(Debug, Clone)]
pub struct ComplexSvdResult {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl ComplexSvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, j)] *= Complex64::new(*s, 0.0);
            }
        }
        &us * &self.v.adjoint()
    }
}

pub(crate) fn numerical_rank(values: &[f64]) -> usize {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter().filter(|&&s| s > RANK_TOL * max).count()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Appends unit vectors orthogonal to every column in `basis` until it holds `target` columns.
fn complete_basis(basis: &mut Vec<Vec<f64>>, dim: usize, target: usize) {
    let mut k = 0;
    while basis.len() < target && k < dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = dot(b, &e);
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let n = dot(&e, &e).sqrt();
        if n > 0.5 {
            e.iter_mut().for_each(|x| *x /= n);
            basis.push(e);
        }
        k += 1;
    }
}

/// Thin SVD of a real matrix.
pub fn svd(m: &RealMatrix) -> Result<SvdResult> {
    if !m.is_finite() {
        return Err(QstError::InvalidArgument(
            "SVD input contains non-finite entries".into(),
        ));
    }
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(SvdResult {
            singular_values: t.singular_values,
            u: t.v,
            v: t.u,
        });
    }
    let (rows, n) = m.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| m.column(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = vcols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(QstError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<(usize, f64)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, dot(c, c).sqrt()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let sigma_max = order.first().map_or(0.0, |o| o.1);

    let mut singular_values = Vec::with_capacity(n);
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    let mut vsorted = Vec::with_capacity(n);
    for (slot, &(j, s)) in order.iter().enumerate() {
        singular_values.push(s);
        vsorted.push(vcols[j].clone());
        if s > 0.0 && s > sigma_max * 1e-15 {
            ucols.push(cols[j].iter().map(|x| x / s).collect());
        } else {
            missing.push(slot);
            ucols.push(Vec::new());
        }
    }
    if !missing.is_empty() {
        let mut basis: Vec<Vec<f64>> = ucols.iter().filter(|c| !c.is_empty()).cloned().collect();
        let have = basis.len();
        complete_basis(&mut basis, rows, have + missing.len());
        for (slot, col) in missing.into_iter().zip(basis.into_iter().skip(have)) {
            ucols[slot] = col;
        }
    }

    let mut u = RealMatrix::zeros(rows, n);
    let mut v = RealMatrix::zeros(n, n);
    for j in 0..n {
        u.set_column(j, &ucols[j]);
        v.set_column(j, &vsorted[j]);
    }
    Ok(SvdResult {
        singular_values,
        u,
        v,
    })
}

#[inline]
fn rotate(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (p, q) = (*x, *y);
        *x = c * p - s * q;
        *y = s * p + c * q;
    }
}

/// Turns real eigen/singular vectors of a realified operator back into complex
/// ones. `values` are sorted, `vectors` has matching columns of length `2n`.
/// Each value appears twice in the real spectrum, so inside each cluster of
/// (numerically) equal values half as many complex directions are selected by
/// greedy complex Gram-Schmidt.
pub(crate) fn complexify_pairs(
    values: &[f64],
    vectors: &RealMatrix,
    wanted: usize,
) -> Vec<Vec<Complex64>> {
    let n = vectors.rows() / 2;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(wanted);
    let mut start = 0;
    while start < values.len() && accepted.len() < wanted {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[start]).abs() <= 1e-9 * scale {
            end += 1;
        }
        let need = (end - start).div_ceil(2);
        let mut candidates: Vec<Vec<Complex64>> = (start..end)
            .map(|j| {
                (0..n)
                    .map(|i| Complex64::new(vectors[(i, j)], vectors[(i + n, j)]))
                    .collect()
            })
            .collect();
        for _ in 0..need {
            if accepted.len() >= wanted {
                break;
            }
            let mut best: Option<(usize, Vec<Complex64>, f64)> = None;
            for (idx, cand) in candidates.iter().enumerate() {
                let mut r = cand.clone();
                for _ in 0..2 {
                    for a in &accepted {
                        let proj: Complex64 = a.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                        r.iter_mut().zip(a).for_each(|(x, y)| *x -= proj * y);
                    }
                }
                let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if best.as_ref().is_none_or(|b| norm > b.2) {
                    best = Some((idx, r, norm));
                }
            }
            match best {
                Some((idx, r, norm)) if norm > 1e-6 => {
                    candidates.remove(idx);
                    accepted.push(r.into_iter().map(|z| z / norm).collect());
                }
                _ => break,
            }
        }
        start = end;
    }
    accepted
}

/// Thin SVD of a complex matrix through its real embedding.
pub fn svd_complex(m: &ComplexMatrix) -> Result<ComplexSvdResult> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let real = svd(&m.realify())?;
    let vs = complexify_pairs(&real.singular_values, &real.v, k);
    if vs.len() != k {
        return Err(QstError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut pairs: Vec<(f64, Vec<Complex64>)> = vs
        .into_iter()
        .map(|v| {
            let mv = m.mul_vec(&v).expect("shape checked");
            let s = mv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (s, v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let sigma_max = pairs.first().map_or(0.0, |p| p.0);

    let mut u_cols: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(k);
    for (s, v) in &pairs {
        if *s > sigma_max * 1e-13 && *s > 0.0 {
            let mv = m.mul_vec(v).expect("shape checked");
            u_cols.push(Some(mv.into_iter().map(|z| z / *s).collect()));
        } else {
            u_cols.push(None);
        }
    }
    // complete null-space columns of U by complex Gram-Schmidt on unit vectors
    let mut basis: Vec<Vec<Complex64>> = u_cols.iter().flatten().cloned().collect();
    let mut e_idx = 0;
    for slot in u_cols.iter_mut().filter(|c| c.is_none()) {
        while e_idx < rows {
            let mut e = vec![Complex64::new(0.0, 0.0); rows];
            e[e_idx] = Complex64::new(1.0, 0.0);
            e_idx += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj: Complex64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                let unit: Vec<Complex64> = e.into_iter().map(|z| z / norm).collect();
                basis.push(unit.clone());
                *slot = Some(unit);
                break;
            }
        }
    }

    let mut u = ComplexMatrix::zeros(rows, k);
    let mut v = ComplexMatrix::zeros(cols, k);
    let mut singular_values = Vec::with_capacity(k);
    for (j, ((s, vc), uc)) in pairs.into_iter().zip(u_cols).enumerate() {
        singular_values.push(s);
        v.set_column(j, &vc);
        u.set_column(j, &uc.expect("left basis completed"));
    }
    Ok(ComplexSvdResult {
        singular_values,
        u,
        v,
    })
}

/// Anything with a singular spectrum.
pub trait SingularValues {
    fn singular_values(&self) -> Result<Vec<f64>>;
}

impl SingularValues for RealMatrix {
    fn singular_values(&self) -> Result<Vec<f64>> {
        Ok(svd(self)?.singular_values)
    }
}

impl SingularValues for ComplexMatrix {
    fn singular_values(&self) -> Result<Vec<f64>> {
        Ok(svd_complex(self)?.singular_values)
    }
}

/// Largest singular value (the two-norm).
pub fn spectral_norm<M: SingularValues>(m: &M) -> Result<f64> {
    Ok(m.singular_values()?.first().copied().unwrap_or(0.0))
}

/// Root-sum-square of the singular values.
pub fn frobenius_norm<M: SingularValues>(m: &M) -> Result<f64> {
    Ok(m.singular_values()?.iter().map(|s| s * s).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> RealMatrix {
        RealMatrix::from_rows(&[[6.0, 7.0], [5.0, 6.0]]).unwrap()
    }

    #[test]
    fn diagonal_with_zero() {
        let r = svd(&RealMatrix::diag(&[3.0, 0.0])).unwrap();
        assert_eq!(r.singular_values, vec![3.0, 0.0]);
        assert_eq!(r.rank(), 1);
        let utu = &r.u.transpose() * &r.u;
        assert!(utu.approx_eq(&RealMatrix::identity(2), 1e-15));
    }

    #[test]
    fn worked_example_condition() {
        let r = svd(&example()).unwrap();
        let kappa = r.sigma_max() / r.sigma_min();
        assert!((kappa - 146.0).abs() < 0.1, "kappa = {kappa}");
        // sigma1^2 + sigma2^2 = 146 and sigma1 sigma2 = |det| = 1
        let s = &r.singular_values;
        assert!((s[0] * s[0] + s[1] * s[1] - 146.0).abs() < 1e-12);
        assert!((s[0] * s[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_from_invariants() {
        // sigma_max^2 is the larger root of t^2 - 146 t + 1
        let expected = ((146.0 + (146.0f64 * 146.0 - 4.0).sqrt()) / 2.0).sqrt();
        let got = spectral_norm(&example()).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 12.08).abs() < 0.01);
        assert_eq!(spectral_norm(&RealMatrix::identity(4)).unwrap(), 1.0);
        assert!((frobenius_norm(&RealMatrix::identity(4)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn wide_matrix_is_transposed() {
        let m = RealMatrix::from_rows(&[[1.0, 0.0, 2.0], [0.0, 3.0, 0.0]]).unwrap();
        let r = svd(&m).unwrap();
        assert_eq!(r.u.shape(), (2, 2));
        assert_eq!(r.v.shape(), (3, 2));
        assert!(r.reconstruct().approx_eq(&m, 1e-14));
    }

    #[test]
    fn complex_svd_of_unitary_multiple() {
        let i = Complex64::i();
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let m = ComplexMatrix::new(2, 2, vec![z, -i, i, z]).unwrap().scale(o * 3.0);
        let r = svd_complex(&m).unwrap();
        assert_eq!(r.singular_values.len(), 2);
        for s in &r.singular_values {
            assert!((s - 3.0).abs() < 1e-14);
        }
        assert!(r.reconstruct().approx_eq(&m, 1e-13));
    }

    #[test]
    fn rejects_nan() {
        let m = RealMatrix::from_rows(&[[f64::NAN]]).unwrap();
        assert!(svd(&m).is_err());
    }
}
