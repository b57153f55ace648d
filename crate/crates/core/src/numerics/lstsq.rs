//! Least-squares solves through the SVD pseudo-inverse.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, RealMatrix};
use super::svd::{svd, SvdResult, RANK_TOL};
use crate::error::{QstError, Result};

/// Precomputed pseudo-inverse of a full-column-rank matrix.
///
/// Solving through `V diag(1/sigma) U^T` avoids forming `A^T A`, whose
/// condition number is the square of that of `A`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pinv: RealMatrix,
    svd: SvdResult,
    rows: usize,
}

impl LeastSquares {
    pub fn new(a: &RealMatrix) -> Result<Self> {
        let (rows, cols) = a.shape();
        if rows < cols {
            return Err(QstError::RankDeficient {
                rank: rows,
                required: cols,
            });
        }
        let decomposition = svd(a)?;
        let rank = decomposition.rank();
        if rank < cols {
            return Err(QstError::RankDeficient {
                rank,
                required: cols,
            });
        }
        let mut vs = decomposition.v.clone();
        for (j, s) in decomposition.singular_values.iter().enumerate() {
            for i in 0..vs.rows() {
                vs[(i, j)] /= s;
            }
        }
        let pinv = &vs * &decomposition.u.transpose();
        Ok(Self {
            pinv,
            svd: decomposition,
            rows,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.rows {
            return Err(QstError::Dimension(format!(
                "observation vector has {} entries, system has {} rows",
                b.len(),
                self.rows
            )));
        }
        self.pinv.mul_vec(b)
    }

    pub fn pseudo_inverse(&self) -> &RealMatrix {
        &self.pinv
    }

    pub fn svd(&self) -> &SvdResult {
        &self.svd
    }
}

/// `argmin ||Ax - b||_2` for full-column-rank `A`.
pub fn least_squares_solve(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    LeastSquares::new(a)?.solve(b)
}

/// Complex variant via the real embedding.
pub fn least_squares_solve_complex(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.cols();
    let mut rb: Vec<f64> = b.iter().map(|z| z.re).collect();
    rb.extend(b.iter().map(|z| z.im));
    let x = least_squares_solve(&a.realify(), &rb)?;
    Ok((0..n).map(|i| Complex64::new(x[i], x[i + n])).collect())
}

/// True when `sigma_min > RANK_TOL * sigma_max`.
pub fn has_full_column_rank(a: &RealMatrix) -> Result<bool> {
    let s = svd(a)?;
    Ok(a.rows() >= a.cols() && s.sigma_min() > RANK_TOL * s.sigma_max())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> RealMatrix {
        RealMatrix::from_rows(&[[6.0, 7.0], [5.0, 6.0]]).unwrap()
    }

    #[test]
    fn worked_example_solutions() {
        let x = least_squares_solve(&example(), &[0.7, 0.6]).unwrap();
        assert!((x[0] - 0.0).abs() < 1e-12 && (x[1] - 0.1).abs() < 1e-12, "{x:?}");
        let x = least_squares_solve(&example(), &[0.71, 0.59]).unwrap();
        assert!((x[0] - 0.13).abs() < 1e-12 && (x[1] + 0.01).abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn identity_system() {
        let b = [0.3, -1.0, 2.5, 7.0];
        let x = least_squares_solve(&RealMatrix::identity(4), &b).unwrap();
        for (xi, bi) in x.iter().zip(b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = RealMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        assert_eq!(
            least_squares_solve(&a, &[1.0, 2.0, 3.0]),
            Err(QstError::RankDeficient {
                rank: 1,
                required: 2
            })
        );
    }

    #[test]
    fn overdetermined_line_fit() {
        // y = 1 + 2t sampled exactly at four points
        let a = RealMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]).unwrap();
        let x = least_squares_solve(&a, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn complex_square_system() {
        let i = Complex64::i();
        let o = Complex64::new(1.0, 0.0);
        let a = ComplexMatrix::new(2, 2, vec![o, i, -i, o * 2.0]).unwrap();
        let x_true = vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        let b = a.mul_vec(&x_true).unwrap();
        let x = least_squares_solve_complex(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-13);
        }
    }
}
