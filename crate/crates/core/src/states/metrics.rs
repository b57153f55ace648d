use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{QstError, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix};

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
///
/// `psd_projected` is set when either input had a negative eigenvalue that
/// was clipped to zero before evaluation. No renormalization is applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    pub value: f64,
    pub psd_projected: bool,
}

fn same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(QstError::Dimension(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Returns the PSD square root of the clipped matrix and whether clipping happened.
fn clipped_sqrt(m: &ComplexMatrix) -> Result<(ComplexMatrix, bool)> {
    let eig = hermitian_eigen(m)?;
    let scale = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let clipped = eig.values.iter().any(|&v| v < -1e-12 * scale.max(1.0));
    Ok((eig.apply(|v| v.max(0.0).sqrt()), clipped))
}

pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Fidelity> {
    same_dims(rho, sigma)?;
    let (sqrt_rho, clipped_rho) = clipped_sqrt(rho.matrix())?;
    let sigma_eig = hermitian_eigen(sigma.matrix())?;
    let scale = sigma_eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let clipped_sigma = sigma_eig.values.iter().any(|&v| v < -1e-12 * scale.max(1.0));
    let sigma_psd = sigma_eig.apply(|v| v.max(0.0));
    let inner = (&(&sqrt_rho * &sigma_psd) * &sqrt_rho).hermitian_part();
    let root_trace: f64 = hermitian_eigen(&inner)?
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    Ok(Fidelity {
        value: root_trace * root_trace,
        psd_projected: clipped_rho || clipped_sigma,
    })
}

/// `(1/2) sum |eig(rho - sigma)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    let diff = rho.matrix().sub(sigma.matrix())?.hermitian_part();
    let eig = hermitian_eigen(&diff)?;
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}
