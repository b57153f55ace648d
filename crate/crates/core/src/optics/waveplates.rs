use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::numerics::{inner, kron, ComplexMatrix};
use crate::states::named_state;

/// Tables II and III are verified to this precision.
pub const FIDELITY_TOL: f64 = 1e-10;

fn cs(theta_deg: f64) -> (f64, f64) {
    let t = 2.0 * theta_deg.to_radians();
    (t.cos(), t.sin())
}

/// Half-wave plate at `theta_deg`: `[[c, s], [s, -c]]` with `c = cos 2θ`, `s = sin 2θ`.
pub fn hwp(theta_deg: f64) -> ComplexMatrix {
    let (c, s) = cs(theta_deg);
    ComplexMatrix::from_rows(&[
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
    ])
    .expect("2x2")
}

/// Quarter-wave plate at `theta_deg`: `[[i + c, s], [s, i - c]] / sqrt 2`.
pub fn qwp(theta_deg: f64) -> ComplexMatrix {
    let (c, s) = cs(theta_deg);
    let k = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_rows(&[
        [Complex64::new(c * k, k), Complex64::new(s * k, 0.0)],
        [Complex64::new(s * k, 0.0), Complex64::new(-c * k, k)],
    ])
    .expect("2x2")
}

/// Plate angles in degrees for the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveplateSetting {
    pub h1: f64,
    pub q1: f64,
    pub h2: f64,
    pub q2: f64,
}

impl WaveplateSetting {
    pub const fn new(h1: f64, q1: f64, h2: f64, q2: f64) -> Self {
        Self { h1, q1, h2, q2 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("H1", self.h1), ("Q1", self.q1), ("H2", self.h2), ("Q2", self.q2)] {
            if !v.is_finite() {
                return Err(QstError::InvalidArgument(format!("angle {name} is not finite: {v}")));
            }
        }
        Ok(())
    }

    /// `(Q1 H1) (x) (Q2 H2)`: on each arm the half-wave plate acts first.
    pub fn unitary(&self) -> ComplexMatrix {
        let arm = |h: f64, q: f64| &qwp(q) * &hwp(h);
        kron(&arm(self.h1, self.q1), &arm(self.h2, self.q2))
    }
}

impl std::fmt::Display for WaveplateSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "H1={}° Q1={}° H2={}° Q2={}°", self.h1, self.q1, self.h2, self.q2)
    }
}

/// One published rotation: the eigenstate of `gamma_k` and the plate angles
/// that carry it to the table's target state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveplateRow {
    pub gpo: usize,
    pub state: &'static str,
    pub setting: WaveplateSetting,
}

const fn row(gpo: usize, state: &'static str, h1: f64, q1: f64, h2: f64, q2: f64) -> WaveplateRow {
    WaveplateRow {
        gpo,
        state,
        setting: WaveplateSetting::new(h1, q1, h2, q2),
    }
}

/// Rotations onto `|00>` for the separable eigenstates.
pub const TABLE2: [WaveplateRow; 20] = [
    row(1, "00", 0.0, 0.0, 0.0, 0.0),
    row(2, "01", 0.0, 0.0, 45.0, 0.0),
    row(3, "10", 45.0, 0.0, 0.0, 0.0),
    row(4, "11", 45.0, 0.0, 45.0, 0.0),
    row(5, "0+", 0.0, 0.0, 22.5, 0.0),
    row(5, "0-", 0.0, 0.0, 67.5, 0.0),
    row(6, "0R", 0.0, 0.0, 0.0, 45.0),
    row(6, "0L", 0.0, 0.0, 0.0, -45.0),
    row(7, "+0", 22.5, 0.0, 0.0, 0.0),
    row(7, "-0", 67.5, 0.0, 0.0, 0.0),
    row(8, "R0", 0.0, 45.0, 0.0, 0.0),
    row(8, "L0", 0.0, -45.0, 0.0, 0.0),
    row(9, "1+", 45.0, 0.0, 22.5, 0.0),
    row(9, "1-", 45.0, 0.0, 67.5, 0.0),
    row(10, "1R", 45.0, 0.0, 0.0, 45.0),
    row(10, "1L", 45.0, 0.0, 0.0, -45.0),
    row(11, "+1", 22.5, 0.0, 45.0, 0.0),
    row(11, "-1", 67.5, 0.0, 45.0, 0.0),
    row(12, "R1", 0.0, 45.0, 45.0, 0.0),
    row(12, "L1", 0.0, -45.0, 45.0, 0.0),
];

/// Rotations onto the singlet `|Psi->` for the entangled eigenstates.
pub const TABLE3: [WaveplateRow; 8] = [
    row(13, "Ψ-", 0.0, 0.0, 0.0, 0.0),
    row(13, "Ψ+", 45.0, -45.0, 0.0, 45.0),
    row(14, "Ψ̄-", 0.0, 45.0, -22.5, 0.0),
    row(14, "Ψ̄+", 0.0, 45.0, 22.5, 90.0),
    row(15, "Φ-", 0.0, -45.0, 0.0, 45.0),
    row(15, "Φ+", 45.0, 0.0, 0.0, 0.0),
    row(16, "Φ̄-", 0.0, 45.0, -22.5, 90.0),
    row(16, "Φ̄+", 0.0, 45.0, 22.5, 0.0),
];

/// `|<target| U |psi>|^2`, insensitive to global phases.
pub fn rotated_fidelity(state: &str, setting: &WaveplateSetting, target: &str) -> Result<f64> {
    setting.validate()?;
    let psi = named_state(state)?;
    let t = named_state(target)?;
    if psi.len() != 4 || t.len() != 4 {
        return Err(QstError::Dimension(format!("`{state}` and `{target}` must be two-qubit states")));
    }
    let rotated = setting.unitary().mul_vec(&psi)?;
    Ok(inner(&t, &rotated).norm_sqr())
}

/// Fidelity of a Table II row with `|00>`.
pub fn verify_table2(row: &WaveplateRow) -> Result<f64> {
    rotated_fidelity(row.state, &row.setting, "00")
}

/// Fidelity of a Table III row with the singlet.
pub fn verify_table3(row: &WaveplateRow) -> Result<f64> {
    rotated_fidelity(row.state, &row.setting, "Ψ-")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, phase_s};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn is_unitary(u: &ComplexMatrix) -> f64 {
        (u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(u.rows()))
    }

    #[test]
    fn plates_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let t: f64 = rng.random_range(-360.0..360.0);
            assert!(is_unitary(&hwp(t)) < 1e-13);
            assert!(is_unitary(&qwp(t)) < 1e-13);
        }
    }

    #[test]
    fn named_plate_identities() {
        assert!(hwp(22.5).approx_eq(&hadamard(), 1e-15));
        let phase = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!(qwp(0.0).scale(phase).approx_eq(&phase_s(), 1e-15));
        for t in [0.0, 13.0, 45.0, 71.5] {
            let minus = qwp(t + 90.0).scale(Complex64::new(-1.0, 0.0));
            assert!(qwp(t).adjoint().approx_eq(&minus, 1e-15));
        }
    }

    #[test]
    fn every_table_row_reaches_its_target() {
        for r in &TABLE2 {
            let f = verify_table2(r).unwrap();
            assert!((f - 1.0).abs() < FIDELITY_TOL, "{} {}: {f}", r.state, r.setting);
        }
        for r in &TABLE3 {
            let f = verify_table3(r).unwrap();
            assert!((f - 1.0).abs() < FIDELITY_TOL, "{} {}: {f}", r.state, r.setting);
        }
    }

    #[test]
    fn wrong_angles_fail() {
        let r = row(5, "0+", 0.0, 0.0, 0.0, 0.0);
        assert!((verify_table2(&r).unwrap() - 0.5).abs() < 1e-12);
        assert!(verify_table2(&row(5, "nope", 0.0, 0.0, 0.0, 0.0)).is_err());
    }
}
