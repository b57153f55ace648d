use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::numerics::ComplexMatrix;

/// Spatial-polarization modes: photon arm 1 or 2, polarization H or V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    H1,
    V1,
    H2,
    V2,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::H1, Mode::V1, Mode::H2, Mode::V2];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name of the detector behind the polarizing beam splitter.
    pub fn detector(self) -> &'static str {
        ["D1H", "D1V", "D2H", "D2V"][self.index()]
    }
}

/// Occupied mode pairs of the ten basis states, in wire order.
pub const FOCK_BASIS: [(Mode, Mode); 10] = [
    (Mode::H1, Mode::H1),
    (Mode::V1, Mode::V1),
    (Mode::H1, Mode::V1),
    (Mode::H1, Mode::H2),
    (Mode::H1, Mode::V2),
    (Mode::V1, Mode::H2),
    (Mode::V1, Mode::V2),
    (Mode::H2, Mode::H2),
    (Mode::V2, Mode::V2),
    (Mode::H2, Mode::V2),
];

pub const FOCK_LABELS: [&str; 10] = [
    "2H1", "2V1", "H1V1", "H1H2", "H1V2", "V1H2", "V1V2", "2H2", "2V2", "H2V2",
];

/// Two photons in the modes `{1H, 1V, 2H, 2V}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonFockState {
    /// Amplitudes in [`FOCK_BASIS`] order.
    pub amplitudes: [Complex64; 10],
}

fn basis_index(a: Mode, b: Mode) -> usize {
    let (a, b) = if a.index() <= b.index() { (a, b) } else { (b, a) };
    FOCK_BASIS
        .iter()
        .position(|&(x, y)| x == a && y == b)
        .expect("every mode pair is in the basis")
}

impl TwoPhotonFockState {
    pub fn new(amplitudes: [Complex64; 10]) -> Self {
        Self { amplitudes }
    }

    /// One photon per arm: `|q1 q2>` with `0 = H`, `1 = V` on each arm.
    pub fn from_dual_rail(psi: &[Complex64]) -> Result<Self> {
        if psi.len() != 4 {
            return Err(QstError::Dimension(format!(
                "dual-rail embedding needs a two-qubit state, got length {}",
                psi.len()
            )));
        }
        let mut amplitudes = [Complex64::new(0.0, 0.0); 10];
        for (k, &amp) in psi.iter().enumerate() {
            let first = if k >> 1 == 0 { Mode::H1 } else { Mode::V1 };
            let second = if k & 1 == 0 { Mode::H2 } else { Mode::V2 };
            amplitudes[basis_index(first, second)] = amp;
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitude(&self, a: Mode, b: Mode) -> Complex64 {
        self.amplitudes[basis_index(a, b)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Symmetric `T` with `|psi> = sum_mn T_mn a_m^dag a_n^dag |vac>`.
    fn tensor(&self) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(4, 4);
        for (&(a, b), &amp) in FOCK_BASIS.iter().zip(&self.amplitudes) {
            let (m, n) = (a.index(), b.index());
            if m == n {
                t[(m, m)] = amp * FRAC_1_SQRT_2;
            } else {
                t[(m, n)] = amp * 0.5;
                t[(n, m)] = amp * 0.5;
            }
        }
        t
    }

    fn from_tensor(t: &ComplexMatrix) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 10];
        for (slot, &(a, b)) in amplitudes.iter_mut().zip(&FOCK_BASIS) {
            let (m, n) = (a.index(), b.index());
            *slot = if m == n { t[(m, m)] * SQRT_2 } else { t[(m, n)] + t[(n, m)] };
        }
        Self { amplitudes }
    }

    /// Image under the linear mode map `a_i^dag -> sum_j u_ij b_j^dag`.
    pub fn transform_modes(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != (4, 4) {
            return Err(QstError::Dimension(format!(
                "mode transformation must be 4x4, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let t = self.tensor();
        Ok(Self::from_tensor(&(&(&u.transpose() * &t) * u)))
    }
}

/// 50:50 beam splitter on the two arms: `a_1p -> (b_1p + b_2p)/sqrt 2`,
/// `a_2p -> (b_1p - b_2p)/sqrt 2` for both polarizations.
pub fn beam_splitter_modes() -> ComplexMatrix {
    let k = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut u = ComplexMatrix::zeros(4, 4);
    for (p1, p2) in [(Mode::H1, Mode::H2), (Mode::V1, Mode::V2)] {
        let (i, j) = (p1.index(), p2.index());
        u[(i, i)] = k;
        u[(i, j)] = k;
        u[(j, i)] = k;
        u[(j, j)] = -k;
    }
    u
}

pub fn beam_splitter(state: &TwoPhotonFockState) -> TwoPhotonFockState {
    state
        .transform_modes(&beam_splitter_modes())
        .expect("beam splitter is 4x4")
}

/// Click pattern of two ideal, photon-number-blind detectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoincidenceEvent {
    pub detectors: (Mode, Mode),
    /// `D1H&D2V` style label; `D1H x2` for both photons in one detector.
    pub label: String,
    pub probability: f64,
}

impl CoincidenceEvent {
    pub fn is_double_fire(&self) -> bool {
        self.detectors.0 == self.detectors.1
    }

    pub fn is_cross_arm(&self) -> bool {
        let arm = |m: Mode| m.index() / 2;
        arm(self.detectors.0) != arm(self.detectors.1)
    }
}

/// Distribution over the ten detector events behind polarizing beam
/// splitters on both output arms, normalized by the state norm.
pub fn classify_coincidence(state: &TwoPhotonFockState) -> Vec<CoincidenceEvent> {
    let norm2 = state.norm().powi(2);
    FOCK_BASIS
        .iter()
        .zip(&state.amplitudes)
        .map(|(&(a, b), amp)| CoincidenceEvent {
            detectors: (a, b),
            label: if a == b {
                format!("{} x2", a.detector())
            } else {
                format!("{}&{}", a.detector(), b.detector())
            },
            probability: if norm2 > 0.0 { amp.norm_sqr() / norm2 } else { 0.0 },
        })
        .collect()
}

/// Total probability of the events with the given labels.
pub fn probability_of(events: &[CoincidenceEvent], labels: &[&str]) -> f64 {
    events
        .iter()
        .filter(|e| labels.contains(&e.label.as_str()))
        .map(|e| e.probability)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::named_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dual(name: &str) -> TwoPhotonFockState {
        TwoPhotonFockState::from_dual_rail(&named_state(name).unwrap()).unwrap()
    }

    #[test]
    fn embedding_avoids_same_arm_occupation() {
        let s = dual("Φ+");
        for (i, (a, b)) in FOCK_BASIS.iter().enumerate() {
            if a.index() / 2 == b.index() / 2 {
                assert_eq!(s.amplitudes[i], Complex64::new(0.0, 0.0));
            }
        }
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beam_splitter_is_unitary_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let mut amps = [Complex64::new(0.0, 0.0); 10];
            for a in &mut amps {
                *a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let s = TwoPhotonFockState::new(amps);
            let n = s.norm();
            let out = beam_splitter(&s);
            assert!((out.norm() - n).abs() < 1e-12 * n);
            let total: f64 = classify_coincidence(&out).iter().map(|e| e.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singlet_is_antisymmetric() {
        let s = dual("Ψ-");
        let out = beam_splitter(&s);
        let mut neg = s.clone();
        for a in &mut neg.amplitudes {
            *a = -*a;
        }
        assert!(out.max_abs_diff(&neg) < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_bunching() {
        // |H, H> : one H photon per arm bunches into one output arm
        let mut amps = [Complex64::new(0.0, 0.0); 10];
        amps[basis_index(Mode::H1, Mode::H2)] = Complex64::new(1.0, 0.0);
        let out = beam_splitter(&TwoPhotonFockState::new(amps));
        assert!(out.amplitude(Mode::H1, Mode::H2).norm() < 1e-15);
        assert!((out.amplitude(Mode::H1, Mode::H1).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((out.amplitude(Mode::H2, Mode::H2).norm_sqr() - 0.5).abs() < 1e-15);
    }
}
