//! The seven two-qubit protocols compared in the robustness table.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generalized::{pauli_tensor_elements, x_gpo, y_gpo};
use super::{EigenComponent, Locality, MeasurementElement, ProtocolSpec};
use crate::gates::{hadamard, identity2, phase_s};
use crate::numerics::{kron, ComplexMatrix};
use crate::states::named_state;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn state(name: &str) -> Vec<Complex64> {
    named_state(name).expect("built-in state name")
}

/// `(index pair, kind)` of the matrix unit behind each optimal GPO: `None`
/// for a diagonal projector, `Some(false)` for `X_kl`, `Some(true)` for `Y_kl`.
const GPO_LAYOUT: [(usize, usize, Option<bool>); 16] = [
    (0, 0, None),
    (1, 1, None),
    (2, 2, None),
    (3, 3, None),
    (0, 1, Some(false)),
    (0, 1, Some(true)),
    (0, 2, Some(false)),
    (0, 2, Some(true)),
    (2, 3, Some(false)),
    (2, 3, Some(true)),
    (1, 3, Some(false)),
    (1, 3, Some(true)),
    (1, 2, Some(false)),
    (1, 2, Some(true)),
    (0, 3, Some(false)),
    (0, 3, Some(true)),
];

/// Eigenstates of each optimal GPO with their eigenvalues, listed as in the
/// waveplate tables.
const GPO_EIGEN: [&[(&str, f64)]; 16] = [
    &[("00", 1.0)],
    &[("01", 1.0)],
    &[("10", 1.0)],
    &[("11", 1.0)],
    &[("0+", 0.5), ("0-", -0.5)],
    &[("0R", -0.5), ("0L", 0.5)],
    &[("+0", 0.5), ("-0", -0.5)],
    &[("R0", -0.5), ("L0", 0.5)],
    &[("1+", 0.5), ("1-", -0.5)],
    &[("1R", -0.5), ("1L", 0.5)],
    &[("+1", 0.5), ("-1", -0.5)],
    &[("R1", -0.5), ("L1", 0.5)],
    &[("Ψ-", -0.5), ("Ψ+", 0.5)],
    &[("Ψ̄-", -0.5), ("Ψ̄+", 0.5)],
    &[("Φ-", -0.5), ("Φ+", 0.5)],
    &[("Φ̄-", -0.5), ("Φ̄+", 0.5)],
];

/// Optimal two-qubit GPO `gamma_k` for `k = 1..=16`.
pub fn gpo(k: usize) -> ComplexMatrix {
    assert!((1..=16).contains(&k), "GPO index {k} outside 1..=16");
    let (a, b, kind) = GPO_LAYOUT[k - 1];
    match kind {
        None => {
            let mut m = ComplexMatrix::zeros(4, 4);
            m[(a, a)] = c(1.0, 0.0);
            m
        }
        Some(false) => x_gpo(4, a, b),
        Some(true) => y_gpo(4, a, b),
    }
}

fn gpo_eigen(k: usize) -> Vec<EigenComponent> {
    GPO_EIGEN[k - 1]
        .iter()
        .map(|&(name, lambda)| EigenComponent::new(lambda, state(name), name))
        .collect()
}

fn gpo_element(k: usize) -> MeasurementElement {
    MeasurementElement::operator(format!("γ{k}"), gpo(k), gpo_eigen(k))
}

fn projectors(names: &[&str]) -> Vec<MeasurementElement> {
    names
        .iter()
        .map(|n| MeasurementElement::projector(*n, state(n)))
        .collect()
}

/// Twelve local and four entangled GPOs; each isolates one real number of `rho`.
pub fn protocol_1_optimal() -> ProtocolSpec {
    let elements = (1..=16).map(gpo_element).collect();
    ProtocolSpec::new("1", "optimal GPOs", Locality::LocalAndGlobal, elements)
        .expect("optimal GPOs are Hermitian")
}

/// `sigma_i (x) sigma_j`, element `4i + j + 1`.
pub fn protocol_2_pauli_products() -> ProtocolSpec {
    ProtocolSpec::new("2", "Pauli operators", Locality::Local, pauli_tensor_elements(2))
        .expect("Pauli products are Hermitian")
}

pub const JAMES_STATES: [&str; 16] = [
    "00", "01", "0+", "0L", "10", "11", "1+", "1L", "R0", "R1", "R+", "RL", "+0", "+1", "++", "+R",
];

pub fn protocol_3_james() -> ProtocolSpec {
    ProtocolSpec::new("3", "James et al. basis", Locality::Local, projectors(&JAMES_STATES))
        .expect("projectors")
}

pub const SEPARABLE36_STATES: [&str; 36] = [
    "00", "01", "10", "11", "++", "-+", "+-", "--", "0+", "0-", "+0", "-0", "1+", "1-", "+1",
    "-1", "0R", "R0", "1R", "R1", "0L", "L0", "1L", "L1", "R+", "R-", "+R", "-R", "L+", "L-",
    "+L", "-L", "RR", "RL", "LR", "LL",
];

pub fn protocol_4_separable36() -> ProtocolSpec {
    ProtocolSpec::new(
        "4",
        "standard separable basis",
        Locality::Local,
        projectors(&SEPARABLE36_STATES),
    )
    .expect("projectors")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MubVariant {
    /// The experimentally realized set.
    #[default]
    Adamson,
    Bandyopadhyay,
}

fn superpose(a: &str, b: &str, phase: Complex64) -> Vec<Complex64> {
    state(a)
        .into_iter()
        .zip(state(b))
        .map(|(x, y)| (x + phase * y) * FRAC_1_SQRT_2)
        .collect()
}

fn apply(u: &ComplexMatrix, name: &str) -> Vec<Complex64> {
    u.mul_vec(&state(name)).expect("4x4 on 4-vector")
}

/// Local unitaries `SH (x) I` and `I (x) SH` generating the entangled bases of the
/// second MUB variant.
pub(crate) fn bandyopadhyay_unitaries() -> (ComplexMatrix, ComplexMatrix) {
    let sh = &phase_s() * &hadamard();
    (kron(&sh, &identity2()), kron(&identity2(), &sh))
}

/// A basis letter with its labelled state vectors.
pub type LabelledBasis = (char, Vec<(String, Vec<Complex64>)>);

/// The five bases `A..E` of a MUB variant, each with four labelled states.
pub fn mub_bases(variant: MubVariant) -> Vec<LabelledBasis> {
    let named = |names: &[&str]| -> Vec<(String, Vec<Complex64>)> {
        names.iter().map(|n| (n.to_string(), state(n))).collect()
    };
    let i = c(0.0, 1.0);
    let a = named(&["00", "01", "10", "11"]);
    match variant {
        MubVariant::Adamson => vec![
            ('A', a),
            ('B', named(&["R+", "R-", "L+", "L-"])),
            ('C', named(&["+R", "-R", "+L", "-L"])),
            (
                'D',
                vec![
                    ("(R0+iL1)/√2".into(), superpose("R0", "L1", i)),
                    ("(R0-iL1)/√2".into(), superpose("R0", "L1", -i)),
                    ("(R1+iL0)/√2".into(), superpose("R1", "L0", i)),
                    ("(R1-iL0)/√2".into(), superpose("R1", "L0", -i)),
                ],
            ),
            (
                'E',
                vec![
                    ("(RR+iLL)/√2".into(), superpose("RR", "LL", i)),
                    ("(RR-iLL)/√2".into(), superpose("RR", "LL", -i)),
                    ("(RL+iLR)/√2".into(), superpose("RL", "LR", i)),
                    ("(RL-iLR)/√2".into(), superpose("RL", "LR", -i)),
                ],
            ),
        ],
        MubVariant::Bandyopadhyay => {
            let (u1, u2) = bandyopadhyay_unitaries();
            let bells = ["Φ+", "Φ-", "Ψ+", "Ψ-"];
            vec![
                ('A', a),
                ('B', named(&["++", "-+", "+-", "--"])),
                ('C', named(&["RR", "RL", "LR", "LL"])),
                (
                    'D',
                    bells.iter().map(|b| (format!("U1 {b}"), apply(&u1, b))).collect(),
                ),
                (
                    'E',
                    bells.iter().map(|b| (format!("U2 {b}"), apply(&u2, b))).collect(),
                ),
            ]
        }
    }
}

/// Twenty projectors onto five mutually unbiased bases.
pub fn protocol_5_mub(variant: MubVariant) -> ProtocolSpec {
    let elements = mub_bases(variant)
        .into_iter()
        .flat_map(|(basis, states)| {
            states.into_iter().enumerate().map(move |(n, (label, psi))| {
                MeasurementElement::projector(format!("{basis}{}: {label}", n + 1), psi)
            })
        })
        .collect();
    let (id, name) = match variant {
        MubVariant::Adamson => ("5", "mutually unbiased bases (Adamson-Steinberg)"),
        MubVariant::Bandyopadhyay => ("5b", "mutually unbiased bases (Bandyopadhyay et al.)"),
    };
    ProtocolSpec::new(id, name, Locality::LocalAndGlobal, elements).expect("projectors")
}

/// Diagonal Gell-Mann generators followed by the off-diagonal optimal GPOs.
pub fn protocol_6_gellmann() -> ProtocolSpec {
    let diag = |label: &str, scale: f64, entries: [f64; 4]| {
        let m = ComplexMatrix::diag(&entries.map(|e| c(scale * e, 0.0)));
        let basis = ["00", "01", "10", "11"];
        let eigen = entries
            .iter()
            .zip(basis)
            .filter(|(e, _)| **e != 0.0)
            .map(|(e, b)| EigenComponent::new(scale * e, state(b), b))
            .collect();
        MeasurementElement::operator(label, m, eigen)
    };
    let mut elements = vec![
        diag("Γ1", 0.5, [1.0, 1.0, 1.0, 1.0]),
        diag("Γ2", 0.5, [1.0, -1.0, 0.0, 0.0]),
        diag("Γ3", 1.0 / (2.0 * 3f64.sqrt()), [1.0, 1.0, -2.0, 0.0]),
        diag("Γ4", 1.0 / (2.0 * 6f64.sqrt()), [1.0, 1.0, 1.0, -3.0]),
    ];
    elements.extend((5..=16).map(|k| {
        MeasurementElement::operator(format!("Γ{k}"), gpo(k), gpo_eigen(k))
    }));
    ProtocolSpec::new("6", "Gell-Mann GPOs", Locality::LocalAndGlobal, elements)
        .expect("Gell-Mann operators are Hermitian")
}

/// Clock matrix `D = e^{i pi/4} diag(1, i, -1, -i)`.
pub fn patera_d() -> ComplexMatrix {
    let g = Complex64::from_polar(1.0, FRAC_PI_4);
    ComplexMatrix::diag(&[g, g * c(0.0, 1.0), -g, g * c(0.0, -1.0)])
}

/// Cyclic shift with a `-1` corner.
pub fn patera_b() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 1)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 3)] = c(1.0, 0.0);
    m[(3, 0)] = c(-1.0, 0.0);
    m
}

/// `{D, D^2, D^3, B, B^2, B^3, B D^m, B^2 D^m, B^3 D^m, I}` as non-Hermitian
/// elements, each contributing the real and imaginary parts of `Tr(rho G)`.
pub fn protocol_7_patera_zassenhaus() -> ProtocolSpec {
    let d = patera_d();
    let b = patera_b();
    let pow = |m: &ComplexMatrix, e: u32| m.pow(e).expect("square");
    let mut ops: Vec<(String, ComplexMatrix)> = Vec::with_capacity(16);
    for e in 1..=3 {
        ops.push((if e == 1 { "D".into() } else { format!("D^{e}") }, pow(&d, e)));
    }
    for e in 1..=3 {
        ops.push((if e == 1 { "B".into() } else { format!("B^{e}") }, pow(&b, e)));
    }
    for be in 1..=3u32 {
        for de in 1..=3u32 {
            let bl = if be == 1 { "B".to_string() } else { format!("B^{be}") };
            let dl = if de == 1 { "D".to_string() } else { format!("D^{de}") };
            ops.push((format!("{bl}{dl}"), &pow(&b, be) * &pow(&d, de)));
        }
    }
    ops.push(("I".into(), ComplexMatrix::identity(4)));

    let hermitian_only: Vec<MeasurementElement> = ops
        .iter()
        .map(|(l, m)| MeasurementElement::operator(l.clone(), m.hermitian_part(), vec![]))
        .collect();
    let hermitian_rank = super::build_rotation_matrix(&hermitian_only)
        .and_then(|a| crate::numerics::svd(&a))
        .map(|s| s.rank())
        .unwrap_or(0);

    let elements = ops
        .into_iter()
        .map(|(l, m)| MeasurementElement::general(l, m).expect("finite 4x4"))
        .collect();
    let mut spec = ProtocolSpec::new("7", "Patera-Zassenhaus GPOs", Locality::LocalAndGlobal, elements)
        .expect("rows are real by construction");
    spec.construction = format!(
        "hermitian parts alone give rank {hermitian_rank} < 16, so each operator contributes \
         the rows of its hermitian and anti-hermitian parts (32 x 16)"
    );
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::pauli;
    use crate::protocols::spectral_sum;

    #[test]
    fn gamma5_is_half_zero_projector_times_sigma_x() {
        let zero = ComplexMatrix::projector(&state("0"));
        let expected = kron(&zero, &pauli(1)).scale(c(0.5, 0.0));
        assert_eq!(gpo(5), expected);
    }

    #[test]
    fn gpos_match_their_defining_products() {
        let half = c(0.5, 0.0);
        let p0 = ComplexMatrix::projector(&state("0"));
        let p1 = ComplexMatrix::projector(&state("1"));
        let cases = [
            (6, kron(&p0, &pauli(2))),
            (7, kron(&pauli(1), &p0)),
            (8, kron(&pauli(2), &p0)),
            (9, kron(&p1, &pauli(1))),
            (10, kron(&p1, &pauli(2))),
            (11, kron(&pauli(1), &p1)),
            (12, kron(&pauli(2), &p1)),
        ];
        for (k, m) in cases {
            assert!(gpo(k).approx_eq(&m.scale(half), 1e-15), "γ{k}");
        }
        let bell = |plus: &str, minus: &str| {
            ComplexMatrix::projector(&state(plus))
                .sub(&ComplexMatrix::projector(&state(minus)))
                .unwrap()
                .scale(half)
        };
        assert!(gpo(13).approx_eq(&bell("Ψ+", "Ψ-"), 1e-15));
        assert!(gpo(14).approx_eq(&bell("Ψ̄+", "Ψ̄-"), 1e-15));
        assert!(gpo(15).approx_eq(&bell("Φ+", "Φ-"), 1e-15));
        assert!(gpo(16).approx_eq(&bell("Φ̄+", "Φ̄-"), 1e-15));
    }

    #[test]
    fn analytic_spectra_reconstruct_gpos() {
        for k in 1..=16 {
            let back = spectral_sum(&gpo_eigen(k), 4);
            assert!(back.approx_eq(&gpo(k), 1e-12), "γ{k}");
        }
        let total: usize = (1..=16).map(|k| gpo_eigen(k).len()).sum();
        assert_eq!(total, 28);
    }

    #[test]
    fn gpos_are_hilbert_schmidt_orthogonal() {
        for k in 1..=16 {
            for l in 1..=16 {
                let t = gpo(k).trace_of_product(&gpo(l));
                if k == l {
                    assert!(t.re > 0.0);
                } else {
                    assert_eq!(t, c(0.0, 0.0), "Tr(γ{k} γ{l})");
                }
            }
        }
    }

    #[test]
    fn patera_b_fourth_power_is_minus_identity() {
        let b4 = patera_b().pow(4).unwrap();
        assert_eq!(b4, ComplexMatrix::identity(4).scale(c(-1.0, 0.0)));
        let d4 = patera_d().pow(4).unwrap();
        assert!(d4.approx_eq(&ComplexMatrix::identity(4).scale(c(-1.0, 0.0)), 1e-15));
    }

    #[test]
    fn patera_construction_is_recorded() {
        let p = protocol_7_patera_zassenhaus();
        assert_eq!(p.rotation_matrix.shape(), (32, 16));
        assert_eq!(p.n_elements(), 16);
        assert!(p.construction.contains("anti-hermitian"));
    }

    #[test]
    fn shapes_and_counts() {
        assert_eq!(protocol_3_james().rotation_matrix.shape(), (16, 16));
        assert_eq!(protocol_4_separable36().rotation_matrix.shape(), (36, 16));
        assert_eq!(protocol_5_mub(MubVariant::Adamson).rotation_matrix.shape(), (20, 16));
        assert_eq!(protocol_5_mub(MubVariant::Bandyopadhyay).rotation_matrix.shape(), (20, 16));
        let p2 = protocol_2_pauli_products();
        assert_eq!(p2.elements[0].matrix(), ComplexMatrix::identity(4));
        let z = c(1.0, 0.0);
        assert_eq!(p2.elements[15].matrix(), ComplexMatrix::diag(&[z, -z, -z, z]));
    }

    #[test]
    fn gellmann_traceless_beyond_first() {
        let p = protocol_6_gellmann();
        for (n, e) in p.elements.iter().enumerate().skip(1) {
            assert!(e.matrix().trace().norm() < 1e-15, "Γ{}", n + 1);
        }
    }
}
