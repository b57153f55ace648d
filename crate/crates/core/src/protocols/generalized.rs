//! Qudit and multiqubit generalizations, plus the single-qubit cases.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{EigenComponent, Locality, MeasurementElement, ProtocolSpec};
use crate::error::{QstError, Result};
use crate::gates::pauli;
use crate::numerics::{kron, kron_vec, ComplexMatrix};
use crate::states::qubit_state;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn basis_vector(d: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); d];
    v[k] = c(1.0, 0.0);
    v
}

/// `X_kl = (|k><l| + |l><k|) / 2`.
pub(crate) fn x_gpo(d: usize, k: usize, l: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(k, l)] = c(0.5, 0.0);
    m[(l, k)] = c(0.5, 0.0);
    m
}

/// `Y_kl = (-i|k><l| + i|l><k|) / 2`.
pub(crate) fn y_gpo(d: usize, k: usize, l: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(k, l)] = c(0.0, -0.5);
    m[(l, k)] = c(0.0, 0.5);
    m
}

/// `(|k> + phase |l>) / sqrt 2`.
fn pair_state(d: usize, k: usize, l: usize, phase: Complex64) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); d];
    v[k] = c(FRAC_1_SQRT_2, 0.0);
    v[l] = phase * FRAC_1_SQRT_2;
    v
}

/// The `d^2` optimal GPOs: diagonal projectors `X_kk`, then every `X_{k<l}`,
/// then every `Y_{k<l}`, each pair in row-major order.
pub fn optimal_gpos_qudit(d: usize) -> Result<ProtocolSpec> {
    if d < 2 {
        return Err(QstError::InvalidArgument(format!(
            "qudit dimension must be at least 2, got {d}"
        )));
    }
    let mut elements = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, k)] = c(1.0, 0.0);
        elements.push(MeasurementElement::operator(
            format!("X{k}{k}"),
            m,
            vec![EigenComponent::new(1.0, basis_vector(d, k), format!("|{k}>"))],
        ));
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|k| (k + 1..d).map(move |l| (k, l)))
        .collect();
    for &(k, l) in &pairs {
        elements.push(MeasurementElement::operator(
            format!("X{k}{l}"),
            x_gpo(d, k, l),
            vec![
                EigenComponent::new(0.5, pair_state(d, k, l, c(1.0, 0.0)), format!("(|{k}>+|{l}>)/√2")),
                EigenComponent::new(-0.5, pair_state(d, k, l, c(-1.0, 0.0)), format!("(|{k}>-|{l}>)/√2")),
            ],
        ));
    }
    for &(k, l) in &pairs {
        elements.push(MeasurementElement::operator(
            format!("Y{k}{l}"),
            y_gpo(d, k, l),
            vec![
                EigenComponent::new(0.5, pair_state(d, k, l, c(0.0, 1.0)), format!("(|{k}>+i|{l}>)/√2")),
                EigenComponent::new(-0.5, pair_state(d, k, l, c(0.0, -1.0)), format!("(|{k}>-i|{l}>)/√2")),
            ],
        ));
    }
    ProtocolSpec::new(
        format!("qudit:{d}"),
        format!("optimal GPOs, d = {d}"),
        Locality::LocalAndGlobal,
        elements,
    )
}

/// Eigenstates of `sigma_n` as `(symbol, eigenvalue)`.
const PAULI_EIGEN: [[(char, f64); 2]; 4] = [
    [('0', 1.0), ('1', 1.0)],
    [('+', 1.0), ('-', -1.0)],
    [('L', 1.0), ('R', -1.0)],
    [('0', 1.0), ('1', -1.0)],
];

const PAULI_NAMES: [&str; 4] = ["I", "X", "Y", "Z"];

/// All `4^n` Pauli strings, element `1 + sum_i 4^{n-i} n_i`, with product
/// eigenbases.
pub(crate) fn pauli_tensor_elements(n_qubits: usize) -> Vec<MeasurementElement> {
    let count = 4usize.pow(n_qubits as u32);
    (0..count)
        .map(|index| {
            let digits: Vec<usize> = (0..n_qubits)
                .map(|i| (index / 4usize.pow((n_qubits - 1 - i) as u32)) % 4)
                .collect();
            let label: String = digits.iter().map(|&d| PAULI_NAMES[d]).collect::<Vec<_>>().join("⊗");
            let matrix = digits
                .iter()
                .skip(1)
                .fold(pauli(digits[0]), |acc, &d| kron(&acc, &pauli(d)));
            let eigen = (0..1usize << n_qubits)
                .map(|choice| {
                    let mut lambda = 1.0;
                    let mut name = String::new();
                    let mut psi = vec![c(1.0, 0.0)];
                    for (q, &dg) in digits.iter().enumerate() {
                        let (sym, ev) = PAULI_EIGEN[dg][(choice >> (n_qubits - 1 - q)) & 1];
                        lambda *= ev;
                        name.push(sym);
                        psi = kron_vec(&psi, &qubit_state(sym).expect("symbol"));
                    }
                    EigenComponent::new(lambda, psi, name)
                })
                .collect();
            MeasurementElement::operator(label, matrix, eigen)
        })
        .collect()
}

/// Tensor products of Pauli operators and the identity on `n_qubits` qubits.
pub fn pauli_tensor_protocol(n_qubits: usize) -> Result<ProtocolSpec> {
    if n_qubits == 0 {
        return Err(QstError::InvalidArgument("need at least one qubit".into()));
    }
    if n_qubits > 5 {
        return Err(QstError::InvalidArgument(format!(
            "{n_qubits} qubits gives a {0}x{0} rotation matrix; at most 5 qubits are supported",
            4usize.pow(n_qubits as u32)
        )));
    }
    ProtocolSpec::new(
        format!("pauli:{n_qubits}"),
        format!("Pauli tensor products, {n_qubits} qubit(s)"),
        Locality::Local,
        pauli_tensor_elements(n_qubits),
    )
}

#[derive(Debug, Clone)]
pub struct SingleQubitProtocols {
    /// `|0><0|, |1><1|, sigma_1 / 2, sigma_2 / 2`.
    pub optimal: ProtocolSpec,
    /// `sigma_1, sigma_2, sigma_3, I`.
    pub pauli4: ProtocolSpec,
    /// `sigma_1, sigma_2, sigma_3` with `x_4 = 1 - x_1`.
    pub pauli3_reduced: ProtocolSpec,
}

pub fn single_qubit_protocols() -> SingleQubitProtocols {
    let mut optimal = optimal_gpos_qudit(2).expect("d = 2");
    optimal.id = "qubit-optimal".into();
    optimal.name = "single-qubit optimal GPOs".into();

    let paulis = pauli_tensor_elements(1);
    // reorder I, X, Y, Z into X, Y, Z, I
    let reordered: Vec<MeasurementElement> = [1, 2, 3, 0].iter().map(|&i| paulis[i].clone()).collect();
    let pauli4 = ProtocolSpec::new("qubit-pauli4", "single-qubit Pauli operators with identity", Locality::Local, reordered.clone())
        .expect("Hermitian");
    let pauli3_reduced = ProtocolSpec::new(
        "qubit-pauli3",
        "single-qubit Pauli operators, unit trace",
        Locality::Local,
        reordered[..3].to_vec(),
    )
    .expect("Hermitian")
    .with_trace_reduction();
    SingleQubitProtocols {
        optimal,
        pauli4,
        pauli3_reduced,
    }
}
