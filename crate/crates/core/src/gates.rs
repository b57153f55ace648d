//! Fixed single- and two-qubit gates shared by the protocol and optics code.

use num_complex::Complex64;

use crate::numerics::ComplexMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

/// `sigma_0 = I`, then the usual X, Y, Z for `index = 1, 2, 3`.
pub fn pauli(index: usize) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let data = match index {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, -i, i, z],
        3 => vec![o, z, z, -o],
        _ => panic!("Pauli index {index} out of range 0..=3"),
    };
    ComplexMatrix::new(2, 2, data).expect("2x2")
}

/// Phase gate `S = |0><0| + i|1><1|`.
pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)])
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::new(2, 2, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]).expect("2x2")
}

/// CNOT with the first qubit as control, basis order `|00>, |01>, |10>, |11>`.
pub fn cnot() -> ComplexMatrix {
    let o = c(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = o;
    m[(1, 1)] = o;
    m[(2, 3)] = o;
    m[(3, 2)] = o;
    m
}
