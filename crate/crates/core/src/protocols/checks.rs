//! Algebraic identities satisfied by the protocol operators and bases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::two_qubit::{bandyopadhyay_unitaries, gpo, mub_bases, MubVariant};
use crate::gates::{cnot, hadamard, identity2, pauli, phase_s};
use crate::numerics::{inner, kron, ComplexMatrix};
use crate::states::named_state;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub description: String,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CnotReport {
    /// `CNOT gamma_k CNOT = gamma_k'` for the four entangled GPOs.
    pub conjugations: Vec<IdentityCheck>,
    /// The three local relations among `gamma_13..gamma_16`.
    pub local_relations: Vec<IdentityCheck>,
    /// Conjugating `gamma_13` twice.
    pub involution: IdentityCheck,
}

impl CnotReport {
    pub fn all_passed(&self) -> bool {
        self.conjugations
            .iter()
            .chain(&self.local_relations)
            .chain(std::iter::once(&self.involution))
            .all(|c| c.passed)
    }
}

const TOL: f64 = 1e-12;

fn check(description: String, lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> IdentityCheck {
    let max_deviation = lhs.max_abs_diff(rhs);
    IdentityCheck {
        description,
        max_deviation,
        passed: max_deviation <= TOL,
    }
}

fn conj(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    &(u * m) * &u.adjoint()
}

/// The CNOT maps the entangled GPOs onto local ones: (13,11), (14,12),
/// (15,7), (16,8).
pub fn cnot_disentangle_check() -> CnotReport {
    let u = cnot();
    let conjugations = [(13, 11), (14, 12), (15, 7), (16, 8)]
        .iter()
        .map(|&(k, kp)| {
            check(
                format!("CNOT γ{k} CNOT = γ{kp}"),
                &conj(&u, &gpo(k)),
                &gpo(kp),
            )
        })
        .collect();
    let s1 = kron(&phase_s(), &identity2());
    let x2 = kron(&identity2(), &pauli(1));
    let sx = kron(&phase_s(), &pauli(1));
    let g13 = gpo(13);
    let local_relations = vec![
        check("γ14 = (S⊗I) γ13 (S†⊗I)".into(), &conj(&s1, &g13), &gpo(14)),
        check("γ15 = (I⊗σ1) γ13 (I⊗σ1)".into(), &conj(&x2, &g13), &gpo(15)),
        check("γ16 = (S⊗σ1) γ13 (S†⊗σ1)".into(), &conj(&sx, &g13), &gpo(16)),
    ];
    let involution = check(
        "CNOT (CNOT γ13 CNOT) CNOT = γ13".into(),
        &conj(&u, &conj(&u, &g13)),
        &g13,
    );
    CnotReport {
        conjugations,
        local_relations,
        involution,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MubReport {
    pub variant: MubVariant,
    /// Unordered pairs of states from different bases.
    pub pairs_checked: usize,
    /// `max | |<psi|phi>| - 1/2 |` over those pairs.
    pub max_deviation: f64,
    /// `max | |<psi_m|psi_n>| - delta_mn |` inside each basis.
    pub max_orthonormality_deviation: f64,
}

impl MubReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.max_orthonormality_deviation <= tol
    }
}

/// Verifies `|<psi^X_m|psi^Y_n>| = 1/2` for every `X != Y`.
pub fn mub_check(variant: MubVariant) -> MubReport {
    let bases = mub_bases(variant);
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    let mut worst_on: f64 = 0.0;
    for (x, (_, bx)) in bases.iter().enumerate() {
        for (y, (_, by)) in bases.iter().enumerate() {
            for (m, (_, psi)) in bx.iter().enumerate() {
                for (n, (_, phi)) in by.iter().enumerate() {
                    let overlap = inner(psi, phi).norm();
                    if x == y {
                        let target = if m == n { 1.0 } else { 0.0 };
                        worst_on = worst_on.max((overlap - target).abs());
                    } else if x < y {
                        pairs += 1;
                        worst = worst.max((overlap - 0.5).abs());
                    }
                }
            }
        }
    }
    MubReport {
        variant,
        pairs_checked: pairs,
        max_deviation: worst,
        max_orthonormality_deviation: worst_on,
    }
}

/// Local equivalence between an entangled basis state and a Bell state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EprRelation {
    pub basis_state: String,
    pub local_unitary: String,
    /// Bell state named by the literal relation.
    pub literal_partner: String,
    pub literal_overlap: f64,
    /// Bell state with the largest overlap under the same local unitary.
    pub matched_partner: String,
    pub matched_overlap: f64,
}

const BELL: [&str; 4] = ["Φ+", "Φ-", "Ψ+", "Ψ-"];

/// Overlaps `|<psi|(U (x) V)|Bell>|` for the entangled bases `D` and `E`.
///
/// For the first variant the relations read `D_{1,2} ~ (SHS (x) sigma_2)
/// Phi^{+-}`, `D_{3,4} ~ (SHS (x) sigma_2) Psi^{+-}` and the same with `SHS
/// (x) SH` for `E`; for the second they read `D_n = U_1 Bell_n`, `E_n = U_2
/// Bell_n` together with the explicit superpositions. `literal_*` records the
/// pairing as written and `matched_*` the best pairing under the same unitary.
pub fn epr_relations(variant: MubVariant) -> Vec<EprRelation> {
    let bases = mub_bases(variant);
    let s = phase_s();
    let h = hadamard();
    let mut out = Vec::new();
    match variant {
        MubVariant::Adamson => {
            let shs = &(&s * &h) * &s;
            let sh = &s * &h;
            let d_unitary = kron(&shs, &pauli(2));
            let e_unitary = kron(&shs, &sh);
            for (basis, u, uname) in [('D', &d_unitary, "SHS⊗σ2"), ('E', &e_unitary, "SHS⊗SH")] {
                let states = &bases.iter().find(|(b, _)| *b == basis).expect("basis").1;
                for (n, (label, psi)) in states.iter().enumerate() {
                    out.push(relation(
                        format!("{basis}{}: {label}", n + 1),
                        uname,
                        psi,
                        u,
                        BELL[n],
                    ));
                }
            }
        }
        MubVariant::Bandyopadhyay => {
            let (u1, u2) = bandyopadhyay_unitaries();
            let sup = |a: &str, b: &str, sign: f64| -> Vec<Complex64> {
                let x = named_state(a).expect("state");
                let y = named_state(b).expect("state");
                x.iter()
                    .zip(&y)
                    .map(|(p, q)| (p + q * sign) * std::f64::consts::FRAC_1_SQRT_2)
                    .collect()
            };
            let explicit_d = [
                ("(L0+R1)/√2", sup("L0", "R1", 1.0)),
                ("(L0-R1)/√2", sup("L0", "R1", -1.0)),
                ("(R0+L1)/√2", sup("R0", "L1", 1.0)),
                ("(R0-L1)/√2", sup("R0", "L1", -1.0)),
            ];
            let explicit_e = [
                ("(0L+1R)/√2", sup("0L", "1R", 1.0)),
                ("(0L-1R)/√2", sup("0L", "1R", -1.0)),
                ("(0R+1L)/√2", sup("0R", "1L", 1.0)),
                ("(0R-1L)/√2", sup("0R", "1L", -1.0)),
            ];
            for (u, uname, explicit) in [(&u1, "SH⊗I", &explicit_d), (&u2, "I⊗SH", &explicit_e)] {
                for (n, (label, psi)) in explicit.iter().enumerate() {
                    out.push(relation(label.to_string(), uname, psi, u, BELL[n]));
                }
            }
        }
    }
    out
}

fn relation(
    basis_state: String,
    uname: &str,
    psi: &[Complex64],
    u: &ComplexMatrix,
    literal: &str,
) -> EprRelation {
    let overlap = |bell: &str| {
        let img = u.mul_vec(&named_state(bell).expect("bell")).expect("4x4");
        inner(psi, &img).norm()
    };
    let literal_overlap = overlap(literal);
    let (matched_partner, matched_overlap) = BELL
        .iter()
        .map(|b| (b.to_string(), overlap(b)))
        .fold((String::new(), -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
    EprRelation {
        basis_state,
        local_unitary: uname.to_string(),
        literal_partner: literal.to_string(),
        literal_overlap,
        matched_partner,
        matched_overlap,
    }
}
