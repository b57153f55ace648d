use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{QstError, Result};
use crate::numerics::kron_vec;

/// Canonical names of the eight maximally entangled two-qubit states.
pub const NAMED_TWO_QUBIT_STATES: [&str; 8] = [
    "Φ+", "Φ-", "Ψ+", "Ψ-", "Φ̄+", "Φ̄-", "Ψ̄+", "Ψ̄-",
];

const COMBINING_MACRON: char = '\u{0304}';

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit state for one of `0 1 + - R L` (upper/lower case accepted
/// for the circular states).
pub fn qubit_state(symbol: char) -> Result<Vec<Complex64>> {
    let h = FRAC_1_SQRT_2;
    Ok(match symbol {
        '0' | 'H' => vec![c(1.0, 0.0), c(0.0, 0.0)],
        '1' | 'V' => vec![c(0.0, 0.0), c(1.0, 0.0)],
        '+' | 'D' => vec![c(h, 0.0), c(h, 0.0)],
        '-' | 'A' => vec![c(h, 0.0), c(-h, 0.0)],
        'R' | 'r' => vec![c(h, 0.0), c(0.0, -h)],
        'L' | 'l' => vec![c(h, 0.0), c(0.0, h)],
        other => return Err(QstError::UnknownState(other.to_string())),
    })
}

/// Normalizes typographic variants: Unicode minus and superscript signs,
/// ket brackets and surrounding whitespace.
fn canonical(name: &str) -> String {
    let trimmed = name.trim();
    let trimmed = trimmed.strip_prefix('|').unwrap_or(trimmed);
    let trimmed = trimmed
        .strip_suffix('⟩')
        .or_else(|| trimmed.strip_suffix('>'))
        .unwrap_or(trimmed);
    trimmed
        .chars()
        .map(|ch| match ch {
            '−' | '⁻' | '–' => '-',
            '⁺' => '+',
            other => other,
        })
        .collect()
}

fn bell(family: &str, bar: bool, sign: char) -> Option<Vec<Complex64>> {
    let h = FRAC_1_SQRT_2;
    let s = match sign {
        '+' => 1.0,
        '-' => -1.0,
        _ => return None,
    };
    // second term picks up a factor i for the barred states
    let second = if bar { c(0.0, s * h) } else { c(s * h, 0.0) };
    let z = c(0.0, 0.0);
    match family {
        "phi" => Some(vec![c(h, 0.0), z, z, second]),
        "psi" => Some(vec![z, c(h, 0.0), second, z]),
        _ => None,
    }
}

fn parse_bell(name: &str) -> Option<Vec<Complex64>> {
    let sign = name.chars().last()?;
    let stem: String = name[..name.len() - sign.len_utf8()].to_string();
    let bar = stem.contains(COMBINING_MACRON) || stem.to_lowercase().contains("bar");
    let stem: String = stem
        .chars()
        .filter(|&ch| ch != COMBINING_MACRON)
        .collect::<String>()
        .to_lowercase()
        .replace("bar", "")
        .replace('_', "");
    let family = match stem.as_str() {
        "phi" | "φ" => "phi",
        "psi" | "ψ" => "psi",
        _ => return None,
    };
    bell(family, bar, sign)
}

/// State vector for a qubit symbol, a product of qubit symbols (`"0+"`,
/// `"R1"`, `"+-L"`), or a Bell / Bell-like state (`"Φ+"`, `"psi-"`,
/// `"Ψ̄+"`, `"phibar-"`).
///
/// ```
/// use qst::states::named_state;
/// let phi = named_state("Φ+").unwrap();
/// assert!((phi[0].re - phi[3].re).abs() < 1e-15);
/// assert!(named_state("phi+").unwrap() == phi);
/// ```
pub fn named_state(name: &str) -> Result<Vec<Complex64>> {
    let key = canonical(name);
    if key.is_empty() {
        return Err(QstError::UnknownState(name.to_string()));
    }
    if let Some(v) = parse_bell(&key) {
        return Ok(v);
    }
    let mut out: Option<Vec<Complex64>> = None;
    for ch in key.chars() {
        let q = qubit_state(ch).map_err(|_| QstError::UnknownState(name.to_string()))?;
        out = Some(match out {
            None => q,
            Some(acc) => kron_vec(&acc, &q),
        });
    }
    out.ok_or_else(|| QstError::UnknownState(name.to_string()))
}
