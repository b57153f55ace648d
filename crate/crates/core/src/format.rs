//! Locale-free number formatting for reports.

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
///
/// Fixed notation is used for magnitudes in `[1e-5, 1e15)`, scientific
/// notation otherwise. Non-finite values print as `inf`, `-inf` or `nan`.
pub fn significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // round first so that 9.9999999999996 lands in the next decade
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return format!("{}e{exp}", trim(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}"))
}

/// Twelve significant digits, the precision used in every table.
pub fn sig12(x: f64) -> String {
    significant(x, 12)
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(60.0693852759), "60.0693852759");
        assert_eq!(sig12(2f64.sqrt()), "1.41421356237");
        assert_eq!(sig12(0.999_999_999_999_9), "1");
        assert_eq!(sig12(-0.25), "-0.25");
        assert_eq!(sig12(1.5e-9), "1.5e-9");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(significant(146.0, 3), "146");
    }
}
