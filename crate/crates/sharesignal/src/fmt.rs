//! Plain-decimal number formatting for CSV and text output.

/// Formats `v` rounded to `digits` significant digits in plain decimal
/// notation, without trailing zeros.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1) as i32;
    // Round in scientific notation first so the exponent reflects carries.
    let sci = format!("{:.*e}", (digits - 1) as usize, v);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    let decimals = (digits - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("valid float");
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Fixed decimals. Small negative values keep their sign (`-0.000`).
pub fn fmt_fixed(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.02, 10), "0.02");
        assert_eq!(fmt_sig(1.0 / 3.0, 10), "0.3333333333");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1e-5, 4), "0.000006667");
        assert_eq!(fmt_sig(123456.789, 4), "123500");
        assert_eq!(fmt_sig(9.99999999999, 10), "10");
        assert_eq!(fmt_sig(-0.0953101798043249, 15), "-0.0953101798043249");
        assert_eq!(fmt_sig(0.0, 15), "0");
    }

    #[test]
    fn fixed() {
        assert_eq!(fmt_fixed(-1.2684, 3), "-1.268");
        assert_eq!(fmt_fixed(-0.0001, 3), "-0.000");
    }
}
