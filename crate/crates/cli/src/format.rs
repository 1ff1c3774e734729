//! Decimal output with 12 significant digits.

/// Significant digits of every printed number.
pub const DIGITS: usize = 12;

/// Rounds to [`DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

/// `x` with [`DIGITS`] significant digits in positional notation, switching
/// to an exponent only for very large or very small magnitudes.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", DIGITS - 1, 0.0);
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{:.*e}", DIGITS - 1, x);
    // rounding may carry into the next decade
    let exp = sci.split('e').nth(1).and_then(|e| e.parse::<i32>().ok()).unwrap_or(exp);
    if (-6..15).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(0.5), "0.500000000000");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-123.456), "-123.456000000");
        assert_eq!(fmt_num(9.9999999999999), "10.0000000000");
        assert_eq!(fmt_num(1.5e-20), "1.50000000000e-20");
        assert_eq!(fmt_num(0.0), "0.00000000000");
        assert_eq!(round_sig(0.1234567890123456), 0.123456789012);
    }
}
