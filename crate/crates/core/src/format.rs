//! Locale-independent number formatting for CSV output.

/// Formats `x` like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// dropped, exponent form outside `1e-4 <= |x| < 10^sig`. Negative zero prints as `0`.
pub fn general(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// [`general`] with 12 significant digits.
pub fn csv_number(x: f64) -> String {
    general(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (-0.25, "-0.25"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (0.1 + 0.2, "0.3"),
            (123456.789, "123456.789"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (0.0001234, "0.0001234"),
            (1e12, "1e+12"),
            (999999999999.0, "999999999999"),
            (2.0 - std::f64::consts::SQRT_2, "0.585786437627"),
        ];
        for (x, want) in cases {
            assert_eq!(csv_number(x), want, "{x:e}");
        }
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(general(9.9999999999999e-6, 12), "1e-05");
        assert_eq!(general(0.99999999999999, 12), "1");
        assert_eq!(general(9.96, 2), "10");
    }
}
