//! Locale-independent float formatting for CSV output.

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-4 ≤ |x| < 1e17`. Negative zero
/// prints as `0`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if x < 0.0 { "-" } else { "" };

    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let mut out = format!("{sign}{}", &digits[..1]);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        let esign = if exp < 0 { '-' } else { '+' };
        out.push_str(&format!("e{esign}{:02}", exp.abs()));
        return out;
    }

    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        ("0".to_string(), format!("{zeros}{digits}"))
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_g17;

    #[test]
    fn matches_printf_g17() {
        // reference strings from printf("%.17g")
        let cases: &[(f64, &str)] = &[
            (0.5, "0.5"),
            (-0.5, "-0.5"),
            (1.0 / 3.0, "0.33333333333333331"),
            (-1.0 / 3.0, "-0.33333333333333331"),
            (60.0, "60"),
            (-1.0, "-1"),
            (-0.0, "0"),
            (1e-20, "9.9999999999999995e-21"),
            (1e20, "1e+20"),
            (123456.789, "123456.789"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (2.0 * std::f64::consts::SQRT_2, "2.8284271247461903"),
            (0.75f64.sqrt(), "0.8660254037844386"),
            (1e16, "10000000000000000"),
            (1e17, "1e+17"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(*x), *want, "{x:e}");
        }
    }
}
