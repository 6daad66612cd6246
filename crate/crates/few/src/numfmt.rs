//! Locale-free `%g`-style formatting with six significant digits.

pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // rounding to 6 digits first settles the exponent (0.9999996 -> 1e0)
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.5773502691896258, "0.57735"),
            (-0.28867513459481287, "-0.288675"),
            (0.25, "0.25"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.00012345678, "0.000123457"),
            (0.000012345678, "1.23457e-05"),
            (0.9999996, "1"),
            (99999.95, "99999.9"),
            (999999.6, "1e+06"),
            (7.0, "7"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(sig6(x), want, "{x}");
        }
    }
}
