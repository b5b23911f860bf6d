//! Decimal formatting of reals for tabular output.

/// Significant digits written for every real.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` in plain decimal notation with at most
/// [`SIGNIFICANT_DIGITS`] significant digits, rounding half away from zero
/// and dropping trailing zeros.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }

    let (mut digits, mut exponent) = decimal_digits(x.abs());
    // Round on the first dropped digit; a tail of exactly one half rounds
    // up, which is away from zero on the magnitude.
    let round_up = digits[SIGNIFICANT_DIGITS] >= 5;
    digits.truncate(SIGNIFICANT_DIGITS);
    if round_up {
        let mut i = SIGNIFICANT_DIGITS;
        loop {
            if i == 0 {
                digits.insert(0, 1);
                digits.truncate(SIGNIFICANT_DIGITS);
                exponent += 1;
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }

    let mut out = String::new();
    if x < 0.0 {
        out.push('-');
    }
    let ascii = |d: &u8| char::from(b'0' + d);
    if exponent < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exponent - 1) as usize));
        out.extend(digits.iter().map(ascii));
    } else {
        let int_len = exponent as usize + 1;
        if int_len >= digits.len() {
            out.extend(digits.iter().map(ascii));
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.extend(digits[..int_len].iter().map(ascii));
            out.push('.');
            out.extend(digits[int_len..].iter().map(ascii));
        }
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

/// Decimal digits of a positive finite `x` (at least
/// `SIGNIFICANT_DIGITS + 1` of them, enough to decide rounding) and the
/// base-10 exponent of the first digit.
fn decimal_digits(x: f64) -> (Vec<u8>, i32) {
    const PROBE: usize = 17;
    let probe = scientific_digits(x, PROBE - 1);
    // The rounded 17-digit probe can only mislead when the dropped tail
    // looks like an exact half; fall back to the exact expansion then.
    let tail = &probe.0[SIGNIFICANT_DIGITS..];
    if tail[0] == 5 && tail[1..].iter().all(|&d| d == 0) {
        scientific_digits(x, 800)
    } else {
        probe
    }
}

fn scientific_digits(x: f64, fraction_digits: usize) -> (Vec<u8>, i32) {
    let s = format!("{x:.fraction_digits$e}");
    let (mantissa, exponent) = s.split_once('e').expect("scientific notation");
    let digits = mantissa
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();
    (digits, exponent.parse().expect("integer exponent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_values() {
        assert_eq!(format_real(0.37), "0.37");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-2.5), "-2.5");
        assert_eq!(format_real(176833.08715041287), "176833.08715");
        assert_eq!(format_real(0.0004992511233150275), "0.000499251123315");
        assert_eq!(format_real(1e20), "100000000000000000000");
        assert_eq!(format_real(0.0), "0");
    }

    #[test]
    fn rounds_half_away_from_zero() {
        // Exact binary ties at the 13th significant digit.
        assert_eq!(format_real(274877906943.5), "274877906944");
        assert_eq!(format_real(-274877906943.5), "-274877906944");
        assert_eq!(format_real(274877906942.5), "274877906943");
        // Looks like a tie in decimal, but the binary value is just below it.
        assert_eq!(format_real(0.1234567890125), "0.123456789012");
    }

    #[test]
    fn carry_propagates_into_new_digit() {
        assert_eq!(format_real(9.9999999999996), "10");
        assert_eq!(format_real(0.99999999999996), "1");
    }

    proptest! {
        #[test]
        fn twelve_digit_round_trip(x in -1e9f64..1e9) {
            let back: f64 = format_real(x).parse().unwrap();
            let tol = x.abs() * 1e-11 + 1e-300;
            prop_assert!((back - x).abs() <= tol, "{x} -> {back}");
        }
    }
}
