//! Four-significant-digit value text, one token per character.

use crate::error::ValueError;

pub const NUMERIC_CHARS: [&str; 13] = ["0", "1", "2", "3", "4", "5", "6", "7", "8", "9", ".", "-", "e"];

/// Canonical text of `v`: 4 significant digits, shortest form, scientific
/// notation when the rounded magnitude is ≥ 1e6 or below 1e-4.
pub fn canonical_value(v: f64) -> Result<String, ValueError> {
    if !v.is_finite() {
        return Err(ValueError::NonFinite);
    }
    if v == 0.0 {
        return Ok("0".into());
    }
    let sci = format!("{:.3e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let n = digits.len() as i32;

    let body = if !(-4..6).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    } else if exp >= n - 1 {
        format!("{digits}{}", "0".repeat((exp - n + 1) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    Ok(if v < 0.0 { format!("-{body}") } else { body })
}

pub fn encode_value(v: f64) -> Result<Vec<String>, ValueError> {
    Ok(canonical_value(v)?.chars().map(String::from).collect())
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Strict inverse of [`encode_value`]: `-?D(.D)?(e-?D)?`.
pub fn decode_value<S: AsRef<str>>(tokens: &[S]) -> Result<f64, ValueError> {
    let text: String = tokens.iter().map(AsRef::as_ref).collect();
    let bad = || ValueError::Malformed(text.clone());
    let unsigned = text.strip_prefix('-').unwrap_or(&text);
    let (mantissa, exp) = match unsigned.split_once('e') {
        Some((m, e)) => (m, Some(e)),
        None => (unsigned, None),
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((i, f)) => digits(i) && digits(f),
        None => digits(mantissa),
    };
    let exp_ok = exp.map_or(true, |e| digits(e.strip_prefix('-').unwrap_or(e)));
    if !mantissa_ok || !exp_ok {
        return Err(bad());
    }
    text.parse::<f64>().map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(v: f64) -> String {
        canonical_value(v).unwrap()
    }

    #[test]
    fn formats() {
        assert_eq!(canon(0.0), "0");
        assert_eq!(canon(-0.0), "0");
        assert_eq!(canon(46.069), "46.07");
        assert_eq!(canon(-0.00002), "-2e-5");
        assert_eq!(canon(1.0), "1");
        assert_eq!(canon(123456.7), "123500");
        assert_eq!(canon(1234567.0), "1.235e6");
        assert_eq!(canon(0.00012346), "0.0001235");
        assert_eq!(canon(0.5), "0.5");
        assert_eq!(canon(9999.6), "10000");
        assert_eq!(canon(999999.7), "1e6");
        assert_eq!(canon(-12.0), "-12");
        assert_eq!(encode_value(46.069).unwrap(), ["4", "6", ".", "0", "7"]);
        assert!(canonical_value(f64::NAN).is_err());
    }

    #[test]
    fn parses() {
        assert_eq!(decode_value(&["4", "6", ".", "0", "7"]).unwrap(), 46.07);
        assert_eq!(decode_value(&["-", "2", "e", "-", "5"]).unwrap(), -2e-5);
        for bad in ["4.", ".5", "-", "", "1e", "1.2.3", "e5", "--1", "1e5.0"] {
            let toks: Vec<String> = bad.chars().map(String::from).collect();
            assert!(decode_value(&toks).is_err(), "{bad}");
        }
    }
}
