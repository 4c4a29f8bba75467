use super::{InternalConformer, Record};
use crate::error::ConformerError;
use crate::Scalar;

fn tidy(s: String) -> String {
    // "-0.0" and friends print as their positive form
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Degrees with one decimal; −180.0 folds onto 180.0.
pub fn format_angle<T: Scalar>(deg: T) -> String {
    let s = tidy(format!("{:.1}", deg.f64()));
    if s == "-180.0" {
        "180.0".to_string()
    } else {
        s
    }
}

/// Ångström with three decimals.
pub fn format_distance<T: Scalar>(d: T) -> String {
    tidy(format!("{:.3}", d.f64()))
}

/// Text form of every record, in record value order.
pub fn quantize_internal<T: Scalar>(ic: &InternalConformer<T>) -> Vec<Vec<String>> {
    ic.records
        .iter()
        .map(|r| match *r {
            Record::First => vec![],
            Record::Second { d } => vec![format_distance(d)],
            Record::Third { d, alpha } => vec![format_distance(d), format_angle(alpha)],
            Record::Full { alpha, beta, d } => vec![format_angle(alpha), format_angle(beta), format_distance(d)],
        })
        .collect()
}

pub fn dequantize_internal<T: Scalar>(text: &[Vec<String>]) -> Result<InternalConformer<T>, ConformerError> {
    let mut records = Vec::with_capacity(text.len());
    for (i, fields) in text.iter().enumerate() {
        let values = fields
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()).map(T::c))
            .collect::<Option<Vec<T>>>()
            .ok_or(ConformerError::BadRecord { index: i, reason: "unparseable number" })?;
        let r = Record::from_values(i, &values)
            .ok_or(ConformerError::BadRecord { index: i, reason: "wrong number of values" })?;
        records.push(r);
    }
    let degenerate = vec![false; records.len()];
    Ok(InternalConformer { records, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_rule() {
        assert_eq!(format_angle(90.04), "90.0");
        assert_eq!(format_angle(0.0), "0.0");
        assert_eq!(format_distance(1.0004), "1.000");
        assert_eq!(format_angle(-0.04), "0.0");
        assert_eq!(format_angle(-179.96), "180.0");
        assert_eq!(format_angle(-12.25), "-12.2");
    }

    #[test]
    fn requantize_is_fixed_point() {
        let ic = InternalConformer {
            records: vec![
                Record::First,
                Record::Second { d: 1.52341 },
                Record::Third { d: 1.4, alpha: 109.4712 },
                Record::Full { alpha: 120.05, beta: -60.0449, d: 1.33333 },
            ],
            degenerate: vec![false; 4],
        };
        let q = quantize_internal(&ic);
        let back: InternalConformer<f64> = dequantize_internal(&q).unwrap();
        assert_eq!(quantize_internal(&back), q);
        for (a, b) in ic.records.iter().zip(&back.records) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 0.05 + 1e-12);
            }
        }
    }

    #[test]
    fn malformed_text() {
        let bad = vec![vec![], vec!["1.0".to_string(), "2.0".to_string()]];
        assert!(dequantize_internal::<f64>(&bad).is_err());
        assert!(dequantize_internal::<f64>(&[vec!["x".to_string()]]).is_err());
    }
}
