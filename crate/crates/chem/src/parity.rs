//! Tolerances for comparing our descriptor values and fingerprint
//! similarities with a reference toolkit.

use crate::descriptors::INTEGER_PROPERTIES;

/// Whether `got` agrees with the reference value `want` for property `name`.
pub fn within(name: &str, got: f64, want: f64) -> bool {
    if INTEGER_PROPERTIES.contains(&name) {
        return got == want;
    }
    match name {
        "MolWt" | "TPSA" | "MolLogP" | "MolMR" => (got - want).abs() <= 0.02,
        "Kappa1" | "Chi0v" | "Chi1v" | "Chi3v" => (got - want).abs() <= 1e-3,
        "Ipc" => (got - want).abs() <= 1e-6 * want.abs().max(1e-12),
        _ => (got - want).abs() <= 1e-6,
    }
}

/// Lowest Spearman correlation accepted between our pairwise Tanimoto
/// similarities and the reference's, for every fingerprint kind.
pub const TANIMOTO_RANK_FLOOR: f64 = 0.8;

/// Ranks from 0 with ties sharing their average rank.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
            end += 1;
        }
        let avg = (k + end) as f64 / 2.0;
        for &i in &idx[k..=end] {
            r[i] = avg;
        }
        k = end + 1;
    }
    r
}

/// Spearman rank correlation; NaN when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (x, y) = (ranks(a), ranks(b));
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, q) in x.iter().zip(&y) {
        sxy += (p - mx) * (q - my);
        sxx += (p - mx) * (p - mx);
        syy += (q - my) * (q - my);
    }
    sxy / (sxx * syy).sqrt()
}
