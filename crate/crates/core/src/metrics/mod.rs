//! Correlation, relative difference and line fits, plus reports over
//! generated molecules.

mod report;

pub use report::{
    eval_generation, plot_csv, ConditionReport, Constraints, EvalReport, GeneratedOutput, GenerationReport, OutputRecord,
};

use crate::error::MetricError;

fn check_lengths(xs: &[f64], ys: &[f64]) -> Result<(), MetricError> {
    if xs.len() != ys.len() {
        return Err(MetricError::LengthMismatch(xs.len(), ys.len()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation. Zero variance on either side is an error,
/// never a silent 0.
pub fn pearsonr(xs: &[f64], ys: &[f64]) -> Result<f64, MetricError> {
    check_lengths(xs, ys)?;
    if xs.len() < 2 {
        return Err(MetricError::TooFew(2));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    // the 1/(n−1) factors cancel
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mean of |p − t| / (|p| + |t|); a pair of zeros contributes 0.
pub fn pct_difference(preds: &[f64], truths: &[f64]) -> Result<f64, MetricError> {
    check_lengths(preds, truths)?;
    if preds.is_empty() {
        return Err(MetricError::TooFew(1));
    }
    let total: f64 = preds
        .iter()
        .zip(truths)
        .map(|(&p, &t)| {
            let den = p.abs() + t.abs();
            if den == 0.0 {
                0.0
            } else {
                (p - t).abs() / den
            }
        })
        .sum();
    Ok(total / preds.len() as f64)
}

/// Least-squares line through `points`, returned as (slope, intercept).
pub fn fit_degree_one(points: &[(f64, f64)]) -> Result<(f64, f64), MetricError> {
    if points.len() < 2 {
        return Err(MetricError::TooFew(2));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(MetricError::DegenerateX);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
