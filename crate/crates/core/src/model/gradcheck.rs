use super::params::Params;
use super::transformer::Transformer;
use crate::error::ModelError;

/// Gradients below this magnitude on both sides count as zero: they are
/// reported, and compared by absolute difference only.
pub const ZERO_GRAD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCheck {
    pub name: String,
    pub checked: usize,
    /// Largest |analytic − numeric| / max(|analytic|, |numeric|) over
    /// entries that are not both zero.
    pub max_rel: f64,
    pub max_abs: f64,
    /// Entries whose analytic and numeric gradients are both ≈ 0.
    pub zero: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradReport {
    pub blocks: Vec<BlockCheck>,
}

impl GradReport {
    pub fn max_rel(&self) -> f64 {
        self.blocks.iter().map(|b| b.max_rel).fold(0.0, f64::max)
    }
}

/// Compare the analytic gradient of the mean masked loss with central
/// differences of step `h`. `stride` > 1 checks every stride-th entry.
pub fn gradient_check(
    model: &Transformer<f64>,
    batch: &[(&[usize], &[bool])],
    h: f64,
    stride: usize,
) -> Result<GradReport, ModelError> {
    let mut grads = Params::zeros(model.params.layout.clone());
    model.loss_and_grad(batch, &mut grads)?;
    let mut probe = model.clone();
    let mut blocks = Vec::new();
    for (bi, info) in model.params.layout.blocks.iter().enumerate() {
        let mut check = BlockCheck { name: info.name.clone(), checked: 0, max_rel: 0.0, max_abs: 0.0, zero: 0 };
        for j in (0..info.len()).step_by(stride.max(1)) {
            let idx = info.offset + j;
            let x0 = probe.params.data[idx];
            probe.params.data[idx] = x0 + h;
            let up = probe.loss(batch)?.mean();
            probe.params.data[idx] = x0 - h;
            let down = probe.loss(batch)?.mean();
            probe.params.data[idx] = x0;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.block(bi)[j];
            let diff = (analytic - numeric).abs();
            let scale = analytic.abs().max(numeric.abs());
            check.checked += 1;
            check.max_abs = check.max_abs.max(diff);
            if scale < ZERO_GRAD {
                check.zero += 1;
            } else {
                check.max_rel = check.max_rel.max(diff / scale);
            }
        }
        blocks.push(check);
    }
    Ok(GradReport { blocks })
}
