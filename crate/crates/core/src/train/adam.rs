use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Adam moments for a flat parameter vector. `t` counts applied updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub config: AdamConfig,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: u64,
}

impl<T: Scalar> Adam<T> {
    pub fn new(n: usize, config: AdamConfig) -> Self {
        Adam { config, m: vec![T::zero(); n], v: vec![T::zero(); n], t: 0 }
    }

    /// One bias-corrected update of `x` along `g` with learning rate `lr`.
    pub fn update(&mut self, x: &mut [T], g: &[T], lr: f64) {
        assert_eq!(x.len(), self.m.len());
        assert_eq!(g.len(), self.m.len());
        self.t += 1;
        let AdamConfig { beta1, beta2, eps } = self.config;
        let (b1, b2) = (T::c(beta1), T::c(beta2));
        let (c1, c2) = (1.0 - beta1.powf(self.t as f64), 1.0 - beta2.powf(self.t as f64));
        let step = T::c(lr / c1);
        let (inv_c2, eps) = (T::c(1.0 / c2), T::c(eps));
        let one = T::one();
        for i in 0..x.len() {
            let gi = g[i];
            self.m[i] = b1 * self.m[i] + (one - b1) * gi;
            self.v[i] = b2 * self.v[i] + (one - b2) * gi * gi;
            x[i] -= step * self.m[i] / ((self.v[i] * inv_c2).sqrt() + eps);
        }
    }
}

/// Scale `g` in place so its L2 norm is at most `max_norm`; returns the
/// norm before clipping.
pub fn clip_grad_norm<T: Scalar>(g: &mut [T], max_norm: f64) -> f64 {
    let norm = g.iter().map(|&x| x.f64() * x.f64()).sum::<f64>().sqrt();
    if norm > max_norm && norm.is_finite() {
        let s = T::c(max_norm / norm);
        g.iter_mut().for_each(|x| *x *= s);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        // bias correction makes the first step ±lr regardless of gradient scale
        let mut a: Adam<f64> = Adam::new(3, AdamConfig::default());
        let mut x = vec![0.0, 0.0, 0.0];
        a.update(&mut x, &[1e-3, -5.0, 0.0], 0.1);
        assert!((x[0] + 0.1).abs() < 1e-5);
        assert!((x[1] - 0.1).abs() < 1e-9);
        assert_eq!(x[2], 0.0);
    }

    #[test]
    fn clipping() {
        let mut g = vec![3.0f64, 4.0];
        assert_eq!(clip_grad_norm(&mut g, 1.0), 5.0);
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
        let mut small = vec![0.3f64, 0.4];
        clip_grad_norm(&mut small, 1.0);
        assert_eq!(small, vec![0.3, 0.4]);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let mut a: Adam<f64> = Adam::new(2, AdamConfig::default());
        let mut x = vec![3.0, -2.0];
        for _ in 0..2000 {
            let g = vec![2.0 * x[0], 20.0 * x[1]];
            a.update(&mut x, &g, 0.05);
        }
        assert!(x[0].abs() < 1e-2 && x[1].abs() < 1e-2, "{x:?}");
    }
}
