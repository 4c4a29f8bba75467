//! Dense kernels shared by the forward and backward passes. Matrices are
//! row-major and contiguous unless a stride says otherwise.

use crate::Scalar;

pub const RMS_EPS: f64 = 1e-6;

fn beta<T: Scalar>(acc: bool) -> T {
    if acc {
        T::one()
    } else {
        T::zero()
    }
}

/// `C (m×n) [+]= A (m×k) · B (k×n)`.
pub fn matmul<T: Scalar>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize, acc: bool) {
    T::gemm(m, k, n, T::one(), a, k as isize, 1, b, n as isize, 1, beta(acc), c, n as isize, 1);
}

/// `C (m×n) [+]= Aᵀ · B` with `A` stored k×m.
pub fn matmul_tn<T: Scalar>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize, acc: bool) {
    T::gemm(m, k, n, T::one(), a, 1, m as isize, b, n as isize, 1, beta(acc), c, n as isize, 1);
}

/// `C (m×n) [+]= A · Bᵀ` with `B` stored n×k.
pub fn matmul_nt<T: Scalar>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize, acc: bool) {
    T::gemm(m, k, n, T::one(), a, k as isize, 1, b, 1, k as isize, beta(acc), c, n as isize, 1);
}

/// Row-wise `y = x / sqrt(mean(x²) + ε) ⊙ g`; stores the inverse RMS per row.
pub fn rmsnorm<T: Scalar>(x: &[T], g: &[T], y: &mut [T], rinv: &mut [T]) {
    let d = g.len();
    for ((xr, yr), r) in x.chunks_exact(d).zip(y.chunks_exact_mut(d)).zip(rinv.iter_mut()) {
        let ms = xr.iter().map(|&v| v * v).sum::<T>() / T::c(d as f64);
        *r = T::one() / (ms + T::c(RMS_EPS)).sqrt();
        for ((o, &v), &gain) in yr.iter_mut().zip(xr).zip(g) {
            *o = v * *r * gain;
        }
    }
}

/// Adds the input gradient into `dx` and the gain gradient into `dg`.
pub fn rmsnorm_backward<T: Scalar>(x: &[T], g: &[T], rinv: &[T], dy: &[T], dx: &mut [T], dg: &mut [T]) {
    let d = g.len();
    let inv_d = T::one() / T::c(d as f64);
    for (((xr, dyr), dxr), &r) in x.chunks_exact(d).zip(dy.chunks_exact(d)).zip(dx.chunks_exact_mut(d)).zip(rinv) {
        let mut dot = T::zero();
        for j in 0..d {
            dg[j] += dyr[j] * xr[j] * r;
            dot += g[j] * dyr[j] * xr[j];
        }
        let k = dot * r * r * r * inv_d;
        for j in 0..d {
            dxr[j] += r * g[j] * dyr[j] - xr[j] * k;
        }
    }
}

pub fn sigmoid<T: Scalar>(z: T) -> T {
    T::one() / (T::one() + (-z).exp())
}

pub fn swish<T: Scalar>(z: T) -> T {
    z * sigmoid(z)
}

pub fn swish_grad<T: Scalar>(z: T) -> T {
    let s = sigmoid(z);
    s * (T::one() + z * (T::one() - s))
}

/// Gated FFN `(swish(x·Wg) ⊙ (x·Wu))·Wd` added into `out` (n rows).
/// Returns the gate and up projections and their product for the backward pass.
#[allow(clippy::type_complexity, clippy::too_many_arguments)]
pub fn swiglu<T: Scalar>(
    x: &[T],
    wg: &[T],
    wu: &[T],
    wd: &[T],
    out: &mut [T],
    n: usize,
    d: usize,
    f: usize,
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let mut g = vec![T::zero(); n * f];
    let mut u = vec![T::zero(); n * f];
    matmul(x, wg, &mut g, n, d, f, false);
    matmul(x, wu, &mut u, n, d, f, false);
    let h: Vec<T> = g.iter().zip(&u).map(|(&a, &b)| swish(a) * b).collect();
    matmul(&h, wd, out, n, f, d, true);
    (g, u, h)
}

/// Weight gradients are accumulated; the input gradient is returned.
#[allow(clippy::too_many_arguments)]
pub fn swiglu_backward<T: Scalar>(
    x: &[T],
    (g, u, h): (&[T], &[T], &[T]),
    (wg, wu, wd): (&[T], &[T], &[T]),
    dout: &[T],
    (dwg, dwu, dwd): (&mut [T], &mut [T], &mut [T]),
    n: usize,
    d: usize,
    f: usize,
) -> Vec<T> {
    matmul_tn(h, dout, dwd, f, n, d, true);
    let mut dh = vec![T::zero(); n * f];
    matmul_nt(dout, wd, &mut dh, n, d, f, false);
    let mut dg = vec![T::zero(); n * f];
    let mut du = vec![T::zero(); n * f];
    for i in 0..n * f {
        dg[i] = dh[i] * u[i] * swish_grad(g[i]);
        du[i] = dh[i] * swish(g[i]);
    }
    matmul_tn(x, &dg, dwg, d, n, f, true);
    matmul_tn(x, &du, dwu, d, n, f, true);
    let mut dx = vec![T::zero(); n * d];
    matmul_nt(&dg, wg, &mut dx, n, f, d, false);
    matmul_nt(&du, wu, &mut dx, n, f, d, true);
    dx
}

/// Rotary tables: pair j of each head turns by `pos · base^(−2j/d_head)`.
#[derive(Debug, Clone)]
pub struct Rope<T> {
    half: usize,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Scalar> Rope<T> {
    pub fn new(d_head: usize, max_len: usize, base: f64) -> Self {
        let half = d_head / 2;
        let mut cos = Vec::with_capacity(max_len * half);
        let mut sin = Vec::with_capacity(max_len * half);
        for pos in 0..max_len {
            for j in 0..half {
                let theta = base.powf(-2.0 * j as f64 / d_head as f64);
                let angle = pos as f64 * theta;
                cos.push(T::c(angle.cos()));
                sin.push(T::c(angle.sin()));
            }
        }
        Rope { half, cos, sin }
    }

    /// Rotate every head of one row in place; `inverse` applies the transpose.
    pub fn rotate(&self, row: &mut [T], pos: usize, inverse: bool) {
        let base = pos * self.half;
        let (cos, sin) = (&self.cos[base..base + self.half], &self.sin[base..base + self.half]);
        for head in row.chunks_exact_mut(2 * self.half) {
            for j in 0..self.half {
                let (c, s) = (cos[j], if inverse { -sin[j] } else { sin[j] });
                let (a, b) = (head[2 * j], head[2 * j + 1]);
                head[2 * j] = a * c - b * s;
                head[2 * j + 1] = a * s + b * c;
            }
        }
    }
}

/// In-place softmax of the first `live` entries; the rest become 0.
pub fn softmax_prefix<T: Scalar>(row: &mut [T], live: usize) {
    let max = row[..live].iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for v in &mut row[..live] {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in &mut row[..live] {
        *v /= sum;
    }
    row[live..].iter_mut().for_each(|v| *v = T::zero());
}
