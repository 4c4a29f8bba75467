use super::{cross, dot, norm, scale, sub, unit, Conformer, Point};
use crate::error::ConformerError;
use crate::Scalar;

pub type Mat3<T> = [[T; 3]; 3];

/// `a = u · diag(s) · vᵀ`, singular values descending, `u` and `v` orthogonal.
#[derive(Debug, Clone, Copy)]
pub struct Svd3<T> {
    pub u: Mat3<T>,
    pub s: [T; 3],
    pub v: Mat3<T>,
}

fn col<T: Scalar>(m: &Mat3<T>, j: usize) -> Point<T> {
    [m[0][j], m[1][j], m[2][j]]
}

fn set_col<T: Scalar>(m: &mut Mat3<T>, j: usize, c: Point<T>) {
    (0..3).for_each(|i| m[i][j] = c[i]);
}

/// One-sided Jacobi SVD of a 3×3 matrix.
pub fn svd3<T: Scalar>(a: &Mat3<T>) -> Svd3<T> {
    let (z, o) = (T::zero(), T::one());
    let mut w = *a;
    let mut v = [[o, z, z], [z, o, z], [z, z, o]];
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let (cp, cq) = (col(&w, p), col(&w, q));
            let (alpha, beta, gamma) = (dot(cp, cp), dot(cq, cq), dot(cp, cq));
            if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == z {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (T::c(2.0) * gamma);
            let t = zeta.signum() / (zeta.abs() + (o + zeta * zeta).sqrt());
            let c = o / (o + t * t).sqrt();
            let s = c * t;
            for m in [&mut w, &mut v] {
                for row in m.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order = [0, 1, 2];
    let sing: Vec<T> = (0..3).map(|j| norm(col(&w, j))).collect();
    order.sort_by(|&x, &y| sing[y].partial_cmp(&sing[x]).unwrap());
    let mut u = [[z; 3]; 3];
    let mut vs = [[z; 3]; 3];
    let mut s = [z; 3];
    for (k, &j) in order.iter().enumerate() {
        s[k] = sing[j];
        set_col(&mut vs, k, col(&v, j));
    }
    // left vectors; columns with vanishing singular values are completed
    let tiny = T::c(1e-12) * s[0].max(T::min_positive_value());
    let mut basis: Vec<Point<T>> = Vec::new();
    for k in 0..3 {
        let c = col(&w, order[k]);
        let cand = if s[k] > tiny { scale(c, o / s[k]) } else { complete(&basis) };
        basis.push(cand);
        set_col(&mut u, k, cand);
    }
    Svd3 { u, s, v: vs }
}

fn complete<T: Scalar>(basis: &[Point<T>]) -> Point<T> {
    let (z, o) = (T::zero(), T::one());
    match basis {
        [] => [o, z, z],
        [a] => {
            let e = if a[0].abs() < T::c(0.9) { [o, z, z] } else { [z, o, z] };
            unit(cross(*a, e))
        }
        [a, b, ..] => cross(*a, *b),
    }
}

fn transpose<T: Scalar>(m: &Mat3<T>) -> Mat3<T> {
    let mut t = *m;
    (0..3).for_each(|i| (0..3).for_each(|j| t[i][j] = m[j][i]));
    t
}

fn mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut c = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn det<T: Scalar>(m: &Mat3<T>) -> T {
    dot(col(m, 0), cross(col(m, 1), col(m, 2)))
}

fn apply<T: Scalar>(m: &Mat3<T>, p: Point<T>) -> Point<T> {
    [dot(m[0], p), dot(m[1], p), dot(m[2], p)]
}

fn centroid<T: Scalar>(c: &Conformer<T>) -> Point<T> {
    let n = T::from_usize(c.len()).unwrap();
    let mut s = [T::zero(); 3];
    for p in &c.coords {
        (0..3).for_each(|k| s[k] += p[k]);
    }
    scale(s, T::one() / n)
}

/// Proper rotation `r` minimizing Σ|r·(a_i − ā) − (b_i − b̄)|², from the SVD
/// of the cross-covariance with the reflection fixed by det sign.
pub fn kabsch<T: Scalar>(a: &Conformer<T>, b: &Conformer<T>) -> Result<Mat3<T>, ConformerError> {
    if a.len() != b.len() {
        return Err(ConformerError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(ConformerError::Empty);
    }
    let (ca, cb) = (centroid(a), centroid(b));
    let mut h = [[T::zero(); 3]; 3];
    for (p, q) in a.coords.iter().zip(&b.coords) {
        let (x, y) = (sub(*p, ca), sub(*q, cb));
        (0..3).for_each(|i| (0..3).for_each(|j| h[i][j] += x[i] * y[j]));
    }
    let Svd3 { u, v, .. } = svd3(&h);
    let d = det(&mul(&v, &transpose(&u))).signum();
    let mut vd = v;
    (0..3).for_each(|i| vd[i][2] *= d);
    Ok(mul(&vd, &transpose(&u)))
}

/// Root-mean-square deviation after the optimal rigid superposition of `a` onto `b`.
pub fn rmsd_aligned<T: Scalar>(a: &Conformer<T>, b: &Conformer<T>) -> Result<T, ConformerError> {
    let r = kabsch(a, b)?;
    let (ca, cb) = (centroid(a), centroid(b));
    let mut sum = T::zero();
    for (p, q) in a.coords.iter().zip(&b.coords) {
        let e = sub(apply(&r, sub(*p, ca)), sub(*q, cb));
        sum += dot(e, e);
    }
    Ok((sum / T::from_usize(a.len()).unwrap()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_reconstructs() {
        let a: Mat3<f64> = [[2.0, -1.0, 0.5], [0.3, 4.0, 1.0], [-2.0, 0.0, 0.7]];
        let Svd3 { u, s, v } = svd3(&a);
        let mut us = u;
        (0..3).for_each(|i| (0..3).for_each(|j| us[i][j] *= s[j]));
        let back = mul(&us, &transpose(&v));
        for i in 0..3 {
            for j in 0..3 {
                assert!((back[i][j] - a[i][j]).abs() < 1e-12);
            }
        }
        assert!(s[0] >= s[1] && s[1] >= s[2]);
    }

    #[test]
    fn svd_rank_deficient() {
        let a: Mat3<f64> = [[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 0.0]];
        let Svd3 { u, s, .. } = svd3(&a);
        assert!(s[1].abs() < 1e-12 && s[2].abs() < 1e-12);
        let utu = mul(&transpose(&u), &u);
        for i in 0..3 {
            for j in 0..3 {
                assert!((utu[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_points() {
        // centered points ±1 vs ±1 along another axis: any rotation aligns, rmsd 0
        let a: Conformer<f64> = Conformer::new(vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let b = Conformer::new(vec![[0.0, -1.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!(rmsd_aligned(&a, &b).unwrap() < 1e-12);
        // different spans: half-lengths 1 and 2 leave 1 Å per point
        let c = Conformer::new(vec![[0.0, -2.0, 0.0], [0.0, 2.0, 0.0]]);
        assert!((rmsd_aligned(&a, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_image_is_not_superposable() {
        let a: Conformer<f64> = Conformer::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let b = a.map(|p| [p[0], p[1], -p[2]]);
        assert!(rmsd_aligned(&a, &b).unwrap() > 0.1);
        assert!(rmsd_aligned(&a, &a).unwrap() < 1e-12);
        assert!(rmsd_aligned(&a, &Conformer::new(vec![[0.0; 3]])).is_err());
    }
}
