//! Characteristic polynomial by the Faddeev-LeVerrier recurrence.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::graph::MolGraph;

/// Coefficients `c[0..=n]` of `det(xI - A)` with `c[n] = 1`, where `c[k]`
/// multiplies `x^k`. Division in the recurrence is exact for integer
/// matrices, so `T = BigInt` gives exact results.
pub fn characteristic_polynomial<T>(a: &[Vec<T>]) -> Vec<T>
where
    T: Num + Clone + FromPrimitive,
{
    let n = a.len();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    // m holds M_k; start from M_0 = 0 so that M_1 = I.
    let mut m = vec![vec![T::zero(); n]; n];
    for k in 1..=n {
        let c_prev = coeffs[n - k + 1].clone();
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].clone() + c_prev.clone();
        }
        m = next;
        let am = matmul(a, &m);
        let trace = (0..n).fold(T::zero(), |acc, i| acc + am[i][i].clone());
        let kk = T::from_usize(k).expect("dimension fits the scalar type");
        coeffs[n - k] = T::zero() - trace / kk;
    }
    coeffs
}

fn matmul<T: Num + Clone>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j].clone() + a[i][k].clone() * b[k][j].clone();
            }
        }
    }
    out
}

/// Information content of the characteristic-polynomial coefficients of the
/// heavy-atom adjacency matrix: `sum(|c|) * H(|c| / sum(|c|))`, entropy in bits.
pub(crate) fn ipc(g: &MolGraph) -> f64 {
    let heavy: Vec<usize> = (0..g.atom_count()).filter(|&i| g.atom(i).atomic_number() > 1).collect();
    let mut index = vec![usize::MAX; g.atom_count()];
    for (k, &i) in heavy.iter().enumerate() {
        index[i] = k;
    }
    let n = heavy.len();
    let mut adj = vec![vec![BigInt::from(0); n]; n];
    for b in g.bonds() {
        let (x, y) = (index[b.a], index[b.b]);
        if x != usize::MAX && y != usize::MAX {
            adj[x][y] = BigInt::from(1);
            adj[y][x] = BigInt::from(1);
        }
    }
    let coeffs: Vec<f64> = characteristic_polynomial(&adj)
        .iter()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .collect();
    let total: f64 = coeffs.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let entropy: f64 = coeffs
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum();
    total * entropy
}
