use std::path::PathBuf;

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spoke_core::conformer::{
    decode_conformer, dequantize_internal, encode_conformer, quantize_internal, read_conformer_jsonl, rmsd_aligned,
    Conformer, Record,
};

type C = Conformer<f64>;

fn v(p: [f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn sin_angle(a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>) -> f64 {
    let (u, w) = (a - b, c - b);
    u.cross(&w).norm() / (u.norm() * w.norm())
}

/// Random walk with bond lengths 1–2 Å that keeps every consecutive triple
/// well away from collinear.
fn random_chain(rng: &mut impl Rng, n: usize) -> C {
    let mut pts: Vec<Vector3<f64>> = vec![Vector3::zeros()];
    while pts.len() < n {
        let dir = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if dir.norm() < 0.1 {
            continue;
        }
        let next = pts.last().unwrap() + dir.normalize() * rng.random_range(1.0..2.0);
        let k = pts.len();
        if k >= 2 && sin_angle(pts[k - 2], pts[k - 1], next) < 0.1 {
            continue;
        }
        pts.push(next);
    }
    Conformer::new(pts.iter().map(|p| [p.x, p.y, p.z]).collect())
}

/// Scattered points in a 10 Å box, same non-degeneracy rule.
fn random_cloud(rng: &mut impl Rng, n: usize) -> C {
    let mut pts: Vec<Vector3<f64>> = Vec::new();
    while pts.len() < n {
        let p = Vector3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let k = pts.len();
        if k >= 1 && (p - pts[k - 1]).norm() < 0.5 {
            continue;
        }
        if k >= 2 && sin_angle(pts[k - 2], pts[k - 1], p) < 0.1 {
            continue;
        }
        pts.push(p);
    }
    Conformer::new(pts.iter().map(|p| [p.x, p.y, p.z]).collect())
}

fn random_motion(rng: &mut impl Rng, c: &C) -> C {
    let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let r = Rotation3::from_scaled_axis(axis.normalize() * rng.random_range(0.0..std::f64::consts::PI));
    let t = Vector3::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
    c.map(|p| {
        let q = r * v(p) + t;
        [q.x, q.y, q.z]
    })
}

/// Independent superposition: nalgebra SVD of the covariance.
fn oracle_rmsd(a: &C, b: &C) -> f64 {
    let n = a.len() as f64;
    let ca: Vector3<f64> = a.coords.iter().map(|&p| v(p)).sum::<Vector3<f64>>() / n;
    let cb: Vector3<f64> = b.coords.iter().map(|&p| v(p)).sum::<Vector3<f64>>() / n;
    let mut h = Matrix3::zeros();
    for (p, q) in a.coords.iter().zip(&b.coords) {
        h += (v(*p) - ca) * (v(*q) - cb).transpose();
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (vt.transpose() * u.transpose()).determinant().signum();
    let r = vt.transpose() * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let sum: f64 = a.coords.iter().zip(&b.coords).map(|(p, q)| (r * (v(*p) - ca) - (v(*q) - cb)).norm_squared()).sum();
    (sum / n).sqrt()
}

#[test]
fn roundtrip_and_rigid_invariance_on_random_conformers() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_rmsd: f64 = 0.0;
    let mut worst_motion: f64 = 0.0;
    for k in 0..1000 {
        let n = rng.random_range(1..=64);
        let c = if k % 2 == 0 { random_chain(&mut rng, n) } else { random_cloud(&mut rng, n) };
        let ic = encode_conformer(&c).unwrap();
        assert!(!ic.any_degenerate());
        let back = decode_conformer(&ic).unwrap();
        worst_rmsd = worst_rmsd.max(rmsd_aligned(&back, &c).unwrap());

        let moved = encode_conformer(&random_motion(&mut rng, &c)).unwrap();
        for (x, y) in ic.records.iter().zip(&moved.records) {
            for (a, b) in x.values().iter().zip(y.values()) {
                // β near ±180 may wrap
                let e = (a - b).abs();
                let diff = e.min(360.0 - e);
                worst_motion = worst_motion.max(diff);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!("worst round-trip rmsd {worst_rmsd:.2e}, worst motion drift {worst_motion:.2e}, {secs:.2} s");
    assert!(worst_rmsd < 1e-6);
    assert!(worst_motion < 1e-9);
    assert!(secs < 30.0);
}

#[test]
fn translation_by_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_chain(&mut rng, 12);
    let shifted = c.map(|p| [p[0] + 5.0, p[1] + 5.0, p[2] + 5.0]);
    let (a, b) = (encode_conformer(&c).unwrap(), encode_conformer(&shifted).unwrap());
    for (x, y) in a.records.iter().zip(&b.records) {
        for (p, q) in x.values().iter().zip(y.values()) {
            assert!((p - q).abs() < 1e-9);
        }
    }
}

#[test]
fn mirror_flips_dihedral_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let c = random_chain(&mut rng, 10);
        let m = c.map(|p| [p[0], p[1], -p[2]]);
        let (a, b) = (encode_conformer(&c).unwrap(), encode_conformer(&m).unwrap());
        for (x, y) in a.records.iter().zip(&b.records) {
            if let (Record::Full { beta: b1, alpha: a1, .. }, Record::Full { beta: b2, alpha: a2, .. }) = (x, y) {
                assert!((a1 - a2).abs() < 1e-9);
                if b1.abs() < 179.999 {
                    assert!((b1 + b2).abs() < 1e-9, "{b1} {b2}");
                }
            }
        }
    }
}

#[test]
fn rmsd_matches_independent_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let n = rng.random_range(1..30);
        let a = random_cloud(&mut rng, n);
        // a noisy moved copy, and an unrelated cloud
        let moved = random_motion(&mut rng, &a);
        let b = Conformer::new(moved.coords.iter().map(|p| [p[0] + rng.random_range(-0.3..0.3), p[1], p[2]]).collect());
        let c = random_cloud(&mut rng, n);
        for other in [&b, &c] {
            let (ours, theirs) = (rmsd_aligned(&a, other).unwrap(), oracle_rmsd(&a, other));
            assert!((ours - theirs).abs() < 1e-9, "{ours} vs {theirs}");
        }
        assert!(rmsd_aligned(&a, &random_motion(&mut rng, &a)).unwrap() < 1e-9);
    }
}

#[test]
fn planar_molecules_align() {
    // flat point sets make the covariance rank deficient
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n = rng.random_range(3..15);
        let a = random_cloud(&mut rng, n).map(|p| [p[0], p[1], 0.0]);
        let b = random_motion(&mut rng, &a);
        assert!(rmsd_aligned(&a, &b).unwrap() < 1e-9);
    }
}

#[test]
fn quantized_roundtrip_on_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let c = random_chain(&mut rng, 10);
        let q = quantize_internal(&encode_conformer(&c).unwrap());
        let back = decode_conformer(&dequantize_internal::<f64>(&q).unwrap()).unwrap();
        worst = worst.max(rmsd_aligned(&back, &c).unwrap());
        assert_eq!(quantize_internal(&encode_conformer(&back).unwrap()), q);
    }
    println!("worst quantized rmsd {worst:.4}");
    assert!(worst <= 0.05);
}

#[test]
fn sample_conformers_roundtrip() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/conformers/sample.jsonl");
    let recs = read_conformer_jsonl(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(recs.len(), 300);
    let mut degenerate = 0;
    for r in &recs {
        let g = spoke_chem::parse_smiles(&r.smiles).unwrap();
        assert_eq!(g.atom_count(), r.coords.len(), "{}", r.smiles);
        let c: C = r.conformer();
        let ic = encode_conformer(&c).unwrap();
        if ic.any_degenerate() {
            degenerate += 1;
            continue;
        }
        assert!(rmsd_aligned(&decode_conformer(&ic).unwrap(), &c).unwrap() < 1e-6, "{}", r.smiles);
    }
    println!("{degenerate} of {} sample conformers have collinear predecessors", recs.len());
}
