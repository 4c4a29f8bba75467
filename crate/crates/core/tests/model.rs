use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spoke_core::model::gradcheck::gradient_check;
use spoke_core::model::ops::{rmsnorm, rmsnorm_backward, swiglu, swiglu_backward, Rope};
use spoke_core::model::{ModelConfig, Params, Transformer};

fn tiny(seed: u64) -> Transformer<f64> {
    Transformer::new(ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Move the model away from the init scale so that no gradient entry is
/// tiny enough to drown in finite-difference rounding.
fn perturbed(seed: u64) -> Transformer<f64> {
    let mut m = tiny(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
    for i in 0..m.params.layout.blocks.len() {
        let norm = m.params.layout.is_norm(i);
        for x in m.params.block_mut(i) {
            *x = if norm { rng.random_range(0.5..1.5) } else { rng.random_range(-0.3..0.3) };
        }
    }
    m
}

fn random_batch(rng: &mut impl Rng, lens: &[usize], vocab: usize) -> Vec<(Vec<usize>, Vec<bool>)> {
    lens.iter()
        .map(|&n| {
            let ids: Vec<usize> = (0..n).map(|_| rng.random_range(0..vocab)).collect();
            let mask: Vec<bool> = (0..n).map(|t| t > 0 && rng.random_bool(0.7)).collect();
            let mut mask = mask;
            mask[n - 1] = true;
            (ids, mask)
        })
        .collect()
}

fn as_refs(b: &[(Vec<usize>, Vec<bool>)]) -> Vec<(&[usize], &[bool])> {
    b.iter().map(|(i, m)| (i.as_slice(), m.as_slice())).collect()
}

#[test]
fn gradient_fidelity_every_block() {
    let start = std::time::Instant::now();
    let model = perturbed(1);
    let batch = random_batch(&mut ChaCha8Rng::seed_from_u64(2), &[11, 7, 4], 50);
    let report = gradient_check(&model, &as_refs(&batch), 1e-5, 1).unwrap();
    for b in &report.blocks {
        println!("{:<18} n={:<5} max rel {:.2e} max abs {:.2e} zero {}", b.name, b.checked, b.max_rel, b.max_abs, b.zero);
    }
    let secs = start.elapsed().as_secs_f64();
    println!("worst {:.2e} in {secs:.1} s", report.max_rel());
    assert!(report.max_rel() < 1e-4);
    assert!(secs < 120.0);
    // only embedding rows of tokens absent from the batch may have no gradient
    assert!(report.blocks.iter().skip(1).all(|b| b.zero == 0));
}

#[test]
fn gradient_at_init_scale() {
    let model = tiny(3);
    let batch = random_batch(&mut ChaCha8Rng::seed_from_u64(4), &[9, 6], 50);
    let report = gradient_check(&model, &as_refs(&batch), 1e-5, 3).unwrap();
    // small entries sit at the rounding floor, large ones must agree relatively
    for b in &report.blocks {
        assert!(b.max_abs < 1e-9 || b.max_rel < 1e-4, "{}: abs {:.2e} rel {:.2e}", b.name, b.max_abs, b.max_rel);
    }
}

#[test]
fn taylor_remainder_is_second_order() {
    let model = perturbed(5);
    let batch = random_batch(&mut ChaCha8Rng::seed_from_u64(6), &[10, 8], 50);
    let refs = as_refs(&batch);
    let mut g = Params::zeros(model.params.layout.clone());
    let l0 = model.loss_and_grad(&refs, &mut g).unwrap().mean();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dir: Vec<f64> = (0..g.data.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let slope: f64 = g.data.iter().zip(&dir).map(|(a, b)| a * b).sum();
    let remainder = |eps: f64| {
        let mut m = model.clone();
        m.params.data.iter_mut().zip(&dir).for_each(|(x, d)| *x += eps * d);
        (m.loss(&refs).unwrap().mean() - l0 - eps * slope).abs()
    };
    let (r1, r2) = (remainder(1e-3), remainder(5e-4));
    let ratio = r1 / r2;
    assert!((3.5..4.5).contains(&ratio), "halving eps shrank the remainder by {ratio}");
}

#[test]
fn future_tokens_do_not_reach_the_past() {
    let model = perturbed(8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = model.config.vocab_size;
    for _ in 0..20 {
        let n = rng.random_range(2..30);
        let ids: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let j = rng.random_range(1..n);
        let mut other = ids.clone();
        other[j] = (other[j] + 1 + rng.random_range(0..m - 1)) % m;
        let (a, b) = (model.logits(&ids).unwrap(), model.logits(&other).unwrap());
        assert!(a[..j * m].iter().zip(&b[..j * m]).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(a[j * m..].iter().zip(&b[j * m..]).any(|(x, y)| (x - y).abs() > 1e-9));
    }
}

#[test]
fn attention_rows_are_causal_distributions() {
    let model = perturbed(10);
    let seqs: Vec<Vec<usize>> = vec![(0..13).map(|i| i * 3 % 50).collect(), vec![7], (0..5).collect()];
    let refs: Vec<&[usize]> = seqs.iter().map(Vec::as_slice).collect();
    let fw = model.forward(&refs, false).unwrap();
    for layer in 0..model.config.layers {
        for (s, seq) in seqs.iter().enumerate() {
            let n = seq.len();
            for h in 0..model.config.heads {
                let p = fw.attention(layer, s, h);
                for i in 0..n {
                    let row = &p[i * n..(i + 1) * n];
                    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    assert!(row[i + 1..].iter().all(|&x| x == 0.0));
                    assert!(row.iter().all(|&x| x >= 0.0));
                }
                // the first position can only look at itself
                assert_eq!(p[0], 1.0);
            }
        }
    }
}

#[test]
fn init_loss_is_near_uniform() {
    for config in [ModelConfig::tiny(), ModelConfig::small()] {
        let m = config.vocab_size;
        let model: Transformer<f64> = Transformer::new(config, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let batch = random_batch(&mut ChaCha8Rng::seed_from_u64(12), &[40, 40, 40, 40], m);
        let loss = model.loss(&as_refs(&batch)).unwrap().mean();
        let want = (m as f64).ln();
        println!("vocab {m}: init loss {loss:.4}, ln m {want:.4}");
        assert!((loss - want).abs() / want < 0.05);
    }
}

#[test]
fn single_and_double_precision_agree() {
    let model = perturbed(13);
    let narrow: Transformer<f32> = Transformer::with_params(model.config.clone(), model.params.cast());
    let ids: Vec<usize> = (0..20).map(|i| (i * 7) % 50).collect();
    let (a, b) = (model.logits(&ids).unwrap(), narrow.logits(&ids).unwrap());
    let worst = a.iter().zip(&b).map(|(x, &y)| (x - y as f64).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn swiglu_matches_finite_differences() {
    let (n, d, f) = (3, 4, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut r = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.random_range(-1.0..1.0)).collect() };
    let (x, wg, wu, wd, dout) = (r(n * d), r(d * f), r(d * f), r(f * d), r(n * d));
    let objective = |x: &[f64], wg: &[f64], wu: &[f64], wd: &[f64]| {
        let mut out = vec![0.0; n * d];
        swiglu(x, wg, wu, wd, &mut out, n, d, f);
        out.iter().zip(&dout).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut out = vec![0.0; n * d];
    let cache = swiglu(&x, &wg, &wu, &wd, &mut out, n, d, f);
    let (mut dwg, mut dwu, mut dwd) = (vec![0.0; d * f], vec![0.0; d * f], vec![0.0; f * d]);
    let dx = swiglu_backward(
        &x,
        (&cache.0, &cache.1, &cache.2),
        (&wg, &wu, &wd),
        &dout,
        (&mut dwg, &mut dwu, &mut dwd),
        n,
        d,
        f,
    );
    let h = 1e-5;
    let fd = |which: usize, i: usize| {
        let mut args = [x.clone(), wg.clone(), wu.clone(), wd.clone()];
        args[which][i] += h;
        let up = objective(&args[0], &args[1], &args[2], &args[3]);
        args[which][i] -= 2.0 * h;
        let down = objective(&args[0], &args[1], &args[2], &args[3]);
        (up - down) / (2.0 * h)
    };
    for (which, analytic) in [(0, &dx), (1, &dwg), (2, &dwu), (3, &dwd)] {
        for (i, &a) in analytic.iter().enumerate() {
            assert!((a - fd(which, i)).abs() < 1e-8, "arg {which} entry {i}");
        }
    }
    let mut zero_out = vec![0.0; n * d];
    swiglu(&vec![0.0; n * d], &wg, &wu, &wd, &mut zero_out, n, d, f);
    assert!(zero_out.iter().all(|&v| v == 0.0));
}

#[test]
fn rmsnorm_backward_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let d = 6;
    let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    let g: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..1.5)).collect();
    let dy: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let objective = |x: &[f64], g: &[f64]| {
        let (mut y, mut r) = (vec![0.0; d], vec![0.0]);
        rmsnorm(x, g, &mut y, &mut r);
        y.iter().zip(&dy).map(|(a, b)| a * b).sum::<f64>()
    };
    let (mut y, mut r) = (vec![0.0; d], vec![0.0]);
    rmsnorm(&x, &g, &mut y, &mut r);
    let (mut dx, mut dg) = (vec![0.0; d], vec![0.0; d]);
    rmsnorm_backward(&x, &g, &r, &dy, &mut dx, &mut dg);
    for i in 0..d {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        assert!((dx[i] - (objective(&xp, &g) - objective(&xm, &g)) / 2e-6).abs() < 1e-8);
        let (mut gp, mut gm) = (g.clone(), g.clone());
        gp[i] += 1e-6;
        gm[i] -= 1e-6;
        assert!((dg[i] - (objective(&x, &gp) - objective(&x, &gm)) / 2e-6).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rope_scores_depend_only_on_offset(
        q in prop::collection::vec(-1.0f64..1.0, 8),
        k in prop::collection::vec(-1.0f64..1.0, 8),
        m in 0usize..200,
        n in 0usize..200,
    ) {
        let rope: Rope<f64> = Rope::new(8, 256, 10000.0);
        let (hi, lo) = (m.max(n), m.min(n));
        let (mut qm, mut kn) = (q.clone(), k.clone());
        rope.rotate(&mut qm, hi, false);
        rope.rotate(&mut kn, lo, false);
        let (mut qd, kd) = (q.clone(), k.clone());
        rope.rotate(&mut qd, hi - lo, false);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        prop_assert!((dot(&qm, &kn) - dot(&qd, &kd)).abs() < 1e-10);
    }

    #[test]
    fn rmsnorm_ignores_positive_scale(
        x in prop::collection::vec(-10.0f64..10.0, 1..32),
        s in 1e-3f64..1e3,
    ) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let g = vec![1.3; x.len()];
        let (mut a, mut b, mut r) = (vec![0.0; x.len()], vec![0.0; x.len()], vec![0.0]);
        rmsnorm(&x, &g, &mut a, &mut r);
        let scaled: Vec<f64> = x.iter().map(|v| v * s).collect();
        rmsnorm(&scaled, &g, &mut b, &mut r);
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() < 1e-5);
        }
    }

    #[test]
    fn batching_never_changes_a_sequence(lens in prop::collection::vec(1usize..20, 1..5), seed in 0u64..1000) {
        let model = tiny(seed % 7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seqs: Vec<Vec<usize>> = lens.iter().map(|&n| (0..n).map(|_| rng.random_range(0..50)).collect()).collect();
        let refs: Vec<&[usize]> = seqs.iter().map(Vec::as_slice).collect();
        let fw = model.forward(&refs, true).unwrap();
        for (s, &(start, len)) in seqs.iter().zip(&fw.spans) {
            let alone = model.logits(s).unwrap();
            let packed = &fw.logits[start * 50..(start + len) * 50];
            prop_assert!(alone.iter().zip(packed).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}
