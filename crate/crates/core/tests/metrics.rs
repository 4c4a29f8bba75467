use std::path::PathBuf;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spoke_core::metrics::{
    eval_generation, fit_degree_one, pct_difference, pearsonr, plot_csv, Constraints, GeneratedOutput,
};

fn corpus() -> &'static [String] {
    static C: OnceLock<Vec<String>> = OnceLock::new();
    C.get_or_init(|| {
        let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/molecules/small_50k.smi");
        std::fs::read_to_string(p).unwrap().lines().take(2000).map(str::to_string).collect()
    })
}

/// Correlation from the pairwise form of the covariance:
/// cov = Σ_{i<j} (x_i − x_j)(y_i − y_j) / (n(n−1)).
fn pairwise_pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (dx, dy) = (x[i] - x[j], y[i] - y[j]);
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
    }
    sxy / (sxx * syy).sqrt()
}

#[test]
fn pearson_matches_pairwise_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    while pairs < 100_000 {
        let n = rng.random_range(2..100);
        let scale = 10f64.powi(rng.random_range(-3..4));
        let shift = rng.random_range(-10.0..10.0) * scale;
        let coupling = rng.random_range(-1.0..1.0);
        let x: Vec<f64> = (0..n).map(|_| shift + scale * rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = x.iter().map(|&v| coupling * v + scale * rng.random_range(-1.0..1.0)).collect();
        worst = worst.max((pearsonr(&x, &y).unwrap() - pairwise_pearson(&x, &y)).abs());
        pairs += n;
    }
    println!("worst |Δr| {worst:.2e}");
    assert!(worst < 1e-12);
}

#[test]
fn pct_difference_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = 1000;
        let draw = |rng: &mut ChaCha8Rng| match rng.random_range(0..10) {
            0 => 0.0,
            _ => rng.random_range(-500.0..500.0),
        };
        let p: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let t: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let mut direct = 0.0;
        for i in 0..n {
            if p[i] != 0.0 || t[i] != 0.0 {
                direct += (p[i] - t[i]).abs() / (p[i].abs() + t[i].abs());
            }
        }
        direct /= n as f64;
        let got = pct_difference(&p, &t).unwrap();
        worst = worst.max((got - direct).abs());
        assert!((0.0..=1.0).contains(&got));
    }
    assert!(worst < 1e-12);
}

#[test]
fn noiseless_lines_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let (a, b) = (rng.random_range(-10.0..10.0), rng.random_range(-100.0..100.0));
        let n = rng.random_range(2..60);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = if i < 2 { i as f64 } else { rng.random_range(-100.0..100.0) };
                (x, a * x + b)
            })
            .collect();
        let (s, c) = fit_degree_one(&pts).unwrap();
        assert!((s - a).abs() < 1e-9 && (c - b).abs() < 1e-9, "{s} {c} vs {a} {b}");
    }
}

#[test]
fn noisy_fits_match_a_least_squares_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let n = rng.random_range(3..40);
        let pts: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.random_range(0.0..500.0), rng.random_range(0.0..500.0))).collect();
        let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { pts[i].0 } else { 1.0 });
        let y = DVector::from_iterator(n, pts.iter().map(|p| p.1));
        let sol = a.svd(true, true).solve(&y, 1e-14).unwrap();
        let (s, c) = fit_degree_one(&pts).unwrap();
        assert!((s - sol[0]).abs() < 1e-9 && (c - sol[1]).abs() < 1e-7);
    }
}

fn mangled() -> impl Strategy<Value = String> {
    let corpus_pick = (0..corpus().len()).prop_map(|i| corpus()[i].clone());
    prop_oneof![
        3 => corpus_pick.clone(),
        // a small pool so that exact repeats are common
        1 => (0..20usize).prop_map(|i| corpus()[i].clone()),
        2 => (corpus_pick, any::<prop::sample::Index>(), "[()=#1-9CNOcn\\[\\]]")
            .prop_map(|(s, at, ins)| {
                let mut chars: Vec<char> = s.chars().collect();
                let k = at.index(chars.len() + 1);
                chars.insert(k, ins.chars().next().unwrap());
                chars.into_iter().collect()
            }),
        1 => "\\PC{0,12}",
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn report_counts_are_ordered(texts in prop::collection::vec(mangled(), 0..40), lipinski in any::<bool>()) {
        let outs: Vec<GeneratedOutput> = texts.iter().map(|t| GeneratedOutput::plain(t)).collect();
        let r = eval_generation(&outs, lipinski.then_some(Constraints::Lipinski)).generation;
        let success = r.n_success.unwrap_or(0);
        prop_assert!(success <= r.n_unique && r.n_unique <= r.n_valid && r.n_valid <= r.n_total);
        prop_assert_eq!(r.n_total, texts.len());
        prop_assert_eq!(r.records.len(), texts.len());
        prop_assert_eq!(r.n_success.is_some(), lipinski);
        prop_assert_eq!(r.records.iter().filter(|x| x.status == "ok").count(), r.n_valid);
    }
}

#[test]
fn plot_points_are_valid_outputs_only() {
    let mk = |t: &str, w: f64| {
        let mut o = GeneratedOutput::plain(t);
        o.conditions.insert("MolWt".into(), w);
        o
    };
    let outs = vec![mk("CCO", 46.07), mk("C1CC", 60.0), mk("CCCC", 58.12), mk("c1ccccc1", 80.0)];
    let r = eval_generation(&outs, None);
    let csv = plot_csv(&r);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "property,x,y");
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|l| !l.contains(",60,")));
    let c = &r.conditions[0];
    assert!(c.pearsonr.unwrap() > 0.99);
    assert!(c.pct_difference.unwrap() < 0.01);
}
