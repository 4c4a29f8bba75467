use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spoke_core::decode::{apply_repetition_penalty, generate, next_token_distribution, DecodeMode, DecodeParams};
use spoke_core::model::{ModelConfig, Transformer};

fn model(seed: u64) -> Transformer<f64> {
    let mut m = Transformer::new(ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    // sharpen the output so greedy paths are not all ties near uniform
    let out = m.params.layout.out_proj();
    m.params.block_mut(out).iter_mut().for_each(|x| *x *= 100.0);
    m
}

fn sampled(temperature: f64, penalty: f64) -> DecodeParams {
    DecodeParams { mode: DecodeMode::Temperature, temperature, repetition_penalty: penalty, ..Default::default() }
}

fn logits() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0f64..8.0, 2..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn unit_penalty_is_identity(z in logits(), emitted in prop::collection::vec(0usize..30, 0..10)) {
        let mut p = z.clone();
        apply_repetition_penalty(&mut p, &emitted, 1.0);
        prop_assert_eq!(&p, &z);
    }

    #[test]
    fn a_single_emitted_token_only_loses_probability(z in logits(), t in 0usize..30, lo in 1.0f64..3.0, step in 0.0f64..3.0) {
        let t = t % z.len();
        let before = next_token_distribution(&z, &[t], &sampled(1.0, lo))[t];
        let after = next_token_distribution(&z, &[t], &sampled(1.0, lo + step))[t];
        prop_assert!(after <= before + 1e-15);
    }

    #[test]
    fn the_emitted_set_only_loses_probability(
        z in logits(),
        emitted in prop::collection::vec(0usize..30, 1..8),
        lo in 1.0f64..3.0,
        step in 0.0f64..3.0,
    ) {
        let emitted: Vec<usize> = emitted.iter().map(|&e| e % z.len()).collect();
        let mass = |pen| {
            let d = next_token_distribution(&z, &emitted, &sampled(1.0, pen));
            let mut seen = vec![false; z.len()];
            emitted.iter().filter(|&&e| !std::mem::replace(&mut seen[e], true)).map(|&e| d[e]).sum::<f64>()
        };
        prop_assert!(mass(lo + step) <= mass(lo) + 1e-12);
    }

    #[test]
    fn cold_sampling_approaches_greedy(z in logits()) {
        let best = (0..z.len()).max_by(|&a, &b| z[a].total_cmp(&z[b])).unwrap();
        let gap = z.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, &v)| z[best] - v).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-3);
        let mut prev = 0.0;
        for t in [1.0, 0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4, 1e-5] {
            let p = next_token_distribution(&z, &[], &sampled(t, 1.0))[best];
            prop_assert!(p >= prev - 1e-12);
            prev = p;
        }
        let greedy = next_token_distribution(&z, &[], &DecodeParams::default());
        prop_assert_eq!(greedy[best], 1.0);
        prop_assert!(prev > 1.0 - 1e-9);
    }
}

#[test]
fn penalizing_several_tokens_can_raise_one_of_them() {
    // token 0 dominates; penalizing both 0 and 1 moves mass from 0 to 1
    let z = [10.0, 1.0, 0.0];
    let p1 = |pen| next_token_distribution(&z, &[0, 1], &sampled(1.0, pen))[1];
    assert!(p1(2.0) > 10.0 * p1(1.0));
}

#[test]
fn greedy_matches_uncached_argmax_and_repeats() {
    let m = model(1);
    let prompt = [1usize, 9, 14, 3];
    let params = DecodeParams { max_new_tokens: 25, ..Default::default() };
    let g = generate(&m, &prompt, 2, &params, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let again = generate(&m, &prompt, 2, &params, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    assert_eq!(g, again);

    let mut ids = prompt.to_vec();
    let mut naive = Vec::new();
    for _ in 0..25 {
        let z = m.logits(&ids).unwrap();
        let last = &z[(ids.len() - 1) * 50..];
        let next = (0..50).fold(0, |b, i| if last[i] > last[b] { i } else { b });
        if next == 2 {
            break;
        }
        naive.push(next);
        ids.push(next);
    }
    assert_eq!(g.tokens, naive);
    assert_eq!(g.truncated, naive.len() == 25);
}

#[test]
fn length_limits_mark_truncation() {
    let m = model(2);
    let unreachable = 50;
    let p = DecodeParams { max_new_tokens: 4, ..Default::default() };
    let g = generate(&m, &[1, 5], unreachable, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!((g.tokens.len(), g.truncated), (4, true));
    // context full before max_new_tokens
    let long: Vec<usize> = (0..254).map(|i| i % 40 + 8).collect();
    let p = DecodeParams { max_new_tokens: 100, ..Default::default() };
    let g = generate(&m, &long, unreachable, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!((g.tokens.len(), g.truncated), (2, true));
    let p = DecodeParams { max_new_tokens: 0, ..Default::default() };
    assert!(generate(&m, &[1], 2, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().truncated);
}

#[test]
fn first_draws_follow_the_distribution() {
    let m = Transformer::<f64>::new(ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let mut m = m;
    let out = m.params.layout.out_proj();
    m.params.block_mut(out).iter_mut().for_each(|x| *x *= 30.0);
    let prompt = [1usize, 20, 30];
    let z = m.logits(&prompt).unwrap();
    let last = &z[2 * 50..];
    for params in [
        sampled(0.8, 1.0),
        DecodeParams { mode: DecodeMode::TopK, k: 5, temperature: 1.0, ..Default::default() },
    ] {
        let want = next_token_distribution(last, &[], &params);
        let one = DecodeParams { max_new_tokens: 1, ..params };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut freq = [0usize; 51];
        let n = 20_000;
        for _ in 0..n {
            let g = generate(&m, &prompt, 50, &one, &mut rng).unwrap();
            freq[g.tokens[0]] += 1;
        }
        for i in 0..50 {
            let f = freq[i] as f64 / n as f64;
            assert!((f - want[i]).abs() < 0.015, "token {i}: {f} vs {}", want[i]);
            if want[i] == 0.0 {
                assert_eq!(freq[i], 0);
            }
        }
    }
}

#[test]
fn embeddings_are_pure_and_causal() {
    let m = model(5);
    let ids: Vec<usize> = (0..17).map(|i| (i * 11) % 50).collect();
    let a = m.embed(&ids).unwrap();
    assert_eq!(a.len(), ids.len() * 16);
    assert_eq!(a, m.embed(&ids).unwrap());
    let prefix = m.embed(&ids[..9]).unwrap();
    assert!(prefix.iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-12));
}
