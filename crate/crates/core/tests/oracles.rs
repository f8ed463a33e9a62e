mod common;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qkset::arith::{factorize_u64, ppd_primes, prime_power};
use qkset::classify::Classifier;
use qkset::groups::{enumerate, group_order, sample_uniform};
use qkset::harness::{scan, KChoice, ScanConfig, ScanMode};
use qkset::proportions::SetKind;
use qkset::{make_field, GroupSpec, Poly};

fn spec(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

#[test]
fn factorization_matches_trial_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let n: u64 = rng.gen_range(2..1u64 << 40);
        let fac = factorize_u64(n).unwrap();
        let primes: Vec<u128> = fac.primes().map(|r| r.to_u128().unwrap()).collect();
        assert_eq!(primes, common::prime_factors(n as u128), "n={n}");
    }
}

#[test]
fn ppd_matches_brute_force() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for m in 1..=12u32 {
            let fast: Vec<u128> = ppd_primes(q, m as u64)
                .iter()
                .map(|r| r.to_u128().unwrap())
                .collect();
            assert_eq!(fast, common::ppd_brute(q as u128, m), "q={q} m={m}");
        }
    }
}

#[test]
fn polynomial_factorization_matches_trial_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for q in [2u64, 3, 4, 5] {
        let (p, e) = prime_power(q).unwrap();
        let f = make_field(p, e).unwrap();
        for _ in 0..300 {
            let deg = rng.gen_range(1..=8);
            let mut c: Vec<u32> = (0..deg).map(|_| rng.gen_range(0..f.q())).collect();
            c.push(1);
            let mut slow = common::factor_trial(&f, &c);
            slow.sort();
            let mut fast: Vec<(Vec<u32>, usize)> = Poly::new(&f, c.clone())
                .factorize()
                .unwrap()
                .factors
                .into_iter()
                .map(|(g, m)| (g.coeffs().to_vec(), m))
                .collect();
            fast.sort();
            assert_eq!(fast, slow, "q={q} {c:?}");
        }
    }
}

#[test]
fn naive_classifier_on_samples() {
    for (name, seed) in [
        ("SL:4:3", 1u64),
        ("SL:5:2", 2),
        ("SU:3:3", 3),
        ("SU:4:2", 4),
        ("Sp:3:2", 5),
        ("Sp:2:5", 6),
        ("SO:odd:2:3", 7),
        ("SO:+:2:5", 8),
        ("SO:-:3:3", 9),
    ] {
        let s = spec(name);
        let size = group_order(&s).to_u128().unwrap();
        let classifier = Classifier::new(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..60 {
            let g = sample_uniform(&s, &mut rng);
            for k in 2..=s.d().min(4) {
                let fast = classifier.classify(&g, k).unwrap().tier;
                let slow = common::naive_tier(&s, &g, k, size);
                assert_eq!(fast, slow, "{name} k={k}\n{}", g.to_text());
            }
        }
    }
}

#[test]
fn exhaustive_scan_matches_naive_counts() {
    let s = spec("SL:3:2");
    let elems = enumerate(&s, 1000, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    for k in 2..=3 {
        let mut cfg = ScanConfig::new(s.clone(), KChoice::Fixed(k));
        cfg.mode = ScanMode::Exhaustive;
        let r = scan(&cfg).unwrap();
        let qk = elems
            .iter()
            .filter(|g| common::naive_tier(&s, g, k, 168) != qkset::classify::Tier::None)
            .count();
        assert_eq!(r.hits_qk as usize, qk);
        let expect = num_rational::BigRational::new(qk.into(), 168.into());
        assert_eq!(
            r.kind(SetKind::Qk).unwrap().exact.as_deref(),
            Some(qkset::proportions::rational_to_string(&expect).as_str())
        );
    }
}

#[test]
fn sampled_order_five_proportion() {
    let s = spec("Sp:2:3");
    let elems = enumerate(&s, 1_000_000, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let exact = elems.iter().filter(|g| common::element_order(g) == 5).count() as f64 / elems.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| common::element_order(&sample_uniform(&s, &mut rng)) == 5)
        .count();
    let est = hits as f64 / n as f64;
    assert!((est - exact).abs() < 0.01, "sampled {est} exact {exact}");
}

#[test]
fn group_orders_small_cases() {
    let cases = [
        ("SL:2:2", 6u64),
        ("SL:3:2", 168),
        ("SU:3:2", 216),
        ("Sp:2:2", 720),
        ("Sp:2:3", 51840),
        ("SO:odd:1:3", 24),
        ("SO:+:2:3", 576),
    ];
    for (name, order) in cases {
        assert_eq!(group_order(&spec(name)), BigUint::from(order), "{name}");
    }
}
