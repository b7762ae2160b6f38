use faer::{c64, Mat};
use proptest::prelude::*;

use freepos::freeconv::free_power;
use freepos::kposcheck::{compressed_min_eig, see_saw};
use freepos::measures::MeasureSpec;
use freepos::positivity::{is_k_positive, mp_bottom};
use freepos::rmt::{
    build_block_gue, io, sample_choi_map, sample_gue, sample_haar_isometry, sample_haar_unitary, BipartiteOperator,
    GaussianFamily, HermitianMatrix, Seed,
};
use freepos::witness::{build_coupled_pair, witness_value, WitnessExperimentConfig};

fn closed_form() -> impl Strategy<Value = MeasureSpec> {
    prop_oneof![
        (-3.0..3.0f64, 0.1..2.0f64).prop_map(|(a, s)| MeasureSpec::semicircle(a, s).unwrap()),
        (0.05..3.0f64).prop_map(|t| MeasureSpec::free_poisson(t).unwrap()),
        (0.1..2.0f64, 0.05..1.0f64).prop_map(|(a, t)| MeasureSpec::shifted_free_poisson(a, t).unwrap()),
    ]
}

fn atomic() -> impl Strategy<Value = MeasureSpec> {
    prop::collection::vec((0.1..1.0f64, -3.0..3.0f64), 1..5).prop_map(|raw| {
        let total: f64 = raw.iter().map(|p| p.0).sum();
        MeasureSpec::atomic(raw.iter().map(|&(w, x)| (w / total, x)).collect()).unwrap()
    })
}

fn hermitian(d: usize, seed: u64) -> HermitianMatrix {
    sample_gue(d, Seed::new(seed).with_label("prop"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructors_are_hermitian(n in 1usize..4, d in 1usize..5, seed in any::<u64>()) {
        prop_assert!(hermitian(n * d, seed).hermiticity_defect() <= 1e-12);
        let g = build_block_gue(n, d, &GaussianFamily::sample(n, d, Seed::new(seed))).unwrap();
        prop_assert!(g.matrix().hermiticity_defect() <= 1e-12);
        prop_assert!(g.partial_transpose().matrix().hermiticity_defect() <= 1e-12);
        let u = sample_haar_unitary(n * d, Seed::new(seed).with_label("u"));
        prop_assert!(g.matrix().conjugate_by(u.as_ref()).unwrap().hermiticity_defect() <= 1e-12);
        let image = g.apply_choi_map(&hermitian(n, seed ^ 1)).unwrap();
        prop_assert!(image.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn blocks_are_adjoint_pairs(n in 1usize..4, d in 1usize..4, seed in any::<u64>()) {
        let g = build_block_gue(n, d, &GaussianFamily::sample(n, d, Seed::new(seed))).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (g.block(i, j), g.block(j, i));
                for r in 0..d {
                    for c in 0..d {
                        prop_assert!((a[(r, c)] - b[(c, r)].conj()).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_transpose_is_an_involution(n in 1usize..4, d in 1usize..4, seed in any::<u64>()) {
        let op = BipartiteOperator::new(n, d, hermitian(n * d, seed)).unwrap();
        prop_assert_eq!(io::to_bytes(&op.partial_transpose().partial_transpose()), io::to_bytes(&op));
    }

    #[test]
    fn same_seed_same_bytes(n in 1usize..4, d in 1usize..4, seed in any::<u64>()) {
        let a = build_block_gue(n, d, &GaussianFamily::sample(n, d, Seed::new(seed))).unwrap();
        let b = build_block_gue(n, d, &GaussianFamily::sample(n, d, Seed::new(seed))).unwrap();
        prop_assert_eq!(io::to_bytes(&a), io::to_bytes(&b));
    }

    #[test]
    fn spectrum_is_unitarily_invariant(d in 1usize..8, seed in any::<u64>()) {
        let m = hermitian(d, seed);
        let u = sample_haar_unitary(d, Seed::new(seed).with_label("u"));
        let a = m.spectrum().unwrap().into_values();
        let b = m.conjugate_by(u.as_ref()).unwrap().spectrum().unwrap().into_values();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn mean_scales_with_the_power(spec in closed_form(), t in 1.0..8.0f64) {
        let r = free_power(&spec, t).unwrap();
        let out = r.result_spec.unwrap();
        prop_assert!((out.mean() - t * spec.mean()).abs() <= 1e-8 * (1.0 + t * spec.mean().abs()));
        let s = out.support();
        prop_assert!((s.min_supp - r.support.min_supp).abs() <= 1e-10);
        prop_assert!((s.max_supp - r.support.max_supp).abs() <= 1e-10);
    }

    #[test]
    fn powers_compose(spec in closed_form(), s in 1.0..4.0f64, t in 1.0..4.0f64) {
        let once = free_power(&spec, s * t).unwrap().support;
        let inner = free_power(&spec, s).unwrap().result_spec.unwrap();
        let twice = free_power(&inner, t).unwrap().support;
        prop_assert!((once.min_supp - twice.min_supp).abs() <= 1e-10 * (1.0 + once.min_supp.abs()));
        prop_assert!((once.max_supp - twice.max_supp).abs() <= 1e-10 * (1.0 + once.max_supp.abs()));
    }

    #[test]
    fn support_profiles_are_ordered(spec in prop_oneof![closed_form(), atomic()], t in 1.0..5.0f64) {
        let s = free_power(&spec, t).unwrap().support;
        prop_assert!(s.min_supp <= s.max_supp);
        for &(x, w) in &s.atoms {
            prop_assert!(s.min_supp - 1e-9 <= x && x <= s.max_supp + 1e-9);
            prop_assert!(w > 0.0 && w <= 1.0);
        }
    }

    #[test]
    fn verdicts_are_monotone_in_k(spec in prop_oneof![closed_form(), atomic()], n in 1usize..10) {
        let mut seen_false = false;
        for k in 1..=n {
            let v = is_k_positive(&spec, n, k).unwrap();
            prop_assert!(!(seen_false && v.is_k_positive), "k={} positive after a failure", k);
            seen_false |= !v.is_k_positive;
        }
    }

    #[test]
    fn mp_bottom_is_the_compressed_support(a in 0.05..2.0f64, t in 0.05..2.0f64, n in 1usize..12, k in 1usize..12) {
        prop_assume!(k <= n);
        let spec = MeasureSpec::shifted_free_poisson(a, t).unwrap();
        let r = k as f64 / n as f64;
        let via_power = r * free_power(&spec, 1.0 / r).unwrap().support.min_supp;
        prop_assert!((mp_bottom(a, t, n, k).unwrap() - via_power).abs() <= 1e-10);
    }

    #[test]
    fn witness_is_affine_in_alpha(n in 2usize..4, d in 1usize..4, seed in any::<u64>()) {
        let w = |alpha: f64| {
            let cfg = WitnessExperimentConfig::new(n, d, alpha, 0.1, 1, Seed::new(seed));
            let pair = build_coupled_pair(&cfg, 0).unwrap();
            witness_value(&pair.z, &pair.c).unwrap()
        };
        let (w0, w1, w2) = (w(0.0), w(0.3), w(0.6));
        prop_assert!((w0 - 2.0 * w1 + w2).abs() <= 1e-9 * (1.0 + w0.abs()));
    }

    #[test]
    fn larger_frames_compress_lower(n in 2usize..5, d in 1usize..4, seed in any::<u64>()) {
        let c = BipartiteOperator::new(n, d, hermitian(n * d, seed)).unwrap();
        let v = sample_haar_isometry(n, n, Seed::new(seed).with_label("frame")).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=n {
            let frame = Mat::<c64>::from_fn(n, k, |i, j| v[(i, j)]);
            let e = compressed_min_eig(&c, frame.as_ref()).unwrap();
            prop_assert!(e <= prev + 1e-9);
            prev = e;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn see_saw_never_climbs(n in 2usize..5, k in 1usize..3, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let spec = MeasureSpec::semicircle(0.5, 1.0).unwrap();
        let c = sample_choi_map(&spec, n, 6, Seed::new(seed)).unwrap();
        let r = see_saw(&c, k, 3, Seed::new(seed).with_label("ss")).unwrap();
        prop_assert!(r.history.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!((r.history.last().copied().unwrap() - r.best_value).abs() <= 1e-9);
    }
}
