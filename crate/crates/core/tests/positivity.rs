use freepos::measures::MeasureSpec;
use freepos::positivity::{
    finite_eps_small_rank_verdict, is_k_positive, max_k_positive, mp_bottom, semicircle_threshold,
    small_rank_threshold, verdict_table, SandwichStatus,
};
use freepos::Error;

fn mp(a: f64, t: f64, n: usize, k: usize) -> f64 {
    let q = t * n as f64 / k as f64;
    1.0 - (k as f64 / n as f64) * a * (1.0 + q + 2.0 * q.sqrt())
}

#[test]
fn semicircle_verdicts() {
    let sc = MeasureSpec::semicircle(1.0, 1.0).unwrap();
    let v2 = is_k_positive(&sc, 8, 2).unwrap();
    assert!(v2.is_k_positive);
    assert!(v2.margin.abs() < 1e-12);
    assert!(!is_k_positive(&sc, 8, 3).unwrap().is_k_positive);
    assert_eq!(max_k_positive(&sc, 8).unwrap(), 2);
    assert_eq!(
        max_k_positive(&MeasureSpec::semicircle(-1.0, 1.0).unwrap(), 8).unwrap(),
        0
    );
    assert!(matches!(is_k_positive(&sc, 8, 9), Err(Error::Domain(_))));
    assert!(matches!(is_k_positive(&sc, 8, 0), Err(Error::Domain(_))));
}

#[test]
fn positive_point_mass() {
    let d = MeasureSpec::dirac(5.0);
    for n in 1..6 {
        for k in 1..=n {
            assert!(is_k_positive(&d, n, k).unwrap().is_k_positive);
        }
    }
}

#[test]
fn threshold_formula() {
    assert_eq!(semicircle_threshold(1.0, 1.0, 8), 2);
    assert_eq!(semicircle_threshold(2.0, 1.0, 5), 5);
    assert_eq!(semicircle_threshold(0.0, 1.0, 3), 0);
    assert_eq!(semicircle_threshold(-0.5, 1.0, 3), 0);
    assert_eq!(
        max_k_positive(&MeasureSpec::semicircle(2.0, 1.0).unwrap(), 5).unwrap(),
        5
    );
}

#[test]
fn mp_family() {
    assert!((mp_bottom(0.6, 0.25, 4, 2).unwrap() - (1.0 - 0.3 * (1.5 + 2.0 * 0.5f64.sqrt()))).abs() < 1e-12);
    assert!((mp_bottom(0.6, 0.25, 4, 2).unwrap() - 0.125736).abs() < 1e-6);
    assert!((mp_bottom(0.6, 0.25, 4, 3).unwrap() + 0.119615).abs() < 1e-6);
    assert!((mp_bottom(1e-9, 0.25, 4, 3).unwrap() - 1.0).abs() < 1e-8);
    assert!(mp_bottom(0.6, 0.25, 4, 5).is_err());
    let spec = MeasureSpec::shifted_free_poisson(0.6, 0.25).unwrap();
    assert_eq!(max_k_positive(&spec, 4).unwrap(), 2);
    for (n, k) in [(4, 1), (4, 2), (4, 3), (4, 4), (7, 3), (10, 9)] {
        let v = is_k_positive(&spec, n, k).unwrap();
        assert!(((k as f64 / n as f64) * v.margin - mp(0.6, 0.25, n, k)).abs() < 1e-10);
    }
}

#[test]
fn small_rank_limit() {
    assert_eq!(small_rank_threshold(4, 2).unwrap(), 2.0);
    assert_eq!(small_rank_threshold(3, 3).unwrap(), 1.0);
    assert_eq!(small_rank_threshold(9, 1).unwrap(), 9.0);
    assert!(small_rank_threshold(2, 3).is_err());
}

#[test]
fn sandwich_examples() {
    assert_eq!(
        finite_eps_small_rank_verdict(4, 2, 1.5, 1e-6).unwrap().status,
        SandwichStatus::Certified
    );
    assert_eq!(
        finite_eps_small_rank_verdict(4, 2, 2.5, 1e-6).unwrap().status,
        SandwichStatus::Refuted
    );
    assert_eq!(
        finite_eps_small_rank_verdict(4, 2, 2.0, 0.01).unwrap().status,
        SandwichStatus::Inconclusive
    );
}

#[test]
fn sandwich_becomes_definite() {
    for (n, k) in [(4usize, 2usize), (6, 1), (5, 3)] {
        let lim = n as f64 / k as f64;
        for a in [0.5 * lim, 0.9 * lim, 1.1 * lim, 1.6 * lim] {
            let v = finite_eps_small_rank_verdict(n, k, a, 1e-8).unwrap();
            let expected = if a < lim {
                SandwichStatus::Certified
            } else {
                SandwichStatus::Refuted
            };
            assert_eq!(v.status, expected, "n={n} k={k} a={a}");
            // the sandwich bounds are the MP bottom at a ± 6√ε
            assert!((v.lower_bottom - mp(a + 6e-4, 1e-8, n, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn table_is_monotone_and_serializes() {
    let t = verdict_table(&MeasureSpec::semicircle(1.0, 1.0).unwrap(), 8).unwrap();
    assert_eq!(t.len(), 8);
    let flags: Vec<bool> = t.iter().map(|v| v.is_k_positive).collect();
    assert_eq!(flags, [true, true, false, false, false, false, false, false]);
    let j = serde_json::to_value(&t[0]).unwrap();
    for key in ["n", "k", "is_k_positive", "margin", "method"] {
        assert!(j.get(key).is_some(), "{key}");
    }
    assert_eq!(j["method"], "closed_form");
}
