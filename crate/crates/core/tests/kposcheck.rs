use faer::{c64, Mat};
use freepos::kposcheck::{compressed_min_eig, net_check, see_saw, see_saw_with, Frame, KPosStatus, SeeSawOptions};
use freepos::measures::MeasureSpec;
use freepos::registry::kpos_strategies;
use freepos::rmt::{sample_choi_map, sample_gue, sample_haar_isometry, BipartiteOperator, HermitianMatrix, Seed};
use freepos::Error;

/// Choi matrix of the transpose on `M_n`: the swap operator.
fn transpose_choi(n: usize) -> BipartiteOperator {
    let mut m = Mat::<c64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, j * n + i)] = c64::new(1.0, 0.0);
        }
    }
    BipartiteOperator::new(n, n, HermitianMatrix::new(m).unwrap()).unwrap()
}

#[test]
fn transpose_is_positive_but_not_two_positive() {
    let c = transpose_choi(3);
    let one = see_saw(&c, 1, 8, Seed::new(1)).unwrap();
    assert_eq!(one.status, KPosStatus::NoViolationFound);
    assert!(one.best_value > -1e-9);
    let two = see_saw(&c, 2, 8, Seed::new(1)).unwrap();
    assert_eq!(two.status, KPosStatus::NegativeCertificate);
    // the antisymmetric vector inside any 2-dimensional frame gives −1
    assert!((two.best_value + 1.0).abs() < 1e-8, "{}", two.best_value);
    assert!((c.min_eigenvalue().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn certificate_is_recomputable() {
    let c = BipartiteOperator::new(3, 4, sample_gue(12, Seed::new(2))).unwrap();
    for k in 1..=3 {
        let r = see_saw(&c, k, 6, Seed::new(3)).unwrap();
        let v = r.best_projection.to_mat().unwrap();
        assert_eq!((v.nrows(), v.ncols()), (3, k));
        let again = compressed_min_eig(&c, v.as_ref()).unwrap();
        assert!((again - r.best_value).abs() < 1e-12);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}

#[test]
fn see_saw_beats_random_frames() {
    let c = BipartiteOperator::new(4, 3, sample_gue(12, Seed::new(4))).unwrap();
    let r = see_saw(&c, 2, 8, Seed::new(5)).unwrap();
    for s in 0..200 {
        let v = sample_haar_isometry(4, 2, Seed::new(s).with_label("random frame")).unwrap();
        assert!(r.best_value <= compressed_min_eig(&c, v.as_ref()).unwrap() + 1e-10);
    }
    assert!(r.best_value >= c.min_eigenvalue().unwrap() - 1e-10);
}

#[test]
fn net_and_see_saw_agree_for_k_one() {
    for s in 0..4 {
        let c = BipartiteOperator::new(2, 2, sample_gue(4, Seed::new(10 + s))).unwrap();
        let net = net_check(&c, 1, 48).unwrap();
        let ss = see_saw(&c, 1, 16, Seed::new(20 + s)).unwrap();
        // the net only evaluates feasible frames, so it can never go below the true minimum
        assert!(ss.best_value <= net.best_value + 1e-9);
        assert!(
            net.best_value - ss.best_value < 0.02,
            "net {} see-saw {}",
            net.best_value,
            ss.best_value
        );
    }
}

#[test]
fn coordinate_compression_of_a_semicircle_choi() {
    // compression to 3 of 8 blocks: bottom tends to 1 − 2√(3/8)
    let c = sample_choi_map(&MeasureSpec::semicircle(1.0, 1.0).unwrap(), 8, 400, Seed::new(6)).unwrap();
    let v = Mat::<c64>::from_fn(
        8,
        3,
        |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) },
    );
    let got = compressed_min_eig(&c, v.as_ref()).unwrap();
    let want = 1.0 - 2.0 * (3.0f64 / 8.0).sqrt();
    assert!((got - want).abs() < 0.1, "{got} vs {want}");
}

#[test]
fn frame_validation() {
    let c = BipartiteOperator::identity(3, 2);
    let bad = Mat::<c64>::from_fn(3, 1, |_, _| c64::new(1.0, 0.0));
    assert!(matches!(
        compressed_min_eig(&c, bad.as_ref()),
        Err(Error::NotIsometry(_))
    ));
    let wide = Mat::<c64>::identity(4, 4);
    assert!(matches!(
        compressed_min_eig(&c, wide.as_ref()),
        Err(Error::ShapeMismatch(_))
    ));
    assert!(see_saw(&c, 0, 1, Seed::new(1)).is_err());
    assert!(see_saw(&c, 4, 1, Seed::new(1)).is_err());
    let f = Frame {
        rows: 2,
        cols: 2,
        entries: vec![[1.0, 0.0]],
    };
    assert!(f.to_mat().is_err());
}

#[test]
fn frame_json_round_trip() {
    let v = sample_haar_isometry(3, 2, Seed::new(7)).unwrap();
    let f = Frame::from_mat(&v);
    let back: Frame = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(back.to_mat().unwrap(), v);
}

#[test]
fn stop_below_ends_the_search_early() {
    let c = transpose_choi(3);
    let opts = SeeSawOptions {
        restarts: 2,
        stop_below: Some(-0.5),
        ..SeeSawOptions::default()
    };
    let r = see_saw_with(&c, 2, &opts, Seed::new(8)).unwrap();
    assert!(r.best_value < -0.5);
    assert_eq!(r.status, KPosStatus::NegativeCertificate);
}

#[test]
fn strategies_from_the_registry() {
    let reg = kpos_strategies(SeeSawOptions::default(), 24);
    let c = transpose_choi(2);
    let net = reg.get("net").unwrap().check(&c, 1, Seed::new(1)).unwrap();
    let ss = reg.get("see_saw").unwrap().check(&c, 1, Seed::new(1)).unwrap();
    assert!(net.best_value.abs() < 1e-12 && ss.best_value.abs() < 1e-8);
    assert!(reg.get("net").unwrap().check(&c, 2, Seed::new(1)).is_err());
    assert!(reg.get("gradient").is_err());
}
