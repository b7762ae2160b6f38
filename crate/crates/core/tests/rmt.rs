use std::f64::consts::PI;

use faer::{c64, Mat};
use freepos::measures::MeasureSpec;
use freepos::rmt::{
    build_block_gue, deterministic_diagonal, free_power_oracle, io, sample_choi_map, sample_gue, sample_haar_unitary,
    BipartiteOperator, GaussianFamily, HermitianMatrix, Seed, Spectrum,
};

fn semicircle_cdf(x: f64) -> f64 {
    let u = (x / 2.0).clamp(-1.0, 1.0);
    0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI
}

#[test]
fn gue_normalization() {
    let mut acc = 0.0;
    for s in 0..200 {
        let x = sample_gue(50, Seed::new(s));
        let m = x.as_mat();
        let tr2: f64 = (0..50)
            .flat_map(|i| (0..50).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        acc += tr2 / 50.0;
    }
    assert!((acc / 200.0 - 1.0).abs() < 0.05);
}

#[test]
fn gue_law_at_d_500() {
    let s = sample_gue(500, Seed::new(1)).spectrum().unwrap();
    assert!((1.85..=2.15).contains(&s.norm()), "{}", s.norm());
    assert!(s.kolmogorov_distance(semicircle_cdf) < 0.05);
}

#[test]
fn block_gue_law() {
    let fam = GaussianFamily::sample(3, 200, Seed::new(2));
    let z = build_block_gue(3, 200, &fam).unwrap();
    assert!(z.spectrum().unwrap().kolmogorov_distance(semicircle_cdf) < 0.05);
    assert!(build_block_gue(3, 100, &fam).is_err());
}

#[test]
fn block_gue_entry_variances() {
    // n=2, d=1: diagonal entries N(0,1/2), off-diagonal real and imaginary parts N(0,1/4)
    let draws = 20_000;
    let (mut v00, mut v11, mut vre, mut vim) = (0.0, 0.0, 0.0, 0.0);
    for s in 0..draws {
        let z = build_block_gue(2, 1, &GaussianFamily::sample(2, 1, Seed::new(s))).unwrap();
        let m = z.matrix();
        v00 += m.get(0, 0).re.powi(2);
        v11 += m.get(1, 1).re.powi(2);
        vre += m.get(0, 1).re.powi(2);
        vim += m.get(0, 1).im.powi(2);
    }
    let n = draws as f64;
    // standard error of a variance estimate is σ²√(2/n)
    for (v, target) in [(v00, 0.5), (v11, 0.5), (vre, 0.25), (vim, 0.25)] {
        assert!(
            (v / n - target).abs() < 5.0 * target * (2.0 / n).sqrt(),
            "{} vs {target}",
            v / n
        );
    }
}

#[test]
fn haar_unitary() {
    let u = sample_haar_unitary(6, Seed::new(3));
    let p = &u * u.adjoint();
    for i in 0..6 {
        for j in 0..6 {
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((p[(i, j)] - c64::new(e, 0.0)).norm() < 1e-12);
        }
    }
    let one = sample_haar_unitary(1, Seed::new(4));
    assert!((one[(0, 0)].norm() - 1.0).abs() < 1e-14);
    let mut mean = c64::new(0.0, 0.0);
    for s in 0..10_000 {
        mean += sample_haar_unitary(4, Seed::new(s).with_label("mean"))[(0, 0)];
    }
    assert!((mean / 10_000.0).norm_sqr() < 0.01);
}

#[test]
fn unitary_invariance_of_spectrum() {
    let m = sample_gue(20, Seed::new(5));
    let u = sample_haar_unitary(20, Seed::new(6));
    let a = m.spectrum().unwrap();
    let b = m.conjugate_by(u.as_ref()).unwrap().spectrum().unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn choi_map_sampling() {
    let id = sample_choi_map(&MeasureSpec::dirac(1.0), 3, 4, Seed::new(1)).unwrap();
    assert!((id.min_eigenvalue().unwrap() - 1.0).abs() < 1e-12);
    assert!(id.matrix().hermiticity_defect() < 1e-12);
    let spec = MeasureSpec::semicircle(0.5, 1.0).unwrap();
    let c = sample_choi_map(&spec, 3, 20, Seed::new(2)).unwrap();
    let diag = deterministic_diagonal(&spec, 60).unwrap();
    for (x, y) in c.spectrum().unwrap().values().iter().zip(&diag) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn full_compression_of_semicircle_choi() {
    // k = n: the compression is C itself, whose bottom tends to min supp SC_{1.05, 1} = −0.95
    let c = sample_choi_map(&MeasureSpec::semicircle(2.1 / 2.0, 1.0).unwrap(), 4, 300, Seed::new(3)).unwrap();
    assert!((c.min_eigenvalue().unwrap() + 0.95).abs() < 0.1);
}

#[test]
fn reproducible_bytes() {
    let a = GaussianFamily::sample(2, 5, Seed::new(9));
    let b = GaussianFamily::sample(2, 5, Seed::new(9));
    let (za, zb) = (build_block_gue(2, 5, &a).unwrap(), build_block_gue(2, 5, &b).unwrap());
    assert_eq!(io::to_bytes(&za), io::to_bytes(&zb));
    let c = build_block_gue(2, 5, &GaussianFamily::sample(2, 5, Seed::new(10))).unwrap();
    assert_ne!(io::to_bytes(&za), io::to_bytes(&c));
}

#[test]
fn binary_and_csv_round_trip() {
    let z = BipartiteOperator::new(2, 3, sample_gue(6, Seed::new(4))).unwrap();
    let bytes = io::to_bytes(&z);
    assert_eq!(&bytes[..4], b"FPRM");
    assert_eq!(bytes.len(), 4 + 4 * 4 + 36 * 16);
    assert_eq!(io::read_binary(&bytes[..]).unwrap(), z);
    let mut csv = Vec::new();
    io::write_csv(&mut csv, z.matrix()).unwrap();
    let back = io::read_csv(&csv[..]).unwrap();
    assert_eq!(&back, z.matrix());
    assert!(io::read_binary(&bytes[..20]).is_err());
}

#[test]
fn oracle_locks_the_scalar_normalization() {
    for c in [-1.5, 0.0, 2.0] {
        for (n, k) in [(2usize, 1usize), (4, 1), (4, 3), (5, 2)] {
            let p = free_power_oracle(&MeasureSpec::dirac(c), n, k, 20 * n, 2, Seed::new(1)).unwrap();
            let want = n as f64 / k as f64 * c;
            assert!((p.min_supp - want).abs() < 1e-9 && (p.max_supp - want).abs() < 1e-9);
        }
    }
}

#[test]
fn oracle_endpoints() {
    let sc = free_power_oracle(
        &MeasureSpec::semicircle(0.0, 1.0).unwrap(),
        2,
        1,
        2000,
        10,
        Seed::new(5),
    )
    .unwrap();
    let e = 2.0 * 2f64.sqrt();
    assert!(
        (sc.max_supp - e).abs() < 0.05 && (sc.min_supp + e).abs() < 0.05,
        "{sc:?}"
    );
    let two = MeasureSpec::atomic(vec![(0.5, -1.0), (0.5, 1.0)]).unwrap();
    let b = free_power_oracle(&two, 2, 1, 2000, 4, Seed::new(6)).unwrap();
    assert!(
        (b.max_supp - 2.0).abs() < 0.05 && (b.min_supp + 2.0).abs() < 0.05,
        "{b:?}"
    );
}

#[test]
fn spectrum_utilities() {
    let s = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])
        .spectrum()
        .unwrap();
    assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    assert_eq!((s.min(), s.max(), s.norm()), (1.0, 3.0, 3.0));
    let h = Spectrum::from_unsorted(vec![0.5, 0.5, 1.5]).histogram(2, 0.0, 2.0);
    assert_eq!(h.counts, vec![2, 1]);
    let m = Mat::<c64>::from_fn(
        2,
        2,
        |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 1.0) },
    );
    assert!(HermitianMatrix::new(m).is_err());
}

#[test]
fn apply_choi_map_is_linear() {
    let c = BipartiteOperator::new(3, 2, sample_gue(6, Seed::new(7))).unwrap();
    let r1 = sample_gue(3, Seed::new(8));
    let r2 = sample_gue(3, Seed::new(9));
    let combo = HermitianMatrix::new(
        r1.as_mat() * faer::Scale(c64::new(0.3, 0.0)) + r2.as_mat() * faer::Scale(c64::new(-1.2, 0.0)),
    )
    .unwrap();
    let lhs = c.apply_choi_map(&combo).unwrap();
    let a = c.apply_choi_map(&r1).unwrap();
    let b = c.apply_choi_map(&r2).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!((lhs.get(i, j) - (a.get(i, j) * 0.3 - b.get(i, j) * 1.2)).norm() < 1e-14);
        }
    }
    let ones = c.apply_choi_map(&HermitianMatrix::identity(3)).unwrap();
    let mut sum = Mat::<c64>::zeros(2, 2);
    for i in 0..3 {
        sum += c.block(i, i);
    }
    assert!((ones.as_mat() - sum.as_ref()).norm_max() < 1e-14);
}
