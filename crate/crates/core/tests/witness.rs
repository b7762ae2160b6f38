use std::fs::File;
use std::path::PathBuf;

use faer::{c64, Mat};
use freepos::rmt::{io, sample_ginibre, BipartiteOperator, HermitianMatrix, Seed};
use freepos::witness::{
    build_coupled_pair, certify_pair, detection_verdict, indecomposability_certificate, l_separability_witness,
    map_test, red_test, reduction_limit_probe, separability_threshold, separable_construction, witness_value,
    IndecomposabilityReport, StateKind, WitnessExperimentConfig,
};
use freepos::Error;

fn data(name: &str) -> HermitianMatrix {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    io::read_csv(File::open(path).unwrap()).unwrap()
}

fn op(name: &str) -> BipartiteOperator {
    BipartiteOperator::new(3, 3, data(name)).unwrap()
}

fn product_state(x: &[c64], y: &[c64]) -> HermitianMatrix {
    let v: Vec<c64> = x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
    let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    HermitianMatrix::new(Mat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj() / nrm)).unwrap()
}

#[test]
fn tiles_state_is_ppt_and_entangled() {
    let rho = op("tiles_state.csv");
    let c = op("tiles_witness_choi.csv");
    assert!((rho.matrix().trace() - 1.0).abs() < 1e-12);
    let cert = certify_pair(&rho, &c, 0.0).unwrap();
    assert!(cert.certified);
    assert!(
        cert.witness < 0.0 && cert.lambda_min_z > 0.0 && cert.lambda_min_ptz > 0.0,
        "{cert:?}"
    );
}

#[test]
fn tiles_witness_is_nonnegative_on_product_states() {
    let c = op("tiles_witness_choi.csv");
    let mut worst = f64::INFINITY;
    for s in 0..3000 {
        let g = sample_ginibre(6, 1, Seed::new(s).with_label("product"));
        let x: Vec<c64> = (0..3).map(|i| g[(i, 0)]).collect();
        let y: Vec<c64> = (3..6).map(|i| g[(i, 0)]).collect();
        worst = worst.min(witness_value(&BipartiteOperator::new(3, 3, product_state(&x, &y)).unwrap(), &c).unwrap());
    }
    assert!(worst > 0.0, "{worst}");
}

#[test]
fn certificate_requires_ppt() {
    let bell = op("bell_state_3x3.csv");
    let c = op("tiles_witness_choi.csv");
    let cert = certify_pair(&bell, &c, 0.0).unwrap();
    assert!(!cert.certified);
    assert!((cert.lambda_min_ptz + 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn detection_regime_run() {
    // 2(2.1) = 4.2 < 0.9·6 = 5.4; witness limit 4.2·6 − 0.9·36 = −7.2
    let cfg = WitnessExperimentConfig::new(36, 10, 0.9, 0.1, 3, Seed::new(1));
    assert!(cfg.in_detection_regime());
    let report = detection_verdict(&cfg).unwrap();
    assert!((report.theory.witness_limit + 7.2).abs() < 1e-12);
    assert_eq!(report.aggregates.detections, 3);
    assert!(report.regime_consistent());
    for t in &report.trials {
        assert!((t.witness + 7.2).abs() < 1.0, "{t:?}");
        // bottom of Z tends to 2 − 2α = 0.2
        assert!((t.lambda_min_z - 0.2).abs() < 0.15, "{t:?}");
    }
    let certs = IndecomposabilityReport::from_detection(report).unwrap();
    assert_eq!(certs.issued, 3);
    assert!(certs.is_sound());
}

#[test]
fn outside_the_regime() {
    let cfg = WitnessExperimentConfig::new(4, 60, 0.5, 0.1, 4, Seed::new(2));
    assert!(!cfg.in_detection_regime());
    let report = detection_verdict(&cfg).unwrap();
    assert_eq!(report.aggregates.detections, 0);
    assert!(report.regime_consistent());
    assert!(matches!(indecomposability_certificate(&cfg), Err(Error::Domain(_))));
    assert!(IndecomposabilityReport::from_detection(report).is_err());
}

#[test]
fn coupled_pair_is_reproducible() {
    let cfg = WitnessExperimentConfig::new(3, 4, 0.5, 0.1, 2, Seed::new(3));
    let a = build_coupled_pair(&cfg, 1).unwrap();
    let b = build_coupled_pair(&cfg, 1).unwrap();
    assert_eq!(io::to_bytes(&a.z), io::to_bytes(&b.z));
    assert_eq!(io::to_bytes(&a.c), io::to_bytes(&b.c));
    let other = build_coupled_pair(&cfg, 0).unwrap();
    assert_ne!(io::to_bytes(&a.z), io::to_bytes(&other.z));
}

#[test]
fn l_separability() {
    // 2 + ε = 3 > 2√2, and 2·3 = 6 < 0.9·8 = 7.2
    let cfg = WitnessExperimentConfig::new(64, 6, 0.9, 1.0, 1, Seed::new(4));
    let r = l_separability_witness(&cfg, 2).unwrap();
    assert!(r.l_positivity.is_k_positive && r.l_positivity.margin > 0.0);
    assert_eq!(r.certified_not_l_separable, r.detection.aggregates.detections);
    assert_eq!(r.certified_not_l_separable, 1);
    let weak = WitnessExperimentConfig::new(64, 6, 0.9, 0.5, 1, Seed::new(4));
    assert!(matches!(l_separability_witness(&weak, 2), Err(Error::Domain(_))));
}

#[test]
fn threshold_values() {
    let t = separability_threshold(10_000).unwrap();
    assert!((t.x_star - (2.0 + 4.0 * 9999.0 / 100.0)).abs() < 1e-9);
    assert!((t.alpha_star * t.x_star - 2.0).abs() < 1e-12);
    assert!((t.ball_ratio - 8.0392).abs() < 1e-9);
    assert!(separability_threshold(1).is_err());
}

#[test]
fn separable_construction_reassembles() {
    let s = separable_construction(3, 40, 0.2, 0.5, Seed::new(5)).unwrap();
    assert!((s.diagnostics.x - 10.0).abs() < 1e-12);
    assert!(s.diagnostics.reassembly_residual < 1e-10);
    assert_eq!(s.y.n(), 3);
    assert!(separable_construction(3, 40, 1.2, 0.5, Seed::new(5)).is_err());
}

#[test]
fn probe_tests_on_known_states() {
    let (n, m) = (3, 3);
    let e0 = [c64::new(1.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0)];
    let y = [c64::new(0.6, 0.0), c64::new(0.0, 0.8), c64::new(0.0, 0.0)];
    // pure product states sit on the boundary of both tests, so mix in the identity
    let pure = product_state(&e0, &y);
    let sep = HermitianMatrix::new(Mat::from_fn(9, 9, |i, j| {
        pure.get(i, j) * 0.5
            + if i == j {
                c64::new(0.5 / 9.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
    }))
    .unwrap();
    assert!(red_test(&sep, n, m).unwrap() >= -1e-12);
    let bell = data("bell_state_3x3.csv");
    assert!((red_test(&bell, n, m).unwrap() + 2.0 / 3.0).abs() < 1e-12);

    let c = freepos::witness::probe_choi(n, 300, 1e-3, Seed::new(6)).unwrap();
    assert!(map_test(&c, &sep, m).unwrap() >= -1e-9);
    assert!(map_test(&c, &bell, m).unwrap() < 0.0);
}

#[test]
fn probe_report_shape() {
    let r = reduction_limit_probe(3, 40, 0.05, 3, 6, Seed::new(7)).unwrap();
    assert_eq!(r.rank, 6);
    assert_eq!(r.states.len(), 6);
    assert_eq!(r.states[0].kind, StateKind::Wishart);
    assert_eq!(r.states[1].kind, StateKind::Pure);
    let agree = r.states.iter().filter(|s| s.agree).count() as f64 / 6.0;
    assert_eq!(r.agreement_rate, agree);
    assert!(reduction_limit_probe(3, 40, 0.05, 41, 2, Seed::new(7)).is_err());
    assert!(reduction_limit_probe(3, 40, 0.0, 3, 2, Seed::new(7)).is_err());
}
