use serde::{Deserialize, Serialize};

use super::{detection_verdict, witness_value, TrialRecord, WitnessExperimentConfig, WitnessReport};
use crate::error::{domain, Result};
use crate::measures::MeasureSpec;
use crate::positivity::{is_k_positive, PositivityVerdict};
use crate::rmt::BipartiteOperator;

/// Per-trial indecomposability verdict with its margin triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub trial: usize,
    pub certified: bool,
    pub witness: f64,
    pub lambda_min_z: f64,
    pub lambda_min_ptz: f64,
}

impl CertificateRecord {
    fn from_values(trial: usize, witness: f64, lz: f64, lpt: f64, tol: f64) -> Self {
        CertificateRecord {
            trial,
            certified: witness < -tol && lz >= -tol && lpt >= -tol,
            witness,
            lambda_min_z: lz,
            lambda_min_ptz: lpt,
        }
    }

    fn from_trial(t: &TrialRecord, tol: f64) -> Self {
        Self::from_values(t.trial, t.witness, t.lambda_min_z, t.lambda_min_ptz, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndecomposabilityReport {
    pub records: Vec<CertificateRecord>,
    pub issued: usize,
    pub rate: f64,
    pub detection: WitnessReport,
}

impl IndecomposabilityReport {
    /// Certificates from an existing detection run on the same configuration.
    pub fn from_detection(report: WitnessReport) -> Result<Self> {
        check_regime(&report.config)?;
        let tol = report.config.tol_w;
        let records: Vec<CertificateRecord> = report
            .trials
            .iter()
            .map(|t| CertificateRecord::from_trial(t, tol))
            .collect();
        let issued = records.iter().filter(|r| r.certified).count();
        Ok(IndecomposabilityReport {
            rate: issued as f64 / records.len() as f64,
            issued,
            records,
            detection: report,
        })
    }

    /// Every issued certificate has a negative witness and a PSD, PPT state.
    pub fn is_sound(&self) -> bool {
        let tol = self.detection.config.tol_w;
        self.records
            .iter()
            .all(|r| !r.certified || (r.witness < 0.0 && r.lambda_min_z >= -tol && r.lambda_min_ptz >= -tol))
    }
}

fn check_regime(cfg: &WitnessExperimentConfig) -> Result<()> {
    if !cfg.in_detection_regime() {
        return Err(domain(format!(
            "indecomposability needs 2(2+eps) < alpha*sqrt(n), got {} >= {}",
            2.0 * (2.0 + cfg.shift_eps),
            cfg.alpha * (cfg.n as f64).sqrt()
        )));
    }
    Ok(())
}

/// Certifies, trial by trial, that the map with Choi matrix `C` is indecomposable:
/// a decomposable positive map cannot take a negative value on a PPT state.
pub fn indecomposability_certificate(cfg: &WitnessExperimentConfig) -> Result<IndecomposabilityReport> {
    cfg.validate()?;
    check_regime(cfg)?;
    IndecomposabilityReport::from_detection(detection_verdict(cfg)?)
}

/// The same certificate for an explicit `(Z, C)` pair.
pub fn certify_pair(z: &BipartiteOperator, c: &BipartiteOperator, tol: f64) -> Result<CertificateRecord> {
    let witness = witness_value(z, c)?;
    let lz = z.min_eigenvalue()?;
    let lpt = z.partial_transpose().min_eigenvalue()?;
    Ok(CertificateRecord::from_values(0, witness, lz, lpt, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LSeparabilityReport {
    pub l: usize,
    /// Analytic l-positivity verdict for the limiting Choi law `SC_{(2+ε)/√n, 1}`.
    pub l_positivity: PositivityVerdict,
    /// Trials whose PPT state is certified not l-separable.
    pub certified_not_l_separable: usize,
    pub detection: WitnessReport,
}

/// Witness run certifying "PPT but not l-separable" for the sampled states.
///
/// Requires the limiting map to be l-positive, i.e. `2 + ε > 2√l`; the support
/// bottom `√n(2 + ε − 2√l)/l` must be strictly positive.
pub fn l_separability_witness(cfg: &WitnessExperimentConfig, l: usize) -> Result<LSeparabilityReport> {
    cfg.validate()?;
    if l == 0 || l > cfg.n {
        return Err(domain(format!("need 1 <= l <= n, got l={l}, n={}", cfg.n)));
    }
    if 2.0 + cfg.shift_eps <= 2.0 * (l as f64).sqrt() {
        return Err(domain(format!(
            "map is not asymptotically {l}-positive: 2+eps = {} <= 2*sqrt(l) = {}",
            2.0 + cfg.shift_eps,
            2.0 * (l as f64).sqrt()
        )));
    }
    let law = MeasureSpec::semicircle((2.0 + cfg.shift_eps) / (cfg.n as f64).sqrt(), 1.0)?;
    let verdict = is_k_positive(&law, cfg.n, l)?;
    if verdict.margin <= 0.0 {
        return Err(domain(format!(
            "limiting Choi law has support bottom {} <= 0 at l={l}",
            verdict.margin
        )));
    }
    let detection = detection_verdict(cfg)?;
    let certified = detection.trials.iter().filter(|t| t.detected).count();
    Ok(LSeparabilityReport {
        l,
        l_positivity: verdict,
        certified_not_l_separable: certified,
        detection,
    })
}
