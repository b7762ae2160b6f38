//! GUE entanglement-witness experiments.
//!
//! A single Gaussian family `{X_ij}, {Y_ij}` yields both a PPT state
//! candidate `Z = 2I − α·G` and the Choi matrix `C = ((2+ε)/√n)I + G'` of a
//! positive map, where `G'` is the assembly of the transposed family. The Bell
//! witness `⟨B, [Φ_C ⊗ id](Z) B⟩` then detects `Z` as entangled once
//! `2(2+ε) < α√n`.

mod certificate;
mod reduction;
mod separable;

pub use certificate::{
    certify_pair, indecomposability_certificate, l_separability_witness, CertificateRecord, IndecomposabilityReport,
    LSeparabilityReport,
};
pub use reduction::{
    apply_choi_tensor_id, map_test, partial_trace_first, probe_choi, probe_states, red_test, reduction_limit_probe,
    reduction_limit_trend, ProbeReport, ProbeTrend, StateKind, StateRecord, PASS_TOL,
};
pub use separable::{
    separability_threshold, separable_construction, separable_construction_x, ComponentKind, ComponentRecord,
    SeparabilityThreshold, SeparableConstruction, SeparableDiagnostics,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rmt::{assemble, Assembly, BipartiteOperator, GaussianFamily, Seed};

/// Default tolerance separating genuine negativity from edge noise.
pub const DEFAULT_TOL_W: f64 = 0.02;

fn default_tol_w() -> f64 {
    DEFAULT_TOL_W
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessExperimentConfig {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub shift_eps: f64,
    pub trials: usize,
    pub seed: Seed,
    #[serde(default = "default_tol_w")]
    pub tol_w: f64,
    /// Keep the full spectra of `Z`, `PT(Z)` and `C` in the report.
    #[serde(default)]
    pub keep_spectra: bool,
}

impl WitnessExperimentConfig {
    pub fn new(n: usize, d: usize, alpha: f64, shift_eps: f64, trials: usize, seed: Seed) -> Self {
        WitnessExperimentConfig {
            n,
            d,
            alpha,
            shift_eps,
            trials,
            seed,
            tol_w: DEFAULT_TOL_W,
            keep_spectra: false,
        }
    }

    /// `α = 0` is accepted as the degenerate case `Z = 2I`.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(domain(format!("need n, d >= 1, got n={}, d={}", self.n, self.d)));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(domain(format!("alpha must lie in [0, 1), got {}", self.alpha)));
        }
        if !(self.shift_eps >= 0.0 && self.shift_eps.is_finite()) {
            return Err(domain(format!(
                "shift_eps must be finite and >= 0, got {}",
                self.shift_eps
            )));
        }
        if self.trials == 0 {
            return Err(domain("trials must be at least 1"));
        }
        if !(self.tol_w >= 0.0 && self.tol_w.is_finite()) {
            return Err(domain(format!("tol_w must be finite and >= 0, got {}", self.tol_w)));
        }
        Ok(())
    }

    /// `2(2+ε) < α√n`: the regime in which the witness detects `Z`.
    pub fn in_detection_regime(&self) -> bool {
        2.0 * (2.0 + self.shift_eps) < self.alpha * (self.n as f64).sqrt()
    }

    fn trial_seed(&self, trial: usize) -> Seed {
        self.seed.with_label("witness").with_trial(trial as u64)
    }
}

/// The state candidate `Z` and the Choi matrix `C`, built from one family.
#[derive(Clone, Debug)]
pub struct CoupledPair {
    pub z: BipartiteOperator,
    pub c: BipartiteOperator,
    pub trial: usize,
    /// Stream key of the shared Gaussian family.
    pub seed: Seed,
}

pub fn build_coupled_pair(cfg: &WitnessExperimentConfig, trial: usize) -> Result<CoupledPair> {
    cfg.validate()?;
    let seed = cfg.trial_seed(trial);
    let family = GaussianFamily::sample(cfg.n, cfg.d, seed);
    Ok(pair_from_family(&family, cfg.alpha, cfg.shift_eps, trial, seed))
}

fn pair_from_family(family: &GaussianFamily, alpha: f64, eps: f64, trial: usize, seed: Seed) -> CoupledPair {
    let g = assemble(family, Assembly::Plain, 0.0);
    let (n, d) = (g.n(), g.d());
    let z = BipartiteOperator::new(n, d, g.into_matrix().scale_shift(-alpha, 2.0)).expect("same shape");
    let c = assemble(family, Assembly::Transposed, (2.0 + eps) / (n as f64).sqrt());
    CoupledPair { z, c, trial, seed }
}

/// `(1/d) Σ_ij Tr[Z(i,j)·C(i,j)^T]`.
pub fn bell_witness(pair: &CoupledPair) -> Result<f64> {
    witness_value(&pair.z, &pair.c)
}

/// [`bell_witness`] on an explicit `(Z, C)`.
pub fn witness_value(z: &BipartiteOperator, c: &BipartiteOperator) -> Result<f64> {
    if z.n() != c.n() || z.d() != c.d() {
        return Err(Error::ShapeMismatch(format!(
            "Z is {}x{} blocks of size {}, C is {}x{} blocks of size {}",
            z.n(),
            z.n(),
            z.d(),
            c.n(),
            c.n(),
            c.d()
        )));
    }
    // Tr[A·B^T] = Σ_rs A_rs B_rs, summed over every block
    let (zm, cm) = (z.matrix().as_mat(), c.matrix().as_mat());
    let mut acc = 0.0;
    for col in 0..z.dim() {
        for row in 0..z.dim() {
            acc += (zm[(row, col)] * cm[(row, col)]).re;
        }
    }
    Ok(acc / z.d() as f64)
}

/// Bottom eigenvalue of `PT(Z)` and whether it clears `-tol`.
pub fn ppt_check(z: &BipartiteOperator, tol: f64) -> Result<(f64, bool)> {
    let lmin = z.partial_transpose().min_eigenvalue()?;
    Ok((lmin, lmin >= -tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub witness: f64,
    pub lambda_min_z: f64,
    pub lambda_min_ptz: f64,
    /// `λ_min(Z) >= -tol_w`.
    pub z_psd: bool,
    /// `λ_min(PT(Z)) >= -tol_w`.
    pub ppt: bool,
    /// Witness below `-tol_w` on a PSD and PPT `Z`.
    pub detected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean_witness: f64,
    pub se_witness: f64,
    pub mean_lambda_min_z: f64,
    pub se_lambda_min_z: f64,
    pub mean_lambda_min_ptz: f64,
    pub se_lambda_min_ptz: f64,
    pub detections: usize,
    pub detection_rate: f64,
}

/// Large-`d` predictions for a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessTheory {
    /// `2(2+ε)√n − αn`.
    pub witness_limit: f64,
    /// Bottom of the support of `Z` and `PT(Z)`: `2 − 2α`.
    pub spectrum_bottom: f64,
    /// `2(2+ε)`.
    pub detection_lhs: f64,
    /// `α√n`.
    pub detection_rhs: f64,
    pub detection_expected: bool,
}

impl WitnessTheory {
    pub fn of(cfg: &WitnessExperimentConfig) -> Self {
        let sn = (cfg.n as f64).sqrt();
        let lhs = 2.0 * (2.0 + cfg.shift_eps);
        let rhs = cfg.alpha * sn;
        WitnessTheory {
            witness_limit: lhs * sn - cfg.alpha * cfg.n as f64,
            spectrum_bottom: 2.0 - 2.0 * cfg.alpha,
            detection_lhs: lhs,
            detection_rhs: rhs,
            detection_expected: lhs < rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    Z,
    #[serde(rename = "PTZ")]
    Ptz,
    C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSpectra {
    pub trial: usize,
    pub kind: SpectrumKind,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub config: WitnessExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Aggregates,
    pub theory: WitnessTheory,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<TrialSpectra>,
}

impl WitnessReport {
    /// Detection in at least 90% of trials inside the regime, in at most 10% outside it.
    pub fn regime_consistent(&self) -> bool {
        if self.theory.detection_expected {
            self.aggregates.detection_rate >= 0.9
        } else {
            self.aggregates.detection_rate <= 0.1
        }
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_trial(cfg: &WitnessExperimentConfig, trial: usize) -> Result<(TrialRecord, Vec<TrialSpectra>)> {
    let pair = build_coupled_pair(cfg, trial)?;
    let witness = bell_witness(&pair)?;
    let z_spec = pair.z.spectrum()?;
    let pt_spec = pair.z.partial_transpose().spectrum()?;
    let (lz, lpt) = (z_spec.min(), pt_spec.min());
    let tol = cfg.tol_w;
    let record = TrialRecord {
        trial,
        witness,
        lambda_min_z: lz,
        lambda_min_ptz: lpt,
        z_psd: lz >= -tol,
        ppt: lpt >= -tol,
        detected: witness < -tol && lz >= -tol && lpt >= -tol,
    };
    let mut spectra = Vec::new();
    if cfg.keep_spectra {
        let c_spec = pair.c.spectrum()?;
        for (kind, s) in [
            (SpectrumKind::Z, z_spec),
            (SpectrumKind::Ptz, pt_spec),
            (SpectrumKind::C, c_spec),
        ] {
            spectra.push(TrialSpectra {
                trial,
                kind,
                eigenvalues: s.values().to_vec(),
            });
        }
    }
    log::debug!("trial {trial}: witness {witness:.4}, lmin Z {lz:.4}, lmin PT(Z) {lpt:.4}");
    Ok((record, spectra))
}

/// Runs every trial of `cfg` and aggregates the witness statistics.
pub fn detection_verdict(cfg: &WitnessExperimentConfig) -> Result<WitnessReport> {
    cfg.validate()?;
    let results = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<Vec<_>>>()?;
    let mut trials = Vec::with_capacity(cfg.trials);
    let mut spectra = Vec::new();
    for (rec, spec) in results {
        trials.push(rec);
        spectra.extend(spec);
    }
    let w: Vec<f64> = trials.iter().map(|t| t.witness).collect();
    let lz: Vec<f64> = trials.iter().map(|t| t.lambda_min_z).collect();
    let lpt: Vec<f64> = trials.iter().map(|t| t.lambda_min_ptz).collect();
    let detections = trials.iter().filter(|t| t.detected).count();
    let ((mw, sw), (mz, sz), (mp, sp)) = (mean_se(&w), mean_se(&lz), mean_se(&lpt));
    Ok(WitnessReport {
        theory: WitnessTheory::of(cfg),
        config: cfg.clone(),
        aggregates: Aggregates {
            mean_witness: mw,
            se_witness: sw,
            mean_lambda_min_z: mz,
            se_lambda_min_z: sz,
            mean_lambda_min_ptz: mp,
            se_lambda_min_ptz: sp,
            detections,
            detection_rate: detections as f64 / trials.len() as f64,
        },
        trials,
        spectra,
    })
}
