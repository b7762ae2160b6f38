use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::HermitianMatrix;
use super::sampling::{deterministic_diagonal, sample_haar_isometry};
use super::seed::Seed;
use crate::error::{domain, Result};
use crate::measures::{MeasureSpec, SupportMethod, SupportProfile};

/// Per-trial extremes of a Monte Carlo compression run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Rescaled `(λ_min, λ_max)` of each compressed corner.
    pub extremes: Vec<(f64, f64)>,
    pub profile: SupportProfile,
}

/// Brute-force estimate of the support of `spec^{⊞n/k}`.
///
/// Each trial compresses `U·D·U*` (with `D` the quantile diagonal of size `m`
/// and Haar `U`) onto a coordinate subspace of dimension `m·k/n` and rescales
/// its spectrum by `n/k`. The reported endpoints are trial averages of the
/// per-trial extremes.
pub fn free_power_oracle(
    spec: &MeasureSpec,
    n: usize,
    k: usize,
    m: usize,
    trials: usize,
    seed: Seed,
) -> Result<SupportProfile> {
    Ok(free_power_oracle_run(spec, n, k, m, trials, seed)?.profile)
}

pub fn free_power_oracle_run(
    spec: &MeasureSpec,
    n: usize,
    k: usize,
    m: usize,
    trials: usize,
    seed: Seed,
) -> Result<OracleRun> {
    if k == 0 || k > n {
        return Err(domain(format!(
            "compression ratio k/n needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if m == 0 || !m.is_multiple_of(n) {
        return Err(domain(format!("matrix size {m} must be a positive multiple of n={n}")));
    }
    if trials == 0 {
        return Err(domain("oracle needs at least one trial"));
    }
    let diag = deterministic_diagonal(spec, m)?;
    let r = m / n * k;
    let factor = n as f64 / k as f64;
    let extremes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let v = sample_haar_isometry(m, r, seed.with_label("oracle").with_trial(t as u64))?;
            let dv = Mat::from_fn(m, r, |i, j| v[(i, j)] * diag[i]);
            let corner = HermitianMatrix::hermitian_part(v.adjoint() * &dv);
            let s = corner.spectrum()?;
            Ok((factor * s.min(), factor * s.max()))
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = extremes.iter().map(|e| e.0).sum::<f64>() / trials as f64;
    let hi = extremes.iter().map(|e| e.1).sum::<f64>() / trials as f64;
    Ok(OracleRun {
        n,
        k,
        m,
        extremes,
        profile: SupportProfile::from_parts(vec![(lo, hi)], Vec::new(), SupportMethod::MonteCarlo),
    })
}
