//! k-positivity of the maps attached to a compactly supported law `μ`: the map
//! is k-positive on `M_n` exactly when `μ^{⊞n/k}` is supported in `[0, ∞)`.
//! Closed-form thresholds for the semicircle, shifted free Poisson and
//! small-rank projection families live here too.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::freeconv::free_power;
use crate::measures::{MeasureSpec, SupportMethod};

/// Support tolerance for closed-form supports.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Support tolerance (and boundary band) for numeric supports.
pub const NUMERIC_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    ClosedForm,
    CriticalPoint,
    /// Numeric support whose bottom lies within [`NUMERIC_TOL`] of zero.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub n: usize,
    pub k: usize,
    pub is_k_positive: bool,
    /// Bottom of the support of `μ^{⊞n/k}`.
    pub margin: f64,
    pub method: VerdictMethod,
}

fn check_range(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(domain(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

pub fn is_k_positive(spec: &MeasureSpec, n: usize, k: usize) -> Result<PositivityVerdict> {
    check_range(n, k)?;
    let res = free_power(spec, n as f64 / k as f64)?;
    let margin = res.support.min_supp;
    let (tol, method) = match res.support.method {
        SupportMethod::CriticalPoint | SupportMethod::MonteCarlo => {
            let m = if margin.abs() < NUMERIC_TOL {
                VerdictMethod::Boundary
            } else {
                VerdictMethod::CriticalPoint
            };
            (NUMERIC_TOL, m)
        }
        SupportMethod::ClosedForm => (CLOSED_FORM_TOL, VerdictMethod::ClosedForm),
    };
    Ok(PositivityVerdict {
        n,
        k,
        is_k_positive: margin >= -tol,
        margin,
        method,
    })
}

/// Verdicts for `k = 1..=n`.
pub fn verdict_table(spec: &MeasureSpec, n: usize) -> Result<Vec<PositivityVerdict>> {
    (1..=n).map(|k| is_k_positive(spec, n, k)).collect()
}

/// Largest `k` for which the map is k-positive, `0` if it is not even positive.
pub fn max_k_positive(spec: &MeasureSpec, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let mut best = 0;
    for k in 1..=n {
        if !is_k_positive(spec, n, k)?.is_k_positive {
            break;
        }
        best = k;
    }
    Ok(best)
}

/// `min(n, ⌊a²n/(4σ²)⌋)` for `a > 0`, else `0`.
pub fn semicircle_threshold(a: f64, sigma: f64, n: usize) -> usize {
    if !(a > 0.0) || !(sigma > 0.0) {
        return 0;
    }
    let x = a * a * n as f64 / (4.0 * sigma * sigma);
    // absorb rounding when x is an exact integer in exact arithmetic
    let k = (x * (1.0 + 1e-12)).floor();
    (k.max(0.0) as usize).min(n)
}

fn mp_bottom_formula(a: f64, t: f64, n: usize, k: usize) -> f64 {
    let r = k as f64 / n as f64;
    let tn = t / r;
    1.0 - r * a * (1.0 + tn + 2.0 * tn.sqrt())
}

/// Bottom of the support after compression for the law of `1 - a·X_t`:
/// `1 - (k/n)·a·(1 + tn/k + 2√(tn/k))`.
pub fn mp_bottom(a: f64, t: f64, n: usize, k: usize) -> Result<f64> {
    check_range(n, k)?;
    if !(a > 0.0) || !(t > 0.0) {
        return Err(domain(format!("need a > 0 and t > 0, got a={a}, t={t}")));
    }
    Ok(mp_bottom_formula(a, t, n, k))
}

/// Limiting threshold `n/k` on `a` for `1 - a·P` with `P` a projection of
/// vanishing trace.
pub fn small_rank_threshold(n: usize, k: usize) -> Result<f64> {
    check_range(n, k)?;
    Ok(n as f64 / k as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SandwichStatus {
    Certified,
    Refuted,
    Inconclusive,
}

/// Three-valued verdict for `1 - a·P` at finite projection trace `ε`, from the
/// two-sided bound `1 - (a+η)Y <= X <= 1 - (a-η)Y` with `η = 6√ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallRankVerdict {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub projection_trace: f64,
    pub eta: f64,
    /// Compressed bottom for `a + η`; non-negative certifies k-positivity.
    pub lower_bottom: f64,
    /// Compressed bottom for `a - η`; negative refutes k-positivity.
    pub upper_bottom: f64,
    pub status: SandwichStatus,
}

impl SmallRankVerdict {
    pub fn is_definite(&self) -> bool {
        self.status != SandwichStatus::Inconclusive
    }
}

pub fn finite_eps_small_rank_verdict(n: usize, k: usize, a: f64, projection_trace: f64) -> Result<SmallRankVerdict> {
    check_range(n, k)?;
    let eps = projection_trace;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("projection trace must lie in (0,1), got {eps}")));
    }
    let eta = 6.0 * eps.sqrt();
    let lower_bottom = mp_bottom_formula(a + eta, eps, n, k);
    let upper_bottom = mp_bottom_formula(a - eta, eps, n, k);
    let status = if lower_bottom >= 0.0 {
        SandwichStatus::Certified
    } else if upper_bottom < 0.0 {
        SandwichStatus::Refuted
    } else {
        SandwichStatus::Inconclusive
    };
    Ok(SmallRankVerdict {
        n,
        k,
        a,
        projection_trace: eps,
        eta,
        lower_bottom,
        upper_bottom,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_verdicts() {
        let sc = MeasureSpec::semicircle(1.0, 1.0).unwrap();
        let v2 = is_k_positive(&sc, 8, 2).unwrap();
        assert!(v2.is_k_positive);
        assert!(v2.margin.abs() < 1e-12);
        assert_eq!(v2.method, VerdictMethod::ClosedForm);
        assert!(!is_k_positive(&sc, 8, 3).unwrap().is_k_positive);
        assert_eq!(max_k_positive(&sc, 8).unwrap(), 2);
        assert_eq!(
            max_k_positive(&MeasureSpec::semicircle(-1.0, 1.0).unwrap(), 8).unwrap(),
            0
        );
        assert!(is_k_positive(&sc, 8, 9).is_err());
        assert!(is_k_positive(&sc, 8, 0).is_err());
    }

    #[test]
    fn positive_dirac_is_completely_positive() {
        let d = MeasureSpec::dirac(5.0);
        for k in 1..=6 {
            assert!(is_k_positive(&d, 6, k).unwrap().is_k_positive);
        }
        assert_eq!(max_k_positive(&d, 6).unwrap(), 6);
    }

    #[test]
    fn shifted_free_poisson_threshold() {
        let m = MeasureSpec::shifted_free_poisson(0.6, 0.25).unwrap();
        assert_eq!(max_k_positive(&m, 4).unwrap(), 2);
    }

    #[test]
    fn closed_form_thresholds() {
        assert_eq!(semicircle_threshold(1.0, 1.0, 8), 2);
        assert_eq!(semicircle_threshold(2.0, 1.0, 5), 5);
        assert_eq!(semicircle_threshold(0.0, 1.0, 3), 0);
        let b2 = mp_bottom(0.6, 0.25, 4, 2).unwrap();
        assert!((b2 - (1.0 - 0.3 * (1.5 + 2.0 * 0.5f64.sqrt()))).abs() < 1e-15);
        assert!((b2 - 0.125736).abs() < 1e-6);
        assert!((mp_bottom(0.6, 0.25, 4, 3).unwrap() + 0.119615).abs() < 1e-6);
        assert!((mp_bottom(1e-12, 0.25, 4, 3).unwrap() - 1.0).abs() < 1e-11);
        assert!(mp_bottom(0.6, 0.25, 4, 5).is_err());
        assert_eq!(small_rank_threshold(4, 2).unwrap(), 2.0);
        assert_eq!(small_rank_threshold(5, 5).unwrap(), 1.0);
        assert_eq!(small_rank_threshold(9, 1).unwrap(), 9.0);
    }

    #[test]
    fn sandwich_examples() {
        let st = |a, e| finite_eps_small_rank_verdict(4, 2, a, e).unwrap().status;
        assert_eq!(st(1.5, 1e-6), SandwichStatus::Certified);
        assert_eq!(st(2.5, 1e-6), SandwichStatus::Refuted);
        assert_eq!(st(2.0, 0.01), SandwichStatus::Inconclusive);
    }

    #[test]
    fn verdict_json_keys() {
        let v = is_k_positive(&MeasureSpec::semicircle(1.0, 1.0).unwrap(), 8, 3).unwrap();
        let j: serde_json::Value = serde_json::to_value(&v).unwrap();
        let mut keys: Vec<_> = j.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["is_k_positive", "k", "margin", "method", "n"]);
        assert_eq!(j["method"], "closed_form");
    }
}
