//! Finite-size probe of the reduction-criterion limit.
//!
//! The Choi matrix `C = I − n·P`, with `P` a Haar-random projection of rank
//! `round(ε·nd)`, defines a map whose positivity test on `ℂⁿ ⊗ ℂᵐ` approaches
//! the reduction criterion as `ε → 0`. The probe compares both tests on a
//! fixed ensemble of random states.

use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::rmt::{sample_ginibre, sample_haar_isometry, BipartiteOperator, HermitianMatrix, Seed};

/// A test passes when its bottom eigenvalue is at least `-PASS_TOL`.
pub const PASS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// `GG*/Tr(GG*)` with square Ginibre `G`.
    Wishart,
    Pure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub kind: StateKind,
    /// `λ_min(I_n ⊗ Tr_n(ρ) − ρ)`.
    pub red_min: f64,
    /// `λ_min([Φ_C ⊗ id_m](ρ))`.
    pub map_min: f64,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub eps: f64,
    pub rank: usize,
    pub states: Vec<StateRecord>,
    pub agreement_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrend {
    pub reports: Vec<ProbeReport>,
    /// Agreement rate never drops along the schedule.
    pub non_decreasing: bool,
    pub final_rate: f64,
}

/// `I_{nd} − n·VV*` for a Haar `nd × round(ε·nd)` isometry `V`.
pub fn probe_choi(n: usize, d: usize, eps: f64, seed: Seed) -> Result<BipartiteOperator> {
    let rank = probe_rank(n, d, eps)?;
    let v = sample_haar_isometry(n * d, rank, seed)?;
    let mut c = &v * v.adjoint() * faer::Scale(c64::new(-(n as f64), 0.0));
    for i in 0..n * d {
        c[(i, i)] += c64::new(1.0, 0.0);
    }
    BipartiteOperator::new(n, d, HermitianMatrix::hermitian_part(c))
}

fn probe_rank(n: usize, d: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(domain(format!("projection trace must lie in (0, 1], got {eps}")));
    }
    let rank = (eps * (n * d) as f64).round() as usize;
    if rank == 0 {
        return Err(domain(format!(
            "eps*n*d = {} rounds to a rank-0 projection",
            eps * (n * d) as f64
        )));
    }
    Ok(rank)
}

/// Partial trace over the first (`n`-dimensional) factor of `ρ` on `ℂⁿ ⊗ ℂᵐ`.
pub fn partial_trace_first(rho: &HermitianMatrix, n: usize, m: usize) -> Result<HermitianMatrix> {
    check_state_dim(rho, n, m)?;
    let r = rho.as_mat();
    Ok(HermitianMatrix::hermitian_part(Mat::from_fn(m, m, |a, b| {
        (0..n).map(|i| r[(i * m + a, i * m + b)]).sum()
    })))
}

fn check_state_dim(rho: &HermitianMatrix, n: usize, m: usize) -> Result<()> {
    if rho.dim() != n * m {
        return Err(Error::ShapeMismatch(format!(
            "state of dimension {} on {n}x{m}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Bottom eigenvalue of `I_n ⊗ Tr_n(ρ) − ρ`.
pub fn red_test(rho: &HermitianMatrix, n: usize, m: usize) -> Result<f64> {
    let rb = partial_trace_first(rho, n, m)?;
    let r = rho.as_mat();
    let mat = Mat::from_fn(n * m, n * m, |row, col| {
        let same = row / m == col / m;
        let base = if same {
            rb.get(row % m, col % m)
        } else {
            c64::new(0.0, 0.0)
        };
        base - r[(row, col)]
    });
    linalg::min_eigenvalue(mat.as_ref())
}

/// `[Φ_C ⊗ id_m](ρ) = Σ_ij C(i,j) ⊗ ρ(i,j)` on `ℂᵈ ⊗ ℂᵐ`.
pub fn apply_choi_tensor_id(c: &BipartiteOperator, rho: &HermitianMatrix, m: usize) -> Result<HermitianMatrix> {
    let (n, d) = (c.n(), c.d());
    check_state_dim(rho, n, m)?;
    let r = rho.as_mat();
    let mut out = Mat::<c64>::zeros(d * m, d * m);
    for i in 0..n {
        for j in 0..n {
            let blk = c.block(i, j);
            for b in 0..m {
                for a in 0..m {
                    let w = r[(i * m + a, j * m + b)];
                    if w == c64::new(0.0, 0.0) {
                        continue;
                    }
                    for s in 0..d {
                        for t in 0..d {
                            out[(t * m + a, s * m + b)] += blk[(t, s)] * w;
                        }
                    }
                }
            }
        }
    }
    Ok(HermitianMatrix::hermitian_part(out))
}

pub fn map_test(c: &BipartiteOperator, rho: &HermitianMatrix, m: usize) -> Result<f64> {
    apply_choi_tensor_id(c, rho, m)?.min_eigenvalue()
}

/// Alternating Wishart and pure states on `ℂⁿ ⊗ ℂᵐ`, `samples` in total.
pub fn probe_states(n: usize, m: usize, samples: usize, seed: Seed) -> Vec<(StateKind, HermitianMatrix)> {
    let dim = n * m;
    (0..samples)
        .map(|s| {
            let key = seed.with_label("probe_states").with_trial(s as u64);
            if s % 2 == 0 {
                let g = sample_ginibre(dim, dim, key);
                let w = &g * g.adjoint();
                let tr: f64 = (0..dim).map(|i| w[(i, i)].re).sum();
                (
                    StateKind::Wishart,
                    HermitianMatrix::hermitian_part(w * faer::Scale(c64::new(1.0 / tr, 0.0))),
                )
            } else {
                let g = sample_ginibre(dim, 1, key);
                let nrm = linalg::norm(g.col_as_slice(0));
                let psi: Vec<c64> = g.col_as_slice(0).iter().map(|z| z / nrm).collect();
                (
                    StateKind::Pure,
                    HermitianMatrix::hermitian_part(Mat::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj())),
                )
            }
        })
        .collect()
}

fn probe_with_states(
    n: usize,
    d: usize,
    eps: f64,
    m: usize,
    states: &[(StateKind, HermitianMatrix)],
    seed: Seed,
) -> Result<ProbeReport> {
    if m == 0 || m > d {
        return Err(domain(format!("need 1 <= m <= d, got m={m}, d={d}")));
    }
    let rank = probe_rank(n, d, eps)?;
    let c = probe_choi(n, d, eps, seed.with_label("probe_choi"))?;
    let records = states
        .par_iter()
        .map(|(kind, rho)| {
            let red = red_test(rho, n, m)?;
            let map = map_test(&c, rho, m)?;
            Ok(StateRecord {
                kind: *kind,
                red_min: red,
                map_min: map,
                agree: (red >= -PASS_TOL) == (map >= -PASS_TOL),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let agree = records.iter().filter(|r| r.agree).count();
    Ok(ProbeReport {
        n,
        d,
        m,
        eps,
        rank,
        agreement_rate: if records.is_empty() {
            1.0
        } else {
            agree as f64 / records.len() as f64
        },
        states: records,
    })
}

/// Agreement between the map test and the reduction test at one `ε`.
pub fn reduction_limit_probe(
    n: usize,
    d: usize,
    eps: f64,
    m: usize,
    samples: usize,
    seed: Seed,
) -> Result<ProbeReport> {
    probe_with_states(n, d, eps, m, &probe_states(n, m, samples, seed), seed)
}

/// [`reduction_limit_probe`] along a schedule of `ε` values on one fixed state set.
pub fn reduction_limit_trend(
    n: usize,
    d: usize,
    schedule: &[f64],
    m: usize,
    samples: usize,
    seed: Seed,
) -> Result<ProbeTrend> {
    if schedule.is_empty() {
        return Err(domain("empty schedule"));
    }
    let states = probe_states(n, m, samples, seed);
    let reports = schedule
        .iter()
        .map(|&eps| probe_with_states(n, d, eps, m, &states, seed))
        .collect::<Result<Vec<_>>>()?;
    let non_decreasing = reports.windows(2).all(|w| w[1].agreement_rate >= w[0].agreement_rate);
    Ok(ProbeTrend {
        final_rate: reports.last().map(|r| r.agreement_rate).unwrap_or(0.0),
        non_decreasing,
        reports,
    })
}
