use faer::{c64, Mat, MatRef};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compress, Compressor, Frame, KPosResult};
use crate::error::{domain, Result};
use crate::linalg;
use crate::rmt::{sample_haar_isometry, BipartiteOperator, GaussianStream, Seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeeSawOptions {
    pub restarts: usize,
    /// Stop once an iteration lowers the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// `best_value < -certificate_tol` is reported as a negative certificate.
    pub certificate_tol: f64,
    /// Stop a restart as soon as its objective falls below this value.
    pub stop_below: Option<f64>,
}

impl Default for SeeSawOptions {
    fn default() -> Self {
        SeeSawOptions {
            restarts: 32,
            tol: 1e-9,
            max_iter: 500,
            certificate_tol: 1e-9,
            stop_below: None,
        }
    }
}

const MAX_STRETCH: f64 = 64.0;
const LANCZOS_KRYLOV: usize = 40;
const LANCZOS_RESIDUAL: f64 = 1e-7;
const LANCZOS_RESTARTS: usize = 6;

/// Frame, objective and bottom eigenvector of a trial step.
type Candidate = (Mat<c64>, f64, Vec<c64>);

struct Restart {
    value: f64,
    frame: Mat<c64>,
    history: Vec<f64>,
}

/// Alternating minimization of the compressed bottom eigenvalue over rank-k frames.
pub fn see_saw(c: &BipartiteOperator, k: usize, restarts: usize, seed: Seed) -> Result<KPosResult> {
    let opts = SeeSawOptions {
        restarts,
        ..SeeSawOptions::default()
    };
    see_saw_with(c, k, &opts, seed)
}

pub fn see_saw_with(c: &BipartiteOperator, k: usize, opts: &SeeSawOptions, seed: Seed) -> Result<KPosResult> {
    let n = c.n();
    if k == 0 || k > n {
        return Err(domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if opts.restarts == 0 {
        return Err(domain("see-saw needs at least one restart"));
    }
    if k == n {
        // every rank-n frame yields the full operator
        let value = c.min_eigenvalue()?;
        let frame = Frame::from_mat(&Mat::identity(n, n));
        return Ok(KPosResult::from_best(
            k,
            value,
            frame,
            1,
            opts.certificate_tol,
            "see_saw",
            vec![value],
        ));
    }
    let comp = Compressor::new(c);
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|r| run_restart(&comp, k, opts, seed.with_label("see_saw").with_trial(r as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = i;
        }
    }
    let winner = &runs[best];
    let value = linalg::min_eigenvalue(compress(c, winner.frame.as_ref())?.as_ref())?;
    Ok(KPosResult::from_best(
        k,
        value,
        Frame::from_mat(&winner.frame),
        opts.restarts,
        opts.certificate_tol,
        "see_saw",
        winner.history.clone(),
    ))
}

fn run_restart(comp: &Compressor<'_>, k: usize, opts: &SeeSawOptions, seed: Seed) -> Result<Restart> {
    let c = comp.op;
    let mut rng = seed.child(u64::MAX).stream();
    let mut frame = sample_haar_isometry(c.n(), k, seed)?;
    let (mut value, mut w) = linalg::bottom_eigenpair(comp.compress(frame.as_ref()).as_ref())?;
    let mut history = vec![value];
    let mut stretch = 1.0;
    let reached = |v: f64| opts.stop_below.is_some_and(|t| v < t);
    for _ in 0..opts.max_iter {
        if reached(value) {
            break;
        }
        let (mut candidate, mut cand_value, mut cand_w) = step(comp, k, &w, &mut rng)?;
        if !(cand_value < value) {
            break;
        }
        if let Some((v, ev, ew)) = extrapolate(comp, frame.as_ref(), candidate.as_ref(), &cand_w, stretch)? {
            if ev < cand_value {
                candidate = v;
                cand_value = ev;
                cand_w = ew;
                stretch = (stretch * 1.5).min(MAX_STRETCH);
            } else {
                stretch = 1.0;
            }
        }
        let gain = value - cand_value;
        frame = candidate;
        value = cand_value;
        w = cand_w;
        history.push(value);
        if gain < opts.tol {
            break;
        }
    }
    Ok(Restart { value, frame, history })
}

/// One see-saw sweep from the bottom eigenvector `w` of the current compression.
///
/// Writing `w = Σ_a e_a ⊗ w_a`, the `d`-side span of the `w_a` gets an
/// orthonormal basis `Q`; the best state `Σ_b y_b ⊗ Q_b` is the bottom
/// eigenvector of `T[(i,b),(j,c)] = Q_b* C(i,j) Q_c`, and the new frame spans
/// the `y_b`. Both sub-steps can only lower the objective.
fn step(comp: &Compressor<'_>, k: usize, w: &[c64], rng: &mut GaussianStream) -> Result<(Mat<c64>, f64, Vec<c64>)> {
    let c = comp.op;
    let (n, d) = (c.n(), c.d());
    let wmat = Mat::<c64>::from_fn(d, k, |r, a| w[a * d + r]);
    let q_cols = linalg::orthonormal_columns(wmat.as_ref(), 1e-12);
    let kq = q_cols.len().max(1);
    let q = if q_cols.is_empty() {
        Mat::<c64>::from_fn(
            d,
            1,
            |r, _| if r == 0 { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) },
        )
    } else {
        Mat::<c64>::from_fn(d, kq, |r, b| q_cols[b][r])
    };
    let t = contracted(c, q.as_ref());
    let (_, y) = linalg::bottom_eigenpair(t.as_ref())?;
    let ymat = Mat::<c64>::from_fn(n, kq, |i, b| y[i * kq + b]);
    let frame = complete_frame(ymat.as_ref(), k, rng);
    // the minimizer Σ_b y_b ⊗ Q_b in the coordinates of the new frame
    let coeff = frame.adjoint() * &ymat;
    let mut start = vec![c64::new(0.0, 0.0); k * d];
    for a in 0..k {
        for b in 0..kq {
            let z = coeff[(a, b)];
            for r in 0..d {
                start[a * d + r] += z * q[(r, b)];
            }
        }
    }
    let (value, w_new) = bottom_of_compression(comp, frame.as_ref(), &start)?;
    Ok((frame, value, w_new))
}

/// Trial frame `orth(V + s·(V - V_prev·R))`, with `R` the unitary aligning
/// the previous frame to the current one; evaluated but not yet accepted.
fn extrapolate(
    comp: &Compressor<'_>,
    prev: MatRef<'_, c64>,
    cur: MatRef<'_, c64>,
    w: &[c64],
    stretch: f64,
) -> Result<Option<Candidate>> {
    let (n, k) = (cur.nrows(), cur.ncols());
    let d = comp.op.d();
    let overlap = prev.adjoint() * cur;
    let Ok(svd) = overlap.svd() else {
        return Ok(None);
    };
    let align = svd.U() * svd.V().adjoint();
    let aligned = prev * &align;
    let trial = Mat::<c64>::from_fn(n, k, |i, j| cur[(i, j)] + (cur[(i, j)] - aligned[(i, j)]) * stretch);
    let cols = linalg::orthonormal_columns(trial.as_ref(), 1e-10);
    if cols.len() < k {
        return Ok(None);
    }
    let v = Mat::<c64>::from_fn(n, k, |i, j| cols[j][i]);
    // current state Σ_a cur_a ⊗ w_a expressed in the trial frame
    let coeff = v.adjoint() * cur;
    let mut start = vec![c64::new(0.0, 0.0); k * d];
    for b in 0..k {
        for a in 0..k {
            let z = coeff[(b, a)];
            for r in 0..d {
                start[b * d + r] += z * w[a * d + r];
            }
        }
    }
    let (value, wv) = bottom_of_compression(comp, v.as_ref(), &start)?;
    Ok(Some((v, value, wv)))
}

/// Warm-started Lanczos on the compression, falling back to a dense solve.
fn bottom_of_compression(comp: &Compressor<'_>, frame: MatRef<'_, c64>, start: &[c64]) -> Result<(f64, Vec<c64>)> {
    let a = comp.compress(frame);
    let scale = comp.op.matrix().as_mat().norm_max().max(1e-300);
    match linalg::lanczos_bottom(
        a.as_ref(),
        start,
        LANCZOS_KRYLOV,
        LANCZOS_RESIDUAL * scale,
        LANCZOS_RESTARTS,
    ) {
        Some(pair) => Ok(pair),
        None => linalg::bottom_eigenpair(a.as_ref()),
    }
}

/// `T[(i,b),(j,c)] = Q_b* C(i,j) Q_c`, index `(i, b) ↦ i·kq + b`.
fn contracted(c: &BipartiteOperator, q: MatRef<'_, c64>) -> Mat<c64> {
    let (n, d) = (c.n(), c.d());
    let kq = q.ncols();
    let cm = c.matrix().as_mat();
    let mut t = Mat::<c64>::zeros(n * kq, n * kq);
    for j in 0..n {
        // C[:, j-block]·Q, then Q* applied to every row block
        let cq = cm.submatrix(0, j * d, n * d, d) * q;
        for i in 0..n {
            let blk = q.adjoint() * cq.as_ref().submatrix(i * d, 0, d, kq);
            for b in 0..kq {
                for cc in 0..kq {
                    t[(i * kq + b, j * kq + cc)] = blk[(b, cc)];
                }
            }
        }
    }
    linalg::symmetrize(&mut t);
    t
}

/// Orthonormal basis of the column span of `y`, padded with random directions to `k` columns.
fn complete_frame(y: MatRef<'_, c64>, k: usize, rng: &mut GaussianStream) -> Mat<c64> {
    let n = y.nrows();
    let mut basis = linalg::orthonormal_columns(y, 1e-10);
    basis.truncate(k);
    while basis.len() < k {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = Mat::<c64>::from_fn(n, 1, |_, _| c64::new(rng.normal() * s, rng.normal() * s));
        let mut all = Mat::<c64>::zeros(n, basis.len() + 1);
        for (j, b) in basis.iter().enumerate() {
            for i in 0..n {
                all[(i, j)] = b[i];
            }
        }
        for i in 0..n {
            all[(i, basis.len())] = g[(i, 0)];
        }
        basis = linalg::orthonormal_columns(all.as_ref(), 1e-10);
    }
    Mat::from_fn(n, k, |i, j| basis[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kposcheck::{compressed_min_eig, KPosStatus};
    use crate::rmt::HermitianMatrix;

    /// Choi matrix of the transpose map on 2×2 matrices: the swap operator.
    fn transpose_choi() -> BipartiteOperator {
        let mut m = Mat::<c64>::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i * 2 + j, j * 2 + i)] = c64::new(1.0, 0.0);
            }
        }
        BipartiteOperator::new(2, 2, HermitianMatrix::new(m).unwrap()).unwrap()
    }

    #[test]
    fn transpose_is_positive_not_two_positive() {
        let c = transpose_choi();
        let r1 = see_saw(&c, 1, 8, Seed::new(1)).unwrap();
        assert_eq!(r1.status, KPosStatus::NoViolationFound);
        assert!(r1.best_value >= -1e-9);
        let r2 = see_saw(&c, 2, 8, Seed::new(1)).unwrap();
        assert_eq!(r2.status, KPosStatus::NegativeCertificate);
        assert!((r2.best_value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn history_descends_and_value_is_attained() {
        let c = BipartiteOperator::new(4, 3, crate::rmt::sample_gue(12, Seed::new(11))).unwrap();
        let r = see_saw(&c, 2, 4, Seed::new(2)).unwrap();
        assert!(r.history.windows(2).all(|p| p[1] <= p[0]));
        let v = r.best_projection.to_mat().unwrap();
        assert!((compressed_min_eig(&c, v.as_ref()).unwrap() - r.best_value).abs() < 1e-9);
    }
}
