//! Thin wrappers over faer's dense Hermitian eigensolver and QR.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

pub fn eigvalsh(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::NumericalFailure(format!("Hermitian eigensolver did not converge: {e:?}")))
}

/// Eigenvalues ascending, eigenvectors as columns.
pub fn eigh(a: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NumericalFailure(format!("Hermitian eigensolver did not converge: {e:?}")))?;
    let s = evd.S();
    let values = (0..a.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Smallest eigenvalue and a unit eigenvector.
pub fn bottom_eigenpair(a: MatRef<'_, c64>) -> Result<(f64, Vec<c64>)> {
    let (vals, vecs) = eigh(a)?;
    let v = (0..a.nrows()).map(|i| vecs[(i, 0)]).collect();
    Ok((vals[0], v))
}

pub fn min_eigenvalue(a: MatRef<'_, c64>) -> Result<f64> {
    Ok(eigvalsh(a)?[0])
}

/// Largest entrywise deviation `|a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Replaces `a` by `(a + a*)/2` in place.
pub fn symmetrize(a: &mut Mat<c64>) {
    let n = a.nrows();
    for j in 0..n {
        a[(j, j)] = c64::new(a[(j, j)].re, 0.0);
        for i in (j + 1)..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
}

/// Thin QR with the phases of `diag(R)` pushed into `Q`, so that a Gaussian
/// input yields a Haar-distributed isometry.
pub fn phase_normalized_q(a: MatRef<'_, c64>) -> Mat<c64> {
    let qr = a.qr();
    let mut q = qr.compute_thin_Q();
    let r = qr.thin_R();
    for j in 0..q.ncols() {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        if norm > 0.0 {
            let phase = rjj / norm;
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

fn matvec(a: MatRef<'_, c64>, x: &[c64], out: &mut [c64]) {
    use faer::linalg::matmul::matmul;
    let n = x.len();
    let xm = MatRef::from_column_major_slice(x, n, 1);
    let om = faer::MatMut::from_column_major_slice_mut(out, a.nrows(), 1);
    matmul(om, faer::Accum::Replace, a, xm, c64::new(1.0, 0.0), faer::Par::Seq);
}

/// Bottom eigenpair of a Hermitian `a` by restarted Lanczos with full
/// reorthogonalization, started from `start`.
///
/// The returned Ritz value never exceeds the Rayleigh quotient of `start`.
/// Returns `None` when the residual `‖a·x - θx‖` has not dropped below `tol`
/// after `max_restarts` cycles of at most `krylov` vectors.
pub fn lanczos_bottom(
    a: MatRef<'_, c64>,
    start: &[c64],
    krylov: usize,
    tol: f64,
    max_restarts: usize,
) -> Option<(f64, Vec<c64>)> {
    let n = a.nrows();
    let m = krylov.clamp(2, n.max(2));
    let mut x: Vec<c64> = start.to_vec();
    let nx = norm(&x);
    if !(nx > 0.0) || !nx.is_finite() {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= nx);
    for _ in 0..max_restarts.max(1) {
        let mut basis = Mat::<c64>::zeros(n, m);
        basis.col_as_slice_mut(0).copy_from_slice(&x);
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut dim = 0;
        for j in 0..m {
            let mut w = vec![c64::new(0.0, 0.0); n];
            matvec(a, basis.col_as_slice(j), &mut w);
            let aj = dot(basis.col_as_slice(j), &w).re;
            alpha.push(aj);
            dim = j + 1;
            for _ in 0..2 {
                for l in 0..=j {
                    let ql = basis.col_as_slice(l);
                    let c = dot(ql, &w);
                    for (wi, qi) in w.iter_mut().zip(ql) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-13 * aj.abs().max(1.0) {
                break;
            }
            beta.push(b);
            let dst = basis.col_as_slice_mut(j + 1);
            for (d, wi) in dst.iter_mut().zip(&w) {
                *d = wi / b;
            }
        }
        let tri = Mat::<c64>::from_fn(dim, dim, |i, j| {
            if i == j {
                c64::new(alpha[i], 0.0)
            } else if i == j + 1 {
                c64::new(beta[j], 0.0)
            } else if j == i + 1 {
                c64::new(beta[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let (theta, y) = bottom_eigenpair(tri.as_ref()).ok()?;
        let mut next = vec![c64::new(0.0, 0.0); n];
        for (l, yl) in y.iter().enumerate() {
            for (v, q) in next.iter_mut().zip(basis.col_as_slice(l)) {
                *v += yl * q;
            }
        }
        let nn = norm(&next);
        next.iter_mut().for_each(|v| *v /= nn);
        let mut ax = vec![c64::new(0.0, 0.0); n];
        matvec(a, &next, &mut ax);
        let res = ax
            .iter()
            .zip(&next)
            .map(|(y, v)| (y - v * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        x = next;
        if res <= tol {
            return Some((dot(&x, &ax).re, x));
        }
    }
    None
}

/// Largest deviation of `v*v` from the identity.
pub fn isometry_defect(v: MatRef<'_, c64>) -> f64 {
    let g = v.adjoint() * v;
    let mut worst: f64 = 0.0;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Orthonormal basis (Gram–Schmidt, twice) of the span of the columns of `a`,
/// dropping columns whose residual norm falls below `tol`.
pub fn orthonormal_columns(a: MatRef<'_, c64>, tol: f64) -> Vec<Vec<c64>> {
    let mut basis: Vec<Vec<c64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v: Vec<c64> = (0..a.nrows()).map(|i| a[(i, j)]).collect();
        let scale = norm(&v);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv > tol * scale.max(1e-300) && nv > 0.0 {
            for vi in &mut v {
                *vi /= nv;
            }
            basis.push(v);
        }
    }
    basis
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
