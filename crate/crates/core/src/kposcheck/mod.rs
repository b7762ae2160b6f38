//! Numeric k-positivity search on concrete Choi matrices.
//!
//! A map is k-positive iff `(V*⊗I) C (V⊗I) ⪰ 0` for every `n×k` isometry `V`.
//! [`see_saw`] looks for a frame making that compression indefinite;
//! [`net_check`] scans a grid of unit vectors for tiny `n` and `k = 1`.

mod frame;
mod net;
mod seesaw;

pub use frame::Frame;
pub use net::net_check;
pub use seesaw::{see_saw, see_saw_with, SeeSawOptions};

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rmt::BipartiteOperator;

/// Accepted deviation of `V*V` from the identity.
pub const ISOMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KPosStatus {
    /// A frame with a negative compressed bottom eigenvalue was found.
    NegativeCertificate,
    /// The search found nothing; this is not a proof of k-positivity.
    NoViolationFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KPosResult {
    pub k: usize,
    /// Lowest compressed bottom eigenvalue found, recomputed from `best_projection`.
    pub best_value: f64,
    pub best_projection: Frame,
    pub restarts_used: usize,
    pub status: KPosStatus,
    /// Name of the search strategy that produced the result.
    pub strategy: String,
    /// Objective after each iteration of the winning restart.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<f64>,
}

impl KPosResult {
    pub(crate) fn from_best(
        k: usize,
        value: f64,
        frame: Frame,
        restarts: usize,
        tol: f64,
        strategy: &str,
        history: Vec<f64>,
    ) -> Self {
        let status = if value < -tol {
            KPosStatus::NegativeCertificate
        } else {
            KPosStatus::NoViolationFound
        };
        KPosResult {
            k,
            best_value: value,
            best_projection: frame,
            restarts_used: restarts,
            status,
            strategy: strategy.to_string(),
            history,
        }
    }
}

/// `(V*⊗I_d) C (V⊗I_d)` as a `kd×kd` matrix, index `(a, r) ↦ a·d + r`.
pub fn compress(c: &BipartiteOperator, v: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let (n, d) = (c.n(), c.d());
    if v.nrows() != n || v.ncols() == 0 || v.ncols() > n {
        return Err(Error::ShapeMismatch(format!(
            "frame is {}x{}, operator has n={n}",
            v.nrows(),
            v.ncols()
        )));
    }
    let k = v.ncols();
    let nd = n * d;
    let cm = c.matrix().mat();
    // CW[:, (b, s)] = Σ_j V[j, b] C[:, (j, s)]
    let mut cw = Mat::<c64>::zeros(nd, k * d);
    for b in 0..k {
        for s in 0..d {
            let dst = cw.col_as_slice_mut(b * d + s);
            for j in 0..n {
                let coef = v[(j, b)];
                if coef == c64::new(0.0, 0.0) {
                    continue;
                }
                for (o, x) in dst.iter_mut().zip(cm.col_as_slice(j * d + s)) {
                    *o += coef * x;
                }
            }
        }
    }
    // A[(a, r), col] = Σ_i conj(V[i, a]) CW[(i, r), col]
    let mut out = Mat::<c64>::zeros(k * d, k * d);
    for col in 0..k * d {
        let src = cw.col_as_slice(col);
        let dst = out.col_as_slice_mut(col);
        for a in 0..k {
            let seg = &mut dst[a * d..(a + 1) * d];
            for i in 0..n {
                let coef = v[(i, a)].conj();
                if coef == c64::new(0.0, 0.0) {
                    continue;
                }
                for (o, x) in seg.iter_mut().zip(&src[i * d..(i + 1) * d]) {
                    *o += coef * x;
                }
            }
        }
    }
    linalg::symmetrize(&mut out);
    Ok(out)
}

/// Column-major copy of a Choi matrix laid out for repeated compressions.
pub(crate) struct Compressor<'a> {
    pub(crate) op: &'a BipartiteOperator,
    data: Vec<c64>,
}

impl<'a> Compressor<'a> {
    pub(crate) fn new(op: &'a BipartiteOperator) -> Self {
        let nd = op.dim();
        let m = op.matrix().mat();
        let mut data = Vec::with_capacity(nd * nd);
        for j in 0..nd {
            data.extend_from_slice(m.col_as_slice(j));
        }
        Compressor { op, data }
    }

    /// Same result as [`compress`], through dense products.
    pub(crate) fn compress(&self, v: MatRef<'_, c64>) -> Mat<c64> {
        use faer::linalg::matmul::matmul;
        use faer::{Accum, MatMut, Par};
        let (n, d) = (self.op.n(), self.op.d());
        let nd = n * d;
        let k = v.ncols();
        let one = c64::new(1.0, 0.0);
        // CW[:, (b, s)] = C[:, (·, s)]·V[:, b]; columns (j, s) of C sit d·nd apart
        let mut cw = vec![c64::new(0.0, 0.0); nd * k * d];
        for s in 0..d {
            let cs = MatRef::from_column_major_slice_with_stride(&self.data[s * nd..], nd, n, d * nd);
            let dst = MatMut::from_column_major_slice_with_stride_mut(&mut cw[s * nd..], nd, k, d * nd);
            matmul(dst, Accum::Replace, cs, v, one, Par::Seq);
        }
        // column (b, s) of CW viewed as d×n, times conj(V), gives column (b, s) of A as d×k
        let vc = v.conjugate().to_owned();
        let mut out = Mat::<c64>::zeros(k * d, k * d);
        for col in 0..k * d {
            let m = MatRef::from_column_major_slice(&cw[col * nd..(col + 1) * nd], d, n);
            let dst = MatMut::from_column_major_slice_mut(out.col_as_slice_mut(col), d, k);
            matmul(dst, Accum::Replace, m, vc.as_ref(), one, Par::Seq);
        }
        linalg::symmetrize(&mut out);
        out
    }
}

pub(crate) fn check_isometry(v: MatRef<'_, c64>) -> Result<()> {
    let defect = linalg::isometry_defect(v);
    if defect > ISOMETRY_TOL {
        return Err(Error::NotIsometry(defect));
    }
    Ok(())
}

/// Bottom eigenvalue of the compression of `C` to `ran(V) ⊗ ℂ^d`.
pub fn compressed_min_eig(c: &BipartiteOperator, v: MatRef<'_, c64>) -> Result<f64> {
    if v.nrows() != c.n() || v.ncols() == 0 || v.ncols() > c.n() {
        return Err(Error::ShapeMismatch(format!(
            "frame is {}x{}, operator has n={}",
            v.nrows(),
            v.ncols(),
            c.n()
        )));
    }
    check_isometry(v)?;
    linalg::min_eigenvalue(compress(c, v)?.as_ref())
}
