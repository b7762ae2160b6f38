use faer::{c64, Mat, MatMut};
use rayon::prelude::*;

use super::matrix::{BipartiteOperator, HermitianMatrix};
use super::seed::{GaussianStream, Seed};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::MeasureSpec;

fn fill_gue(mut out: MatMut<'_, c64>, g: &mut GaussianStream) {
    let d = out.nrows();
    let diag = 1.0 / (d as f64).sqrt();
    let off = 1.0 / (2.0 * d as f64).sqrt();
    for i in 0..d {
        out[(i, i)] = c64::new(g.normal() * diag, 0.0);
        for j in (i + 1)..d {
            let v = c64::new(g.normal() * off, g.normal() * off);
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
}

/// GUE_d sample: real diagonal `N(0,1)/√d`, off-diagonal `(N + iN)/√(2d)`.
pub fn sample_gue(d: usize, seed: Seed) -> HermitianMatrix {
    let mut mat = Mat::<c64>::zeros(d, d);
    fill_gue(mat.as_mut(), &mut seed.stream());
    HermitianMatrix::hermitian_part(mat)
}

/// `rows×cols` matrix of i.i.d. standard complex Gaussians `(N + iN)/√2`.
pub fn sample_ginibre(rows: usize, cols: usize, seed: Seed) -> Mat<c64> {
    let mut g = seed.stream();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut mat = Mat::<c64>::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            mat[(i, j)] = c64::new(g.normal() * s, g.normal() * s);
        }
    }
    mat
}

/// Haar-distributed `m×r` isometry: the first `r` columns of a Haar unitary.
pub fn sample_haar_isometry(m: usize, r: usize, seed: Seed) -> Result<Mat<c64>> {
    if r == 0 || r > m {
        return Err(Error::ShapeMismatch(format!("cannot draw a {m}x{r} isometry")));
    }
    Ok(linalg::phase_normalized_q(sample_ginibre(m, r, seed).as_ref()))
}

/// Haar unitary on `ℂ^m`.
pub fn sample_haar_unitary(m: usize, seed: Seed) -> Mat<c64> {
    sample_haar_isometry(m, m.max(1), seed).expect("square isometry")
}

/// Independent GUE_d matrices indexed by pairs `i <= j` (or `i < j`) of `0..n`.
#[derive(Clone, Debug)]
pub struct GueArray {
    n: usize,
    d: usize,
    diagonal: bool,
    mats: Vec<HermitianMatrix>,
}

impl GueArray {
    pub fn sample(n: usize, d: usize, diagonal: bool, seed: Seed) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| diagonal || i < j)
            .collect();
        let mats = pairs
            .par_iter()
            .map(|&(i, j)| sample_gue(d, seed.child((i * n + j) as u64)))
            .collect();
        GueArray { n, d, diagonal, mats }
    }

    pub fn from_matrices(n: usize, d: usize, diagonal: bool, mats: Vec<HermitianMatrix>) -> Result<Self> {
        let expected = if diagonal { n * (n + 1) / 2 } else { n * (n - 1) / 2 };
        if mats.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices supplied, {expected} expected",
                mats.len()
            )));
        }
        if let Some(m) = mats.iter().find(|m| m.dim() != d) {
            return Err(Error::ShapeMismatch(format!(
                "family member of dimension {}, expected {d}",
                m.dim()
            )));
        }
        Ok(GueArray { n, d, diagonal, mats })
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < self.n && (self.diagonal || i < j), "pair ({i}, {j}) not in family");
        // row r of the triangle holds n - r entries (n - r - 1 without the diagonal)
        let offset = if self.diagonal {
            i * (2 * self.n - i + 1) / 2
        } else {
            i * (2 * self.n - i - 1) / 2
        };
        offset + if self.diagonal { j - i } else { j - i - 1 }
    }

    /// Member at `(i, j)`; symmetric in its arguments.
    pub fn get(&self, i: usize, j: usize) -> &HermitianMatrix {
        &self.mats[self.index(i, j)]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.mats
    }
}

/// The Gaussian family `{X_ij}_{i<=j}`, `{Y_ij}_{i<j}` of i.i.d. GUE_d matrices.
#[derive(Clone, Debug)]
pub struct GaussianFamily {
    pub x: GueArray,
    pub y: GueArray,
}

impl GaussianFamily {
    pub fn sample(n: usize, d: usize, seed: Seed) -> Self {
        GaussianFamily {
            x: GueArray::sample(n, d, true, seed.with_label("X")),
            y: GueArray::sample(n, d, false, seed.with_label("Y")),
        }
    }

    pub fn n(&self) -> usize {
        self.x.n
    }

    pub fn d(&self) -> usize {
        self.x.d
    }
}

/// Which form of the family enters the block assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Assembly {
    /// `X_ii/√n` and `(X_ij + iY_ij)/√(2n)` above the diagonal.
    Plain,
    /// `X_ii^T/√n` and `(X_ij^T - iY_ij^T)/√(2n)` above the diagonal.
    Transposed,
}

pub(crate) fn assemble(family: &GaussianFamily, assembly: Assembly, shift: f64) -> BipartiteOperator {
    let (n, d) = (family.n(), family.d());
    let sd = 1.0 / (n as f64).sqrt();
    let so = 1.0 / (2.0 * n as f64).sqrt();
    BipartiteOperator::from_upper_blocks(n, d, |i, j, mut blk| {
        let x = family.x.get(i, j);
        for c in 0..d {
            for r in 0..d {
                let (xe, ye) = match assembly {
                    Assembly::Plain => (
                        x.get(r, c),
                        if i < j {
                            family.y.get(i, j).get(r, c)
                        } else {
                            c64::new(0.0, 0.0)
                        },
                    ),
                    Assembly::Transposed => (
                        x.get(c, r),
                        if i < j {
                            -family.y.get(i, j).get(c, r)
                        } else {
                            c64::new(0.0, 0.0)
                        },
                    ),
                };
                blk[(r, c)] = if i == j {
                    xe * sd
                        + if r == c {
                            c64::new(shift, 0.0)
                        } else {
                            c64::new(0.0, 0.0)
                        }
                } else {
                    (xe + c64::new(0.0, 1.0) * ye) * so
                };
            }
        }
    })
}

/// Block GUE on `ℂⁿ ⊗ ℂᵈ`: diagonal blocks `X_ii/√n`, off-diagonal `(X_ij ± iY_ij)/√(2n)`.
pub fn build_block_gue(n: usize, d: usize, family: &GaussianFamily) -> Result<BipartiteOperator> {
    if family.n() != n || family.d() != d || family.y.n != n || family.y.d != d {
        return Err(Error::ShapeMismatch(format!(
            "family has n={}, d={}, requested n={n}, d={d}",
            family.n(),
            family.d()
        )));
    }
    Ok(assemble(family, Assembly::Plain, 0.0))
}

/// Quantile diagonal `quantile((i - 1/2)/m)`, ascending.
pub fn deterministic_diagonal(spec: &MeasureSpec, m: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    spec.quantile_grid(m)
}

/// Random Choi matrix `U·diag(spec, nd)·U*` with Haar `U`.
pub fn sample_choi_map(spec: &MeasureSpec, n: usize, d: usize, seed: Seed) -> Result<BipartiteOperator> {
    let diag = deterministic_diagonal(spec, n * d)?;
    let u = sample_haar_unitary(n * d, seed);
    let scaled = Mat::from_fn(n * d, n * d, |i, j| u[(i, j)] * diag[j]);
    let c = &scaled * u.adjoint();
    BipartiteOperator::new(n, d, HermitianMatrix::hermitian_part(c))
}
