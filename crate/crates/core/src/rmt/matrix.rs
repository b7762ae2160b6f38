use faer::{c64, Mat, MatMut, MatRef};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance on `|a_ij - conj(a_ji)|` accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex Hermitian matrix.
///
/// The stored array is exactly Hermitian: construction checks the input to
/// [`HERMITIAN_TOL`] and then overwrites it with its Hermitian part.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    mat: Mat<c64>,
}

impl HermitianMatrix {
    pub fn new(mut mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix is not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let mut scale: f64 = 1.0;
        for j in 0..mat.ncols() {
            for i in 0..mat.nrows() {
                let v = mat[(i, j)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NumericalFailure(format!("non-finite entry at ({i}, {j})")));
                }
                scale = scale.max(v.norm());
            }
        }
        let defect = linalg::hermiticity_defect(mat.as_ref());
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::ShapeMismatch(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        linalg::symmetrize(&mut mat);
        Ok(HermitianMatrix { mat })
    }

    /// Takes the Hermitian part of `mat` without checking how far it was from Hermitian.
    pub(crate) fn hermitian_part(mut mat: Mat<c64>) -> Self {
        linalg::symmetrize(&mut mat);
        HermitianMatrix { mat }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            mat: Mat::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            mat: Mat::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermitianMatrix {
            mat: Mat::from_fn(n, n, |i, j| {
                if i == j {
                    c64::new(diag[i], 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Builds from a row-major list of entries.
    pub fn from_row_major(dim: usize, entries: &[c64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for dimension {dim}",
                entries.len()
            )));
        }
        Self::new(Mat::from_fn(dim, dim, |i, j| entries[i * dim + j]))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub(crate) fn mat(&self) -> &Mat<c64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    /// Entrywise transpose (equal to the entrywise conjugate).
    pub fn transpose(&self) -> Self {
        HermitianMatrix {
            mat: self.mat.transpose().to_owned(),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(self.mat.as_ref())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// `alpha·self + beta·I`.
    pub fn scale_shift(&self, alpha: f64, beta: f64) -> Self {
        let mut mat = &self.mat * faer::Scale(c64::new(alpha, 0.0));
        for i in 0..self.dim() {
            mat[(i, i)] += c64::new(beta, 0.0);
        }
        HermitianMatrix { mat }
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Ok(Spectrum::from_sorted(linalg::eigvalsh(self.as_mat())?))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(self.as_mat())
    }

    /// Conjugation `U·self·U*` for a square unitary (or any square) `U`.
    pub fn conjugate_by(&self, u: MatRef<'_, c64>) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "conjugating {}-dim matrix by {}x{}",
                self.dim(),
                u.nrows(),
                u.ncols()
            )));
        }
        let m = u * self.as_mat() * u.adjoint();
        Ok(Self::hermitian_part(m))
    }
}

/// Hermitian operator on `ℂⁿ ⊗ ℂᵈ` viewed as an `n×n` array of `d×d` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteOperator {
    n: usize,
    d: usize,
    matrix: HermitianMatrix,
}

impl BipartiteOperator {
    pub fn new(n: usize, d: usize, matrix: HermitianMatrix) -> Result<Self> {
        if n == 0 || d == 0 || matrix.dim() != n * d {
            return Err(Error::ShapeMismatch(format!(
                "matrix of dimension {} cannot be split into {n}x{n} blocks of size {d}",
                matrix.dim()
            )));
        }
        Ok(BipartiteOperator { n, d, matrix })
    }

    /// Assembles the operator from a block generator on the upper triangle
    /// (`i <= j`); lower blocks are filled by Hermitian symmetry.
    pub(crate) fn from_upper_blocks<F>(n: usize, d: usize, mut block: F) -> Self
    where
        F: FnMut(usize, usize, MatMut<'_, c64>),
    {
        let mut mat = Mat::<c64>::zeros(n * d, n * d);
        for i in 0..n {
            for j in i..n {
                block(i, j, mat.as_mut().submatrix_mut(i * d, j * d, d, d));
            }
        }
        for i in 0..n {
            for j in 0..i {
                for c in 0..d {
                    for r in 0..d {
                        mat[(i * d + r, j * d + c)] = mat[(j * d + c, i * d + r)].conj();
                    }
                }
            }
        }
        BipartiteOperator {
            n,
            d,
            matrix: HermitianMatrix::hermitian_part(mat),
        }
    }

    pub fn identity(n: usize, d: usize) -> Self {
        BipartiteOperator {
            n,
            d,
            matrix: HermitianMatrix::identity(n * d),
        }
    }

    /// `A ⊗ B` for Hermitian `A` (n×n) and `B` (d×d).
    pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> Self {
        let (n, d) = (a.dim(), b.dim());
        Self::from_upper_blocks(n, d, |i, j, mut blk| {
            let s = a.get(i, j);
            for c in 0..d {
                for r in 0..d {
                    blk[(r, c)] = s * b.get(r, c);
                }
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.n * self.d
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    /// The `d×d` block at block-row `i`, block-column `j` (zero-based).
    pub fn block(&self, i: usize, j: usize) -> MatRef<'_, c64> {
        self.matrix.as_mat().submatrix(i * self.d, j * self.d, self.d, self.d)
    }

    /// Transposition on the first tensor factor: block `(i,j)` moves to `(j,i)`.
    pub fn partial_transpose(&self) -> Self {
        let (n, d) = (self.n, self.d);
        let src = self.matrix.as_mat();
        let mat = Mat::from_fn(n * d, n * d, |row, col| {
            let (i, r) = (row / d, row % d);
            let (j, c) = (col / d, col % d);
            src[(j * d + r, i * d + c)]
        });
        BipartiteOperator {
            n,
            d,
            matrix: HermitianMatrix::hermitian_part(mat),
        }
    }

    /// `Σ_ij ρ_ij · block(i,j)`: the map with this Choi matrix applied to `ρ`.
    pub fn apply_choi_map(&self, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
        if rho.dim() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "input of dimension {} for a map on {}x{} matrices",
                rho.dim(),
                self.n,
                self.n
            )));
        }
        let mut out = Mat::<c64>::zeros(self.d, self.d);
        for i in 0..self.n {
            for j in 0..self.n {
                let s = rho.get(i, j);
                if s == c64::new(0.0, 0.0) {
                    continue;
                }
                let blk = self.block(i, j);
                for c in 0..self.d {
                    for r in 0..self.d {
                        out[(r, c)] += s * blk[(r, c)];
                    }
                }
            }
        }
        Ok(HermitianMatrix::hermitian_part(out))
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        self.matrix.spectrum()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.matrix.min_eigenvalue()
    }
}
