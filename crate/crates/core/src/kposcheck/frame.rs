use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n×k` complex matrix stored column-major as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl Frame {
    pub fn from_mat(m: &Mat<c64>) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Frame {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn to_mat(&self) -> Result<Mat<c64>> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {}x{} frame",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(Mat::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.entries[j * self.rows + i];
            c64::new(re, im)
        }))
    }
}
