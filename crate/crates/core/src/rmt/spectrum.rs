use serde::{Deserialize, Serialize};

use super::matrix::HermitianMatrix;
use crate::error::Result;

/// Ascending list of eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

/// Equal-width histogram; `density` integrates to one over `[lo, hi]` when no
/// eigenvalue falls outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
}

pub fn spectrum(m: &HermitianMatrix) -> Result<Spectrum> {
    m.spectrum()
}

impl Spectrum {
    pub fn from_sorted(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Spectrum { values }
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// Spectral norm of the underlying Hermitian matrix.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_unsorted(self.values.iter().map(|v| v * factor).collect())
    }

    /// Fraction of eigenvalues `<= x`.
    pub fn empirical_cdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    pub fn histogram(&self, bins: usize, lo: f64, hi: f64) -> Histogram {
        let bins = bins.max(1);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0usize; bins];
        for &v in &self.values {
            if v < lo || v > hi {
                continue;
            }
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let total = self.values.len() as f64;
        let density = counts.iter().map(|&c| c as f64 / (total * width)).collect();
        Histogram { edges, counts, density }
    }

    /// `sup_x |F_emp(x) - F(x)|` against a continuous repartition function.
    pub fn kolmogorov_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.values.len() as f64;
        let mut worst: f64 = 0.0;
        let mut i = 0;
        while i < self.values.len() {
            let v = self.values[i];
            let mut j = i;
            while j < self.values.len() && self.values[j] == v {
                j += 1;
            }
            let f = cdf(v);
            worst = worst.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
            i = j;
        }
        worst
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    pub fn kolmogorov_distance_to(&self, other: &Spectrum) -> f64 {
        let (a, b) = (&self.values, &other.values);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0, 0);
        let mut worst: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            worst = worst.max((i as f64 / na - j as f64 / nb).abs());
        }
        worst
    }
}
