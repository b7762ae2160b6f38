use faer::{c64, Mat};
use rayon::prelude::*;

use super::{compress, Frame, KPosResult};
use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::rmt::BipartiteOperator;

/// Largest block count accepted by [`net_check`].
pub const NET_MAX_N: usize = 3;

/// Unit vectors of `ℂ^n` (up to a global phase) on a hyperspherical angle grid:
/// `resolution` polar angles in `[0, π/2]` and `resolution` phases in `[0, 2π)`.
fn grid(n: usize, resolution: usize) -> Vec<Vec<c64>> {
    let polar: Vec<f64> = (0..resolution)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (resolution - 1).max(1) as f64)
        .collect();
    let phase: Vec<c64> = (0..resolution)
        .map(|i| c64::from_polar(1.0, std::f64::consts::TAU * i as f64 / resolution as f64))
        .collect();
    match n {
        1 => vec![vec![c64::new(1.0, 0.0)]],
        2 => {
            let mut out = Vec::new();
            for &t in &polar {
                for &p in &phase {
                    out.push(vec![c64::new(t.cos(), 0.0), p * t.sin()]);
                }
            }
            out
        }
        _ => {
            let mut out = Vec::new();
            for &t1 in &polar {
                for &t2 in &polar {
                    for &p1 in &phase {
                        for &p2 in &phase {
                            out.push(vec![
                                c64::new(t1.cos(), 0.0),
                                p1 * (t1.sin() * t2.cos()),
                                p2 * (t1.sin() * t2.sin()),
                            ]);
                        }
                    }
                }
            }
            out
        }
    }
}

/// Exhaustive scan of `λ_min(Σ conj(x_i) x_j C(i,j))` over a grid of unit `x`.
///
/// Only `n <= 3` and `k = 1` are accepted. `restarts_used` reports the number
/// of grid points evaluated.
pub fn net_check(c: &BipartiteOperator, k: usize, resolution: usize) -> Result<KPosResult> {
    let n = c.n();
    if k != 1 || n > NET_MAX_N {
        return Err(Error::TooLarge(format!(
            "net search supports n <= {NET_MAX_N} and k = 1, got n={n}, k={k}"
        )));
    }
    if resolution < 2 {
        return Err(domain("net resolution must be at least 2"));
    }
    let points = grid(n, resolution);
    let values = points
        .par_iter()
        .map(|x| {
            let v = Mat::<c64>::from_fn(n, 1, |i, _| x[i]);
            let m = compress(c, v.as_ref())?;
            linalg::min_eigenvalue(m.as_ref())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let frame = Mat::<c64>::from_fn(n, 1, |i, _| points[best][i]);
    Ok(KPosResult::from_best(
        1,
        values[best],
        Frame::from_mat(&frame),
        points.len(),
        1e-9,
        "net",
        Vec::new(),
    ))
}
