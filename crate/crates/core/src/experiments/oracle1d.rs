//! Ulam discretization of the one-dimensional tent map `x ↦ 1 - a|x|` on
//! `[-1, 1]`, with exact interval preimages. Shares the stationary-vector
//! solver with the planar pipeline.

use crate::density::{stationary_masses, FixedPoint, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tent1dUlam {
    pub a: f64,
    pub n_cells: usize,
    pub matrix: SparseMatrix,
    /// Density values (not masses) per cell.
    pub fixed_density: FixedPoint<Vec<f64>>,
}

/// Length of `[a.0, a.1] ∩ [lo, hi]`.
fn overlap(a: (f64, f64), lo: f64, hi: f64) -> f64 {
    (a.1.min(hi) - a.0.max(lo)).max(0.0)
}

pub fn tent1d_ulam(a: f64, n_cells: usize, tol: f64, max_iter: usize) -> Result<Tent1dUlam> {
    if !(a > 1.0 && a <= 2.0) {
        return Err(Error::ParameterOutOfRange {
            name: "a",
            value: a,
            range: "(1, 2]",
        });
    }
    if n_cells < 2 || !n_cells.is_multiple_of(2) {
        return Err(Error::ParameterOutOfRange {
            name: "n_cells",
            value: n_cells as f64,
            range: "even, >= 2",
        });
    }
    let h = 2.0 / n_cells as f64;
    let cell = |i: usize| (-1.0 + i as f64 * h, -1.0 + (i + 1) as f64 * h);
    let rows: Vec<Vec<(usize, f64)>> = (0..n_cells)
        .map(|i| {
            let ci = cell(i);
            (0..n_cells)
                .filter_map(|j| {
                    let (c, d) = cell(j);
                    // x ↦ 1 + ax on [-1, 0], x ↦ 1 - ax on [0, 1]
                    let left = overlap(ci, ((c - 1.0) / a).max(-1.0), ((d - 1.0) / a).min(0.0));
                    let right = overlap(ci, ((1.0 - d) / a).max(0.0), ((1.0 - c) / a).min(1.0));
                    let w = (left + right) / h;
                    (w > 0.0).then_some((j, w))
                })
                .collect()
        })
        .collect();
    let matrix = SparseMatrix::from_rows(n_cells, rows);
    let fp = stationary_masses(&matrix, &vec![1.0; n_cells], tol, max_iter);
    Ok(Tent1dUlam {
        a,
        n_cells,
        matrix,
        fixed_density: FixedPoint {
            value: fp.value.iter().map(|m| m / h).collect(),
            iterations: fp.iterations,
            residual: fp.residual,
            converged: fp.converged,
        },
    })
}
