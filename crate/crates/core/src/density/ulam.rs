//! Ulam discretization of the transfer operator on a square grid clipped to
//! the region, and stationary densities of the resulting Markov matrix.

use serde::Serialize;

use super::PiecewisePolyDensity;
use crate::error::{Error, Result};
use crate::geom::{affine_image, ConvexPolygon, Point2, EPS_AREA};
use crate::maps::PiecewiseMap;
use crate::par;

/// Tolerance on Ulam row sums.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Axis-aligned squares of side `1/resolution`, anchored at the lower-left
/// corner of the region's bounding box and clipped to the region.
#[derive(Clone, Debug, PartialEq)]
pub struct UlamGrid {
    region: ConvexPolygon,
    resolution: usize,
    origin: Point2,
    nx: usize,
    ny: usize,
    cells: Vec<ConvexPolygon>,
    /// `lookup[iy * nx + ix]` is the cell index of square `(ix, iy)`.
    lookup: Vec<Option<u32>>,
}

impl UlamGrid {
    pub fn new(region: ConvexPolygon, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::ParameterOutOfRange {
                name: "resolution",
                value: resolution as f64,
                range: ">= 2",
            });
        }
        let bb = region.bbox();
        let h = 1.0 / resolution as f64;
        let nx = ((bb.width() / h) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((bb.height() / h) - 1e-9).ceil().max(1.0) as usize;
        let mut cells = Vec::new();
        let mut lookup = vec![None; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let x0 = bb.min.x + ix as f64 * h;
                let y0 = bb.min.y + iy as f64 * h;
                let square = ConvexPolygon::rectangle(x0, y0, x0 + h, y0 + h)?;
                let cell = square.intersect(&region);
                if cell.area() > EPS_AREA {
                    lookup[iy * nx + ix] = Some(cells.len() as u32);
                    cells.push(cell);
                }
            }
        }
        Ok(Self {
            region,
            resolution,
            origin: bb.min,
            nx,
            ny,
            cells,
            lookup,
        })
    }

    pub fn region(&self) -> &ConvexPolygon {
        &self.region
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cells(&self) -> &[ConvexPolygon] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.area()).collect()
    }

    /// Cells whose square meets the bounding box of `p`, ascending.
    pub(crate) fn candidates(&self, p: &ConvexPolygon) -> Vec<usize> {
        let bb = p.bbox();
        let h = 1.0 / self.resolution as f64;
        let idx = |v: f64, n: usize| -> usize {
            if v <= 0.0 {
                0
            } else {
                ((v / h) as usize).min(n - 1)
            }
        };
        let pad = 1e-12;
        let (x0, x1) = (
            idx(bb.min.x - pad - self.origin.x, self.nx),
            idx(bb.max.x + pad - self.origin.x, self.nx),
        );
        let (y0, y1) = (
            idx(bb.min.y - pad - self.origin.y, self.ny),
            idx(bb.max.y + pad - self.origin.y, self.ny),
        );
        let mut out = Vec::new();
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                if let Some(c) = self.lookup[iy * self.nx + ix] {
                    out.push(c as usize);
                }
            }
        }
        out
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// From per-row `(column, value)` lists; columns are sorted and
    /// duplicates summed.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows.iter().cloned() {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (j, v) in row {
                if last == Some(j) {
                    *values.last_mut().expect("entry exists") += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows: rows.len(),
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).map(|e| e.1).sum())
            .collect()
    }

    /// Row vector times matrix, `(xᵀ A)_j = Σ_i x_i A_ij`.
    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, a) in self.row(i) {
                out[j] += xi * a;
            }
        }
        out
    }

    /// `(i, j, weight)` for every stored entry, row-major.
    pub fn triples(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_rows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.triples() {
            d[i][j] = v;
        }
        d
    }
}

/// Row-stochastic approximation of the transfer operator:
/// `A_ij = m(cell_i ∩ φ⁻¹ cell_j) / m(cell_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UlamOperator {
    pub grid: UlamGrid,
    pub matrix: SparseMatrix,
}

/// Values of a grid density, aligned with the grid cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityVector {
    pub values: Vec<f64>,
}

impl DensityVector {
    /// `Σ v_i · area_i`.
    pub fn integral(&self, grid: &UlamGrid) -> f64 {
        self.values
            .iter()
            .zip(grid.cells())
            .map(|(v, c)| v * c.area())
            .sum()
    }

    pub fn to_density(&self, grid: &UlamGrid) -> Result<PiecewisePolyDensity> {
        PiecewisePolyDensity::new(
            grid.region().clone(),
            grid.cells()
                .iter()
                .cloned()
                .zip(self.values.iter().copied())
                .collect(),
        )
    }

    /// `Σ |u_i - v_i| · area_i` on a shared grid.
    pub fn l1_distance(&self, other: &DensityVector, grid: &UlamGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(grid.cells())
            .map(|((a, b), c)| (a - b).abs() * c.area())
            .sum()
    }
}

/// Outcome of an iterative fixed-point search.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint<T> {
    pub value: T,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl<T> FixedPoint<T> {
    /// The value, or [`Error::NoConvergence`] with the achieved residual.
    pub fn into_result(self) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

pub fn build_ulam(m: &PiecewiseMap, resolution: usize) -> Result<UlamOperator> {
    let grid = UlamGrid::new(m.region().clone(), resolution)?;
    let ids: Vec<usize> = (0..grid.len()).collect();
    let rows: Vec<Result<Vec<(usize, f64)>>> = par::map(&ids, |&i| {
        let cell = &grid.cells()[i];
        let cell_area = cell.area();
        let mut row = Vec::new();
        for b in m.branches() {
            let piece = cell.intersect(&b.domain);
            if piece.is_empty() {
                continue;
            }
            let img = affine_image(&b.map, &piece)?;
            let scale = 1.0 / (b.jacobian_abs * cell_area);
            for j in grid.candidates(&img) {
                let a = img.intersect(&grid.cells()[j]).area();
                if a > 0.0 {
                    row.push((j, a * scale));
                }
            }
        }
        Ok(row)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let matrix = SparseMatrix::from_rows(grid.len(), rows);
    for (row, sum) in matrix.row_sums().into_iter().enumerate() {
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::ResolutionTooLow { row, sum });
        }
    }
    Ok(UlamOperator { grid, matrix })
}

/// Window (in iterations) over which a residual plateau is detected.
const PLATEAU_WINDOW: usize = 50;

/// Stationary mass vector of a row-stochastic matrix by power iteration
/// `μ ← μA`, renormalized to unit mass each step.
///
/// If the residual stalls (periodic or nearly periodic chains) the iteration
/// switches to the averaged step `μ ← (μ + μA)/2`, which has the same fixed
/// points. Residual is `Σ|μ' - μ|`, the `L¹` change of the density.
pub fn stationary_masses(
    matrix: &SparseMatrix,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> FixedPoint<Vec<f64>> {
    let total: f64 = start.iter().sum();
    let mut mu: Vec<f64> = start.iter().map(|v| v / total).collect();
    let mut history: Vec<f64> = Vec::new();
    let mut averaged = false;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut next = matrix.left_mul(&mu);
        if averaged {
            for (n, m) in next.iter_mut().zip(&mu) {
                *n = 0.5 * (*n + m);
            }
        }
        let s: f64 = next.iter().sum();
        for v in &mut next {
            *v = (*v / s).max(0.0);
        }
        residual = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).sum();
        mu = next;
        if residual < tol {
            return FixedPoint {
                value: mu,
                iterations: it,
                residual,
                converged: true,
            };
        }
        history.push(residual);
        if !averaged && history.len() > PLATEAU_WINDOW {
            let old = history[history.len() - 1 - PLATEAU_WINDOW];
            if residual > 0.99 * old {
                averaged = true;
            }
        }
    }
    FixedPoint {
        value: mu,
        iterations: max_iter,
        residual,
        converged: false,
    }
}

/// Fixed density of the Ulam operator, started from the uniform density.
pub fn ulam_fixed(op: &UlamOperator, tol: f64, max_iter: usize) -> FixedPoint<DensityVector> {
    let areas = op.grid.areas();
    let fp = stationary_masses(&op.matrix, &areas, tol, max_iter);
    FixedPoint {
        value: DensityVector {
            values: fp.value.iter().zip(&areas).map(|(m, a)| m / a).collect(),
        },
        iterations: fp.iterations,
        residual: fp.residual,
        converged: fp.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_tent2d, tau, tent_region};
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_tiles_region() {
        for n in [2, 5, 16] {
            let g = UlamGrid::new(tent_region(), n).unwrap();
            let total: f64 = g.areas().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
            assert!(g.areas().iter().all(|&a| a > EPS_AREA));
        }
        // row k from the bottom meets 2(n - k) squares.
        assert_eq!(UlamGrid::new(tent_region(), 4).unwrap().len(), 4 * 5);
        assert!(UlamGrid::new(tent_region(), 1).is_err());
    }

    #[test]
    fn rows_are_stochastic() {
        for t in [tau(), 0.95, 1.0] {
            let op = build_ulam(&make_tent2d(t).unwrap(), 8).unwrap();
            for s in op.matrix.row_sums() {
                assert_abs_diff_eq!(s, 1.0, epsilon = ROW_SUM_TOL);
            }
            for (_, _, v) in op.matrix.triples() {
                assert!((0.0..=1.0 + 1e-12).contains(&v));
            }
        }
    }

    #[test]
    fn uniform_is_fixed_at_t1() {
        for n in [4, 16] {
            let op = build_ulam(&make_tent2d(1.0).unwrap(), n).unwrap();
            let fp = ulam_fixed(&op, 1e-12, 1000);
            assert!(fp.converged);
            for v in &fp.value.values {
                assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn doubly_stochastic_two_cells() {
        let m =
            SparseMatrix::from_rows(2, vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.5), (1, 0.5)]]);
        let fp = stationary_masses(&m, &[0.9, 0.1], 1e-12, 100);
        assert!(fp.converged);
        assert_abs_diff_eq!(fp.value[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn periodic_chain_converges_after_averaging() {
        let m = SparseMatrix::from_rows(2, vec![vec![(1, 1.0)], vec![(0, 1.0)]]);
        let fp = stationary_masses(&m, &[0.8, 0.2], 1e-10, 10_000);
        assert!(fp.converged);
        assert_abs_diff_eq!(fp.value[0], 0.5, epsilon = 1e-9);
        let stuck = stationary_masses(&m, &[0.8, 0.2], 1e-10, 10);
        assert!(!stuck.converged);
        assert!(matches!(
            stuck.into_result(),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn sparse_duplicates_are_summed() {
        let m = SparseMatrix::from_rows(3, vec![vec![(2, 0.25), (0, 0.5), (2, 0.25)]]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 2), 0.5);
        assert_eq!(m.triples(), vec![(0, 0, 0.5), (0, 2, 0.5)]);
    }
}
