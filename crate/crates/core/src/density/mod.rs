//! Piecewise-constant densities on convex polygonal partitions and the
//! Perron–Frobenius operator acting on them.

mod cesaro;
mod ulam;
mod variation;

pub use cesaro::{cesaro_fixed_density, CoarsenPolicy};
pub use ulam::{
    build_ulam, stationary_masses, ulam_fixed, DensityVector, FixedPoint, SparseMatrix, UlamGrid,
    UlamOperator,
};
pub use variation::{sobolev_ratio, variation, SOBOLEV_CONSTANT};

use crate::error::{Error, Result};
use crate::geom::{affine_image, ConvexPolygon, EPS_AREA};
use crate::maps::PiecewiseMap;
use crate::overlay::{overlay_pairs, BucketIndex};
use crate::par;

/// Largest arrangement produced before giving up.
pub const CELL_LIMIT: usize = 1_000_000;

/// Tolerance for deciding that two regions are the same polygon.
const REGION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityCell {
    pub polygon: ConvexPolygon,
    pub value: f64,
}

/// A function that is constant on each cell of a convex partition of
/// `region`, extended by zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolyDensity {
    region: ConvexPolygon,
    cells: Vec<DensityCell>,
    signed: bool,
}

impl PiecewisePolyDensity {
    /// A nonnegative density. Cells must tile `region` mod 0.
    pub fn new(region: ConvexPolygon, cells: Vec<(ConvexPolygon, f64)>) -> Result<Self> {
        if let Some(&(_, v)) = cells
            .iter()
            .find(|(_, v)| v.is_nan() || *v < 0.0 || !v.is_finite())
        {
            return Err(Error::NegativeDensity(v));
        }
        Self::build(region, cells, false)
    }

    /// A signed function on the same kind of partition, for linear-algebra
    /// checks on the operator.
    pub fn new_signed(region: ConvexPolygon, cells: Vec<(ConvexPolygon, f64)>) -> Result<Self> {
        if cells.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Self::build(region, cells, true)
    }

    fn build(
        region: ConvexPolygon,
        cells: Vec<(ConvexPolygon, f64)>,
        signed: bool,
    ) -> Result<Self> {
        let cells: Vec<DensityCell> = cells
            .into_iter()
            .filter(|(p, _)| p.area() > EPS_AREA)
            .map(|(polygon, value)| DensityCell { polygon, value })
            .collect();
        let total: f64 = cells.iter().map(|c| c.polygon.area()).sum();
        let tol = REGION_TOL * (1.0 + cells.len() as f64).sqrt();
        if (total - region.area()).abs() > tol {
            return Err(Error::InvalidPartition(format!(
                "cells cover area {total}, region has {}",
                region.area()
            )));
        }
        for c in &cells {
            if c.polygon.area() - c.polygon.intersect(&region).area() > tol {
                return Err(Error::InvalidPartition("cell leaves the region".into()));
            }
        }
        Ok(Self {
            region,
            cells,
            signed,
        })
    }

    fn from_cells_unchecked(region: ConvexPolygon, cells: Vec<DensityCell>, signed: bool) -> Self {
        Self {
            region,
            cells,
            signed,
        }
    }

    /// `c` on the whole region.
    pub fn constant(region: ConvexPolygon, c: f64) -> Result<Self> {
        let r = region.clone();
        Self::new(region, vec![(r, c)])
    }

    /// `value · χ_q` (q clipped to the region), zero elsewhere.
    pub fn indicator(region: ConvexPolygon, q: &ConvexPolygon, value: f64) -> Result<Self> {
        let inside = region.intersect(q);
        let mut cells: Vec<(ConvexPolygon, f64)> = region
            .subtract(&inside)
            .into_iter()
            .map(|p| (p, 0.0))
            .collect();
        cells.push((inside, value));
        Self::new(region, cells)
    }

    pub fn region(&self) -> &ConvexPolygon {
        &self.region
    }

    pub fn cells(&self) -> &[DensityCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// `∫ f dm`.
    pub fn integral(&self) -> f64 {
        self.cells.iter().map(|c| c.value * c.polygon.area()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let signed = self.signed || s < 0.0;
        Self::from_cells_unchecked(
            self.region.clone(),
            self.cells
                .iter()
                .map(|c| DensityCell {
                    polygon: c.polygon.clone(),
                    value: c.value * s,
                })
                .collect(),
            signed,
        )
    }

    /// Rescaled to unit `L¹` norm (unchanged if the norm vanishes).
    pub fn normalized(&self) -> Self {
        let m = lp_norm(self, 1.0);
        if m > 0.0 {
            self.scaled(1.0 / m)
        } else {
            self.clone()
        }
    }

    /// Value at `p` (first containing cell; zero outside the region).
    pub fn value_at(&self, p: crate::geom::Point2) -> f64 {
        self.cells
            .iter()
            .find(|c| c.polygon.contains(p, 0.0))
            .map_or(0.0, |c| c.value)
    }

    /// Cell-averaged projection onto `grid`; preserves the integral.
    pub fn project_to_grid(&self, grid: &UlamGrid) -> Result<DensityVector> {
        ensure_same_region(&self.region, grid.region())?;
        let polys: Vec<ConvexPolygon> = self.cells.iter().map(|c| c.polygon.clone()).collect();
        let mut mass = vec![0.0; grid.len()];
        for (q, i, j) in overlay_pairs(grid.cells(), &polys) {
            mass[i] += q.area() * self.cells[j].value;
        }
        Ok(DensityVector {
            values: mass
                .iter()
                .zip(grid.cells())
                .map(|(m, c)| m / c.area())
                .collect(),
        })
    }
}

pub(crate) fn ensure_same_region(a: &ConvexPolygon, b: &ConvexPolygon) -> Result<()> {
    let (aa, ab) = (a.area(), b.area());
    if (aa - ab).abs() > REGION_TOL || (aa - a.intersect(b).area()).abs() > REGION_TOL {
        return Err(Error::RegionMismatch);
    }
    Ok(())
}

/// `(Σ |v|^p · area)^(1/p)`.
pub fn lp_norm(f: &PiecewisePolyDensity, p: f64) -> f64 {
    let s: f64 = f
        .cells
        .iter()
        .map(|c| c.value.abs().powf(p) * c.polygon.area())
        .sum();
    s.powf(1.0 / p)
}

/// `αf + βg` on the common refinement of both partitions.
pub fn linear_combination(
    alpha: f64,
    f: &PiecewisePolyDensity,
    beta: f64,
    g: &PiecewisePolyDensity,
) -> Result<PiecewisePolyDensity> {
    ensure_same_region(&f.region, &g.region)?;
    let fp: Vec<ConvexPolygon> = f.cells.iter().map(|c| c.polygon.clone()).collect();
    let gp: Vec<ConvexPolygon> = g.cells.iter().map(|c| c.polygon.clone()).collect();
    let cells: Vec<DensityCell> = overlay_pairs(&fp, &gp)
        .into_iter()
        .map(|(polygon, i, j)| DensityCell {
            polygon,
            value: alpha * f.cells[i].value + beta * g.cells[j].value,
        })
        .collect();
    let signed = f.signed || g.signed || cells.iter().any(|c| c.value < 0.0);
    Ok(PiecewisePolyDensity::from_cells_unchecked(
        f.region.clone(),
        cells,
        signed,
    ))
}

/// `‖f - g‖₁` over the common refinement.
pub fn l1_distance(f: &PiecewisePolyDensity, g: &PiecewisePolyDensity) -> Result<f64> {
    ensure_same_region(&f.region, &g.region)?;
    let fp: Vec<ConvexPolygon> = f.cells.iter().map(|c| c.polygon.clone()).collect();
    let gp: Vec<ConvexPolygon> = g.cells.iter().map(|c| c.polygon.clone()).collect();
    Ok(overlay_pairs(&fp, &gp)
        .into_iter()
        .map(|(q, i, j)| (f.cells[i].value - g.cells[j].value).abs() * q.area())
        .sum())
}

/// Exact Perron–Frobenius pushforward
/// `P f = Σ_i (f ∘ φ_i⁻¹) / |J_i| · χ_{φ_i(R_i)}`.
///
/// Each branch contributes the images of the cells of `f` restricted to its
/// domain; the contributions are overlaid into one convex arrangement whose
/// cells carry the summed values. Output cells are snapped to
/// [`crate::geom::SNAP_GRID`] and sorted by centroid.
pub fn push_forward(m: &PiecewiseMap, f: &PiecewisePolyDensity) -> Result<PiecewisePolyDensity> {
    ensure_same_region(m.region(), &f.region)?;
    let mut cells = vec![DensityCell {
        polygon: m.region().clone(),
        value: 0.0,
    }];
    for branch in m.branches() {
        let image = branch.image()?;
        let inv_jac = 1.0 / branch.jacobian_abs;
        let pieces: Vec<Result<Option<DensityCell>>> = par::map(&f.cells, |c| {
            let d = c.polygon.intersect(&branch.domain);
            if d.is_empty() {
                return Ok(None);
            }
            Ok(Some(DensityCell {
                polygon: affine_image(&branch.map, &d)?,
                value: c.value * inv_jac,
            }))
        });
        let mut branch_pieces = Vec::with_capacity(pieces.len());
        for p in pieces {
            if let Some(c) = p? {
                if !c.polygon.is_empty() {
                    branch_pieces.push(c);
                }
            }
        }
        let boxes: Vec<_> = branch_pieces.iter().map(|c| c.polygon.bbox()).collect();
        let index = BucketIndex::new(&boxes);
        let image_box = image.bbox();
        cells = par::flat_map(&cells, |cell| {
            if !cell.polygon.bbox().overlaps(&image_box) {
                return vec![cell.clone()];
            }
            let mut out: Vec<DensityCell> = cell
                .polygon
                .subtract(&image)
                .into_iter()
                .map(|polygon| DensityCell {
                    polygon,
                    value: cell.value,
                })
                .collect();
            let inner = cell.polygon.intersect(&image);
            if !inner.is_empty() {
                let bb = inner.bbox();
                for j in index.query(&bb) {
                    if !boxes[j].overlaps(&bb) {
                        continue;
                    }
                    let q = inner.intersect(&branch_pieces[j].polygon);
                    if !q.is_empty() {
                        out.push(DensityCell {
                            polygon: q,
                            value: cell.value + branch_pieces[j].value,
                        });
                    }
                }
            }
            out
        });
        if cells.len() > CELL_LIMIT {
            return Err(Error::CellExplosion { limit: CELL_LIMIT });
        }
    }
    let mut cells: Vec<DensityCell> = cells
        .into_iter()
        .filter_map(|c| {
            let polygon = c.polygon.snapped();
            (!polygon.is_empty()).then_some(DensityCell {
                polygon,
                value: c.value,
            })
        })
        .collect();
    sort_by_centroid(&mut cells);
    Ok(PiecewisePolyDensity::from_cells_unchecked(
        m.region().clone(),
        cells,
        f.signed,
    ))
}

fn sort_by_centroid(cells: &mut [DensityCell]) {
    let mut keyed: Vec<(f64, f64, usize)> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let p = c.polygon.centroid();
            (p.x, p.y, i)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let order: Vec<usize> = keyed.into_iter().map(|k| k.2).collect();
    let sorted: Vec<DensityCell> = order.iter().map(|&i| cells[i].clone()).collect();
    cells.clone_from_slice(&sorted);
}
