//! Bucket index and pairwise overlay of convex partitions.

use crate::geom::{Bbox, ConvexPolygon, Point2};
use crate::par;

/// Uniform bucket grid over a set of bounding boxes.
pub(crate) struct BucketIndex {
    origin: Point2,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl BucketIndex {
    pub(crate) fn new(boxes: &[Bbox]) -> Self {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for b in boxes {
            lo.x = lo.x.min(b.min.x);
            lo.y = lo.y.min(b.min.y);
            hi.x = hi.x.max(b.max.x);
            hi.y = hi.y.max(b.max.y);
        }
        if boxes.is_empty() {
            lo = Point2::ORIGIN;
            hi = Point2::new(1.0, 1.0);
        }
        let w = (hi.x - lo.x).max(1e-9);
        let h = (hi.y - lo.y).max(1e-9);
        let target = (boxes.len() as f64).sqrt().max(1.0);
        let size = (w.max(h) / target).max(1e-6);
        let nx = ((w / size).ceil() as usize).max(1);
        let ny = ((h / size).ceil() as usize).max(1);
        let mut idx = Self {
            origin: lo,
            size,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (i, b) in boxes.iter().enumerate() {
            let (x0, x1, y0, y1) = idx.range(b);
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    idx.buckets[iy * nx + ix].push(i as u32);
                }
            }
        }
        idx
    }

    fn range(&self, b: &Bbox) -> (usize, usize, usize, usize) {
        let clamp = |v: f64, n: usize| -> usize {
            if v <= 0.0 {
                0
            } else {
                (v as usize).min(n - 1)
            }
        };
        let pad = 1e-9;
        (
            clamp((b.min.x - pad - self.origin.x) / self.size, self.nx),
            clamp((b.max.x + pad - self.origin.x) / self.size, self.nx),
            clamp((b.min.y - pad - self.origin.y) / self.size, self.ny),
            clamp((b.max.y + pad - self.origin.y) / self.size, self.ny),
        )
    }

    /// Indices of boxes sharing a bucket with `b`, ascending.
    pub(crate) fn query(&self, b: &Bbox) -> Vec<usize> {
        let (x0, x1, y0, y1) = self.range(b);
        let mut out = Vec::new();
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                out.extend(self.buckets[iy * self.nx + ix].iter().map(|&i| i as usize));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// All non-empty `a_i ∩ b_j`, tagged with `(i, j)`, ordered by `i` then `j`.
pub(crate) fn overlay_pairs(
    a: &[ConvexPolygon],
    b: &[ConvexPolygon],
) -> Vec<(ConvexPolygon, usize, usize)> {
    let boxes: Vec<Bbox> = b.iter().map(|p| p.bbox()).collect();
    let index = BucketIndex::new(&boxes);
    let ids: Vec<usize> = (0..a.len()).collect();
    par::flat_map(&ids, |&i| {
        let pa = &a[i];
        let bb = pa.bbox();
        index
            .query(&bb)
            .into_iter()
            .filter(|&j| boxes[j].overlaps(&bb))
            .filter_map(|j| {
                let q = pa.intersect(&b[j]);
                (!q.is_empty()).then_some((q, i, j))
            })
            .collect()
    })
}
