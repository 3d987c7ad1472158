//! Planar geometry on convex polygons.
//!
//! Every region, partition cell, branch domain and branch image in this crate
//! is a [`ConvexPolygon`]. Polygons are stored as counter-clockwise vertex
//! lists with near-duplicate and collinear vertices removed; anything with
//! area below [`EPS_AREA`] collapses to the empty polygon.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric tolerance for coordinates, determinants and convexity checks.
pub const EPS_GEOM: f64 = 1e-9;
/// Polygons with smaller area are treated as empty.
pub const EPS_AREA: f64 = 1e-12;
/// Grid used to snap overlay vertices (2^-36, exactly representable).
pub const SNAP_GRID: f64 = 1.0 / 68_719_476_736.0;

/// Signed distances below this are treated as lying on a clipping line.
const ON_LINE: f64 = 1e-13;
/// A vertex closer than this to the chord of its neighbours is dropped.
const COLLINEAR_DIST: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn snapped(self) -> Point2 {
        Point2::new(snap(self.x), snap(self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[inline]
fn snap(v: f64) -> f64 {
    (v / SNAP_GRID).round() * SNAP_GRID
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bbox {
    pub min: Point2,
    pub max: Point2,
}

impl Bbox {
    pub fn overlaps(&self, o: &Bbox) -> bool {
        self.min.x <= o.max.x + EPS_GEOM
            && o.min.x <= self.max.x + EPS_GEOM
            && self.min.y <= o.max.y + EPS_GEOM
            && o.min.y <= self.max.y + EPS_GEOM
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// Closed half-plane `{p : normal·p <= offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    normal: Point2,
    offset: f64,
}

impl HalfPlane {
    /// Normalizes `normal` to unit length.
    pub fn new(normal: Point2, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if n.is_nan() || n <= EPS_GEOM || !offset.is_finite() {
            return Err(Error::DegeneratePolygon("half-plane normal vanishes"));
        }
        Ok(Self {
            normal: normal * (1.0 / n),
            offset: offset / n,
        })
    }

    /// The closed half-plane to the left of the directed line `a -> b`.
    pub fn left_of(a: Point2, b: Point2) -> Result<Self> {
        let d = b - a;
        let normal = Point2::new(d.y, -d.x);
        Self::new(normal, normal.dot(a))
    }

    pub fn normal(&self) -> Point2 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// The closure of the complement.
    pub fn flipped(&self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    /// Signed distance, negative inside.
    #[inline]
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Convex polygon with counter-clockwise vertices; possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validates and normalizes a vertex list (either orientation).
    ///
    /// Non-convex input is rejected. Degenerate input (fewer than three
    /// distinct vertices or area below [`EPS_AREA`]) yields the empty polygon.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut vs = vertices;
        if signed_area(&vs) < 0.0 {
            vs.reverse();
        }
        let poly = Self::from_raw(vs);
        let n = poly.vertices.len();
        for i in 0..n {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            let c = poly.vertices[(i + 2) % n];
            if (b - a).cross(c - b) < -EPS_GEOM {
                return Err(Error::NonConvex);
            }
        }
        Ok(poly)
    }

    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
        }
    }

    pub fn triangle(a: Point2, b: Point2, c: Point2) -> Result<Self> {
        Self::new(vec![a, b, c])
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    /// Convex hull of `points` (monotone chain).
    pub fn convex_hull(points: &[Point2]) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than three distinct points"));
        }
        let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
        let forward: Vec<Point2> = pts.clone();
        let backward: Vec<Point2> = pts.into_iter().rev().collect();
        for chain in [forward, backward] {
            let start = hull.len();
            for p in chain {
                while hull.len() >= start + 2
                    && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(p - hull[hull.len() - 2])
                        <= 0.0
                {
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        Self::new(hull)
    }

    /// Trusted constructor for CCW output of clipping and affine images.
    pub(crate) fn from_raw(mut vs: Vec<Point2>) -> Self {
        dedup_ring(&mut vs);
        drop_collinear(&mut vs);
        if vs.len() < 3 || signed_area(&vs) < EPS_AREA {
            return Self::empty();
        }
        Self { vertices: vs }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Shoelace area; zero for the empty polygon.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).max(0.0)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        if n == 0 {
            return Point2::ORIGIN;
        }
        let o = self.vertices[0];
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 1..n - 1 {
            let p = self.vertices[i] - o;
            let q = self.vertices[i + 1] - o;
            let w = p.cross(q);
            cx += w * (p.x + q.x);
            cy += w * (p.y + q.y);
            a2 += w;
        }
        if a2.abs() < f64::MIN_POSITIVE {
            return o;
        }
        Point2::new(o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2))
    }

    pub fn bbox(&self) -> Bbox {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        Bbox { min, max }
    }

    /// Directed edges `(v_i, v_{i+1})`, closing the ring.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// The half-planes whose intersection is this polygon.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        self.edges()
            .filter_map(|(a, b)| HalfPlane::left_of(a, b).ok())
            .collect()
    }

    /// Membership with slack `tol` (distance outside still accepted).
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        !self.is_empty()
            && self
                .half_planes()
                .iter()
                .all(|h| h.signed_distance(p) <= tol)
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn depth(&self, p: Point2) -> f64 {
        self.half_planes()
            .iter()
            .map(|h| -h.signed_distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Sutherland–Hodgman step: `self ∩ h`.
    pub fn clip(&self, h: &HalfPlane) -> ConvexPolygon {
        if self.is_empty() {
            return Self::empty();
        }
        let d: Vec<f64> = self
            .vertices
            .iter()
            .map(|&v| {
                let s = h.signed_distance(v);
                if s.abs() < ON_LINE {
                    0.0
                } else {
                    s
                }
            })
            .collect();
        if d.iter().all(|&s| s <= 0.0) {
            return self.clone();
        }
        if d.iter().all(|&s| s >= 0.0) {
            return Self::empty();
        }
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (cur, next) = (self.vertices[i], self.vertices[j]);
            let (dc, dn) = (d[i], d[j]);
            if dc <= 0.0 {
                out.push(cur);
            }
            if (dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0) {
                let s = dc / (dc - dn);
                out.push(cur + (next - cur) * s);
            }
        }
        Self::from_raw(out)
    }

    /// `self ∩ other` by clipping against each edge of `other`.
    pub fn intersect(&self, other: &ConvexPolygon) -> ConvexPolygon {
        if self.is_empty() || other.is_empty() || !self.bbox().overlaps(&other.bbox()) {
            return Self::empty();
        }
        let mut acc = self.clone();
        for h in other.half_planes() {
            acc = acc.clip(&h);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// Decomposes `self \ other` into convex pieces (empty pieces dropped).
    pub fn subtract(&self, other: &ConvexPolygon) -> Vec<ConvexPolygon> {
        if self.is_empty() {
            return Vec::new();
        }
        if other.is_empty() || !self.bbox().overlaps(&other.bbox()) {
            return vec![self.clone()];
        }
        let mut rest = self.clone();
        let mut out = Vec::new();
        for h in other.half_planes() {
            let outside = rest.clip(&h.flipped());
            if !outside.is_empty() {
                out.push(outside);
            }
            rest = rest.clip(&h);
            if rest.is_empty() {
                break;
            }
        }
        out
    }

    /// Vertices rounded to [`SNAP_GRID`].
    pub fn snapped(&self) -> ConvexPolygon {
        Self::from_raw(self.vertices.iter().map(|v| v.snapped()).collect())
    }

    /// Smallest interior angle in radians.
    pub fn min_interior_angle(&self) -> Result<f64> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::DegeneratePolygon("fewer than three vertices"));
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            let v = self.vertices[i];
            let prev = self.vertices[(i + n - 1) % n] - v;
            let next = self.vertices[(i + 1) % n] - v;
            let angle = prev.cross(next).abs().atan2(prev.dot(next));
            best = best.min(angle);
        }
        Ok(best)
    }

    /// Radius of the largest inscribed disk.
    ///
    /// Solves `max r s.t. n_k·c + r <= o_k` over all edges by enumerating the
    /// vertices of the three-variable feasible region.
    pub fn inradius(&self) -> Result<f64> {
        if self.vertices.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than three vertices"));
        }
        let hs = self.half_planes();
        let m = hs.len();
        let mut best: Option<f64> = None;
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let rows = [hs[i], hs[j], hs[k]];
                    let Some((c, r)) = solve_incircle(&rows) else {
                        continue;
                    };
                    let feasible = hs.iter().all(|h| h.signed_distance(c) + r <= 1e-10);
                    if feasible && r >= 0.0 && best.is_none_or(|b| r > b) {
                        best = Some(r);
                    }
                }
            }
        }
        best.ok_or(Error::DegeneratePolygon("no inscribed disk found"))
    }
}

/// Solves `n·c + r = o` for three half-planes; `None` if singular.
fn solve_incircle(rows: &[HalfPlane; 3]) -> Option<(Point2, f64)> {
    let m = [
        [rows[0].normal.x, rows[0].normal.y, 1.0],
        [rows[1].normal.x, rows[1].normal.y, 1.0],
        [rows[2].normal.x, rows[2].normal.y, 1.0],
    ];
    let rhs = [rows[0].offset, rows[1].offset, rows[2].offset];
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let det = det3(m);
    if det.abs() < 1e-12 {
        return None;
    }
    let mut sol = [0.0; 3];
    for (col, s) in sol.iter_mut().enumerate() {
        let mut a = m;
        for row in 0..3 {
            a[row][col] = rhs[row];
        }
        *s = det3(a) / det;
    }
    Some((Point2::new(sol[0], sol[1]), sol[2]))
}

fn signed_area(vs: &[Point2]) -> f64 {
    let n = vs.len();
    if n < 3 {
        return 0.0;
    }
    let o = vs[0];
    let mut s = 0.0;
    for i in 1..n - 1 {
        s += (vs[i] - o).cross(vs[i + 1] - o);
    }
    0.5 * s
}

fn dedup_ring(vs: &mut Vec<Point2>) {
    vs.dedup_by(|b, a| a.dist(*b) < EPS_GEOM);
    while vs.len() > 1 && vs[0].dist(vs[vs.len() - 1]) < EPS_GEOM {
        vs.pop();
    }
}

fn drop_collinear(vs: &mut Vec<Point2>) {
    let mut changed = true;
    while changed && vs.len() >= 3 {
        changed = false;
        let n = vs.len();
        for i in 0..n {
            let a = vs[(i + n - 1) % n];
            let b = vs[i];
            let c = vs[(i + 1) % n];
            let chord = c - a;
            let len = chord.norm();
            if len < EPS_GEOM || ((b - a).cross(chord) / len).abs() < COLLINEAR_DIST {
                vs.remove(i);
                changed = true;
                break;
            }
        }
    }
}

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scale(&self, s: f64) -> Matrix2 {
        Matrix2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)
    }

    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        if det.abs() <= EPS_GEOM {
            return Err(Error::SingularMatrix { det });
        }
        Ok(Matrix2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixNorms {
    /// Largest singular value.
    pub spectral: f64,
    pub max_entry: f64,
    pub det: f64,
}

/// Closed-form 2x2 singular values: `s² = (F ± sqrt(F² - 4 det²)) / 2`
/// with `F` the squared Frobenius norm.
pub fn matrix_norms(m: &Matrix2) -> MatrixNorms {
    let det = m.det();
    let frob2 = m.entries().iter().map(|v| v * v).sum::<f64>();
    let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
    let spectral = (0.5 * (frob2 + disc)).sqrt();
    let max_entry = m.entries().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    MatrixNorms {
        spectral,
        max_entry,
        det,
    }
}

/// Smallest singular value of a 2x2 matrix.
pub fn min_singular_value(m: &Matrix2) -> f64 {
    let n = matrix_norms(m);
    if n.spectral == 0.0 {
        0.0
    } else {
        n.det.abs() / n.spectral
    }
}

/// `p ↦ linear·p + shift`, always invertible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap2 {
    pub linear: Matrix2,
    pub shift: Point2,
}

impl AffineMap2 {
    pub fn new(linear: Matrix2, shift: Point2) -> Result<Self> {
        if !linear.is_finite() || !shift.is_finite() {
            return Err(Error::NonFinite);
        }
        let det = linear.det();
        if det.abs() <= EPS_GEOM {
            return Err(Error::SingularMatrix { det });
        }
        Ok(Self { linear, shift })
    }

    pub fn identity() -> Self {
        Self {
            linear: Matrix2::IDENTITY,
            shift: Point2::ORIGIN,
        }
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        self.linear.apply(p) + self.shift
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &AffineMap2) -> AffineMap2 {
        AffineMap2 {
            linear: self.linear.mul(&inner.linear),
            shift: self.linear.apply(inner.shift) + self.shift,
        }
    }

    pub fn inverse(&self) -> Result<AffineMap2> {
        let inv = self.linear.inverse()?;
        Ok(AffineMap2 {
            linear: inv,
            shift: -inv.apply(self.shift),
        })
    }

    pub fn jacobian_abs(&self) -> f64 {
        self.linear.det().abs()
    }
}

/// Vertex-wise image of `p`, re-oriented counter-clockwise.
pub fn affine_image(m: &AffineMap2, p: &ConvexPolygon) -> Result<ConvexPolygon> {
    let det = m.linear.det();
    if det.abs() <= EPS_GEOM {
        return Err(Error::SingularMatrix { det });
    }
    let mut vs: Vec<Point2> = p.vertices().iter().map(|&v| m.apply(v)).collect();
    if det < 0.0 {
        vs.reverse();
    }
    Ok(ConvexPolygon::from_raw(vs))
}

/// Preimage of a convex polygon under an invertible affine map.
pub fn affine_preimage(m: &AffineMap2, p: &ConvexPolygon) -> Result<ConvexPolygon> {
    affine_image(&m.inverse()?, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, SQRT_2};

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn t0() -> ConvexPolygon {
        ConvexPolygon::triangle(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)).unwrap()
    }

    fn t1() -> ConvexPolygon {
        ConvexPolygon::triangle(p(1.0, 0.0), p(2.0, 0.0), p(1.0, 1.0)).unwrap()
    }

    fn tri_t() -> ConvexPolygon {
        ConvexPolygon::triangle(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1.0)).unwrap()
    }

    fn same_vertex_set(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
        a.len() == b.len()
            && a.vertices()
                .iter()
                .all(|v| b.vertices().iter().any(|w| v.dist(*w) < 1e-12))
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.2),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.5, 0.5),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 0.0),
        ];
        let h = ConvexPolygon::convex_hull(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert!((h.area() - 1.0).abs() < 1e-15);
        assert!(ConvexPolygon::convex_hull(&pts[..2]).is_err());
    }

    #[test]
    fn areas() {
        assert_abs_diff_eq!(tri_t().area(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t0().area(), 0.5, epsilon = 1e-15);
        let flat = ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]).unwrap();
        assert!(flat.is_empty());
        assert_eq!(flat.area(), 0.0);
    }

    #[test]
    fn orientation_is_normalized() {
        let cw = ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(cw.area(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_convex_and_nan() {
        let dart = vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.2), p(1.0, 1.0)];
        assert_eq!(ConvexPolygon::new(dart), Err(Error::NonConvex));
        assert_eq!(
            ConvexPolygon::new(vec![p(0.0, f64::NAN), p(1.0, 0.0), p(0.0, 1.0)]),
            Err(Error::NonFinite)
        );
    }

    #[test]
    fn clip_examples() {
        let h = HalfPlane::new(p(1.0, 0.0), 0.5).unwrap();
        let c = t0().clip(&h);
        let expected = ConvexPolygon::triangle(p(0.0, 0.0), p(0.5, 0.0), p(0.5, 0.5)).unwrap();
        assert!(same_vertex_set(&c, &expected));
        assert_abs_diff_eq!(c.area(), 0.125, epsilon = 1e-15);

        let all = HalfPlane::new(p(1.0, 0.0), 5.0).unwrap();
        assert!(same_vertex_set(&t0().clip(&all), &t0()));

        let none = HalfPlane::new(p(1.0, 0.0), -1.0).unwrap();
        assert!(t0().clip(&none).is_empty());
    }

    #[test]
    fn intersect_examples() {
        assert!(same_vertex_set(&t0().intersect(&t0()), &t0()));
        assert!(t0().intersect(&t1()).is_empty());
        let a = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let b = ConvexPolygon::rectangle(0.5, 0.0, 1.5, 1.0).unwrap();
        assert_abs_diff_eq!(a.intersect(&b).area(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn subtract_tiles_the_difference() {
        let a = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let b = ConvexPolygon::triangle(p(0.2, 0.2), p(0.8, 0.3), p(0.4, 0.9)).unwrap();
        let parts = a.subtract(&b);
        let total: f64 = parts.iter().map(|q| q.area()).sum();
        assert_abs_diff_eq!(total + b.area(), 1.0, epsilon = 1e-14);
        for (i, x) in parts.iter().enumerate() {
            assert!(x.intersect(&b).area() < EPS_AREA);
            for y in &parts[i + 1..] {
                assert!(x.intersect(y).area() < EPS_AREA);
            }
        }
    }

    #[test]
    fn affine_image_examples() {
        let lam0 = AffineMap2::new(Matrix2::new(1.0, 1.0, 1.0, -1.0), Point2::ORIGIN).unwrap();
        let img = affine_image(&lam0, &t0()).unwrap();
        assert!(same_vertex_set(&img, &tri_t()));
        assert_abs_diff_eq!(img.area(), 1.0, epsilon = 1e-15);

        let lam1 = AffineMap2::new(Matrix2::new(-1.0, 1.0, -1.0, -1.0), p(2.0, 2.0)).unwrap();
        assert!(same_vertex_set(
            &affine_image(&lam1, &t1()).unwrap(),
            &tri_t()
        ));

        let id = affine_image(&AffineMap2::identity(), &t1()).unwrap();
        assert!(same_vertex_set(&id, &t1()));

        let singular = AffineMap2 {
            linear: Matrix2::new(1.0, 1.0, 1.0, 1.0),
            shift: Point2::ORIGIN,
        };
        assert!(matches!(
            affine_image(&singular, &t0()),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn norms_examples() {
        let inv = Matrix2::new(1.0, 1.0, 1.0, -1.0).inverse().unwrap();
        let n = matrix_norms(&inv);
        assert_abs_diff_eq!(n.spectral, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(n.max_entry, 0.5, epsilon = 1e-15);

        let n = matrix_norms(&Matrix2::IDENTITY);
        assert_abs_diff_eq!(n.spectral, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.max_entry, 1.0, epsilon = 1e-15);

        let n = matrix_norms(&Matrix2::new(2.0, 0.0, 0.0, 3.0));
        assert_abs_diff_eq!(n.spectral, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.max_entry, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.det, 6.0, epsilon = 1e-15);
    }

    /// Power iteration on `mᵀm` as an independent route to the spectral norm.
    #[test]
    fn spectral_norm_matches_power_iteration() {
        let m = Matrix2::new(0.3, -1.7, 2.2, 0.9);
        let mtm = Matrix2::new(
            m.a * m.a + m.c * m.c,
            m.a * m.b + m.c * m.d,
            m.a * m.b + m.c * m.d,
            m.b * m.b + m.d * m.d,
        );
        let mut v = p(1.0, 0.3);
        for _ in 0..200 {
            let w = mtm.apply(v);
            v = w * (1.0 / w.norm());
        }
        let sigma = m.apply(v).norm();
        assert_abs_diff_eq!(matrix_norms(&m).spectral, sigma, epsilon = 1e-12);
    }

    #[test]
    fn angle_examples() {
        let sq = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(sq.min_interior_angle().unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            t0().min_interior_angle().unwrap(),
            FRAC_PI_4,
            epsilon = 1e-15
        );
        let eq =
            ConvexPolygon::triangle(p(0.0, 0.0), p(1.0, 0.0), p(0.5, 3f64.sqrt() / 2.0)).unwrap();
        assert_abs_diff_eq!(eq.min_interior_angle().unwrap(), FRAC_PI_3, epsilon = 1e-15);
        assert!(ConvexPolygon::empty().min_interior_angle().is_err());
    }

    #[test]
    fn inradius_examples() {
        let sq = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(sq.inradius().unwrap(), 0.5, epsilon = 1e-12);
        // Right triangle with legs a, b and hypotenuse c: r = (a + b - c) / 2.
        assert_abs_diff_eq!(
            t0().inradius().unwrap(),
            (2.0 - SQRT_2) / 2.0,
            epsilon = 1e-12
        );
        let rect = ConvexPolygon::rectangle(0.0, 0.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(rect.inradius().unwrap(), 0.5, epsilon = 1e-12);
        assert!(ConvexPolygon::empty().inradius().is_err());
    }

    #[test]
    fn centroid_of_triangle() {
        let c = tri_t().centroid();
        assert_abs_diff_eq!(c.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.y, 1.0 / 3.0, epsilon = 1e-15);
    }
}
