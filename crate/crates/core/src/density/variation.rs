//! Total variation of piecewise-constant polygonal functions.
//!
//! For such `f` (extended by zero outside its region) the distributional
//! variation is the jump-weighted length of the discontinuity set. Cell edges
//! are grouped by supporting line; along each line the values seen from the
//! left and from the right are swept as 1D step functions and
//! `∫ |left - right| ds` is accumulated, so partially overlapping edges from
//! neighbouring cells are matched exactly.

use std::f64::consts::PI;

use super::{lp_norm, PiecewisePolyDensity};
use crate::error::{Error, Result};
use crate::geom::Point2;

/// Sharp isoperimetric constant of `‖f‖₂ <= C·V(f)` in the plane, `1/(2√π)`.
pub const SOBOLEV_CONSTANT: f64 = 0.282_094_791_773_878_14;

const ANGLE_TOL: f64 = 1e-8;
const OFFSET_TOL: f64 = 1e-9;
const LENGTH_TOL: f64 = 1e-12;

struct Edge {
    angle: f64,
    offset: f64,
    dir: Point2,
    a: Point2,
    b: Point2,
    /// Signed value: positive if the owning cell lies left of `dir`.
    value: f64,
}

pub fn variation(f: &PiecewisePolyDensity) -> f64 {
    let mut edges = Vec::new();
    for cell in f.cells() {
        if cell.value == 0.0 {
            continue;
        }
        for (a, b) in cell.polygon.edges() {
            let d = b - a;
            let len = d.norm();
            if len < LENGTH_TOL {
                continue;
            }
            let mut dir = d * (1.0 / len);
            let mut value = cell.value;
            let mut angle = dir.y.atan2(dir.x);
            if angle < 0.0 {
                angle += PI;
                dir = -dir;
                value = -value;
            }
            if angle > PI - ANGLE_TOL {
                angle -= PI;
                dir = -dir;
                value = -value;
            }
            edges.push(Edge {
                angle,
                offset: dir.cross(a),
                dir,
                a,
                b,
                value,
            });
        }
    }
    edges.sort_by(|x, y| x.angle.total_cmp(&y.angle));

    let mut total = 0.0;
    for (a0, a1) in runs(&edges, ANGLE_TOL, |e| e.angle) {
        let by_angle = &mut edges[a0..a1];
        by_angle.sort_by(|x, y| x.offset.total_cmp(&y.offset));
        for (o0, o1) in runs(by_angle, OFFSET_TOL, |e| e.offset) {
            total += line_jump(&by_angle[o0..o1]);
        }
    }
    total
}

/// Maximal index ranges of a sorted slice whose consecutive keys differ by
/// at most `tol`.
fn runs(items: &[Edge], tol: f64, key: impl Fn(&Edge) -> f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=items.len() {
        if i == items.len() || key(&items[i]) - key(&items[i - 1]) > tol {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// `∫ |v_left(s) - v_right(s)| ds` along one supporting line.
fn line_jump(line: &[Edge]) -> f64 {
    let dir = line[0].dir;
    // (position, signed value delta)
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * line.len());
    for e in line {
        let (s0, s1) = (dir.dot(e.a), dir.dot(e.b));
        let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
        events.push((lo, e.value));
        events.push((hi, -e.value));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut jump = 0.0_f64;
    let mut prev = events[0].0;
    for (s, delta) in events {
        if s > prev {
            total += jump.abs() * (s - prev);
            prev = s;
        }
        jump += delta;
    }
    total
}

/// `‖f‖₂ / V(f)`; at most [`SOBOLEV_CONSTANT`] for every BV function.
pub fn sobolev_ratio(f: &PiecewisePolyDensity) -> Result<f64> {
    let v = variation(f);
    if v <= 1e-15 {
        return Err(Error::ZeroVariation);
    }
    Ok(lp_norm(f, 2.0) / v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::ConvexPolygon;
    use crate::maps::{tent_left_domain, tent_region};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    #[test]
    fn constant_on_triangle_is_perimeter() {
        let f = PiecewisePolyDensity::constant(tent_region(), 1.0).unwrap();
        assert_abs_diff_eq!(variation(&f), 2.0 + 2.0 * SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn indicator_of_left_half() {
        let f = PiecewisePolyDensity::indicator(tent_region(), &tent_left_domain(), 1.0).unwrap();
        assert_abs_diff_eq!(variation(&f), 2.0 + SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn zero_function() {
        let f = PiecewisePolyDensity::constant(tent_region(), 0.0).unwrap();
        assert_eq!(variation(&f), 0.0);
        assert_eq!(sobolev_ratio(&f), Err(Error::ZeroVariation));
    }

    /// Finely subdivided constants: interior edges carry no jump.
    #[test]
    fn subdivision_does_not_add_variation() {
        let sq = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let mut cells = Vec::new();
        for i in 0..3 {
            for j in 0..5 {
                let (x0, y0) = (i as f64 / 3.0, j as f64 / 5.0);
                cells.push((
                    ConvexPolygon::rectangle(x0, y0, x0 + 1.0 / 3.0, y0 + 0.2).unwrap(),
                    2.0,
                ));
            }
        }
        let f = PiecewisePolyDensity::new(sq, cells).unwrap();
        assert_abs_diff_eq!(variation(&f), 8.0, epsilon = 1e-12);
    }

    /// Steps 1 | 3 on the unit square: outer boundary 1·2 + 3·2 plus the
    /// half-length top/bottom pieces, plus the interior jump of 2.
    #[test]
    fn two_level_step() {
        let sq = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let f = PiecewisePolyDensity::new(
            sq,
            vec![
                (ConvexPolygon::rectangle(0.0, 0.0, 0.5, 1.0).unwrap(), 1.0),
                (ConvexPolygon::rectangle(0.5, 0.0, 1.0, 1.0).unwrap(), 3.0),
            ],
        )
        .unwrap();
        // left side 1, right side 3, top and bottom 0.5·1 + 0.5·3 each, interior 2.
        assert_abs_diff_eq!(variation(&f), 1.0 + 3.0 + 2.0 * 2.0 + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sobolev_examples() {
        let sq = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let f = PiecewisePolyDensity::constant(sq, 1.0).unwrap();
        assert_abs_diff_eq!(sobolev_ratio(&f).unwrap(), 0.25, epsilon = 1e-12);
        let g = PiecewisePolyDensity::indicator(tent_region(), &tent_left_domain(), 1.0).unwrap();
        assert_abs_diff_eq!(
            sobolev_ratio(&g).unwrap(),
            (0.5f64).sqrt() / (2.0 + SQRT_2),
            epsilon = 1e-12
        );
        let h = PiecewisePolyDensity::constant(tent_region(), 1.0).unwrap();
        assert_abs_diff_eq!(
            sobolev_ratio(&h).unwrap(),
            1.0 / (2.0 + 2.0 * SQRT_2),
            epsilon = 1e-12
        );
        assert!(sobolev_ratio(&h).unwrap() <= SOBOLEV_CONSTANT);
        assert_abs_diff_eq!(SOBOLEV_CONSTANT, 0.5 / PI.sqrt(), epsilon = 1e-16);
    }
}
