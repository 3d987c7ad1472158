//! Numerical studies on the tent family: parameter sweeps of the invariant
//! density, the Lasota–Yorke variation diagnostic, orbit statistics, and a
//! one-dimensional Ulam oracle.

mod ly;
mod oracle1d;
mod orbit;
mod sweep;

pub use ly::{ly_check, ly_iterates, LyRow, LY_MAX_STEPS};
pub use oracle1d::{tent1d_ulam, Tent1dUlam};
pub use orbit::{
    birkhoff_average, lyapunov_exponent, orbit_stats, random_interior_point, OrbitStats,
    PERTURB_RETRIES,
};
pub use sweep::{stability_sweep, weak_star_integrals, SweepOptions, SweepRow};

use std::fmt;
use std::str::FromStr;

use crate::geom::{ConvexPolygon, Point2};

/// Monomials of degree at most two, used as observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestFunction {
    One,
    X,
    Y,
    X2,
    Xy,
    Y2,
}

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [
        TestFunction::One,
        TestFunction::X,
        TestFunction::Y,
        TestFunction::X2,
        TestFunction::Xy,
        TestFunction::Y2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::One => "1",
            TestFunction::X => "x",
            TestFunction::Y => "y",
            TestFunction::X2 => "x2",
            TestFunction::Xy => "xy",
            TestFunction::Y2 => "y2",
        }
    }

    pub fn eval(self, p: Point2) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::X => p.x,
            TestFunction::Y => p.y,
            TestFunction::X2 => p.x * p.x,
            TestFunction::Xy => p.x * p.y,
            TestFunction::Y2 => p.y * p.y,
        }
    }

    /// `∫_q f dm`, exact: fan triangulation from the first vertex and the
    /// closed-form monomial moments of each triangle.
    pub fn integrate(self, q: &ConvexPolygon) -> f64 {
        let v = q.vertices();
        if v.len() < 3 {
            return 0.0;
        }
        let mut total = 0.0;
        for k in 1..v.len() - 1 {
            total += self.integrate_triangle(v[0], v[k], v[k + 1]);
        }
        total
    }

    fn integrate_triangle(self, a: Point2, b: Point2, c: Point2) -> f64 {
        let area = 0.5 * (b - a).cross(c - a);
        let (xs, ys) = ([a.x, b.x, c.x], [a.y, b.y, c.y]);
        let sum = |v: [f64; 3]| v[0] + v[1] + v[2];
        // ∫ u·w over a triangle is A/12 (Σ u_i w_i + Σu Σw) for affine u, w.
        let second = |u: [f64; 3], w: [f64; 3]| {
            area / 12.0 * (u[0] * w[0] + u[1] * w[1] + u[2] * w[2] + sum(u) * sum(w))
        };
        match self {
            TestFunction::One => area,
            TestFunction::X => area * sum(xs) / 3.0,
            TestFunction::Y => area * sum(ys) / 3.0,
            TestFunction::X2 => second(xs, xs),
            TestFunction::Xy => second(xs, ys),
            TestFunction::Y2 => second(ys, ys),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown test function {s:?} (expected 1, x, y, x2, xy, y2)"))
    }
}
