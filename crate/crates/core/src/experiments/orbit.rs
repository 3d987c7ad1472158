//! Orbit statistics: Birkhoff averages and Lyapunov exponents.
//!
//! Orbits are computed in floating point with two safeguards. A point closer
//! than `EPS_GEOM` to the critical set is nudged by `2·EPS_GEOM` in a seeded
//! random direction (the critical set is Lebesgue-null). Every step also adds
//! a seeded displacement of size `JITTER`: at `t = 1` the branch matrices
//! have integer entries, so an unperturbed floating-point orbit loses one bit
//! every other step and lands on a periodic lattice point after about a
//! hundred steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TestFunction;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Point2, EPS_GEOM};
use crate::maps::{make_tent2d, PiecewiseMap};

/// Attempts to move an orbit point off the critical set.
pub const PERTURB_RETRIES: usize = 5;

const JITTER: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStats {
    pub t: f64,
    pub seed: u64,
    pub n: usize,
    pub x0: Point2,
    pub lyapunov: f64,
    pub birkhoff: Vec<(TestFunction, f64)>,
}

/// Uniform point of `region` by rejection from its bounding box.
pub fn random_interior_point(region: &ConvexPolygon, rng: &mut impl Rng) -> Point2 {
    let bb = region.bbox();
    loop {
        let p = Point2::new(
            rng.random_range(bb.min.x..bb.max.x),
            rng.random_range(bb.min.y..bb.max.y),
        );
        if region.depth(p) > EPS_GEOM {
            return p;
        }
    }
}

fn random_direction(rng: &mut impl Rng) -> Point2 {
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    Point2::new(a.cos(), a.sin())
}

struct Orbit<'a> {
    map: &'a PiecewiseMap,
    rng: ChaCha8Rng,
    p: Point2,
}

impl<'a> Orbit<'a> {
    fn new(map: &'a PiecewiseMap, x0: Point2, seed: u64) -> Result<Self> {
        if !map.region().contains(x0, 0.0) {
            return Err(Error::OutsideRegion { x: x0.x, y: x0.y });
        }
        Ok(Self {
            map,
            rng: ChaCha8Rng::seed_from_u64(seed),
            p: x0,
        })
    }

    /// Moves the current point off the critical set if needed, then returns
    /// the branch it lies in.
    fn branch(&mut self) -> Result<usize> {
        let mut retries = 0;
        while self.map.critical_distance(self.p) < EPS_GEOM {
            if retries == PERTURB_RETRIES {
                return Err(Error::OrbitHitsCriticalSet { retries });
            }
            let q = self.p + random_direction(&mut self.rng) * (2.0 * EPS_GEOM);
            if self.map.region().contains(q, 0.0) {
                self.p = q;
            }
            retries += 1;
        }
        self.map.branch_index(self.p)
    }

    fn advance(&mut self, branch: usize) {
        let next = self.map.branches()[branch].map.apply(self.p);
        let jittered = next + random_direction(&mut self.rng) * JITTER;
        self.p = if self.map.region().contains(jittered, 0.0) {
            jittered
        } else {
            next
        };
    }
}

/// Birkhoff averages of `fns` and the Lyapunov exponent along one orbit of
/// `Λ_t` of length `n`, started at `x0`. The tangent vector starts in a
/// seeded random direction and is renormalized every step.
pub fn orbit_stats(
    t: f64,
    fns: &[TestFunction],
    x0: Point2,
    n: usize,
    seed: u64,
) -> Result<OrbitStats> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1",
        });
    }
    let map = make_tent2d(t)?;
    let mut orbit = Orbit::new(&map, x0, seed)?;
    let mut v = random_direction(&mut orbit.rng);
    let mut log_growth = 0.0;
    let mut sums = vec![0.0; fns.len()];
    for _ in 0..n {
        let b = orbit.branch()?;
        for (s, f) in sums.iter_mut().zip(fns) {
            *s += f.eval(orbit.p);
        }
        let w = map.branches()[b].map.linear.apply(v);
        let len = w.norm();
        log_growth += len.ln();
        v = w * (1.0 / len);
        orbit.advance(b);
    }
    Ok(OrbitStats {
        t,
        seed,
        n,
        x0,
        lyapunov: log_growth / n as f64,
        birkhoff: fns
            .iter()
            .zip(sums)
            .map(|(&f, s)| (f, s / n as f64))
            .collect(),
    })
}

/// `(1/n) log |DΛ_tⁿ(x0) v|` for a seeded random unit `v`.
pub fn lyapunov_exponent(t: f64, x0: Point2, n: usize, seed: u64) -> Result<f64> {
    Ok(orbit_stats(t, &[], x0, n, seed)?.lyapunov)
}

/// `(1/n) Σ_{j<n} f(Λ_tʲ x0)`.
pub fn birkhoff_average(t: f64, f: TestFunction, x0: Point2, n: usize, seed: u64) -> Result<f64> {
    Ok(orbit_stats(t, &[f], x0, n, seed)?.birkhoff[0].1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{tau, tent_region};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn start(seed: u64) -> Point2 {
        random_interior_point(&tent_region(), &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn lyapunov_is_log_of_conformal_factor() {
        for t in [1.0, 0.95, tau()] {
            for (seed, n) in [(1, 1), (2, 17), (3, 5000)] {
                let l = lyapunov_exponent(t, start(seed), n, seed).unwrap();
                assert_abs_diff_eq!(l, 0.5 * LN_2 + t.ln(), epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(
            lyapunov_exponent(1.0, start(9), 100, 9).unwrap(),
            0.346_573_590_279_972_6,
            epsilon = 1e-9
        );
    }

    #[test]
    fn constant_average_is_exactly_one() {
        let b = birkhoff_average(0.93, TestFunction::One, start(4), 12_345, 4).unwrap();
        assert_eq!(b, 1.0);
    }

    #[test]
    fn orbit_does_not_collapse_at_t1() {
        let b = birkhoff_average(1.0, TestFunction::Y, start(5), 200_000, 5).unwrap();
        assert_abs_diff_eq!(b, 1.0 / 3.0, epsilon = 0.01);
    }

    #[test]
    fn critical_points_are_moved() {
        // (1, 0.5) lies on the critical line x = 1.
        let s = orbit_stats(1.0, &[TestFunction::X], Point2::new(1.0, 0.5), 10, 6).unwrap();
        assert!(s.lyapunov.is_finite());
    }

    #[test]
    fn same_seed_same_orbit() {
        let a = orbit_stats(0.9, &TestFunction::ALL, start(7), 1000, 7).unwrap();
        let b = orbit_stats(0.9, &TestFunction::ALL, start(7), 1000, 7).unwrap();
        assert_eq!(a, b);
        assert!(orbit_stats(0.9, &[], Point2::new(5.0, 5.0), 10, 1).is_err());
    }
}
