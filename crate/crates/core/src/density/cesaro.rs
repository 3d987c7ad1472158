//! Fixed densities by Cesàro averaging of exact pushforwards.

use super::{
    l1_distance, linear_combination, lp_norm, push_forward, FixedPoint, PiecewisePolyDensity,
    UlamGrid,
};
use crate::error::{Error, Result};
use crate::maps::PiecewiseMap;

/// What to do with the iterates between pushforwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoarsenPolicy {
    /// Keep the exact arrangement. Cell counts grow geometrically.
    None,
    /// Average each iterate onto the square grid of the given resolution.
    ProjectToGrid(usize),
}

/// Cesàro means `A_n = (1/n) Σ_{k<n} Pᵏ f0` until `‖P A_n - A_n‖₁ < tol`.
///
/// The residual is evaluated as `‖Pⁿ f0 - f0‖₁ / n`, which equals
/// `‖P A_n - A_n‖₁` by telescoping (for the coarsened operator when a grid
/// projection is in effect). `f0` must be a density of unit mass.
pub fn cesaro_fixed_density(
    m: &PiecewiseMap,
    f0: &PiecewisePolyDensity,
    n_max: usize,
    tol: f64,
    coarsen: CoarsenPolicy,
) -> Result<FixedPoint<PiecewisePolyDensity>> {
    let mass = lp_norm(f0, 1.0);
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::ParameterOutOfRange {
            name: "initial density mass",
            value: mass,
            range: "1",
        });
    }
    if n_max == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n_max",
            value: 0.0,
            range: ">= 1",
        });
    }
    let grid = match coarsen {
        CoarsenPolicy::None => None,
        CoarsenPolicy::ProjectToGrid(n) => Some(UlamGrid::new(m.region().clone(), n)?),
    };
    let coarse = |f: PiecewisePolyDensity| -> Result<PiecewisePolyDensity> {
        match &grid {
            Some(g) => f.project_to_grid(g)?.to_density(g),
            None => Ok(f),
        }
    };

    let start = coarse(f0.clone())?;
    let mut current = start.clone();
    let mut sum = start.clone();
    let mut residual = f64::INFINITY;
    for n in 1..=n_max {
        current = coarse(push_forward(m, &current)?)?;
        residual = l1_distance(&current, &start)? / n as f64;
        if residual < tol || n == n_max {
            return Ok(FixedPoint {
                value: sum.scaled(1.0 / n as f64).normalized(),
                iterations: n,
                residual,
                converged: residual < tol,
            });
        }
        sum = coarse(linear_combination(1.0, &sum, 1.0, &current)?)?;
    }
    unreachable!("loop returns at n_max (residual {residual})")
}
