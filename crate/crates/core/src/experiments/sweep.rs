//! Parameter sweep of Ulam invariant densities against a reference parameter.

use super::TestFunction;
use crate::density::{build_ulam, ulam_fixed, DensityVector, FixedPoint, UlamGrid};
use crate::error::{Error, Result};
use crate::maps::{make_tent2d, power, tau};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Iterate of `Λ_t` whose Ulam operator is used (1 or 3 in practice).
    pub power: usize,
    pub resolution: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            power: 1,
            resolution: 64,
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub t0: f64,
    pub power: usize,
    pub resolution: usize,
    /// `‖h_t - h_{t0}‖₁` on the shared grid.
    pub l1_dist: f64,
    /// `|∫f dμ_t - ∫f dμ_{t0}|`, aligned with [`TestFunction::ALL`].
    pub weakstar_gaps: [f64; 6],
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl SweepRow {
    pub fn gap(&self, f: TestFunction) -> f64 {
        let i = TestFunction::ALL
            .iter()
            .position(|&g| g == f)
            .expect("listed");
        self.weakstar_gaps[i]
    }
}

/// `∫ f h dm` for every test function, exact per grid cell.
pub fn weak_star_integrals(h: &DensityVector, grid: &UlamGrid) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (v, cell) in h.values.iter().zip(grid.cells()) {
        for (o, f) in out.iter_mut().zip(TestFunction::ALL) {
            *o += v * f.integrate(cell);
        }
    }
    out
}

fn fixed_density(t: f64, opts: &SweepOptions) -> Result<(UlamGrid, FixedPoint<DensityVector>)> {
    let m = power(&make_tent2d(t)?, opts.power)?;
    let op = build_ulam(&m, opts.resolution)?;
    let fp = ulam_fixed(&op, opts.tol, opts.max_iter);
    Ok((op.grid, fp))
}

fn check_parameter(name: &'static str, t: f64) -> Result<()> {
    if !(t >= tau() - 1e-12 && t <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name,
            value: t,
            range: "[tau, 1]",
        });
    }
    Ok(())
}

/// One row per `t`, in the order given. Rows whose power iteration did not
/// reach `tol` are still returned, flagged by `converged = false` (including
/// when the reference density failed to converge).
pub fn stability_sweep(t0: f64, ts: &[f64], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    if opts.resolution < 16 {
        return Err(Error::ParameterOutOfRange {
            name: "resolution",
            value: opts.resolution as f64,
            range: ">= 16",
        });
    }
    check_parameter("t0", t0)?;
    for &t in ts {
        check_parameter("t", t)?;
    }
    let (grid, reference) = fixed_density(t0, opts)?;
    let ref_moments = weak_star_integrals(&reference.value, &grid);
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let fp = if t == t0 {
            reference.clone()
        } else {
            fixed_density(t, opts)?.1
        };
        let moments = weak_star_integrals(&fp.value, &grid);
        let mut gaps = [0.0; 6];
        for k in 0..6 {
            gaps[k] = (moments[k] - ref_moments[k]).abs();
        }
        rows.push(SweepRow {
            t,
            t0,
            power: opts.power,
            resolution: opts.resolution,
            l1_dist: fp.value.l1_distance(&reference.value, &grid),
            weakstar_gaps: gaps,
            iterations: fp.iterations,
            residual: fp.residual,
            converged: fp.converged && reference.converged,
        });
    }
    Ok(rows)
}
