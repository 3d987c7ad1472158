//! Lasota–Yorke diagnostic: exact variations of iterated pushforwards
//! against the bound `λʲ V(f) + K₁ ‖f‖₁`.

use crate::density::{lp_norm, push_forward, variation, PiecewisePolyDensity};
use crate::error::{Error, Result};
use crate::maps::{make_tent2d, power, ConditionCertificate};

/// Largest number of exact pushforward steps accepted.
pub const LY_MAX_STEPS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct LyRow {
    pub j: usize,
    /// `V(Pʲ f0)`.
    pub variation_j: f64,
    /// `λʲ V(f0) + K₁ ‖f0‖₁`.
    pub bound: f64,
    /// `variation_j / bound`.
    pub ratio: f64,
    /// Cells of the exact arrangement of `Pʲ f0`.
    pub cells: usize,
}

/// Runs `P` for the iterate `Λ_t^{cert.power}` on `f0`, `j = 0..=j_max`,
/// without coarsening.
pub fn ly_check(
    t: f64,
    f0: &PiecewisePolyDensity,
    j_max: usize,
    cert: &ConditionCertificate,
) -> Result<Vec<LyRow>> {
    Ok(ly_iterates(t, f0, j_max, cert)?.0)
}

/// As [`ly_check`], also returning the densities `Pʲ f0`.
pub fn ly_iterates(
    t: f64,
    f0: &PiecewisePolyDensity,
    j_max: usize,
    cert: &ConditionCertificate,
) -> Result<(Vec<LyRow>, Vec<PiecewisePolyDensity>)> {
    if !cert.satisfied {
        return Err(Error::Uncertified {
            lambda: cert.lambda,
        });
    }
    if j_max > LY_MAX_STEPS {
        return Err(Error::ParameterOutOfRange {
            name: "j_max",
            value: j_max as f64,
            range: "<= 5",
        });
    }
    let m = power(&make_tent2d(t)?, cert.power)?;
    let v0 = variation(f0);
    let mass = lp_norm(f0, 1.0);
    let mut rows = Vec::with_capacity(j_max + 1);
    let mut iterates = Vec::with_capacity(j_max + 1);
    let mut f = f0.clone();
    for j in 0..=j_max {
        if j > 0 {
            f = push_forward(&m, &f)?;
        }
        let vj = variation(&f);
        let bound = cert.lambda.powi(j as i32) * v0 + cert.k1 * mass;
        rows.push(LyRow {
            j,
            variation_j: vj,
            bound,
            ratio: vj / bound,
            cells: f.len(),
        });
        iterates.push(f.clone());
    }
    Ok((rows, iterates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{certify, tent_left_domain, tent_region, NormConvention};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    fn cert(t: f64, n: usize) -> ConditionCertificate {
        let m = power(&make_tent2d(t).unwrap(), n).unwrap();
        certify(&m, NormConvention::PaperFormula).unwrap()
    }

    #[test]
    fn uniform_is_a_fixed_point_at_t1() {
        let f0 = PiecewisePolyDensity::constant(tent_region(), 1.0).unwrap();
        let rows = ly_check(1.0, &f0, 3, &cert(1.0, 3)).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_abs_diff_eq!(r.variation_j, 2.0 + 2.0 * SQRT_2, epsilon = 1e-9);
            assert!(r.ratio <= 1.0);
        }
    }

    #[test]
    fn left_indicator_drops_in_one_step() {
        let f0 = PiecewisePolyDensity::indicator(tent_region(), &tent_left_domain(), 2.0).unwrap();
        let rows = ly_check(1.0, &f0, 1, &cert(1.0, 3)).unwrap();
        assert_abs_diff_eq!(rows[0].variation_j, 2.0 * (2.0 + SQRT_2), epsilon = 1e-12);
        assert_abs_diff_eq!(rows[1].variation_j, 2.0 + 2.0 * SQRT_2, epsilon = 1e-9);
        assert!(rows[0].bound >= rows[0].variation_j);
    }

    #[test]
    fn requires_a_satisfied_certificate() {
        let m = power(&make_tent2d(1.0).unwrap(), 1).unwrap();
        let mut c = certify(&m, NormConvention::Spectral).unwrap();
        c.satisfied = false;
        let f0 = PiecewisePolyDensity::constant(tent_region(), 1.0).unwrap();
        assert!(matches!(
            ly_check(1.0, &f0, 2, &c),
            Err(Error::Uncertified { .. })
        ));
        assert!(ly_check(1.0, &f0, 6, &cert(1.0, 3)).is_err());
    }
}
