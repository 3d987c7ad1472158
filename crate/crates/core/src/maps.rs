//! Piecewise-affine maps, the two-dimensional tent family and its powers,
//! and certification of the expansion / distortion / long-branch conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    affine_image, affine_preimage, matrix_norms, AffineMap2, ConvexPolygon, Matrix2, Point2,
    EPS_AREA, EPS_GEOM,
};
use crate::par;

/// Lower end `τ ≈ 0.882` of the parameter interval `[τ, 1]` on which the
/// tent family has a strange attractor with a unique acim.
pub const TAU: f64 = 0.882;

/// `(√2 + 1)^(1/4) / √2 = 0.88141...`, the closed form quoted alongside
/// `τ ≈ 0.882`. The two disagree in the third decimal; [`TAU`] is the value
/// the numeric checks are pinned to.
pub fn tau_closed_form() -> f64 {
    (2f64.sqrt() + 1.0).powf(0.25) / 2f64.sqrt()
}

/// Returns [`TAU`].
pub fn tau() -> f64 {
    TAU
}

/// Partition tolerance used when validating branch domains.
const PARTITION_TOL: f64 = 1e-9;

/// One affine branch `φ_i` on its domain `R_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch {
    pub domain: ConvexPolygon,
    pub map: AffineMap2,
    /// `|det|` of the linear part; constant on the branch.
    pub jacobian_abs: f64,
    /// Indices into the base map's branches, first step first.
    pub itinerary: Vec<usize>,
    /// Product over the itinerary of the max-entry norm of each step's
    /// inverse linear part.
    pub stepwise_inverse_bound: f64,
}

impl Branch {
    pub fn image(&self) -> Result<ConvexPolygon> {
        affine_image(&self.map, &self.domain)
    }
}

/// A map `R -> R` that is affine on each cell of a finite convex partition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseMap {
    region: ConvexPolygon,
    branches: Vec<Branch>,
    label: String,
    parameter: Option<f64>,
    power: usize,
}

impl PiecewiseMap {
    /// Builds a map from `(domain, branch map)` pairs.
    ///
    /// Domains must tile `region` mod 0 and every branch image must lie in
    /// `region`.
    pub fn new(
        region: ConvexPolygon,
        pieces: Vec<(ConvexPolygon, AffineMap2)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let branches = pieces
            .into_iter()
            .enumerate()
            .map(|(i, (domain, map))| {
                let inv = map.linear.inverse()?;
                Ok(Branch {
                    jacobian_abs: map.jacobian_abs(),
                    stepwise_inverse_bound: matrix_norms(&inv).max_entry,
                    domain,
                    map,
                    itinerary: vec![i],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Self {
            region,
            branches,
            label: label.into(),
            parameter: None,
            power: 1,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.region.is_empty() {
            return Err(Error::InvalidPartition("empty region".into()));
        }
        if self.branches.is_empty() {
            return Err(Error::InvalidPartition("no branches".into()));
        }
        let tol = PARTITION_TOL * (1 + self.branches.len()) as f64;
        let total: f64 = self.branches.iter().map(|b| b.domain.area()).sum();
        if (total - self.region.area()).abs() > tol {
            return Err(Error::InvalidPartition(format!(
                "domain areas sum to {total}, region area is {}",
                self.region.area()
            )));
        }
        for (i, a) in self.branches.iter().enumerate() {
            if a.domain.is_empty() {
                return Err(Error::InvalidPartition(format!(
                    "branch {i} has empty domain"
                )));
            }
            for b in &self.branches[i + 1..] {
                if a.domain.intersect(&b.domain).area() > tol {
                    return Err(Error::InvalidPartition(format!(
                        "branch {i} overlaps another branch"
                    )));
                }
            }
            let img = a.image()?;
            if img.area() - img.intersect(&self.region).area() > tol {
                return Err(Error::InvalidPartition(format!(
                    "branch {i} maps outside the region"
                )));
            }
        }
        Ok(())
    }

    pub fn region(&self) -> &ConvexPolygon {
        &self.region
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Family parameter `t`, when the map comes from [`make_tent2d`].
    pub fn parameter(&self) -> Option<f64> {
        self.parameter
    }

    /// Number of base-map steps per application.
    pub fn power(&self) -> usize {
        self.power
    }

    /// Index of the branch used at `p`: the lowest-index domain containing it.
    pub fn branch_index(&self, p: Point2) -> Result<usize> {
        if !self.region.contains(p, EPS_GEOM) {
            return Err(Error::OutsideRegion { x: p.x, y: p.y });
        }
        self.branches
            .iter()
            .position(|b| b.domain.contains(p, EPS_GEOM))
            .ok_or(Error::OutsideRegion { x: p.x, y: p.y })
    }

    pub fn apply(&self, p: Point2) -> Result<Point2> {
        let i = self.branch_index(p)?;
        Ok(self.branches[i].map.apply(p))
    }

    /// Distance from `p` to the nearest branch-domain edge that is not part of
    /// the region boundary (the critical set and its preimages).
    pub fn critical_distance(&self, p: Point2) -> f64 {
        let region_lines = self.region.half_planes();
        let mut best = f64::INFINITY;
        for b in &self.branches {
            for (a, c) in b.domain.edges() {
                let mid = (a + c) * 0.5;
                let on_boundary = region_lines
                    .iter()
                    .any(|h| h.signed_distance(mid).abs() < EPS_GEOM);
                if !on_boundary {
                    best = best.min(segment_distance(p, a, c));
                }
            }
        }
        best
    }

    /// Branch images `φ_i(R_i)`.
    pub fn branch_images(&self) -> Result<Vec<ConvexPolygon>> {
        self.branches.iter().map(Branch::image).collect()
    }

    /// The `n`-th iterate, built by pulling back branch domains along every
    /// itinerary of length `n` and keeping those with positive area.
    pub fn power_of(&self, n: usize) -> Result<PiecewiseMap> {
        if n == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "power",
                value: 0.0,
                range: "n >= 1",
            });
        }
        let mut cur = self.clone();
        for _ in 1..n {
            let next: Vec<Result<Vec<Branch>>> = par::map(&cur.branches, |b| {
                let mut out = Vec::new();
                for c in &self.branches {
                    let pulled = affine_preimage(&b.map, &c.domain)?;
                    let domain = b.domain.intersect(&pulled);
                    if domain.area() <= EPS_AREA {
                        continue;
                    }
                    let map = c.map.after(&b.map);
                    let mut itinerary = b.itinerary.clone();
                    itinerary.extend_from_slice(&c.itinerary);
                    out.push(Branch {
                        domain,
                        jacobian_abs: map.jacobian_abs(),
                        map,
                        itinerary,
                        stepwise_inverse_bound: b.stepwise_inverse_bound * c.stepwise_inverse_bound,
                    });
                }
                Ok(out)
            });
            let mut branches = Vec::new();
            for r in next {
                branches.extend(r?);
            }
            cur.branches = branches;
            cur.power += self.power;
        }
        cur.label = format!("{} power={}", self.label, n * self.power);
        Ok(cur)
    }
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let s = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    p.dist(a + d * s)
}

/// `T₀ = {0 <= x <= 1, 0 <= y <= x}`.
pub fn tent_left_domain() -> ConvexPolygon {
    ConvexPolygon::triangle(
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
    )
    .expect("static triangle")
}

/// `T₁ = {1 <= x <= 2, 0 <= y <= 2 - x}`.
pub fn tent_right_domain() -> ConvexPolygon {
    ConvexPolygon::triangle(
        Point2::new(1.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(1.0, 1.0),
    )
    .expect("static triangle")
}

/// The triangle `T = T₀ ∪ T₁` with vertices (0,0), (2,0), (1,1).
pub fn tent_region() -> ConvexPolygon {
    ConvexPolygon::triangle(
        Point2::new(0.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(1.0, 1.0),
    )
    .expect("static triangle")
}

/// The two-dimensional tent map
/// `Λ_t(x, y) = (t(x+y), t(x-y))` on `T₀` and `(t(2-x+y), t(2-x-y))` on `T₁`.
pub fn make_tent2d(t: f64) -> Result<PiecewiseMap> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "t",
            value: t,
            range: "(0, 1]",
        });
    }
    let left = AffineMap2::new(Matrix2::new(t, t, t, -t), Point2::ORIGIN)?;
    let right = AffineMap2::new(Matrix2::new(-t, t, -t, -t), Point2::new(2.0 * t, 2.0 * t))?;
    let mut m = PiecewiseMap::new(
        tent_region(),
        vec![(tent_left_domain(), left), (tent_right_domain(), right)],
        format!("tent2d t={t}"),
    )?;
    m.parameter = Some(t);
    Ok(m)
}

/// `m^n`; see [`PiecewiseMap::power_of`].
pub fn power(m: &PiecewiseMap, n: usize) -> Result<PiecewiseMap> {
    m.power_of(n)
}

/// Contraction constants of the inverse branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpansionBounds {
    /// Max over branches of the spectral norm of the inverse linear part.
    pub sigma_spectral: f64,
    /// Max over branches of the largest entry of the inverse linear part.
    pub sigma_max_entry: f64,
    /// Max over branches of the product of per-step max-entry bounds.
    pub sigma_stepwise: f64,
}

pub fn verify_expansion(m: &PiecewiseMap) -> Result<ExpansionBounds> {
    let mut out = ExpansionBounds {
        sigma_spectral: 0.0,
        sigma_max_entry: 0.0,
        sigma_stepwise: 0.0,
    };
    for b in m.branches() {
        let norms = matrix_norms(&b.map.linear.inverse()?);
        out.sigma_spectral = out.sigma_spectral.max(norms.spectral);
        out.sigma_max_entry = out.sigma_max_entry.max(norms.max_entry);
        out.sigma_stepwise = out.sigma_stepwise.max(b.stepwise_inverse_bound);
    }
    Ok(out)
}

/// Bounded-distortion constant. Every branch is affine, so `log|J|` is
/// constant on each domain and its derivative vanishes.
pub fn verify_distortion(_m: &PiecewiseMap) -> f64 {
    0.0
}

/// Long-branch geometry of one branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchGeometry {
    pub min_angle: f64,
    pub beta: f64,
    pub inradius: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LongBranches {
    pub beta: f64,
    pub rho: f64,
    pub per_branch: Vec<BranchGeometry>,
}

fn polygon_geometry(p: &ConvexPolygon) -> Result<BranchGeometry> {
    let min_angle = p.min_interior_angle()?;
    let inradius = p.inradius()?;
    Ok(BranchGeometry {
        min_angle,
        beta: (0.5 * min_angle).sin(),
        inradius,
        rho: 0.5 * inradius,
    })
}

/// Estimates `β` and `ρ` of the long-branch condition.
///
/// The inward field is the unit normal on edge interiors and the angle
/// bisector at corners, giving `β = sin(θ_min / 2)`; the band width is half
/// the inradius. Both domain and image of each branch are measured and the
/// smaller values kept.
pub fn estimate_long_branches(m: &PiecewiseMap) -> Result<LongBranches> {
    let mut per_branch = Vec::with_capacity(m.branches().len());
    for b in m.branches() {
        let dom = polygon_geometry(&b.domain)?;
        let img = polygon_geometry(&b.image()?)?;
        let pick = |x: BranchGeometry, y: BranchGeometry| BranchGeometry {
            min_angle: x.min_angle.min(y.min_angle),
            beta: x.beta.min(y.beta),
            inradius: x.inradius.min(y.inradius),
            rho: x.rho.min(y.rho),
        };
        per_branch.push(pick(dom, img));
    }
    Ok(LongBranches {
        beta: per_branch
            .iter()
            .map(|g| g.beta)
            .fold(f64::INFINITY, f64::min),
        rho: per_branch
            .iter()
            .map(|g| g.rho)
            .fold(f64::INFINITY, f64::min),
        per_branch,
    })
}

/// Which contraction constant feeds `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormConvention {
    Spectral,
    MaxEntry,
    /// Product of per-step max-entry bounds, `1/(2t)^n` for the tent family.
    PaperFormula,
}

impl NormConvention {
    pub const ALL: [NormConvention; 3] = [
        NormConvention::Spectral,
        NormConvention::MaxEntry,
        NormConvention::PaperFormula,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NormConvention::Spectral => "Spectral",
            NormConvention::MaxEntry => "MaxEntry",
            NormConvention::PaperFormula => "PaperFormula",
        }
    }
}

impl std::str::FromStr for NormConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(NormConvention::Spectral),
            "maxentry" | "max-entry" | "max_entry" => Ok(NormConvention::MaxEntry),
            "paper" | "paperformula" | "paper-formula" => Ok(NormConvention::PaperFormula),
            other => Err(format!("unknown norm convention {other:?}")),
        }
    }
}

/// Constants of the expanding-map theorem for one map and norm convention.
///
/// Serializes to the certificate JSON schema; the per-convention `λ` values
/// are kept in memory only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionCertificate {
    pub t: Option<f64>,
    pub power: usize,
    pub sigma_spectral: f64,
    pub sigma_max_entry: f64,
    pub sigma_paper: f64,
    #[serde(rename = "D")]
    pub distortion: f64,
    pub beta: f64,
    pub rho: f64,
    /// `λ` under `norm_convention`.
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// `K / (1 - λ)`, infinite when `λ >= 1` (serialized as `null`).
    #[serde(rename = "K1")]
    pub k1: f64,
    pub norm_convention: NormConvention,
    pub satisfied: bool,
    #[serde(skip)]
    pub lambda_spectral: f64,
    #[serde(skip)]
    pub lambda_max_entry: f64,
    #[serde(skip)]
    pub lambda_paper: f64,
}

impl ConditionCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// `λ = σ(1 + 1/β)`, `K = D + 1/(βρ) + D/β`, `K₁ = K/(1-λ)`.
pub fn certify(m: &PiecewiseMap, convention: NormConvention) -> Result<ConditionCertificate> {
    let sig = verify_expansion(m)?;
    let distortion = verify_distortion(m);
    let lb = estimate_long_branches(m)?;
    let beta = lb.beta;
    let rho = lb.rho;
    let lambda_of = |sigma: f64| sigma * (1.0 + 1.0 / beta);
    let lambda_spectral = lambda_of(sig.sigma_spectral);
    let lambda_max_entry = lambda_of(sig.sigma_max_entry);
    let lambda_paper = lambda_of(sig.sigma_stepwise);
    let lambda = match convention {
        NormConvention::Spectral => lambda_spectral,
        NormConvention::MaxEntry => lambda_max_entry,
        NormConvention::PaperFormula => lambda_paper,
    };
    let k = distortion + 1.0 / (beta * rho) + distortion / beta;
    let k1 = if lambda < 1.0 {
        k / (1.0 - lambda)
    } else {
        f64::INFINITY
    };
    let positive = |v: f64| v.is_finite() && v > 0.0;
    let sigma_used = match convention {
        NormConvention::Spectral => sig.sigma_spectral,
        NormConvention::MaxEntry => sig.sigma_max_entry,
        NormConvention::PaperFormula => sig.sigma_stepwise,
    };
    let satisfied = lambda < 1.0 && positive(sigma_used) && positive(beta) && positive(rho);
    Ok(ConditionCertificate {
        t: m.parameter(),
        power: m.power(),
        sigma_spectral: sig.sigma_spectral,
        sigma_max_entry: sig.sigma_max_entry,
        sigma_paper: sig.sigma_stepwise,
        distortion,
        beta,
        rho,
        lambda,
        k,
        k1,
        norm_convention: convention,
        satisfied,
        lambda_spectral,
        lambda_max_entry,
        lambda_paper,
    })
}
