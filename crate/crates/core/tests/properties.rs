use pfo2d::density::{
    l1_distance, linear_combination, lp_norm, push_forward, sobolev_ratio, variation,
    PiecewisePolyDensity, SOBOLEV_CONSTANT,
};
use pfo2d::geom::{
    affine_image, matrix_norms, AffineMap2, ConvexPolygon, HalfPlane, Matrix2, Point2,
};
use pfo2d::maps::{make_tent2d, power, tau, tent_region};
use proptest::prelude::*;

fn point_in_triangle() -> impl Strategy<Value = Point2> {
    (0.0..2.0f64, 0.0..1.0f64).prop_map(|(x, y)| {
        // fold the bounding box onto T
        let y = y * (1.0 - (x - 1.0).abs());
        Point2::new(x, y)
    })
}

fn convex_polygon() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec(point_in_triangle(), 3..9).prop_filter_map("degenerate hull", |pts| {
        ConvexPolygon::convex_hull(&pts)
            .ok()
            .filter(|p| p.area() > 1e-4)
    })
}

fn matrix() -> impl Strategy<Value = Matrix2> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(a, b, c, d)| Matrix2::new(a, b, c, d))
}

/// Cells of the side-`1/n` grid clipped to T, with values cycling through
/// `vals`.
fn grid_cells(n: usize, vals: &[f64]) -> Vec<(ConvexPolygon, f64)> {
    let region = tent_region();
    let h = 1.0 / n as f64;
    let mut cells = Vec::new();
    let mut k = 0;
    for i in 0..2 * n {
        for j in 0..n {
            let sq = ConvexPolygon::rectangle(
                i as f64 * h,
                j as f64 * h,
                (i + 1) as f64 * h,
                (j + 1) as f64 * h,
            )
            .unwrap();
            let c = sq.intersect(&region);
            if !c.is_empty() {
                cells.push((c, vals[k % vals.len()]));
                k += 1;
            }
        }
    }
    cells
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clipping_splits_area(p in convex_polygon(), nx in -1.0..1.0f64, ny in -1.0..1.0f64, off in -1.0..2.0f64) {
        prop_assume!(nx.hypot(ny) > 1e-3);
        let h = HalfPlane::new(Point2::new(nx, ny), off).unwrap();
        let inside = p.clip(&h).area();
        let outside = p.clip(&h.flipped()).area();
        prop_assert!((inside + outside - p.area()).abs() < 1e-12);
    }

    #[test]
    fn intersection_is_monotone(p in convex_polygon(), q in convex_polygon()) {
        let i = p.intersect(&q);
        prop_assert!(i.area() <= p.area().min(q.area()) + 1e-12);
        let pieces: f64 = p.subtract(&q).iter().map(|c| c.area()).sum();
        prop_assert!((pieces + i.area() - p.area()).abs() < 1e-11);
    }

    #[test]
    fn affine_images_scale_area(p in convex_polygon(), m in matrix(), sx in -2.0..2.0f64, sy in -2.0..2.0f64) {
        prop_assume!(m.det().abs() > 1e-2);
        let f = AffineMap2::new(m, Point2::new(sx, sy)).unwrap();
        let img = affine_image(&f, &p).unwrap();
        prop_assert!((img.area() - m.det().abs() * p.area()).abs() < 1e-10 * (1.0 + img.area()));
        let back = affine_image(&f.inverse().unwrap(), &img).unwrap();
        prop_assert!((back.area() - p.area()).abs() < 1e-10);
    }

    #[test]
    fn norm_inequalities(m in matrix()) {
        let n = matrix_norms(&m);
        prop_assert!(n.max_entry <= n.spectral + 1e-12);
        prop_assert!(n.spectral <= 2.0 * n.max_entry + 1e-12);
        prop_assert!(n.det.abs() <= n.spectral * n.spectral + 1e-12);
        for v in [Point2::new(1.0, 0.0), Point2::new(0.6, 0.8), Point2::new(-0.28, 0.96)] {
            prop_assert!(m.apply(v).norm() <= n.spectral * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn indicator_variation_is_perimeter(q in convex_polygon()) {
        let f = PiecewisePolyDensity::indicator(tent_region(), &q, 1.0).unwrap();
        prop_assert!((variation(&f) - q.perimeter()).abs() < 1e-8);
        prop_assert!(sobolev_ratio(&f).unwrap() <= SOBOLEV_CONSTANT + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transfer_operator_laws(
        n in 1usize..5,
        vals in prop::collection::vec(0.0..3.0f64, 1..12),
        signs in prop::collection::vec(-2.0..2.0f64, 1..12),
        t in prop::sample::select(vec![tau(), 0.95, 1.0]),
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
    ) {
        prop_assume!(vals.iter().any(|&v| v > 0.1));
        let m = make_tent2d(t).unwrap();
        let f = PiecewisePolyDensity::new(tent_region(), grid_cells(n, &vals)).unwrap();
        let pf = push_forward(&m, &f).unwrap();
        prop_assert!((lp_norm(&pf, 1.0) - lp_norm(&f, 1.0)).abs() < 1e-9);
        prop_assert!(pf.cells().iter().all(|c| c.value >= 0.0));

        let twice = push_forward(&m, &pf).unwrap();
        let squared = push_forward(&power(&m, 2).unwrap(), &f).unwrap();
        prop_assert!(l1_distance(&twice, &squared).unwrap() < 1e-7);

        let g = PiecewisePolyDensity::new_signed(tent_region(), grid_cells(n + 1, &signs)).unwrap();
        let lhs = push_forward(&m, &linear_combination(a, &f, b, &g).unwrap()).unwrap();
        let rhs = linear_combination(a, &pf, b, &push_forward(&m, &g).unwrap()).unwrap();
        prop_assert!(l1_distance(&lhs, &rhs).unwrap() < 1e-9);
    }
}
