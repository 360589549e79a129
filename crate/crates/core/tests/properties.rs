use proptest::prelude::*;

use horo_core::groups::{enumerate_ball, GroupSpec};
use horo_core::measures::LinearForm;
use horo_core::plane::{
    busemann, dist, shadow_contains, BoundaryPoint, ExtendedPoint, GeodesicPath, H2Point, Isometry, SegmentH2,
};
use horo_core::product::{kappa, ProductPoint};

fn point() -> impl Strategy<Value = H2Point> {
    (-5.0..5.0f64, -3.0..3.0f64).prop_map(|(re, l)| H2Point::new(re, l.exp()).unwrap())
}

fn boundary() -> impl Strategy<Value = BoundaryPoint> {
    prop_oneof![
        1 => Just(BoundaryPoint::Infinity),
        9 => (-5.0..5.0f64).prop_map(BoundaryPoint::Finite),
    ]
}

/// `[[a, b], [c, d]]` with `ad - bc = 1`, `a` bounded away from 0.
fn isometry() -> impl Strategy<Value = Isometry> {
    (0.3..3.0f64, prop::bool::ANY, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, neg, b, c)| {
        let a = if neg { -a } else { a };
        Isometry::new(a, b, c, (1.0 + b * c) / a).unwrap()
    })
}

proptest! {
    #[test]
    fn distance_is_a_metric(x in point(), y in point(), z in point()) {
        prop_assert!((dist(x, y) - dist(y, x)).abs() < 1e-12);
        prop_assert!(dist(x, x) < 1e-12);
        prop_assert!(dist(x, z) <= dist(x, y) + dist(y, z) + 1e-9);
    }

    #[test]
    fn busemann_is_a_cocycle(xi in boundary(), x in point(), y in point(), z in point()) {
        let sum = busemann(xi, x, y) + busemann(xi, y, z);
        prop_assert!((busemann(xi, x, z) - sum).abs() < 1e-9);
        prop_assert!(busemann(xi, x, y).abs() <= dist(x, y) + 1e-9);
    }

    #[test]
    fn isometries_preserve_distance_and_busemann(g in isometry(), xi in boundary(), x in point(), y in point()) {
        let (gx, gy) = (g.apply(x), g.apply(y));
        prop_assert!((dist(gx, gy) - dist(x, y)).abs() < 1e-8 * (1.0 + dist(x, y)));
        let b = busemann(g.apply_boundary(xi), gx, gy);
        prop_assert!((b - busemann(xi, x, y)).abs() < 1e-7);
    }

    #[test]
    fn projection_is_one_lipschitz(a in point(), b in point(), x in point(), y in point()) {
        let seg = SegmentH2::new(a, b);
        prop_assume!(seg.length() > 1e-3);
        let (px, py) = (seg.project(x).foot, seg.project(y).foot);
        prop_assert!(dist(px, py) <= dist(x, y) + 1e-7);
        prop_assert!(dist(x, px) <= dist(x, a) + 1e-9 && dist(x, px) <= dist(x, b) + 1e-9);
    }

    #[test]
    fn shadows_grow_with_radius(x in point(), y in point(), xi in boundary(), r in 0.1..4.0f64) {
        let w = ExtendedPoint::Ideal(xi);
        if shadow_contains(x, y, r, w) {
            prop_assert!(shadow_contains(x, y, r + 0.5, w));
        }
    }

    #[test]
    fn cartan_vectors_are_subadditive(i in 0usize..161, j in 0usize..161) {
        let spec = GroupSpec::bundled_diagonal_schottky();
        let ball = enumerate_ball(&spec, 4).unwrap();
        let (g, h) = (&ball.upto(4)[i], &ball.upto(4)[j]);
        let gh = g.compose(&spec, h);
        for k in 0..2 {
            prop_assert!(gh.cartan.0[k] <= g.cartan.0[k] + h.cartan.0[k] + 1e-9);
        }
    }

    #[test]
    fn kappa_is_symmetric(a in point(), b in point(), c in point(), d in point()) {
        let z = ProductPoint::new(vec![a, b]).unwrap();
        let w = ProductPoint::new(vec![c, d]).unwrap();
        let (k1, k2) = (kappa(&z, &w).unwrap(), kappa(&w, &z).unwrap());
        prop_assert!(k1.sup_distance(&k2) < 1e-12);
    }

    #[test]
    fn linear_forms_parse_their_display(cs in prop::collection::vec(-10.0..10.0f64, 1..5)) {
        let text = cs.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",");
        let form = LinearForm::parse(&text).unwrap();
        prop_assert_eq!(form.coefficients().0.clone(), cs);
    }
}

#[test]
fn malformed_linear_forms_are_rejected() {
    for bad in ["", "a", "1,,2", "1;2", "nan"] {
        assert!(LinearForm::parse(bad).is_err(), "{bad:?}");
    }
}
