//! Independent oracles for the half-plane kernel: quadrature, direct
//! minimization and the Poisson-kernel form of the Busemann function.

use horo_core::alignment::{
    axis_constant, boundary_projection, extension_select, is_aligned, is_aligned_triple,
    right_angle_ideal_triangle_altitude,
};
use horo_core::plane::{
    busemann, dist, BoundaryPoint, ExtendedPoint, GeodesicH2, GeodesicPath, H2Point, Isometry, Ray, SegmentH2,
};
use horo_core::product::{kappa, ProductIsometry, ProductPoint, ProductTarget};
use horo_core::sampling::{random_boundary_point, random_point, trial_rng};

fn p(re: f64, im: f64) -> H2Point {
    H2Point::new(re, im).unwrap()
}

/// Adaptive Simpson quadrature.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() < 15.0 * tol {
            l + r + (l + r - whole) / 15.0
        } else {
            rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
        }
    }
    rec(f, a, b, simpson(f, a, b), tol, 40)
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > tol {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn distance_matches_arclength_quadrature() {
    // [i, 1+i] lies on |z - 1/2| = √5/2; ds = |dz|/Im z = dθ / sin θ
    let (c, r) = (0.5, 1.25f64.sqrt());
    let angle = |z: H2Point| (z.im()).atan2(z.re() - c);
    let (t0, t1) = (angle(p(1.0, 1.0)), angle(p(0.0, 1.0)));
    assert!((r * t0.cos() + c - 1.0).abs() < 1e-12);
    let length = integrate(&|t: f64| 1.0 / t.sin(), t0, t1, 1e-12);
    let d = dist(p(0.0, 1.0), p(1.0, 1.0));
    assert!((d - length).abs() < 1e-9, "{d} vs {length}");
    assert!((d - 0.962424).abs() < 1e-6);
}

#[test]
fn semicircle_geodesic_points_are_on_the_minimizing_path() {
    let g = GeodesicH2::new(BoundaryPoint::Finite(-1.0), BoundaryPoint::Finite(1.0)).unwrap();
    let (a, b) = (g.point_at(-2.0), g.point_at(1.5));
    for k in 0..20 {
        let z = g.point_at(-2.0 + 3.5 * k as f64 / 19.0);
        assert!((z.re().hypot(z.im()) - 1.0).abs() < 1e-12);
        assert!((dist(a, z) + dist(z, b) - dist(a, b)).abs() < 1e-9);
    }
}

#[test]
fn axis_projection_matches_direct_minimization() {
    let x = p(-1.0, 1.0);
    let axis = GeodesicH2::imaginary_axis();
    let t = golden_min(|t| dist(x, axis.point_at(t)), -5.0, 5.0, 1e-11);
    let pr = axis.project(x);
    assert!((pr.param - t).abs() < 1e-6);
    assert!((pr.param - 2f64.sqrt().ln()).abs() < 1e-12);
    assert!((pr.foot.im() - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn random_projections_match_direct_minimization() {
    for t in 0..50 {
        let mut rng = trial_rng(11, t);
        let seg = SegmentH2::new(random_point(&mut rng), random_point(&mut rng));
        if seg.length() < 1e-3 {
            continue;
        }
        let x = random_point(&mut rng);
        let s = golden_min(|s| dist(x, seg.point_at(s)), 0.0, seg.length(), 1e-11);
        let pr = seg.project(x);
        assert!((dist(x, pr.foot) - dist(x, seg.point_at(s))).abs() < 1e-9);
    }
}

#[test]
fn busemann_limit_along_the_geodesic_to_zero() {
    let (x, y) = (p(0.0, 1.0), p(0.0, 2.0));
    let z = p(0.0, (-40f64).exp());
    let limit = dist(x, z) - dist(y, z);
    assert!((busemann(BoundaryPoint::Finite(0.0), x, y) - limit).abs() < 1e-8);
    assert!((limit + 2f64.ln()).abs() < 1e-8);
}

/// `β_ξ(x, y) = ln(P(y, ξ)/P(x, ξ))` with the Poisson kernel `P(z, ξ) = Im z / |z - ξ|²`.
fn poisson_busemann(xi: BoundaryPoint, x: H2Point, y: H2Point) -> f64 {
    match xi {
        BoundaryPoint::Infinity => (y.im() / x.im()).ln(),
        BoundaryPoint::Finite(a) => {
            let kernel = |z: H2Point| z.im() / ((z.re() - a).powi(2) + z.im().powi(2));
            (kernel(y) / kernel(x)).ln()
        }
    }
}

#[test]
fn busemann_matches_poisson_kernel() {
    for t in 0..500 {
        let mut rng = trial_rng(5, t);
        let xi = random_boundary_point(&mut rng);
        let (x, y) = (random_point(&mut rng), random_point(&mut rng));
        let b = busemann(xi, x, y);
        assert!((b - poisson_busemann(xi, x, y)).abs() < 1e-9, "{xi:?} {x:?} {y:?}");
        assert!(b.abs() <= dist(x, y) + 1e-12);
    }
}

#[test]
fn product_distance_is_componentwise() {
    let z = ProductPoint::new(vec![p(0.0, 1.0), p(0.0, 1.0)]).unwrap();
    let w = ProductPoint::new(vec![p(0.0, 2.0), p(1.0, 1.0)]).unwrap();
    let k = kappa(&z, &w).unwrap();
    assert!((k.0[0] - 2f64.ln()).abs() < 1e-12);
    assert!((k.0[1] - 0.962424).abs() < 1e-6);
}

#[test]
fn alignment_defect_from_direct_projection() {
    let seg = SegmentH2::new(p(0.0, 1.0), p(0.0, 4f64.exp()));
    let w = p(-1.0, 1.0);
    let s = golden_min(|s| dist(w, seg.point_at(s)), 0.0, 4.0, 1e-11);
    let rep = is_aligned(ExtendedPoint::Interior(w), &seg, 1.0).unwrap();
    assert!(rep.aligned);
    assert!((rep.left_defect - s).abs() < 1e-6);
    assert!((rep.left_defect - 2f64.sqrt().ln()).abs() < 1e-12);
}

#[test]
fn far_point_splits_the_dichotomy() {
    let seg = SegmentH2::new(p(0.0, 1.0), p(0.0, 4f64.exp()));
    let far = ExtendedPoint::Interior(p(0.0, 100f64.exp()));
    assert!(!is_aligned(far, &seg, 1.0).unwrap().aligned);
    for d in [0.0, 1.0, 2.5, 4.0] {
        let a = is_aligned(far, &seg, 4.0 - d).unwrap().aligned;
        let b = is_aligned(far, &seg.reversed(), d).unwrap().aligned;
        assert!(!(a && b));
    }
}

#[test]
fn boundary_projection_matches_dense_ray_sampling() {
    let seg = SegmentH2::new(
        GeodesicH2::new(BoundaryPoint::Finite(-1.0), BoundaryPoint::Finite(1.0)).unwrap().point_at(-1.0),
        GeodesicH2::new(BoundaryPoint::Finite(-1.0), BoundaryPoint::Finite(1.0)).unwrap().point_at(1.0),
    );
    let xi = BoundaryPoint::Finite(3.0);
    let ray = Ray::new(seg.start(), xi);
    let sampled = seg.project(ray.point_at(30.0)).foot;
    let foot = boundary_projection(&seg, xi).unwrap();
    assert!(dist(foot, sampled) < 1e-9);
    // the geodesic ending at 3 orthogonal to |z| = 1 is |z - 5/3| = 4/3, meeting it at 0.6 + 0.8i
    assert!(dist(foot, p(0.6, 0.8)) < 1e-9);
}

#[test]
fn ideal_triangle_altitude_matches_perpendicular_formula() {
    // distance from x + iy to the line Re z = a is asinh(|x - a| / y)
    let direct = (1.0f64 / 1.0).asinh();
    assert!((right_angle_ideal_triangle_altitude() - direct).abs() < 1e-12);
    // the vertex sees its two ideal vertices at a right angle: rays to ∞ and 1 from i
    let up = Ray::new(p(0.0, 1.0), BoundaryPoint::Infinity).point_at(1e-4);
    let side = Ray::new(p(0.0, 1.0), BoundaryPoint::Finite(1.0)).point_at(1e-4);
    let right = (dist(up, side).powi(2) - 2.0 * 1e-8).abs();
    assert!(right < 1e-12);
}

#[test]
fn axis_constant_at_unit_distance() {
    for t in 0..20 {
        let mut rng = trial_rng(3, t);
        let tau = rand::Rng::random_range(&mut rng, 0.5..3.0);
        let g = Isometry::axial_translation(tau);
        let side = if t % 2 == 0 { 1.0 } else { -1.0 };
        let x0 = GeodesicH2::imaginary_axis().offset_point(rand::Rng::random_range(&mut rng, -2.0..2.0), side);
        let ac = axis_constant(&g, x0, 5).unwrap();
        // every orbit point sits at distance exactly 1 from the matching axis point
        let direct = (-5..=5)
            .map(|k| dist(g.pow(k).apply(x0), ac.axis.point_at(tau * k as f64 + ac.base_param)))
            .fold(0.0f64, f64::max);
        assert!((direct - 1.0).abs() < 1e-9);
        assert!(ac.c <= 1.0 + 0.1 + 1e-9, "{}", ac.c);
    }
}

#[test]
fn extension_selects_first_aligned_candidate() {
    let spec = horo_core::groups::GroupSpec::bundled_diagonal_schottky();
    let phi = spec.generator("a").unwrap().clone();
    let h = spec.generator("b").unwrap().clone();
    let cands = vec![ProductIsometry::identity(2), h.clone(), &h * &h];
    let z0 = spec.basepoint().clone();
    let (rep, att) = (
        horo_core::groups::fixed_tuples(&phi).unwrap().1,
        horo_core::groups::fixed_tuples(&phi).unwrap().0,
    );
    let x = ProductTarget::Boundary(rep);
    let y = ProductTarget::Boundary(att);
    for n in 1..=20 {
        let idx = extension_select(&phi, &cands, &x, &y, &z0, n, 1.0).unwrap();
        // exhaustive re-evaluation in the first factor
        let first = cands.iter().position(|a| {
            let (a, f) = (a.0[0], phi.0[0].pow(n as i64));
            let seg = SegmentH2::new(a.apply(z0.0[0]), (a * f).apply(z0.0[0]));
            let target = (a * f * a).apply_extended(y.component(0));
            is_aligned_triple(x.component(0), &seg, target, 1.0).unwrap()
        });
        assert_eq!(Some(idx), first, "n = {n}");
    }
}
