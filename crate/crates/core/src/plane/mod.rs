//! Upper half-plane model of H²: distance, geodesics, projections, Busemann
//! cocycles and shadows.

mod geodesic;
mod isometry;
mod point;

pub use geodesic::{geodesic_between, GeodesicH2, GeodesicPath, Path, Projection, Ray, SegmentH2};
pub use isometry::{Isometry, IsometryKind, LoxodromicData};
pub use point::{BoundaryPoint, ExtendedPoint, H2Point};

use crate::error::Result;

/// Hyperbolic distance, `2 asinh(|x - y| / (2 √(im x · im y)))`.
pub fn dist(x: H2Point, y: H2Point) -> f64 {
    let e = (x.re() - y.re()).hypot(x.im() - y.im());
    2.0 * (e / (2.0 * (x.im() * y.im()).sqrt())).asinh()
}

/// Nearest point on `path` to `x` and its arclength coordinate.
pub fn project_to_geodesic<P: GeodesicPath + ?Sized>(path: &P, x: H2Point) -> Projection {
    path.project(x)
}

/// Busemann cocycle `β_ξ(x, y) = lim d(x, z) - d(y, z)` as `z → ξ`, closed form.
pub fn busemann(xi: BoundaryPoint, x: H2Point, y: H2Point) -> f64 {
    match xi {
        BoundaryPoint::Infinity => y.im().ln() - x.im().ln(),
        BoundaryPoint::Finite(a) => {
            let dx = (x.re() - a).hypot(x.im());
            let dy = (y.re() - a).hypot(y.im());
            y.im().ln() - x.im().ln() + 2.0 * (dx.ln() - dy.ln())
        }
    }
}

/// `d(x, z_t) - d(y, z_t)` with `z_t` the point at distance `t` from `x`
/// on the ray `[x, ξ)`. Converges to [`busemann`] as `t → ∞`.
pub fn busemann_along_ray(xi: BoundaryPoint, x: H2Point, y: H2Point, t: f64) -> f64 {
    let z = Ray::new(x, xi).point_at(t);
    dist(x, z) - dist(y, z)
}

pub fn classify_isometry(g: &Isometry) -> IsometryKind {
    g.classify()
}

pub fn translation_length_axis(g: &Isometry) -> Result<LoxodromicData> {
    g.loxodromic_data()
}

/// Distance from `y` to the geodesic object `[x, w]`. A degenerate `[x, x]`
/// is the single point `x`.
pub fn distance_to_path(x: H2Point, w: ExtendedPoint, y: H2Point) -> f64 {
    match w {
        ExtendedPoint::Interior(q) if q == x => dist(x, y),
        ExtendedPoint::Interior(q) => SegmentH2::new(x, q).distance_to(y),
        ExtendedPoint::Ideal(xi) => Ray::new(x, xi).distance_to(y),
    }
}

/// `w ∈ O_R(x, y)`, i.e. `d([x, w], y) < R`.
pub fn shadow_contains(x: H2Point, y: H2Point, radius: f64, w: ExtendedPoint) -> bool {
    distance_to_path(x, w, y) < radius
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(re: f64, im: f64) -> H2Point {
        H2Point::new(re, im).unwrap()
    }

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn dist_examples() {
        assert!((dist(H2Point::I, p(0.0, 2.0)) - LN2).abs() < 1e-15);
        assert_eq!(dist(H2Point::I, H2Point::I), 0.0);
        assert!((dist(H2Point::I, p(1.0, 1.0)) - 0.962_423_650_119_206_9).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let axis = GeodesicH2::imaginary_axis();
        let pr = project_to_geodesic(&axis, p(-1.0, 1.0));
        assert!(dist(pr.foot, p(0.0, 2f64.sqrt())) < 1e-14);
        assert!((pr.param - 2f64.sqrt().ln()).abs() < 1e-14);
        let pr = project_to_geodesic(&axis, p(0.0, 2.0));
        assert!(dist(pr.foot, p(0.0, 2.0)) < 1e-15);
        let circle =
            GeodesicH2::new(BoundaryPoint::Finite(-1.0), BoundaryPoint::Finite(1.0)).unwrap();
        let pr = project_to_geodesic(&circle, p(0.0, 3.0));
        assert!(dist(pr.foot, H2Point::I) < 1e-14);
        assert!(pr.param.abs() < 1e-14);
    }

    #[test]
    fn segment_projection_clamps() {
        let s = SegmentH2::new(H2Point::I, p(0.0, 4.0));
        let pr = s.project(p(0.0, 10.0));
        assert!(dist(pr.foot, p(0.0, 4.0)) < 1e-12);
        let pr = s.project(p(0.0, 0.1));
        assert!(dist(pr.foot, H2Point::I) < 1e-12);
        assert_eq!(pr.param, 0.0);
    }

    #[test]
    fn busemann_examples() {
        let two_i = p(0.0, 2.0);
        assert!((busemann(BoundaryPoint::Infinity, H2Point::I, two_i) - LN2).abs() < 1e-15);
        assert_eq!(busemann(BoundaryPoint::Finite(0.7), two_i, two_i), 0.0);
        assert!((busemann(BoundaryPoint::Finite(0.0), H2Point::I, two_i) + LN2).abs() < 1e-15);
        let lim = busemann_along_ray(BoundaryPoint::Finite(0.0), H2Point::I, two_i, 40.0);
        assert!((lim + LN2).abs() < 1e-8);
    }

    #[test]
    fn shadow_examples() {
        let two_i = p(0.0, 2.0);
        assert!(shadow_contains(H2Point::I, two_i, 0.1, BoundaryPoint::Infinity.into()));
        assert!(!shadow_contains(H2Point::I, two_i, 0.1, BoundaryPoint::Finite(0.0).into()));
        assert!(shadow_contains(H2Point::I, two_i, 0.1, p(0.0, 3.0).into()));
        assert!(!shadow_contains(H2Point::I, two_i, 0.1, H2Point::I.into()));
    }

    #[test]
    fn translation_length_axis_shifts_by_tau() {
        let h = Isometry::normalized(1.0, 2.0, -1.0, 3.0).unwrap();
        let g = Isometry::axial_translation(0.8).conjugate_by(&h);
        let data = translation_length_axis(&g).unwrap();
        assert!((data.translation_length - 0.8).abs() < 1e-12);
        for t in [-1.0, 0.0, 2.0] {
            let moved = g.apply(data.axis.point_at(t));
            assert!(dist(moved, data.axis.point_at(t + 0.8)) < 1e-10);
        }
        let e = translation_length_axis(&Isometry::rotation_about_i(1.0));
        assert!(matches!(e, Err(crate::Error::NotLoxodromic { .. })));
    }
}
