//! Geodesics, segments and rays of H².
//!
//! Every path carries a *frame*: an isometry `F` taking the imaginary axis
//! onto the path so that `F(i·eᵗ)` is the point at parameter `t`. Projection
//! is then closed form: pull back by `F`, project `u` to `i|u|`, clamp the
//! parameter to the path's range, push forward.

use num_complex::Complex64;

use super::isometry::Isometry;
use super::point::{BoundaryPoint, ExtendedPoint, H2Point};
use super::dist;
use crate::error::{Error, Result};

/// Nearest-point projection onto a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub foot: H2Point,
    /// Arclength coordinate of the foot on the path.
    pub param: f64,
}

/// Common surface of full geodesics, segments and rays.
pub trait GeodesicPath {
    /// Isometry carrying `i·eᵗ` to the point at parameter `t`.
    fn frame(&self) -> &Isometry;

    /// Closed parameter interval; infinite ends for geodesics and rays.
    fn param_range(&self) -> (f64, f64);

    /// Point at parameter `t`; `|t|` must stay below ~700 (f64 range of `eᵗ`).
    fn point_at(&self, t: f64) -> H2Point {
        self.frame().apply(H2Point::new_unchecked(0.0, t.exp()))
    }

    /// Unclamped parameter of the projection onto the full supporting geodesic.
    fn raw_param(&self, x: H2Point) -> f64 {
        let u = self.frame().inverse().apply(x);
        u.re().hypot(u.im()).ln()
    }

    /// Parameter of the projection of an ideal point onto the supporting
    /// geodesic; `±∞` at the geodesic's own endpoints.
    fn raw_param_boundary(&self, xi: BoundaryPoint) -> f64 {
        match self.frame().inverse().apply_boundary(xi) {
            BoundaryPoint::Infinity => f64::INFINITY,
            BoundaryPoint::Finite(0.0) => f64::NEG_INFINITY,
            BoundaryPoint::Finite(u) => u.abs().ln(),
        }
    }

    fn project(&self, x: H2Point) -> Projection {
        let (lo, hi) = self.param_range();
        let param = self.raw_param(x).clamp(lo, hi);
        Projection {
            foot: self.point_at(param),
            param,
        }
    }

    fn distance_to(&self, x: H2Point) -> f64 {
        dist(x, self.project(x).foot)
    }

    /// Point at signed distance `h` from `point_at(t)` along the geodesic
    /// orthogonal to the path there; the sign picks the side.
    fn offset_point(&self, t: f64, h: f64) -> H2Point {
        let r = t.exp();
        self.frame()
            .apply(H2Point::new_unchecked(r * h.tanh(), r / h.cosh()))
    }
}

fn cayley(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (z - i) / (z + i)
}

/// Frame with `F(i) = origin` and the positive imaginary direction pointing
/// at `toward`. Degenerate targets (`toward == origin`) give an arbitrary direction.
fn frame_from(origin: H2Point, toward: ExtendedPoint) -> Isometry {
    let to_i = Isometry::from_entries(1.0, -origin.re(), 0.0, origin.im())
        .scaled_to_unit();
    let angle = match to_i.apply_extended(toward) {
        ExtendedPoint::Interior(y) => {
            let w = cayley(y.to_complex());
            if w.norm() == 0.0 {
                0.0
            } else {
                -w.arg()
            }
        }
        ExtendedPoint::Ideal(xi) => -xi.cayley_angle(),
    };
    let k = Isometry::rotation_about_i(angle);
    (k * to_i).inverse()
}

impl Isometry {
    fn scaled_to_unit(self) -> Isometry {
        let [a, b, c, d] = self.entries();
        let k = self.det().sqrt().recip();
        Isometry::from_entries(a * k, b * k, c * k, d * k)
    }
}

/// A bi-infinite geodesic, oriented from `start` to `end`.
///
/// Parameter 0 sits at the canonical origin: the apex of the semicircle, or
/// `x + i` on the vertical line `Re z = x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicH2 {
    start: BoundaryPoint,
    end: BoundaryPoint,
    frame: Isometry,
}

impl GeodesicH2 {
    pub fn new(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self> {
        use BoundaryPoint::{Finite, Infinity};
        let frame = match (start, end) {
            (Finite(a), Infinity) => Isometry::from_entries(1.0, a, 0.0, 1.0),
            (Infinity, Finite(b)) => Isometry::from_entries(b, -1.0, 1.0, 0.0),
            (Finite(a), Finite(b)) if a != b => {
                let lambda = (b - a).signum();
                let k = (b - a).abs().sqrt().recip();
                Isometry::from_entries(b * lambda * k, a * k, lambda * k, k)
            }
            _ => return Err(Error::CoincidentEndpoints),
        };
        Ok(Self { start, end, frame })
    }

    /// The imaginary axis from 0 to ∞.
    pub fn imaginary_axis() -> Self {
        Self::new(BoundaryPoint::Finite(0.0), BoundaryPoint::Infinity).unwrap()
    }

    pub fn start(&self) -> BoundaryPoint {
        self.start
    }

    pub fn end(&self) -> BoundaryPoint {
        self.end
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.end, self.start).expect("endpoints already distinct")
    }

    /// Image under an isometry, with the canonical origin recomputed.
    pub fn transformed(&self, g: &Isometry) -> Self {
        Self::new(g.apply_boundary(self.start), g.apply_boundary(self.end))
            .expect("isometries preserve distinctness")
    }
}

impl GeodesicPath for GeodesicH2 {
    fn frame(&self) -> &Isometry {
        &self.frame
    }

    fn param_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// A compact geodesic segment `[start, end]`, parametrized by arclength from `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentH2 {
    start: H2Point,
    end: H2Point,
    frame: Isometry,
    length: f64,
}

impl SegmentH2 {
    /// Degenerate segments (`start == end`) are allowed here; operations that
    /// cannot handle them report [`Error::DegenerateSegment`].
    pub fn new(start: H2Point, end: H2Point) -> Self {
        let frame = frame_from(start, ExtendedPoint::Interior(end));
        Self {
            start,
            end,
            frame,
            length: dist(start, end),
        }
    }

    pub fn start(&self) -> H2Point {
        self.start
    }

    pub fn end(&self) -> H2Point {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_degenerate(&self) -> bool {
        self.length == 0.0
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.end, self.start)
    }

    pub fn transformed(&self, g: &Isometry) -> Self {
        Self::new(g.apply(self.start), g.apply(self.end))
    }

    /// Full geodesic containing the segment, same orientation.
    pub fn supporting_geodesic(&self) -> Result<GeodesicH2> {
        if self.is_degenerate() {
            return Err(Error::DegenerateSegment);
        }
        GeodesicH2::new(
            self.frame.apply_boundary(BoundaryPoint::Finite(0.0)),
            self.frame.apply_boundary(BoundaryPoint::Infinity),
        )
    }

    /// Evenly spaced points with spacing at most `step`, endpoints included.
    pub fn sample(&self, step: f64) -> Vec<H2Point> {
        let n = ((self.length / step).ceil() as usize).max(1);
        (0..=n)
            .map(|k| self.point_at(self.length * k as f64 / n as f64))
            .collect()
    }
}

impl GeodesicPath for SegmentH2 {
    fn frame(&self) -> &Isometry {
        &self.frame
    }

    fn param_range(&self) -> (f64, f64) {
        (0.0, self.length)
    }
}

/// The geodesic ray `[start, end)` towards an ideal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    start: H2Point,
    end: BoundaryPoint,
    frame: Isometry,
}

impl Ray {
    pub fn new(start: H2Point, end: BoundaryPoint) -> Self {
        Self {
            start,
            end,
            frame: frame_from(start, ExtendedPoint::Ideal(end)),
        }
    }

    pub fn start(&self) -> H2Point {
        self.start
    }

    pub fn end(&self) -> BoundaryPoint {
        self.end
    }

    /// The full geodesic extending the ray, oriented towards `end`.
    pub fn supporting_geodesic(&self) -> GeodesicH2 {
        GeodesicH2::new(self.frame.apply_boundary(BoundaryPoint::Finite(0.0)), self.end)
            .expect("ray endpoints are distinct")
    }
}

impl GeodesicPath for Ray {
    fn frame(&self) -> &Isometry {
        &self.frame
    }

    fn param_range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Output of [`geodesic_between`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path {
    Geodesic(GeodesicH2),
    Segment(SegmentH2),
    Ray(Ray),
}

impl Path {
    pub fn as_dyn(&self) -> &dyn GeodesicPath {
        match self {
            Path::Geodesic(g) => g,
            Path::Segment(s) => s,
            Path::Ray(r) => r,
        }
    }
}

/// The unique geodesic object through two points of `H² ∪ ∂H²`.
///
/// A mixed pair yields the ray from the interior point towards the ideal one,
/// whichever order they come in.
pub fn geodesic_between(x: ExtendedPoint, y: ExtendedPoint) -> Result<Path> {
    use ExtendedPoint::{Ideal, Interior};
    match (x, y) {
        (Interior(p), Interior(q)) => {
            if p == q {
                Err(Error::CoincidentEndpoints)
            } else {
                Ok(Path::Segment(SegmentH2::new(p, q)))
            }
        }
        (Interior(p), Ideal(xi)) | (Ideal(xi), Interior(p)) => Ok(Path::Ray(Ray::new(p, xi))),
        (Ideal(a), Ideal(b)) => Ok(Path::Geodesic(GeodesicH2::new(a, b)?)),
    }
}
