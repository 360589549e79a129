use std::fmt;
use std::ops::Mul;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::geodesic::GeodesicH2;
use super::point::{BoundaryPoint, ExtendedPoint, H2Point};
use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// An orientation-preserving isometry of H², stored as a matrix of
/// determinant 1. `M` and `-M` act identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// Translation length, oriented axis and fixed points of a loxodromic isometry.
#[derive(Debug, Clone, Copy)]
pub struct LoxodromicData {
    pub translation_length: f64,
    /// Oriented from the repelling to the attracting fixed point.
    pub axis: GeodesicH2,
    pub attracting: BoundaryPoint,
    pub repelling: BoundaryPoint,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Checks `ad - bc = 1` to [`TOL`]`.determinant`, relative to the size of the products.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = (a * d).abs().max((b * c).abs()).max(1.0);
        if ![a, b, c, d].iter().all(|x| x.is_finite()) || (det - 1.0).abs() > TOL.determinant * scale {
            return Err(Error::InvalidDeterminant {
                det,
                entries: [a, b, c, d],
            });
        }
        Ok(Self { a, b, c, d })
    }

    /// Rescales a matrix of positive determinant to determinant 1.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidDeterminant {
                det,
                entries: [a, b, c, d],
            });
        }
        let k = det.sqrt().recip();
        Ok(Self::from_entries(a * k, b * k, c * k, d * k))
    }

    pub(crate) fn from_entries(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// `z ↦ λ² z`, translating the imaginary axis by `2 ln|λ|`.
    pub fn diagonal(lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("diagonal entry {lambda}")));
        }
        Ok(Self::from_entries(lambda, 0.0, 0.0, lambda.recip()))
    }

    /// Translation by `t` along the imaginary axis towards `∞`.
    pub fn axial_translation(t: f64) -> Self {
        let h = 0.5 * t;
        Self::from_entries(h.exp(), 0.0, 0.0, (-h).exp())
    }

    /// Rotation about `i` by `angle` (counter-clockwise tangent rotation).
    pub fn rotation_about_i(angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self::from_entries(c, s, -s, c)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self::from_entries(self.d, -self.b, -self.c, self.a)
    }

    pub fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inverse() } else { *self };
        let mut n = k.unsigned_abs();
        let mut acc = Self::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Conjugate `h self h⁻¹`.
    pub fn conjugate_by(&self, h: &Isometry) -> Self {
        *h * *self * h.inverse()
    }

    pub fn apply(&self, z: H2Point) -> H2Point {
        let (x, y) = (z.re(), z.im());
        let p = self.c * x + self.d;
        let q = self.c * y;
        let n = p * p + q * q;
        let re = ((self.a * x + self.b) * p + self.a * self.c * y * y) / n;
        H2Point::new_unchecked(re, y / n)
    }

    pub fn apply_boundary(&self, x: BoundaryPoint) -> BoundaryPoint {
        match x {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                let v = (self.a * x + self.b) / den;
                if den == 0.0 || !v.is_finite() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(v)
                }
            }
        }
    }

    pub fn apply_extended(&self, p: ExtendedPoint) -> ExtendedPoint {
        match p {
            ExtendedPoint::Interior(z) => ExtendedPoint::Interior(self.apply(z)),
            ExtendedPoint::Ideal(x) => ExtendedPoint::Ideal(self.apply_boundary(x)),
        }
    }

    /// Representative with the first entry of non-negligible size positive.
    pub fn canonical_sign(&self) -> Self {
        let e = self.entries();
        let scale = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = e.iter().copied().find(|x| x.abs() > 0.5 * scale).unwrap_or(1.0);
        if lead < 0.0 {
            Self::from_entries(-self.a, -self.b, -self.c, -self.d)
        } else {
            *self
        }
    }

    /// Max-entry distance between the PSL classes, `min(|M - N|, |M + N|)`.
    pub fn psl_distance(&self, other: &Isometry) -> f64 {
        let (x, y) = (self.entries(), other.entries());
        let minus = (0..4).fold(0.0f64, |m, k| m.max((x[k] - y[k]).abs()));
        let plus = (0..4).fold(0.0f64, |m, k| m.max((x[k] + y[k]).abs()));
        minus.min(plus)
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.psl_distance(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::IDENTITY, tol)
    }

    pub fn classify(&self) -> IsometryKind {
        let t = self.trace().abs();
        if t > 2.0 + TOL.parabolic_trace {
            IsometryKind::Loxodromic
        } else if t < 2.0 - TOL.parabolic_trace {
            IsometryKind::Elliptic
        } else if self.is_identity(TOL.sign_equality) {
            IsometryKind::Identity
        } else {
            IsometryKind::Parabolic
        }
    }

    /// `2 arccosh(|tr|/2)` for loxodromics.
    pub fn translation_length(&self) -> Result<f64> {
        let t = self.trace().abs();
        if self.classify() != IsometryKind::Loxodromic {
            return Err(Error::NotLoxodromic { trace_abs: t });
        }
        Ok(2.0 * (0.5 * t).acosh())
    }

    pub fn loxodromic_data(&self) -> Result<LoxodromicData> {
        let tau = self.translation_length()?;
        let (attracting, repelling) = self.fixed_points_loxodromic();
        let axis = GeodesicH2::new(repelling, attracting)?;
        Ok(LoxodromicData {
            translation_length: tau,
            axis,
            attracting,
            repelling,
        })
    }

    /// (attracting, repelling); assumes a loxodromic matrix.
    fn fixed_points_loxodromic(&self) -> (BoundaryPoint, BoundaryPoint) {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let tr = a + d;
        let disc = (tr * tr - 4.0).max(0.0).sqrt();
        if c == 0.0 {
            // z ↦ (a z + b)/d, finite fixed point b/(d - a)
            let finite = BoundaryPoint::Finite(b / (d - a));
            return if a.abs() > d.abs() {
                (BoundaryPoint::Infinity, finite)
            } else {
                (finite, BoundaryPoint::Infinity)
            };
        }
        // c z² + (d - a) z - b = 0
        let bq = d - a;
        let q = -0.5 * (bq + bq.signum_or_one() * disc);
        let roots = [q / c, -b / q];
        // derivative 1/(c z + d)²; attracting where |c z + d| > 1
        let k0 = (c * roots[0] + d).abs();
        let k1 = (c * roots[1] + d).abs();
        let (att, rep) = if k0 > k1 { (roots[0], roots[1]) } else { (roots[1], roots[0]) };
        (BoundaryPoint::Finite(att), BoundaryPoint::Finite(rep))
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, o: Isometry) -> Isometry {
        Isometry::from_entries(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [[self.a, self.b], [self.c, self.d]].serialize(s)
    }
}

/// Accepts any positive determinant within `TOL.determinant` of 1 and
/// rescales to exactly unit determinant.
impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [[a, b], [c, dd]] = <[[f64; 2]; 2]>::deserialize(d)?;
        Isometry::new(a, b, c, dd)
            .and_then(|_| Isometry::normalized(a, b, c, dd))
            .map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::dist;

    #[test]
    fn classify_examples() {
        let u = Isometry::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(u.classify(), IsometryKind::Parabolic);
        let g = Isometry::axial_translation(1.0);
        assert_eq!(g.classify(), IsometryKind::Loxodromic);
        let r = Isometry::rotation_about_i(std::f64::consts::PI / 3.0);
        assert_eq!(r.classify(), IsometryKind::Elliptic);
        assert!((r.trace().abs() - 2.0 * (std::f64::consts::PI / 6.0).cos()).abs() < 1e-15);
        assert_eq!(Isometry::IDENTITY.classify(), IsometryKind::Identity);
        assert_eq!((g * g.inverse()).classify(), IsometryKind::Identity);
    }

    #[test]
    fn rotation_fixes_i() {
        let r = Isometry::rotation_about_i(1.2);
        let p = r.apply(H2Point::I);
        assert!(dist(p, H2Point::I) < 1e-12);
    }

    #[test]
    fn diagonal_axis_data() {
        let g = Isometry::diagonal(0.5f64.exp()).unwrap();
        let data = g.loxodromic_data().unwrap();
        assert!((data.translation_length - 1.0).abs() < 1e-12);
        assert_eq!(data.attracting, BoundaryPoint::Infinity);
        assert_eq!(data.repelling, BoundaryPoint::Finite(0.0));
        let g2 = g * g;
        assert!((g2.translation_length().unwrap() - 2.0).abs() < 1e-12);
        let inv = g.inverse().loxodromic_data().unwrap();
        assert_eq!(inv.attracting, BoundaryPoint::Finite(0.0));
    }

    #[test]
    fn conjugate_keeps_translation_length() {
        let g = Isometry::axial_translation(1.3);
        let h = Isometry::normalized(2.0, 1.0, 3.0, 4.0).unwrap();
        let k = g.conjugate_by(&h);
        assert!((k.translation_length().unwrap() - 1.3).abs() < 1e-12);
        let data = k.loxodromic_data().unwrap();
        // fixed points are h·∞ and h·0
        assert!(data.attracting.approx_eq(&h.apply_boundary(BoundaryPoint::Infinity), 1e-12));
        assert!(data.repelling.approx_eq(&h.apply_boundary(BoundaryPoint::Finite(0.0)), 1e-12));
    }

    #[test]
    fn sign_identification() {
        let g = Isometry::normalized(2.0, 1.0, 3.0, 4.0).unwrap();
        let [a, b, c, d] = g.entries();
        let m = Isometry::from_entries(-a, -b, -c, -d);
        assert!(g.approx_eq(&m, 1e-12));
        assert_eq!(g.canonical_sign(), m.canonical_sign());
        assert!(!g.approx_eq(&Isometry::IDENTITY, 1e-9));
    }

    #[test]
    fn power_matches_repeated_product() {
        let g = Isometry::normalized(2.0, 1.0, 3.0, 4.0).unwrap();
        let mut acc = Isometry::IDENTITY;
        for _ in 0..5 {
            acc = acc * g;
        }
        assert!(acc.approx_eq(&g.pow(5), 1e-9));
        assert!(g.pow(-3).approx_eq(&g.inverse().pow(3), 1e-9));
        assert!(g.pow(0).is_identity(0.0));
    }

    #[test]
    fn determinant_check() {
        assert!(Isometry::new(2.0, 0.0, 0.0, 2.0).is_err());
        assert!(Isometry::new(3.0, 0.0, 0.0, 1.0 / 3.0).is_ok());
        assert!(Isometry::normalized(1.0, 0.0, 0.0, -1.0).is_err());
    }
}
