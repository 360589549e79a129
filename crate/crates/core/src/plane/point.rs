use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of the upper half-plane, `im > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2Point {
    re: f64,
    im: f64,
}

impl H2Point {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() && im > 0.0 {
            Ok(Self { re, im })
        } else {
            Err(Error::InvalidPoint { re, im })
        }
    }

    /// The point `i`.
    pub const I: H2Point = H2Point { re: 0.0, im: 1.0 };

    /// Callers guarantee `im > 0`.
    pub(crate) fn new_unchecked(re: f64, im: f64) -> Self {
        debug_assert!(im > 0.0 && re.is_finite(), "bad point {re} {im}");
        Self { re, im }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }
}

impl fmt::Display for H2Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl Serialize for H2Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for H2Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        H2Point::new(re, im).map_err(de::Error::custom)
    }
}

/// A point of `∂H² = ℝ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(BoundaryPoint::Finite(x))
        } else {
            Err(Error::InvalidBoundaryPoint(x))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    /// Equality with a relative tolerance on finite values.
    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
                (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        }
    }

    /// Angle of the point on the unit circle under the Cayley map
    /// `x ↦ (x - i)/(x + i)`, in `(-π, π]`. `∞` goes to 0 and `0` to `π`.
    pub fn cayley_angle(&self) -> f64 {
        match *self {
            BoundaryPoint::Infinity => 0.0,
            // (x - i)/(x + i) = (x² - 1 - 2ix)/(x² + 1)
            BoundaryPoint::Finite(x) => (-2.0 * x).atan2(x * x - 1.0),
        }
    }

    /// Inverse of [`BoundaryPoint::cayley_angle`]: `θ ↦ -cot(θ/2)`.
    pub fn from_cayley_angle(theta: f64) -> Self {
        let half = 0.5 * theta;
        let s = half.sin();
        if s == 0.0 {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(-half.cos() / s)
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Finite values serialize as JSON numbers, the point at infinity as `"inf"`.
impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundaryPoint::Finite(x) => s.serialize_f64(*x),
            BoundaryPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => BoundaryPoint::finite(x).map_err(de::Error::custom),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(BoundaryPoint::Infinity),
            Raw::Str(s) => Err(de::Error::custom(format!("bad boundary point `{s}`"))),
        }
    }
}

/// A point of the compactification `H² ∪ ∂H²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedPoint {
    Interior(H2Point),
    Ideal(BoundaryPoint),
}

impl From<H2Point> for ExtendedPoint {
    fn from(p: H2Point) -> Self {
        ExtendedPoint::Interior(p)
    }
}

impl From<BoundaryPoint> for ExtendedPoint {
    fn from(p: BoundaryPoint) -> Self {
        ExtendedPoint::Ideal(p)
    }
}
