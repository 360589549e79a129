//! Products `Z = X₁ × ⋯ × X_r` of hyperbolic planes, with the vector-valued
//! distance `κ` and Busemann cocycle, product shadows and convergence to
//! `∂Z = ∂X₁ × ⋯ × ∂X_r`.
//!
//! All vector norms here are sup norms.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{
    busemann, dist, shadow_contains, BoundaryPoint, ExtendedPoint, H2Point, Isometry, SegmentH2,
};

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// A vector of `ℝʳ`, one entry per factor. Serializes as a JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorR(pub Vec<f64>);

impl VectorR {
    pub fn zeros(r: usize) -> Self {
        VectorR(vec![0.0; r])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &VectorR) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sup(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: f64) -> VectorR {
        VectorR(self.0.iter().map(|x| k * x).collect())
    }

    pub fn sup_distance(&self, other: &VectorR) -> f64 {
        (self - other).norm_sup()
    }
}

impl Add for &VectorR {
    type Output = VectorR;
    fn add(self, o: &VectorR) -> VectorR {
        VectorR(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VectorR {
    type Output = VectorR;
    fn sub(self, o: &VectorR) -> VectorR {
        VectorR(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &VectorR {
    type Output = VectorR;
    fn neg(self) -> VectorR {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductPoint(pub Vec<H2Point>);

impl ProductPoint {
    pub fn new(components: Vec<H2Point>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("product of zero factors".into()));
        }
        Ok(ProductPoint(components))
    }

    /// `(i, …, i)`.
    pub fn basepoint(r: usize) -> Self {
        ProductPoint(vec![H2Point::I; r])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductBoundaryPoint(pub Vec<BoundaryPoint>);

impl ProductBoundaryPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// A point of `Z ∪ ∂Z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProductTarget {
    Point(ProductPoint),
    Boundary(ProductBoundaryPoint),
}

impl ProductTarget {
    pub fn dim(&self) -> usize {
        match self {
            ProductTarget::Point(p) => p.dim(),
            ProductTarget::Boundary(b) => b.dim(),
        }
    }

    pub fn component(&self, i: usize) -> ExtendedPoint {
        match self {
            ProductTarget::Point(p) => ExtendedPoint::Interior(p.0[i]),
            ProductTarget::Boundary(b) => ExtendedPoint::Ideal(b.0[i]),
        }
    }
}

impl From<ProductPoint> for ProductTarget {
    fn from(p: ProductPoint) -> Self {
        ProductTarget::Point(p)
    }
}

impl From<ProductBoundaryPoint> for ProductTarget {
    fn from(p: ProductBoundaryPoint) -> Self {
        ProductTarget::Boundary(p)
    }
}

/// Component-wise isometry of `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductIsometry(pub Vec<Isometry>);

impl ProductIsometry {
    pub fn identity(r: usize) -> Self {
        ProductIsometry(vec![Isometry::IDENTITY; r])
    }

    /// The same isometry in every factor.
    pub fn diagonal(g: Isometry, r: usize) -> Self {
        ProductIsometry(vec![g; r])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn inverse(&self) -> Self {
        ProductIsometry(self.0.iter().map(Isometry::inverse).collect())
    }

    pub fn pow(&self, k: i64) -> Self {
        ProductIsometry(self.0.iter().map(|g| g.pow(k)).collect())
    }

    pub fn conjugate_by(&self, h: &ProductIsometry) -> Self {
        ProductIsometry(self.0.iter().zip(&h.0).map(|(g, h)| g.conjugate_by(h)).collect())
    }

    pub fn apply(&self, z: &ProductPoint) -> ProductPoint {
        ProductPoint(self.0.iter().zip(&z.0).map(|(g, x)| g.apply(*x)).collect())
    }

    pub fn apply_boundary(&self, xi: &ProductBoundaryPoint) -> ProductBoundaryPoint {
        ProductBoundaryPoint(self.0.iter().zip(&xi.0).map(|(g, x)| g.apply_boundary(*x)).collect())
    }

    pub fn apply_target(&self, t: &ProductTarget) -> ProductTarget {
        match t {
            ProductTarget::Point(p) => ProductTarget::Point(self.apply(p)),
            ProductTarget::Boundary(b) => ProductTarget::Boundary(self.apply_boundary(b)),
        }
    }

    /// Largest factor-wise up-to-sign distance.
    pub fn psl_distance(&self, other: &ProductIsometry) -> f64 {
        self.0.iter().zip(&other.0).fold(0.0f64, |m, (a, b)| m.max(a.psl_distance(b)))
    }
}

impl Mul for &ProductIsometry {
    type Output = ProductIsometry;
    fn mul(self, o: &ProductIsometry) -> ProductIsometry {
        ProductIsometry(self.0.iter().zip(&o.0).map(|(a, b)| *a * *b).collect())
    }
}

/// `([x₁, x₁'], …, [x_r, x_r'])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTuple(pub Vec<SegmentH2>);

impl SegmentTuple {
    pub fn new(z: &ProductPoint, w: &ProductPoint) -> Result<Self> {
        check_len(z.dim(), w.dim())?;
        Ok(SegmentTuple(z.0.iter().zip(&w.0).map(|(a, b)| SegmentH2::new(*a, *b)).collect()))
    }
}

/// Vector-valued distance, entry `i` = `dᵢ(xᵢ, xᵢ')`.
pub fn kappa(z: &ProductPoint, w: &ProductPoint) -> Result<VectorR> {
    check_len(z.dim(), w.dim())?;
    Ok(VectorR(z.0.iter().zip(&w.0).map(|(a, b)| dist(*a, *b)).collect()))
}

/// Vector-valued Busemann cocycle, entry `i` = `β_{ξᵢ}(xᵢ, xᵢ')`.
pub fn busemann_vec(xi: &ProductBoundaryPoint, z: &ProductPoint, w: &ProductPoint) -> Result<VectorR> {
    check_len(z.dim(), w.dim())?;
    check_len(z.dim(), xi.dim())?;
    Ok(VectorR(
        xi.0.iter()
            .zip(z.0.iter().zip(&w.0))
            .map(|(x, (a, b))| busemann(*x, *a, *b))
            .collect(),
    ))
}

/// `w ∈ O_R(z, z') = ∏ O_R(xᵢ, xᵢ')`.
pub fn product_shadow_contains(
    z: &ProductPoint,
    z_prime: &ProductPoint,
    radius: f64,
    w: &ProductTarget,
) -> Result<bool> {
    check_len(z.dim(), z_prime.dim())?;
    check_len(z.dim(), w.dim())?;
    Ok((0..z.dim()).all(|i| shadow_contains(z.0[i], z_prime.0[i], radius, w.component(i))))
}

fn near_boundary(x: H2Point, xi: BoundaryPoint, tol: f64) -> bool {
    match xi {
        BoundaryPoint::Infinity => x.im() > tol.recip(),
        BoundaryPoint::Finite(a) => (x.re() - a).hypot(x.im()) < tol,
    }
}

/// Whether a finite sample of a sequence converges to `ξ` in every factor.
///
/// Neighbourhoods are taken in half-plane coordinates: a finite `ξᵢ` is
/// approached within Euclidean distance `tol`, `∞` by `im > 1/tol`. "Enters
/// and stays" is read on the second half of the sample: every point from
/// index `⌊n/2⌋` on must lie in the neighbourhood in every factor.
pub fn converges_to(seq: &[ProductPoint], xi: &ProductBoundaryPoint, tol: f64) -> Result<bool> {
    if seq.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    for z in seq {
        check_len(xi.dim(), z.dim())?;
    }
    let tail = &seq[seq.len() / 2..];
    Ok(tail
        .iter()
        .all(|z| z.0.iter().zip(&xi.0).all(|(x, b)| near_boundary(*x, *b, tol))))
}
