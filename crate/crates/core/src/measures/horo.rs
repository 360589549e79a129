use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::density::{AtomicMeasure, CellGrid};
use super::series::LinearForm;
use crate::error::{Error, Result};
use crate::groups::{enumerate_ball, jordan_of, GroupElement, GroupSpec};
use crate::plane::BoundaryPoint;
use crate::product::{busemann_vec, ProductBoundaryPoint, VectorR};

/// A point `(ξ, u)` of `∂Z × ℝʳ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoroPoint {
    pub xi: ProductBoundaryPoint,
    pub u: VectorR,
}

impl HoroPoint {
    pub fn new(xi: ProductBoundaryPoint, u: VectorR) -> Result<Self> {
        if xi.dim() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: xi.dim(),
                got: u.dim(),
            });
        }
        Ok(Self { xi, u })
    }

    /// `(ξ, u) ↦ (ξ, u + a)`.
    pub fn translate(&self, a: &VectorR) -> Self {
        Self {
            xi: self.xi.clone(),
            u: &self.u + a,
        }
    }
}

/// Product of per-factor Cayley-angle intervals `[lo, hi)` of `∂H²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCell {
    pub intervals: Vec<(f64, f64)>,
}

impl BoundaryCell {
    pub fn from_grid(grid: &CellGrid, cell: &[usize]) -> Self {
        Self {
            intervals: cell.iter().map(|k| grid.interval(*k)).collect(),
        }
    }

    /// The whole boundary.
    pub fn full(r: usize) -> Self {
        Self {
            intervals: vec![(-PI, PI); r],
        }
    }

    fn contains_angle(lo: f64, hi: f64, t: f64) -> bool {
        lo <= t && (t < hi || (hi >= PI && t <= hi))
    }

    pub fn contains(&self, xi: &ProductBoundaryPoint) -> bool {
        self.intervals.len() == xi.dim()
            && self
                .intervals
                .iter()
                .zip(&xi.0)
                .all(|((lo, hi), p)| Self::contains_angle(*lo, *hi, p.cayley_angle()))
    }
}

/// `E = K × I`: a union of boundary cells times an axis-parallel box of `ℝʳ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub boundary_cells: Vec<BoundaryCell>,
    #[serde(rename = "box")]
    pub bounds: Vec<(f64, f64)>,
}

impl BoxRegion {
    pub fn new(boundary_cells: Vec<BoundaryCell>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() || bounds.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::InvalidParameter(format!("box {bounds:?}")));
        }
        if let Some(c) = boundary_cells.iter().find(|c| c.intervals.len() != bounds.len()) {
            return Err(Error::DimensionMismatch {
                expected: bounds.len(),
                got: c.intervals.len(),
            });
        }
        Ok(Self {
            boundary_cells,
            bounds,
        })
    }

    pub fn contains_boundary(&self, xi: &ProductBoundaryPoint) -> bool {
        self.boundary_cells.iter().any(|c| c.contains(xi))
    }

    pub fn contains(&self, p: &HoroPoint) -> bool {
        self.contains_boundary(&p.xi)
            && self
                .bounds
                .iter()
                .zip(&p.u.0)
                .all(|((a, b), u)| a <= u && u <= b)
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(a, b)| b - a).product()
    }
}

/// `∫_a^b e^{c u} du`, stable for small `c`.
fn exp_integral(c: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        b - a
    } else {
        (c * a).exp() * (c * (b - a)).exp_m1() / c
    }
}

/// `μ(E) = ν(K) · ∫_I e^{δ ψ(u)} du` for the density `e^{δψ(u)} dν(ξ) du`.
pub fn br_box_measure(nu: &AtomicMeasure, delta: f64, psi: &LinearForm, region: &BoxRegion) -> Result<f64> {
    psi.check_dim(region.bounds.len())?;
    let mass: f64 = nu
        .atoms
        .iter()
        .filter(|a| region.contains_boundary(&a.xi))
        .map(|a| a.w)
        .sum();
    let integral: f64 = region
        .bounds
        .iter()
        .zip(&psi.coefficients().0)
        .map(|((a, b), c)| exp_integral(delta * c, *a, *b))
        .product();
    Ok(mass * integral)
}

/// `T_a(E)`: boundary cells unchanged, box shifted by `a`.
pub fn translate_box(region: &BoxRegion, a: &VectorR) -> Result<BoxRegion> {
    if a.dim() != region.bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: region.bounds.len(),
            got: a.dim(),
        });
    }
    Ok(BoxRegion {
        boundary_cells: region.boundary_cells.clone(),
        bounds: region
            .bounds
            .iter()
            .zip(&a.0)
            .map(|((lo, hi), s)| (lo + s, hi + s))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssentialWitness {
    pub element: GroupElement,
    /// Index of the realizing atom in the measure.
    pub atom: usize,
    /// `β_ξ(z₀, g φ g⁻¹ z₀)`.
    pub busemann: VectorR,
    pub deviation: f64,
}

/// First ball element `g` with an atom `ξ ∈ E`, `gφg⁻¹ξ ∈ E`, positive weight
/// and `‖β_ξ(z₀, gφg⁻¹z₀) - a‖_∞ < ε`.
#[allow(clippy::too_many_arguments)]
pub fn essential_witness(
    spec: &GroupSpec,
    nu: &AtomicMeasure,
    e: &[BoundaryCell],
    phi: &GroupElement,
    a: &VectorR,
    eps: f64,
    l: usize,
) -> Result<EssentialWitness> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    jordan_of(&phi.matrix)?;
    let ball = enumerate_ball(spec, l)?;
    essential_witness_in(spec, nu, e, phi, a, eps, ball.upto(l))
}

pub fn essential_witness_in(
    spec: &GroupSpec,
    nu: &AtomicMeasure,
    e: &[BoundaryCell],
    phi: &GroupElement,
    a: &VectorR,
    eps: f64,
    candidates: &[GroupElement],
) -> Result<EssentialWitness> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    jordan_of(&phi.matrix)?;
    if a.dim() != spec.r() {
        return Err(Error::DimensionMismatch {
            expected: spec.r(),
            got: a.dim(),
        });
    }
    let in_e = |xi: &ProductBoundaryPoint| e.iter().any(|c| c.contains(xi));
    let inside: Vec<usize> = (0..nu.atoms.len())
        .filter(|&k| nu.atoms[k].w > 0.0 && in_e(&nu.atoms[k].xi))
        .collect();
    let z0 = spec.basepoint();
    for g in candidates {
        let h = phi.matrix.conjugate_by(&g.matrix);
        let hz0 = h.apply(z0);
        for &k in &inside {
            let xi = &nu.atoms[k].xi;
            if !in_e(&h.apply_boundary(xi)) {
                continue;
            }
            let b = busemann_vec(xi, z0, &hz0)?;
            let deviation = b.sup_distance(a);
            if deviation < eps {
                return Ok(EssentialWitness {
                    element: g.clone(),
                    atom: k,
                    busemann: b,
                    deviation,
                });
            }
        }
    }
    Err(Error::NoWitnessInBall)
}

/// Per-factor boundary point lying in every factor at `angle`.
pub fn diagonal_boundary_point(angle: f64, r: usize) -> ProductBoundaryPoint {
    ProductBoundaryPoint(vec![BoundaryPoint::from_cayley_angle(angle); r])
}
