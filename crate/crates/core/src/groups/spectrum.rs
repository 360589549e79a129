use serde::{Deserialize, Serialize};

use super::ball::{enumerate_ball, Ball, GroupElement};
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use crate::plane::BoundaryPoint;
use crate::product::{ProductBoundaryPoint, ProductIsometry, VectorR};
use crate::tolerance::TOL;

/// Translation-length vectors of the jointly loxodromic elements of a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub vectors: Vec<VectorR>,
    pub max_word_length: usize,
}

/// `κ(g) = κ(z₀, g z₀)`, cached on the element.
pub fn cartan_projection(e: &GroupElement) -> VectorR {
    e.cartan.clone()
}

/// Per-factor translation lengths `2 arccosh(|tr gᵢ|/2)`.
pub fn jordan_projection(e: &GroupElement) -> Result<VectorR> {
    jordan_of(&e.matrix)
}

pub fn jordan_of(m: &ProductIsometry) -> Result<VectorR> {
    let mut out = Vec::with_capacity(m.dim());
    let mut bad = Vec::new();
    for (i, g) in m.0.iter().enumerate() {
        match g.translation_length() {
            Ok(t) => out.push(t),
            Err(_) => bad.push(i),
        }
    }
    if bad.is_empty() {
        Ok(VectorR(out))
    } else {
        Err(Error::NotJointlyLoxodromic { factors: bad })
    }
}

/// Attracting and repelling fixed tuples of a jointly loxodromic element.
pub fn fixed_tuples(m: &ProductIsometry) -> Result<(ProductBoundaryPoint, ProductBoundaryPoint)> {
    jordan_of(m)?;
    let mut att = Vec::with_capacity(m.dim());
    let mut rep = Vec::with_capacity(m.dim());
    for g in &m.0 {
        let d = g.loxodromic_data()?;
        att.push(d.attracting);
        rep.push(d.repelling);
    }
    Ok((ProductBoundaryPoint(att), ProductBoundaryPoint(rep)))
}

/// Sorts lexicographically and drops vectors within `tol` (relative to the
/// vector scale, sup norm) of one already kept.
pub fn dedup_vectors(mut vs: Vec<VectorR>, tol: f64) -> Vec<VectorR> {
    vs.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<VectorR> = Vec::new();
    for v in vs {
        let lim = tol * v.norm_sup().max(1.0);
        let dup = kept
            .iter()
            .rev()
            .take_while(|k| v.0[0] - k.0[0] <= lim)
            .any(|k| k.sup_distance(&v) <= lim);
        if !dup {
            kept.push(v);
        }
    }
    kept
}

pub fn length_spectrum(spec: &GroupSpec, l: usize) -> Result<SpectrumSample> {
    if l == 0 {
        return Err(Error::InvalidParameter("spectrum needs L ≥ 1".into()));
    }
    Ok(length_spectrum_of(&enumerate_ball(spec, l)?, l))
}

/// Spectrum of the elements of word length at most `l` of a precomputed ball.
pub fn length_spectrum_of(ball: &Ball, l: usize) -> SpectrumSample {
    let vectors = ball
        .upto(l)
        .iter()
        .skip(1)
        .filter_map(|e| jordan_projection(e).ok())
        .collect();
    SpectrumSample {
        vectors: dedup_vectors(vectors, TOL.spectrum_dedup),
        max_word_length: l.min(ball.radius()),
    }
}

/// Normalized Cartan projections `κ(g)/‖κ(g)‖₂` over elements with `‖κ(g)‖₂ ≥ 1`.
pub fn limit_cone_sample(spec: &GroupSpec, l: usize) -> Result<Vec<VectorR>> {
    if l == 0 {
        return Err(Error::InvalidParameter("cone sample needs L ≥ 1".into()));
    }
    Ok(limit_cone_of(&enumerate_ball(spec, l)?, l))
}

pub fn limit_cone_of(ball: &Ball, l: usize) -> Vec<VectorR> {
    ball.upto(l)
        .iter()
        .skip(1)
        .filter_map(|e| {
            let n = e.cartan.norm2();
            (n >= 1.0).then(|| e.cartan.scale(n.recip()))
        })
        .collect()
}

/// Circular distance between the Cayley angles of two boundary points.
pub fn boundary_angle_gap(a: BoundaryPoint, b: BoundaryPoint) -> f64 {
    let d = (a.cayley_angle() - b.cayley_angle()).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Isometry;

    fn elem(spec: &GroupSpec, w: &str) -> GroupElement {
        GroupElement::new(spec, spec.parse_word(w).unwrap())
    }

    fn cyclic() -> GroupSpec {
        let g = ProductIsometry(vec![Isometry::axial_translation(1.0), Isometry::axial_translation(2.0)]);
        GroupSpec::new(vec![("g".into(), g)], None, None).unwrap()
    }

    #[test]
    fn jordan_examples() {
        let s = cyclic();
        let j = jordan_projection(&elem(&s, "g")).unwrap();
        assert!(j.sup_distance(&VectorR(vec![1.0, 2.0])) < 1e-12);
        let j2 = jordan_projection(&elem(&s, "g g")).unwrap();
        assert!(j2.sup_distance(&VectorR(vec![2.0, 4.0])) < 1e-12);
        let h = ProductIsometry(vec![Isometry::rotation_about_i(0.7), Isometry::axial_translation(0.3)]);
        let conj = jordan_of(&s.generators()[0].conjugate_by(&h)).unwrap();
        assert!(conj.sup_distance(&j) < 1e-12);
    }

    #[test]
    fn jordan_lists_bad_factors() {
        let g = ProductIsometry(vec![Isometry::axial_translation(1.0), Isometry::rotation_about_i(1.0)]);
        let s = GroupSpec::new(vec![("g".into(), g)], None, None).unwrap();
        assert_eq!(
            jordan_projection(&elem(&s, "g")),
            Err(Error::NotJointlyLoxodromic { factors: vec![1] })
        );
    }

    #[test]
    fn cartan_examples() {
        let s = cyclic();
        assert_eq!(cartan_projection(&elem(&s, "e")), VectorR::zeros(2));
        assert!(cartan_projection(&elem(&s, "g"))
            .sup_distance(&VectorR(vec![1.0, 2.0]))
            < 1e-12);
    }

    #[test]
    fn cyclic_spectrum() {
        let sp = length_spectrum(&cyclic(), 3).unwrap();
        assert_eq!(sp.vectors.len(), 3);
        for (k, v) in sp.vectors.iter().enumerate() {
            let k = (k + 1) as f64;
            assert!(v.sup_distance(&VectorR(vec![k, 2.0 * k])) < 1e-9);
        }
    }

    #[test]
    fn cyclic_cone_direction() {
        let cone = limit_cone_sample(&cyclic(), 4).unwrap();
        let target = VectorR(vec![1.0, 2.0]).scale(5f64.sqrt().recip());
        assert!(cone.iter().all(|v| v.sup_distance(&target) < 1e-12));
    }

    #[test]
    fn angle_gap_wraps() {
        let inf = BoundaryPoint::Infinity;
        assert!(boundary_angle_gap(inf, BoundaryPoint::Finite(1e9)) < 1e-8);
        assert!(boundary_angle_gap(inf, BoundaryPoint::Finite(-1e9)) < 1e-8);
        assert!((boundary_angle_gap(inf, BoundaryPoint::Finite(0.0)) - std::f64::consts::PI).abs() < 1e-12);
    }
}
