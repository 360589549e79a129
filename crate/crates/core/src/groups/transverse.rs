use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::{enumerate_ball, Ball, GroupElement};
use super::spec::GroupSpec;
use super::spectrum::{boundary_angle_gap, fixed_tuples, jordan_of};
use crate::alignment::is_aligned_triple;
use crate::error::{Error, Result};
use crate::plane::{distance_to_path, ExtendedPoint, SegmentH2};
use crate::product::{product_shadow_contains, ProductBoundaryPoint, ProductTarget};

/// Bucket minima must reach this fraction of `length × min generator displacement`
/// (generator displacement taken as `maxᵢ dᵢ(z₀, s z₀)`).
pub const GROWTH_FLOOR_FACTOR: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransversalityWitness {
    /// Word length whose minimal factor displacement decreased or fell below the floor.
    Divergence {
        word_length: usize,
        bucket_min: f64,
        floor: f64,
        word: String,
    },
    /// Two elements whose attracting tuples differ but agree in `factor`.
    Antipodal {
        factor: usize,
        first: String,
        second: String,
        gap: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub divergent_ok: bool,
    pub antipodal_ok: bool,
    pub word_length: usize,
    pub tolerance: f64,
    /// Minimum over the sphere of word length `k` of `minᵢ dᵢ(z₀, g z₀)`, `k = 1..=L`.
    pub bucket_minima: Vec<f64>,
    pub min_generator_displacement: f64,
    pub distinct_attracting_tuples: usize,
    pub witnesses: Vec<TransversalityWitness>,
}

impl TransversalityReport {
    pub fn passed(&self) -> bool {
        self.divergent_ok && self.antipodal_ok
    }
}

fn min_entry(e: &GroupElement) -> f64 {
    e.cartan.0.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn transversality_check(spec: &GroupSpec, l: usize, tol: f64) -> Result<TransversalityReport> {
    if l < 2 {
        return Err(Error::InvalidParameter("transversality check needs L ≥ 2".into()));
    }
    Ok(transversality_of(spec, &enumerate_ball(spec, l)?, l, tol))
}

/// Divergence proxy and antipodality scan on the elements of word length ≤ `l`.
pub fn transversality_of(spec: &GroupSpec, ball: &Ball, l: usize, tol: f64) -> TransversalityReport {
    let l = l.min(ball.radius());
    let mut witnesses = Vec::new();

    // generator displacement measured in the sup norm, so a generator that is
    // trivial in one factor still sets a positive floor
    let min_gen = ball
        .sphere(1)
        .iter()
        .map(|e| e.cartan.norm_sup())
        .fold(f64::INFINITY, f64::min);
    let mut bucket_minima = Vec::with_capacity(l);
    let mut divergent_ok = true;
    let mut prev = 0.0f64;
    for k in 1..=l {
        let Some(arg) = ball
            .sphere(k)
            .iter()
            .min_by(|a, b| min_entry(a).total_cmp(&min_entry(b)))
        else {
            break;
        };
        let m = min_entry(arg);
        bucket_minima.push(m);
        let floor = GROWTH_FLOOR_FACTOR * k as f64 * min_gen;
        if m < floor || m + 1e-9 < prev {
            divergent_ok = false;
            witnesses.push(TransversalityWitness::Divergence {
                word_length: k,
                bucket_min: m,
                floor,
                word: spec.format_word(&arg.word),
            });
        }
        prev = prev.max(m);
    }

    // distinct attracting tuples, each with the first element realizing it
    let mut tuples: Vec<(ProductBoundaryPoint, usize)> = Vec::new();
    let found: Vec<Option<ProductBoundaryPoint>> = ball.upto(l)[1..]
        .par_iter()
        .map(|e| fixed_tuples(&e.matrix).ok().map(|(a, _)| a))
        .collect();
    let angle_tuple = |p: &ProductBoundaryPoint| -> Vec<f64> { p.0.iter().map(|x| x.cayley_angle()).collect() };
    let same = |a: &ProductBoundaryPoint, b: &ProductBoundaryPoint| {
        a.0.iter().zip(&b.0).all(|(x, y)| boundary_angle_gap(*x, *y) <= tol)
    };
    {
        let mut keyed: Vec<(Vec<f64>, ProductBoundaryPoint, usize)> = found
            .into_iter()
            .enumerate()
            .filter_map(|(k, t)| t.map(|t| (angle_tuple(&t), t, k + 1)))
            .collect();
        keyed.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]).then(a.2.cmp(&b.2)));
        let mut first_angles: Vec<f64> = Vec::new();
        for (key, t, idx) in keyed {
            let dup = tuples
                .iter()
                .zip(&first_angles)
                .rev()
                .take_while(|(_, a)| key[0] - **a <= tol)
                .any(|((u, _), _)| same(u, &t));
            if !dup {
                tuples.push((t, idx));
                first_angles.push(key[0]);
            }
        }
    }
    let r = spec.r();
    let mut antipodal_ok = true;
    for factor in 0..r {
        let mut order: Vec<(f64, usize)> = tuples
            .iter()
            .enumerate()
            .map(|(k, (t, _))| (t.0[factor].cayley_angle(), k))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = order.len();
        for a in 0..n {
            // circular neighbours within tol in this factor
            for step in 1..n {
                let b = (a + step) % n;
                let (ta, ia) = (&tuples[order[a].1].0, tuples[order[a].1].1);
                let (tb, ib) = (&tuples[order[b].1].0, tuples[order[b].1].1);
                let gap = boundary_angle_gap(ta.0[factor], tb.0[factor]);
                if gap > tol {
                    break;
                }
                if !same(ta, tb) {
                    antipodal_ok = false;
                    witnesses.push(TransversalityWitness::Antipodal {
                        factor,
                        first: spec.format_word(&ball.elements[ia].word),
                        second: spec.format_word(&ball.elements[ib].word),
                        gap,
                    });
                }
            }
        }
    }

    TransversalityReport {
        divergent_ok,
        antipodal_ok,
        word_length: l,
        tolerance: tol,
        bucket_minima,
        min_generator_displacement: min_gen,
        distinct_attracting_tuples: tuples.len(),
        witnesses,
    }
}

/// Ball elements `g` with `ξ ∈ O_R(z₀, g z₀)`.
pub fn conical_witness(
    xi: &ProductBoundaryPoint,
    spec: &GroupSpec,
    l: usize,
    radius: f64,
) -> Result<Vec<GroupElement>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {radius}")));
    }
    let ball = enumerate_ball(spec, l)?;
    conical_witness_in(xi, spec, &ball, l, radius)
}

pub fn conical_witness_in(
    xi: &ProductBoundaryPoint,
    spec: &GroupSpec,
    ball: &Ball,
    l: usize,
    radius: f64,
) -> Result<Vec<GroupElement>> {
    if xi.dim() != spec.r() {
        return Err(Error::DimensionMismatch {
            expected: spec.r(),
            got: xi.dim(),
        });
    }
    let z0 = spec.basepoint();
    let target = ProductTarget::Boundary(xi.clone());
    Ok(ball
        .upto(l)
        .iter()
        .filter(|e| product_shadow_contains(z0, &e.matrix.apply(z0), radius, &target).unwrap_or(false))
        .cloned()
        .collect())
}

/// First ball element `h` for which `(x₀, h[x₀, φⁿx₀], ξ)` is `K`-aligned in
/// the first factor.
pub fn guided_witness(
    xi: &ProductBoundaryPoint,
    phi: &GroupElement,
    k: f64,
    n: u32,
    spec: &GroupSpec,
    l: usize,
) -> Result<GroupElement> {
    jordan_of(&phi.matrix)?;
    let ball = enumerate_ball(spec, l)?;
    guided_witness_in(xi, phi, k, n, spec, ball.upto(l))
}

pub fn guided_witness_in(
    xi: &ProductBoundaryPoint,
    phi: &GroupElement,
    k: f64,
    n: u32,
    spec: &GroupSpec,
    candidates: &[GroupElement],
) -> Result<GroupElement> {
    jordan_of(&phi.matrix)?;
    if xi.dim() != spec.r() {
        return Err(Error::DimensionMismatch {
            expected: spec.r(),
            got: xi.dim(),
        });
    }
    let x0 = spec.basepoint().0[0];
    let end = phi.matrix.0[0].pow(n as i64).apply(x0);
    let target = ExtendedPoint::Ideal(xi.0[0]);
    for h in candidates {
        let g = h.matrix.0[0];
        let seg = SegmentH2::new(g.apply(x0), g.apply(end));
        if seg.is_degenerate() {
            continue;
        }
        if is_aligned_triple(ExtendedPoint::Interior(x0), &seg, target, k)? {
            return Ok(h.clone());
        }
    }
    Err(Error::NoWitnessInBall)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivFactorsEntry {
    pub radius: f64,
    /// Largest first-factor displacement among elements with some factor within `radius`.
    pub r_prime: f64,
    /// Smallest `minᵢ dᵢ` over elements with first-factor displacement above `r_prime`.
    pub min_beyond: f64,
    pub holds: bool,
}

/// For each `R`, the threshold `R'` past which `d₁ > R'` forces `dᵢ > R` in every factor.
pub fn div_factors_diagnostic(ball: &Ball, l: usize, radii: &[f64]) -> Vec<DivFactorsEntry> {
    let elems = &ball.upto(l)[1..];
    radii
        .iter()
        .map(|&radius| {
            let r_prime = elems
                .iter()
                .filter(|e| min_entry(e) <= radius)
                .map(|e| e.cartan.0[0])
                .fold(0.0f64, f64::max);
            let min_beyond = elems
                .iter()
                .filter(|e| e.cartan.0[0] > r_prime)
                .map(min_entry)
                .fold(f64::INFINITY, f64::min);
            DivFactorsEntry {
                radius,
                r_prime,
                min_beyond,
                holds: r_prime.is_finite() && min_beyond > radius,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentShadowEntry {
    pub radius: f64,
    pub word_length: usize,
    /// Pairs `(g, h)` with `h₁x₁ ∈ O_R(x₁, g₁x₁)`.
    pub pairs: usize,
    /// Smallest `R'` with `hᵢxᵢ ∈ O_{R'}(xᵢ, gᵢxᵢ)` in every factor, over those pairs.
    pub r_prime: f64,
}

/// Word length of the `g` side of the shadow pairs.
pub const SHADOW_PAIR_PREFIX: usize = 3;

/// Scans pairs `g` (word length ≤ [`SHADOW_PAIR_PREFIX`]) and `h` (word length ≤ `l`).
pub fn componentwise_shadow_diagnostic(spec: &GroupSpec, ball: &Ball, l: usize, radius: f64) -> ComponentShadowEntry {
    let z0 = spec.basepoint();
    let gs = &ball.upto(SHADOW_PAIR_PREFIX.min(l))[1..];
    let hs = &ball.upto(l)[1..];
    let images: Vec<Vec<_>> = hs.par_iter().map(|h| h.matrix.apply(z0).0).collect();
    let (pairs, r_prime) = gs
        .par_iter()
        .map(|g| {
            let gz = g.matrix.apply(z0).0;
            let mut pairs = 0usize;
            let mut worst = 0.0f64;
            for hz in &images {
                let d1 = distance_to_path(z0.0[0], ExtendedPoint::Interior(hz[0]), gz[0]);
                if d1 >= radius {
                    continue;
                }
                pairs += 1;
                let need = (0..spec.r())
                    .map(|i| distance_to_path(z0.0[i], ExtendedPoint::Interior(hz[i]), gz[i]))
                    .fold(0.0f64, f64::max);
                worst = worst.max(need);
            }
            (pairs, worst)
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    ComponentShadowEntry {
        radius,
        word_length: l,
        pairs,
        r_prime,
    }
}

/// `R'` is stable when its spread across the scanned word lengths stays within `R`.
pub fn shadow_constant_stable(entries: &[ComponentShadowEntry]) -> bool {
    let Some(first) = entries.first() else {
        return false;
    };
    let lo = entries.iter().map(|e| e.r_prime).fold(f64::INFINITY, f64::min);
    let hi = entries.iter().map(|e| e.r_prime).fold(0.0f64, f64::max);
    hi.is_finite() && entries.iter().all(|e| e.pairs > 0) && hi - lo <= first.radius
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::{BoundaryPoint, Isometry};
    use crate::product::ProductIsometry;

    fn cyclic() -> GroupSpec {
        let g = ProductIsometry(vec![Isometry::axial_translation(1.0), Isometry::axial_translation(2.0)]);
        GroupSpec::new(vec![("g".into(), g)], None, None).unwrap()
    }

    #[test]
    fn bundled_fixture_is_transverse() {
        let s = GroupSpec::bundled_diagonal_schottky();
        let rep = transversality_check(&s, 5, 1e-6).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.witnesses.is_empty());
    }

    #[test]
    fn product_with_trivial_factor_fails_divergence() {
        let a = Isometry::diagonal(3.0).unwrap();
        let b = Isometry::diagonal(3.0)
            .unwrap()
            .conjugate_by(&Isometry::normalized(2.0, 1.0, 1.0, 1.0).unwrap());
        let s = GroupSpec::new(
            vec![
                ("a".into(), ProductIsometry(vec![a, Isometry::IDENTITY])),
                ("b".into(), ProductIsometry(vec![Isometry::IDENTITY, b])),
            ],
            None,
            None,
        )
        .unwrap();
        let rep = transversality_check(&s, 3, 1e-6).unwrap();
        assert!(!rep.divergent_ok);
        assert!(rep
            .witnesses
            .iter()
            .any(|w| matches!(w, TransversalityWitness::Divergence { .. })));
    }

    #[test]
    fn conical_along_axis() {
        let s = cyclic();
        let xi = ProductBoundaryPoint(vec![BoundaryPoint::Infinity, BoundaryPoint::Infinity]);
        let w = conical_witness(&xi, &s, 4, 0.5).unwrap();
        assert_eq!(w.len(), 5);
        let swapped = ProductBoundaryPoint(vec![BoundaryPoint::Infinity, BoundaryPoint::Finite(0.0)]);
        assert_eq!(conical_witness(&swapped, &s, 4, 0.5).unwrap().len(), 1);
    }

    #[test]
    fn guided_identity_for_attracting_point() {
        let s = cyclic();
        let phi = GroupElement::new(&s, s.parse_word("g").unwrap());
        let xi = ProductBoundaryPoint(vec![BoundaryPoint::Infinity, BoundaryPoint::Infinity]);
        for n in 1..5 {
            let h = guided_witness(&xi, &phi, 0.5, n, &s, 3).unwrap();
            assert!(h.word.is_empty());
        }
        let rep = ProductBoundaryPoint(vec![BoundaryPoint::Finite(0.0), BoundaryPoint::Finite(0.0)]);
        assert_eq!(
            guided_witness(&rep, &phi, 0.5, 2, &s, 0),
            Err(Error::NoWitnessInBall)
        );
    }

    #[test]
    fn div_factors_on_fixture() {
        let s = GroupSpec::bundled_diagonal_schottky();
        let ball = enumerate_ball(&s, 5).unwrap();
        for e in div_factors_diagnostic(&ball, 5, &[2.0, 4.0, 8.0]) {
            assert!(e.holds, "{e:?}");
        }
    }
}
