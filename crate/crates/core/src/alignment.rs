//! Alignment of points and segments, the contracting and squeezing
//! properties of geodesics, shadow/alignment conversion, axis constants of
//! loxodromics and the extension candidate search.
//!
//! Statements about sets (diameters of projected segments, Hausdorff
//! distances) are certified numerically by sampling segments at arclength
//! step [`TOL`]`.sampling_step`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{
    dist, shadow_contains, BoundaryPoint, ExtendedPoint, GeodesicH2, GeodesicPath, H2Point,
    Isometry, Ray, SegmentH2,
};
use crate::product::{ProductIsometry, ProductPoint, ProductTarget};
use crate::sampling::trial_rng;
use crate::tolerance::TOL;

/// Outcome of an alignment test. For a pair `(w, [x, y])` only the left
/// defect is meaningful and `right_defect` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub aligned: bool,
    pub left_defect: f64,
    pub right_defect: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// Foot of the projection of `w` onto `seg`, for interior or ideal `w`.
pub fn projection_foot(seg: &SegmentH2, w: ExtendedPoint) -> Result<H2Point> {
    match w {
        ExtendedPoint::Interior(p) => Ok(seg.project(p).foot),
        ExtendedPoint::Ideal(xi) => boundary_projection(seg, xi),
    }
}

fn check_k(k: f64) -> Result<()> {
    if k >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alignment constant {k} < 0")))
    }
}

/// `(w, [x, y])` is K-aligned iff `d(π_{[x,y]}(w), x) < K`.
pub fn is_aligned(w: ExtendedPoint, seg: &SegmentH2, k: f64) -> Result<AlignmentReport> {
    check_k(k)?;
    if seg.is_degenerate() {
        return Err(Error::DegenerateSegment);
    }
    let defect = dist(projection_foot(seg, w)?, seg.start());
    Ok(AlignmentReport {
        aligned: defect < k,
        left_defect: defect,
        right_defect: 0.0,
        k,
    })
}

/// Two-sided report for `(w, [x, y], z)`.
pub fn alignment_triple_report(
    w: ExtendedPoint,
    seg: &SegmentH2,
    z: ExtendedPoint,
    k: f64,
) -> Result<AlignmentReport> {
    let left = is_aligned(w, seg, k)?;
    let right = is_aligned(z, &seg.reversed(), k)?;
    Ok(AlignmentReport {
        aligned: left.aligned && right.aligned,
        left_defect: left.left_defect,
        right_defect: right.left_defect,
        k,
    })
}

/// `(w, [x, y], z)` is K-aligned: `(w, [x, y])` and `(z, [y, x])` both are.
pub fn is_aligned_triple(w: ExtendedPoint, seg: &SegmentH2, z: ExtendedPoint, k: f64) -> Result<bool> {
    Ok(alignment_triple_report(w, seg, z, k)?.aligned)
}

/// Limit of `π_seg(z_t)` as `z_t → ξ` along the ray from `seg.start()`.
///
/// The iteration runs in the segment's frame, where the segment is
/// `[i, i·e^L]`: the ray parameter doubles from 1 until successive feet are
/// within [`TOL`]`.boundary_projection`.
pub fn boundary_projection(seg: &SegmentH2, xi: BoundaryPoint) -> Result<H2Point> {
    if seg.is_degenerate() {
        return Err(Error::DegenerateSegment);
    }
    let frame = *seg.frame();
    let local = SegmentH2::new(H2Point::I, H2Point::new_unchecked(0.0, seg.length().exp()));
    let ray = Ray::new(H2Point::I, frame.inverse().apply_boundary(xi));
    let mut t = 1.0;
    let mut prev = local.project(ray.point_at(t)).foot;
    // beyond this e^t overflows inside the Möbius map
    let last = TOL.boundary_projection_cap.min(256.0);
    while t < last {
        t *= 2.0;
        let foot = local.project(ray.point_at(t)).foot;
        if dist(foot, prev) < TOL.boundary_projection {
            return Ok(frame.apply(foot));
        }
        prev = foot;
    }
    Err(Error::NoConvergence { last_t: t })
}

/// Sampled quantities behind the contracting property for a decomposition `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractingDiagnostics {
    /// `Diam(π_γ([x, p]) ∪ {p})`.
    pub left_diameter: f64,
    /// `Diam(π_γ([q, y]) ∪ {q})`.
    pub right_diameter: f64,
    /// `d(π_γ(x), p)`.
    pub start_gap: f64,
    /// `d(π_γ(y), q)`.
    pub end_gap: f64,
    /// `d(x, p) < d(x, q)`.
    pub ordered: bool,
}

impl ContractingDiagnostics {
    pub fn holds(&self, bound: f64) -> bool {
        self.ordered
            && self.left_diameter <= bound
            && self.right_diameter <= bound
            && self.start_gap < bound
            && self.end_gap < bound
    }

    pub fn worst(&self) -> f64 {
        self.left_diameter
            .max(self.right_diameter)
            .max(self.start_gap)
            .max(self.end_gap)
    }
}

/// `Diam(π_γ([a, b]) ∪ {anchor})` from samples of `[a, b]`. Projections lie
/// on γ, so their diameter is the spread of their parameters.
fn projected_diameter(gamma: &GeodesicH2, a: H2Point, b: H2Point, anchor: H2Point) -> f64 {
    let samples = if a == b { vec![a] } else { SegmentH2::new(a, b).sample(TOL.sampling_step) };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut to_anchor = 0.0f64;
    for w in samples {
        let pr = gamma.project(w);
        lo = lo.min(pr.param);
        hi = hi.max(pr.param);
        to_anchor = to_anchor.max(dist(pr.foot, anchor));
    }
    (hi - lo).max(to_anchor)
}

pub fn contracting_diagnostics(
    gamma: &GeodesicH2,
    x: H2Point,
    y: H2Point,
    p: H2Point,
    q: H2Point,
) -> ContractingDiagnostics {
    let px = gamma.project(x).foot;
    let py = gamma.project(y).foot;
    ContractingDiagnostics {
        left_diameter: projected_diameter(gamma, x, p, p),
        right_diameter: projected_diameter(gamma, q, y, q),
        start_gap: dist(px, p),
        end_gap: dist(py, q),
        ordered: dist(x, p) < dist(x, q),
    }
}

const CONTRACTING_BOUND: f64 = 2.0;
const CONTRACTING_SLACK: f64 = 1e-6;

/// Points `p, q ∈ [x, y]` (in that order) such that the initial piece
/// `[x, p]` and the final piece `[q, y]` project to sets of diameter ≤ 2
/// together with `p`, `q`, and `[p, q]` is 2-equivalent to `[π_γ(x), π_γ(y)]`.
///
/// The first attempt takes `p`, `q` nearest to `π_γ(x)`, `π_γ(y)`; if the
/// sampled bounds fail, a scan along `[x, y]` picks the earliest admissible
/// `p` and the latest admissible `q`.
pub fn contracting_decomposition(gamma: &GeodesicH2, x: H2Point, y: H2Point) -> Result<(H2Point, H2Point)> {
    let px = gamma.project(x);
    let py = gamma.project(y);
    let gap = (px.param - py.param).abs();
    if !(gap > CONTRACTING_BOUND) {
        return Err(Error::ProjectionsTooClose { gap });
    }
    let seg = SegmentH2::new(x, y);
    let p = seg.project(px.foot);
    let q = seg.project(py.foot);
    let bound = CONTRACTING_BOUND + CONTRACTING_SLACK;
    if p.param < q.param && contracting_diagnostics(gamma, x, y, p.foot, q.foot).holds(bound) {
        return Ok((p.foot, q.foot));
    }

    let samples = seg.sample(TOL.sampling_step);
    let p = samples.iter().copied().find(|&c| {
        dist(px.foot, c) < bound && projected_diameter(gamma, x, c, c) <= bound
    });
    let q = samples.iter().rev().copied().find(|&c| {
        dist(py.foot, c) < bound && projected_diameter(gamma, c, y, c) <= bound
    });
    match (p, q) {
        (Some(p), Some(q)) if contracting_diagnostics(gamma, x, y, p, q).holds(bound) => Ok((p, q)),
        _ => Err(Error::DecompositionNotFound),
    }
}

/// `|d(x, γ(s)) - d(x, γ(t)) - |t - s||` with `γ(t) = π_γ(x)`; at most 1.3.
pub fn projection_defect_check(gamma: &GeodesicH2, x: H2Point, s: f64) -> f64 {
    let pr = gamma.project(x);
    (dist(x, gamma.point_at(s)) - dist(x, pr.foot) - (pr.param - s).abs()).abs()
}

/// Empirical squeezing constant `L(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeEstimate {
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub samples: usize,
    /// Largest `d([x, y], γ(t))` over the trials at the returned `L`.
    pub worst_midpoint_distance: f64,
    pub cap_reached: bool,
    /// Largest four-point deviation observed at `L`; the bound is `8ε`.
    pub four_point_worst: f64,
    pub four_point_failures: usize,
}

const SQUEEZE_GRID: f64 = 0.25;
const SQUEEZE_CAP: f64 = 64.0;
const SQUEEZE_MAX_HEIGHT: f64 = 10.0;
const SQUEEZE_MAX_EXTRA: f64 = 2.0;

/// One squeezing trial on the imaginary axis with `t = 0`: offsets beyond
/// `L` and signed heights of `x`, `y` above their feet.
#[derive(Debug, Clone, Copy)]
struct SqueezeTrial {
    extra_a: f64,
    extra_b: f64,
    height_x: f64,
    height_y: f64,
}

impl SqueezeTrial {
    fn draw(rng: &mut impl Rng) -> Self {
        let mut h = || {
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            side * rng.random_range(0.0..SQUEEZE_MAX_HEIGHT)
        };
        let (height_x, height_y) = (h(), h());
        Self {
            extra_a: rng.random_range(0.0..SQUEEZE_MAX_EXTRA),
            extra_b: rng.random_range(0.0..SQUEEZE_MAX_EXTRA),
            height_x,
            height_y,
        }
    }

    fn midpoint_distance(&self, l: f64) -> f64 {
        let axis = GeodesicH2::imaginary_axis();
        let x = axis.offset_point(-(l + self.extra_a), self.height_x);
        let y = axis.offset_point(l + self.extra_b, self.height_y);
        SegmentH2::new(x, y).distance_to(H2Point::I)
    }
}

/// Smallest grid value `L` (step 0.25, cap 64) such that every seeded trial
/// with feet at `γ(t - a)`, `γ(t + b)`, `a, b ≥ L`, has `d([x, y], γ(t)) ≤ ε`;
/// the four-point consequence is then re-checked on fresh seeds.
///
/// By isometry invariance every trial uses `γ` = the imaginary axis and `t = 0`.
pub fn squeeze_estimate(epsilon: f64, trials: usize, seed: u64) -> Result<SqueezeEstimate> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1]")));
    }
    let draws: Vec<SqueezeTrial> = (0..trials)
        .map(|j| SqueezeTrial::draw(&mut trial_rng(seed, j as u64)))
        .collect();
    let mut l = 0.0;
    let mut cap_reached = false;
    let worst = loop {
        let worst = draws.iter().fold(0.0f64, |m, t| m.max(t.midpoint_distance(l)));
        if worst <= epsilon {
            break worst;
        }
        if l >= SQUEEZE_CAP {
            cap_reached = true;
            break worst;
        }
        l += SQUEEZE_GRID;
    };
    let (four_point_worst, four_point_failures) =
        four_point_check(epsilon, l, trials, seed.wrapping_add(0x5EED_F00D));
    Ok(SqueezeEstimate {
        epsilon,
        l,
        samples: trials,
        worst_midpoint_distance: worst,
        cap_reached,
        four_point_worst,
        four_point_failures,
    })
}

/// Checks `d(x₁,y₁) - d(x₁,y₂) =_{8ε} d(x₂,y₁) - d(x₂,y₂)` for feet of `xᵢ`
/// in `γ((-∞, -L])` and of `yᵢ` in `γ([L, ∞))`. Returns (worst deviation, failures).
pub fn four_point_check(epsilon: f64, l: f64, trials: usize, seed: u64) -> (f64, usize) {
    let axis = GeodesicH2::imaginary_axis();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for j in 0..trials {
        let mut rng = trial_rng(seed, j as u64);
        let mut point = |sign: f64| {
            let s = sign * (l + rng.random_range(0.0..3.0));
            let h = rng.random_range(-SQUEEZE_MAX_HEIGHT..SQUEEZE_MAX_HEIGHT);
            axis.offset_point(s, h)
        };
        let (x1, x2, y1, y2) = (point(-1.0), point(-1.0), point(1.0), point(1.0));
        let dev = ((dist(x1, y1) - dist(x1, y2)) - (dist(x2, y1) - dist(x2, y2))).abs();
        worst = worst.max(dev);
        if dev > 8.0 * epsilon {
            failures += 1;
        }
    }
    (worst, failures)
}

/// Checks both directions of the shadow/alignment correspondence:
///
/// - forward: `w ∈ O_R(x, y) ∩ O_R(y, z)` ⇒ `(x, [y, z], w)` is 6R-aligned;
/// - backward: `(x, [y, z], w)` R-aligned and `d(y, z) > 3R` ⇒ `w ∈ O_{3R}(x, y) ∩ O_{3R}(y, z)`.
///
/// An implication with a false antecedent counts as satisfied.
pub fn verify_shadow_alignment(
    x: H2Point,
    y: H2Point,
    z: H2Point,
    w: H2Point,
    radius: f64,
) -> Result<(bool, bool)> {
    Ok(shadow_alignment_detail(x, y, z, w, radius)?.outcome())
}

/// Antecedents and consequents behind [`verify_shadow_alignment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowAlignmentDetail {
    pub forward_antecedent: bool,
    pub forward_consequent: bool,
    pub backward_antecedent: bool,
    pub backward_consequent: bool,
}

impl ShadowAlignmentDetail {
    pub fn outcome(&self) -> (bool, bool) {
        (
            !self.forward_antecedent || self.forward_consequent,
            !self.backward_antecedent || self.backward_consequent,
        )
    }
}

pub fn shadow_alignment_detail(
    x: H2Point,
    y: H2Point,
    z: H2Point,
    w: H2Point,
    radius: f64,
) -> Result<ShadowAlignmentDetail> {
    if !(radius > 1.0) {
        return Err(Error::RadiusTooSmall(radius));
    }
    let seg = SegmentH2::new(y, z);
    let (xe, we) = (ExtendedPoint::Interior(x), ExtendedPoint::Interior(w));
    let forward_antecedent = shadow_contains(x, y, radius, we) && shadow_contains(y, z, radius, we);
    let forward_consequent = is_aligned_triple(xe, &seg, we, 6.0 * radius)?;
    let backward_antecedent = is_aligned_triple(xe, &seg, we, radius)? && dist(y, z) > 3.0 * radius;
    let backward_consequent =
        shadow_contains(x, y, 3.0 * radius, we) && shadow_contains(y, z, 3.0 * radius, we);
    Ok(ShadowAlignmentDetail {
        forward_antecedent,
        forward_consequent,
        backward_antecedent,
        backward_consequent,
    })
}

/// Constant `C(g, γ, x₀)` for a loxodromic `g` with axis `γ`.
#[derive(Debug, Clone, Copy)]
pub struct AxisConstant {
    #[doc(alias = "C")]
    pub c: f64,
    /// `max_{|k| ≤ kmax} d(gᵏx₀, γ(τk + s₀))`, before the margin.
    pub orbit_bound: f64,
    pub generator: Isometry,
    pub axis: GeodesicH2,
    pub basepoint: H2Point,
    /// Axis parameter of `π_γ(x₀)`.
    pub base_param: f64,
    pub translation_length: f64,
    pub kmax: u32,
}

const AXIS_MARGIN: f64 = 0.1;
const AXIS_SAMPLES: usize = 400;
const AXIS_SEED: u64 = 0xA515;

/// Worst violation of the two projection statements for a candidate `c`:
/// how much larger `c` would have to be for every sample to pass.
#[allow(clippy::too_many_arguments)]
fn axis_violation(
    g: &Isometry,
    axis: &GeodesicH2,
    x0: H2Point,
    s0: f64,
    tau: f64,
    kmax: u32,
    c: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut need = 0.0f64;
    for j in 0..samples {
        let mut rng = trial_rng(seed, j as u64);
        let k = rng.random_range(1..=kmax.max(1));
        let seg = SegmentH2::new(x0, g.pow(k as i64).apply(x0));
        if seg.is_degenerate() {
            continue;
        }
        let s = s0 + rng.random_range(-4.0..tau * k as f64 + 4.0);
        let h = rng.random_range(-6.0..6.0);
        let x = axis.offset_point(s, h);
        let rel = axis.project(x).param - s0;
        let defect = dist(seg.project(x).foot, x0);
        // not K-aligned (defect >= K) with K ≥ C forces rel ≥ K - C
        let k_hi = c + rng.random_range(0.0..tau * k as f64);
        if defect >= k_hi && rel < k_hi - c {
            need = need.max(k_hi - c - rel);
        }
        // K-aligned (defect < K) with 0 ≤ K ≤ τk - C forces rel ≤ K + C
        if tau * k as f64 - c > 0.0 {
            let k_lo = rng.random_range(0.0..tau * k as f64 - c);
            if defect < k_lo && rel > k_lo + c {
                need = need.max(rel - k_lo - c);
            }
        }
    }
    need
}

/// `C = max_{|k| ≤ kmax} d(gᵏx₀, γ(τk + s₀)) + 0.1`, raised if needed so that
/// the two projection statements for `[x₀, gᵏx₀]` hold on seeded samples.
pub fn axis_constant(g: &Isometry, basepoint: H2Point, kmax: u32) -> Result<AxisConstant> {
    let data = g.loxodromic_data()?;
    let axis = data.axis;
    let tau = data.translation_length;
    let s0 = axis.project(basepoint).param;
    let kmax_i = kmax as i64;
    let orbit_bound = (-kmax_i..=kmax_i)
        .map(|k| dist(g.pow(k).apply(basepoint), axis.point_at(tau * k as f64 + s0)))
        .fold(0.0f64, f64::max);
    let mut c = orbit_bound + AXIS_MARGIN;
    for _ in 0..32 {
        let need = axis_violation(g, &axis, basepoint, s0, tau, kmax, c, AXIS_SAMPLES, AXIS_SEED);
        if need == 0.0 {
            break;
        }
        c += need + AXIS_MARGIN;
    }
    Ok(AxisConstant {
        c,
        orbit_bound,
        generator: *g,
        axis,
        basepoint,
        base_param: s0,
        translation_length: tau,
        kmax,
    })
}

impl AxisConstant {
    /// Largest shortfall of `C` for the two projection statements on fresh
    /// seeded samples; 0 when every sample passes.
    pub fn shortfall(&self, samples: usize, seed: u64) -> f64 {
        axis_violation(
            &self.generator,
            &self.axis,
            self.basepoint,
            self.base_param,
            self.translation_length,
            self.kmax,
            self.c,
            samples,
            seed,
        )
    }

    /// Orbit bound recomputed for `gᵏ` on the same axis and basepoint.
    ///
    /// In the axis frame `gᵏ` is the translation by `kτ` along the imaginary
    /// axis; a matrix power would lose the small diagonal entry to rounding
    /// in the off-diagonal ones.
    pub fn orbit_bound_for_power(&self, power: i64) -> f64 {
        let x0 = self.axis.frame().inverse().apply(self.basepoint);
        let tau = self.translation_length * power as f64;
        let kmax = self.kmax as i64;
        (-kmax..=kmax)
            .map(|k| {
                let shift = tau * k as f64;
                let image = Isometry::axial_translation(shift).apply(x0);
                dist(image, H2Point::new_unchecked(0.0, (shift + self.base_param).exp()))
            })
            .fold(0.0f64, f64::max)
    }
}

/// First candidate `a` for which `(x, a·[x₀, φⁿx₀], aφⁿa·y)` is α-aligned in
/// the first factor.
pub fn extension_select(
    phi: &ProductIsometry,
    candidates: &[ProductIsometry],
    x: &ProductTarget,
    y: &ProductTarget,
    basepoint: &ProductPoint,
    n: u32,
    alpha: f64,
) -> Result<usize> {
    let bad: Vec<usize> = phi
        .0
        .iter()
        .enumerate()
        .filter(|(_, g)| g.translation_length().is_err())
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::NotJointlyLoxodromic { factors: bad });
    }
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidates".into()));
    }
    let x0 = basepoint.0[0];
    let phi_n = phi.0[0].pow(n as i64);
    for (idx, cand) in candidates.iter().enumerate() {
        let a = cand.0[0];
        let seg = SegmentH2::new(a.apply(x0), (a * phi_n).apply(x0));
        if seg.is_degenerate() {
            continue;
        }
        let z = (a * phi_n * a).apply_extended(y.component(0));
        if is_aligned_triple(x.component(0), &seg, z, alpha)? {
            return Ok(idx);
        }
    }
    Err(Error::NoCandidateAligns)
}

/// Hausdorff distance between two compact segments, from samples of each.
pub fn hausdorff_distance(a: &SegmentH2, b: &SegmentH2) -> f64 {
    let one_way = |s: &SegmentH2, t: &SegmentH2| {
        s.sample(TOL.sampling_step)
            .into_iter()
            .fold(0.0f64, |m, p| m.max(t.distance_to(p)))
    };
    one_way(a, b).max(one_way(b, a))
}

/// Reference value quoted for the altitude of the π/2–0–0 triangle,
/// `2·tanh⁻¹(1 - 1/√2) ≈ 0.60346`.
pub fn appendix_reference_constant() -> f64 {
    2.0 * (1.0 - 0.5f64.sqrt()).atanh()
}

/// Distance from the right-angle vertex of a π/2–0–0 triangle to the opposite side.
///
/// The triangle has finite vertex `i` and ideal vertices `∞` and `1`: the
/// ray to `∞` leaves `i` vertically and the ray to `1` (along the unit
/// circle) horizontally. The opposite side is the line `Re z = 1`.
pub fn right_angle_ideal_triangle_altitude() -> f64 {
    let side = GeodesicH2::new(BoundaryPoint::Finite(1.0), BoundaryPoint::Infinity)
        .expect("distinct endpoints");
    side.distance_to(H2Point::I)
}
