use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{enumerate_ball, Ball, GroupSpec};
use crate::product::VectorR;

/// A linear form `ψ` on `ℝʳ`, acting by dot product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm(VectorR);

impl LinearForm {
    /// Rejects empty, non-finite and all-zero coefficient vectors.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("linear form {coefficients:?}")));
        }
        if coefficients.iter().all(|c| *c == 0.0) {
            return Err(Error::InvalidParameter("linear form is zero".into()));
        }
        Ok(Self(VectorR(coefficients)))
    }

    /// The zero form; only meaningful where a degenerate density is wanted.
    pub fn zero(r: usize) -> Self {
        Self(VectorR::zeros(r))
    }

    /// Parses `a,b,…`.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad coefficient `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn coefficients(&self) -> &VectorR {
        &self.0
    }

    pub fn eval(&self, v: &VectorR) -> f64 {
        self.0.dot(v)
    }

    pub fn check_dim(&self, r: usize) -> Result<()> {
        if self.dim() == r {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: r,
                got: self.dim(),
            })
        }
    }
}

/// `Σ_{|g| ≤ L} e^{-s ψ(κ(g))}`.
pub fn poincare_partial(spec: &GroupSpec, psi: &LinearForm, s: f64, l: usize) -> Result<f64> {
    psi.check_dim(spec.r())?;
    let ball = enumerate_ball(spec, l)?;
    Ok(poincare_partial_of(&ball, psi, s, l))
}

/// Partial sum over a precomputed ball, accumulated in enumeration order.
pub fn poincare_partial_of(ball: &Ball, psi: &LinearForm, s: f64, l: usize) -> f64 {
    ball.upto(l)
        .iter()
        .map(|e| (-s * psi.eval(&e.cartan)).exp())
        .sum()
}

/// Width of the `T` buckets in the growth fit.
pub const BUCKET_WIDTH: f64 = 0.25;
/// Fraction of buckets dropped at the low end of the fit window.
pub const DROP_LOW: f64 = 0.2;
/// Fraction of buckets dropped at the high end.
pub const DROP_HIGH: f64 = 0.1;
pub const MIN_FIT_BUCKETS: usize = 8;
/// Minimum word length accepted by [`critical_exponent`].
pub const MIN_FIT_LENGTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponent {
    pub delta: f64,
    pub divergence_type_evidence: bool,
    pub word_length: usize,
    /// Largest `T` for which `{ψ(κ(g)) ≤ T}` is taken as complete in the ball.
    pub horizon: f64,
    pub fit_buckets: usize,
    /// `(T, ln #{g : ψ(κ(g)) ≤ T})` inside the fit window.
    pub fit_points: Vec<(f64, f64)>,
    pub partial_sum: f64,
    pub partial_sum_previous: f64,
}

pub fn critical_exponent(spec: &GroupSpec, psi: &LinearForm, lmax: usize) -> Result<CriticalExponent> {
    psi.check_dim(spec.r())?;
    if lmax < MIN_FIT_LENGTH {
        return Err(Error::InsufficientGrowthData(format!(
            "word length {lmax} is below {MIN_FIT_LENGTH}"
        )));
    }
    let ball = enumerate_ball(spec, lmax)?;
    critical_exponent_of(&ball, psi, lmax)
}

/// Least-squares slope of `ln N(T)` against `T`, `N(T) = #{g : ψ(κ(g)) ≤ T}`.
///
/// The horizon is the smallest `ψ(κ)` on the outermost sphere: below it the
/// counts are not truncated by the word-length cut. Buckets of width
/// [`BUCKET_WIDTH`] up to the horizon are trimmed by [`DROP_LOW`] and
/// [`DROP_HIGH`] before fitting.
pub fn critical_exponent_of(ball: &Ball, psi: &LinearForm, lmax: usize) -> Result<CriticalExponent> {
    let lmax = lmax.min(ball.radius());
    if lmax < MIN_FIT_LENGTH {
        return Err(Error::InsufficientGrowthData(format!(
            "word length {lmax} is below {MIN_FIT_LENGTH}"
        )));
    }
    let horizon = ball
        .sphere(lmax)
        .iter()
        .map(|e| psi.eval(&e.cartan))
        .fold(f64::INFINITY, f64::min);
    let mut values: Vec<f64> = ball.upto(lmax).iter().map(|e| psi.eval(&e.cartan)).collect();
    values.sort_by(f64::total_cmp);
    let n_buckets = if horizon.is_finite() && horizon > 0.0 {
        (horizon / BUCKET_WIDTH).floor() as usize
    } else {
        0
    };
    let lo = (DROP_LOW * n_buckets as f64).ceil() as usize;
    let hi = n_buckets - (DROP_HIGH * n_buckets as f64).ceil() as usize;
    let fit_points: Vec<(f64, f64)> = (lo.max(1)..=hi)
        .map(|j| {
            let t = j as f64 * BUCKET_WIDTH;
            let count = values.partition_point(|v| *v <= t);
            (t, (count as f64).ln())
        })
        .collect();
    if fit_points.len() < MIN_FIT_BUCKETS {
        return Err(Error::InsufficientGrowthData(format!(
            "{} buckets in the fit window, need {MIN_FIT_BUCKETS}",
            fit_points.len()
        )));
    }
    let delta = slope(&fit_points).max(0.0);
    let partial_sum = poincare_partial_of(ball, psi, delta, lmax);
    let partial_sum_previous = poincare_partial_of(ball, psi, delta, lmax - 2);
    Ok(CriticalExponent {
        delta,
        divergence_type_evidence: partial_sum >= 1.05 * partial_sum_previous,
        word_length: lmax,
        horizon,
        fit_buckets: fit_points.len(),
        fit_points,
        partial_sum,
        partial_sum_previous,
    })
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
