//! Seeded random configurations used by the verification suites.
//!
//! Distributions:
//! - points: `re ~ N(0, 2²)`, `im = |N(0, 2²)|` clipped to `[0.05, 20]`;
//! - boundary points: `N(0, 2²)`, or `∞` with probability 1/20;
//! - geodesics: two independent boundary points (redrawn if equal);
//! - isometries: Gaussian 2×2 matrix, sign-fixed to positive determinant, normalized.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::plane::{BoundaryPoint, GeodesicH2, H2Point, Isometry};

/// Independent stream per `(seed, trial)` so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn normal(rng: &mut impl Rng, sd: f64) -> f64 {
    Normal::new(0.0, sd).expect("positive sd").sample(rng)
}

pub fn random_point(rng: &mut impl Rng) -> H2Point {
    let re = normal(rng, 2.0);
    let im = normal(rng, 2.0).abs().clamp(0.05, 20.0);
    H2Point::new(re, im).expect("clipped to the half-plane")
}

pub fn random_boundary_point(rng: &mut impl Rng) -> BoundaryPoint {
    if rng.random_bool(0.05) {
        BoundaryPoint::Infinity
    } else {
        BoundaryPoint::Finite(normal(rng, 2.0))
    }
}

pub fn random_geodesic(rng: &mut impl Rng) -> GeodesicH2 {
    loop {
        let a = random_boundary_point(rng);
        let b = random_boundary_point(rng);
        if let Ok(g) = GeodesicH2::new(a, b) {
            return g;
        }
    }
}

pub fn random_isometry(rng: &mut impl Rng) -> Isometry {
    loop {
        let (a, mut b, c, mut d) = (
            normal(rng, 1.0),
            normal(rng, 1.0),
            normal(rng, 1.0),
            normal(rng, 1.0),
        );
        let det = a * d - b * c;
        if det.abs() < 1e-3 {
            continue;
        }
        if det < 0.0 {
            b = -b;
            d = -d;
        }
        if let Ok(g) = Isometry::normalized(a, b, c, d) {
            return g;
        }
    }
}

/// A conjugate of an axial translation with length uniform in `[min_tau, max_tau]`.
pub fn random_loxodromic(rng: &mut impl Rng, min_tau: f64, max_tau: f64) -> Isometry {
    let tau = rng.random_range(min_tau..=max_tau);
    Isometry::axial_translation(tau).conjugate_by(&random_isometry(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<f64> = (0..3).map(|_| trial_rng(7, 3).random()).collect();
        let b: Vec<f64> = (0..3).map(|_| trial_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        let x: f64 = trial_rng(7, 3).random();
        let y: f64 = trial_rng(7, 4).random();
        assert_ne!(x, y);
    }

    #[test]
    fn points_respect_clipping() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..1000 {
            let p = random_point(&mut rng);
            assert!((0.05..=20.0).contains(&p.im()));
        }
    }
}
