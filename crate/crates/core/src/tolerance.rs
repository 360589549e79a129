//! Numeric tolerances shared by every module, collected in one record.

/// Tolerances used across the crate. [`TOL`] holds the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of `ad - bc` from 1 (relative to the entry scale).
    pub determinant: f64,
    /// Up-to-sign matrix equality.
    pub sign_equality: f64,
    /// `| |tr| - 2 |` below this is treated as parabolic or identity.
    pub parabolic_trace: f64,
    /// Successive feet closer than this end the boundary-projection iteration.
    pub boundary_projection: f64,
    /// Ray parameter at which the boundary-projection iteration gives up.
    pub boundary_projection_cap: f64,
    /// Arclength step used when sampling segments for diameter estimates.
    pub sampling_step: f64,
    /// Matrix deduplication tolerance (relative to the entry scale).
    pub dedup: f64,
    /// Component-wise tolerance for antipodality of attracting tuples.
    pub antipodal: f64,
    /// Deduplication of translation-length vectors.
    pub spectrum_dedup: f64,
}

pub const TOL: Tolerances = Tolerances {
    determinant: 1e-12,
    sign_equality: 1e-9,
    parabolic_trace: 1e-9,
    boundary_projection: 1e-9,
    boundary_projection_cap: 65536.0,
    sampling_step: 0.01,
    dedup: 1e-9,
    antipodal: 1e-6,
    spectrum_dedup: 1e-9,
};
