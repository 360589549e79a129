//! Finitely generated subgroups of `Isom(H² × ⋯ × H²)`: word balls, Cartan and
//! Jordan projections, length spectra, limit cones, transversality
//! diagnostics and limit-point witnesses.

mod ball;
mod spec;

pub use ball::{ball_cap, enumerate_ball, enumerate_ball_with_cap, Ball, GroupElement, BALL_CAP_ENV, DEFAULT_BALL_CAP};
pub use spec::{GroupSpec, Letter};
mod lattice;
mod spectrum;
mod transverse;

pub use lattice::{
    non_arithmeticity_report, non_arithmeticity_report_with_depth, NonArithmeticityReport,
    DEFAULT_REDUCTION_DEPTH, REDUCTION_POOL,
};
pub use spectrum::{
    boundary_angle_gap, cartan_projection, dedup_vectors, fixed_tuples, jordan_of, jordan_projection,
    length_spectrum, length_spectrum_of, limit_cone_of, limit_cone_sample, SpectrumSample,
};
pub use transverse::{
    componentwise_shadow_diagnostic, conical_witness, conical_witness_in, div_factors_diagnostic,
    guided_witness, guided_witness_in, shadow_constant_stable, transversality_check, transversality_of,
    ComponentShadowEntry, DivFactorsEntry, TransversalityReport, TransversalityWitness, GROWTH_FLOOR_FACTOR,
    SHADOW_PAIR_PREFIX,
};
