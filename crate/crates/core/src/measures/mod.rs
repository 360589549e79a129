//! Poincaré series, critical exponents, atomic conformal densities and
//! box measures on `∂Z × ℝʳ`.

mod density;
mod horo;
mod series;

pub use density::{
    cell_mass_difference, cell_masses, conformality_residual, conformality_residual_of, ps_density,
    ps_density_of, visual_endpoint, visual_tuple, Atom, AtomicMeasure, CellGrid, CellIndex, ResidualReport,
    ResidualRow, ATOM_MERGE_TOL, CELL_MASS_FLOOR, DEFAULT_CELLS, DEFAULT_S_OFFSET,
};
pub use horo::{
    br_box_measure, diagonal_boundary_point, essential_witness, essential_witness_in, translate_box,
    BoundaryCell, BoxRegion, EssentialWitness, HoroPoint,
};
pub use series::{
    critical_exponent, critical_exponent_of, poincare_partial, poincare_partial_of, CriticalExponent,
    LinearForm, BUCKET_WIDTH, DROP_HIGH, DROP_LOW, MIN_FIT_BUCKETS, MIN_FIT_LENGTH,
};
