//! Generators, prolongation and symmetry checks.

mod check;
mod generator;
mod prolong;
mod system;

pub use check::{
    conditional_symmetry_check, flow_orbit_check, infinitesimal_symmetry_check, invariant_surface_conditions,
    partial_symmetry_check, symmetry_terms, PartialSymmetryReport,
};
pub use generator::{commutator, compare_fields, FieldKind, GeneratorField};
pub use prolong::{prolong, prolong_via_characteristic, Prolongation, MAX_PROLONGATION_ORDER};
pub use system::{expr_scaled_residual, EquationSystem, JetSampling, SolveRule, MIN_PIVOT};
