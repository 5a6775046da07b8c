//! Loewner evolution with a uniformly rotating attracting point
//! `τ(t) = e^{ikt}`.
//!
//! The evolution `φ_t` solves the non-autonomous field
//! `(τ − φ)²/τ · p̃(φ/τ)`; in the rotating frame `ψ_t = φ_t/τ(t)` the field
//! becomes the autonomous generator `(ψ − 1)²p̃(ψ) − ikψ`, whose zeros,
//! discriminant and orbit structure are analysed in [`classify`] and
//! [`fixed_point`].

pub mod classify;
pub mod evolve;
pub mod fixed_point;

pub use classify::{
    classify_semigroup, implicit_solution_residual, is_closed_trajectory, ClassificationResult, ClosedOrbit,
    SemigroupKind,
};
pub use evolve::{
    boundary_image, evolve_phi, evolve_psi, example1_denjoy_wolff, example1_phi, example1_psi, example1_reference,
    BoundaryImage, EvolutionConfig, Example1,
};
pub use fixed_point::{
    boundary_fixed_point_residual, boundary_fixed_points, find_fixed_point, koebe_inverse, koebe_map, Koebe,
};
