//! Loewner evolution driven by a Brownian boundary point `τ(t) = e^{ikB_t}`.
//!
//! `φ_t` solves a random ODE pathwise; the rotated process `Ψ_t = φ_t/τ(t)`
//! is the Itô diffusion `dΨ = −ikΨ dB + (−k²/2·Ψ + (Ψ − 1)²p̃(Ψ)) dt`.
//! Expectations over paths are Monte Carlo estimates reproducible from a
//! root seed.

pub mod brownian;
pub mod covariance;
pub mod generator;
pub mod moments;
pub mod montecarlo;
pub mod pathwise;
pub mod polar;

pub use brownian::{path_seed, sample_brownian, sample_brownian_until, BrownianPath, ALGORITHM_ID};
pub use covariance::{
    characteristic_monte_carlo, covariance_monte_carlo, covariance_reference, ito_defect_rms, ito_product_defect,
    CovarianceEstimate, CovarianceReference,
};
pub use generator::{
    apply_generator, apply_generator_numeric, backward_equation_residual, cauchy_derivatives, drift,
    find_stochastic_zero, virasoro_coefficients, BackwardResidual, VirasoroForm,
};
pub use moments::{mu1_closed_form, solve_moment_hierarchy, Closure, MomentRequest, MomentTable};
pub use montecarlo::{
    expectation_tt, map_paths, pairwise_sum, EstimateRecord, McConfig, McEstimate, McManifest, PsiSampler,
};
pub use pathwise::{
    evolve_phi_pathwise, evolve_psi_sde, example1_pathwise, mean_phi_example1, psi_from_phi, SdeScheme,
};
pub use polar::{
    boundary_drift, evolve_polar, generator_annihilator, growth_bounds, radial_solution, simulate_boundary_diffusion,
    GrowthSpec, PolarTrajectory,
};
