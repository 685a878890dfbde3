//! Synthetic Weyl semimetal in a one-dimensional chain of coupled resonators.
//!
//! Two periodically tunable control angles, θ1 (hoppings) and θ2 (on-site
//! shifts), act as extra momenta alongside the lattice momentum kx. The
//! crate covers the resulting band structure and Weyl nodes ([`model`]),
//! their monopole charges ([`topology`]), open-chain edge states and Fermi
//! arcs ([`openchain`]), and the reflection-based readout of both
//! ([`spectroscopy`]), on top of small dense kernels ([`numerics`]).

pub mod error;
pub mod model;
pub mod numerics;
pub mod openchain;
pub mod spectroscopy;
pub mod topology;

pub use error::{Error, Result};
pub use model::{
    bulk_bands, coupling_profile, d_vector, dispersive_map, linearize, onsite_profile, open_chain_hamiltonian,
    weyl_points, Axis, DVector, ModelParams, SyntheticMomentum, WeylLabel, WeylPoint,
};
pub use numerics::{eigh_tridiagonal, solid_angle, solve_complex, unwrap_winding, ComplexMatrix, TridiagonalSym};
pub use openchain::{
    arc_interval_oracle, classify_localization, density_profile, edge_spectrum, ArcInterval, DensityProfile,
    EdgeSpectrumPoint, Localization,
};
pub use spectroscopy::{
    detect_arc_endpoint, reflection, reflection_spectrum, steady_state, transient_oracle, winding_measurement,
    ArcDetection, DriveVector, ReflectionTrace, SteadyState, WindingLoop, WindingMeasurement,
};
pub use topology::{
    berry_curvature_numeric, berry_curvature_weyl, chern_mapped_torus, chern_sphere, BerryField, ChernResult,
    MappedChern,
};
