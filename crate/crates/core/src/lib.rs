//! Bound-state dressing of one-dimensional Schrodinger potentials.
//!
//! The crate builds potentials with prescribed discrete spectra from a base
//! potential with none, evolves them in parameter time through weight
//! schedules acting on the seed solutions, and verifies the web of
//! identities tying the construction together: Wronskian relations, kernel
//! reconstruction, scattering product laws, density and hierarchy
//! recursions, and the Green's-function ladder.
//!
//! Modules follow the pipeline:
//! - [`numerics`]: grid, derivatives, quadrature, tails
//! - [`schrodinger`]: decaying solutions, shooting oracle, scattering
//! - [`dressing`]: the matrix field construction and its inverse
//! - [`evolution`]: weight schedules, snapshots, hierarchy checks
//! - [`greens`]: solution-pair Green's functions and the resolvent ladder

pub mod dressing;
pub mod error;
pub mod evolution;
pub mod greens;
mod linalg;
pub mod numerics;
pub mod report;
pub mod schrodinger;

pub use error::{Error, Result};
pub use numerics::{
    make_grid, ComplexSampledFunction, Grid, Kernel2D, SampledFunction, TailModel,
};
pub use report::ResidualReport;
pub use schrodinger::{EigenResult, PotentialModel, ScatteringAmplitudes};

pub use dressing::{BoundStateSpec, DressedSystem, KernelK, SeedSet, SeedSource, Undressed};
pub use evolution::{AlphaSchedule, EvolutionSnapshot, HierarchyFamily, HierarchyKind};
pub use greens::{GreensDiagonal, GreensHierarchy};
