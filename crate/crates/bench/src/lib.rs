//! Shared fixtures for the criterion benchmarks.

use dressing_core::dressing::{dress, seed_set, BoundStateSpec, DressedSystem, SeedSet};
use dressing_core::numerics::Grid;
use dressing_core::schrodinger::PotentialModel;

pub fn working_grid() -> Grid {
    Grid::default_domain()
}

pub fn free_base() -> PotentialModel {
    PotentialModel::zero(working_grid())
}

pub fn specs(n: usize) -> Vec<BoundStateSpec> {
    let all = [
        BoundStateSpec::new(1.0, std::f64::consts::SQRT_2),
        BoundStateSpec::new(2.0, 1.0),
        BoundStateSpec::new(0.5, 1.0),
    ];
    all[..n].to_vec()
}

pub fn seeds(n: usize) -> SeedSet {
    seed_set(&free_base(), &specs(n)).expect("valid seeds")
}

pub fn dressed(n: usize) -> DressedSystem {
    dress(&free_base(), &seeds(n)).expect("dressing succeeds")
}
