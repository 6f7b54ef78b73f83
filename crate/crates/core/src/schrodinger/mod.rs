//! Direct Schrodinger-equation machinery: decaying solutions at negative
//! energies, a shooting eigenvalue oracle, scattering amplitudes and
//! Hamiltonian application. Units: hbar = 1, mass = 1/2, so
//! `H = -d^2/dx^2 + U` and bound states sit at `E = -gamma^2`.

pub mod numerov;
mod scattering;
mod shooting;

pub use scattering::{
    fit_plane_waves, left_edge_reflection, reflection_transmission, ScatteringAmplitudes,
};
pub use shooting::shoot_bound_states;

use crate::error::{Error, Result};
use crate::numerics::{differentiate, Grid, SampledFunction, TailModel};
use numerov::{march_from_right, Marched};

/// A real potential sampled on the grid, vanishing toward both edges.
#[derive(Clone, Debug)]
pub struct PotentialModel {
    samples: SampledFunction,
    left_tail: TailModel,
    right_tail: TailModel,
    label: String,
}

impl PotentialModel {
    pub fn from_samples(
        label: impl Into<String>,
        samples: SampledFunction,
        left_tail: TailModel,
        right_tail: TailModel,
    ) -> Self {
        PotentialModel {
            samples,
            left_tail,
            right_tail,
            label: label.into(),
        }
    }

    pub fn zero(grid: Grid) -> Self {
        PotentialModel {
            samples: SampledFunction::zeros(grid),
            left_tail: TailModel::None,
            right_tail: TailModel::None,
            label: "zero".to_string(),
        }
    }

    /// `U(x) = height * exp(-(x/width)^2)`.
    pub fn gaussian_barrier(grid: Grid, height: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::NonPositiveTailRate(width));
        }
        let samples = SampledFunction::from_fn(grid, |x| height * (-(x / width).powi(2)).exp())?;
        Ok(PotentialModel {
            samples,
            left_tail: TailModel::None,
            right_tail: TailModel::None,
            label: format!("gaussian_barrier(height={height},width={width})"),
        })
    }

    /// `U(x) = -depth / cosh^2(rate * x)`; the classic reflectionless well
    /// family when `depth = n(n+1) rate^2`.
    pub fn sech_well(grid: Grid, depth: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::NonPositiveTailRate(rate));
        }
        let samples = SampledFunction::from_fn(grid, |x| -depth / (rate * x).cosh().powi(2))?;
        Ok(PotentialModel {
            samples,
            left_tail: TailModel::None,
            right_tail: TailModel::None,
            label: format!("sech_well(depth={depth},rate={rate})"),
        })
    }

    pub fn grid(&self) -> Grid {
        self.samples.grid()
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn left_tail(&self) -> TailModel {
        self.left_tail
    }

    pub fn right_tail(&self) -> TailModel {
        self.right_tail
    }

    /// True when the potential is numerically indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        self.samples.max_abs() < 1e-14
    }

    /// Largest |U| over the 10-node band at each edge.
    pub fn edge_magnitude(&self) -> f64 {
        let v = self.samples.values();
        let n = v.len();
        let band = 10.min(n / 2);
        let mut m = 0.0f64;
        for i in 0..band {
            m = m.max(v[i].abs()).max(v[n - 1 - i].abs());
        }
        m
    }
}

/// Bound-state energies and decay rates found by the shooting oracle.
/// Energies are strictly increasing and negative; `gammas[i]` is
/// `sqrt(-energies[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub energies: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

pub(crate) fn q_at_energy(u: &PotentialModel, e: f64) -> Vec<f64> {
    u.samples().values().iter().map(|&v| v - e).collect()
}

/// Scaled solution decaying like `exp(-gamma x)` toward the right edge,
/// marched right-to-left. Grows exponentially toward the left and is
/// unnormalisable.
pub(crate) fn jost_decaying_right_scaled(u: &PotentialModel, gamma: f64) -> Result<Marched> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveGamma(gamma));
    }
    let grid = u.grid();
    let h = grid.spacing();
    let q = q_at_energy(u, -gamma * gamma);
    // seed at unit scale with the true magnitude in the log-scale, so the
    // starting values cannot underflow for steep decay rates
    Ok(march_from_right(
        &q,
        h,
        1.0,
        (gamma * h).exp(),
        -gamma * grid.node(grid.len() - 1),
    ))
}

/// Solution of `-phi'' + U phi = -gamma^2 phi` decaying as `exp(-gamma x)`
/// for large `x`, returned unnormalised with `phi(x_max) =
/// exp(-gamma x_max)` exactly.
pub fn jost_decaying_right(u: &PotentialModel, gamma: f64) -> Result<SampledFunction> {
    jost_decaying_right_scaled(u, gamma)?.collapse(u.grid())
}

/// Apply `H = -d^2/dx^2 + U` to a sampled function.
pub fn apply_hamiltonian(u: &PotentialModel, f: &SampledFunction) -> Result<SampledFunction> {
    if u.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let d2 = differentiate(f, 2)?;
    let uv = u.samples().values();
    let vals: Vec<f64> = d2
        .values()
        .iter()
        .zip(f.values())
        .zip(uv)
        .map(|((&dd, &fv), &uu)| -dd + uu * fv)
        .collect();
    SampledFunction::new(f.grid(), vals)
}

/// Residual of the defining equation `(-d^2/dx^2 + U + gamma^2) phi` over
/// interior nodes, scaled by the largest |phi| on the grid.
pub fn eigen_equation_residual(
    u: &PotentialModel,
    phi: &SampledFunction,
    energy: f64,
) -> Result<f64> {
    let hphi = apply_hamiltonian(u, phi)?;
    let scale = phi.max_abs().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in phi.grid().interior() {
        worst = worst.max((hphi.value(i) - energy * phi.value(i)).abs());
    }
    Ok(worst / scale)
}
