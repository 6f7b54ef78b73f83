//! Bidirectional shooting oracle for the discrete spectrum.
//!
//! At a trial energy `E = -gamma^2` the solver marches a solution growing
//! from each edge (each decays toward its own infinity) and evaluates their
//! Wronskian at a matching node. The Wronskian has a simple zero exactly at
//! the eigenvalues, so a scan in gamma brackets sign changes and bisection
//! refines them to the requested energy tolerance.

use crate::error::{Error, Result};
use crate::schrodinger::numerov::{march_from_left, march_from_right, Marched};
use crate::schrodinger::{q_at_energy, EigenResult, PotentialModel};

const GAMMA_FLOOR: f64 = 1e-2;
const SCAN_STEP: f64 = 0.005;
const MAX_BISECTIONS: usize = 200;

fn stencil_derivative(w: &[f64], h: f64) -> f64 {
    (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) / (12.0 * h)
}

/// Normalised Wronskian mismatch of the two one-sided solutions at the
/// matching node. Scale factors cancel, so only the sign and zero crossings
/// are meaningful.
fn mismatch(u: &PotentialModel, gamma: f64, match_node: usize) -> f64 {
    let grid = u.grid();
    let h = grid.spacing();
    let q = q_at_energy(u, -gamma * gamma);
    let n = grid.len();

    let left = march_from_left(&q, h, 1.0, (gamma * h).exp(), gamma * grid.node(0));
    let right = march_from_right(&q, h, 1.0, (gamma * h).exp(), -gamma * grid.node(n - 1));

    let norm_window = |m: &Marched| {
        let mut w = m.rebased_window(match_node, 2);
        let mx = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if mx > 0.0 {
            for v in &mut w {
                *v /= mx;
            }
        }
        w
    };
    let wl = norm_window(&left);
    let wr = norm_window(&right);
    let dl = stencil_derivative(&wl, h);
    let dr = stencil_derivative(&wr, h);
    wl[2] * dr - dl * wr[2]
}

/// All discrete eigenvalues in `(-gamma_max^2, 0)`, refined to tolerance
/// `tol` on the energy. Returns an empty result when no state exists.
pub fn shoot_bound_states(
    u: &PotentialModel,
    gamma_max: f64,
    tol: f64,
) -> Result<EigenResult> {
    if !(gamma_max > 0.0) {
        return Err(Error::NonPositiveGamma(gamma_max));
    }
    let grid = u.grid();
    let n = grid.len();

    // Match where the well is deepest; clamp away from the stencil edges.
    let min_node = u
        .samples()
        .values()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(n / 2)
        .clamp(4, n - 5);

    let mut gammas_found: Vec<f64> = Vec::new();
    if gamma_max <= GAMMA_FLOOR {
        return Ok(EigenResult {
            energies: vec![],
            gammas: vec![],
        });
    }

    let span = gamma_max - GAMMA_FLOOR;
    let steps = ((span / SCAN_STEP).ceil() as usize).max(40);
    let dg = span / steps as f64;

    let mut prev_g = GAMMA_FLOOR;
    let mut prev_w = mismatch(u, prev_g, min_node);
    for s in 1..=steps {
        let g = GAMMA_FLOOR + s as f64 * dg;
        let w = mismatch(u, g, min_node);
        if prev_w == 0.0 {
            gammas_found.push(prev_g);
        } else if w != 0.0 && prev_w.signum() != w.signum() {
            // bisect on gamma until the energy bracket is below tol
            let (mut a, mut b) = (prev_g, g);
            let mut wa = prev_w;
            for _ in 0..MAX_BISECTIONS {
                if (b * b - a * a).abs() < tol {
                    break;
                }
                let mid = 0.5 * (a + b);
                let wm = mismatch(u, mid, min_node);
                if wm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if wa.signum() != wm.signum() {
                    b = mid;
                } else {
                    a = mid;
                    wa = wm;
                }
            }
            gammas_found.push(0.5 * (a + b));
        }
        prev_g = g;
        prev_w = w;
    }

    // deepest state first: energies strictly increasing
    gammas_found.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let energies: Vec<f64> = gammas_found.iter().map(|g| -g * g).collect();
    Ok(EigenResult {
        energies,
        gammas: gammas_found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_state_of_unit_sech_well() {
        let u = PotentialModel::sech_well(Grid::default_domain(), 2.0, 1.0).unwrap();
        let r = shoot_bound_states(&u, 2.0, 1e-9).unwrap();
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r.energies[0], -1.0, epsilon = 1e-6);
    }

    #[test]
    fn barrier_has_no_bound_states() {
        let u = PotentialModel::gaussian_barrier(Grid::default_domain(), 0.5, 1.0).unwrap();
        let r = shoot_bound_states(&u, 2.0, 1e-9).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn two_state_reflectionless_well() {
        let u = PotentialModel::sech_well(Grid::default_domain(), 6.0, 1.0).unwrap();
        let r = shoot_bound_states(&u, 3.0, 1e-9).unwrap();
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r.energies[0], -4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.energies[1], -1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_non_positive_gamma_max() {
        let u = PotentialModel::zero(Grid::default_domain());
        assert!(shoot_bound_states(&u, 0.0, 1e-9).is_err());
    }

    #[test]
    fn scan_window_bounds_the_search() {
        // the state at E = -1 lies outside (-0.09, 0)
        let u = PotentialModel::sech_well(Grid::default_domain(), 2.0, 1.0).unwrap();
        let r = shoot_bound_states(&u, 0.3, 1e-9).unwrap();
        assert!(r.is_empty());
    }
}
