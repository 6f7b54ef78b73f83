//! High-order finite differences on the uniform grid.
//!
//! Interior nodes use fourth-order central stencils (5 points for the first
//! and second derivative, 7 for the third). Edge nodes fall back to shifted
//! windows of the same formal order; weights come from Fornberg's algorithm
//! so there is a single code path for every window shape.

use crate::error::{Error, Result};
use crate::numerics::SampledFunction;

/// Differentiation weights at evaluation point `z` for arbitrary nodes `x`,
/// derivative order `m` (Fornberg, Math. Comp. 51, 1988).
fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    (0..n).map(|i| c[i][m]).collect()
}

/// Window widths giving fourth-order accuracy for each derivative order:
/// (centred width, one-sided width).
fn window_widths(order: usize) -> (usize, usize) {
    match order {
        1 => (5, 5),
        2 => (5, 6),
        3 => (7, 7),
        _ => unreachable!(),
    }
}

/// Weights for a window of `width` nodes starting at grid offset `start`
/// relative to the evaluation node (so the evaluation point is `-start`
/// steps into the window).
fn window_weights(h: f64, width: usize, eval_pos: usize, order: usize) -> Vec<f64> {
    let offsets: Vec<f64> = (0..width)
        .map(|j| (j as isize - eval_pos as isize) as f64 * h)
        .collect();
    fornberg_weights(0.0, &offsets, order)
}

/// Derivative of order 1, 2 or 3, fourth-order accurate everywhere.
pub fn differentiate(f: &SampledFunction, order: usize) -> Result<SampledFunction> {
    if !(1..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let grid = f.grid();
    let n = grid.len();
    let h = grid.spacing();
    let (wc, we) = window_widths(order);
    let half = wc / 2;

    let central = window_weights(h, wc, half, order);
    // Edge classes: node i < half uses a window anchored at the left edge
    // with the evaluation point at position i; mirrored on the right.
    let left: Vec<Vec<f64>> = (0..half).map(|i| window_weights(h, we, i, order)).collect();
    let right: Vec<Vec<f64>> = (0..half)
        .map(|i| window_weights(h, we, we - 1 - (half - 1 - i), order))
        .collect();

    let v = f.values();
    let mut out = vec![0.0f64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let (weights, start) = if i < half {
            (&left[i], 0)
        } else if i + half >= n {
            (&right[half - 1 - (n - 1 - i)], n - we)
        } else {
            (&central, i - half)
        };
        let mut acc = 0.0;
        for (j, w) in weights.iter().enumerate() {
            acc += w * v[start + j];
        }
        *slot = acc;
    }
    SampledFunction::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_derivative_exact_for_quadratic() {
        let g = make_grid(-1.0, 1.0, 41).unwrap();
        let f = SampledFunction::from_fn(g, |x| x * x).unwrap();
        let d = differentiate(&f, 1).unwrap();
        for i in 2..39 {
            assert_abs_diff_eq!(d.value(i), 2.0 * g.node(i), epsilon = 1e-12);
        }
    }

    #[test]
    fn first_derivative_vanishes_at_even_symmetry_point() {
        let g = make_grid(-10.0, 10.0, 2001).unwrap();
        let f = SampledFunction::from_fn(g, |x| 1.0 / x.cosh()).unwrap();
        let d = differentiate(&f, 1).unwrap();
        assert_abs_diff_eq!(d.value(1000), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn third_derivative_of_sine_at_origin() {
        let g = make_grid(-30.0, 30.0, 6001).unwrap();
        let f = SampledFunction::from_fn(g, |x| x.sin()).unwrap();
        let d = differentiate(&f, 3).unwrap();
        assert_abs_diff_eq!(d.value(3000), -1.0, epsilon = 1e-7);
    }

    #[test]
    fn rejects_unsupported_order() {
        let g = make_grid(0.0, 1.0, 9).unwrap();
        let f = SampledFunction::zeros(g);
        assert!(matches!(
            differentiate(&f, 4),
            Err(Error::UnsupportedOrder(4))
        ));
        assert!(matches!(
            differentiate(&f, 0),
            Err(Error::UnsupportedOrder(0))
        ));
    }

    #[test]
    fn edge_stencils_exact_for_quartic() {
        // Fourth-order one-sided windows reproduce polynomials up to
        // degree 4 at every node, edges included.
        let g = make_grid(0.0, 2.0, 21).unwrap();
        let f = SampledFunction::from_fn(g, |x| x.powi(4) - 2.0 * x.powi(3) + x).unwrap();
        let d1 = differentiate(&f, 1).unwrap();
        let d2 = differentiate(&f, 2).unwrap();
        let d3 = differentiate(&f, 3).unwrap();
        for i in 0..21 {
            let x = g.node(i);
            assert_abs_diff_eq!(d1.value(i), 4.0 * x.powi(3) - 6.0 * x * x + 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(d2.value(i), 12.0 * x * x - 12.0 * x, epsilon = 1e-7);
            assert_abs_diff_eq!(d3.value(i), 24.0 * x - 12.0, epsilon = 1e-5);
        }
    }
}
