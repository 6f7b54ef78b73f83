//! Trapezoid quadrature and cumulative integrals with analytic tails.
//!
//! Whole-grid integrals use the plain composite rule; for decaying
//! integrands the end corrections vanish and the rule is effectively
//! spectral. Cumulative integrals anchor at a grid edge where the endpoint
//! sits mid-support, so they carry the first Euler-Maclaurin correction
//! (h^2/12 times the derivative difference) to stay node-aligned without
//! losing accuracy.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{differentiate, ComplexSampledFunction, SampledFunction, TailModel};

/// Compensated accumulator. The running sums feed quantities that later go
/// through stacked difference stencils, where the random-walk rounding of a
/// plain sum over thousands of nodes becomes the accuracy floor.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Composite trapezoid over the whole grid, fixed accumulation order.
pub fn integrate_full(f: &SampledFunction) -> f64 {
    let v = f.values();
    let n = v.len();
    let mut acc = Kahan::default();
    acc.add(0.5 * (v[0] + v[n - 1]));
    for &x in &v[1..n - 1] {
        acc.add(x);
    }
    acc.value() * f.grid().spacing()
}

/// Trapezoid quadrature of the product `f * g`; both on the same grid.
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let a = f.values();
    let b = g.values();
    let n = a.len();
    let mut acc = Kahan::default();
    acc.add(0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]));
    for i in 1..n - 1 {
        acc.add(a[i] * b[i]);
    }
    Ok(acc.value() * f.grid().spacing())
}

/// Cumulative integral anchored at plus infinity:
/// `result(x) = -(integral of f from x to x_max) - tail`,
/// where `tail` closes the integral beyond the right edge.
///
/// Equivalently this is the integral of `f` from infinity down to `x`.
pub fn cumulative_integral_from_right(
    f: &SampledFunction,
    tail: TailModel,
) -> Result<SampledFunction> {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.spacing();
    let corr = h * h / 12.0;
    let fp = differentiate(f, 1)?;
    let v = f.values();
    let dp = fp.values();
    let tail_int = tail.integral();

    let mut out = vec![0.0f64; n];
    // running trapezoid of the integral from x_i to x_max
    let mut trap = Kahan::default();
    out[n - 1] = -tail_int;
    for i in (0..n - 1).rev() {
        trap.add(0.5 * h * (v[i] + v[i + 1]));
        let segment = trap.value() - corr * (dp[n - 1] - dp[i]);
        out[i] = -segment - tail_int;
    }
    SampledFunction::new(grid, out)
}

/// Cumulative integral anchored at minus infinity:
/// `result(x) = tail + integral of f from x_min to x`.
pub fn cumulative_integral_from_left(
    f: &SampledFunction,
    tail: TailModel,
) -> Result<SampledFunction> {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.spacing();
    let corr = h * h / 12.0;
    let fp = differentiate(f, 1)?;
    let v = f.values();
    let dp = fp.values();
    let tail_int = tail.integral();

    let mut out = vec![0.0f64; n];
    out[0] = tail_int;
    let mut trap = Kahan::default();
    for i in 1..n {
        trap.add(0.5 * h * (v[i - 1] + v[i]));
        out[i] = tail_int + trap.value() - corr * (dp[i] - dp[0]);
    }
    SampledFunction::new(grid, out)
}

/// Complex analogue of [`cumulative_integral_from_right`]. The tail closure
/// is passed as the already-evaluated integral of the integrand beyond the
/// right edge.
pub fn cumulative_integral_from_right_complex(
    f: &ComplexSampledFunction,
    tail_integral: Complex64,
) -> Result<ComplexSampledFunction> {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.spacing();
    let corr = h * h / 12.0;
    let re_p = differentiate(&f.real_part(), 1)?;
    let im_p = differentiate(&f.imag_part(), 1)?;
    let v = f.values();

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let dp = |i: usize| Complex64::new(re_p.value(i), im_p.value(i));
    let mut trap_re = Kahan::default();
    let mut trap_im = Kahan::default();
    out[n - 1] = -tail_integral;
    for i in (0..n - 1).rev() {
        let seg = 0.5 * h * (v[i] + v[i + 1]);
        trap_re.add(seg.re);
        trap_im.add(seg.im);
        let trap = Complex64::new(trap_re.value(), trap_im.value());
        let segment = trap - corr * (dp(n - 1) - dp(i));
        out[i] = -segment - tail_integral;
    }
    ComplexSampledFunction::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{make_grid, Grid};
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrate_zero_is_zero() {
        let f = SampledFunction::zeros(Grid::default_domain());
        assert_eq!(integrate_full(&f), 0.0);
    }

    #[test]
    fn integrate_sech_squared() {
        let g = Grid::default_domain();
        let f = SampledFunction::from_fn(g, |x| 1.0 / x.cosh().powi(2)).unwrap();
        assert_abs_diff_eq!(integrate_full(&f), 2.0, epsilon = 1e-9);
        let half = f.scaled(0.5);
        assert_abs_diff_eq!(integrate_full(&half), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn cumulative_from_right_matches_antiderivative() {
        // f(y) = exp(-2y) on [0, 30]; closed form of the anchored integral
        // at x is -exp(-2x)/2.
        let g = make_grid(0.0, 30.0, 3001).unwrap();
        let f = SampledFunction::from_fn(g, |x| (-2.0 * x).exp()).unwrap();
        let tail = TailModel::matching_edge(2.0, f.value(f.len() - 1)).unwrap();
        let c = cumulative_integral_from_right(&f, tail).unwrap();
        assert_abs_diff_eq!(c.value(0), -0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(c.value(100), -0.5 * (-2.0 * g.node(100)).exp(), epsilon = 1e-9);
    }

    #[test]
    fn cumulative_of_zero_is_zero() {
        let f = SampledFunction::zeros(Grid::default_domain());
        let c = cumulative_integral_from_right(&f, TailModel::none()).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn gram_entry_for_single_seed() {
        // Integrand 2 exp(-2y) (two equal seeds, c = sqrt(2), gamma = 1):
        // the anchored integral at x = 0 is -1, so the matrix entry
        // 1 - (-1) = 2.
        let g = Grid::default_domain();
        let f = SampledFunction::from_fn(g, |x| 2.0 * (-2.0 * x).exp()).unwrap();
        let tail = TailModel::matching_edge(2.0, f.value(f.len() - 1)).unwrap();
        let c = cumulative_integral_from_right(&f, tail).unwrap();
        let i0 = g.nodes().position(|x| x == 0.0).unwrap();
        assert_abs_diff_eq!(c.value(i0), -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(1.0 - c.value(i0), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn cumulative_from_left_matches_antiderivative() {
        // f(y) = exp(2y) on [-30, 0]; integral from -infinity is exp(2x)/2.
        let g = make_grid(-30.0, 0.0, 3001).unwrap();
        let f = SampledFunction::from_fn(g, |x| (2.0 * x).exp()).unwrap();
        let tail = TailModel::matching_edge(2.0, f.value(0)).unwrap();
        let c = cumulative_integral_from_left(&f, tail).unwrap();
        let last = c.len() - 1;
        assert_abs_diff_eq!(c.value(last), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(c.value(1500), 0.5 * (2.0 * g.node(1500)).exp(), epsilon = 1e-9);
    }

    #[test]
    fn inner_product_normalised_bound_state() {
        let g = Grid::default_domain();
        let f = SampledFunction::from_fn(g, |x| 1.0 / (2.0f64).sqrt() / x.cosh()).unwrap();
        assert_abs_diff_eq!(inner_product(&f, &f).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn inner_product_parity_orthogonality() {
        let g = Grid::default_domain();
        let odd = SampledFunction::from_fn(g, |x| x * (-x * x).exp()).unwrap();
        let even = SampledFunction::from_fn(g, |x| (-x * x).exp()).unwrap();
        assert_abs_diff_eq!(inner_product(&odd, &even).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = SampledFunction::zeros(make_grid(0.0, 1.0, 9).unwrap());
        let b = SampledFunction::zeros(make_grid(0.0, 1.0, 11).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn derivative_of_cumulative_recovers_integrand() {
        let g = make_grid(-10.0, 10.0, 2001).unwrap();
        let f = SampledFunction::from_fn(g, |x| (-x * x / 4.0).exp() * (1.0 + x)).unwrap();
        let c = cumulative_integral_from_right(&f, TailModel::none()).unwrap();
        let d = differentiate(&c, 1).unwrap();
        for i in g.interior() {
            assert_abs_diff_eq!(d.value(i), f.value(i), epsilon = 1e-6);
        }
    }

    #[test]
    fn halving_spacing_improves_trapezoid_by_at_least_3_5() {
        // Smooth integrand with non-vanishing boundary values, so the
        // composite rule shows its generic second-order behaviour.
        let exact = 1.0f64.sin() - 0.0f64.sin();
        let mut errs = Vec::new();
        for n in [201usize, 401, 801] {
            let g = make_grid(0.0, 1.0, n).unwrap();
            let f = SampledFunction::from_fn(g, |x| x.cos()).unwrap();
            errs.push((integrate_full(&f) - exact).abs());
        }
        assert!(errs[0] / errs[1] >= 3.5);
        assert!(errs[1] / errs[2] >= 3.5);
    }
}
