//! Small symmetric-positive-definite solves with power-of-two equilibration.
//!
//! The per-node matrix fields are Gram matrices shifted by the identity, so
//! they are SPD in exact arithmetic but their raw entries span hundreds of
//! e-folds across the grid. Symmetric scaling by powers of two keeps the
//! factorisation exact in the mantissa and lets the log-determinant be
//! accumulated as a sum of pivot logs plus the scaling logs.

/// Cholesky factorisation of a symmetric matrix after power-of-two
/// equilibration. Solves and the log-determinant refer to the original
/// unscaled matrix.
#[derive(Clone, Debug)]
pub(crate) struct SpdFactor {
    n: usize,
    /// lower triangle of the equilibrated matrix factor
    l: Vec<f64>,
    /// per-row scale exponent: row k of the original matrix was scaled by
    /// 2^(-exp[k])
    exps: Vec<i32>,
    pub log_det: f64,
    pub condition_estimate: f64,
}

impl SpdFactor {
    /// Factor the symmetric matrix `a` (row-major `n x n`). Returns `None`
    /// when a pivot is not strictly positive.
    pub fn new(a: &[f64], n: usize) -> Option<SpdFactor> {
        debug_assert_eq!(a.len(), n * n);
        let mut exps = vec![0i32; n];
        for k in 0..n {
            let d = a[k * n + k];
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            // scale so the diagonal entry lands near 1
            exps[k] = (0.5 * d.log2()).round() as i32;
        }
        let mut m = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                let s = (-(exps[i] + exps[j]) as f64).exp2();
                m[i * n + j] = a[i * n + j] * s;
            }
        }
        // in-place lower Cholesky of the equilibrated matrix
        let mut log_det = 0.0f64;
        let mut min_piv = f64::INFINITY;
        let mut max_piv = 0.0f64;
        for k in 0..n {
            let mut d = m[k * n + k];
            for p in 0..k {
                d -= m[k * n + p] * m[k * n + p];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let lkk = d.sqrt();
            m[k * n + k] = lkk;
            min_piv = min_piv.min(lkk);
            max_piv = max_piv.max(lkk);
            log_det += lkk.ln();
            for i in k + 1..n {
                let mut s = m[i * n + k];
                for p in 0..k {
                    s -= m[i * n + p] * m[k * n + p];
                }
                m[i * n + k] = s / lkk;
            }
        }
        log_det *= 2.0;
        let scale_log: f64 = exps.iter().map(|&e| e as f64).sum::<f64>() * std::f64::consts::LN_2;
        log_det += 2.0 * scale_log;
        let cond = (max_piv / min_piv).powi(2);
        Some(SpdFactor {
            n,
            l: m,
            exps,
            log_det,
            condition_estimate: cond,
        })
    }

    /// Solve `A x = b` for the original matrix.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        // scale rhs: (D A D)(D^-1 x) = D b with D = diag(2^-exp)
        let mut y: Vec<f64> = (0..n)
            .map(|i| b[i] * (-(self.exps[i] as f64)).exp2())
            .collect();
        // forward substitution
        for i in 0..n {
            let mut s = y[i];
            for p in 0..i {
                s -= self.l[i * n + p] * y[p];
            }
            y[i] = s / self.l[i * n + i];
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = y[i];
            for p in i + 1..n {
                s -= self.l[p * n + i] * y[p];
            }
            y[i] = s / self.l[i * n + i];
        }
        // unscale solution
        for i in 0..n {
            y[i] *= (-(self.exps[i] as f64)).exp2();
        }
        y
    }
}
