//! Addition and removal of bound states.
//!
//! Starting from a base potential with no discrete spectrum, seed solutions
//! decaying at plus infinity define a Gram-type matrix field `A(x)`; per-node
//! linear solves yield normalised bound states, the log-derivative field `W`
//! and the dressed potential `U_N = U_0 - 2 W'`. The inverse procedure
//! (removal) runs on the mutually inverse matrix field `B(x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::SpdFactor;
use crate::numerics::{
    cumulative_integral_from_left, cumulative_integral_from_right,
    cumulative_integral_from_right_complex, differentiate, inner_product, ComplexSampledFunction,
    Grid, Kernel2D, SampledFunction, TailModel,
};
use crate::report::ResidualReport;
use crate::schrodinger::{jost_decaying_right, shoot_bound_states, PotentialModel};

/// Condition-estimate ceiling for the per-node solves.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Default tolerance for the Wronskian and kernel identity checks.
pub const IDENTITY_TOL: f64 = 1e-5;
/// Stride of the stored two-variable kernel (memory bound).
pub const KERNEL_STRIDE: usize = 4;

/// One requested bound state: target energy `-gamma^2` and the seed
/// coefficient `c`, defined as the coefficient of `exp(-gamma x)` at the
/// right grid edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundStateSpec {
    pub gamma: f64,
    pub c: f64,
}

impl BoundStateSpec {
    pub fn new(gamma: f64, c: f64) -> Self {
        BoundStateSpec { gamma, c }
    }
}

/// Where the seed solutions came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedSource {
    AnalyticFree,
    NumericJost,
}

/// Seed solutions of the base potential at the requested negative energies,
/// together with their spatial derivatives (exact for analytic free seeds).
#[derive(Clone, Debug)]
pub struct SeedSet {
    specs: Vec<BoundStateSpec>,
    phis: Vec<SampledFunction>,
    phi_primes: Vec<SampledFunction>,
    source: SeedSource,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[BoundStateSpec] {
        &self.specs
    }

    pub fn phis(&self) -> &[SampledFunction] {
        &self.phis
    }

    pub fn phi(&self, k: usize) -> &SampledFunction {
        &self.phis[k]
    }

    pub fn phi_prime(&self, k: usize) -> &SampledFunction {
        &self.phi_primes[k]
    }

    pub fn source(&self) -> SeedSource {
        self.source
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.specs.iter().map(|s| s.gamma).collect()
    }

    pub fn grid(&self) -> Option<Grid> {
        self.phis.first().map(|p| p.grid())
    }

    /// Rescale every seed (and its recorded coefficient); used by the
    /// parametric evolution.
    pub(crate) fn rescaled(&self, factors: &[f64]) -> Result<SeedSet> {
        let mut phis = Vec::with_capacity(self.phis.len());
        let mut phi_primes = Vec::with_capacity(self.phis.len());
        let mut specs = Vec::with_capacity(self.specs.len());
        for (k, (phi, spec)) in self.phis.iter().zip(&self.specs).enumerate() {
            let g = factors[k];
            if !g.is_finite() {
                return Err(Error::NonFinite {
                    context: "seed rescale factor",
                });
            }
            let scaled = phi.scaled(g);
            if scaled.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: "rescaled seed",
                });
            }
            phis.push(scaled);
            phi_primes.push(self.phi_primes[k].scaled(g));
            specs.push(BoundStateSpec::new(spec.gamma, spec.c * g));
        }
        Ok(SeedSet {
            specs,
            phis,
            phi_primes,
            source: self.source,
        })
    }
}

fn validate_specs(specs: &[BoundStateSpec]) -> Result<()> {
    for s in specs {
        if !(s.gamma > 0.0) || !s.gamma.is_finite() {
            return Err(Error::NonPositiveGamma(s.gamma));
        }
        if !(s.c > 0.0) || !s.c.is_finite() {
            return Err(Error::NonPositiveCoefficient(s.c));
        }
    }
    for i in 0..specs.len() {
        for j in i + 1..specs.len() {
            if (specs[i].gamma - specs[j].gamma).abs() < 1e-6 {
                return Err(Error::DuplicateGamma {
                    i,
                    j,
                    a: specs[i].gamma,
                    b: specs[j].gamma,
                });
            }
        }
    }
    Ok(())
}

/// Build the seed solutions for the base potential. For a vanishing base
/// the seeds are exact exponentials `c exp(-gamma x)`; otherwise they are
/// marched decaying solutions scaled so the right-edge coefficient is `c`.
pub fn seed_set(u0: &PotentialModel, specs: &[BoundStateSpec]) -> Result<SeedSet> {
    validate_specs(specs)?;
    let grid = u0.grid();
    if specs.is_empty() {
        return Ok(SeedSet {
            specs: vec![],
            phis: vec![],
            phi_primes: vec![],
            source: SeedSource::AnalyticFree,
        });
    }
    if u0.is_zero() {
        let span = grid.x_min().abs().max(grid.x_max().abs());
        let mut phis = Vec::with_capacity(specs.len());
        let mut phi_primes = Vec::with_capacity(specs.len());
        for s in specs {
            let reach = s.gamma * span + s.c.ln().abs();
            if reach > 709.0 {
                return Err(Error::DynamicRange { range: reach });
            }
            let phi = SampledFunction::from_fn(grid, |x| s.c * (-s.gamma * x).exp())?;
            phi_primes.push(phi.scaled(-s.gamma));
            phis.push(phi);
        }
        return Ok(SeedSet {
            specs: specs.to_vec(),
            phis,
            phi_primes,
            source: SeedSource::AnalyticFree,
        });
    }

    // the construction assumes an empty discrete spectrum
    let u_min = u0
        .samples()
        .values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if u_min < 0.0 {
        let scan_max = (-u_min).sqrt() + 0.5;
        let found = shoot_bound_states(u0, scan_max, 1e-9)?;
        if !found.is_empty() {
            return Err(Error::BaseHasBoundStates { count: found.len() });
        }
    }

    let mut phis = Vec::with_capacity(specs.len());
    let mut phi_primes = Vec::with_capacity(specs.len());
    for s in specs {
        let phi = jost_decaying_right(u0, s.gamma)?.scaled(s.c);
        phi_primes.push(differentiate(&phi, 1)?);
        phis.push(phi);
    }
    Ok(SeedSet {
        specs: specs.to_vec(),
        phis,
        phi_primes,
        source: SeedSource::NumericJost,
    })
}

/// Upper-triangular field of anchored integrals
/// `C_kl(x) = integral from infinity down to x of phi_k phi_l`,
/// with analytic exponential tails of rate `gamma_k + gamma_l`.
#[derive(Clone, Debug)]
pub(crate) struct GramField {
    n_states: usize,
    entries: Vec<SampledFunction>,
}

impl GramField {
    pub fn new(seeds: &SeedSet) -> Result<GramField> {
        let nn = seeds.len();
        let mut entries = Vec::with_capacity(nn * (nn + 1) / 2);
        for k in 0..nn {
            for l in k..nn {
                let prod = seeds.phi(k).zip_with(seeds.phi(l), |a, b| a * b)?;
                let rate = seeds.specs()[k].gamma + seeds.specs()[l].gamma;
                let tail = TailModel::matching_edge(rate, prod.value(prod.len() - 1))?;
                entries.push(cumulative_integral_from_right(&prod, tail)?);
            }
        }
        Ok(GramField {
            n_states: nn,
            entries,
        })
    }

    fn entry(&self, k: usize, l: usize) -> &SampledFunction {
        let (a, b) = if k <= l { (k, l) } else { (l, k) };
        let idx = a * self.n_states - a * (a + 1) / 2 + b;
        &self.entries[idx]
    }

    /// Dense symmetric `A(x) = I - C(x)` at one node, row-major.
    pub fn matrix_at(&self, node: usize) -> Vec<f64> {
        let nn = self.n_states;
        let mut a = vec![0.0f64; nn * nn];
        for k in 0..nn {
            for l in k..nn {
                let v = -self.entry(k, l).value(node);
                let d = if k == l { 1.0 } else { 0.0 };
                a[k * nn + l] = d + v;
                a[l * nn + k] = d + v;
            }
        }
        a
    }
}

/// The dressing matrix `A(x)` at one node, row-major `N x N`. Symmetric and
/// positive definite; equals the identity plus the seed Gram matrix on
/// `[x, infinity)`.
pub fn assemble_dressing_matrix(seeds: &SeedSet, node: usize) -> Result<Vec<f64>> {
    let field = GramField::new(seeds)?;
    Ok(field.matrix_at(node))
}

/// Fully assembled dressed system: bound states and their derivatives,
/// `W`, `ln det A` and the dressed potential.
#[derive(Clone, Debug)]
pub struct DressedSystem {
    u0: PotentialModel,
    seeds: SeedSet,
    psis: Vec<SampledFunction>,
    psi_primes: Vec<SampledFunction>,
    w: SampledFunction,
    logdet_a: SampledFunction,
    u_n: PotentialModel,
    pub(crate) gram: Option<GramField>,
}

impl DressedSystem {
    pub fn n_states(&self) -> usize {
        self.seeds.len()
    }

    pub fn u0(&self) -> &PotentialModel {
        &self.u0
    }

    pub fn u_n(&self) -> &PotentialModel {
        &self.u_n
    }

    pub fn seeds(&self) -> &SeedSet {
        &self.seeds
    }

    pub fn psis(&self) -> &[SampledFunction] {
        &self.psis
    }

    pub fn psi(&self, k: usize) -> &SampledFunction {
        &self.psis[k]
    }

    /// Derivative of bound state `k`, obtained from the differentiated
    /// linear system (node-local, no stencil).
    pub fn psi_prime(&self, k: usize) -> &SampledFunction {
        &self.psi_primes[k]
    }

    pub fn w(&self) -> &SampledFunction {
        &self.w
    }

    pub fn logdet_a(&self) -> &SampledFunction {
        &self.logdet_a
    }

    pub fn grid(&self) -> Grid {
        self.u0.grid()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.seeds.gammas()
    }

    /// Solve `A(node) y = rhs` with the stored matrix field.
    pub(crate) fn solve_at_node(&self, node: usize, rhs: &[f64]) -> Result<Vec<f64>> {
        let gram = self.gram.as_ref().expect("no matrix field for N = 0");
        let a = gram.matrix_at(node);
        let f = SpdFactor::new(&a, self.n_states()).ok_or(Error::NearSingular {
            node,
            x: self.grid().node(node),
            cond: f64::INFINITY,
        })?;
        Ok(f.solve(rhs))
    }

    /// Asymptotic normalisation constants: coefficient of `exp(-gamma_k x)`
    /// in `psi_k` at the right edge.
    pub fn norm_constants(&self) -> Vec<f64> {
        let grid = self.grid();
        let x_edge = grid.node(grid.len() - 1);
        self.psis
            .iter()
            .zip(self.seeds.specs())
            .map(|(psi, s)| psi.value(psi.len() - 1) * (s.gamma * x_edge).exp())
            .collect()
    }

    /// Matrix of inner products `<psi_k, psi_l>`.
    pub fn orthonormality_matrix(&self) -> Vec<Vec<f64>> {
        let nn = self.n_states();
        let mut m = vec![vec![0.0f64; nn]; nn];
        for k in 0..nn {
            for l in 0..nn {
                m[k][l] = inner_product(&self.psis[k], &self.psis[l]).expect("same grid");
            }
        }
        m
    }

    /// Largest deviation of the orthonormality matrix from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        let m = self.orthonormality_matrix();
        let mut worst = 0.0f64;
        for (k, row) in m.iter().enumerate() {
            for (l, &v) in row.iter().enumerate() {
                let d = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((v - d).abs());
            }
        }
        worst
    }

    /// Scaled residual of `(-d^2/dx^2 + U_N + gamma_k^2) psi_k`.
    pub fn eigen_residual(&self, k: usize) -> Result<f64> {
        let gamma = self.seeds.specs()[k].gamma;
        crate::schrodinger::eigen_equation_residual(&self.u_n, &self.psis[k], -gamma * gamma)
    }
}

/// Run the construction: per-node SPD solves for the bound states, then
/// `W(x) = -sum phi_l psi_l` and `U_N = U_0 - 2 W'`.
///
/// The slope of the matrix field is the exact outer product
/// `A' = -phi phi^T`, so differentiating the linear system gives
/// `A psi' = phi' - W phi` per node. `W'` and hence `U_N` then come out of
/// node-local algebra instead of a difference stencil, which keeps the
/// pointwise noise of the dressed potential at rounding level (stencils
/// would amplify it by 1/h per pass and cap the accuracy of everything
/// built on top).
pub fn dress(u0: &PotentialModel, seeds: &SeedSet) -> Result<DressedSystem> {
    let grid = u0.grid();
    if let Some(g) = seeds.grid() {
        if g != grid {
            return Err(Error::GridMismatch);
        }
    }
    let nn = seeds.len();
    if nn == 0 {
        return Ok(DressedSystem {
            u0: u0.clone(),
            seeds: seeds.clone(),
            psis: vec![],
            psi_primes: vec![],
            w: SampledFunction::zeros(grid),
            logdet_a: SampledFunction::zeros(grid),
            u_n: u0.clone(),
            gram: None,
        });
    }

    let gram = GramField::new(seeds)?;
    let n = grid.len();
    let mut psi_cols = vec![vec![0.0f64; n]; nn];
    let mut psi_prime_cols = vec![vec![0.0f64; n]; nn];
    let mut w_vals = vec![0.0f64; n];
    let mut w_prime_vals = vec![0.0f64; n];
    let mut logdet = vec![0.0f64; n];
    let mut worst: Option<(usize, f64)> = None;

    let mut rhs = vec![0.0f64; nn];
    let mut rhs_prime = vec![0.0f64; nn];
    for node in 0..n {
        let a = gram.matrix_at(node);
        let f = SpdFactor::new(&a, nn).ok_or(Error::NearSingular {
            node,
            x: grid.node(node),
            cond: f64::INFINITY,
        })?;
        if worst.is_none_or(|(_, c)| f.condition_estimate > c) {
            worst = Some((node, f.condition_estimate));
        }
        for k in 0..nn {
            rhs[k] = seeds.phi(k).value(node);
        }
        let sol = f.solve(&rhs);
        let mut w = 0.0;
        for l in 0..nn {
            psi_cols[l][node] = sol[l];
            w -= rhs[l] * sol[l];
        }
        // A psi' = phi' - W phi
        for k in 0..nn {
            rhs_prime[k] = seeds.phi_prime(k).value(node) - w * rhs[k];
        }
        let sol_prime = f.solve(&rhs_prime);
        let mut wp = 0.0;
        for l in 0..nn {
            psi_prime_cols[l][node] = sol_prime[l];
            wp -= seeds.phi_prime(l).value(node) * sol[l] + rhs[l] * sol_prime[l];
        }
        w_vals[node] = w;
        w_prime_vals[node] = wp;
        logdet[node] = f.log_det;
    }
    if let Some((node, cond)) = worst {
        if cond > CONDITION_LIMIT {
            return Err(Error::NearSingular {
                node,
                x: grid.node(node),
                cond,
            });
        }
    }

    let w = SampledFunction::new(grid, w_vals)?;
    let logdet_a = SampledFunction::new(grid, logdet)?;
    let w_prime = SampledFunction::new(grid, w_prime_vals)?;
    let u_n_samples = u0.samples().zip_with(&w_prime, |u, d| u - 2.0 * d)?;
    let u_n = PotentialModel::from_samples(
        format!("dressed({}, n={})", u0.label(), nn),
        u_n_samples,
        TailModel::None,
        TailModel::None,
    );
    let psis = psi_cols
        .into_iter()
        .map(|col| SampledFunction::new(grid, col))
        .collect::<Result<Vec<_>>>()?;
    let psi_primes = psi_prime_cols
        .into_iter()
        .map(|col| SampledFunction::new(grid, col))
        .collect::<Result<Vec<_>>>()?;

    Ok(DressedSystem {
        u0: u0.clone(),
        seeds: seeds.clone(),
        psis,
        psi_primes,
        w,
        logdet_a,
        u_n,
        gram: Some(gram),
    })
}

/// Cross-check of the two routes to the dressed potential: the node-local
/// algebraic `W'` against a fourth-order difference of the sampled `W`.
pub fn potential_route_consistency(d: &DressedSystem) -> Result<ResidualReport> {
    let wp = differentiate(d.w(), 1)?;
    let alt = d.u0().samples().zip_with(&wp, |u, s| u - 2.0 * s)?;
    let resid = alt.zip_with(d.u_n().samples(), |a, b| a - b)?;
    Ok(ResidualReport::from_interior(
        "potential-route-consistency",
        &resid,
        IDENTITY_TOL,
    ))
}

/// Transform a continuum solution of the base potential at energy `k^2`
/// into one of the dressed potential.
pub fn continuum_transform(
    d: &DressedSystem,
    phi_e: &ComplexSampledFunction,
    k: f64,
) -> Result<ComplexSampledFunction> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    let grid = d.grid();
    if phi_e.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if d.n_states() == 0 {
        return Ok(phi_e.clone());
    }
    let n = grid.len();
    // asymptotic plane-wave content at the right edge closes the tails
    let (a_amp, b_amp) = crate::schrodinger::fit_plane_waves(phi_e, k, &[n - 3, n - 2, n - 1]);
    let x_edge = grid.node(n - 1);

    let mut out: Vec<Complex64> = phi_e.values().to_vec();
    for (l, psi) in d.psis().iter().enumerate() {
        let gamma = d.seeds().specs()[l].gamma;
        let phi_l = d.seeds().phi(l);
        let prod_vals: Vec<Complex64> = phi_e
            .values()
            .iter()
            .zip(phi_l.values())
            .map(|(&pe, &pl)| pe * pl)
            .collect();
        let prod = ComplexSampledFunction::new(grid, prod_vals)?;
        let edge = phi_l.value(n - 1);
        let tail = a_amp * edge * Complex64::new(0.0, k * x_edge).exp()
            / Complex64::new(gamma, -k)
            + b_amp * edge * Complex64::new(0.0, -k * x_edge).exp() / Complex64::new(gamma, k);
        let anchored = cumulative_integral_from_right_complex(&prod, tail)?;
        for (o, (c, &p)) in out.iter_mut().zip(anchored.values().iter().zip(psi.values())) {
            *o += c * p;
        }
    }
    ComplexSampledFunction::new(grid, out)
}

/// Unimodular product relating the reflection amplitudes of the base and
/// dressed potentials: `prod_j (gamma_j - ik) / (gamma_j + ik)`.
pub fn scattering_relation_factor(specs: &[BoundStateSpec], k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    let mut f = Complex64::new(1.0, 0.0);
    for s in specs {
        f *= Complex64::new(s.gamma, -k) / Complex64::new(s.gamma, k);
    }
    Ok(f)
}

/// Anchored removal integrals `B_kl(x) = integral from -infinity to x of
/// psi_k psi_l`, upper-triangular. Anchoring on the left keeps the entries
/// accurate where they are exponentially small.
pub(crate) fn removal_field(d: &DressedSystem) -> Result<Vec<SampledFunction>> {
    let nn = d.n_states();
    let mut entries = Vec::with_capacity(nn * (nn + 1) / 2);
    for k in 0..nn {
        for l in k..nn {
            let prod = d.psi(k).zip_with(d.psi(l), |a, b| a * b)?;
            let rate = d.seeds().specs()[k].gamma + d.seeds().specs()[l].gamma;
            let tail = TailModel::matching_edge(rate, prod.value(0))?;
            entries.push(cumulative_integral_from_left(&prod, tail)?);
        }
    }
    Ok(entries)
}

fn tri_index(nn: usize, k: usize, l: usize) -> usize {
    let (a, b) = if k <= l { (k, l) } else { (l, k) };
    a * nn - a * (a + 1) / 2 + b
}

/// Result of removing all bound states again.
#[derive(Clone, Debug)]
pub struct Undressed {
    pub u0: PotentialModel,
    /// reconstructed seed solutions, one per removed state
    pub phis: Vec<SampledFunction>,
    pub logdet_b: SampledFunction,
}

/// Remove every bound state of a dressed system; recovers the base
/// potential and the seed solutions.
///
/// Mirrors the construction: `B' = psi psi^T` exactly, so the recovered
/// seeds' derivatives and the slope of `ln det B` are node-local algebra
/// and the base potential comes back without a difference stencil.
pub fn undress(d: &DressedSystem) -> Result<Undressed> {
    let grid = d.grid();
    let nn = d.n_states();
    if nn == 0 {
        return Ok(Undressed {
            u0: d.u_n().clone(),
            phis: vec![],
            logdet_b: SampledFunction::zeros(grid),
        });
    }
    let field = removal_field(d)?;
    let n = grid.len();
    let mut phi_cols = vec![vec![0.0f64; n]; nn];
    let mut slope_vals = vec![0.0f64; n];
    let mut logdet = vec![0.0f64; n];
    let mut worst: Option<(usize, f64)> = None;

    let mut b = vec![0.0f64; nn * nn];
    let mut rhs = vec![0.0f64; nn];
    let mut rhs_prime = vec![0.0f64; nn];
    for node in 0..n {
        for k in 0..nn {
            for l in k..nn {
                let v = field[tri_index(nn, k, l)].value(node);
                b[k * nn + l] = v;
                b[l * nn + k] = v;
            }
            rhs[k] = d.psi(k).value(node);
        }
        let f = SpdFactor::new(&b, nn).ok_or(Error::NearSingular {
            node,
            x: grid.node(node),
            cond: f64::INFINITY,
        })?;
        if worst.is_none_or(|(_, c)| f.condition_estimate > c) {
            worst = Some((node, f.condition_estimate));
        }
        let sol = f.solve(&rhs);
        let mut s = 0.0;
        for l in 0..nn {
            phi_cols[l][node] = sol[l];
            s += rhs[l] * sol[l];
        }
        // B phi'' = psi' - s psi, with s = d/dx ln det B
        for k in 0..nn {
            rhs_prime[k] = d.psi_prime(k).value(node) - s * rhs[k];
        }
        let sol_prime = f.solve(&rhs_prime);
        let mut sp = 0.0;
        for l in 0..nn {
            sp += d.psi_prime(l).value(node) * sol[l] + rhs[l] * sol_prime[l];
        }
        slope_vals[node] = sp;
        logdet[node] = f.log_det;
    }
    if let Some((node, cond)) = worst {
        if cond > CONDITION_LIMIT {
            return Err(Error::NearSingular {
                node,
                x: grid.node(node),
                cond,
            });
        }
    }

    let slope = SampledFunction::new(grid, slope_vals)?;
    let u0_samples = d.u_n().samples().zip_with(&slope, |u, v| u - 2.0 * v)?;
    let u0 = PotentialModel::from_samples(
        format!("undressed({})", d.u_n().label()),
        u0_samples,
        TailModel::None,
        TailModel::None,
    );
    let phis = phi_cols
        .into_iter()
        .map(|col| SampledFunction::new(grid, col))
        .collect::<Result<Vec<_>>>()?;
    Ok(Undressed {
        u0,
        phis,
        logdet_b: SampledFunction::new(grid, logdet)?,
    })
}

/// The transformation kernel `K(x, y) = sum_k psi_k(x) phi_k(y)`, stored on
/// the coarsened mesh together with its full-resolution diagonal.
#[derive(Clone, Debug)]
pub struct KernelK {
    pub values: Kernel2D,
    pub diag: SampledFunction,
}

pub fn kernel(d: &DressedSystem) -> KernelK {
    let grid = d.grid();
    let psis = d.psis();
    let phis = d.seeds().phis();
    let values = Kernel2D::from_indexed_fn(grid, KERNEL_STRIDE, |i, j| {
        psis.iter()
            .zip(phis)
            .map(|(psi, phi)| psi.value(i) * phi.value(j))
            .sum()
    });
    let diag_vals: Vec<f64> = (0..grid.len())
        .map(|i| {
            psis.iter()
                .zip(phis)
                .map(|(psi, phi)| psi.value(i) * phi.value(i))
                .sum()
        })
        .collect();
    KernelK {
        values,
        diag: SampledFunction::new(grid, diag_vals).expect("finite kernel diagonal"),
    }
}

/// Residual of `U_N - U_0 = 2 d/dx K(x, x)` over interior nodes.
pub fn kernel_diagonal_slope_residual(d: &DressedSystem) -> Result<ResidualReport> {
    let kk = kernel(d);
    let slope = differentiate(&kk.diag, 1)?;
    let resid = d
        .u_n()
        .samples()
        .zip_with(d.u0().samples(), |a, b| a - b)?
        .zip_with(&slope, |diff, s| diff - 2.0 * s)?;
    Ok(ResidualReport::from_interior(
        "kernel-diagonal-slope",
        &resid,
        IDENTITY_TOL,
    ))
}

/// Residual of the reconstruction `psi_l(x) = phi_l(x) + anchored integral
/// of psi_l(y) K(y, x)`, evaluated in the left-anchored form which is the
/// same identity with the orthonormality endpoint folded in.
pub fn kernel_reconstruction_residuals(d: &DressedSystem) -> Result<Vec<ResidualReport>> {
    let nn = d.n_states();
    let field = removal_field(d)?;
    let grid = d.grid();
    let mut reports = Vec::with_capacity(nn);
    for l in 0..nn {
        let mut resid = vec![0.0f64; grid.len()];
        for (i, r) in resid.iter_mut().enumerate() {
            let mut acc = d.psi(l).value(i);
            for k in 0..nn {
                acc -= field[tri_index(nn, l, k)].value(i) * d.seeds().phi(k).value(i);
            }
            *r = acc;
        }
        let resid = SampledFunction::new(grid, resid)?;
        reports.push(ResidualReport::from_interior(
            format!("kernel-reconstruction[state {l}]"),
            &resid,
            IDENTITY_TOL,
        ));
    }
    Ok(reports)
}

/// The four cross-Wronskian identities tying seeds, bound states, `W` and
/// the potential difference together.
pub fn wronskian_diagnostics(d: &DressedSystem) -> Result<Vec<ResidualReport>> {
    let grid = d.grid();
    let n = grid.len();
    let nn = d.n_states();
    let mut phi_p = Vec::with_capacity(nn);
    let mut psi_p = Vec::with_capacity(nn);
    for k in 0..nn {
        phi_p.push(differentiate(d.seeds().phi(k), 1)?);
        psi_p.push(differentiate(d.psi(k), 1)?);
    }
    let wp = differentiate(d.w(), 1)?;
    let udiff = d.u_n().samples().zip_with(d.u0().samples(), |a, b| a - b)?;

    let mut anti = vec![0.0f64; n];
    let mut sym = vec![0.0f64; n];
    let mut fwd = vec![0.0f64; n];
    let mut bwd = vec![0.0f64; n];
    for i in 0..n {
        let mut s_fwd = 0.0;
        let mut s_bwd = 0.0;
        for k in 0..nn {
            s_fwd += d.seeds().phi(k).value(i) * psi_p[k].value(i);
            s_bwd += d.psi(k).value(i) * phi_p[k].value(i);
        }
        let w = d.w().value(i);
        let w2 = w * w;
        let ud = udiff.value(i);
        anti[i] = (s_fwd - s_bwd) - w2;
        sym[i] = (s_fwd + s_bwd) + wp.value(i);
        fwd[i] = s_fwd - (0.5 * w2 + 0.25 * ud);
        bwd[i] = s_bwd - (-0.5 * w2 + 0.25 * ud);
    }
    let make = |name: &str, vals: Vec<f64>| -> Result<ResidualReport> {
        let f = SampledFunction::new(grid, vals)?;
        Ok(ResidualReport::from_interior(name, &f, IDENTITY_TOL))
    };
    Ok(vec![
        make("wronskian-antisymmetric", anti)?,
        make("wronskian-symmetric", sym)?,
        make("wronskian-forward", fwd)?,
        make("wronskian-backward", bwd)?,
    ])
}

/// Residual of the seed pair identity
/// `d/dx (phi_k' phi_l - phi_k phi_l') = (gamma_k^2 - gamma_l^2) phi_k phi_l`,
/// scaled by the largest magnitude of the right-hand side.
pub fn seed_pair_identity_residual(seeds: &SeedSet, k: usize, l: usize) -> Result<f64> {
    let phi_k = seeds.phi(k);
    let phi_l = seeds.phi(l);
    let pk = differentiate(phi_k, 1)?;
    let pl = differentiate(phi_l, 1)?;
    let cross = pk.zip_with(phi_l, |a, b| a * b)?.zip_with(
        &phi_k.zip_with(&pl, |a, b| a * b)?,
        |a, b| a - b,
    )?;
    let lhs = differentiate(&cross, 1)?;
    let gk = seeds.specs()[k].gamma;
    let gl = seeds.specs()[l].gamma;
    let rhs = phi_k.zip_with(phi_l, |a, b| (gk * gk - gl * gl) * a * b)?;
    let grid = phi_k.grid();
    let mut scale = 0.0f64;
    for i in grid.interior() {
        scale = scale.max(rhs.value(i).abs()).max(cross.value(i).abs());
    }
    let scale = scale.max(1.0);
    let mut worst = 0.0f64;
    for i in grid.interior() {
        worst = worst.max((lhs.value(i) - rhs.value(i)).abs());
    }
    Ok(worst / scale)
}
