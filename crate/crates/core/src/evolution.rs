//! Parametric evolution of dressed systems.
//!
//! Seeds evolve by pure rescaling, `phi_k(x,t) = exp(int_0^t alpha_k) *
//! phi_k(x,0)`, so every snapshot is an exact reconstruction rather than a
//! time-stepped approximation. The weight schedules cover constant values,
//! the power weights that reproduce the classic integrable flows, and the
//! resolvent weights driven by the Green's-function hierarchy. Time
//! derivatives are always cross-checked by central differences of
//! neighbouring snapshots.

use crate::dressing::{dress, DressedSystem, SeedSet};
use crate::error::{Error, Result};
use crate::numerics::{
    cumulative_integral_from_right, differentiate, inner_product, SampledFunction, TailModel,
};
use crate::report::ResidualReport;
use crate::schrodinger::PotentialModel;

/// Default step for central time differences.
pub const FD_TIME_STEP: f64 = 1e-4;
/// Largest admissible magnitude of the schedule integral.
pub const SCHEDULE_INTEGRAL_LIMIT: f64 = 200.0;
/// Tolerance for matching the evolution law against finite differences.
pub const DU_DT_TOL: f64 = 1e-4;
/// Tolerance for the bound-state evolution law.
pub const PSI_DT_TOL: f64 = 1e-5;
/// Tolerance for the detachment-rate sum rule.
pub const SUM_RULE_TOL: f64 = 1e-4;
/// Tolerance for the third-order density identity.
pub const DENSITY_IDENTITY_TOL: f64 = 1e-4;
/// Tolerance for hierarchy recursion residuals (third-derivative stencils).
pub const HIERARCHY_RECURSION_TOL: f64 = 1e-3;
/// Tolerance for recursively built members against their closed form.
pub const LAX_CLOSED_FORM_TOL: f64 = 1e-4;
/// Tolerance for the KdV residual.
pub const KDV_TOL: f64 = 1e-3;
/// Tolerance for the third-order generator consistency check.
pub const LAX_PAIR_TOL: f64 = 1e-3;

/// Weight functions `alpha_k(t)` driving the seed evolution.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSchedule {
    /// Time-independent weights, one per state.
    Constant { alphas: Vec<f64> },
    /// `alpha_k = beta_k (2 gamma_k)^(2j)`; `betas = None` means
    /// `beta_k = gamma_k`, which reproduces the classic hierarchy flows.
    LaxPower { exponent: usize, betas: Option<Vec<f64>> },
    /// Resolvent weights `alpha_k = (4 (gamma_k^2 + E))^-(j+1)`.
    Greens { e: f64, order: usize },
    /// Tabulated per-state time series, linearly interpolated.
    Tabulated { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl AlphaSchedule {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AlphaSchedule::Constant { .. } => "constant",
            AlphaSchedule::LaxPower { .. } => "lax-power",
            AlphaSchedule::Greens { .. } => "greens",
            AlphaSchedule::Tabulated { .. } => "tabulated",
        }
    }

    /// Check the schedule against a seed set.
    pub fn validate(&self, seeds: &SeedSet) -> Result<()> {
        let nn = seeds.len();
        match self {
            AlphaSchedule::Constant { alphas } => {
                if alphas.len() != nn {
                    return Err(Error::WeightCountMismatch {
                        expected: nn,
                        got: alphas.len(),
                    });
                }
                if alphas.iter().any(|a| !a.is_finite()) {
                    return Err(Error::NonFinite {
                        context: "schedule weights",
                    });
                }
            }
            AlphaSchedule::LaxPower { betas, .. } => {
                if let Some(b) = betas {
                    if b.len() != nn {
                        return Err(Error::WeightCountMismatch {
                            expected: nn,
                            got: b.len(),
                        });
                    }
                    if b.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite {
                            context: "schedule weights",
                        });
                    }
                }
            }
            AlphaSchedule::Greens { e, .. } => {
                for s in seeds.specs() {
                    let dist = (s.gamma * s.gamma + e).abs();
                    if dist < 1e-8 {
                        return Err(Error::NearPole { e: *e, dist });
                    }
                }
            }
            AlphaSchedule::Tabulated { times, values } => {
                if values.len() != nn {
                    return Err(Error::WeightCountMismatch {
                        expected: nn,
                        got: values.len(),
                    });
                }
                if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::NonFinite {
                        context: "tabulated schedule times",
                    });
                }
                for series in values {
                    if series.len() != times.len() {
                        return Err(Error::WeightCountMismatch {
                            expected: times.len(),
                            got: series.len(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Weight of state `k` at time `t`.
    pub fn alpha(&self, seeds: &SeedSet, k: usize, t: f64) -> f64 {
        let gamma = seeds.specs()[k].gamma;
        match self {
            AlphaSchedule::Constant { alphas } => alphas[k],
            AlphaSchedule::LaxPower { exponent, betas } => {
                let beta = betas.as_ref().map_or(gamma, |b| b[k]);
                beta * (2.0 * gamma).powi(2 * *exponent as i32)
            }
            AlphaSchedule::Greens { e, order } => {
                (4.0 * (gamma * gamma + e)).powi(-(*order as i32 + 1))
            }
            AlphaSchedule::Tabulated { times, values } => {
                let series = &values[k];
                if t <= times[0] {
                    return series[0];
                }
                if t >= times[times.len() - 1] {
                    return series[series.len() - 1];
                }
                let idx = times.partition_point(|&v| v <= t) - 1;
                let f = (t - times[idx]) / (times[idx + 1] - times[idx]);
                series[idx] + f * (series[idx + 1] - series[idx])
            }
        }
    }

    /// Integral of `alpha_k` over `[t0, t1]`; exact for the closed-form
    /// kinds, trapezoid on the knots for tabulated series.
    pub fn integral(&self, seeds: &SeedSet, k: usize, t0: f64, t1: f64) -> f64 {
        match self {
            AlphaSchedule::Tabulated { times, .. } => {
                if t0 == t1 {
                    return 0.0;
                }
                let (lo, hi, sign) = if t0 <= t1 {
                    (t0, t1, 1.0)
                } else {
                    (t1, t0, -1.0)
                };
                // knots interior to the interval plus the endpoints
                let mut ts = vec![lo];
                for &t in times {
                    if t > lo && t < hi {
                        ts.push(t);
                    }
                }
                ts.push(hi);
                let mut acc = 0.0;
                for w in ts.windows(2) {
                    let a = self.alpha(seeds, k, w[0]);
                    let b = self.alpha(seeds, k, w[1]);
                    acc += 0.5 * (a + b) * (w[1] - w[0]);
                }
                sign * acc
            }
            _ => self.alpha(seeds, k, t0) * (t1 - t0),
        }
    }
}

/// Evolve seeds from time 0 to `t` by the scheduled exponential factors.
pub fn evolve_seed_set(seeds0: &SeedSet, sched: &AlphaSchedule, t: f64) -> Result<SeedSet> {
    evolve_between(seeds0, sched, 0.0, t)
}

fn evolve_between(seeds: &SeedSet, sched: &AlphaSchedule, t0: f64, t1: f64) -> Result<SeedSet> {
    sched.validate(seeds)?;
    if !t1.is_finite() || !t0.is_finite() {
        return Err(Error::NonFinite { context: "time" });
    }
    let mut factors = Vec::with_capacity(seeds.len());
    for k in 0..seeds.len() {
        let integral = sched.integral(seeds, k, t0, t1);
        if integral.abs() > SCHEDULE_INTEGRAL_LIMIT {
            return Err(Error::ScheduleOverflow {
                mag: integral.abs(),
            });
        }
        factors.push(integral.exp());
    }
    seeds.rescaled(&factors)
}

/// A dressed system at parameter time `t` under a given schedule.
#[derive(Clone, Debug)]
pub struct EvolutionSnapshot {
    pub t: f64,
    pub dressed: DressedSystem,
    pub schedule: AlphaSchedule,
}

/// Reconstruct the dressed system at time `t` from the time-zero seeds.
pub fn snapshot(
    u0: &PotentialModel,
    seeds0: &SeedSet,
    sched: &AlphaSchedule,
    t: f64,
) -> Result<EvolutionSnapshot> {
    let seeds_t = evolve_seed_set(seeds0, sched, t)?;
    Ok(EvolutionSnapshot {
        t,
        dressed: dress(u0, &seeds_t)?,
        schedule: sched.clone(),
    })
}

/// Snapshots at `t - dt`, `t`, `t + dt`; the input of the central-difference
/// consistency checks.
pub fn snapshot_triple(
    u0: &PotentialModel,
    seeds0: &SeedSet,
    sched: &AlphaSchedule,
    t: f64,
    dt: f64,
) -> Result<[EvolutionSnapshot; 3]> {
    Ok([
        snapshot(u0, seeds0, sched, t - dt)?,
        snapshot(u0, seeds0, sched, t)?,
        snapshot(u0, seeds0, sched, t + dt)?,
    ])
}

/// Snapshot displaced by `dt` from an existing one.
pub fn snapshot_shifted(s: &EvolutionSnapshot, dt: f64) -> Result<EvolutionSnapshot> {
    let seeds_t = evolve_between(s.dressed.seeds(), &s.schedule, s.t, s.t + dt)?;
    Ok(EvolutionSnapshot {
        t: s.t + dt,
        dressed: dress(s.dressed.u0(), &seeds_t)?,
        schedule: s.schedule.clone(),
    })
}

/// The closed-form rate of change of the dressed potential:
/// `4 d/dx sum_k alpha_k(t) psi_k^2`.
pub fn du_dt_rhs(s: &EvolutionSnapshot) -> Result<SampledFunction> {
    let d = &s.dressed;
    let grid = d.grid();
    let mut weighted = vec![0.0f64; grid.len()];
    for (k, psi) in d.psis().iter().enumerate() {
        let a = s.schedule.alpha(d.seeds(), k, s.t);
        for (w, &p) in weighted.iter_mut().zip(psi.values()) {
            *w += a * p * p;
        }
    }
    let sum = SampledFunction::new(grid, weighted)?;
    Ok(differentiate(&sum, 1)?.scaled(4.0))
}

/// Central-difference time derivative of the dressed potential.
pub fn u_time_derivative_fd(s: &EvolutionSnapshot, dt: f64) -> Result<SampledFunction> {
    let plus = snapshot_shifted(s, dt)?;
    let minus = snapshot_shifted(s, -dt)?;
    plus.dressed
        .u_n()
        .samples()
        .zip_with(minus.dressed.u_n().samples(), |a, b| (a - b) / (2.0 * dt))
}

/// The closed-form rate of change of bound state `l`:
/// `2 sum_k [A^-1]_lk alpha_k psi_k - alpha_l psi_l`, per node.
pub fn psi_dt_rhs(s: &EvolutionSnapshot, l: usize) -> Result<SampledFunction> {
    let d = &s.dressed;
    let nn = d.n_states();
    if l >= nn {
        return Err(Error::IndexOutOfRange { index: l, len: nn });
    }
    let grid = d.grid();
    let alphas: Vec<f64> = (0..nn)
        .map(|k| s.schedule.alpha(d.seeds(), k, s.t))
        .collect();
    let mut out = vec![0.0f64; grid.len()];
    let mut rhs = vec![0.0f64; nn];
    for node in 0..grid.len() {
        for k in 0..nn {
            rhs[k] = alphas[k] * d.psi(k).value(node);
        }
        let y = d.solve_at_node(node, &rhs)?;
        out[node] = 2.0 * y[l] - alphas[l] * d.psi(l).value(node);
    }
    SampledFunction::new(grid, out)
}

/// Central-difference time derivative of bound state `l`.
pub fn psi_time_derivative_fd(s: &EvolutionSnapshot, l: usize, dt: f64) -> Result<SampledFunction> {
    let plus = snapshot_shifted(s, dt)?;
    let minus = snapshot_shifted(s, -dt)?;
    plus.dressed
        .psi(l)
        .zip_with(minus.dressed.psi(l), |a, b| (a - b) / (2.0 * dt))
}

/// Left: central-difference time derivative of `ln det A` at the left grid
/// edge. Right: `2 sum_k alpha_k(t)`. The two agree because every state
/// carries unit norm.
pub fn sum_rule(s: &EvolutionSnapshot) -> Result<(f64, f64)> {
    let d = &s.dressed;
    let rhs = 2.0
        * (0..d.n_states())
            .map(|k| s.schedule.alpha(d.seeds(), k, s.t))
            .sum::<f64>();
    if d.n_states() == 0 {
        return Ok((0.0, rhs));
    }
    let dt = FD_TIME_STEP;
    let plus = snapshot_shifted(s, dt)?;
    let minus = snapshot_shifted(s, -dt)?;
    let lhs =
        (plus.dressed.logdet_a().value(0) - minus.dressed.logdet_a().value(0)) / (2.0 * dt);
    Ok((lhs, rhs))
}

/// Third-order flow operator `f''' - 4 (U - shift) f' - 2 U' f`.
pub(crate) fn flow_operator(
    u: &SampledFunction,
    f: &SampledFunction,
    shift: f64,
) -> Result<SampledFunction> {
    let f3 = differentiate(f, 3)?;
    let f1 = differentiate(f, 1)?;
    let u1 = differentiate(u, 1)?;
    let grid = f.grid();
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| {
            f3.value(i) - 4.0 * (u.value(i) - shift) * f1.value(i) - 2.0 * u1.value(i) * f.value(i)
        })
        .collect();
    SampledFunction::new(grid, vals)
}

/// Residual of the probability-density identity
/// `(d^3 - 4 U_N d - 2 U_N') psi_k^2 = 4 gamma_k^2 d(psi_k^2)`.
pub fn psisq_identity_residual(s: &EvolutionSnapshot, k: usize) -> Result<ResidualReport> {
    let d = &s.dressed;
    if k >= d.n_states() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: d.n_states(),
        });
    }
    let gamma = d.seeds().specs()[k].gamma;
    let density = d.psi(k).map(|v| v * v);
    let lhs = flow_operator(d.u_n().samples(), &density, 0.0)?;
    let rhs = differentiate(&density, 1)?.scaled(4.0 * gamma * gamma);
    let resid = lhs.zip_with(&rhs, |a, b| a - b)?;
    Ok(ResidualReport::from_interior(
        format!("density-identity[state {k}]"),
        &resid,
        DENSITY_IDENTITY_TOL,
    ))
}

/// Which family a hierarchy holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HierarchyKind {
    /// weighted bound-state density sums
    WeightedDensity,
    /// recursively integrated flow members
    FlowMember,
}

/// A ladder of sampled hierarchy members indexed from 0.
#[derive(Clone, Debug)]
pub struct HierarchyFamily {
    pub kind: HierarchyKind,
    pub members: Vec<SampledFunction>,
    pub weights: Vec<f64>,
}

impl HierarchyFamily {
    pub fn member(&self, j: usize) -> Result<&SampledFunction> {
        self.members.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.members.len(),
        })
    }
}

/// Weighted density sums `Q_j = -4 sum_k beta_k (2 gamma_k)^(2j) psi_k^2`
/// for `j = 0..=j_max`.
pub fn q_hierarchy(
    s: &EvolutionSnapshot,
    betas: &[f64],
    j_max: usize,
) -> Result<HierarchyFamily> {
    let d = &s.dressed;
    let nn = d.n_states();
    if betas.len() != nn {
        return Err(Error::WeightCountMismatch {
            expected: nn,
            got: betas.len(),
        });
    }
    let grid = d.grid();
    let mut members = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let mut vals = vec![0.0f64; grid.len()];
        for (k, psi) in d.psis().iter().enumerate() {
            let gamma = d.seeds().specs()[k].gamma;
            let w = -4.0 * betas[k] * (2.0 * gamma).powi(2 * j as i32);
            for (v, &p) in vals.iter_mut().zip(psi.values()) {
                *v += w * p * p;
            }
        }
        members.push(SampledFunction::new(grid, vals)?);
    }
    Ok(HierarchyFamily {
        kind: HierarchyKind::WeightedDensity,
        members,
        weights: betas.to_vec(),
    })
}

/// Flow members built by the defining recursion: member 0 is the potential
/// itself, and the slope relation `dL_j/dx = (d^3 - 4U d - 2U') L_(j-1)`
/// is integrated once from the right edge with `L_j` vanishing there. The
/// third-derivative term integrates exactly to `L_(j-1)''`, leaving only
/// first-derivative content under the quadrature.
pub fn lax_member_recursive(u: &PotentialModel, m: usize) -> Result<HierarchyFamily> {
    let us = u.samples();
    let up = differentiate(us, 1)?;
    let mut members = vec![us.clone()];
    let n = us.len();
    for _ in 0..m {
        let prev = members.last().unwrap();
        let p1 = differentiate(prev, 1)?;
        let p2 = differentiate(prev, 2)?;
        let grid = us.grid();
        let integrand_vals: Vec<f64> = (0..n)
            .map(|i| 4.0 * us.value(i) * p1.value(i) + 2.0 * up.value(i) * prev.value(i))
            .collect();
        let integrand = SampledFunction::new(grid, integrand_vals)?;
        let tail = cumulative_integral_from_right(&integrand, TailModel::none())?;
        let edge = p2.value(n - 1);
        let member_vals: Vec<f64> = (0..n)
            .map(|i| p2.value(i) - edge - tail.value(i))
            .collect();
        members.push(SampledFunction::new(grid, member_vals)?);
    }
    Ok(HierarchyFamily {
        kind: HierarchyKind::FlowMember,
        members,
        weights: vec![],
    })
}

/// Closed-form flow members of a reflectionless system:
/// `L_m = -2 sum_k (2 gamma_k)^(2m+1) psi_k^2`.
pub fn lax_member_closed_form(d: &DressedSystem, m: usize) -> Result<SampledFunction> {
    let grid = d.grid();
    let mut vals = vec![0.0f64; grid.len()];
    for (k, psi) in d.psis().iter().enumerate() {
        let gamma = d.seeds().specs()[k].gamma;
        let w = -2.0 * (2.0 * gamma).powi(2 * m as i32 + 1);
        for (v, &p) in vals.iter_mut().zip(psi.values()) {
            *v += w * p * p;
        }
    }
    SampledFunction::new(grid, vals)
}

/// Residual of the ladder relation: applying the third-order operator to
/// member `j` must reproduce the slope of member `j + 1`.
pub fn hierarchy_recursion_residual(
    family: &HierarchyFamily,
    u: &PotentialModel,
    j: usize,
) -> Result<ResidualReport> {
    let lower = family.member(j)?;
    let upper = family.member(j + 1)?;
    let lhs = flow_operator(u.samples(), lower, 0.0)?;
    let rhs = differentiate(upper, 1)?;
    let resid = lhs.zip_with(&rhs, |a, b| a - b)?;
    let kind = match family.kind {
        HierarchyKind::WeightedDensity => "density",
        HierarchyKind::FlowMember => "flow",
    };
    Ok(ResidualReport::from_interior(
        format!("hierarchy-recursion[{kind} j={j}]"),
        &resid,
        HIERARCHY_RECURSION_TOL,
    ))
}

fn validate_triple(snaps: &[EvolutionSnapshot; 3]) -> Result<f64> {
    let (s0, s1, s2) = (&snaps[0], &snaps[1], &snaps[2]);
    if s0.dressed.grid() != s1.dressed.grid() || s1.dressed.grid() != s2.dressed.grid() {
        return Err(Error::GridMismatch);
    }
    let d1 = s1.t - s0.t;
    let d2 = s2.t - s1.t;
    if d1 <= 0.0 || (d1 - d2).abs() > 1e-12 * d1.abs().max(1.0) {
        return Err(Error::BadSnapshotTriple);
    }
    let base = s1.dressed.u0().samples().max_abs();
    if base > 1e-10 {
        return Err(Error::NonZeroBase { max_abs: base });
    }
    match s1.schedule {
        AlphaSchedule::Constant { .. } | AlphaSchedule::LaxPower { .. } => Ok(d1),
        _ => Err(Error::WrongSchedule {
            expected: "constant or lax-power",
            got: s1.schedule.kind_name(),
        }),
    }
}

/// Residual of `U_t + U_xxx - 6 U U_x` over the middle snapshot, with the
/// time slope central-differenced from the outer snapshots.
pub fn kdv_residual(snaps: &[EvolutionSnapshot; 3]) -> Result<ResidualReport> {
    let dt = validate_triple(snaps)?;
    let u1 = snaps[1].dressed.u_n().samples();
    let u_t = snaps[2]
        .dressed
        .u_n()
        .samples()
        .zip_with(snaps[0].dressed.u_n().samples(), |a, b| (a - b) / (2.0 * dt))?;
    let u_xxx = differentiate(u1, 3)?;
    let u_x = differentiate(u1, 1)?;
    let grid = u1.grid();
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| u_t.value(i) + u_xxx.value(i) - 6.0 * u1.value(i) * u_x.value(i))
        .collect();
    let resid = SampledFunction::new(grid, vals)?;
    Ok(ResidualReport::from_interior(
        "kdv-residual",
        &resid,
        KDV_TOL,
    ))
}

/// Consistency of the third-order generator with the parametric flow:
/// residual of `(-4 psi''' + 6 U psi' + 3 U' psi) - psi_t` for state `k`.
pub fn b1_check(snaps: &[EvolutionSnapshot; 3], k: usize) -> Result<ResidualReport> {
    let dt = validate_triple(snaps)?;
    let d = &snaps[1].dressed;
    if k >= d.n_states() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: d.n_states(),
        });
    }
    let psi = d.psi(k);
    let psi_t = snaps[2]
        .dressed
        .psi(k)
        .zip_with(snaps[0].dressed.psi(k), |a, b| (a - b) / (2.0 * dt))?;
    let p3 = differentiate(psi, 3)?;
    let p1 = differentiate(psi, 1)?;
    let u = d.u_n().samples();
    let u1 = differentiate(u, 1)?;
    let grid = psi.grid();
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| {
            -4.0 * p3.value(i) + 6.0 * u.value(i) * p1.value(i) + 3.0 * u1.value(i) * psi.value(i)
                - psi_t.value(i)
        })
        .collect();
    let resid = SampledFunction::new(grid, vals)?;
    Ok(ResidualReport::from_interior(
        format!("lax-pair-consistency[state {k}]"),
        &resid,
        LAX_PAIR_TOL,
    ))
}

/// Drift of the state norms away from one; stays at quadrature level for
/// every schedule.
pub fn norm_drift(s: &EvolutionSnapshot) -> f64 {
    let d = &s.dressed;
    let mut worst = 0.0f64;
    for psi in d.psis() {
        let n = inner_product(psi, psi).expect("same grid");
        worst = worst.max((n - 1.0).abs());
    }
    worst
}
