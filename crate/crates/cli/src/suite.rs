//! The aggregated verification suite: a fixed matrix of identity checks
//! over built-in systems (vanishing and barrier bases, one to three added
//! states, the three schedule kinds), each reported with its pinned
//! tolerance. Checks are grouped into named families so a run can be
//! filtered and tolerances overridden per family.

use dressing_core::dressing::*;
use dressing_core::evolution::*;
use dressing_core::greens::*;
use dressing_core::numerics::*;
use dressing_core::report::ResidualReport;
use dressing_core::schrodinger::*;

use crate::config::Validated;
use crate::error::{CliError, CliResult};

pub const SUITE_FAMILIES: [&str; 10] = [
    "dressing",
    "spectral",
    "wronskian",
    "kernel",
    "roundtrip",
    "scattering",
    "evolution",
    "kdv",
    "hierarchy",
    "greens",
];

const RT2: f64 = std::f64::consts::SQRT_2;

struct Fixture {
    label: String,
    u0: PotentialModel,
    seeds: SeedSet,
    dressed: DressedSystem,
}

fn fixture(label: &str, u0: PotentialModel, specs: &[(f64, f64)]) -> CliResult<Fixture> {
    let s: Vec<BoundStateSpec> = specs
        .iter()
        .map(|&(g, c)| BoundStateSpec::new(g, c))
        .collect();
    let seeds = seed_set(&u0, &s)?;
    let dressed = dress(&u0, &seeds)?;
    Ok(Fixture {
        label: label.to_string(),
        u0,
        seeds,
        dressed,
    })
}

/// Deterministic perturbation noise in [-1, 1] from a fixed-seed splitmix.
fn noise(i: u64) -> f64 {
    let mut z = i.wrapping_add(0x9e3779b97f4a7c15).wrapping_mul(0xbf58476d1ce4e5b9);
    z ^= z >> 31;
    z = z.wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 27;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn perturbed(d: &DressedSystem, eps: f64) -> CliResult<PotentialModel> {
    let samples = d.u_n().samples();
    let grid = samples.grid();
    let vals: Vec<f64> = samples
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v + eps * noise(i as u64))
        .collect();
    Ok(PotentialModel::from_samples(
        format!("{} (perturbed)", d.u_n().label()),
        SampledFunction::new(grid, vals)?,
        TailModel::None,
        TailModel::None,
    ))
}

pub struct SuiteRun {
    pub reports: Vec<ResidualReport>,
    pub all_pass: bool,
}

struct Collector<'a> {
    reports: Vec<ResidualReport>,
    filter: Option<&'a str>,
    cfg: &'a Validated,
}

impl<'a> Collector<'a> {
    fn family_on(&self, family: &str) -> bool {
        self.filter.is_none_or(|f| f == family)
    }

    fn push(&mut self, family: &str, report: ResidualReport) {
        let tol = self.cfg.tolerance(family, report.tolerance);
        self.reports.push(report.with_tolerance(tol));
    }

    fn push_scalar(&mut self, family: &str, name: String, value: f64, tol: f64) {
        let tol = self.cfg.tolerance(family, tol);
        self.reports
            .push(ResidualReport::from_scalar(name, value, tol));
    }
}

pub fn run_suite(
    cfg: &Validated,
    filter: Option<&str>,
    perturb: Option<f64>,
) -> CliResult<SuiteRun> {
    if let Some(f) = filter {
        if !SUITE_FAMILIES.contains(&f) {
            return Err(CliError::config(format!(
                "unknown suite family `{f}` (expected one of {})",
                SUITE_FAMILIES.join(", ")
            )));
        }
    }
    let grid = cfg.grid;
    let zero = PotentialModel::zero(grid);
    let barrier = PotentialModel::gaussian_barrier(grid, 0.5, 1.0)?;

    let mut fixtures = vec![
        fixture("zero N=1", zero.clone(), &[(1.0, RT2)])?,
        fixture("zero N=2", zero.clone(), &[(1.0, RT2), (2.0, 1.0)])?,
        fixture(
            "zero N=3",
            zero.clone(),
            &[(1.0, RT2), (2.0, 1.0), (0.5, 1.0)],
        )?,
        fixture("barrier N=1", barrier.clone(), &[(1.0, 1.0)])?,
        fixture("barrier N=2", barrier.clone(), &[(1.0, 1.0), (0.5, 0.8)])?,
    ];
    // a user-supplied system joins the structural families
    if !cfg.states.is_empty() {
        let specs: Vec<(f64, f64)> = cfg.states.iter().map(|s| (s.gamma, s.c)).collect();
        fixtures.push(fixture("config", cfg.u0.clone(), &specs)?);
    }
    // soft two-soliton used by the derivative-heavy hierarchy checks
    let soft = fixture("zero N=2 soft", zero.clone(), &[(0.5, 1.0), (1.0, RT2)])?;

    let mut col = Collector {
        reports: Vec::new(),
        filter,
        cfg,
    };

    // ---- dressing structure -------------------------------------------
    if col.family_on("dressing") {
        for f in &fixtures {
            let (u_eff, tag) = match perturb {
                Some(eps) => (perturbed(&f.dressed, eps)?, " (perturbed)"),
                None => (f.dressed.u_n().clone(), ""),
            };
            for k in 0..f.dressed.n_states() {
                let gamma = f.seeds.specs()[k].gamma;
                let r = eigen_equation_residual(&u_eff, f.dressed.psi(k), -gamma * gamma)?;
                col.push_scalar(
                    "dressing",
                    format!("eigen-residual[{}{tag} state {k}]", f.label),
                    r,
                    1e-5,
                );
            }
            col.push_scalar(
                "dressing",
                format!("orthonormality[{}]", f.label),
                f.dressed.orthonormality_deviation(),
                1e-6,
            );
            col.push_scalar(
                "dressing",
                format!("logdet-edge[{}]", f.label),
                f.dressed.logdet_a().value(grid.len() - 1),
                1e-8,
            );
            let w_max = f
                .dressed
                .w()
                .values()
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            col.push_scalar(
                "dressing",
                format!("w-nonpositive[{}]", f.label),
                w_max.max(0.0),
                1e-10,
            );
            col.push("dressing", {
                let mut r = potential_route_consistency(&f.dressed)?;
                r.name = format!("potential-route-consistency[{}]", f.label);
                r
            });
        }
    }

    // ---- independent spectrum check ------------------------------------
    if col.family_on("spectral") {
        for f in &fixtures {
            let u_eff = match perturb {
                Some(eps) => perturbed(&f.dressed, eps)?,
                None => f.dressed.u_n().clone(),
            };
            let gamma_max = f
                .seeds
                .gammas()
                .iter()
                .cloned()
                .fold(0.5f64, f64::max)
                + 0.5;
            let found = shoot_bound_states(&u_eff, gamma_max, 1e-9)?;
            let mut want: Vec<f64> = f.seeds.gammas().iter().map(|g| -g * g).collect();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let dev = if found.len() == want.len() {
                found
                    .energies
                    .iter()
                    .zip(&want)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            } else {
                f64::INFINITY
            };
            col.push_scalar(
                "spectral",
                format!("spectrum-match[{}]", f.label),
                dev,
                1e-6,
            );
        }
    }

    // ---- cross-Wronskian identities ------------------------------------
    if col.family_on("wronskian") {
        for f in &fixtures {
            for mut r in wronskian_diagnostics(&f.dressed)? {
                r.name = format!("{}[{}]", r.name, f.label);
                col.push("wronskian", r);
            }
        }
    }

    // ---- kernel identities ---------------------------------------------
    if col.family_on("kernel") {
        for f in &fixtures {
            let mut slope = kernel_diagonal_slope_residual(&f.dressed)?;
            slope.name = format!("kernel-diagonal-slope[{}]", f.label);
            col.push("kernel", slope);
            for mut r in kernel_reconstruction_residuals(&f.dressed)? {
                r.name = format!("{}[{}]", r.name, f.label);
                col.push("kernel", r);
            }
        }
    }

    // ---- removal round trip ---------------------------------------------
    if col.family_on("roundtrip") {
        for f in &fixtures {
            let un = undress(&f.dressed)?;
            let mut worst = 0.0f64;
            let mut worst_det = 0.0f64;
            for i in 0..grid.len() {
                worst = worst.max((un.u0.samples().value(i) - f.u0.samples().value(i)).abs());
                worst_det = worst_det.max(
                    ((f.dressed.logdet_a().value(i) + un.logdet_b.value(i)).exp() - 1.0).abs(),
                );
            }
            col.push_scalar(
                "roundtrip",
                format!("roundtrip-potential[{}]", f.label),
                worst,
                1e-5,
            );
            col.push_scalar(
                "roundtrip",
                format!("det-product[{}]", f.label),
                worst_det,
                1e-6,
            );
        }
    }

    // ---- scattering -------------------------------------------------------
    if col.family_on("scattering") {
        let ks: Vec<f64> = (0..25).map(|i| 0.5 + 2.5 * i as f64 / 24.0).collect();
        // reflectionless family
        let f1 = &fixtures[0];
        let amps = ScatteringAmplitudes::scan(f1.dressed.u_n(), &ks)?;
        let worst_r = amps
            .reflection
            .iter()
            .fold(0.0f64, |m, r| m.max(r.norm()));
        col.push_scalar(
            "scattering",
            format!("reflectionless[{}]", f1.label),
            worst_r,
            1e-4,
        );
        // general base: modulus invariance, flux, and the squared-factor law
        let fb = &fixtures[3];
        let base = ScatteringAmplitudes::scan(&fb.u0, &ks)?;
        let dressed = ScatteringAmplitudes::scan(fb.dressed.u_n(), &ks)?;
        let mut worst_mod = 0.0f64;
        let mut worst_sq = 0.0f64;
        for (i, &k) in ks.iter().enumerate() {
            let f = scattering_relation_factor(fb.seeds.specs(), k)?;
            worst_mod =
                worst_mod.max((dressed.reflection[i].norm() - base.reflection[i].norm()).abs());
            worst_sq =
                worst_sq.max((dressed.reflection[i] - base.reflection[i] * f * f).norm());
        }
        col.push_scalar(
            "scattering",
            format!("modulus-invariance[{}]", fb.label),
            worst_mod,
            1e-3,
        );
        col.push_scalar(
            "scattering",
            format!("product-law-squared[{}]", fb.label),
            worst_sq,
            1e-3,
        );
        col.push_scalar(
            "scattering",
            format!("flux-conservation[{}]", fb.label),
            dressed.max_flux_deviation().max(base.max_flux_deviation()),
            1e-6,
        );
    }

    // ---- parametric evolution ---------------------------------------------
    if col.family_on("evolution") {
        let kdv = AlphaSchedule::LaxPower {
            exponent: 1,
            betas: None,
        };
        let cases: Vec<(&Fixture, AlphaSchedule, f64)> = vec![
            (
                &fixtures[0],
                AlphaSchedule::Constant { alphas: vec![0.25] },
                FD_TIME_STEP,
            ),
            (
                &fixtures[1],
                AlphaSchedule::Constant {
                    alphas: vec![0.1, 0.3],
                },
                FD_TIME_STEP,
            ),
            (&fixtures[0], kdv.clone(), FD_TIME_STEP),
            (&soft, kdv.clone(), FD_TIME_STEP),
            // the stiff two-state flow needs a smaller probe step for the
            // same 1e-4 agreement
            (&fixtures[1], kdv.clone(), 2e-5),
            (
                &fixtures[0],
                AlphaSchedule::Greens { e: 1.0, order: 0 },
                FD_TIME_STEP,
            ),
            (
                &fixtures[1],
                AlphaSchedule::Greens { e: 1.0, order: 0 },
                FD_TIME_STEP,
            ),
            (
                &fixtures[3],
                AlphaSchedule::Constant { alphas: vec![0.2] },
                FD_TIME_STEP,
            ),
        ];
        for (f, sched, dt) in cases {
            let s = snapshot(&f.u0, &f.seeds, &sched, 0.1)?;
            let rhs = du_dt_rhs(&s)?;
            let fd = u_time_derivative_fd(&s, dt)?;
            let resid = rhs.zip_with(&fd, |a, b| a - b)?;
            col.push(
                "evolution",
                ResidualReport::from_interior(
                    format!("du-dt-law[{} {}]", f.label, sched.kind_name()),
                    &resid,
                    1e-4,
                ),
            );
            let (lhs, rv) = sum_rule(&s)?;
            col.push_scalar(
                "evolution",
                format!("sum-rule[{} {}]", f.label, sched.kind_name()),
                lhs - rv,
                1e-4,
            );
            for k in 0..f.dressed.n_states().min(1) {
                let pr = psi_dt_rhs(&s, k)?;
                let pf = psi_time_derivative_fd(&s, k, dt)?;
                let pd = pr.zip_with(&pf, |a, b| a - b)?;
                col.push(
                    "evolution",
                    ResidualReport::from_interior(
                        format!("psi-dt-law[{} {} state {k}]", f.label, sched.kind_name()),
                        &pd,
                        1e-5,
                    ),
                );
                let rate = inner_product(&pr, s.dressed.psi(k))?;
                col.push_scalar(
                    "evolution",
                    format!("norm-rate[{} {} state {k}]", f.label, sched.kind_name()),
                    rate,
                    1e-6,
                );
            }
            col.push_scalar(
                "evolution",
                format!("norm-drift[{} {}]", f.label, sched.kind_name()),
                norm_drift(&s),
                1e-6,
            );
        }
    }

    // ---- integrable limit ---------------------------------------------------
    if col.family_on("kdv") {
        let kdv = AlphaSchedule::LaxPower {
            exponent: 1,
            betas: None,
        };
        let f1 = &fixtures[0];
        let s0 = snapshot(&f1.u0, &f1.seeds, &kdv, 0.0)?;
        let s25 = snapshot(&f1.u0, &f1.seeds, &kdv, 0.25)?;
        let shift = (1.0 / grid.spacing()).round() as usize;
        let mut worst_tr = 0.0f64;
        if shift < grid.len() {
            for i in 0..grid.len() - shift {
                worst_tr = worst_tr.max(
                    (s25.dressed.u_n().samples().value(i + shift)
                        - s0.dressed.u_n().samples().value(i))
                    .abs(),
                );
            }
        }
        col.push_scalar("kdv", format!("translation[{}]", f1.label), worst_tr, 1e-5);

        let trip = |f: &Fixture, dt: f64| -> CliResult<[EvolutionSnapshot; 3]> {
            Ok([
                snapshot(&f.u0, &f.seeds, &kdv, 0.1 - dt)?,
                snapshot(&f.u0, &f.seeds, &kdv, 0.1)?,
                snapshot(&f.u0, &f.seeds, &kdv, 0.1 + dt)?,
            ])
        };
        for (f, dt) in [(&fixtures[0], 1e-4), (&fixtures[1], 2e-5)] {
            let snaps = trip(f, dt)?;
            let mut r = kdv_residual(&snaps)?;
            r.name = format!("kdv-residual[{}]", f.label);
            col.push("kdv", r);
            for k in 0..f.dressed.n_states() {
                let mut b = b1_check(&snaps, k)?;
                b.name = format!("lax-pair-consistency[{} state {k}]", f.label);
                col.push("kdv", b);
            }
        }
    }

    // ---- density and flow hierarchies ---------------------------------------
    if col.family_on("hierarchy") {
        for f in [&fixtures[0], &fixtures[1], &fixtures[3]] {
            let sched = AlphaSchedule::Constant {
                alphas: vec![0.0; f.dressed.n_states()],
            };
            let s = snapshot(&f.u0, &f.seeds, &sched, 0.0)?;
            for k in 0..f.dressed.n_states() {
                let mut r = psisq_identity_residual(&s, k)?;
                r.name = format!("density-identity[{} state {k}]", f.label);
                col.push("hierarchy", r);
            }
        }
        for f in [&fixtures[0], &soft] {
            let sched = AlphaSchedule::Constant {
                alphas: vec![0.0; f.dressed.n_states()],
            };
            let s = snapshot(&f.u0, &f.seeds, &sched, 0.0)?;
            let betas = f.dressed.gammas();
            let fam = q_hierarchy(&s, &betas, 3)?;
            for j in 0..3 {
                let mut r = hierarchy_recursion_residual(&fam, f.dressed.u_n(), j)?;
                r.name = format!("density-ladder-recursion[{} j={j}]", f.label);
                col.push("hierarchy", r);
            }
        }
        // flow members against the closed form on reflectionless systems
        for (f, m_max) in [(&fixtures[0], 2usize), (&soft, 1)] {
            let fam = lax_member_recursive(f.dressed.u_n(), m_max)?;
            for m in 0..=m_max {
                let cf = lax_member_closed_form(&f.dressed, m)?;
                let diff = fam.member(m)?.zip_with(&cf, |a, b| a - b)?;
                col.push(
                    "hierarchy",
                    ResidualReport::from_interior(
                        format!("flow-member-closed-form[{} m={m}]", f.label),
                        &diff,
                        1e-4,
                    ),
                );
            }
        }
        let fam = lax_member_recursive(fixtures[0].dressed.u_n(), 1)?;
        let i0 = grid.len() / 2;
        col.push_scalar(
            "hierarchy",
            "flow-member-origin[zero N=1]".to_string(),
            fam.member(1)?.value(i0) + 8.0,
            1e-3,
        );
    }

    // ---- resolvent sector ----------------------------------------------------
    if col.family_on("greens") {
        let mut worst_free = 0.0f64;
        let gd_free = xi_pair(&zero, -1.0)?;
        for i in grid.interior() {
            worst_free = worst_free.max((gd_free.diag.value(i) - 0.5).abs());
        }
        col.push_scalar("greens", "free-diagonal[E=-1]".to_string(), worst_free, 1e-6);

        for (label, u, e) in [
            ("free", &zero, -1.0),
            ("zero N=1 dressed", fixtures[0].dressed.u_n(), -2.25),
            ("barrier", &barrier, -1.0),
        ] {
            let gd = xi_pair(u, e)?;
            col.push_scalar(
                "greens",
                format!("wronskian-constancy[{label} E={e}]"),
                gd.wronskian_spread(),
                1e-6,
            );
            let mut r = greens_identity_residual(&gd, u)?;
            r.name = format!("greens-diagonal-identity[{label} E={e}]");
            col.push("greens", r);
        }

        let h1 = discrete_g_hierarchy(&fixtures[0].dressed, 1.0, 2, true)?;
        let h2 = discrete_g_hierarchy(&fixtures[1].dressed, 2.0, 2, true)?;
        for (label, h, d) in [
            ("zero N=1 E=1", &h1, &fixtures[0].dressed),
            ("zero N=2 E=2", &h2, &fixtures[1].dressed),
        ] {
            for j in 0..2 {
                let mut r = g_recursion_residual(h, d.u_n(), j)?;
                r.name = format!("greens-recursion[{label} j={j}]");
                col.push("greens", r);
            }
        }
        for (label, h) in [("zero N=1 E=1", &h1), ("zero N=2 E=2", &h2)] {
            let mut r = g_convolution_check(h, 0)?;
            r.name = format!("greens-convolution[{label} j=0 sigma={CONVOLUTION_SIGN}]");
            col.push("greens", r);
        }
        for (label, d, e) in [
            ("zero N=1", &fixtures[0].dressed, 1.0),
            ("zero N=2", &fixtures[1].dressed, 1.0),
        ] {
            let h = discrete_g_hierarchy(d, e, 0, false)?;
            let (lhs, rhs) = g_sum_rule(&h)?;
            col.push_scalar(
                "greens",
                format!("greens-sum-rule[{label} E={e}]"),
                lhs - rhs,
                1e-6,
            );
        }
        for j in 0..2 {
            let mut r = greens_evolution_check(&fixtures[1].u0, &fixtures[1].seeds, 1.0, j, 0.0)?;
            r.name = format!("greens-evolution-law[zero N=2 j={j}]");
            col.push("greens", r);
        }
        let ha = discrete_g_hierarchy(&fixtures[0].dressed, -1.0 + 0.1, 0, false)?;
        let hb = discrete_g_hierarchy(&fixtures[0].dressed, -1.0 + 0.01, 0, false)?;
        let ratio = g_sum_rule(&hb)?.0 / g_sum_rule(&ha)?.0;
        col.push_scalar(
            "greens",
            "greens-pole-scaling[zero N=1]".to_string(),
            ratio - 10.0,
            0.2,
        );
    }

    let all_pass = col.reports.iter().all(|r| r.pass);
    Ok(SuiteRun {
        reports: col.reports,
        all_pass,
    })
}
