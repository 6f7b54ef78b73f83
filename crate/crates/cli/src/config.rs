//! Run configuration: a single JSON document validated up front, before
//! any computation starts. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use dressing_core::dressing::BoundStateSpec;
use dressing_core::evolution::AlphaSchedule;
use dressing_core::numerics::{make_grid, Grid, SampledFunction, TailModel};
use dressing_core::schrodinger::PotentialModel;

use crate::error::{CliError, CliResult};
use crate::suite::SUITE_FAMILIES;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            x_min: -30.0,
            x_max: 30.0,
            n: 6001,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum U0Config {
    #[default]
    Zero,
    GaussianBarrier { height: f64, width: f64 },
    Table { path: String },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub gamma: f64,
    pub c: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Constant {
        alphas: Vec<f64>,
    },
    Lax {
        j: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        betas: Option<Vec<f64>>,
    },
    Greens {
        e: f64,
        j: usize,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KRangeConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub u0: U0Config,
    #[serde(default)]
    pub states: Vec<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<KRangeConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(e.to_string()))
    }

    /// Stable canonical serialisation used for the config hash.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

/// Fully validated inputs, ready for the library.
pub struct Validated {
    pub grid: Grid,
    pub u0: PotentialModel,
    pub states: Vec<BoundStateSpec>,
    pub schedule: Option<AlphaSchedule>,
    pub times: Option<Vec<f64>>,
    pub k_values: Option<Vec<f64>>,
    pub tolerances: BTreeMap<String, f64>,
    pub config_hash: String,
}

impl Validated {
    pub fn tolerance(&self, family: &str, default: f64) -> f64 {
        self.tolerances.get(family).copied().unwrap_or(default)
    }
}

fn load_table_potential(grid: Grid, path: &str) -> CliResult<PotentialModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read table potential {path}: {e}")))?;
    let mut xs: Vec<f64> = Vec::new();
    let mut us: Vec<f64> = Vec::new();
    for line in text.lines() {
        let mut parts = line.split(',').map(str::trim);
        let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
            continue;
        };
        if let (Ok(x), Ok(u)) = (a.parse::<f64>(), b.parse::<f64>()) {
            xs.push(x);
            us.push(u);
        }
    }
    if xs.len() < 2 {
        return Err(CliError::config(format!(
            "table potential {path} holds fewer than two samples"
        )));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config(format!(
            "table potential {path} must have strictly increasing x"
        )));
    }
    // linear resample onto the run grid; zero outside the tabulated range
    let samples = SampledFunction::from_fn(grid, |x| {
        if x <= xs[0] || x >= xs[xs.len() - 1] {
            return 0.0;
        }
        let idx = xs.partition_point(|&v| v <= x) - 1;
        let f = (x - xs[idx]) / (xs[idx + 1] - xs[idx]);
        us[idx] + f * (us[idx + 1] - us[idx])
    })
    .map_err(|e| CliError::config(format!("table potential {path}: {e}")))?;
    let u = PotentialModel::from_samples(
        format!("table({path})"),
        samples,
        TailModel::None,
        TailModel::None,
    );
    if u.edge_magnitude() > 1e-8 {
        return Err(CliError::config(format!(
            "table potential {path} does not decay below 1e-8 at the grid edges (max edge |U| = {:.3e})",
            u.edge_magnitude()
        )));
    }
    Ok(u)
}

pub fn validate(cfg: &RunConfig) -> CliResult<Validated> {
    let grid = make_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n)
        .map_err(|e| CliError::config(e.to_string()))?;

    let u0 = match &cfg.u0 {
        U0Config::Zero => PotentialModel::zero(grid),
        U0Config::GaussianBarrier { height, width } => {
            if !(*width > 0.0) {
                return Err(CliError::config(format!(
                    "gaussian_barrier width must be positive, got {width}"
                )));
            }
            PotentialModel::gaussian_barrier(grid, *height, *width)
                .map_err(|e| CliError::config(e.to_string()))?
        }
        U0Config::Table { path } => load_table_potential(grid, path)?,
    };

    let mut states = Vec::with_capacity(cfg.states.len());
    for (i, s) in cfg.states.iter().enumerate() {
        if !(s.gamma > 0.0) || !s.gamma.is_finite() {
            return Err(CliError::config(format!(
                "states[{i}].gamma must be positive, got {}",
                s.gamma
            )));
        }
        if !(s.c > 0.0) || !s.c.is_finite() {
            return Err(CliError::config(format!(
                "states[{i}].c must be positive, got {}",
                s.c
            )));
        }
        states.push(BoundStateSpec::new(s.gamma, s.c));
    }
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            if (states[i].gamma - states[j].gamma).abs() < 1e-6 {
                return Err(CliError::config(format!(
                    "states[{i}] and states[{j}] have duplicate gamma"
                )));
            }
        }
    }

    let schedule = match &cfg.schedule {
        None => None,
        Some(ScheduleConfig::Constant { alphas }) => {
            if alphas.len() != states.len() {
                return Err(CliError::config(format!(
                    "schedule.alphas has {} entries for {} states",
                    alphas.len(),
                    states.len()
                )));
            }
            Some(AlphaSchedule::Constant {
                alphas: alphas.clone(),
            })
        }
        Some(ScheduleConfig::Lax { j, betas }) => {
            if let Some(b) = betas {
                if b.len() != states.len() {
                    return Err(CliError::config(format!(
                        "schedule.betas has {} entries for {} states",
                        b.len(),
                        states.len()
                    )));
                }
            }
            Some(AlphaSchedule::LaxPower {
                exponent: *j,
                betas: betas.clone(),
            })
        }
        // pole proximity is left to the numerical guards (exit 3): the
        // offending spectrum may only be known after construction
        Some(ScheduleConfig::Greens { e, j }) => {
            Some(AlphaSchedule::Greens { e: *e, order: *j })
        }
    };

    let times = match &cfg.times {
        None => None,
        Some(ts) => {
            if ts.iter().any(|t| !t.is_finite()) {
                return Err(CliError::config("times must be finite".to_string()));
            }
            Some(ts.clone())
        }
    };

    let k_values = match &cfg.k_range {
        None => None,
        Some(kr) => {
            if kr.count == 0 {
                return Err(CliError::config("k_range.count must be at least 1".to_string()));
            }
            if !(kr.k_min > 0.0) || kr.k_max < kr.k_min {
                return Err(CliError::config(format!(
                    "k_range must satisfy 0 < k_min <= k_max, got [{}, {}]",
                    kr.k_min, kr.k_max
                )));
            }
            let ks = if kr.count == 1 {
                vec![kr.k_min]
            } else {
                (0..kr.count)
                    .map(|i| {
                        kr.k_min + (kr.k_max - kr.k_min) * i as f64 / (kr.count - 1) as f64
                    })
                    .collect()
            };
            Some(ks)
        }
    };

    for key in cfg.tolerances.keys() {
        if !SUITE_FAMILIES.contains(&key.as_str()) {
            return Err(CliError::config(format!(
                "unknown tolerance key `{key}` (expected one of {})",
                SUITE_FAMILIES.join(", ")
            )));
        }
    }
    for (key, v) in &cfg.tolerances {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(CliError::config(format!(
                "tolerance `{key}` must be a positive number"
            )));
        }
    }

    Ok(Validated {
        grid,
        u0,
        states,
        schedule,
        times,
        k_values,
        tolerances: cfg.tolerances.clone(),
        config_hash: fnv1a_hex(cfg.canonical().as_bytes()),
    })
}

/// FNV-1a 64-bit hash, hex-encoded; stable across runs and platforms.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
