//! `scatter`: reflection/transmission amplitudes of the base and dressed
//! potentials over a wavenumber sweep, together with the single-factor
//! product-law prediction and its error column.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use dressing_core::dressing::{dress, scattering_relation_factor, seed_set};
use dressing_core::schrodinger::reflection_transmission;

use crate::config::Validated;
use crate::emit::write_csv;
use crate::error::{CliError, CliResult};

pub fn run(cfg: &Validated, out: &Path) -> CliResult<Vec<PathBuf>> {
    let ks = cfg
        .k_values
        .as_ref()
        .ok_or_else(|| CliError::config("scatter requires a k_range"))?;

    let seeds = seed_set(&cfg.u0, &cfg.states)?;
    let d = dress(&cfg.u0, &seeds)?;

    let rows: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| -> Result<Vec<f64>, dressing_core::Error> {
            let (r0, t0) = reflection_transmission(&cfg.u0, k)?;
            let (rn, tn) = reflection_transmission(d.u_n(), k)?;
            let factor = scattering_relation_factor(seeds.specs(), k)?;
            let predicted: Complex64 = r0 * factor;
            Ok(vec![
                k,
                r0.re,
                r0.im,
                t0.re,
                t0.im,
                rn.re,
                rn.im,
                tn.re,
                tn.im,
                predicted.re,
                predicted.im,
                (rn - predicted).norm(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;

    let path = out.join("scatter.csv");
    write_csv(
        &path,
        &[
            "k", "re_r0", "im_r0", "re_t0", "im_t0", "re_rn", "im_rn", "re_tn", "im_tn",
            "re_predicted", "im_predicted", "abs_error",
        ],
        rows,
    )?;
    Ok(vec![path])
}
