//! Static line plots of emitted CSV columns. One polyline per column
//! against the first column, with a minimal frame and legend.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

pub fn render_csv(csv_path: &Path, svg_path: &Path) -> CliResult<()> {
    let text = fs::read_to_string(csv_path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Numerical(format!("{}: empty csv", csv_path.display())))?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for line in lines {
        for (i, cell) in line.split(',').enumerate() {
            if i < columns.len() {
                if let Ok(v) = cell.trim().parse::<f64>() {
                    columns[i].push(v);
                }
            }
        }
    }
    if columns.len() < 2 || columns[0].len() < 2 {
        return Err(CliError::Numerical(format!(
            "{}: nothing to plot",
            csv_path.display()
        )));
    }

    let (x_lo, x_hi) = span(&columns[0]);
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for col in &columns[1..] {
        let (lo, hi) = span(col);
        y_lo = y_lo.min(lo);
        y_hi = y_hi.max(hi);
    }
    if y_hi - y_lo < 1e-300 {
        y_hi += 1.0;
        y_lo -= 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#444\"/>\n"
    ));
    // axis labels at the extremes
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{:.4}</text>\n",
        MARGIN_L,
        HEIGHT - 18.0,
        x_lo
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{:.4}</text>\n",
        WIDTH - MARGIN_R,
        HEIGHT - 18.0,
        x_hi
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n",
        MARGIN_L - 6.0,
        HEIGHT - MARGIN_B,
        y_lo
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n",
        MARGIN_L - 6.0,
        MARGIN_T + 10.0,
        y_hi
    ));

    for (ci, col) in columns[1..].iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let pts: Vec<String> = columns[0]
            .iter()
            .zip(col)
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            MARGIN_L + 8.0,
            MARGIN_T + 16.0 + 14.0 * ci as f64,
            header.get(ci + 1).map(String::as_str).unwrap_or("?")
        ));
    }
    out.push_str("</svg>\n");

    let mut file = fs::File::create(svg_path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

fn span(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Render every CSV emitted into `dir` next to itself.
pub fn render_all(paths: &[std::path::PathBuf]) -> CliResult<()> {
    for p in paths {
        let svg = p.with_extension("svg");
        render_csv(p, &svg)?;
    }
    Ok(())
}
