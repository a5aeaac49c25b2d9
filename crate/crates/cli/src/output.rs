//! CSV tables and minimal SVG line plots.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// `v` in scientific notation with `digits` significant digits.
pub fn format_value(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), v)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes `rows` under `header`; every cell is a number.
pub fn write_csv<'a, I>(path: &Path, header: &[&str], rows: I, digits: usize) -> CliResult<usize>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header)?;
    let mut count = 0;
    for row in rows {
        w.write_record(row.iter().map(|v| format_value(*v, digits)))?;
        count += 1;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(count)
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// One panel per series, stacked vertically, sharing the abscissa `xs`.
pub fn write_svg(
    path: &Path,
    title: &str,
    xs: &[f64],
    series: &[(&str, Vec<f64>)],
) -> CliResult<()> {
    let (width, panel, margin) = (720.0, 160.0, 40.0);
    let height = margin + series.len() as f64 * (panel + margin);
    let (x_lo, x_hi) = bounds(xs);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <text x=\"{margin}\" y=\"20\">{title}</text>\n"
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let top = margin + k as f64 * (panel + margin);
        let (y_lo, y_hi) = bounds(ys);
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| {
                let px = margin + (x - x_lo) / (x_hi - x_lo) * (width - 2.0 * margin);
                let py = top + panel - (y - y_lo) / (y_hi - y_lo) * panel;
                format!("{px:.2},{py:.2}")
            })
            .collect();
        svg += &format!(
            "<rect x=\"{margin}\" y=\"{top}\" width=\"{}\" height=\"{panel}\" fill=\"none\" stroke=\"#999\"/>\n\
             <text x=\"{}\" y=\"{}\">{name} [{y_lo:.4e}, {y_hi:.4e}]</text>\n\
             <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"{}\"/>\n",
            width - 2.0 * margin,
            margin + 4.0,
            top + 14.0,
            COLORS[k % COLORS.len()],
            points.join(" ")
        );
    }
    svg += "</svg>\n";
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(svg.as_bytes())
        .map_err(|e| CliError::io(path, e))
}

/// Finite range of `v`, widened when degenerate.
fn bounds(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v
        .iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}
