//! CSV tables and SVG plots.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use plotters::prelude::*;

use crate::config::format_complex;
use crate::experiments::{ExperimentResult, MethodResult, PropagatorErrors};

pub const ERROR_HEADER: [&str; 9] = [
    "method",
    "n",
    "k",
    "err_volume",
    "err_interface",
    "gfm_bound",
    "interface_estimate",
    "gander_hairer_bound",
    "linear_bound",
];

pub const DIAGNOSTICS_HEADER: [&str; 13] = [
    "method",
    "lambda_dt",
    "alpha",
    "beta",
    "gamma",
    "delta",
    "alpha_bar",
    "beta_bar",
    "gamma_bar",
    "delta_bar",
    "inf_norm_R",
    "spectral_radius_R",
    "consistency_residual",
];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cell(table: &Option<Vec<Vec<f64>>>, k: usize, n: usize) -> String {
    table.as_ref().map(|t| num(t[k][n])).unwrap_or_default()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_errors<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    use crate::config::OutputKind;
    let exp = &result.experiment;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ERROR_HEADER)?;
    for m in &result.methods {
        let label = m.method.label();
        for k in 0..=exp.iterations {
            for n in 1..=exp.n_blocks {
                let volume = if exp.wants(OutputKind::VolumeError) {
                    num(m.run.volume_errors[k][n])
                } else {
                    String::new()
                };
                let interface = if exp.wants(OutputKind::InterfaceError) {
                    num(m.run.interface_errors[k][n])
                } else {
                    String::new()
                };
                w.write_record([
                    label.clone(),
                    n.to_string(),
                    k.to_string(),
                    volume,
                    interface,
                    cell(&m.gfm_bound, k, n),
                    cell(&m.interface_estimate, k, n),
                    cell(&m.gander_hairer, k, n),
                    cell(&m.linear_bound, k, n),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIAGNOSTICS_HEADER)?;
    let lam_dt = format_complex(result.experiment.lam_dt());
    for m in &result.methods {
        let d = &m.diagnostics;
        w.write_record([
            m.method.label(),
            lam_dt.clone(),
            num(d.volume.alpha),
            num(d.volume.beta),
            num(d.volume.gamma),
            num(d.volume.delta),
            num(d.interface.alpha_bar),
            num(d.interface.beta_bar),
            num(d.interface.gamma_bar),
            num(d.interface.delta_bar),
            opt(d.inf_norm_r),
            opt(d.spectral_radius_r),
            num(d.consistency_residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const PROPAGATOR_HEADER: [&str; 5] = ["configuration", "fine", "approx", "coarse", "coarse_approx"];

pub fn write_propagators<W: Write>(out: W, rows: &[(String, PropagatorErrors)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROPAGATOR_HEADER)?;
    for (name, e) in rows {
        w.write_record([name.clone(), num(e.fine), opt(e.approx), opt(e.coarse), opt(e.coarse_approx)])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

/// Writes `<name>.csv` and, if requested, `<name>_diagnostics.csv`.
pub fn write_experiment(dir: &Path, result: &ExperimentResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let name = &result.experiment.name;
    let errors = dir.join(format!("{name}.csv"));
    write_errors(create(&errors)?, result)?;
    let mut written = vec![errors];
    if result.experiment.wants(crate::config::OutputKind::Diagnostics) {
        let diag = dir.join(format!("{name}_diagnostics.csv"));
        write_diagnostics(create(&diag)?, result)?;
        written.push(diag);
    }
    Ok(written)
}

pub fn write_propagator_file(dir: &Path, name: &str, rows: &[(String, PropagatorErrors)]) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(format!("{name}.csv"));
    write_propagators(create(&path)?, rows)?;
    Ok(path)
}

const PLOT_FLOOR: f64 = 1e-16;

/// Series plotted for one method: errors, and bounds when a single method is shown.
fn series(m: &MethodResult, n: usize, with_bounds: bool) -> Vec<(String, Vec<f64>)> {
    let column = |table: &Vec<Vec<f64>>| table.iter().map(|row| row[n]).collect::<Vec<_>>();
    let label = m.method.label();
    let mut out = vec![
        (format!("{label} volume error"), column(&m.run.volume_errors)),
        (format!("{label} interface error"), column(&m.run.interface_errors)),
    ];
    if with_bounds {
        for (name, table) in [
            ("GFM bound", &m.gfm_bound),
            ("interface estimate", &m.interface_estimate),
            ("Gander-Hairer bound", &m.gander_hairer),
            ("linear bound", &m.linear_bound),
        ] {
            if let Some(t) = table {
                out.push((format!("{label} {name}"), column(t)));
            }
        }
    }
    out
}

/// Semilog plot of the errors at the last block against the iteration index.
pub fn write_svg(path: &Path, result: &ExperimentResult) -> Result<()> {
    let exp = &result.experiment;
    let n = exp.n_blocks;
    let single = result.methods.len() == 1;
    let all: Vec<(String, Vec<f64>)> = result
        .methods
        .iter()
        .flat_map(|m| series(m, n, single))
        .collect();
    let max = all
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(PLOT_FLOOR, f64::max);

    let root = SVGBackend::new(path, (800, 520)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{} (n = {n})", exp.name), ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(64)
        .build_cartesian_2d(0usize..exp.iterations, (PLOT_FLOOR..max * 10.0).log_scale())?;
    chart
        .configure_mesh()
        .x_desc("iteration k")
        .y_desc("error")
        .y_label_formatter(&|y| format!("{y:.0e}"))
        .draw()?;
    for (i, (name, values)) in all.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(
                values.iter().enumerate().map(|(k, v)| (k, v.max(PLOT_FLOOR))),
                color.stroke_width(2),
            ))?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .position(SeriesLabelPosition::LowerLeft)
        .draw()?;
    root.present()?;
    Ok(())
}
