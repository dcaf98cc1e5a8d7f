//! CSV export and optional SVG line plots.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::model::{magnetic_field, OrbitParams};
use crate::sim::Trajectory;

pub const TRAJECTORY_COLUMNS: [&str; 10] =
    ["t_s", "q1", "q2", "q3", "w1", "w2", "w3", "m1", "m2", "m3"];
pub const FIELD_COLUMNS: [&str; 4] = ["t_s", "b1_T", "b2_T", "b3_T"];

/// Writes one row per sample time. The moment columns of the last row are
/// empty because no moment is applied after the final state.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRAJECTORY_COLUMNS)?;
    for (k, (t, x)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row: Vec<String> = Vec::with_capacity(10);
        row.push(format!("{t:e}"));
        row.extend(x.iter().map(|v| format!("{v:e}")));
        match traj.moments.get(k) {
            Some(m) => row.extend(m.iter().map(|v| format!("{v:e}"))),
            None => row.extend(std::iter::repeat_n(String::new(), 3)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `num_samples` evenly spaced field samples over one orbital period, `t` in `[0, P)`.
pub fn sample_field(orbit: &OrbitParams, num_samples: usize) -> Vec<(f64, Vector3<f64>)> {
    let period = orbit.orbital_period();
    (0..num_samples)
        .map(|i| {
            let t = period * i as f64 / num_samples as f64;
            (t, magnetic_field(orbit, t))
        })
        .collect()
}

pub fn write_field_csv(path: &Path, samples: &[(f64, Vector3<f64>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FIELD_COLUMNS)?;
    for (t, b) in samples {
        w.write_record([t, &b[0], &b[1], &b[2]].map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn plot_series(path: &Path, title: &str, xs: &[f64], ys: &[f64]) -> Result<()> {
    let err = |e: &dyn std::fmt::Display| Error::Plot(format!("{}: {e}", path.display()));
    let root = SVGBackend::new(path, (800, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let x_max = xs.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    let pad = ((hi - lo) * 0.05).max(1e-12 * hi.abs().max(lo.abs()).max(1e-300));
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(80)
        .build_cartesian_2d(0.0..x_max, (lo - pad)..(hi + pad))
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc("t [s]")
        .draw()
        .map_err(|e| err(&e))?;
    chart
        .draw_series(LineSeries::new(
            xs.iter().copied().zip(ys.iter().copied()),
            &BLUE,
        ))
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))?;
    Ok(())
}

/// One SVG per state component, named after the CSV column.
pub fn plot_trajectory(dir: &Path, traj: &Trajectory) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (i, name) in TRAJECTORY_COLUMNS[1..7].iter().enumerate() {
        let ys: Vec<f64> = traj.states.iter().map(|x| x[i]).collect();
        let path = dir.join(format!("{name}.svg"));
        plot_series(&path, name, &traj.times, &ys)?;
        written.push(path);
    }
    Ok(written)
}

pub fn plot_field(dir: &Path, samples: &[(f64, Vector3<f64>)]) -> Result<Vec<PathBuf>> {
    let xs: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
    let mut written = Vec::new();
    for (i, name) in FIELD_COLUMNS[1..].iter().enumerate() {
        let ys: Vec<f64> = samples.iter().map(|(_, b)| b[i]).collect();
        let path = dir.join(format!("{name}.svg"));
        plot_series(&path, name, &xs, &ys)?;
        written.push(path);
    }
    Ok(written)
}
