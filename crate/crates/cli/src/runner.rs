//! Task execution and CSV emission.
//!
//! Run tasks (`single`, `sweep`, `torque`) all emit the same schema:
//!
//! ```text
//! task,axis_value,pol,energy_per_length,unit,quad_error,im_residual,S,y_max,nodes
//! ```
//!
//! Sweeps with baseline subtraction additionally emit one `sweep_delta` row
//! per point carrying the difference against the offset-free reference. Fit
//! rows (`--fit`) carry the cosine amplitude in the energy column and the
//! relative RMS residual in the quad_error column. The oracle table uses its
//! own schema `nu,alpha,h_tilde,amplitude,unit`.

use std::io::Write;

use casimir_core::energy::{self, EnergyConfig, SweepSpec};
use casimir_core::oracles;
use casimir_core::quadrature::QuadratureControls;
use thiserror::Error;

use crate::config::{OracleTable, OuterKind, RunConfig, SweepSettings, Task, TorqueSettings};
use crate::fit::{fit_amplitude, FitError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}")]
    Core(#[from] casimir_core::Error),
    #[error("{0}")]
    Fit(#[from] FitError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("--fit requires a phi0 sweep over a corrugated geometry")]
    FitWithoutPhi0Sweep,
    #[error("{failed} of {total} sweep points failed")]
    PartialSweep { failed: usize, total: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub fit: bool,
    pub deterministic: bool,
}

/// Summary of an executed run.
#[derive(Debug, Clone, Copy)]
pub struct RunOutcome {
    pub rows_written: usize,
    pub failed_points: usize,
}

pub const RUN_CSV_HEADER: &str =
    "task,axis_value,pol,energy_per_length,unit,quad_error,im_residual,S,y_max,nodes";

pub const ORACLE_CSV_HEADER: &str = "nu,alpha,h_tilde,amplitude,unit";

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

struct RunRow {
    task: String,
    axis_value: Option<f64>,
    pol: String,
    energy: f64,
    unit: &'static str,
    quad_error: f64,
    im_residual: Option<f64>,
    s: usize,
    y_max: Option<f64>,
    nodes: Option<usize>,
}

impl RunRow {
    fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.task),
            self.axis_value.map(fmt_f).unwrap_or_default(),
            csv_field(&self.pol),
            fmt_f(self.energy),
            self.unit,
            fmt_f(self.quad_error),
            self.im_residual.map(fmt_f).unwrap_or_default(),
            self.s,
            self.y_max.map(fmt_f).unwrap_or_default(),
            self.nodes.map(|n| n.to_string()).unwrap_or_default(),
        )
    }
}

fn quadrature_controls(config: &RunConfig) -> QuadratureControls {
    QuadratureControls {
        rel_tolerance: config.numerics.rel_tolerance,
        y_max: config.numerics.y_max,
        ..Default::default()
    }
}

fn energy_config(config: &RunConfig) -> Result<EnergyConfig, RunError> {
    let geometry = config
        .geometry
        .as_ref()
        .expect("geometry present for run tasks");
    let (inner, outer) = geometry.build_curves()?;
    Ok(EnergyConfig {
        inner,
        outer,
        s: config.numerics.s,
        polarizations: config.numerics.polarizations(),
        quadrature: quadrature_controls(config),
    })
}

/// Executes the configured task, writing CSV to `out` and one diagnostic
/// line per computed row to stderr.
pub fn execute(
    config: &RunConfig,
    options: &RunOptions,
    out: &mut dyn Write,
) -> Result<RunOutcome, RunError> {
    match &config.task {
        Task::Oracle(OracleTable::Table1) => run_oracle(config, out),
        Task::Single => run_single(config, out),
        Task::Torque(settings) => run_torque(config, settings, out),
        Task::Sweep(settings) => run_sweep(config, settings, options, out),
    }
}

fn run_single(config: &RunConfig, out: &mut dyn Write) -> Result<RunOutcome, RunError> {
    let cfg = energy_config(config)?;
    let factor = config.output.units.factor();
    let result = energy::casimir_energy(&cfg)?;
    writeln!(out, "{RUN_CSV_HEADER}")?;
    let row = RunRow {
        task: "single".into(),
        axis_value: None,
        pol: config.numerics.pol_label(),
        energy: result.energy * factor,
        unit: config.output.units.label(),
        quad_error: result.quad_error * factor,
        im_residual: Some(result.max_im_residual),
        s: config.numerics.s,
        y_max: Some(result.y_max),
        nodes: Some(result.nodes),
    };
    row.write(out)?;
    eprintln!(
        "single: energy={:.10e} ({}), quad_error={:.2e}, nodes={}, y_max={:.3}, min_pivot_ratio={:.2e}",
        result.energy * factor,
        config.output.units.label(),
        result.quad_error * factor,
        result.nodes,
        result.y_max,
        result.min_pivot_ratio
    );
    Ok(RunOutcome {
        rows_written: 1,
        failed_points: 0,
    })
}

fn run_torque(
    config: &RunConfig,
    settings: &TorqueSettings,
    out: &mut dyn Write,
) -> Result<RunOutcome, RunError> {
    let geometry = config.geometry.as_ref().expect("torque carries geometry");
    debug_assert_eq!(geometry.kind, OuterKind::Corrugated);
    let pair = energy::CorrugatedPair {
        inner_radius: 1.0,
        outer_radius: geometry.b,
        amplitude: geometry.h,
        frequency: geometry.nu,
    };
    let step = settings
        .step
        .unwrap_or_else(|| energy::default_torque_step(geometry.nu));
    let factor = config.output.units.factor();
    let result = energy::torque(
        &pair,
        config.numerics.s,
        &config.numerics.polarizations(),
        &quadrature_controls(config),
        settings.phi0,
        step,
    )?;
    writeln!(out, "{RUN_CSV_HEADER}")?;
    RunRow {
        task: "torque".into(),
        axis_value: Some(settings.phi0),
        pol: config.numerics.pol_label(),
        energy: result.torque * factor,
        unit: config.output.units.label(),
        quad_error: result.quad_error * factor,
        im_residual: Some(result.max_im_residual),
        s: config.numerics.s,
        y_max: Some(result.y_max),
        nodes: Some(result.nodes),
    }
    .write(out)?;
    eprintln!(
        "torque: phi0={}, step={step:.5e}, torque={:.10e} ({} per radian)",
        settings.phi0,
        result.torque * factor,
        config.output.units.label()
    );
    Ok(RunOutcome {
        rows_written: 1,
        failed_points: 0,
    })
}

fn run_sweep(
    config: &RunConfig,
    settings: &SweepSettings,
    options: &RunOptions,
    out: &mut dyn Write,
) -> Result<RunOutcome, RunError> {
    let base = energy_config(config)?;
    let geometry = config.geometry.as_ref().expect("sweep carries geometry");
    if options.fit
        && !(settings.axis == energy::SweepAxis::Phi0 && geometry.kind == OuterKind::Corrugated)
    {
        return Err(RunError::FitWithoutPhi0Sweep);
    }
    let spec = SweepSpec {
        base,
        axis: settings.axis,
        values: settings.values.expand(),
        subtract_baseline: settings.subtract_baseline,
        deterministic: options.deterministic,
    };
    let points = energy::sweep(&spec)?;
    let factor = config.output.units.factor();
    let unit = config.output.units.label();
    let pol = config.numerics.pol_label();

    writeln!(out, "{RUN_CSV_HEADER}")?;
    let mut rows = 0usize;
    let mut failed = 0usize;
    let mut fit_x = Vec::new();
    let mut fit_e = Vec::new();
    for point in &points {
        match &point.result {
            Ok(result) => {
                RunRow {
                    task: "sweep".into(),
                    axis_value: Some(point.value),
                    pol: pol.clone(),
                    energy: result.energy * factor,
                    unit,
                    quad_error: result.quad_error * factor,
                    im_residual: Some(result.max_im_residual),
                    s: config.numerics.s,
                    y_max: Some(result.y_max),
                    nodes: Some(result.nodes),
                }
                .write(out)?;
                rows += 1;
                eprintln!(
                    "sweep {}={:.6}: energy={:.10e} ({unit}), nodes={}",
                    settings.axis.label(),
                    point.value,
                    result.energy * factor,
                    result.nodes
                );
                if let Some(delta) = point.delta_vs_baseline {
                    RunRow {
                        task: "sweep_delta".into(),
                        axis_value: Some(point.value),
                        pol: pol.clone(),
                        energy: delta * factor,
                        unit,
                        quad_error: result.quad_error * factor,
                        im_residual: Some(result.max_im_residual),
                        s: config.numerics.s,
                        y_max: Some(result.y_max),
                        nodes: Some(result.nodes),
                    }
                    .write(out)?;
                    rows += 1;
                }
                fit_x.push(point.value);
                fit_e.push(result.energy);
            }
            Err(e) => {
                failed += 1;
                eprintln!(
                    "sweep {}={:.6}: FAILED: {e}",
                    settings.axis.label(),
                    point.value
                );
            }
        }
    }

    if options.fit {
        let fit = fit_amplitude(&fit_x, &fit_e, geometry.nu)?;
        RunRow {
            task: "fit".into(),
            axis_value: None,
            pol: pol.clone(),
            energy: fit.amplitude * factor,
            unit,
            quad_error: fit.residual,
            im_residual: None,
            s: config.numerics.s,
            y_max: None,
            nodes: None,
        }
        .write(out)?;
        rows += 1;
        eprintln!(
            "fit: amplitude={:.6e} ({unit}), relative residual={:.3e}",
            fit.amplitude * factor,
            fit.residual
        );
    }

    if failed > 0 {
        return Err(RunError::PartialSweep {
            failed,
            total: points.len(),
        });
    }
    Ok(RunOutcome {
        rows_written: rows,
        failed_points: failed,
    })
}

fn run_oracle(config: &RunConfig, out: &mut dyn Write) -> Result<RunOutcome, RunError> {
    let rows = oracles::table1()?;
    let factor = config.output.units.factor();
    writeln!(out, "{ORACLE_CSV_HEADER}")?;
    for row in &rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.nu,
            row.alpha,
            row.h_tilde,
            fmt_f(row.amplitude * factor),
            config.output.units.label()
        )?;
        if row.h_tilde > 0.1 {
            eprintln!(
                "note: nu={}, alpha={}, h_tilde={}: beyond the perturbative regime, \
                 the cosine model itself degrades",
                row.nu, row.alpha, row.h_tilde
            );
        }
    }
    Ok(RunOutcome {
        rows_written: rows.len(),
        failed_points: 0,
    })
}
