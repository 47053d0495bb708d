//! Flat `key=value` run configuration.
//!
//! One pair per line (commas also separate pairs), `#` starts a comment,
//! unknown and duplicate keys are rejected, and every error carries the line
//! it came from. The inner conductor is always a cylinder of radius 1 (all
//! lengths are in units of its radius); for the corrugated task the inner
//! carries the same corrugation at phase zero, as the torque vanishes
//! identically otherwise.

use std::collections::BTreeMap;

use casimir_core::energy::SweepAxis;
use casimir_core::geometry::BoundaryCurve;
use casimir_core::kernel::Polarization;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value for '{key}': {message}")]
    InvalidValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key '{key}'")]
    MissingKey { key: String },
    #[error("{0}")]
    Validation(String),
}

/// Outer-section families selectable from the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterKind {
    Circle,
    Eccentric,
    Corrugated,
    Ellipse,
    Parabola,
}

impl OuterKind {
    fn parse(s: &str) -> Option<OuterKind> {
        match s {
            "circle" => Some(OuterKind::Circle),
            "eccentric" | "eccentric_circle" => Some(OuterKind::Eccentric),
            "corrugated" | "corrugated_circle" => Some(OuterKind::Corrugated),
            "ellipse" => Some(OuterKind::Ellipse),
            "parabola" => Some(OuterKind::Parabola),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OuterKind::Circle => "circle",
            OuterKind::Eccentric => "eccentric",
            OuterKind::Corrugated => "corrugated",
            OuterKind::Ellipse => "ellipse",
            OuterKind::Parabola => "parabola",
        }
    }
}

/// Geometry block: outer body parameters, lengths in units of the inner
/// radius.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub kind: OuterKind,
    /// Outer radius (circle/eccentric) or mean radius (corrugated).
    pub b: f64,
    /// Inner-cylinder displacement (ellipse/parabola) or outer-center offset
    /// (eccentric).
    pub eps_x: f64,
    pub eps_y: f64,
    /// Corrugation amplitude, frequency and rotation angle.
    pub h: f64,
    pub nu: u32,
    pub phi0: f64,
    /// Ellipse semiaxes (minor, major).
    pub b1: f64,
    pub b2: f64,
    /// Parabola focal distance and truncation angle.
    pub f: f64,
    pub theta_cut: f64,
}

impl GeometryConfig {
    /// Builds the nested curve pair about the inner-cylinder center.
    pub fn build_curves(&self) -> Result<(BoundaryCurve, BoundaryCurve), ConfigError> {
        let inner_plain = BoundaryCurve::Circle { radius: 1.0 };
        let pair = match self.kind {
            OuterKind::Circle => (inner_plain, BoundaryCurve::Circle { radius: self.b }),
            OuterKind::Eccentric => (
                inner_plain,
                BoundaryCurve::EccentricCircle {
                    radius: self.b,
                    center: (self.eps_x, self.eps_y),
                },
            ),
            OuterKind::Corrugated => {
                let pair = casimir_core::energy::CorrugatedPair {
                    inner_radius: 1.0,
                    outer_radius: self.b,
                    amplitude: self.h,
                    frequency: self.nu,
                };
                pair.curves(self.phi0)
            }
            OuterKind::Ellipse => (
                inner_plain,
                BoundaryCurve::Ellipse {
                    semi_minor: self.b1,
                    semi_major: self.b2,
                    center: (-self.eps_x, -self.eps_y),
                },
            ),
            OuterKind::Parabola => (
                inner_plain,
                BoundaryCurve::Parabola {
                    focal_distance: self.f,
                    theta_cut: self.theta_cut,
                    center: (-self.eps_x, -self.eps_y),
                },
            ),
        };
        casimir_core::geometry::validate_nested(&pair.0, &pair.1)
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        Ok(pair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationChoice {
    Tm,
    Te,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeVariant {
    Radial,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericsConfig {
    pub s: usize,
    pub y_max: Option<f64>,
    pub rel_tolerance: f64,
    pub polarization: PolarizationChoice,
    pub te_variant: TeVariant,
}

impl NumericsConfig {
    pub fn polarizations(&self) -> Vec<Polarization> {
        let te = match self.te_variant {
            TeVariant::Radial => Polarization::TeRadial,
            TeVariant::Normal => Polarization::TeNormal,
        };
        match self.polarization {
            PolarizationChoice::Tm => vec![Polarization::Tm],
            PolarizationChoice::Te => vec![te],
            PolarizationChoice::Both => vec![Polarization::Tm, te],
        }
    }

    pub fn pol_label(&self) -> String {
        match self.polarization {
            PolarizationChoice::Tm => "tm".into(),
            PolarizationChoice::Te => match self.te_variant {
                TeVariant::Radial => "te_radial".into(),
                TeVariant::Normal => "te_normal".into(),
            },
            PolarizationChoice::Both => "both".into(),
        }
    }
}

/// Inclusive `start:stop:count` sweep range.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ValueRange {
    pub fn expand(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect()
    }

    fn parse(s: &str) -> Option<ValueRange> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return None;
        }
        let start = parts[0].trim().parse().ok()?;
        let stop = parts[1].trim().parse().ok()?;
        let count: usize = parts[2].trim().parse().ok()?;
        if count == 0 {
            return None;
        }
        Some(ValueRange { start, stop, count })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub axis: SweepAxis,
    pub values: ValueRange,
    pub subtract_baseline: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorqueSettings {
    pub phi0: f64,
    /// Finite-difference step; default π/(50ν).
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleTable {
    Table1,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Single,
    Sweep(SweepSettings),
    Torque(TorqueSettings),
    Oracle(OracleTable),
}

/// Output display convention for energies per unit length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitConvention {
    /// E·a²/L (natural units of the run, a = 1).
    PerA2,
    /// E·4πa²/L.
    Per4PiA2,
}

impl UnitConvention {
    pub fn factor(&self) -> f64 {
        match self {
            UnitConvention::PerA2 => 1.0,
            UnitConvention::Per4PiA2 => 4.0 * std::f64::consts::PI,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            UnitConvention::PerA2 => "per_a2",
            UnitConvention::Per4PiA2 => "per_4pi_a2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub csv: Option<String>,
    pub units: UnitConvention,
}

/// A fully resolved run configuration (defaults applied).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    /// Absent only for oracle tasks.
    pub geometry: Option<GeometryConfig>,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

struct KeyBag {
    entries: BTreeMap<String, (String, usize)>,
}

impl KeyBag {
    fn parse(text: &str) -> Result<KeyBag, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            for piece in line.split(',') {
                let piece = piece.trim();
                if piece.is_empty() {
                    continue;
                }
                let Some((key, value)) = piece.split_once('=') else {
                    return Err(ConfigError::Malformed {
                        line: line_no,
                        text: piece.to_string(),
                    });
                };
                let key = key.trim().to_string();
                let value = value.trim().to_string();
                if entries.contains_key(&key) {
                    return Err(ConfigError::DuplicateKey { line: line_no, key });
                }
                entries.insert(key, (value, line_no));
            }
        }
        Ok(KeyBag { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => {
                value
                    .parse::<T>()
                    .map(Some)
                    .map_err(|_| ConfigError::InvalidValue {
                        line,
                        key: key.to_string(),
                        message: format!("cannot parse '{value}'"),
                    })
            }
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ConfigError> {
        self.take_parsed(key)?
            .ok_or_else(|| ConfigError::MissingKey {
                key: key.to_string(),
            })
    }

    fn reject_leftovers(&self) -> Result<(), ConfigError> {
        if let Some((key, (_, line))) = self.entries.iter().min_by_key(|(_, (_, line))| *line) {
            return Err(ConfigError::UnknownKey {
                line: *line,
                key: key.clone(),
            });
        }
        Ok(())
    }
}

/// Parses and validates a configuration, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut bag = KeyBag::parse(text)?;

    let (task_str, task_line) = bag
        .take("task")
        .ok_or(ConfigError::MissingKey { key: "task".into() })?;

    // numerics block (shared by all tasks)
    let s = bag.take_parsed::<usize>("numerics.S")?.unwrap_or(18);
    if s == 0 {
        return Err(ConfigError::Validation("numerics.S must be >= 1".into()));
    }
    let y_max = match bag.take("numerics.y_max") {
        None => None,
        Some((v, line)) => {
            if v == "auto" {
                None
            } else {
                Some(v.parse::<f64>().map_err(|_| ConfigError::InvalidValue {
                    line,
                    key: "numerics.y_max".into(),
                    message: format!("expected 'auto' or a number, got '{v}'"),
                })?)
            }
        }
    };
    let rel_tolerance = bag
        .take_parsed::<f64>("numerics.rel_tolerance")?
        .unwrap_or(1e-6);
    if !rel_tolerance.is_finite() || rel_tolerance <= 0.0 {
        return Err(ConfigError::Validation(
            "numerics.rel_tolerance must be positive".into(),
        ));
    }
    let polarization = match bag.take("numerics.polarization") {
        None => PolarizationChoice::Both,
        Some((v, line)) => match v.as_str() {
            "tm" => PolarizationChoice::Tm,
            "te" => PolarizationChoice::Te,
            "both" => PolarizationChoice::Both,
            _ => {
                return Err(ConfigError::InvalidValue {
                    line,
                    key: "numerics.polarization".into(),
                    message: format!("expected tm|te|both, got '{v}'"),
                })
            }
        },
    };
    let te_variant = match bag.take("numerics.te_variant") {
        None => TeVariant::Radial,
        Some((v, line)) => match v.as_str() {
            "radial" => TeVariant::Radial,
            "normal" => TeVariant::Normal,
            _ => {
                return Err(ConfigError::InvalidValue {
                    line,
                    key: "numerics.te_variant".into(),
                    message: format!("expected radial|normal, got '{v}'"),
                })
            }
        },
    };
    let numerics = NumericsConfig {
        s,
        y_max,
        rel_tolerance,
        polarization,
        te_variant,
    };

    // output block
    let csv = bag.take("output.csv").map(|(v, _)| v);
    let units = match bag.take("output.units") {
        None => UnitConvention::PerA2,
        Some((v, line)) => match v.as_str() {
            "per_a2" => UnitConvention::PerA2,
            "per_4pi_a2" => UnitConvention::Per4PiA2,
            _ => {
                return Err(ConfigError::InvalidValue {
                    line,
                    key: "output.units".into(),
                    message: format!("expected per_a2|per_4pi_a2, got '{v}'"),
                })
            }
        },
    };
    let output = OutputConfig { csv, units };

    let task = match task_str.as_str() {
        "single" | "sweep" | "torque" => {
            let geometry = parse_geometry(&mut bag)?;
            let task = match task_str.as_str() {
                "single" => Task::Single,
                "sweep" => Task::Sweep(parse_sweep(&mut bag, &geometry)?),
                _ => Task::Torque(parse_torque(&mut bag, &geometry)?),
            };
            bag.reject_leftovers()?;
            return Ok(RunConfig {
                task,
                geometry: Some(geometry),
                numerics,
                output,
            });
        }
        "oracle" => {
            let (table, line) = bag.take("oracle").ok_or(ConfigError::MissingKey {
                key: "oracle".into(),
            })?;
            if table != "table1" {
                return Err(ConfigError::InvalidValue {
                    line,
                    key: "oracle".into(),
                    message: format!("expected table1, got '{table}'"),
                });
            }
            Task::Oracle(OracleTable::Table1)
        }
        other => {
            return Err(ConfigError::InvalidValue {
                line: task_line,
                key: "task".into(),
                message: format!("expected single|sweep|torque|oracle, got '{other}'"),
            })
        }
    };
    bag.reject_leftovers()?;
    Ok(RunConfig {
        task,
        geometry: None,
        numerics,
        output,
    })
}

fn parse_geometry(bag: &mut KeyBag) -> Result<GeometryConfig, ConfigError> {
    let (kind_str, kind_line) = bag.take("outer.kind").ok_or(ConfigError::MissingKey {
        key: "outer.kind".into(),
    })?;
    let kind = OuterKind::parse(&kind_str).ok_or_else(|| ConfigError::InvalidValue {
        line: kind_line,
        key: "outer.kind".into(),
        message: format!("expected circle|eccentric|corrugated|ellipse|parabola, got '{kind_str}'"),
    })?;

    let mut geom = GeometryConfig {
        kind,
        b: 0.0,
        eps_x: 0.0,
        eps_y: 0.0,
        h: 0.0,
        nu: 1,
        phi0: 0.0,
        b1: 0.0,
        b2: 0.0,
        f: 0.0,
        theta_cut: 2.0,
    };
    match kind {
        OuterKind::Circle => {
            geom.b = bag.require("outer.b")?;
        }
        OuterKind::Eccentric => {
            geom.b = bag.require("outer.b")?;
            geom.eps_x = bag.take_parsed("outer.eps_x")?.unwrap_or(0.0);
            geom.eps_y = bag.take_parsed("outer.eps_y")?.unwrap_or(0.0);
        }
        OuterKind::Corrugated => {
            geom.b = bag.require("outer.b")?;
            geom.h = bag.require("outer.h")?;
            geom.nu = bag.require("outer.nu")?;
            geom.phi0 = bag.take_parsed("outer.phi0")?.unwrap_or(0.0);
        }
        OuterKind::Ellipse => {
            geom.b1 = bag.require("outer.b1")?;
            geom.b2 = bag.require("outer.b2")?;
            geom.eps_x = bag.take_parsed("outer.eps_x")?.unwrap_or(0.0);
            geom.eps_y = bag.take_parsed("outer.eps_y")?.unwrap_or(0.0);
        }
        OuterKind::Parabola => {
            geom.f = bag.require("outer.f")?;
            geom.theta_cut = bag.take_parsed("outer.theta_cut")?.unwrap_or(2.0);
            geom.eps_x = bag.take_parsed("outer.eps_x")?.unwrap_or(0.0);
            geom.eps_y = bag.take_parsed("outer.eps_y")?.unwrap_or(0.0);
        }
    }
    // fail early on invalid geometry so errors carry the offending key block
    geom.build_curves()?;
    Ok(geom)
}

fn parse_sweep(bag: &mut KeyBag, geometry: &GeometryConfig) -> Result<SweepSettings, ConfigError> {
    let (axis_str, axis_line) = bag.take("sweep.axis").ok_or(ConfigError::MissingKey {
        key: "sweep.axis".into(),
    })?;
    let axis = match axis_str.as_str() {
        "delta" => SweepAxis::Delta,
        "alpha" => SweepAxis::Alpha,
        "phi0" => SweepAxis::Phi0,
        "eps_x" => SweepAxis::EpsX,
        "eps_y" => SweepAxis::EpsY,
        _ => {
            return Err(ConfigError::InvalidValue {
                line: axis_line,
                key: "sweep.axis".into(),
                message: format!("expected delta|alpha|phi0|eps_x|eps_y, got '{axis_str}'"),
            })
        }
    };
    if axis == SweepAxis::Phi0 && geometry.kind != OuterKind::Corrugated {
        return Err(ConfigError::Validation(
            "sweep.axis=phi0 requires outer.kind=corrugated".into(),
        ));
    }
    let (values_str, values_line) = bag.take("sweep.values").ok_or(ConfigError::MissingKey {
        key: "sweep.values".into(),
    })?;
    let values = ValueRange::parse(&values_str).ok_or_else(|| ConfigError::InvalidValue {
        line: values_line,
        key: "sweep.values".into(),
        message: format!("expected start:stop:count, got '{values_str}'"),
    })?;
    if values.expand().iter().any(|v| !v.is_finite()) {
        return Err(ConfigError::Validation(
            "sweep values must be finite".into(),
        ));
    }
    let subtract_baseline = match bag.take("sweep.subtract_baseline") {
        None => false,
        Some((v, line)) => match v.as_str() {
            "true" => true,
            "false" => false,
            _ => {
                return Err(ConfigError::InvalidValue {
                    line,
                    key: "sweep.subtract_baseline".into(),
                    message: format!("expected true|false, got '{v}'"),
                })
            }
        },
    };
    Ok(SweepSettings {
        axis,
        values,
        subtract_baseline,
    })
}

fn parse_torque(
    bag: &mut KeyBag,
    geometry: &GeometryConfig,
) -> Result<TorqueSettings, ConfigError> {
    if geometry.kind != OuterKind::Corrugated {
        return Err(ConfigError::Validation(
            "task=torque requires outer.kind=corrugated".into(),
        ));
    }
    let phi0 = bag.take_parsed("torque.phi0")?.unwrap_or(0.0);
    let step: Option<f64> = bag.take_parsed("torque.step")?;
    if let Some(step) = step {
        if !step.is_finite() || step <= 0.0 {
            return Err(ConfigError::Validation(
                "torque.step must be positive".into(),
            ));
        }
    }
    Ok(TorqueSettings { phi0, step })
}

impl RunConfig {
    /// Canonical text form; `parse_config(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        match &self.task {
            Task::Single => push("task", "single".into()),
            Task::Sweep(_) => push("task", "sweep".into()),
            Task::Torque(_) => push("task", "torque".into()),
            Task::Oracle(OracleTable::Table1) => {
                push("task", "oracle".into());
                push("oracle", "table1".into());
            }
        }
        if let Some(g) = &self.geometry {
            push("outer.kind", g.kind.label().into());
            match g.kind {
                OuterKind::Circle => push("outer.b", fmt(g.b)),
                OuterKind::Eccentric => {
                    push("outer.b", fmt(g.b));
                    push("outer.eps_x", fmt(g.eps_x));
                    push("outer.eps_y", fmt(g.eps_y));
                }
                OuterKind::Corrugated => {
                    push("outer.b", fmt(g.b));
                    push("outer.h", fmt(g.h));
                    push("outer.nu", g.nu.to_string());
                    push("outer.phi0", fmt(g.phi0));
                }
                OuterKind::Ellipse => {
                    push("outer.b1", fmt(g.b1));
                    push("outer.b2", fmt(g.b2));
                    push("outer.eps_x", fmt(g.eps_x));
                    push("outer.eps_y", fmt(g.eps_y));
                }
                OuterKind::Parabola => {
                    push("outer.f", fmt(g.f));
                    push("outer.theta_cut", fmt(g.theta_cut));
                    push("outer.eps_x", fmt(g.eps_x));
                    push("outer.eps_y", fmt(g.eps_y));
                }
            }
        }
        match &self.task {
            Task::Sweep(sw) => {
                push("sweep.axis", sw.axis.label().into());
                push(
                    "sweep.values",
                    format!(
                        "{}:{}:{}",
                        fmt(sw.values.start),
                        fmt(sw.values.stop),
                        sw.values.count
                    ),
                );
                push("sweep.subtract_baseline", sw.subtract_baseline.to_string());
            }
            Task::Torque(tq) => {
                push("torque.phi0", fmt(tq.phi0));
                if let Some(step) = tq.step {
                    push("torque.step", fmt(step));
                }
            }
            _ => {}
        }
        push("numerics.S", self.numerics.s.to_string());
        push(
            "numerics.y_max",
            match self.numerics.y_max {
                None => "auto".into(),
                Some(v) => fmt(v),
            },
        );
        push("numerics.rel_tolerance", fmt(self.numerics.rel_tolerance));
        push(
            "numerics.polarization",
            match self.numerics.polarization {
                PolarizationChoice::Tm => "tm".into(),
                PolarizationChoice::Te => "te".into(),
                PolarizationChoice::Both => "both".into(),
            },
        );
        push(
            "numerics.te_variant",
            match self.numerics.te_variant {
                TeVariant::Radial => "radial".into(),
                TeVariant::Normal => "normal".into(),
            },
        );
        if let Some(csv) = &self.output.csv {
            push("output.csv", csv.clone());
        }
        push("output.units", self.output.units.label().into());
        out
    }
}

fn fmt(v: f64) -> String {
    // shortest representation that round-trips
    let s = format!("{v}");
    if s.parse::<f64>() == Ok(v) {
        s
    } else {
        format!("{v:.17e}")
    }
}
