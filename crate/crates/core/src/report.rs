//! Flat result records and their JSON-lines, CSV and plain-text renderings.
//!
//! JSON output is deterministic: keys follow field order and floats use the
//! shortest representation that round-trips (at most 17 significant digits).
//! Non-finite floats become `null`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::{KernelMatrices, KernelReport, SpaceKernel};
use crate::stokes::{InfSupResult, Space, StokesSolution, StokesSystem, VelocityNorm};

/// Number of leading eigenvalues kept in an [`InfSupRecord`].
pub const SPECTRUM_HEAD: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Human,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Human => "human",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            _ => Err(Error::Domain(format!("unknown format `{s}` (expected json, csv or human)"))),
        }
    }
}

/// One space of one patch at one order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRecord {
    pub mesh: String,
    pub center: usize,
    pub m: usize,
    pub p: usize,
    pub space: Space,
    pub sigma_z: usize,
    pub critical_points: Vec<usize>,
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
    pub predicted_dim: Option<usize>,
    pub tau: f64,
    pub gap: f64,
    pub ill_separated: bool,
    pub one_residual: f64,
    /// Shared by both spaces of the same patch.
    pub pass: bool,
}

impl KernelRecord {
    pub fn from_report(mesh: &str, r: &KernelReport) -> [KernelRecord; 2] {
        let rec = |k: &SpaceKernel, predicted: Option<usize>| KernelRecord {
            mesh: mesh.to_string(),
            center: r.center,
            m: r.m,
            p: r.p,
            space: k.space,
            sigma_z: r.sigma_z,
            critical_points: r.critical_points.clone(),
            rows: k.rows,
            cols: k.cols,
            dim: k.dim,
            predicted_dim: predicted,
            tau: k.tau,
            gap: k.gap,
            ill_separated: k.ill_separated,
            one_residual: k.one_residual,
            pass: r.pass,
        };
        [rec(&r.conforming, r.predicted_dim_n), rec(&r.cr, Some(r.predicted_dim_n_cr))]
    }
}

/// Factorization check of the chain matrix `M_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRecord {
    pub mesh: String,
    pub center: usize,
    pub p: usize,
    pub chain: Vec<usize>,
    pub n: usize,
    pub angles: Vec<f64>,
    pub det_t: f64,
    pub det_t_closed: Option<f64>,
    pub factorization_residual: f64,
    pub closed_residual: f64,
}

impl ChainRecord {
    pub fn new(mesh: &str, center: usize, k: &KernelMatrices) -> Self {
        Self {
            mesh: mesh.to_string(),
            center,
            p: k.p,
            chain: k.chain.clone(),
            n: k.n(),
            angles: k.angles.clone(),
            det_t: k.det_t.recursion,
            det_t_closed: k.det_t.closed,
            factorization_residual: k.factorization_residual,
            closed_residual: k.closed_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfSupRecord {
    pub mesh: String,
    pub p: usize,
    pub space: Space,
    pub norm: VelocityNorm,
    pub c: f64,
    pub spectrum_head: Vec<f64>,
    pub n_zero_modes: usize,
    pub zero_tol: f64,
    pub constant_overlap: f64,
    /// CR pair of odd order `p >= 5`, where stability is expected.
    pub certified_odd: bool,
}

impl InfSupRecord {
    pub fn new(mesh: &str, r: &InfSupResult) -> Self {
        Self {
            mesh: mesh.to_string(),
            p: r.p,
            space: r.space,
            norm: r.norm,
            c: r.c,
            spectrum_head: r.spectrum.iter().take(SPECTRUM_HEAD).cloned().collect(),
            n_zero_modes: r.n_zero_modes,
            zero_tol: r.zero_tol,
            constant_overlap: r.constant_overlap,
            certified_odd: r.space == Space::Cr && r.p % 2 == 1 && r.p >= 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub mesh: String,
    pub p: usize,
    pub space: Space,
    pub rhs: String,
    pub forced: bool,
    pub n_velocity: usize,
    pub n_pressure: usize,
    pub momentum_residual: f64,
    pub divergence_residual: f64,
    pub mean_residual: f64,
    pub pivot_ratio: f64,
    pub velocity_norm: f64,
    pub pressure_norm: f64,
    /// Largest pointwise velocity error against a known exact solution.
    pub velocity_error: Option<f64>,
}

impl SolveRecord {
    pub fn new(mesh: &str, rhs: &str, forced: bool, sys: &StokesSystem, s: &StokesSolution) -> Self {
        let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self {
            mesh: mesh.to_string(),
            p: sys.p,
            space: sys.space,
            rhs: rhs.to_string(),
            forced,
            n_velocity: sys.n_velocity(),
            n_pressure: sys.n_pressure(),
            momentum_residual: s.momentum_residual,
            divergence_residual: s.divergence_residual,
            mean_residual: s.mean_residual,
            pivot_ratio: s.pivot_ratio,
            velocity_norm: l2(&s.velocity),
            pressure_norm: l2(&s.pressure),
            velocity_error: None,
        }
    }
}

fn flatten<T: Serialize>(rec: &T) -> Result<Vec<(String, Value)>> {
    match serde_json::to_value(rec).map_err(|e| Error::Domain(e.to_string()))? {
        Value::Object(map) => Ok(map.into_iter().collect()),
        other => Ok(vec![("value".to_string(), other)]),
    }
}

/// One JSON object per line.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Domain(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Header from the first record, then one row per record. Arrays are
/// joined with `;`, `None` is an empty cell.
pub fn to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        let fields = flatten(r)?;
        if i == 0 {
            out.push_str(&fields.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out.push_str(&fields.iter().map(|(_, v)| csv_cell(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    Ok(out)
}

fn human_cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            if x == 0.0 || (1e-3..1e4).contains(&x.abs()) {
                format!("{x:.6}")
            } else {
                format!("{x:.3e}")
            }
        }
        Value::Array(a) if a.len() > 6 => {
            let head: Vec<String> = a.iter().take(6).map(human_cell).collect();
            format!("[{} ..{}]", head.join(" "), a.len())
        }
        Value::Array(a) => format!("[{}]", a.iter().map(human_cell).collect::<Vec<_>>().join(" ")),
        other => other.to_string(),
    }
}

/// Column-aligned table.
pub fn to_human<T: Serialize>(records: &[T]) -> Result<String> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| Ok(flatten(r)?.into_iter().map(|(k, v)| (k, human_cell(&v))).collect()))
        .collect::<Result<_>>()?;
    let Some(first) = rows.first() else { return Ok(String::new()) };
    let widths: Vec<usize> = (0..first.len())
        .map(|j| rows.iter().map(|r| r[j].1.len()).chain([first[j].0.len()]).max().unwrap())
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(first.iter().map(|(k, _)| k.as_str()).collect());
    for r in &rows {
        out.push_str(&line(r.iter().map(|(_, v)| v.as_str()).collect()));
    }
    Ok(out)
}

pub fn render<T: Serialize>(records: &[T], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json_lines(records),
        Format::Csv => to_csv(records),
        Format::Human => to_human(records),
    }
}
