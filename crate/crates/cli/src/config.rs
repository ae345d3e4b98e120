//! Argument types shared by the subcommands.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use crlab_core::kernel::{AnalyzeOptions, TolPolicy};
use crlab_core::mesh::{generate_mesh, load_mesh, MeshFormat, MeshSpec, Triangulation, DEFAULT_EPS_ANGLE};
use crlab_core::report::Format;
use crlab_core::stokes::{Space, DEFAULT_ZERO_TOL};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Cr,
    Conforming,
    Both,
}

impl SpaceArg {
    pub fn spaces(self) -> Vec<Space> {
        match self {
            SpaceArg::Cr => vec![Space::Cr],
            SpaceArg::Conforming => vec![Space::Conforming],
            SpaceArg::Both => vec![Space::Cr, Space::Conforming],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Human,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Human => Format::Human,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeshArgs {
    /// Mesh file in the native text format (repeatable).
    #[arg(long = "mesh", value_name = "FILE")]
    pub files: Vec<PathBuf>,
    /// Generator spec such as `crisscross:1.0`, `fan:m=6`, `chain:n=2,seed=7`
    /// or `grid:n=4,amp=0.1,seed=0` (repeatable).
    #[arg(long = "gen", value_name = "SPEC")]
    pub specs: Vec<String>,
}

pub struct NamedMesh {
    pub label: String,
    pub mesh: Triangulation,
}

impl MeshArgs {
    /// Files first, then generator specs, each in command-line order.
    pub fn load(&self) -> Result<Vec<NamedMesh>, CliError> {
        if self.files.is_empty() && self.specs.is_empty() {
            return Err(CliError::Usage("no mesh given; use --mesh FILE or --gen SPEC".into()));
        }
        let mut out = Vec::new();
        for path in &self.files {
            let f = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mesh = load_mesh(BufReader::new(f), MeshFormat::NativeText)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            out.push(NamedMesh { label: path.display().to_string(), mesh });
        }
        for s in &self.specs {
            let spec: MeshSpec = s.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            let mesh = generate_mesh(&spec).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
            out.push(NamedMesh { label: spec.to_string(), mesh });
        }
        Ok(out)
    }
}

/// Parsed `--p` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PList(pub Vec<usize>);

/// `5`, `5,7` or `3-7`; every entry at least 1.
pub fn parse_p_list(s: &str) -> Result<PList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("bad order `{part}` in --p (expected e.g. 5, 5,7 or 3-7)");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err("--p needs at least one order".into());
    }
    if out.contains(&0) {
        return Err("polynomial order must be at least 1".into());
    }
    Ok(PList(out))
}

/// Tolerance overrides from repeated `--tol NAME=VALUE`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_angle: f64,
    pub rank_safety: f64,
    pub zero_mode: f64,
    pub quad_degree: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_angle: DEFAULT_EPS_ANGLE,
            rank_safety: TolPolicy::default().safety,
            zero_mode: DEFAULT_ZERO_TOL,
            quad_degree: None,
        }
    }
}

pub const TOL_NAMES: &str = "eps_angle, rank_safety, zero_mode, quad_degree";

impl Tolerances {
    pub fn parse(items: &[String]) -> Result<Self, CliError> {
        let mut t = Self::default();
        for item in items {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VALUE, got `{item}`")))?;
            let num = || {
                value
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| CliError::Usage(format!("--tol {name}: `{value}` is not a positive number")))
            };
            match name.trim() {
                "eps_angle" => t.eps_angle = num()?,
                "rank_safety" => t.rank_safety = num()?,
                "zero_mode" => t.zero_mode = num()?,
                "quad_degree" => {
                    let d = value
                        .trim()
                        .parse()
                        .map_err(|_| CliError::Usage(format!("--tol quad_degree: `{value}` is not an integer")))?;
                    t.quad_degree = Some(d);
                }
                other => {
                    return Err(CliError::Usage(format!("unknown tolerance `{other}` (known: {TOL_NAMES})")));
                }
            }
        }
        Ok(t)
    }

    pub fn analyze(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            eps_angle: self.eps_angle,
            quad_degree: self.quad_degree,
            tol: TolPolicy { safety: self.rank_safety },
        }
    }
}
