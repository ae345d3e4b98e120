use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use crlab_core::basis::lagrange_nodes;
use crlab_core::kernel::{self, assemble_mn};
use crlab_core::mesh::{detect_critical_points, nodal_patch, Triangulation};
use crlab_core::polytools::IntegralId;
use crlab_core::report::{render, ChainRecord, Format, InfSupRecord, KernelRecord, SolveRecord};
use crlab_core::stokes::{
    assemble, infsup_constant, manufactured_force, manufactured_velocity, solve_stokes, AssemblyOptions, Space,
    StokesSolution, StokesSystem, VelocityNorm,
};
use crlab_core::verify::{run_identity_suite, Fault, VerifyConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{MeshArgs, NamedMesh, SpaceArg, Tolerances};
use crate::{CliError, Outcome};

/// Largest accepted relative deviation of `M_n` from its factorization.
pub const FACTORIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Seminorm,
    Full,
}

impl From<NormArg> for VelocityNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Seminorm => VelocityNorm::Seminorm,
            NormArg::Full => VelocityNorm::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhsArg {
    Zero,
    Manufactured,
}

/// Several record tables in one report; CSV and text tables are separated
/// by a blank line.
fn join_tables(tables: Vec<String>, format: Format) -> String {
    let tables: Vec<String> = tables.into_iter().filter(|t| !t.is_empty()).collect();
    match format {
        Format::Json => tables.concat(),
        _ => tables.join("\n"),
    }
}

fn table<T: Serialize>(records: &[T], format: Format) -> Result<String, CliError> {
    Ok(render(records, format)?)
}

pub fn verify_identities(
    n_max: usize,
    triangles: usize,
    seed: u64,
    fault: Option<&str>,
    format: Format,
) -> Result<Outcome, CliError> {
    let fault = match fault {
        None => None,
        Some(name) => {
            let id = IntegralId::ALL.into_iter().find(|i| i.name() == name).ok_or_else(|| {
                CliError::Usage(format!("unknown integral `{name}` for --inject-fault (expected I, J, S, L, H, T or G)"))
            })?;
            Some(Fault::FlipIntegralSign(id))
        }
    };
    let cfg = VerifyConfig { n_max, seed, triangles, fault };
    let checks = run_identity_suite(&cfg)?;
    for c in checks.iter().filter(|c| !c.pass) {
        log::error!("{} failed: max error {:e} > {:e}", c.name, c.max_error, c.tol);
    }
    Ok(Outcome { text: table(&checks, format)?, failed: checks.iter().any(|c| !c.pass) })
}

struct PatchJob<'a> {
    mesh: &'a NamedMesh,
    z: usize,
    p: usize,
}

fn patch_jobs<'a>(meshes: &'a [NamedMesh], ps: &[usize]) -> Result<Vec<PatchJob<'a>>, CliError> {
    let mut jobs = Vec::new();
    for m in meshes {
        let interior: Vec<usize> = m.mesh.interior_vertices().collect();
        if interior.is_empty() {
            return Err(CliError::Usage(format!("{}: mesh has no interior vertex, so there is no nodal patch", m.label)));
        }
        for &z in &interior {
            jobs.extend(ps.iter().map(|&p| PatchJob { mesh: m, z, p }));
        }
    }
    Ok(jobs)
}

fn chain_records(job: &PatchJob, tol: &Tolerances) -> Result<Vec<ChainRecord>, CliError> {
    let patch = nodal_patch(&job.mesh.mesh, job.z)?;
    let crit = detect_critical_points(&patch, tol.eps_angle);
    (0..crit.chains.len())
        .map(|i| {
            let k = assemble_mn(&patch, &crit, i, job.p, tol.quad_degree)?;
            Ok(ChainRecord::new(&job.mesh.label, job.z, &k))
        })
        .collect()
}

fn chains_failed(chains: &[ChainRecord]) -> bool {
    chains.iter().any(|c| !(c.factorization_residual <= FACTORIZATION_TOL))
}

pub fn analyze_patch(
    mesh: &MeshArgs,
    ps: &[usize],
    tol: &[String],
    space: SpaceArg,
    format: Format,
) -> Result<Outcome, CliError> {
    let tol = Tolerances::parse(tol)?;
    let meshes = mesh.load()?;
    let jobs = patch_jobs(&meshes, ps)?;
    let opts = tol.analyze();
    let spaces = space.spaces();
    // collect() keeps job order whatever the completion order
    let results = jobs
        .par_iter()
        .map(|job| {
            let patch = nodal_patch(&job.mesh.mesh, job.z)?;
            let report = kernel::analyze_patch(&patch, job.p, &opts)?;
            let chains = if job.p % 2 == 1 && job.p >= 3 { chain_records(job, &tol)? } else { Vec::new() };
            Ok((report, chains))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut kernels = Vec::new();
    let mut chains = Vec::new();
    let mut failed = false;
    for (job, (report, ch)) in jobs.iter().zip(results) {
        if !report.pass {
            log::error!("{} vertex {} p={}: kernel checks failed", job.mesh.label, job.z, job.p);
        }
        failed |= !report.pass;
        kernels.extend(KernelRecord::from_report(&job.mesh.label, &report).into_iter().filter(|r| spaces.contains(&r.space)));
        chains.extend(ch);
    }
    failed |= chains_failed(&chains);
    let text = join_tables(vec![table(&kernels, format)?, table(&chains, format)?], format);
    Ok(Outcome { text, failed })
}

pub fn chain_matrices(mesh: &MeshArgs, ps: &[usize], tol: &[String], format: Format) -> Result<Outcome, CliError> {
    if let Some(&p) = ps.iter().find(|&&p| p % 2 == 0 || p < 3) {
        return Err(CliError::Usage(format!(
            "chain-matrices needs odd p >= 3 (parity): got p = {p}; even orders have no edge bubbles"
        )));
    }
    let tol = Tolerances::parse(tol)?;
    let meshes = mesh.load()?;
    let jobs = patch_jobs(&meshes, ps)?;
    let chains: Vec<ChainRecord> = jobs
        .par_iter()
        .map(|job| chain_records(job, &tol))
        .collect::<Result<Vec<_>, CliError>>()?
        .into_iter()
        .flatten()
        .collect();
    if chains.is_empty() {
        log::warn!("no patch has a chain of critical rim points");
    }
    Ok(Outcome { text: table(&chains, format)?, failed: chains_failed(&chains) })
}

pub fn infsup(
    mesh: &MeshArgs,
    ps: &[usize],
    tol: &[String],
    space: SpaceArg,
    norm: NormArg,
    format: Format,
) -> Result<Outcome, CliError> {
    let tol = Tolerances::parse(tol)?;
    let meshes = mesh.load()?;
    let opts = AssemblyOptions { quad_degree: tol.quad_degree, norm: norm.into() };
    let jobs: Vec<(&NamedMesh, usize, Space)> = meshes
        .iter()
        .flat_map(|m| ps.iter().flat_map(move |&p| space.spaces().into_iter().map(move |s| (m, p, s))))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(m, p, s)| {
            let sys = assemble(&m.mesh, p, s, &opts)?;
            Ok(InfSupRecord::new(&m.label, &infsup_constant(&sys, tol.zero_mode)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut failed = false;
    for r in &records {
        if r.n_zero_modes == 0 {
            continue;
        }
        match r.space {
            Space::Cr => {
                log::error!("{} p={} cr: {} spurious pressure modes", r.mesh, r.p, r.n_zero_modes);
                failed = true;
            }
            Space::Conforming => {
                log::warn!("{} p={} conforming: {} spurious pressure modes (expected near critical points)", r.mesh, r.p, r.n_zero_modes)
            }
        }
    }
    Ok(Outcome { text: table(&records, format)?, failed })
}

fn is_unit_square(mesh: &Triangulation) -> bool {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in &mesh.vertices {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let area: f64 = (0..mesh.n_triangles()).map(|t| mesh.frame(t).area).sum();
    lo == [0.0, 0.0] && hi == [1.0, 1.0] && (area - 1.0).abs() < 1e-12
}

/// Order-`p` Lagrange node positions, used as sample points.
fn sample_points(mesh: &Triangulation, p: usize) -> Vec<[f64; 2]> {
    lagrange_nodes(mesh, p).nodes.iter().map(|n| n.point).collect()
}

fn write_vtk(path: &Path, mesh: &Triangulation, sys: &StokesSystem, sol: &StokesSolution) -> Result<(), CliError> {
    let pts = sample_points(mesh, sys.p);
    let mut s = String::new();
    let n = pts.len();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\ncrlab velocity samples p={} {}\nASCII\nDATASET POLYDATA", sys.p, sys.space);
    let _ = writeln!(s, "POINTS {n} double");
    for x in &pts {
        let _ = writeln!(s, "{:?} {:?} 0", x[0], x[1]);
    }
    let _ = writeln!(s, "VERTICES {n} {}", 2 * n);
    for i in 0..n {
        let _ = writeln!(s, "1 {i}");
    }
    let _ = writeln!(s, "POINT_DATA {n}\nVECTORS velocity double");
    for x in &pts {
        let u = sol.velocity_at(mesh, sys, *x);
        let _ = writeln!(s, "{:?} {:?} 0", u[0], u[1]);
    }
    fs::write(path, s)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn solve(
    mesh: &MeshArgs,
    ps: &[usize],
    tol: &[String],
    space: SpaceArg,
    rhs: RhsArg,
    force: bool,
    dump: Option<&Path>,
    format: Format,
) -> Result<Outcome, CliError> {
    let tol = Tolerances::parse(tol)?;
    let meshes = mesh.load()?;
    let spaces = space.spaces();
    if dump.is_some() && meshes.len() * ps.len() * spaces.len() != 1 {
        return Err(CliError::Usage("--dump needs a single mesh, order and space".into()));
    }
    let opts = AssemblyOptions { quad_degree: tol.quad_degree, ..Default::default() };
    let zero = |_: [f64; 2]| [0.0, 0.0];
    let (f, rhs_name): (&dyn Fn([f64; 2]) -> [f64; 2], &str) = match rhs {
        RhsArg::Zero => (&zero, "zero"),
        RhsArg::Manufactured => (&manufactured_force, "manufactured"),
    };
    let mut records = Vec::new();
    for m in &meshes {
        for &p in ps {
            for &s in &spaces {
                let sys = assemble(&m.mesh, p, s, &opts)?;
                let sol = solve_stokes(&m.mesh, &sys, f, force).map_err(|e| {
                    CliError::Failed(format!("{} p={p} {s}: {e} (rerun with --force to solve anyway)", m.label))
                })?;
                let mut rec = SolveRecord::new(&m.label, rhs_name, force, &sys, &sol);
                if sol.pivot_ratio < crlab_core::stokes::PIVOT_RATIO_MIN {
                    eprintln!(
                        "warning: {} p={p} {s}: forced solve of a singular pair, pivot ratio {:.3e} (condition >= {:.3e})",
                        m.label,
                        sol.pivot_ratio,
                        1.0 / sol.pivot_ratio
                    );
                }
                let exact: Option<fn([f64; 2]) -> [f64; 2]> = match rhs {
                    RhsArg::Zero => Some(|_| [0.0, 0.0]),
                    RhsArg::Manufactured if is_unit_square(&m.mesh) => Some(manufactured_velocity),
                    RhsArg::Manufactured => None,
                };
                rec.velocity_error = exact.map(|u| {
                    sample_points(&m.mesh, p)
                        .into_iter()
                        .map(|x| {
                            let (a, b) = (sol.velocity_at(&m.mesh, &sys, x), u(x));
                            (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
                        })
                        .fold(0.0, f64::max)
                });
                if let Some(path) = dump {
                    write_vtk(path, &m.mesh, &sys, &sol)?;
                }
                records.push(rec);
            }
        }
    }
    Ok(Outcome { text: table(&records, format)?, failed: false })
}
