//! Deterministic mesh generators, addressed by compact spec strings such as
//! `crisscross:1.0`, `fan:m=6`, `chain:n=2,seed=7` or `grid:n=4,amp=0.1,seed=3`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::patch::{detect_critical_points, nodal_patch, DEFAULT_EPS_ANGLE};
use super::triangulation::Triangulation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    /// Square of side `side` split by both diagonals.
    Crisscross { side: f64 },
    /// Regular `m`-gon of circumradius `radius` fanned from its center.
    Fan { m: usize, radius: f64 },
    /// Single interior vertex whose rim contains exactly `n` consecutive
    /// critical points.
    Chain { n: usize, seed: u64 },
    /// Unit square, `n x n` cells with alternating diagonals, interior
    /// vertices jittered by up to `amp * h` per coordinate.
    Grid { n: usize, amp: f64, seed: u64 },
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSpec::Crisscross { side } => write!(f, "crisscross:s={side}"),
            MeshSpec::Fan { m, radius } => write!(f, "fan:m={m},r={radius}"),
            MeshSpec::Chain { n, seed } => write!(f, "chain:n={n},seed={seed}"),
            MeshSpec::Grid { n, amp, seed } => write!(f, "grid:n={n},amp={amp},seed={seed}"),
        }
    }
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::GeneratorSpec(msg.into())
}

struct Args {
    kind: String,
    map: BTreeMap<String, String>,
}

impl Args {
    fn parse(s: &str, positional: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut map = BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').unwrap_or((positional, part));
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(spec_err(format!("`{k}` given twice in `{s}`")));
            }
        }
        Ok(Self { kind: kind.trim().to_string(), map })
    }

    fn take<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.map.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| spec_err(format!("bad value `{v}` for `{key}` in {}", self.kind))),
            None => default.ok_or_else(|| spec_err(format!("{} needs `{key}`", self.kind))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(spec_err(format!("unknown parameter `{k}` for {}", self.kind))),
            None => Ok(()),
        }
    }
}

impl FromStr for MeshSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = s.split(':').next().unwrap_or("").trim();
        let spec = match kind {
            "crisscross" => {
                let mut a = Args::parse(s, "s")?;
                let side = a.take("s", Some(1.0))?;
                a.finish()?;
                MeshSpec::Crisscross { side }
            }
            "fan" => {
                let mut a = Args::parse(s, "m")?;
                let m = a.take("m", Some(6))?;
                let radius = a.take("r", Some(1.0))?;
                a.finish()?;
                MeshSpec::Fan { m, radius }
            }
            "chain" | "singular-chain" => {
                let mut a = Args::parse(s, "n")?;
                let n = a.take("n", None)?;
                let seed = a.take("seed", Some(0))?;
                a.finish()?;
                MeshSpec::Chain { n, seed }
            }
            "grid" | "perturbed-grid" => {
                let mut a = Args::parse(s, "n")?;
                let n = a.take("n", Some(4))?;
                let amp = a.take("amp", Some(0.1))?;
                let seed = a.take("seed", Some(0))?;
                a.finish()?;
                MeshSpec::Grid { n, amp, seed }
            }
            other => return Err(spec_err(format!("unknown mesh kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl MeshSpec {
    fn validate(&self) -> Result<()> {
        let positive = |x: f64, what: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(spec_err(format!("{what} must be positive, got {x}")))
            }
        };
        match *self {
            MeshSpec::Crisscross { side } => positive(side, "side"),
            MeshSpec::Fan { m, radius } => {
                if m < 3 {
                    return Err(spec_err(format!("fan needs m >= 3, got {m}")));
                }
                positive(radius, "radius")
            }
            MeshSpec::Chain { n, .. } => {
                if n == 0 || n > 12 {
                    return Err(spec_err(format!("chain length must be in 1..=12, got {n}")));
                }
                Ok(())
            }
            MeshSpec::Grid { n, amp, .. } => {
                if n == 0 {
                    return Err(spec_err("grid needs n >= 1"));
                }
                if !(0.0..0.3).contains(&amp) {
                    return Err(spec_err(format!("grid jitter amp must be in [0, 0.3), got {amp}")));
                }
                Ok(())
            }
        }
    }
}

pub fn generate_mesh(spec: &MeshSpec) -> Result<Triangulation> {
    spec.validate()?;
    let mesh = match *spec {
        MeshSpec::Crisscross { side } => crisscross(side),
        MeshSpec::Fan { m, radius } => fan(m, radius),
        MeshSpec::Chain { n, seed } => chain(n, seed),
        MeshSpec::Grid { n, amp, seed } => grid(n, amp, seed),
    }?;
    mesh.check_simply_connected()?;
    Ok(mesh)
}

fn crisscross(s: f64) -> Result<Triangulation> {
    let v = vec![[0.0, 0.0], [s, 0.0], [s, s], [0.0, s], [0.5 * s, 0.5 * s]];
    Triangulation::from_parts(v, vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
}

fn fan(m: usize, r: f64) -> Result<Triangulation> {
    let mut v = vec![[0.0, 0.0]];
    for k in 0..m {
        let a = 2.0 * PI * k as f64 / m as f64;
        v.push([r * a.cos(), r * a.sin()]);
    }
    Triangulation::from_parts(v, (0..m).map(|k| [0, k + 1, (k + 1) % m + 1]).collect())
}

/// Center at the origin, `n + 2` rim points on the line `y = -1` (the middle
/// `n` are critical, the two ends flank the chain) and three generic points
/// above. Samples are redrawn in the unlikely event of an accidental extra
/// critical point.
fn chain(n: usize, seed: u64) -> Result<Triangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = 1.0 / (n + 1) as f64;
    for _ in 0..100 {
        let mut v = vec![[0.0, 0.0]];
        for k in 0..n + 2 {
            let x = -1.0 + 2.0 * k as f64 * w + rng.random_range(-0.3..0.3) * w;
            v.push([x, -1.0]);
        }
        for base in [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
            let a = base + rng.random_range(-0.15..0.15);
            let r = rng.random_range(0.8..1.4);
            v.push([r * a.cos(), r * a.sin()]);
        }
        let m = v.len() - 1;
        let mesh = Triangulation::from_parts(v, (0..m).map(|k| [0, k + 1, (k + 1) % m + 1]).collect())?;
        let crit = detect_critical_points(&nodal_patch(&mesh, 0)?, 1e3 * DEFAULT_EPS_ANGLE);
        if crit.sigma_z == n && crit.chains.len() == 1 && !crit.center_critical {
            return Ok(mesh);
        }
    }
    Err(spec_err(format!("could not place a non-degenerate chain of length {n}")))
}

fn grid(n: usize, amp: f64, seed: u64) -> Result<Triangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let mut p = [i as f64 * h, j as f64 * h];
            if i > 0 && i < n && j > 0 && j < n && amp > 0.0 {
                p[0] += amp * h * rng.random_range(-1.0..1.0);
                p[1] += amp * h * rng.random_range(-1.0..1.0);
            }
            v.push(p);
        }
    }
    let mut t = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                t.push([a, b, c]);
                t.push([a, c, d]);
            } else {
                t.push([a, b, d]);
                t.push([b, c, d]);
            }
        }
    }
    Triangulation::from_parts(v, t)
}
