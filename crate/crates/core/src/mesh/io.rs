//! Native text format:
//!
//! ```text
//! # comment
//! V 3
//! 0 0
//! 1 0
//! 0 1
//! T 1
//! 0 1 2
//! ```
//!
//! Coordinates are written in shortest round-trip form, so save followed by
//! load reproduces every coordinate bit for bit.

use std::io::{BufRead, Write};

use super::triangulation::Triangulation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeshFormat {
    #[default]
    NativeText,
}

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, std::io::Result<String>)> + 'a>,
}

impl Lines<'_> {
    /// Next non-empty, comment-stripped line with its 1-based number.
    fn next_content(&mut self) -> Result<Option<(usize, String)>> {
        for (i, line) in self.inner.by_ref() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                return Ok(Some((i + 1, body.to_string())));
            }
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str, last_line: usize) -> Result<(usize, String)> {
        self.next_content()?.ok_or_else(|| Error::Parse {
            line: last_line + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn parse_header(line: usize, body: &str, tag: &str) -> Result<usize> {
    let mut it = body.split_whitespace();
    let err = || Error::Parse { line, msg: format!("expected `{tag} <count>`, found `{body}`") };
    if it.next() != Some(tag) {
        return Err(err());
    }
    let n = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    if it.next().is_some() {
        return Err(err());
    }
    Ok(n)
}

fn parse_fields<T: std::str::FromStr, const N: usize>(line: usize, body: &str) -> Result<[T; N]> {
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != N {
        return Err(Error::Parse { line, msg: format!("expected {N} fields, found {}", parts.len()) });
    }
    let mut out = Vec::with_capacity(N);
    for p in parts {
        out.push(p.parse::<T>().map_err(|_| Error::Parse { line, msg: format!("cannot parse `{p}`") })?);
    }
    Ok(out.try_into().ok().unwrap())
}

pub fn load_mesh(source: impl BufRead, format: MeshFormat) -> Result<Triangulation> {
    let MeshFormat::NativeText = format;
    let mut lines = Lines { inner: Box::new(source.lines().enumerate()) };
    let (mut ln, body) = lines.expect("`V <count>`", 0)?;
    let nv = parse_header(ln, &body, "V")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, body) = lines.expect("vertex coordinates", ln)?;
        ln = l;
        let [x, y]: [f64; 2] = parse_fields(ln, &body)?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse { line: ln, msg: "non-finite coordinate".into() });
        }
        vertices.push([x, y]);
    }
    let (l, body) = lines.expect("`T <count>`", ln)?;
    ln = l;
    let nt = parse_header(ln, &body, "T")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (l, body) = lines.expect("triangle indices", ln)?;
        ln = l;
        let tri: [usize; 3] = parse_fields(ln, &body)?;
        if let Some(&v) = tri.iter().find(|&&v| v >= nv) {
            return Err(Error::Parse { line: ln, msg: format!("vertex index {v} out of range (V {nv})") });
        }
        triangles.push(tri);
    }
    if let Some((l, body)) = lines.next_content()? {
        return Err(Error::Parse { line: l, msg: format!("trailing content `{body}`") });
    }
    Triangulation::from_parts(vertices, triangles)
}

pub fn parse_mesh(text: &str) -> Result<Triangulation> {
    load_mesh(text.as_bytes(), MeshFormat::NativeText)
}

pub fn save_mesh(mesh: &Triangulation, mut out: impl Write) -> Result<()> {
    writeln!(out, "V {}", mesh.n_vertices())?;
    for v in &mesh.vertices {
        writeln!(out, "{:?} {:?}", v[0], v[1])?;
    }
    writeln!(out, "T {}", mesh.n_triangles())?;
    for t in &mesh.triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn mesh_to_string(mesh: &Triangulation) -> String {
    let mut buf = Vec::new();
    save_mesh(mesh, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}
