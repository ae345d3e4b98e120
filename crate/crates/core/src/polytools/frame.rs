//! Barycentric calculus on a single triangle.
//!
//! Vertices are `A_0, A_1, A_2` (counterclockwise), edge `E_i` is opposite
//! `A_i`, and vertex indices are taken cyclically.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// `v^⊥ = (v_2, -v_1)`.
#[inline]
pub(crate) fn perp(v: Point) -> Point {
    [v[1], -v[0]]
}

/// `det[a | b]`.
#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Twice the signed area of `(a, b, c)`.
#[inline]
pub fn signed_area2(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

#[inline]
fn next(i: usize) -> usize {
    (i + 1) % 3
}

#[inline]
fn prev(i: usize) -> usize {
    (i + 2) % 3
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricFrame {
    pub vertices: [Point; 3],
    pub area: f64,
    pub grads: [Point; 3],
    pub edge_lengths: [f64; 3],
    pub normals: [Point; 3],
    pub tangents: [Point; 3],
    pub angles: [f64; 3],
}

impl BarycentricFrame {
    pub fn new(a0: Point, a1: Point, a2: Point) -> Result<Self> {
        let vertices = [a0, a1, a2];
        let area = 0.5 * signed_area2(a0, a1, a2);
        let mut edge_lengths = [0.0; 3];
        for i in 0..3 {
            edge_lengths[i] = norm(sub(vertices[prev(i)], vertices[next(i)]));
        }
        let h = edge_lengths.iter().cloned().fold(0.0, f64::max);
        if !(area > 1e-14 * h * h) {
            return Err(Error::DegenerateTriangle { tri: 0, area });
        }
        let mut grads = [[0.0; 2]; 3];
        let mut normals = [[0.0; 2]; 3];
        let mut tangents = [[0.0; 2]; 3];
        let mut angles = [0.0; 3];
        for i in 0..3 {
            let g = perp(sub(vertices[next(i)], vertices[prev(i)]));
            grads[i] = [g[0] / (2.0 * area), g[1] / (2.0 * area)];
            let e = sub(vertices[prev(i)], vertices[next(i)]);
            let len = edge_lengths[i];
            let n = perp(e);
            normals[i] = [n[0] / len, n[1] / len];
            tangents[i] = [e[0] / len, e[1] / len];
            let u = sub(vertices[next(i)], vertices[i]);
            let w = sub(vertices[prev(i)], vertices[i]);
            angles[i] = cross(u, w).atan2(dot(u, w));
        }
        Ok(Self { vertices, area, grads, edge_lengths, normals, tangents, angles })
    }

    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let mut l = [0.0; 3];
        for (i, li) in l.iter_mut().enumerate() {
            *li = dot(self.grads[i], sub(x, self.vertices[next(i)]));
        }
        l
    }

    pub fn point(&self, lambda: [f64; 3]) -> Point {
        let mut x = [0.0; 2];
        for i in 0..3 {
            x[0] += lambda[i] * self.vertices[i][0];
            x[1] += lambda[i] * self.vertices[i][1];
        }
        x
    }

    pub fn diameter(&self) -> f64 {
        self.edge_lengths.iter().cloned().fold(0.0, f64::max)
    }

    /// Diameter of the inscribed circle.
    pub fn inscribed_diameter(&self) -> f64 {
        4.0 * self.area / self.edge_lengths.iter().sum::<f64>()
    }

    /// Angle `β_{i,k}` at the vertex where `E_i` and `E_k` meet (`β_{i,i} = π`).
    pub fn beta(&self, i: usize, k: usize) -> f64 {
        if i == k {
            PI
        } else {
            self.angles[3 - i - k]
        }
    }

    pub fn directional_derivative(&self, i: usize, w: Point) -> f64 {
        dot(self.grads[i], w)
    }

    /// `∂_{n_k} λ_i` from the gradient.
    pub fn normal_derivative(&self, i: usize, k: usize) -> f64 {
        dot(self.grads[i], self.normals[k])
    }

    /// `∂_{t_k} λ_i` from the gradient.
    pub fn tangential_derivative(&self, i: usize, k: usize) -> f64 {
        dot(self.grads[i], self.tangents[k])
    }

    /// `cos(β_{i,k}) |E_i| / (2|K|)`.
    pub fn normal_derivative_closed(&self, i: usize, k: usize) -> f64 {
        self.beta(i, k).cos() * self.edge_lengths[i] / (2.0 * self.area)
    }

    /// `ε_{i,k} / |E_k|`.
    pub fn tangential_derivative_closed(&self, i: usize, k: usize) -> f64 {
        tangent_sign(i, k) / self.edge_lengths[k]
    }
}

/// `ε_{i,k} = ((k - i + 1) mod 3) - 1`: `-1` for `k = i-1`, `0` for `k = i`, `1` for `k = i+1`.
pub fn tangent_sign(i: usize, k: usize) -> f64 {
    ((k + 4 - i) % 3) as f64 - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> BarycentricFrame {
        BarycentricFrame::new([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]).unwrap()
    }

    #[test]
    fn reference_hypotenuse_normal_derivative() {
        let f = reference();
        let expected = -(2.0f64.sqrt());
        assert!((f.normal_derivative(0, 0) - expected).abs() < 1e-14);
        assert!((f.normal_derivative_closed(0, 0) - expected).abs() < 1e-14);
    }

    #[test]
    fn tangential_table() {
        let f = BarycentricFrame::new([0.2, -0.1], [1.3, 0.4], [-0.3, 0.9]).unwrap();
        for i in 0..3 {
            assert!(f.tangential_derivative(i, i).abs() < 1e-14);
            let k = next(i);
            assert!((f.tangential_derivative(i, k) - 1.0 / f.edge_lengths[k]).abs() < 1e-13);
            let k = prev(i);
            assert!((f.tangential_derivative(i, k) + 1.0 / f.edge_lengths[k]).abs() < 1e-13);
        }
        assert_eq!(tangent_sign(0, 0), 0.0);
        assert_eq!(tangent_sign(0, 1), 1.0);
        assert_eq!(tangent_sign(0, 2), -1.0);
        assert_eq!(tangent_sign(2, 0), 1.0);
    }

    #[test]
    fn kronecker_and_partition() {
        let f = BarycentricFrame::new([0.2, -0.1], [1.3, 0.4], [-0.3, 0.9]).unwrap();
        for j in 0..3 {
            let l = f.barycentric(f.vertices[j]);
            for i in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                assert!((l[i] - d).abs() < 1e-12);
            }
        }
        let gs = [0, 1].map(|c| f.grads.iter().map(|g| g[c]).sum::<f64>());
        assert!(gs[0].abs() < 1e-12 && gs[1].abs() < 1e-12);
        assert!((f.angles.iter().sum::<f64>() - PI).abs() < 1e-13);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(BarycentricFrame::new([0.0, 0.0], [1.0, 0.0], [2.0, 0.0]).is_err());
        assert!(BarycentricFrame::new([0.0, 0.0], [0.0, 1.0], [1.0, 0.0]).is_err());
    }
}
