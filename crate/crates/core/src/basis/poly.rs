//! Homogeneous polynomials in the three barycentric coordinates.
//!
//! A degree-`d` polynomial is stored as one coefficient per multi-index
//! `μ` with `|μ| = d`; lower-degree terms are homogenized with powers of
//! `S = λ1 + λ2 + λ3`, which equals 1 on the triangle.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::polytools::frame::Point;
use crate::polytools::jacobi::recurrence_coefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex3(pub [usize; 3]);

impl MultiIndex3 {
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// Position in the canonical ordering of `I³_{=d}`.
    pub fn index(&self) -> usize {
        let i = self.0[1] + self.0[2];
        i * (i + 1) / 2 + self.0[2]
    }

    /// All `μ` with `|μ| = d`, in canonical order.
    pub fn all_of_degree(d: usize) -> Vec<MultiIndex3> {
        let mut out = Vec::with_capacity(n_monomials(d));
        for i in 0..=d {
            for j in 0..=i {
                out.push(MultiIndex3([d - i, i - j, j]));
            }
        }
        out
    }

    /// All `μ` with `|μ| <= d`, by increasing degree.
    pub fn all_up_to(d: usize) -> Vec<MultiIndex3> {
        (0..=d).flat_map(Self::all_of_degree).collect()
    }
}

pub fn n_monomials(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `∫_K λ^μ = 2|K| μ1! μ2! μ3! / (|μ| + 2)!`.
pub fn monomial_integral(mu: MultiIndex3, area: f64) -> f64 {
    let [a, b, c] = mu.0;
    2.0 * area * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomPoly {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl HomPoly {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![0.0; n_monomials(degree)] }
    }

    /// `S^d`, the constant one.
    pub fn one(degree: usize) -> Self {
        let mut p = Self::zero(0);
        p.coeffs[0] = 1.0;
        p.homogenize(degree)
    }

    pub fn monomial(mu: MultiIndex3) -> Self {
        let mut p = Self::zero(mu.degree());
        p.coeffs[mu.index()] = 1.0;
        p
    }

    /// `Σ a_i λ_i`.
    pub fn linear(a: [f64; 3]) -> Self {
        // canonical order for d = 1 is (1,0,0), (0,1,0), (0,0,1)
        Self { degree: 1, coeffs: a.to_vec() }
    }

    pub fn lambda(i: usize) -> Self {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        Self::linear(a)
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex3, f64)> + '_ {
        MultiIndex3::all_of_degree(self.degree).into_iter().zip(self.coeffs.iter().cloned())
    }

    pub fn get(&self, mu: MultiIndex3) -> f64 {
        if mu.degree() != self.degree {
            return 0.0;
        }
        self.coeffs[mu.index()]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Multiplies by `S^(d - degree)`.
    pub fn homogenize(&self, d: usize) -> Self {
        assert!(d >= self.degree, "cannot lower the degree by homogenizing");
        let mut p = self.clone();
        let s = Self::linear([1.0; 3]);
        while p.degree < d {
            p = &p * &s;
        }
        p
    }

    pub fn eval(&self, l: [f64; 3]) -> f64 {
        let d = self.degree;
        let mut powers = vec![[1.0; 3]; d + 1];
        for k in 1..=d {
            for i in 0..3 {
                powers[k][i] = powers[k - 1][i] * l[i];
            }
        }
        let mut s = 0.0;
        for (mu, c) in self.terms() {
            if c != 0.0 {
                s += c * powers[mu.0[0]][0] * powers[mu.0[1]][1] * powers[mu.0[2]][2];
            }
        }
        s
    }

    /// `∂/∂λ_i`, degree one lower (zero polynomial for constants).
    pub fn d_lambda(&self, i: usize) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        let mut out = Self::zero(self.degree - 1);
        for (mu, c) in self.terms() {
            if mu.0[i] > 0 {
                let mut nu = mu;
                nu.0[i] -= 1;
                out.coeffs[nu.index()] += c * mu.0[i] as f64;
            }
        }
        out
    }

    /// Derivative along the constant vector `w` given the gradients of the
    /// barycentric coordinates: `Σ_i ∂f/∂λ_i ⟨∇λ_i, w⟩`.
    pub fn directional(&self, grads: &[Point; 3], w: Point) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (i, g) in grads.iter().enumerate() {
            let s = g[0] * w[0] + g[1] * w[1];
            if s != 0.0 {
                let d = self.d_lambda(i);
                for (o, c) in out.coeffs.iter_mut().zip(&d.coeffs) {
                    *o += s * c;
                }
            }
        }
        out
    }

    /// `(∂_x f, ∂_y f)`.
    pub fn gradient(&self, grads: &[Point; 3]) -> [Self; 2] {
        [self.directional(grads, [1.0, 0.0]), self.directional(grads, [0.0, 1.0])]
    }

    /// Exact integral over a triangle of the given area.
    pub fn integrate(&self, area: f64) -> f64 {
        self.terms().map(|(mu, c)| c * monomial_integral(mu, area)).sum()
    }

    /// Permutes the barycentric coordinates: the result `g` satisfies
    /// `g(λ) = f(λ ∘ perm)`, i.e. `λ_i` of `f` becomes `λ_{perm[i]}`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        let mut out = Self::zero(self.degree);
        for (mu, c) in self.terms() {
            let mut nu = [0; 3];
            for i in 0..3 {
                nu[perm[i]] = mu.0[i];
            }
            out.coeffs[MultiIndex3(nu).index()] += c;
        }
        out
    }
}

impl Add for &HomPoly {
    type Output = HomPoly;

    fn add(self, rhs: &HomPoly) -> HomPoly {
        let d = self.degree.max(rhs.degree);
        let a = self.homogenize(d);
        let b = rhs.homogenize(d);
        HomPoly { degree: d, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl Sub for &HomPoly {
    type Output = HomPoly;

    fn sub(self, rhs: &HomPoly) -> HomPoly {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &HomPoly {
    type Output = HomPoly;

    fn neg(self) -> HomPoly {
        self.scale(-1.0)
    }
}

impl Mul for &HomPoly {
    type Output = HomPoly;

    fn mul(self, rhs: &HomPoly) -> HomPoly {
        let mut out = HomPoly::zero(self.degree + rhs.degree);
        let rt: Vec<(MultiIndex3, f64)> = rhs.terms().filter(|t| t.1 != 0.0).collect();
        for (a, ca) in self.terms().filter(|t| t.1 != 0.0) {
            for &(b, cb) in &rt {
                let mu = MultiIndex3([a.0[0] + b.0[0], a.0[1] + b.0[1], a.0[2] + b.0[2]]);
                out.coeffs[mu.index()] += ca * cb;
            }
        }
        out
    }
}

/// `P_n^(α,β)(t)` for a linear form `t`, homogenized to degree `n` with
/// `S`: `P_k = (a_k t + b_k S) P_{k-1} - c_k S² P_{k-2}`.
pub fn jacobi_composed(n: usize, alpha: f64, beta: f64, t: &HomPoly) -> HomPoly {
    assert_eq!(t.degree, 1, "argument must be a linear form");
    let s = HomPoly::linear([1.0; 3]);
    let s2 = &s * &s;
    let mut prev = HomPoly::one(0);
    if n == 0 {
        return prev;
    }
    let (a, b, _) = recurrence_coefficients(1, alpha, beta);
    let mut cur = &t.scale(a) + &s.scale(b);
    for k in 2..=n {
        let (a, b, c) = recurrence_coefficients(k, alpha, beta);
        let lin = &t.scale(a) + &s.scale(b);
        let next = &(&lin * &cur) - &(&s2 * &prev).scale(c);
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_n^(α,β)(1 - 2λ_ℓ)` as a homogeneous polynomial of degree `n`.
pub fn jacobi_of_lambda(n: usize, alpha: f64, beta: f64, ell: usize) -> HomPoly {
    let mut a = [1.0; 3];
    a[ell] = -1.0;
    jacobi_composed(n, alpha, beta, &HomPoly::linear(a))
}
