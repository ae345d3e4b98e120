//! Alternating triangle signs `σ_K` on a nodal patch.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{Chain, NodalPatch};

/// `signs[i]` is `σ` of `triangles[i]` of the patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatchSignAssignment {
    pub signs: Vec<i8>,
}

impl PatchSignAssignment {
    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i] as f64
    }

    pub fn is_alternating(&self) -> bool {
        let m = self.signs.len();
        (0..m).all(|i| self.signs[i] == -self.signs[(i + 1) % m])
    }

    pub fn negated(&self) -> Self {
        Self { signs: self.signs.iter().map(|s| -s).collect() }
    }
}

/// Cyclic alternation with `σ` of the first triangle equal to `-1`.
/// Impossible on a closed fan with an odd number of triangles.
pub fn sign_assignment(patch: &NodalPatch) -> Result<PatchSignAssignment> {
    let m = patch.m();
    if m % 2 == 1 {
        return Err(Error::OddCycle(m));
    }
    Ok(PatchSignAssignment { signs: (0..m).map(|i| if i % 2 == 0 { -1 } else { 1 }).collect() })
}

/// Signs on the open fan `K_1..K_{n+1}` of a chain, `σ_{K_j} = (-1)^j`.
/// Returned as `(patch triangle index, sign)`.
pub fn chain_signs(patch: &NodalPatch, chain: &Chain) -> Vec<(usize, i8)> {
    let m = patch.m();
    let mut out: Vec<(usize, i8)> = chain
        .rim
        .iter()
        .enumerate()
        .map(|(k, &r)| (r, if k % 2 == 0 { -1 } else { 1 }))
        .collect();
    let n = chain.len();
    out.push(((chain.rim[n - 1] + 1) % m, if n.is_multiple_of(2) { -1 } else { 1 }));
    out
}
