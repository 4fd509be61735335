//! Colourings showing the minimum-degree threshold is tight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundSpec {
    pub r: usize,
    pub t: usize,
    pub m: usize,
    pub seed: u64,
}

impl LowerBoundSpec {
    pub fn n(&self) -> usize {
        (self.r + 1) * self.t + self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 3 {
            return Err(Error::InvalidParameter(format!("r must be at least 3, got {}", self.r)));
        }
        if self.t == 0 || self.t % 2 != 0 {
            return Err(Error::InvalidParameter(format!("t must be positive and even, got {}", self.t)));
        }
        if self.m > self.t {
            return Err(Error::InvalidParameter(format!("m = {} exceeds t = {}", self.m, self.t)));
        }
        Ok(())
    }

    /// Part index of a vertex: `1..=r+1` for the balanced parts, `0` for `V_0`.
    pub fn part(&self, v: usize) -> usize {
        let body = (self.r + 1) * self.t;
        if v >= body {
            0
        } else {
            v / self.t + 1
        }
    }

    /// The first `t/2` vertices of each balanced part are positive.
    pub fn is_positive(&self, v: usize) -> bool {
        self.part(v) != 0 && v % self.t < self.t / 2
    }
}

/// Parts `V_1..V_{r+1}` take ids `(i-1)t..it`; `V_0` takes the last `m` ids.
///
/// An edge between `v` in `V_i` and `u` in `V_j` with `j < i` is labelled `+1`
/// iff `v` is positive. Edges touching `V_0` are labelled uniformly at random
/// from the seed, visiting them in lexicographic order.
pub fn build_lower_bound(spec: &LowerBoundSpec) -> Result<ColoredGraph> {
    spec.validate()?;
    let n = spec.n();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let (pu, pv) = (spec.part(u), spec.part(v));
            if pu == 0 || pv == 0 {
                let label = if rng.gen::<bool>() { 1 } else { -1 };
                b.add_edge(u, v, label)?;
            } else if pu != pv {
                // v has the larger id, hence the larger part index.
                b.add_edge(u, v, if spec.is_positive(v) { 1 } else { -1 })?;
            }
        }
    }
    Ok(b.build())
}

/// Balanced complete 4-partite graph on `4k` vertices. Part 0 is `0..k`; every
/// edge touching it is labelled `-1`, all others `+1`.
pub fn build_turan_square(k: usize) -> Result<ColoredGraph> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let n = 4 * k;
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if u / k != v / k {
                b.add_edge(u, v, if u / k == 0 { -1 } else { 1 })?;
            }
        }
    }
    Ok(b.build())
}

/// `5 r (r+1) m`.
pub fn predicted_bound(r: usize, m: usize) -> u64 {
    5 * r as u64 * (r as u64 + 1) * m as u64
}
