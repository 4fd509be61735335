#![allow(dead_code)]

use posadisc_core::graph::{ColoredGraph, GraphBuilder};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sign(rng: &mut ChaCha8Rng) -> i64 {
    if rng.gen::<bool>() {
        1
    } else {
        -1
    }
}

/// `K_n` with random labels.
pub fn random_complete(n: usize, rng: &mut ChaCha8Rng) -> ColoredGraph {
    random_graph(n, 1.0, rng)
}

pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> ColoredGraph {
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                let s = sign(rng);
                b.add_edge(u, v, s).unwrap();
            }
        }
    }
    b.build()
}

/// `K_n` with random labels and `k` random edges removed.
pub fn near_complete(n: usize, k: usize, rng: &mut ChaCha8Rng) -> ColoredGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let mut b = GraphBuilder::new(n);
    for &(u, v) in &pairs[k.min(pairs.len())..] {
        let s = sign(rng);
        b.add_edge(u, v, s).unwrap();
    }
    b.build()
}

/// Graph on `n` vertices whose edges are the set bits of `mask` over the
/// lexicographic pair order.
pub fn graph_from_mask(n: usize, mask: u64, label: i64) -> ColoredGraph {
    let mut b = GraphBuilder::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                b.add_edge(u, v, label).unwrap();
            }
            bit += 1;
        }
    }
    b.build()
}

/// `K_n` whose labels are the bits of `mask` (1 means `+1`).
pub fn coloring_from_mask(n: usize, mask: u64) -> ColoredGraph {
    let mut b = GraphBuilder::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            b.add_edge(u, v, if mask >> bit & 1 == 1 { 1 } else { -1 }).unwrap();
            bit += 1;
        }
    }
    b.build()
}
