//! r-th powers of cycles as multigraphs.
//!
//! A cycle `(v_0, ..., v_{m-1})` may repeat vertices. Its r-th power has one
//! slot per `(i, j)` with `j` in `1..=r`, joining `v_i` and `v_{i+j}` (indices
//! mod `m`). The multiplicity of a pair is the number of slots landing on it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cycle {
    seq: Vec<usize>,
}

impl Cycle {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        if seq.len() < 3 {
            return Err(Error::CycleTooShort { len: seq.len(), min: 3 });
        }
        Ok(Cycle { seq })
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Number of occurrences of `v`.
    pub fn cnt(&self, v: usize) -> usize {
        self.seq.iter().filter(|&&x| x == v).count()
    }

    pub fn is_simple(&self) -> bool {
        let mut s = self.seq.clone();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    }
}

impl TryFrom<Vec<usize>> for Cycle {
    type Error = Error;
    fn try_from(seq: Vec<usize>) -> Result<Self> {
        Cycle::new(seq)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerMultigraph {
    pub r: usize,
    /// Keyed by `(min, max)` of the pair.
    pub mul: BTreeMap<(usize, usize), u32>,
}

impl PowerMultigraph {
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.mul.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> u64 {
        self.mul.values().map(|&m| u64::from(m)).sum()
    }

    /// Multiplicity-weighted degree of `v`.
    pub fn weighted_degree(&self, v: usize) -> u64 {
        self.mul.iter().filter(|((a, b), _)| *a == v || *b == v).map(|(_, &m)| u64::from(m)).sum()
    }

    /// Number of distinct partners of `v`.
    pub fn simple_degree(&self, v: usize) -> usize {
        self.mul.keys().filter(|(a, b)| *a == v || *b == v).count()
    }
}

pub fn power_multiplicities(c: &Cycle, r: usize) -> Result<PowerMultigraph> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let m = c.len();
    if m < r + 1 {
        return Err(Error::CycleTooShort { len: m, min: r + 1 });
    }
    let mut mul = BTreeMap::new();
    for i in 0..m {
        for j in 1..=r {
            let (x, y) = (c.seq[i], c.seq[(i + j) % m]);
            if x == y {
                return Err(Error::DegenerateSlot { vertex: x, distance: j });
            }
            *mul.entry((x.min(y), x.max(y))).or_insert(0) += 1;
        }
    }
    Ok(PowerMultigraph { r, mul })
}

fn first_missing(g: &ColoredGraph, p: &PowerMultigraph) -> Option<(usize, usize)> {
    p.mul.keys().copied().find(|&(u, v)| !g.has_edge(u, v))
}

fn check_range(g: &ColoredGraph, c: &Cycle) -> Result<()> {
    c.seq().iter().try_for_each(|&v| g.check_vertex(v))
}

pub fn is_power_subgraph(g: &ColoredGraph, c: &Cycle, r: usize) -> Result<bool> {
    check_range(g, c)?;
    let p = power_multiplicities(c, r)?;
    Ok(first_missing(g, &p).is_none())
}

/// `sum mul(e) * f(e)` over the pairs of the power.
pub fn power_discrepancy(g: &ColoredGraph, c: &Cycle, r: usize) -> Result<i64> {
    check_range(g, c)?;
    let p = power_multiplicities(c, r)?;
    discrepancy_of(g, &p)
}

pub(crate) fn discrepancy_of(g: &ColoredGraph, p: &PowerMultigraph) -> Result<i64> {
    let mut total = 0i64;
    for (&(u, v), &m) in &p.mul {
        let l = g.label(u, v).ok_or(Error::NotContained(u, v))?;
        total += i64::from(m) * i64::from(l);
    }
    Ok(total)
}

/// The r-th power of the Hamilton cycle given by `ordering`, with its discrepancy.
pub fn hamilton_power(g: &ColoredGraph, ordering: &[usize], r: usize) -> Result<(PowerMultigraph, i64)> {
    let n = g.n();
    let mut seen = vec![false; n];
    if ordering.len() != n {
        return Err(Error::NotPermutation);
    }
    for &v in ordering {
        g.check_vertex(v)?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::NotPermutation);
        }
    }
    if r == 0 || n < 2 * r + 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2r+1, got n={n}, r={r}")));
    }
    let c = Cycle::new(ordering.to_vec())?;
    let p = power_multiplicities(&c, r)?;
    let d = discrepancy_of(g, &p)?;
    Ok((p, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn cyc(v: &[usize]) -> Cycle {
        Cycle::new(v.to_vec()).unwrap()
    }

    #[test]
    fn clique_cycle_doubles_every_edge() {
        let p = power_multiplicities(&cyc(&[0, 1, 2, 3]), 3).unwrap();
        assert_eq!(p.mul.len(), 6);
        assert!(p.mul.values().all(|&m| m == 2));
        let p = power_multiplicities(&cyc(&[0, 1, 2]), 2).unwrap();
        assert_eq!(p.mul.len(), 3);
        assert!(p.mul.values().all(|&m| m == 2));
    }

    #[test]
    fn repeated_vertex_cycle() {
        // Slots (i, i+j) for the 6-cycle (0,1,2,0,3,4), r = 2:
        // 01 02 | 12 10 | 20 23 | 03 04 | 34 30 | 40 41
        let p = power_multiplicities(&cyc(&[0, 1, 2, 0, 3, 4]), 2).unwrap();
        let expect = [((0, 1), 2), ((0, 2), 2), ((0, 3), 2), ((0, 4), 2), ((1, 2), 1), ((1, 4), 1), ((2, 3), 1), ((3, 4), 1)];
        assert_eq!(p.mul, expect.into_iter().collect());
        assert_eq!(p.total(), 12);
    }

    #[test]
    fn rejects_degenerate_and_short() {
        assert!(matches!(power_multiplicities(&cyc(&[0, 1, 0, 2]), 2), Err(Error::DegenerateSlot { vertex: 0, distance: 2 })));
        assert!(matches!(power_multiplicities(&cyc(&[0, 1, 2]), 3), Err(Error::CycleTooShort { .. })));
        assert!(power_multiplicities(&cyc(&[0, 1, 2]), 0).is_err());
        assert!(Cycle::new(vec![0, 1]).is_err());
    }

    #[test]
    fn containment() {
        let k4 = ColoredGraph::complete(4, -1);
        assert!(is_power_subgraph(&k4, &cyc(&[0, 1, 2, 3]), 3).unwrap());
        let mut b = GraphBuilder::new(4);
        for (u, v) in [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)] {
            b.add_edge(u, v, 1).unwrap();
        }
        assert!(!is_power_subgraph(&b.build(), &cyc(&[0, 1, 2, 3]), 2).unwrap());
        assert!(is_power_subgraph(&k4, &cyc(&[0, 1, 9]), 2).is_err());
    }

    #[test]
    fn antipodal_turan_ordering_is_contained() {
        let mut b = GraphBuilder::new(8);
        for u in 0..8 {
            for v in u + 1..8 {
                if u / 2 != v / 2 {
                    b.add_edge(u, v, 1).unwrap();
                }
            }
        }
        assert!(is_power_subgraph(&b.build(), &cyc(&[0, 2, 4, 6, 1, 3, 5, 7]), 3).unwrap());
    }

    #[test]
    fn discrepancies_on_k4() {
        let c = cyc(&[0, 1, 2, 3]);
        assert_eq!(power_discrepancy(&ColoredGraph::complete(4, 1), &c, 3).unwrap(), 12);
        assert_eq!(power_discrepancy(&ColoredGraph::complete(4, -1), &c, 3).unwrap(), -12);
        let star = ColoredGraph::from_edges(4, &[(0, 1, -1), (0, 2, -1), (0, 3, -1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        assert_eq!(power_discrepancy(&star, &c, 3).unwrap(), 0);
        let missing = ColoredGraph::from_edges(4, &[(0, 1, 1)]).unwrap();
        assert!(matches!(power_discrepancy(&missing, &c, 3), Err(Error::NotContained(..))));
    }

    #[test]
    fn hamilton_power_cases() {
        let k7 = ColoredGraph::complete(7, 1);
        let (p, d) = hamilton_power(&k7, &[0, 1, 2, 3, 4, 5, 6], 3).unwrap();
        assert_eq!(d, 21);
        assert_eq!(p.mul.len(), 21);
        assert!(hamilton_power(&ColoredGraph::complete(6, 1), &[0, 1, 2, 3, 4, 5], 3).is_err());
        assert!(matches!(hamilton_power(&k7, &[0, 1, 2, 3, 4, 5, 5], 3), Err(Error::NotPermutation)));
        assert!(matches!(hamilton_power(&k7, &[0, 1, 2], 3), Err(Error::NotPermutation)));
    }
}
