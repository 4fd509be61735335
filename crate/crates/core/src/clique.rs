//! The four clique types and the square equation.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, VertexSet};
use crate::template::Tiling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CliqueType {
    PlusClique,
    MinusClique,
    PlusStar { head: usize },
    MinusStar { head: usize },
}

impl CliqueType {
    pub fn head(&self) -> Option<usize> {
        match *self {
            CliqueType::PlusStar { head } | CliqueType::MinusStar { head } => Some(head),
            _ => None,
        }
    }

    /// Label this type prescribes for the pair `{u, v}`.
    pub fn expected_label(&self, u: usize, v: usize) -> i8 {
        match *self {
            CliqueType::PlusClique => 1,
            CliqueType::MinusClique => -1,
            CliqueType::PlusStar { head } => {
                if u == head || v == head {
                    1
                } else {
                    -1
                }
            }
            CliqueType::MinusStar { head } => {
                if u == head || v == head {
                    -1
                } else {
                    1
                }
            }
        }
    }
}

impl std::fmt::Display for CliqueType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliqueType::PlusClique => write!(f, "plus-clique"),
            CliqueType::MinusClique => write!(f, "minus-clique"),
            CliqueType::PlusStar { head } => write!(f, "plus-star(head={head})"),
            CliqueType::MinusStar { head } => write!(f, "minus-star(head={head})"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TypeCensus {
    pub plus_cliques: usize,
    pub minus_cliques: usize,
    pub plus_stars: usize,
    pub minus_stars: usize,
}

impl TypeCensus {
    pub fn total(&self) -> usize {
        self.plus_cliques + self.minus_cliques + self.plus_stars + self.minus_stars
    }
}

fn clique_vertices(g: &ColoredGraph, s: &VertexSet) -> Result<Vec<usize>> {
    let vs: Vec<usize> = s.iter().copied().collect();
    g.is_clique(&vs)?;
    Ok(vs)
}

fn lab(g: &ColoredGraph, u: usize, v: usize) -> i32 {
    g.label(u, v).map(i32::from).unwrap_or(0)
}

/// `f(a,b) + f(c,d) = f(a,c) + f(b,d)` for all distinct `a,b,c,d` in `s`.
///
/// Ranging over ordered quadruples is the same as asking that the three
/// pairings of every 4-subset have equal sums.
pub fn square_equation_holds(g: &ColoredGraph, s: &VertexSet) -> Result<bool> {
    let vs = clique_vertices(g, s)?;
    if vs.len() < 4 {
        return Err(Error::InvalidParameter("square equation needs at least 4 vertices".into()));
    }
    Ok(vs.iter().tuple_combinations().all(|(&a, &b, &c, &d)| {
        let p1 = lab(g, a, b) + lab(g, c, d);
        let p2 = lab(g, a, c) + lab(g, b, d);
        let p3 = lab(g, a, d) + lab(g, b, c);
        p1 == p2 && p2 == p3
    }))
}

/// Head of the spanning star formed by the edges with label `sign`, if any.
fn star_head(g: &ColoredGraph, vs: &[usize], sign: i8) -> Option<usize> {
    let k = vs.len();
    let deg = |v: usize| vs.iter().filter(|&&u| u != v && g.label(u, v) == Some(sign)).count();
    let count: usize = vs.iter().map(|&v| deg(v)).sum::<usize>() / 2;
    if count != k - 1 {
        return None;
    }
    vs.iter().copied().find(|&v| deg(v) == k - 1)
}

pub fn classify_clique(g: &ColoredGraph, s: &VertexSet) -> Result<Option<CliqueType>> {
    let vs = clique_vertices(g, s)?;
    if vs.len() < 3 {
        return Err(Error::InvalidParameter("classification needs at least 3 vertices".into()));
    }
    let plus = vs.iter().tuple_combinations().filter(|(&u, &v)| g.label(u, v) == Some(1)).count();
    let pairs = vs.len() * (vs.len() - 1) / 2;
    if plus == pairs {
        return Ok(Some(CliqueType::PlusClique));
    }
    if plus == 0 {
        return Ok(Some(CliqueType::MinusClique));
    }
    if let Some(head) = star_head(g, &vs, 1) {
        return Ok(Some(CliqueType::PlusStar { head }));
    }
    if let Some(head) = star_head(g, &vs, -1) {
        return Ok(Some(CliqueType::MinusStar { head }));
    }
    Ok(None)
}

pub fn census_tiling(g: &ColoredGraph, t: &Tiling) -> Result<TypeCensus> {
    let mut census = TypeCensus::default();
    for (index, c) in t.cycles.iter().enumerate() {
        if c.len() != t.r + 1 {
            return Err(Error::LengthBound { len: c.len(), min: t.r + 1, max: t.r + 1 });
        }
        let s: VertexSet = c.seq().iter().copied().collect();
        match classify_clique(g, &s)? {
            Some(CliqueType::PlusClique) => census.plus_cliques += 1,
            Some(CliqueType::MinusClique) => census.minus_cliques += 1,
            Some(CliqueType::PlusStar { .. }) => census.plus_stars += 1,
            Some(CliqueType::MinusStar { .. }) => census.minus_stars += 1,
            None => return Err(Error::Unclassifiable { index }),
        }
    }
    Ok(census)
}
