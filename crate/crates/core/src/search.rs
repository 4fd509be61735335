//! Exact search for extreme-discrepancy Hamilton powers and clique tilings.
//!
//! Vertex sets are `u128` masks, so the searches accept graphs with at most
//! 128 vertices. The search tree is split into independent subtrees at its
//! first branching level and each subtree is searched on its own; the
//! reduction over subtrees is ordered, so the result and the node count do
//! not depend on the number of workers.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycle_power::{hamilton_power, power_discrepancy, Cycle};
use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::template::Tiling;

pub const MAX_SEARCH_VERTICES: usize = 128;
pub const DEFAULT_ORACLE_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    pub workers: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { node_limit: 100_000_000, time_limit: None, workers: 1 }
    }
}

impl SearchBudget {
    pub fn nodes(node_limit: u64) -> Self {
        SearchBudget { node_limit, ..Default::default() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.node_limit == 0 || self.workers == 0 || self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(Error::InvalidParameter("budget limits and worker count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Optimal,
    NoneExists,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub ordering: Option<Vec<usize>>,
    pub tiling: Option<Vec<Vec<usize>>>,
    pub value: i64,
    pub abs: u64,
    pub nodes: u64,
    pub optimal: bool,
}

/// True when `(a, a_obj)` beats `(b, b_obj)`: larger absolute value, then
/// positive over negative. Equal keys never beat each other; the caller keeps
/// whichever came first in lexicographic order.
fn beats(a: i64, b: i64) -> bool {
    a.abs() > b.abs() || (a.abs() == b.abs() && a > 0 && b < 0)
}

/// Whether a subtree whose values are bounded by `|disc| + rest` could still
/// beat `best`.
fn can_beat(disc: i64, rest: i64, best: i64) -> bool {
    let bound = disc.abs() + rest;
    bound > best.abs() || (bound == best.abs() && best < 0 && disc >= 0)
}

struct Masks {
    n: usize,
    r: usize,
    adj: Vec<u128>,
    plus: Vec<u128>,
}

impl Masks {
    fn new(g: &ColoredGraph, r: usize) -> Result<Self> {
        let n = g.n();
        if n > MAX_SEARCH_VERTICES {
            return Err(Error::InvalidParameter(format!("search supports at most {MAX_SEARCH_VERTICES} vertices, got {n}")));
        }
        if r == 0 {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        let row = |bits: &fixedbitset::FixedBitSet| bits.ones().fold(0u128, |m, v| m | (1u128 << v));
        Ok(Masks {
            n,
            r,
            adj: (0..n).map(|v| row(g.neighbors(v))).collect(),
            plus: (0..n).map(|v| row(g.plus_neighbors(v))).collect(),
        })
    }

    fn label(&self, u: usize, v: usize) -> i64 {
        if self.plus[u] >> v & 1 == 1 {
            1
        } else {
            -1
        }
    }

    fn all(&self) -> u128 {
        if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        }
    }
}

struct Meter {
    count: AtomicU64,
    limit: u64,
    deadline: Option<Instant>,
    exhausted: AtomicBool,
}

impl Meter {
    fn new(b: &SearchBudget) -> Self {
        Meter {
            count: AtomicU64::new(0),
            limit: b.node_limit,
            deadline: b.time_limit.map(|t| Instant::now() + t),
            exhausted: AtomicBool::new(false),
        }
    }

    /// Counts one node; false once the budget is gone.
    fn tick(&self) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let c = self.count.fetch_add(1, Ordering::Relaxed) + 1;
        let over = c > self.limit || (c % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() > d));
        if over {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !over
    }

    fn nodes(&self) -> u64 {
        self.count.load(Ordering::Relaxed).min(self.limit)
    }
}

fn run_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn iter_bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

// ---------------------------------------------------------------------------
// Hamilton powers
// ---------------------------------------------------------------------------

fn check_power_size(n: usize, r: usize) -> Result<()> {
    if n < 2 * r + 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2r+2 = {}, got {n}", 2 * r + 2)));
    }
    Ok(())
}

struct PowerSearch<'a> {
    k: &'a Masks,
    meter: &'a Meter,
    /// `fixed[p]` = slots fixed once positions `0..p` are placed.
    fixed: Vec<i64>,
    ord: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
    /// Only look for one contained power, ignoring labels.
    feasibility: bool,
    aborted: bool,
}

impl<'a> PowerSearch<'a> {
    fn new(k: &'a Masks, meter: &'a Meter, feasibility: bool) -> Self {
        let mut fixed = vec![0i64; k.n + 1];
        for p in 2..=k.n {
            fixed[p] = fixed[p - 1] + (p - 1).min(k.r) as i64;
        }
        PowerSearch { k, meter, fixed, ord: Vec::with_capacity(k.n), best: None, feasibility, aborted: false }
    }

    fn candidates(&self, placed: u128) -> u128 {
        let (n, r) = (self.k.n, self.k.r);
        let pos = self.ord.len();
        let mut mask = self.k.all() & !placed;
        for j in 1..=r.min(pos) {
            mask &= self.k.adj[self.ord[pos - j]];
        }
        if pos + r >= n {
            for &w in &self.ord[..=pos + r - n] {
                mask &= self.k.adj[w];
            }
        }
        if pos == n - 1 {
            // Reflection canonical form: ord[1] < ord[n-1].
            let floor = self.ord[1];
            mask &= !((2u128 << floor) - 1);
        }
        mask
    }

    fn close(&mut self, disc: i64) {
        let (n, r) = (self.k.n, self.k.r);
        let mut total = disc;
        for i in n - r..n {
            for j in 1..=r {
                if i + j >= n {
                    total += self.k.label(self.ord[i], self.ord[i + j - n]);
                }
            }
        }
        if self.best.as_ref().is_none_or(|(b, _)| beats(total, *b)) {
            self.best = Some((total, self.ord.clone()));
        }
    }

    fn dfs(&mut self, placed: u128, disc: i64) {
        if self.aborted || !self.meter.tick() {
            self.aborted = true;
            return;
        }
        let (n, r) = (self.k.n, self.k.r);
        let pos = self.ord.len();
        if pos == n {
            self.close(disc);
            return;
        }
        if self.feasibility && self.best.is_some() {
            return;
        }
        if !self.feasibility {
            if let Some((b, _)) = &self.best {
                let rest = (n * r) as i64 - self.fixed[pos];
                if !can_beat(disc, rest, *b) {
                    return;
                }
            }
        }
        for v in iter_bits(self.candidates(placed)) {
            let mut d = disc;
            for j in 1..=r.min(pos) {
                d += self.k.label(self.ord[pos - j], v);
            }
            self.ord.push(v);
            self.dfs(placed | 1u128 << v, d);
            self.ord.pop();
            if self.aborted || (self.feasibility && self.best.is_some()) {
                return;
            }
        }
    }
}

struct SubtreeOutcome {
    best: Option<(i64, Vec<usize>)>,
    aborted: bool,
}

fn power_subtrees(k: &Masks, meter: &Meter, workers: usize, feasibility: bool) -> Result<Vec<SubtreeOutcome>> {
    let roots: Vec<usize> = iter_bits(k.adj[0]).filter(|&v| v != k.n - 1).collect();
    let solve = |v1: usize| {
        let mut s = PowerSearch::new(k, meter, feasibility);
        s.ord.extend([0, v1]);
        s.dfs(1 | 1u128 << v1, k.label(0, v1));
        SubtreeOutcome { best: s.best, aborted: s.aborted }
    };
    if feasibility {
        // Sequential so the first ordering found is the lexicographically least.
        let mut out = Vec::new();
        for v1 in roots {
            let o = solve(v1);
            let stop = o.best.is_some() || o.aborted;
            out.push(o);
            if stop {
                break;
            }
        }
        return Ok(out);
    }
    run_pool(workers, || roots.par_iter().map(|&v| solve(v)).collect())
}

fn reduce(outcomes: Vec<SubtreeOutcome>) -> (Option<(i64, Vec<usize>)>, bool) {
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut aborted = false;
    for o in outcomes {
        aborted |= o.aborted;
        if let Some((v, ord)) = o.best {
            if best.as_ref().is_none_or(|(b, _)| beats(v, *b)) {
                best = Some((v, ord));
            }
        }
    }
    (best, aborted)
}

/// Branch and bound for the contained Hamilton power of largest `|discrepancy|`.
pub fn max_abs_discrepancy_power(g: &ColoredGraph, r: usize, budget: &SearchBudget) -> Result<SearchResult> {
    budget.validate()?;
    let k = Masks::new(g, r)?;
    check_power_size(k.n, r)?;
    let meter = Meter::new(budget);
    let (best, aborted) = reduce(power_subtrees(&k, &meter, budget.workers, false)?);
    let status = match (&best, aborted) {
        (_, true) => SearchStatus::BudgetExhausted,
        (None, false) => SearchStatus::NoneExists,
        (Some(_), false) => SearchStatus::Optimal,
    };
    let (value, ordering) = match best {
        Some((v, o)) => (v, Some(o)),
        None => (0, None),
    };
    Ok(SearchResult {
        status,
        ordering,
        tiling: None,
        value,
        abs: value.unsigned_abs(),
        nodes: meter.nodes(),
        optimal: status == SearchStatus::Optimal,
    })
}

/// Lexicographically least canonical Hamilton ordering whose r-th power is contained.
pub fn find_hamilton_power(g: &ColoredGraph, r: usize, budget: &SearchBudget) -> Result<Option<Vec<usize>>> {
    budget.validate()?;
    let k = Masks::new(g, r)?;
    check_power_size(k.n, r)?;
    let meter = Meter::new(budget);
    let (best, aborted) = reduce(power_subtrees(&k, &meter, 1, true)?);
    match (best, aborted) {
        (Some((_, o)), _) => Ok(Some(o)),
        (None, true) => Err(Error::BudgetExhausted { nodes: meter.nodes() }),
        (None, false) => Ok(None),
    }
}

pub fn exists_hamilton_power(g: &ColoredGraph, r: usize, budget: &SearchBudget) -> Result<bool> {
    Ok(find_hamilton_power(g, r, budget)?.is_some())
}

/// Brute force over all canonical orderings: vertex 0 first and
/// `ord[1] < ord[n-1]`. Yields contained powers in lexicographic order.
pub fn enumerate_hamilton_powers(g: &ColoredGraph, r: usize) -> Result<impl Iterator<Item = (Vec<usize>, i64)> + '_> {
    enumerate_hamilton_powers_capped(g, r, DEFAULT_ORACLE_CAP)
}

pub fn enumerate_hamilton_powers_capped(
    g: &ColoredGraph,
    r: usize,
    cap: usize,
) -> Result<impl Iterator<Item = (Vec<usize>, i64)> + '_> {
    let n = g.n();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    check_power_size(n, r)?;
    Ok((1..n).permutations(n - 1).filter(|p| p[0] < p[p.len() - 1]).filter_map(move |p| {
        let mut ord = Vec::with_capacity(n);
        ord.push(0);
        ord.extend(p);
        hamilton_power(g, &ord, r).ok().map(|(_, d)| (ord, d))
    }))
}

/// Oracle maximum with the same tie-break as the branch and bound.
pub fn oracle_max_power(g: &ColoredGraph, r: usize) -> Result<Option<(i64, Vec<usize>)>> {
    let mut best: Option<(i64, Vec<usize>)> = None;
    for (ord, d) in enumerate_hamilton_powers(g, r)? {
        if best.as_ref().is_none_or(|(b, _)| beats(d, *b)) {
            best = Some((d, ord));
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Clique tilings
// ---------------------------------------------------------------------------

fn check_divisible(n: usize, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if n % (r + 1) != 0 {
        return Err(Error::Divisibility { n, k: r + 1 });
    }
    Ok(())
}

struct TilingSearch<'a> {
    k: &'a Masks,
    meter: &'a Meter,
    tiles: Vec<Vec<usize>>,
    best: Option<(i64, Vec<Vec<usize>>)>,
    feasibility: bool,
    aborted: bool,
}

impl<'a> TilingSearch<'a> {
    fn tile_value(&self, t: &[usize]) -> i64 {
        t.iter().tuple_combinations().map(|(&u, &v)| 2 * self.k.label(u, v)).sum()
    }

    fn done(&self) -> bool {
        self.aborted || (self.feasibility && self.best.is_some())
    }

    fn dfs(&mut self, uncovered: u128, disc: i64) {
        if self.aborted || !self.meter.tick() {
            self.aborted = true;
            return;
        }
        if uncovered == 0 {
            if self.best.as_ref().is_none_or(|(b, _)| beats(disc, *b)) {
                self.best = Some((disc, self.tiles.clone()));
            }
            return;
        }
        let r = self.k.r;
        if !self.feasibility {
            if let Some((b, _)) = &self.best {
                let rest = (uncovered.count_ones() as usize / (r + 1) * r * (r + 1)) as i64;
                if !can_beat(disc, rest, *b) {
                    return;
                }
            }
        }
        let v = uncovered.trailing_zeros() as usize;
        let pool = self.k.adj[v] & uncovered;
        let mut tile = vec![v];
        self.extend_tile(&mut tile, pool, uncovered & !(1u128 << v), disc);
    }

    /// Grows the current tile in increasing vertex order, then recurses.
    fn extend_tile(&mut self, tile: &mut Vec<usize>, pool: u128, uncovered: u128, disc: i64) {
        if tile.len() == self.k.r + 1 {
            let val = self.tile_value(tile);
            self.tiles.push(tile.clone());
            self.dfs(uncovered, disc + val);
            self.tiles.pop();
            return;
        }
        let last = *tile.last().expect("tile has its anchor");
        let above = !((2u128 << last) - 1);
        for u in iter_bits(pool & above) {
            tile.push(u);
            self.extend_tile(tile, pool & self.k.adj[u], uncovered & !(1u128 << u), disc);
            tile.pop();
            if self.done() {
                return;
            }
        }
    }
}

fn first_tiles(k: &Masks) -> Vec<Vec<usize>> {
    iter_bits(k.adj[0] & k.all())
        .combinations(k.r)
        .filter(|c| c.iter().tuple_combinations().all(|(&a, &b)| k.adj[a] >> b & 1 == 1))
        .map(|c| std::iter::once(0).chain(c).collect())
        .collect()
}

fn tiling_subtrees(k: &Masks, meter: &Meter, workers: usize, feasibility: bool) -> Result<Vec<(Option<(i64, Vec<Vec<usize>>)>, bool)>> {
    let solve = |first: &Vec<usize>| {
        let mut s = TilingSearch { k, meter, tiles: vec![first.clone()], best: None, feasibility, aborted: false };
        let covered = first.iter().fold(0u128, |m, &v| m | 1u128 << v);
        let val = s.tile_value(first);
        s.dfs(k.all() & !covered, val);
        (s.best, s.aborted)
    };
    let roots = first_tiles(k);
    if feasibility {
        let mut out = Vec::new();
        for t in &roots {
            let o = solve(t);
            let stop = o.0.is_some() || o.1;
            out.push(o);
            if stop {
                break;
            }
        }
        return Ok(out);
    }
    run_pool(workers, || roots.par_iter().map(solve).collect())
}

fn reduce_tilings(outcomes: Vec<(Option<(i64, Vec<Vec<usize>>)>, bool)>) -> (Option<(i64, Vec<Vec<usize>>)>, bool) {
    let mut best: Option<(i64, Vec<Vec<usize>>)> = None;
    let mut aborted = false;
    for (b, a) in outcomes {
        aborted |= a;
        if let Some((v, t)) = b {
            if best.as_ref().is_none_or(|(bv, _)| beats(v, *bv)) {
                best = Some((v, t));
            }
        }
    }
    (best, aborted)
}

/// A perfect `K_{r+1}`-tiling, or `None` when the search proves there is none.
pub fn perfect_clique_tiling(g: &ColoredGraph, r: usize, budget: &SearchBudget) -> Result<Option<Tiling>> {
    budget.validate()?;
    check_divisible(g.n(), r)?;
    let k = Masks::new(g, r)?;
    if k.n == 0 {
        return Ok(Some(Tiling::new(r, vec![])));
    }
    let meter = Meter::new(budget);
    let (best, aborted) = reduce_tilings(tiling_subtrees(&k, &meter, 1, true)?);
    match (best, aborted) {
        (Some((_, tiles)), _) => Ok(Some(to_tiling(r, tiles)?)),
        (None, true) => Err(Error::BudgetExhausted { nodes: meter.nodes() }),
        (None, false) => Ok(None),
    }
}

fn to_tiling(r: usize, tiles: Vec<Vec<usize>>) -> Result<Tiling> {
    if r + 1 < 3 {
        return Err(Error::InvalidParameter("tiles must have at least 3 vertices".into()));
    }
    Tiling::from_lists(r, tiles)
}

/// Exact maximum of `|f(T)|` over perfect `K_{r+1}`-tilings, every tile edge
/// counted twice.
pub fn max_abs_discrepancy_tiling(g: &ColoredGraph, r: usize, budget: &SearchBudget) -> Result<SearchResult> {
    budget.validate()?;
    check_divisible(g.n(), r)?;
    let k = Masks::new(g, r)?;
    let meter = Meter::new(budget);
    let (best, aborted) = if k.n == 0 {
        (Some((0, vec![])), false)
    } else {
        reduce_tilings(tiling_subtrees(&k, &meter, budget.workers, false)?)
    };
    let status = match (&best, aborted) {
        (_, true) => SearchStatus::BudgetExhausted,
        (None, false) => SearchStatus::NoneExists,
        (Some(_), false) => SearchStatus::Optimal,
    };
    let (value, tiling) = match best {
        Some((v, t)) => (v, Some(t)),
        None => (0, None),
    };
    Ok(SearchResult {
        status,
        ordering: None,
        tiling,
        value,
        abs: value.unsigned_abs(),
        nodes: meter.nodes(),
        optimal: status == SearchStatus::Optimal,
    })
}

/// Brute force: every partition of the vertex set into `(r+1)`-blocks, kept
/// when all blocks are cliques, scored through the cycle-power machinery.
pub fn enumerate_clique_tilings(g: &ColoredGraph, r: usize, cap: usize) -> Result<Vec<(Vec<Vec<usize>>, i64)>> {
    let n = g.n();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    check_divisible(n, r)?;
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    partitions(&(0..n).collect::<Vec<_>>(), r + 1, &mut blocks, &mut |bs| {
        if bs.iter().all(|b| g.is_clique(b).is_ok()) {
            let d = bs.iter().map(|b| power_discrepancy(g, &Cycle::new(b.clone()).expect("block size >= 3"), r)).sum::<Result<i64>>();
            if let Ok(d) = d {
                out.push((bs.to_vec(), d));
            }
        }
    });
    Ok(out)
}

fn partitions(rest: &[usize], size: usize, acc: &mut Vec<Vec<usize>>, emit: &mut dyn FnMut(&[Vec<usize>])) {
    let Some((&first, others)) = rest.split_first() else {
        emit(acc);
        return;
    };
    for combo in others.iter().copied().combinations(size - 1) {
        let block: Vec<usize> = std::iter::once(first).chain(combo.iter().copied()).collect();
        let remaining: Vec<usize> = others.iter().copied().filter(|v| !combo.contains(v)).collect();
        acc.push(block);
        partitions(&remaining, size, acc, emit);
        acc.pop();
    }
}

/// Oracle maximum over [`enumerate_clique_tilings`], same tie-break.
pub fn oracle_max_tiling(g: &ColoredGraph, r: usize, cap: usize) -> Result<Option<(i64, Vec<Vec<usize>>)>> {
    let mut best: Option<(i64, Vec<Vec<usize>>)> = None;
    for (t, d) in enumerate_clique_tilings(g, r, cap)? {
        if best.as_ref().is_none_or(|(b, _)| beats(d, *b)) {
            best = Some((d, t));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_lower_bound, LowerBoundSpec};
    use crate::graph::GraphBuilder;

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    fn turan2222(missing: Option<(usize, usize)>) -> ColoredGraph {
        let mut b = GraphBuilder::new(8);
        for u in 0..8 {
            for v in u + 1..8 {
                if u / 2 != v / 2 && Some((u, v)) != missing {
                    b.add_edge(u, v, 1).unwrap();
                }
            }
        }
        b.build()
    }

    fn cycle_graph(n: usize) -> ColoredGraph {
        ColoredGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n, 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn k5_square_enumeration() {
        // n = 5 = 2r+1 is below the simple-power minimum.
        assert!(enumerate_hamilton_powers(&ColoredGraph::complete(5, 1), 2).is_err());
        let all: Vec<_> = enumerate_hamilton_powers(&ColoredGraph::complete(6, 1), 2).unwrap().collect();
        assert_eq!(all.len(), 60);
        assert!(all.iter().all(|(_, d)| *d == 12));
    }

    #[test]
    fn k8_all_plus() {
        let res = max_abs_discrepancy_power(&ColoredGraph::complete(8, 1), 3, &budget()).unwrap();
        assert_eq!((res.value, res.status), (24, SearchStatus::Optimal));
        assert_eq!(res.ordering.unwrap(), vec![0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn lower_bound_m1_within_bound() {
        let g = build_lower_bound(&LowerBoundSpec { r: 3, t: 2, m: 1, seed: 3 }).unwrap();
        let res = max_abs_discrepancy_power(&g, 3, &budget()).unwrap();
        assert!(res.optimal);
        assert!(res.abs <= 60);
    }

    #[test]
    fn no_power_outcomes() {
        let res = max_abs_discrepancy_power(&cycle_graph(8), 2, &budget()).unwrap();
        assert_eq!(res.status, SearchStatus::NoneExists);
        assert!(!res.optimal && res.ordering.is_none());
        assert!(enumerate_hamilton_powers(&cycle_graph(6), 2).unwrap().next().is_none());
    }

    #[test]
    fn existence() {
        assert_eq!(find_hamilton_power(&turan2222(None), 3, &budget()).unwrap(), Some(vec![0, 2, 4, 6, 1, 3, 5, 7]));
        // H^3 on 8 vertices needs all 24 edges of K_{2,2,2,2}.
        assert!(!exists_hamilton_power(&turan2222(Some((0, 2))), 3, &budget()).unwrap());
        assert!(exists_hamilton_power(&ColoredGraph::complete(8, -1), 3, &budget()).unwrap());
        assert!(exists_hamilton_power(&ColoredGraph::complete(7, 1), 3, &budget()).is_err());
    }

    #[test]
    fn budget_exhaustion_is_explicit() {
        let res = max_abs_discrepancy_power(&ColoredGraph::complete(10, 1), 2, &SearchBudget::nodes(50)).unwrap();
        assert_eq!(res.status, SearchStatus::BudgetExhausted);
        assert!(!res.optimal);
        assert_eq!(res.nodes, 50);
        assert!(matches!(perfect_clique_tiling(&ColoredGraph::complete(12, 1), 2, &SearchBudget::nodes(1)), Err(Error::BudgetExhausted { .. })));
    }

    #[test]
    fn tilings() {
        let t = perfect_clique_tiling(&ColoredGraph::complete(6, 1), 2, &budget()).unwrap().unwrap();
        assert_eq!(t.cycles.len(), 2);
        let mut oct = GraphBuilder::new(6);
        for u in 0..6 {
            for v in u + 1..6 {
                if u / 2 != v / 2 {
                    oct.add_edge(u, v, 1).unwrap();
                }
            }
        }
        let t = perfect_clique_tiling(&oct.build(), 2, &budget()).unwrap().unwrap();
        assert_eq!(t.cycles.iter().map(|c| c.seq().to_vec()).collect::<Vec<_>>(), vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(perfect_clique_tiling(&cycle_graph(6), 2, &budget()).unwrap().is_none());
        assert!(matches!(perfect_clique_tiling(&cycle_graph(7), 2, &budget()), Err(Error::Divisibility { .. })));
    }

    #[test]
    fn tiling_maximum() {
        let res = max_abs_discrepancy_tiling(&ColoredGraph::complete(8, 1), 3, &budget()).unwrap();
        assert_eq!((res.value, res.status), (24, SearchStatus::Optimal));
        let none = max_abs_discrepancy_tiling(&cycle_graph(6), 2, &budget()).unwrap();
        assert_eq!(none.status, SearchStatus::NoneExists);
    }

    #[test]
    fn partition_count() {
        // 9 vertices into triples: 9! / (3!^3 3!) = 280.
        assert_eq!(enumerate_clique_tilings(&ColoredGraph::complete(9, 1), 2, 12).unwrap().len(), 280);
    }
}
