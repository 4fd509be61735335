//! Assembling Hamilton powers from synthetic cluster models.
//!
//! A cluster model replaces every vertex of a reduced graph by a cluster of
//! `m` vertices and every reduced edge by a random bipartite pair of density
//! about `d`, all of whose edges carry the reduced edge's label. Given a tiling
//! of the reduced graph, [`assemble_hamilton_power`] connects consecutive tiles
//! by short powers of paths, absorbs the leftover vertices and fills each tile
//! by backtracking. The result is compared with the reduced prediction
//! `m * f_R(T)`.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cycle_power::{hamilton_power, power_multiplicities, Cycle};
use crate::error::{Error, Result};
use crate::graph::{min_degree, ColoredGraph, GraphBuilder, VertexSet};
use crate::template::{tiling_discrepancy, validate_tiling, Tiling};

const MAX_REGENERATIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub r: usize,
    pub eta: f64,
    /// Pair density target.
    pub d: f64,
    /// Regularity slack.
    pub eps: f64,
    /// Discrepancy tolerance, as a fraction of `n`.
    pub alpha: f64,
    /// Cluster size.
    pub m: usize,
    pub seed: u64,
    /// Vertices outside the clusters.
    pub exceptional: usize,
    pub path_node_limit: u64,
    pub fill_node_limit: u64,
    pub fill_restarts: usize,
}

impl PipelineParams {
    /// Defaults: `d = eta/3`, `eps = d/10`, `alpha = 0.1`.
    pub fn new(r: usize, eta: f64, m: usize, seed: u64) -> Self {
        let d = eta / 3.0;
        PipelineParams {
            r,
            eta,
            d,
            eps: d / 10.0,
            alpha: 0.1,
            m,
            seed,
            exceptional: 0,
            path_node_limit: 200_000,
            fill_node_limit: 5_000,
            fill_restarts: 4_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        if self.r == 0 {
            return bad("r must be at least 1".into());
        }
        if !(0.0 < self.eps && self.eps < self.d && self.d < 1.0) {
            return bad(format!("need 0 < eps < d < 1, got eps={}, d={}", self.eps, self.d));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if (self.m as f64) * self.d < 1.0 {
            return bad(format!("m*d = {} < 1: pairs would be empty", self.m as f64 * self.d));
        }
        if self.path_node_limit == 0 || self.fill_node_limit == 0 || self.fill_restarts == 0 {
            return bad("search limits must be positive".into());
        }
        Ok(())
    }

    /// Soft checks of `eps << alpha << eta`; never fatal.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.eps >= self.alpha {
            w.push(format!("eps = {} is not below alpha = {}", self.eps, self.alpha));
        }
        if self.alpha >= self.eta {
            w.push(format!("alpha = {} is not below eta = {}", self.alpha, self.eta));
        }
        w
    }

    fn floor_density(&self) -> f64 {
        self.d - self.eps
    }
}

/// Independent random stream for one stage of one run.
pub fn stage_rng(seed: u64, stage: &str, index: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stage.as_bytes());
    h.update(index.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterModel {
    pub reduced: ColoredGraph,
    pub m: usize,
    /// Cluster `c` holds ids `c*m .. (c+1)*m`; exceptional vertices follow.
    pub ground: ColoredGraph,
    pub exceptional: Vec<usize>,
    /// Realized density of each reduced edge `(a, b)`, `a < b`.
    pub pair_density: BTreeMap<(usize, usize), f64>,
}

impl ClusterModel {
    pub fn clusters(&self) -> usize {
        self.reduced.n()
    }

    pub fn n(&self) -> usize {
        self.ground.n()
    }

    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        (v < self.clusters() * self.m).then(|| v / self.m)
    }

    pub fn cluster_set(&self, c: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n());
        s.insert_range(c * self.m..(c + 1) * self.m);
        s
    }

    /// `deg(v, V_c)`.
    pub fn degree_into(&self, v: usize, c: usize) -> usize {
        self.ground.neighbors(v).ones().filter(|&u| u / self.m == c && u < self.clusters() * self.m).count()
    }
}

/// Seeded random realization of `reduced`: every reduced edge becomes a
/// bipartite pair of density within `eps` of `d`, redrawn until it is.
/// Exceptional vertices join each cluster vertex with probability `d` and a
/// random label, redrawn until they have `(d-eps)m` neighbours in every cluster.
pub fn synthesize_model(reduced: &ColoredGraph, params: &PipelineParams) -> Result<ClusterModel> {
    params.validate()?;
    let (l, m) = (reduced.n(), params.m);
    let n = l * m + params.exceptional;
    let mut b = GraphBuilder::new(n);
    let mut pair_density = BTreeMap::new();
    for (x, y, label) in reduced.edges() {
        let mut rng = stage_rng(params.seed, "pair", (x * l + y) as u64);
        let mut pairs = Vec::new();
        let mut ok = false;
        for _ in 0..MAX_REGENERATIONS {
            pairs.clear();
            for i in 0..m {
                for j in 0..m {
                    if rng.gen::<f64>() < params.d {
                        pairs.push((i, j));
                    }
                }
            }
            let density = pairs.len() as f64 / (m * m) as f64;
            if (density - params.d).abs() <= params.eps {
                pair_density.insert((x, y), density);
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(stage("synthesize", format!("pair ({x},{y}) never reached density {} +- {}", params.d, params.eps)));
        }
        for &(i, j) in &pairs {
            b.add_edge(x * m + i, y * m + j, label.into())?;
        }
    }
    let need = params.floor_density() * m as f64;
    let mut exceptional = Vec::new();
    for e in 0..params.exceptional {
        let v = l * m + e;
        let mut rng = stage_rng(params.seed, "exceptional", e as u64);
        let mut row = Vec::new();
        let mut ok = false;
        for _ in 0..MAX_REGENERATIONS {
            row.clear();
            let mut per = vec![0usize; l];
            for u in 0..l * m {
                if rng.gen::<f64>() < params.d {
                    row.push((u, if rng.gen::<bool>() { 1 } else { -1 }));
                    per[u / m] += 1;
                }
            }
            if per.iter().all(|&c| c as f64 >= need) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(stage("synthesize", format!("exceptional vertex {v} never reached (d-eps)m neighbours per cluster")));
        }
        for &(u, label) in &row {
            b.add_edge(v, u, label)?;
        }
        exceptional.push(v);
    }
    Ok(ClusterModel { reduced: reduced.clone(), m, ground: b.build(), exceptional, pair_density })
}

fn stage(stage: &str, reason: String) -> Error {
    Error::Stage { stage: stage.into(), reason }
}

/// `delta(R) >= (c - 2d - 2eps) |R|`.
pub fn verify_reduced_degree(reduced: &ColoredGraph, c: Ratio<i64>, d: Ratio<i64>, eps: Ratio<i64>) -> bool {
    let threshold = (c - d * 2 - eps * 2) * Ratio::from_integer(reduced.n() as i64);
    Ratio::from_integer(min_degree(reduced) as i64) >= threshold
}

/// Replaces every cluster by `k` copies, `c*k .. (c+1)*k`, joined completely
/// along reduced edges.
pub fn blow_up_reduced(reduced: &ColoredGraph, k: usize) -> Result<ColoredGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("blow-up factor must be at least 1".into()));
    }
    let mut b = GraphBuilder::new(reduced.n() * k);
    for (x, y, label) in reduced.edges() {
        for i in 0..k {
            for j in 0..k {
                b.add_edge(x * k + i, y * k + j, label.into())?;
            }
        }
    }
    Ok(b.build())
}

// ---------------------------------------------------------------------------
// Cluster sequences
// ---------------------------------------------------------------------------

fn deg_to(reduced: &ColoredGraph, c: usize, set: &VertexSet) -> usize {
    set.iter().filter(|&&x| reduced.has_edge(c, x)).count()
}

/// `D_0 = a, ..., D_{r+1} = b`, assuming every cluster of `b` sees at least
/// `r` clusters of `a`.
fn transition(reduced: &ColoredGraph, a: &VertexSet, b: &VertexSet) -> Vec<VertexSet> {
    let mut cur = a.clone();
    let mut out = vec![cur.clone()];
    for &c in b {
        let old: Vec<usize> = cur.difference(b).copied().collect();
        let gone = old.iter().copied().find(|&x| !reduced.has_edge(c, x)).unwrap_or(old[0]);
        cur.remove(&gone);
        cur.insert(c);
        out.push(cur.clone());
    }
    out
}

/// Sequence of `(r+1)`-cliques from `k1` to `k2`, consecutive ones sharing `r`
/// clusters: two fronts grown by weight, then a direct transition.
pub fn clique_sequence(reduced: &ColoredGraph, k1: &VertexSet, k2: &VertexSet, r: usize) -> Result<Vec<VertexSet>> {
    for k in [k1, k2] {
        if k.len() != r + 1 {
            return Err(Error::InvalidParameter(format!("clique {k:?} does not have r+1 = {} clusters", r + 1)));
        }
        reduced.is_clique(&k.iter().copied().collect::<Vec<_>>())?;
    }
    if !k1.is_disjoint(k2) {
        return Err(Error::InvalidParameter("end cliques must be disjoint".into()));
    }
    let cap = 40 * r.pow(3);
    let mut fa = vec![k1.clone()];
    let mut fb = vec![k2.clone()];
    for _ in 0..=cap {
        let (a, b) = (fa.last().expect("nonempty"), fb.last().expect("nonempty"));
        let mut middle = if b.iter().all(|&c| deg_to(reduced, c, a) >= r) {
            Some(transition(reduced, a, b))
        } else if a.iter().all(|&c| deg_to(reduced, c, b) >= r) {
            let mut t = transition(reduced, b, a);
            t.reverse();
            Some(t)
        } else {
            None
        };
        if let Some(mid) = middle.take() {
            let mut seq = fa.clone();
            seq.extend(mid[1..=r].iter().cloned());
            seq.extend(fb.iter().rev().cloned());
            return Ok(seq);
        }
        let best = (0..reduced.n())
            .filter(|c| !a.contains(c) && !b.contains(c))
            .map(|c| (deg_to(reduced, c, a) + deg_to(reduced, c, b), c))
            .filter(|&(w, _)| w >= 2 * r + 1)
            .max_by_key(|&(w, c)| (w, std::cmp::Reverse(c)));
        let Some((_, c)) = best else {
            return Err(stage("clique_sequence", "no cluster of weight at least 2r+1".into()));
        };
        if deg_to(reduced, c, a) == r + 1 {
            let out = *a.iter().find(|&&x| deg_to(reduced, x, b) < r).expect("transition condition failed");
            let mut next = a.clone();
            next.remove(&out);
            next.insert(c);
            fa.push(next);
        } else {
            let out = *b.iter().find(|&&x| deg_to(reduced, x, a) < r).expect("transition condition failed");
            let mut next = b.clone();
            next.remove(&out);
            next.insert(c);
            fb.push(next);
        }
    }
    Err(stage("clique_sequence", format!("no sequence within {cap} steps")))
}

/// Walks through a clique sequence, starting with `start` in the given order.
/// Each window of `r+1` consecutive clusters is one of the cliques.
pub fn clusters_from_cliques(start: &[usize], cliques: &[VertexSet]) -> Result<Vec<usize>> {
    let k = start.len();
    if cliques.first().is_none_or(|c| c.len() != k || !start.iter().all(|x| c.contains(x))) {
        return Err(Error::InvalidParameter("sequence must start with the given clique".into()));
    }
    let mut seq = start.to_vec();
    for w in cliques.windows(2) {
        let out: Vec<usize> = w[0].difference(&w[1]).copied().collect();
        let inn: Vec<usize> = w[1].difference(&w[0]).copied().collect();
        if out.len() != 1 || inn.len() != 1 {
            return Err(Error::InvalidParameter("consecutive cliques must share all but one cluster".into()));
        }
        while seq[seq.len() - k] != out[0] {
            seq.push(seq[seq.len() - k]);
        }
        seq.push(inn[0]);
    }
    Ok(seq)
}

/// Extends `seq` until its last `r+1` clusters are exactly `target`, using the
/// four-row swap through a common neighbour once per transposition. The
/// common neighbour is the one with the smallest id.
pub fn reorder_clique_tail(reduced: &ColoredGraph, seq: &[usize], target: &[usize]) -> Result<Vec<usize>> {
    reorder_clique_tail_by(reduced, seq, target, |c, _| c as i64)
}

/// [`reorder_clique_tail`] with the common neighbour chosen by smallest
/// `(rank(c, uses), c)`, where `uses` counts earlier swaps through `c`.
pub fn reorder_clique_tail_by(
    reduced: &ColoredGraph,
    seq: &[usize],
    target: &[usize],
    rank: impl Fn(usize, usize) -> i64,
) -> Result<Vec<usize>> {
    let k = target.len();
    if seq.len() < k {
        return Err(Error::InvalidParameter("sequence shorter than the target clique".into()));
    }
    let mut cur = seq[seq.len() - k..].to_vec();
    let (mut a, mut b) = (cur.clone(), target.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::InvalidParameter(format!("tail {cur:?} is not a permutation of {target:?}")));
    }
    let mut out = seq.to_vec();
    let mut uses = vec![0; reduced.n()];
    for i in 0..k {
        if cur[i] == target[i] {
            continue;
        }
        let j = cur.iter().position(|&x| x == target[i]).expect("permutation");
        let c = (0..reduced.n())
            .filter(|c| !cur.contains(c) && cur.iter().all(|&x| reduced.has_edge(*c, x)))
            .min_by_key(|&c| (rank(c, uses[c]), c))
            .ok_or_else(|| Error::NoCommonNeighbor(cur.clone()))?;
        uses[c] += 1;
        let (ui, uj) = (cur[i], cur[j]);
        let mut row = cur.clone();
        out.extend_from_slice(&row);
        row[i] = c;
        out.extend_from_slice(&row);
        row[j] = ui;
        out.extend_from_slice(&row);
        row[i] = uj;
        out.extend_from_slice(&row);
        cur = row;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Path vertices
// ---------------------------------------------------------------------------

/// Positions `0..front` and `len-back..len` are context: they are not
/// chosen, but their candidate sets must survive.
#[derive(Clone, Debug)]
pub struct PathPlan {
    pub clusters: Vec<usize>,
    pub candidates: Vec<FixedBitSet>,
    pub front: usize,
    pub back: usize,
}

#[derive(Clone, Debug, Default)]
pub struct PathState {
    pub vertices: Vec<usize>,
    pub clusters: Vec<usize>,
    /// Final candidate sets `H_{t,j}` of the context positions.
    pub front_sets: Vec<FixedBitSet>,
    pub back_sets: Vec<FixedBitSet>,
    /// Steps at which some tracked set was below `(d-eps)^{2r}|U_j|/2`.
    pub survival_violations: usize,
    /// Smallest observed `|H_{i,j}|` divided by its survival bound.
    pub min_slack: f64,
    /// Chosen vertices that miss the greedy rule `deg > (d-eps)|H|`.
    pub relaxed_steps: usize,
    pub nodes: u64,
}

struct Frame {
    cands: Vec<(usize, bool)>,
    undo: Vec<(usize, FixedBitSet)>,
    placed: Option<(usize, bool)>,
}

/// Chooses one vertex per non-context position so that the choices form the
/// r-th power of a path, keeping every candidate set above its survival bound.
///
/// Candidates meeting the greedy degree rule are tried first; when none works
/// the search backtracks, up to `params.path_node_limit` nodes.
pub fn find_path_vertices(model: &ClusterModel, plan: &PathPlan, params: &PipelineParams) -> Result<PathState> {
    let r = params.r;
    let len = plan.clusters.len();
    if plan.candidates.len() != len || plan.front + plan.back > len {
        return Err(Error::InvalidParameter("path plan sizes disagree".into()));
    }
    for (j, u) in plan.candidates.iter().enumerate() {
        if u.len() != model.n() {
            return Err(Error::InvalidParameter("candidate set has the wrong universe".into()));
        }
        if let Some(v) = u.ones().find(|&v| model.cluster_of(v).is_some_and(|c| c != plan.clusters[j])) {
            return Err(Error::InvalidParameter(format!("candidate {v} lies outside cluster {}", plan.clusters[j])));
        }
    }
    let dm = params.floor_density();
    let bound: Vec<f64> =
        plan.candidates.iter().map(|u| (dm.powi(2 * r as i32) * u.count_ones(..) as f64 / 2.0).max(1.0)).collect();
    let mut h = plan.candidates.clone();
    let mut chosen: Vec<Option<usize>> = vec![None; len];
    let (lo, hi) = (plan.front, len - plan.back);
    let mut state = PathState { min_slack: f64::INFINITY, ..Default::default() };

    let neighbourhood = |p: usize| model.ground.neighbors(p);
    let window = |a: usize| a.saturating_sub(r)..(a + r + 1).min(len);

    // Greedy rule and survival for placing p at position a.
    let evaluate = |h: &[FixedBitSet], chosen: &[Option<usize>], a: usize, p: usize| -> Option<(bool, f64)> {
        let mut qualifies = true;
        let mut ratio = f64::INFINITY;
        for j in 0..len {
            if j == a || chosen[j].is_some() {
                continue;
            }
            let size = h[j].count_ones(..);
            let new = if window(a).contains(&j) {
                h[j].intersection_count(neighbourhood(p))
            } else if h[j].contains(p) {
                size - 1
            } else {
                continue;
            };
            if (new as f64) < bound[j] {
                return None;
            }
            if window(a).contains(&j) {
                qualifies &= new as f64 > dm * size as f64;
                ratio = ratio.min(new as f64 / size.max(1) as f64);
            }
        }
        Some((qualifies, ratio))
    };

    let candidates_at = |h: &[FixedBitSet], chosen: &[Option<usize>], a: usize| -> Vec<(usize, bool)> {
        let mut scored: Vec<(usize, bool, f64)> =
            h[a].ones().filter_map(|p| evaluate(h, chosen, a, p).map(|(q, x)| (p, q, x))).collect();
        // Best last, since frames pop from the end.
        scored.sort_by(|x, y| x.1.cmp(&y.1).then(x.2.total_cmp(&y.2)).then(y.0.cmp(&x.0)));
        scored.into_iter().map(|(p, q, _)| (p, q)).collect()
    };

    if lo == hi {
        state.front_sets = h[..lo].to_vec();
        state.back_sets = h[hi..].to_vec();
        return Ok(state);
    }
    let mut stack = vec![Frame { cands: candidates_at(&h, &chosen, lo), undo: vec![], placed: None }];
    let mut deepest = lo;
    loop {
        let depth = stack.len() - 1;
        let a = lo + depth;
        let frame = stack.last_mut().expect("stack nonempty");
        if let Some(_) = frame.placed.take() {
            for (j, old) in frame.undo.drain(..) {
                h[j] = old;
            }
            chosen[a] = None;
        }
        let Some((p, qualifies)) = frame.cands.pop() else {
            stack.pop();
            if stack.is_empty() {
                return Err(Error::CandidateExhaustion { position: deepest - lo });
            }
            continue;
        };
        state.nodes += 1;
        if state.nodes > params.path_node_limit {
            return Err(Error::CandidateExhaustion { position: deepest - lo });
        }
        for j in 0..len {
            if j == a || chosen[j].is_some() {
                continue;
            }
            if window(a).contains(&j) {
                frame.undo.push((j, h[j].clone()));
                h[j].intersect_with(neighbourhood(p));
            } else if h[j].contains(p) {
                frame.undo.push((j, h[j].clone()));
                h[j].set(p, false);
            }
        }
        chosen[a] = Some(p);
        frame.placed = Some((p, qualifies));
        for j in 0..len {
            if chosen[j].is_none() {
                let size = h[j].count_ones(..) as f64;
                if size < bound[j] {
                    state.survival_violations += 1;
                }
                state.min_slack = state.min_slack.min(size / bound[j]);
            }
        }
        deepest = deepest.max(a + 1);
        if a + 1 == hi {
            break;
        }
        let next = candidates_at(&h, &chosen, a + 1);
        stack.push(Frame { cands: next, undo: vec![], placed: None });
    }
    state.relaxed_steps = stack.iter().filter(|f| f.placed.is_some_and(|(_, q)| !q)).count();
    state.vertices = chosen[lo..hi].iter().map(|c| c.expect("placed")).collect();
    state.clusters = plan.clusters[lo..hi].to_vec();
    state.front_sets = h[..lo].to_vec();
    state.back_sets = h[hi..].to_vec();
    Ok(state)
}

fn singleton(n: usize, v: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert(v);
    s
}

/// Appends two rounds through `target`, then `v`, then one more round to
/// `path`; `3(r+1)+1` new vertices in all.
pub fn insert_exceptional(
    model: &ClusterModel,
    path: &mut Vec<usize>,
    used: &mut FixedBitSet,
    v: usize,
    target: &[usize],
    params: &PipelineParams,
) -> Result<PathState> {
    let r = params.r;
    let n = model.n();
    if target.len() != r + 1 {
        return Err(Error::InvalidParameter(format!("target clique must have r+1 = {} clusters", r + 1)));
    }
    if path.len() < r {
        return Err(Error::InvalidParameter("path is shorter than r".into()));
    }
    model.ground.check_vertex(v)?;
    let need = params.floor_density() * model.m as f64;
    if let Some(&c) = target.iter().find(|&&c| (model.degree_into(v, c) as f64) < need) {
        return Err(stage("insert_exceptional", format!("vertex {v} has fewer than (d-eps)m neighbours in cluster {c}")));
    }
    used.insert(v);
    let tail = path[path.len() - r..].to_vec();
    let mut clusters = Vec::new();
    let mut cands = Vec::new();
    for &p in &tail {
        clusters.push(model.cluster_of(p).unwrap_or(usize::MAX));
        cands.push(singleton(n, p));
    }
    for k in 0..4 {
        for (j, &c) in target.iter().enumerate() {
            if k == 3 && j == r {
                break;
            }
            let mut u = model.cluster_set(c);
            match k {
                0 => {
                    for &p in &tail {
                        if model.cluster_of(p) != Some(c) {
                            u.intersect_with(model.ground.neighbors(p));
                        }
                    }
                }
                1 | 2 => u.intersect_with(model.ground.neighbors(v)),
                _ => {}
            }
            u.difference_with(used);
            clusters.push(c);
            cands.push(u);
        }
    }
    let plan = PathPlan { clusters, candidates: cands, front: r, back: r };
    let state = find_path_vertices(model, &plan, params)?;
    let split = 2 * (r + 1);
    path.extend_from_slice(&state.vertices[..split]);
    path.push(v);
    path.extend_from_slice(&state.vertices[split..]);
    for &q in &state.vertices {
        used.insert(q);
    }
    Ok(state)
}

// ---------------------------------------------------------------------------
// Filling tiles
// ---------------------------------------------------------------------------

/// Embeds the r-th power of a path following `pattern` into `pool`, glued to
/// the fixed `prefix` and `suffix`. Depth first, vertices with the fewest
/// unused neighbours first, random tie-breaks, many short restarts. The last
/// vertex able to close against the suffix in each tail cluster is held back,
/// and a branch dies once a tail position has no such vertex left.
#[allow(clippy::too_many_arguments)]
fn fill_tile(
    g: &ColoredGraph,
    clusters: &dyn Fn(usize) -> FixedBitSet,
    prefix: &[usize],
    pattern: &[usize],
    suffix: &[usize],
    pool: &FixedBitSet,
    r: usize,
    node_limit: u64,
    restarts: usize,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Vec<usize>, String> {
    let f = pattern.len();
    let n = g.n();
    let mut by_cluster: BTreeMap<usize, FixedBitSet> = BTreeMap::new();
    for &c in pattern {
        by_cluster.entry(c).or_insert_with(|| {
            let mut s = clusters(c);
            s.intersect_with(pool);
            s
        });
    }
    // Context vertices within distance r must already be adjacent.
    if f < r {
        let full: Vec<Option<usize>> =
            prefix.iter().map(|&x| Some(x)).chain(std::iter::repeat(None).take(f)).chain(suffix.iter().map(|&x| Some(x))).collect();
        for i in 0..full.len() {
            for j in i + 1..(i + r + 1).min(full.len()) {
                if let (Some(x), Some(y)) = (full[i], full[j]) {
                    if !g.has_edge(x, y) {
                        return Err(format!("context vertices {x} and {y} are not adjacent"));
                    }
                }
            }
        }
    }
    let rdeg0: Vec<u32> = (0..n).map(|v| if pool.contains(v) { g.neighbors(v).intersection_count(pool) as u32 } else { 0 }).collect();
    // Vertices that could close the fill against the suffix, per tail position.
    let mut tails: Vec<(usize, FixedBitSet)> = Vec::new();
    for p in f.saturating_sub(r)..f {
        let mut s = by_cluster[&pattern[p]].clone();
        for (k, &x) in suffix.iter().enumerate() {
            if f + k - p <= r {
                s.intersect_with(g.neighbors(x));
            }
        }
        tails.push((p, s));
    }
    let mut total = 0u64;
    let mut deepest = 0;
    for _ in 0..restarts {
        let noise: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
        let mut avail = pool.clone();
        let mut rdeg = rdeg0.clone();
        let mut seq: Vec<usize> = Vec::with_capacity(f);
        let cands = |seq: &[usize], avail: &FixedBitSet, rdeg: &[u32]| -> Vec<usize> {
            let p = seq.len();
            let mut s = by_cluster[&pattern[p]].clone();
            s.intersect_with(avail);
            for k in 1..=r {
                let prev = if p >= k { Some(seq[p - k]) } else { prefix.len().checked_sub(k - p).map(|i| prefix[i]) };
                if let Some(x) = prev {
                    s.intersect_with(g.neighbors(x));
                }
            }
            for (k, &x) in suffix.iter().enumerate() {
                if f + k - p <= r {
                    s.intersect_with(g.neighbors(x));
                }
            }
            let mut scarce = FixedBitSet::with_capacity(n);
            for (pt, t) in &tails {
                if *pt <= p {
                    continue;
                }
                let left = t.intersection_count(avail);
                if left == 0 {
                    return vec![];
                }
                if left <= 1 {
                    scarce.union_with(t);
                }
            }
            let mut v: Vec<usize> = s.ones().collect();
            v.sort_by_key(|&u| std::cmp::Reverse((scarce.contains(u), rdeg[u], noise[u])));
            v
        };
        if f == 0 {
            return Ok(seq);
        }
        let mut stack = vec![cands(&seq, &avail, &rdeg)];
        let mut nodes = 0u64;
        while let Some(top) = stack.last_mut() {
            nodes += 1;
            if nodes > node_limit {
                break;
            }
            match top.pop() {
                Some(u) => {
                    seq.push(u);
                    avail.set(u, false);
                    for w in g.neighbors(u).ones().filter(|&w| pool.contains(w)) {
                        rdeg[w] -= 1;
                    }
                    if seq.len() == f {
                        return Ok(seq);
                    }
                    deepest = deepest.max(seq.len());
                    let next = cands(&seq, &avail, &rdeg);
                    stack.push(next);
                }
                None => {
                    stack.pop();
                    if let Some(u) = seq.pop() {
                        avail.insert(u);
                        for w in g.neighbors(u).ones().filter(|&w| pool.contains(w)) {
                            rdeg[w] += 1;
                        }
                    }
                }
            }
        }
        total += nodes;
        if stack.is_empty() {
            return Err("no embedding exists for the residual clusters".into());
        }
    }
    let sizes: Vec<usize> = tails.iter().map(|(_, t)| t.count_ones(..)).collect();
    Err(format!("budget exhausted after {restarts} restarts ({total} nodes, deepest {deepest} of {f}, closing candidates {sizes:?})"))
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub stage: &'static str,
    pub tile: usize,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageOutcome {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub ordering: Vec<usize>,
    pub ordering_digest: String,
    pub discrepancy: i64,
    /// `m * f_R(T)`.
    pub prediction: i64,
    pub deviation: u64,
    pub alpha_n: f64,
    pub within_alpha: bool,
    /// Simple 2r-regular power of a Hamilton cycle contained in the ground graph.
    pub valid_power: bool,
    pub clique_tiles: usize,
    pub exceptional_assigned: Vec<(usize, usize)>,
    pub survival_violations: usize,
    pub min_survival_slack: f64,
    pub relaxed_steps: usize,
    pub stages: Vec<StageOutcome>,
    pub warnings: Vec<String>,
    pub trace: Vec<TraceEvent>,
}

struct Assembler<'a> {
    model: &'a ClusterModel,
    params: &'a PipelineParams,
    tiles: Vec<Vec<usize>>,
    used: FixedBitSet,
    trace: Vec<TraceEvent>,
    stages: Vec<StageOutcome>,
    survival_violations: usize,
    min_slack: f64,
    relaxed: usize,
}

impl<'a> Assembler<'a> {
    fn note(&mut self, stage: &str, detail: String) {
        self.stages.push(StageOutcome { stage: stage.into(), ok: true, detail });
    }

    fn absorb(&mut self, s: &PathState) {
        self.survival_violations += s.survival_violations;
        self.min_slack = self.min_slack.min(s.min_slack);
        self.relaxed += s.relaxed_steps;
    }

    fn unused_in(&self, c: usize) -> FixedBitSet {
        let mut s = self.model.cluster_set(c);
        s.difference_with(&self.used);
        s
    }

    /// Unused vertices of each cluster beyond what its tile can fill, with
    /// tile `t` read as `rep`.
    fn excess(&self, t: usize, rep: &[usize]) -> Vec<i64> {
        let r = self.params.r;
        let mut out = vec![0; self.model.clusters()];
        for (k, tile) in self.tiles.iter().enumerate() {
            let tile = if k == t { rep } else { tile };
            let rem: Vec<i64> = tile.iter().enumerate().map(|(j, &c)| self.unused_in(c).count_ones(..) as i64 - i64::from(j > r)).collect();
            let low = rem.iter().copied().min().unwrap_or(0);
            for (j, &c) in tile.iter().enumerate() {
                out[c] = rem[j] - low;
            }
        }
        out
    }

    fn connect(&mut self, i: usize) -> Result<Vec<usize>> {
        let r = self.params.r;
        let s = self.tiles.len();
        let t = (i + 1) % s;
        let from = self.tiles[i].clone();
        let to = self.tiles[t].clone();
        let k1: VertexSet = from[..=r].iter().copied().collect();
        // Tile 0 is pinned by path 0. Other clique tiles take the order the
        // walk arrives in; longer tiles take the rotation or reflection with
        // the shortest walk.
        let reps: Vec<Vec<usize>> = if t == 0 || to.len() == r + 1 {
            vec![to.clone()]
        } else {
            let q = to.len();
            let rev: Vec<usize> = to.iter().rev().copied().collect();
            (0..q).flat_map(|k| [to[k..].iter().chain(&to[..k]).copied().collect(), rev[k..].iter().chain(&rev[..k]).copied().collect()]).collect()
        };
        let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
        let mut last_err = None;
        for rep in reps {
            let k2: VertexSet = rep[..=r].iter().copied().collect();
            let attempt = clique_sequence(&self.model.reduced, &k1, &k2, r).and_then(|cliques| {
                let walk = clusters_from_cliques(&from[..=r], &cliques)?;
                if t != 0 && rep.len() == r + 1 {
                    return Ok((walk[walk.len() - r - 1..].to_vec(), walk));
                }
                let excess = self.excess(t, &rep);
                let rank = |c: usize, uses: usize| 2 * uses as i64 - excess[c];
                Ok((rep.clone(), reorder_clique_tail_by(&self.model.reduced, &walk, &rep[..=r], rank)?))
            });
            match attempt {
                Ok((rep, walk)) if best.as_ref().is_none_or(|b| walk.len() < b.1.len()) => best = Some((rep, walk)),
                Ok(_) => {}
                Err(e) => last_err = Some(e),
            }
        }
        let Some((to, walk)) = best else {
            return Err(last_err.expect("at least one representation"));
        };
        if to != self.tiles[t] {
            self.note("connect", format!("tile {t} entered as {to:?}"));
            self.tiles[t] = to.clone();
        }
        let cap = 40 * r.pow(3);
        if walk.len() > cap {
            return Err(stage("connect", format!("path {i} needs {} clusters, cap is {cap}", walk.len())));
        }
        let qf = from.len();
        let mut clusters: Vec<usize> = from[qf - r..].to_vec();
        clusters.extend_from_slice(&walk);
        clusters.extend((0..r).map(|k| to[(r + 1 + k) % to.len()]));
        let candidates = clusters.iter().map(|&c| self.unused_in(c)).collect();
        let plan = PathPlan { clusters, candidates, front: r, back: r };
        let st = find_path_vertices(self.model, &plan, self.params)?;
        self.absorb(&st);
        for &v in &st.vertices {
            self.used.insert(v);
            self.trace.push(TraceEvent { stage: "path", tile: (i + 1) % s, vertex: v });
        }
        self.note("connect", format!("path {i}: {} clusters, {} relaxed steps", walk.len(), st.relaxed_steps));
        Ok(st.vertices)
    }

    fn eligible(&self, v: usize, tile: usize) -> bool {
        let need = self.params.floor_density() * self.model.m as f64;
        self.tiles[tile].iter().all(|&c| self.model.degree_into(v, c) as f64 >= need)
    }

    /// Paths whose target tile is a clique tile; these absorb `V_0`.
    fn targets(&self, clique_tiles: usize) -> Vec<usize> {
        let s = self.tiles.len();
        (0..s).filter(|&i| (i + 1) % s < clique_tiles).collect()
    }

    /// Moves the vertices that unbalance each tile into `V_0`.
    fn balance(&mut self, targets: &[usize]) -> Result<Vec<usize>> {
        let r = self.params.r;
        let s = self.tiles.len();
        let mut surplus = Vec::new();
        for t in 0..s {
            let tile = self.tiles[t].clone();
            let rem: Vec<usize> = tile.iter().map(|&c| self.unused_in(c).count_ones(..)).collect();
            let need = |j: usize| usize::from(j >= r + 1);
            let Some(l) = (0..tile.len()).map(|j| rem[j].checked_sub(need(j))).collect::<Option<Vec<_>>>().and_then(|v| v.into_iter().min())
            else {
                return Err(stage("balance", format!("tile {t} has an exhausted cluster")));
            };
            let mut pool = FixedBitSet::with_capacity(self.model.n());
            for &c in &tile {
                pool.union_with(&self.unused_in(c));
            }
            for (j, &c) in tile.iter().enumerate() {
                let extra = rem[j] - need(j) - l;
                if extra == 0 {
                    continue;
                }
                let mut vs: Vec<usize> = self.unused_in(c).ones().collect();
                vs.sort_by_key(|&v| {
                    let ok = targets.iter().any(|&i| self.eligible(v, (i + 1) % s));
                    (!ok, self.model.ground.neighbors(v).intersection_count(&pool), v)
                });
                for &v in &vs[..extra] {
                    self.used.insert(v);
                    surplus.push(v);
                }
            }
        }
        Ok(surplus)
    }

    fn fill(&mut self, t: usize, prefix: &[usize], suffix: &[usize]) -> Result<Vec<usize>> {
        let r = self.params.r;
        let tile = self.tiles[t].clone();
        let q = tile.len();
        let rem: Vec<usize> = tile.iter().map(|&c| self.unused_in(c).count_ones(..)).collect();
        let l = rem[0];
        if let Some(j) = (0..q).find(|&j| rem[j] != l + usize::from(j >= r + 1)) {
            return Err(stage("fill", format!("tile {t}: cluster {} has {} vertices left, expected {}", tile[j], rem[j], l + usize::from(j >= r + 1))));
        }
        let mut pattern: Vec<usize> = tile[r + 1..].to_vec();
        for _ in 0..l {
            pattern.extend_from_slice(&tile);
        }
        let mut pool = FixedBitSet::with_capacity(self.model.n());
        for &c in &tile {
            pool.union_with(&self.unused_in(c));
        }
        let mut rng = stage_rng(self.params.seed, "fill", t as u64);
        let model = self.model;
        let seq = fill_tile(
            &model.ground,
            &|c| model.cluster_set(c),
            prefix,
            &pattern,
            suffix,
            &pool,
            r,
            self.params.fill_node_limit,
            self.params.fill_restarts,
            &mut rng,
        )
        .map_err(|e| stage("fill", format!("tile {t}: {e}")))?;
        for &v in &seq {
            self.used.insert(v);
            self.trace.push(TraceEvent { stage: "fill", tile: t, vertex: v });
        }
        self.note("fill", format!("tile {t}: {} vertices", seq.len()));
        Ok(seq)
    }

    fn run(&mut self, tiling: &Tiling) -> Result<PipelineReport> {
        let r = self.params.r;
        let s = self.tiles.len();
        let clique_tiles = self.tiles.iter().take_while(|t| t.len() == r + 1).count();
        for &v in &self.model.exceptional {
            self.used.insert(v);
        }
        let mut paths = Vec::with_capacity(s);
        for i in 0..s {
            paths.push(self.connect(i)?);
        }
        let targets = self.targets(clique_tiles);
        let surplus = self.balance(&targets)?;
        self.note("balance", format!("{} surplus vertices moved to V0", surplus.len()));

        let v0: Vec<usize> = self.model.exceptional.iter().copied().chain(surplus).collect();
        let mut assigned: Vec<Vec<usize>> = vec![vec![]; s];
        for &v in &v0 {
            let best = targets.iter().copied().filter(|&i| self.eligible(v, (i + 1) % s)).min_by_key(|&i| (assigned[i].len(), i));
            let Some(i) = best else {
                return Err(stage("assign", format!("vertex {v} fits no target clique")));
            };
            assigned[i].push(v);
        }
        self.note("assign", format!("{} vertices over {} paths", v0.len(), targets.len()));
        let mut exceptional_assigned = Vec::new();
        for i in 0..s {
            let target = self.tiles[(i + 1) % s][..=r].to_vec();
            for &v in &assigned[i] {
                let before = paths[i].len();
                let st = insert_exceptional(self.model, &mut paths[i], &mut self.used, v, &target, self.params)
                    .map_err(|e| stage("insert", format!("vertex {v} into path {i}: {e}")))?;
                self.absorb(&st);
                for &x in &paths[i][before..] {
                    self.trace.push(TraceEvent { stage: "insert", tile: (i + 1) % s, vertex: x });
                }
                exceptional_assigned.push((v, i));
            }
        }
        if !v0.is_empty() {
            self.note("insert", format!("{} vertices inserted", v0.len()));
        }

        let mut fills = vec![vec![]; s];
        for t in 0..s {
            let prev = &paths[(t + s - 1) % s];
            let prefix = prev[prev.len() - r..].to_vec();
            let suffix = paths[t][..r].to_vec();
            fills[t] = self.fill(t, &prefix, &suffix)?;
        }
        let mut ordering = Vec::with_capacity(self.model.n());
        for i in 0..s {
            ordering.extend_from_slice(&paths[i]);
            ordering.extend_from_slice(&fills[(i + 1) % s]);
        }

        let (power, discrepancy) =
            hamilton_power(&self.model.ground, &ordering, r).map_err(|e| stage("verify", e.to_string()))?;
        let n = ordering.len();
        let valid_power = power.mul.values().all(|&m| m == 1) && (0..n).all(|v| power.simple_degree(v) == 2 * r);
        let prediction = self.model.m as i64 * tiling_discrepancy(&self.model.reduced, tiling)?;
        let deviation = (discrepancy - prediction).unsigned_abs();
        let alpha_n = self.params.alpha * n as f64;
        self.note("verify", format!("valid={valid_power} deviation={deviation}"));
        Ok(PipelineReport {
            n,
            ordering_digest: ordering_digest(&ordering),
            ordering,
            discrepancy,
            prediction,
            deviation,
            alpha_n,
            within_alpha: deviation as f64 <= alpha_n,
            valid_power,
            clique_tiles,
            exceptional_assigned,
            survival_violations: self.survival_violations,
            min_survival_slack: self.min_slack,
            relaxed_steps: self.relaxed,
            stages: self.stages.clone(),
            warnings: self.params.warnings(),
            trace: self.trace.clone(),
        })
    }
}

pub fn ordering_digest(ordering: &[usize]) -> String {
    let mut h = Sha256::new();
    for &v in ordering {
        h.update((v as u64).to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Like [`assemble_hamilton_power`], also returning the vertex-choice trace
/// recorded up to the point of failure.
pub fn assemble_traced(model: &ClusterModel, tiling: &Tiling, params: &PipelineParams) -> (Result<PipelineReport>, Vec<TraceEvent>) {
    let checks = (|| {
        params.validate()?;
        if params.m != model.m {
            return Err(Error::InvalidParameter(format!("params.m = {} but the model has m = {}", params.m, model.m)));
        }
        if tiling.r != params.r {
            return Err(Error::InvalidParameter(format!("tiling has r = {}, params r = {}", tiling.r, params.r)));
        }
        validate_tiling(&model.reduced, tiling)?;
        if tiling.cycles.len() < 2 {
            return Err(stage("assemble", "the tiling needs at least two tiles".into()));
        }
        Ok(())
    })();
    if let Err(e) = checks {
        return (Err(e), vec![]);
    }
    let mut a = Assembler {
        model,
        params,
        tiles: tiling.cycles.iter().map(|c| c.seq().to_vec()).collect(),
        used: FixedBitSet::with_capacity(model.n()),
        trace: vec![],
        stages: vec![],
        survival_violations: 0,
        min_slack: f64::INFINITY,
        relaxed: 0,
    };
    let res = a.run(tiling);
    (res, a.trace)
}

/// Embeds the r-th power of a Hamilton cycle on all ground vertices, following
/// `tiling` of the reduced graph. Leading tiles of length `r+1` form the
/// clique part; the remaining tiles are longer cycles.
pub fn assemble_hamilton_power(model: &ClusterModel, tiling: &Tiling, params: &PipelineParams) -> Result<PipelineReport> {
    assemble_traced(model, tiling, params).0
}

pub fn run_pipeline(reduced: &ColoredGraph, tiling: &Tiling, params: &PipelineParams) -> Result<PipelineReport> {
    let model = synthesize_model(reduced, params)?;
    assemble_hamilton_power(&model, tiling, params)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlicingReport {
    pub samples: usize,
    pub within: usize,
    pub fraction: f64,
}

/// Samples random half-slices `X x Y` of realized pairs and counts those whose
/// density is within `2 eps` of the pair density.
pub fn slicing_check(model: &ClusterModel, eps: f64, samples: usize, seed: u64) -> SlicingReport {
    use rand::seq::{IteratorRandom, SliceRandom};
    let mut rng = stage_rng(seed, "slicing", 0);
    let pairs: Vec<(&(usize, usize), &f64)> = model.pair_density.iter().collect();
    let m = model.m;
    let mut within = 0;
    for _ in 0..samples {
        let Some(&(&(a, b), &dens)) = pairs.choose(&mut rng) else { break };
        let xs = (a * m..(a + 1) * m).choose_multiple(&mut rng, m / 2);
        let ys = (b * m..(b + 1) * m).choose_multiple(&mut rng, m / 2);
        let hits: usize = xs.iter().map(|&x| ys.iter().filter(|&&y| model.ground.has_edge(x, y)).count()).sum();
        let d = hits as f64 / (xs.len() * ys.len()).max(1) as f64;
        if (d - dens).abs() <= 2.0 * eps {
            within += 1;
        }
    }
    let samples = if pairs.is_empty() { 0 } else { samples };
    SlicingReport { samples, within, fraction: if samples == 0 { 1.0 } else { within as f64 / samples as f64 } }
}

/// Whether the cluster sequence `seq` is the r-th power of a path in `reduced`.
pub fn is_power_of_path(reduced: &ColoredGraph, seq: &[usize], r: usize) -> bool {
    (0..seq.len()).all(|i| (i + 1..(i + r + 1).min(seq.len())).all(|j| reduced.has_edge(seq[i], seq[j])))
}

/// `f_R` of one tile, counted through its cycle power.
pub fn tile_discrepancy(reduced: &ColoredGraph, tile: &[usize], r: usize) -> Result<i64> {
    let p = power_multiplicities(&Cycle::new(tile.to_vec())?, r)?;
    crate::cycle_power::discrepancy_of(reduced, &p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, seed: u64) -> PipelineParams {
        PipelineParams { d: 0.5, eps: 0.05, alpha: 0.1, ..PipelineParams::new(3, 0.9, m, seed) }
    }

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn params_validation() {
        assert!(params(64, 0).validate().is_ok());
        assert!(PipelineParams { eps: 0.6, ..params(64, 0) }.validate().is_err());
        assert!(PipelineParams { d: 0.5, ..params(1, 0) }.validate().is_err());
        let p = PipelineParams::new(3, 0.3, 64, 0);
        assert!((p.d - 0.1).abs() < 1e-12);
        assert!(PipelineParams { eps: 0.2, alpha: 0.1, ..params(64, 0) }.warnings().len() == 1);
    }

    #[test]
    fn synthesized_pairs() {
        let model = synthesize_model(&ColoredGraph::complete(8, 1), &params(64, 1)).unwrap();
        assert_eq!(model.pair_density.len(), 28);
        assert!(model.pair_density.values().all(|d| (d - 0.5).abs() <= 0.05));
        assert_eq!(model.n(), 512);
        assert!(model.ground.edges().all(|(u, v, l)| u / 64 != v / 64 && l == 1));
        assert_eq!(model, synthesize_model(&ColoredGraph::complete(8, 1), &params(64, 1)).unwrap());
    }

    #[test]
    fn exceptional_vertices_meet_degree_floor() {
        let p = PipelineParams { exceptional: 2, ..params(32, 4) };
        let model = synthesize_model(&ColoredGraph::complete(4, 1), &p).unwrap();
        assert_eq!(model.exceptional, vec![128, 129]);
        for &v in &model.exceptional {
            assert!((0..4).all(|c| model.degree_into(v, c) as f64 >= 0.45 * 32.0));
        }
    }

    #[test]
    fn reduced_degree() {
        let k8 = ColoredGraph::complete(8, 1);
        let r = |a, b| Ratio::new(a, b);
        // K_8 minus a perfect matching has minimum degree 6.
        let mut b = GraphBuilder::new(8);
        for u in 0..8 {
            for v in u + 1..8 {
                if v != u + 4 {
                    b.add_edge(u, v, 1).unwrap();
                }
            }
        }
        assert!(verify_reduced_degree(&b.build(), r(7, 8), r(1, 24), r(1, 48)));
        assert!(!verify_reduced_degree(&k8.relabeled(1), r(1, 1), r(0, 1), r(0, 1)));
        assert!(verify_reduced_degree(&ColoredGraph::empty(3), r(0, 1), r(0, 1), r(0, 1)));
    }

    #[test]
    fn blow_up() {
        let g = blow_up_reduced(&ColoredGraph::complete(4, 1), 2).unwrap();
        assert_eq!((g.n(), min_degree(&g), g.edge_count()), (8, 6, 24));
        assert_eq!(blow_up_reduced(&ColoredGraph::complete(4, -1), 1).unwrap(), ColoredGraph::complete(4, -1));
        assert!(blow_up_reduced(&ColoredGraph::complete(4, 1), 0).is_err());
    }

    #[test]
    fn clique_sequence_on_complete_graph() {
        let k12 = ColoredGraph::complete(12, 1);
        let seq = clique_sequence(&k12, &set(&[0, 1, 2, 3]), &set(&[4, 5, 6, 7]), 3).unwrap();
        assert!(seq.len() <= 5);
        assert_eq!(seq.first().unwrap(), &set(&[0, 1, 2, 3]));
        assert_eq!(seq.last().unwrap(), &set(&[4, 5, 6, 7]));
        for w in seq.windows(2) {
            assert_eq!(w[0].intersection(&w[1]).count(), 3);
        }
        assert!(clique_sequence(&k12, &set(&[0, 1, 2, 3]), &set(&[3, 4, 5, 6]), 3).is_err());
    }

    #[test]
    fn clique_sequence_grows_fronts() {
        // Two 4-cliques with no edges between them, bridged by hub clusters.
        let mut b = GraphBuilder::new(12);
        for u in 0..12 {
            for v in u + 1..12 {
                let across = u < 4 && (4..8).contains(&v);
                if !across {
                    b.add_edge(u, v, 1).unwrap();
                }
            }
        }
        let g = b.build();
        let seq = clique_sequence(&g, &set(&[0, 1, 2, 3]), &set(&[4, 5, 6, 7]), 3).unwrap();
        for w in seq.windows(2) {
            assert_eq!(w[0].intersection(&w[1]).count(), 3);
        }
        for c in &seq {
            assert!(g.is_clique(&c.iter().copied().collect::<Vec<_>>()).is_ok());
        }
        let walk = clusters_from_cliques(&[0, 1, 2, 3], &seq).unwrap();
        assert!(is_power_of_path(&g, &walk, 3));
    }

    #[test]
    fn reorder_tail() {
        let k8 = ColoredGraph::complete(8, 1);
        let seq = vec![0, 1, 2, 3];
        assert_eq!(reorder_clique_tail(&k8, &seq, &[0, 1, 2, 3]).unwrap(), seq);
        let one = reorder_clique_tail(&k8, &seq, &[1, 0, 2, 3]).unwrap();
        assert_eq!(one.len() - 4, 16);
        assert_eq!(&one[one.len() - 4..], &[1, 0, 2, 3]);
        assert!(is_power_of_path(&k8, &one, 3));
        let rev = reorder_clique_tail(&k8, &seq, &[3, 2, 1, 0]).unwrap();
        assert!((rev.len() - 4) / 16 <= 3);
        assert_eq!(&rev[rev.len() - 4..], &[3, 2, 1, 0]);
        assert!(is_power_of_path(&k8, &rev, 3));
        assert!(matches!(reorder_clique_tail(&ColoredGraph::complete(4, 1), &seq, &[1, 0, 2, 3]), Err(Error::NoCommonNeighbor(_))));
    }

    #[test]
    fn path_vertices() {
        let p = PipelineParams { m: 256, ..params(256, 3) };
        let model = synthesize_model(&ColoredGraph::complete(8, 1), &p).unwrap();
        let clusters: Vec<usize> = (0..26).map(|i| i % 8).collect();
        let candidates = clusters.iter().map(|&c| model.cluster_set(c)).collect();
        let plan = PathPlan { clusters, candidates, front: 3, back: 3 };
        let st = find_path_vertices(&model, &plan, &p).unwrap();
        assert_eq!(st.vertices.len(), 20);
        assert_eq!(st.survival_violations, 0);
        let bound = 0.45f64.powi(6) * 256.0 / 2.0;
        assert!(st.front_sets.iter().chain(&st.back_sets).all(|h| h.count_ones(..) as f64 >= bound));
        assert!(is_power_of_path(&model.ground, &st.vertices, 3));

        let empty = PathPlan { clusters: vec![0, 1], candidates: vec![model.cluster_set(0), model.cluster_set(1)], front: 1, back: 1 };
        assert!(find_path_vertices(&model, &empty, &p).unwrap().vertices.is_empty());
    }

    #[test]
    fn path_vertices_exhaust_on_sparse_pairs() {
        let p = PipelineParams { d: 0.05, eps: 0.01, m: 20, path_node_limit: 10_000, ..params(20, 1) };
        let model = synthesize_model(&ColoredGraph::complete(4, 1), &p).unwrap();
        let clusters: Vec<usize> = (0..12).map(|i| i % 4).collect();
        let candidates = clusters.iter().map(|&c| model.cluster_set(c)).collect();
        let plan = PathPlan { clusters, candidates, front: 0, back: 0 };
        assert!(matches!(find_path_vertices(&model, &plan, &p), Err(Error::CandidateExhaustion { .. })));
    }

    #[test]
    fn insertion_adds_three_rounds_and_v() {
        let p = PipelineParams { exceptional: 1, ..params(64, 5) };
        let model = synthesize_model(&ColoredGraph::complete(8, 1), &p).unwrap();
        let clusters: Vec<usize> = (0..8).collect();
        let candidates = clusters.iter().map(|&c| model.cluster_set(c)).collect();
        let st = find_path_vertices(&model, &PathPlan { clusters, candidates, front: 0, back: 0 }, &p).unwrap();
        let mut path = st.vertices.clone();
        let mut used = FixedBitSet::with_capacity(model.n());
        path.iter().for_each(|&v| used.insert(v));
        let v = model.exceptional[0];
        insert_exceptional(&model, &mut path, &mut used, v, &[4, 5, 6, 7], &p).unwrap();
        assert_eq!(path.len(), 8 + 13);
        assert_eq!(path[8 + 8], v);
        assert!(is_power_of_path(&model.ground, &path, 3));

        let lonely = PipelineParams { exceptional: 0, ..p.clone() };
        let bare = synthesize_model(&ColoredGraph::complete(8, 1), &lonely).unwrap();
        let mut path2 = st.vertices.clone();
        let inside = path2[4];
        assert!(insert_exceptional(&bare, &mut path2, &mut used, inside, &[4, 5, 6, 7], &p).is_err());
    }

    #[test]
    fn assembles_two_plus_tiles() {
        let p = params(64, 11);
        let model = synthesize_model(&ColoredGraph::complete(8, 1), &p).unwrap();
        let tiling = Tiling::from_lists(3, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let rep = assemble_hamilton_power(&model, &tiling, &p).unwrap();
        assert_eq!(rep.prediction, 64 * 24);
        assert!(rep.valid_power);
        assert_eq!(rep.n, 512);
        assert_eq!(rep.discrepancy, 1536);
        assert_eq!(rep.deviation, 0);
        assert_eq!(rep.survival_violations, 0);
    }

    #[test]
    fn slicing() {
        let p = params(64, 2);
        let model = synthesize_model(&ColoredGraph::complete(8, 1), &p).unwrap();
        let rep = slicing_check(&model, p.eps, 200, 9);
        assert_eq!(rep.samples, 200);
        assert!(rep.fraction >= 0.95);
    }
}
