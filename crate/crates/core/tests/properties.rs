mod common;

use std::collections::BTreeSet;

use posadisc_core::clique::{classify_clique, square_equation_holds};
use posadisc_core::cycle_power::{hamilton_power, power_discrepancy, power_multiplicities, Cycle};
use posadisc_core::graph::{min_degree, ColoredGraph, VertexSet};
use posadisc_core::pipeline::{
    blow_up_reduced, clique_sequence, clusters_from_cliques, is_power_of_path, reorder_clique_tail,
};
use posadisc_core::search::{
    max_abs_discrepancy_power, max_abs_discrepancy_tiling, oracle_max_power, oracle_max_tiling, SearchBudget,
    SearchStatus,
};
use posadisc_core::template::{template_discrepancy, tiling_discrepancy, Template, Tiling};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut common::rng(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_flips_every_discrepancy(seed in any::<u64>(), r in 2usize..5, tiles in 2usize..4) {
        let n = (r + 1) * tiles;
        let mut rng = common::rng(seed);
        let g = common::random_complete(n, &mut rng);
        let neg = g.negated();
        let perm = shuffled(n, seed ^ 1);
        let len = rng.gen_range(r + 1..=n);
        let c = Cycle::new(perm[..len].to_vec()).unwrap();
        prop_assert_eq!(power_discrepancy(&g, &c, r).unwrap(), -power_discrepancy(&neg, &c, r).unwrap());
        let t = Template::new(r, vec![(c, 2)]);
        prop_assert_eq!(template_discrepancy(&g, &t).unwrap(), -template_discrepancy(&neg, &t).unwrap());
        let tiling = Tiling::from_lists(r, perm.chunks(r + 1).map(|b| b.to_vec()).collect()).unwrap();
        prop_assert_eq!(tiling_discrepancy(&g, &tiling).unwrap(), -tiling_discrepancy(&neg, &tiling).unwrap());
    }

    #[test]
    fn multiplicities_match_cyclic_distance(seed in any::<u64>(), r in 1usize..5, extra in 0usize..8) {
        let len = (r + 1).max(3) + extra;
        let seq = shuffled(len + 3, seed)[..len].to_vec();
        let p = power_multiplicities(&Cycle::new(seq.clone()).unwrap(), r).unwrap();
        prop_assert_eq!(p.total(), (len * r) as u64);
        for i in 0..len {
            for j in i + 1..len {
                let d = j - i;
                let expect = u32::from(d <= r) + u32::from(len - d <= r);
                prop_assert_eq!(p.get(seq[i], seq[j]), expect);
            }
            prop_assert_eq!(p.weighted_degree(seq[i]), 2 * r as u64);
        }
        if len == r + 1 {
            // An (r+1)-cycle's power is the doubled clique.
            prop_assert!(seq.iter().enumerate().all(|(i, &u)| seq[i + 1..].iter().all(|&v| p.get(u, v) == 2)));
        }
    }

    #[test]
    fn hamilton_power_is_2r_regular(seed in any::<u64>(), r in 1usize..4, extra in 0usize..6) {
        let n = 2 * r + 1 + extra;
        let g = common::random_complete(n, &mut common::rng(seed));
        let ord = shuffled(n, seed);
        let (p, f) = hamilton_power(&g, &ord, r).unwrap();
        prop_assert!((0..n).all(|v| p.simple_degree(v) == 2 * r && p.weighted_degree(v) == 2 * r as u64));
        prop_assert_eq!(f, power_discrepancy(&g, &Cycle::new(ord).unwrap(), r).unwrap());
    }

    #[test]
    fn classification_matches_square_equation(seed in any::<u64>(), k in 4usize..9) {
        let mut rng = common::rng(seed);
        let n = k + 2;
        let mut g = common::random_complete(n, &mut rng);
        // Bias towards typed cliques: half the time plant a star or a clique.
        if rng.gen::<bool>() {
            let head = rng.gen_range(0..n);
            let inner = if rng.gen::<bool>() { 1 } else { -1 };
            let edges: Vec<(usize, usize, i64)> = g
                .edges()
                .map(|(u, v, _)| (u, v, if u == head || v == head { -inner } else { inner }))
                .collect();
            g = ColoredGraph::from_edges(n, &edges).unwrap();
        }
        let s: VertexSet = shuffled(n, seed)[..k].iter().copied().collect();
        let ty = classify_clique(&g, &s).unwrap();
        prop_assert_eq!(ty.is_some(), square_equation_holds(&g, &s).unwrap());
        if let Some(t) = ty {
            for &u in &s {
                for &v in s.range(u + 1..) {
                    prop_assert_eq!(Some(t.expected_label(u, v)), g.label(u, v));
                }
            }
        }
    }

    #[test]
    fn graph_json_roundtrip(seed in any::<u64>(), n in 0usize..20, p in 0.0f64..1.0) {
        let g = common::random_graph(n, p, &mut common::rng(seed));
        prop_assert_eq!(ColoredGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn tiling_json_roundtrip(seed in any::<u64>(), r in 2usize..5, tiles in 1usize..5) {
        let perm = shuffled((r + 1) * tiles, seed);
        let t = Tiling::from_lists(r, perm.chunks(r + 1).map(|b| b.to_vec()).collect()).unwrap();
        prop_assert_eq!(Tiling::from_json(r, &t.to_json()).unwrap(), t);
    }

    #[test]
    fn blow_up_scales_min_degree(seed in any::<u64>(), n in 2usize..9, k in 1usize..5, p in 0.3f64..1.0) {
        let g = common::random_graph(n, p, &mut common::rng(seed));
        let b = blow_up_reduced(&g, k).unwrap();
        prop_assert_eq!(b.n(), n * k);
        prop_assert_eq!(min_degree(&b), k * min_degree(&g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branch_and_bound_matches_oracle(seed in any::<u64>(), n in 6usize..9, r in 2usize..4, removed in 0usize..4) {
        prop_assume!(n >= 2 * r + 2);
        let mut rng = common::rng(seed);
        let g = common::near_complete(n, removed, &mut rng);
        let bb = max_abs_discrepancy_power(&g, r, &SearchBudget::default()).unwrap();
        match oracle_max_power(&g, r).unwrap() {
            Some((v, ord)) => {
                prop_assert_eq!(bb.status, SearchStatus::Optimal);
                prop_assert_eq!(bb.value, v);
                prop_assert_eq!(bb.ordering, Some(ord));
            }
            None => prop_assert_eq!(bb.status, SearchStatus::NoneExists),
        }
    }

    #[test]
    fn worker_count_does_not_change_results(seed in any::<u64>(), n in 8usize..11, r in 2usize..4) {
        let g = common::near_complete(n, 3, &mut common::rng(seed));
        let one = max_abs_discrepancy_power(&g, r, &SearchBudget::default()).unwrap();
        let many = max_abs_discrepancy_power(&g, r, &SearchBudget::default().with_workers(3)).unwrap();
        prop_assert_eq!(one, many);
        let one = max_abs_discrepancy_tiling(&g, 2, &SearchBudget::default()).ok();
        let many = max_abs_discrepancy_tiling(&g, 2, &SearchBudget::default().with_workers(4)).ok();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn tiling_search_matches_oracle(seed in any::<u64>(), r in 2usize..4, p in 0.6f64..1.0) {
        let n = if r == 2 { 9 } else { 8 };
        let g = common::random_graph(n, p, &mut common::rng(seed));
        let bb = max_abs_discrepancy_tiling(&g, r, &SearchBudget::default()).unwrap();
        match oracle_max_tiling(&g, r, 10).unwrap() {
            Some((v, t)) => {
                prop_assert_eq!(bb.status, SearchStatus::Optimal);
                prop_assert_eq!(bb.value, v);
                prop_assert_eq!(bb.tiling, Some(t));
            }
            None => prop_assert_eq!(bb.status, SearchStatus::NoneExists),
        }
    }

    #[test]
    fn clique_sequences_are_valid(seed in any::<u64>(), r in 2usize..4, extra in 0usize..6) {
        let n = 2 * (r + 1) + extra;
        let g = common::near_complete(n, extra, &mut common::rng(seed));
        let perm = shuffled(n, seed);
        let k1: VertexSet = perm[..=r].iter().copied().collect();
        let k2: VertexSet = perm[r + 1..2 * r + 2].iter().copied().collect();
        let as_vec = |k: &VertexSet| k.iter().copied().collect::<Vec<_>>();
        prop_assume!(g.is_clique(&as_vec(&k1)).is_ok() && g.is_clique(&as_vec(&k2)).is_ok());
        let Ok(seq) = clique_sequence(&g, &k1, &k2, r) else { return Ok(()) };
        prop_assert_eq!(seq.first(), Some(&k1));
        prop_assert_eq!(seq.last(), Some(&k2));
        for k in &seq {
            prop_assert!(k.len() == r + 1 && g.is_clique(&as_vec(k)).is_ok());
        }
        for w in seq.windows(2) {
            prop_assert_eq!(w[0].intersection(&w[1]).count(), r);
        }
        let walk = clusters_from_cliques(&as_vec(&k1), &seq).unwrap();
        prop_assert!(is_power_of_path(&g, &walk, r));
    }

    #[test]
    fn reordering_uses_at_most_r_swaps(seed in any::<u64>(), r in 1usize..5) {
        let g = ColoredGraph::complete(r + 3, 1);
        let start: Vec<usize> = (0..=r).collect();
        let target = shuffled(r + 1, seed);
        let out = reorder_clique_tail(&g, &start, &target).unwrap();
        prop_assert_eq!(&out[out.len() - r - 1..], &target[..]);
        prop_assert!(out.len() - start.len() <= 4 * (r + 1) * r);
        prop_assert_eq!((out.len() - start.len()) % (4 * (r + 1)), 0);
        prop_assert!(is_power_of_path(&g, &out, r));
        let distinct: BTreeSet<usize> = out.iter().copied().collect();
        prop_assert!(distinct.len() <= r + 2);
    }
}
