//! Randomized invariants over seeded instance and graph corpora.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gspp::fixtures::random_instance;
use gspp::instance::BruteForceResult;
use gspp::matheuristic::RankingParams;
use gspp::relaxation::{build_g1, build_g2, cost_profiles};
use gspp::{
    branch_and_bound, brute_force_matching, brute_force_optima, lb1, lb2, max_weight_matching,
    rank_variables, reduce, select_variables, trivial_bound, validate_instance, Instance,
    SolveOptions, WeightedGraph,
};

fn instance_from_seed(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(&mut rng, 6, 5)
}

fn random_graph(rng: &mut impl Rng, max_n: usize) -> WeightedGraph {
    let n = rng.random_range(2..=max_n);
    let mut g = WeightedGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                g.add_edge(u, v, rng.random_range(0..=50)).unwrap();
            }
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_instances_validate(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        prop_assert!(validate_instance(&inst).is_ok());
    }

    #[test]
    fn compatibility_is_symmetric(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        for a in inst.assignments() {
            for b in inst.assignments() {
                if a.task != b.task {
                    prop_assert_eq!(
                        inst.compatible(a.id, b.id).unwrap(),
                        inst.compatible(b.id, a.id).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn matching_weight_is_monotone_in_edges(seed in 0u64..1u64 << 40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 9);
        let base = max_weight_matching(&g).weight;
        let mut extended = g.clone();
        let mut added = false;
        'outer: for u in 0..g.n_vertices() {
            for v in u + 1..g.n_vertices() {
                if !g.edges().iter().any(|&(a, b, _)| (a, b) == (u, v)) {
                    extended.add_edge(u, v, rng.random_range(0..=50)).unwrap();
                    added = true;
                    break 'outer;
                }
            }
        }
        if added {
            prop_assert!(max_weight_matching(&extended).weight >= base);
        }
    }

    #[test]
    fn matching_weight_scales_linearly(seed in 0u64..1u64 << 40, lambda in 1i64..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 9);
        let mut scaled = WeightedGraph::new(g.n_vertices());
        for &(u, v, w) in g.edges() {
            scaled.add_edge(u, v, w * lambda).unwrap();
        }
        prop_assert_eq!(
            max_weight_matching(&scaled).weight,
            lambda * max_weight_matching(&g).weight
        );
    }

    #[test]
    fn matching_agrees_with_exhaustive_oracle(seed in 0u64..1u64 << 40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 10);
        let m = max_weight_matching(&g);
        // disjointness
        let mut seen = vec![false; g.n_vertices()];
        for &(u, v, _) in &m.edges {
            prop_assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
        }
        prop_assert_eq!(m.weight, brute_force_matching(&g).unwrap());
    }

    #[test]
    fn bound_chain_and_edge_inequality(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        let z = match brute_force_optima(&inst).unwrap() {
            BruteForceResult::Optimal { z, .. } => Some(z),
            BruteForceResult::Infeasible => None,
        };
        match (lb1(&inst), lb2(&inst)) {
            (Ok(l1), Ok(l2)) => {
                let t = trivial_bound(&inst);
                prop_assert!(t <= l1 && l1 <= l2);
                if let Some(z) = z {
                    prop_assert!(l2 <= z);
                }
                // pairwise form of the dominance proof
                let profiles = cost_profiles(&inst);
                let g1 = build_g1(&inst).unwrap();
                let g2 = build_g2(&inst, None).unwrap();
                for &(i, j, c1) in g1.edges() {
                    let c2 = g2
                        .graph
                        .edges()
                        .iter()
                        .find(|&&(a, b, _)| (a, b) == (i, j))
                        .map(|&(_, _, w)| w)
                        .unwrap();
                    prop_assert!(c2 >= profiles[i].best + profiles[j].best + c1);
                }
            }
            // a bound construction can only fail when no feasible
            // solution exists at all
            _ => prop_assert_eq!(z, None),
        }
    }

    #[test]
    fn branch_and_bound_matches_brute_force(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        let z = brute_force_optima(&inst).unwrap().z();
        let r = branch_and_bound(&inst, &SolveOptions::default()).unwrap();
        prop_assert_eq!(r.incumbent.map(|s| s.cost), z);
    }

    #[test]
    fn reduction_preserves_every_optimum(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        let BruteForceResult::Optimal { z, all_optimal } = brute_force_optima(&inst).unwrap()
        else {
            return Ok(());
        };
        // a genuine optimum never empties a task pool
        let r = reduce(&inst, z).unwrap();
        prop_assert_eq!(brute_force_optima(&r.reduced).unwrap().z(), Some(z));
        for sol in &all_optimal {
            for id in sol.values() {
                prop_assert!(r.reduced.by_id(*id).is_some());
            }
        }
    }

    #[test]
    fn selection_is_monotone_in_sigma_and_mu(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        let Ok(delta) = rank_variables(&inst) else { return Ok(()) };
        let params = |sigma, mu| RankingParams { sigma, mu, time_limit: None };
        let base = select_variables(&inst, &delta, &params(0.2, 1));
        for p in [params(0.5, 1), params(0.2, 3)] {
            let bigger = select_variables(&inst, &delta, &p);
            for id in &base.selected {
                prop_assert!(bigger.selected.contains(id));
            }
        }
    }

    #[test]
    fn file_format_round_trips(seed in 0u64..1u64 << 40) {
        let inst = instance_from_seed(seed);
        let text = gspp::fileformat::write_instance(&inst);
        let back = gspp::fileformat::read_instance(&text).unwrap();
        prop_assert_eq!(gspp::fileformat::write_instance(&back), text);
    }
}
