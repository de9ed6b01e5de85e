//! Property tests. Oracles here are plain exhaustive enumerations, kept
//! independent of the library's search code.

use proptest::prelude::*;

use hybrid_mis::driver::{qredumis_solve, SolveOptions};
use hybrid_mis::graph::{is_independent, parse_dimacs, parse_json, to_dimacs, to_json, Graph, IndependentSet};
use hybrid_mis::kernel::{classical_reduce, reconstruct};
use hybrid_mis::metrics::{count_independent_sets, estimate_success_rate, hardness};
use hybrid_mis::sampling::{classical_energy, repair, to_ising, AnnealingParams, AnnealingSampler, SampleSet};
use hybrid_mis::selection::{build_histogram, SelectionParams, Strategy as Rule};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop::bool::weighted(0.3), pairs).prop_map(move |mask| {
            let edges = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .zip(mask)
                .filter_map(|(e, keep)| keep.then_some(e));
            Graph::new(n, edges).unwrap()
        })
    })
}

fn independent(g: &Graph, mask: u32) -> bool {
    g.edges().iter().all(|&(u, v)| mask >> u & 1 == 0 || mask >> v & 1 == 0)
}

/// Sizes of all independent sets, by exhaustive scan.
fn size_histogram(g: &Graph) -> Vec<u128> {
    let n = g.vertex_count();
    let mut hist = vec![0u128; n + 1];
    for mask in 0u32..1 << n {
        if independent(g, mask) {
            hist[mask.count_ones() as usize] += 1;
        }
    }
    hist
}

fn alpha(g: &Graph) -> usize {
    size_histogram(g).iter().rposition(|&c| c > 0).unwrap_or(0)
}

fn bits_of(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|v| mask >> v & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduction_preserves_the_optimum(g in graph_strategy(14)) {
        let (kernel, trace) = classical_reduce(&g);
        prop_assert_eq!(alpha(&g), trace.selected().len() + alpha(&kernel.graph));
        prop_assert_eq!(trace.footprint() + kernel.graph.vertex_count(), g.vertex_count());
        prop_assert!(is_independent(&g, &trace.selected()).unwrap());
    }

    #[test]
    fn reconstruction_is_independent(g in graph_strategy(12)) {
        let (kernel, trace) = classical_reduce(&g);
        let kn = kernel.graph.vertex_count();
        // Greedy kernel solution.
        let mut members = Vec::new();
        for v in 0..kn {
            if members.iter().all(|&u| !kernel.graph.has_edge(u, v)) {
                members.push(v);
            }
        }
        let sol = IndependentSet::new(&kernel.graph, members).unwrap();
        let lifted = reconstruct(&trace, &kernel, &sol).unwrap();
        prop_assert!(is_independent(&g, lifted.members()).unwrap());
        prop_assert_eq!(lifted.size(), trace.selected().len() + sol.size());
    }

    #[test]
    fn ising_form_matches_penalty_energy(g in graph_strategy(8), penalty in 1.01f64..5.0) {
        let ising = to_ising(&g, penalty).unwrap();
        let n = g.vertex_count();
        for mask in 0u32..1 << n {
            let bits = bits_of(mask, n);
            let a = classical_energy(&g, &bits, penalty).unwrap();
            prop_assert!((a - ising.energy_of_bits(&bits)).abs() < 1e-9);
        }
    }

    #[test]
    fn repair_is_a_lowering_projection(g in graph_strategy(12), raw in any::<u32>()) {
        let n = g.vertex_count();
        let bits = bits_of(raw & ((1u32 << n) - 1), n);
        let fixed = repair(&g, &bits).unwrap();
        prop_assert!(is_independent(&g, fixed.members()).unwrap());
        prop_assert!(fixed.members().iter().all(|&v| bits[v]));
        let again = repair(&g, &fixed.to_bits(n)).unwrap();
        prop_assert_eq!(&again, &fixed);
        let before = classical_energy(&g, &bits, 2.0).unwrap();
        let after = classical_energy(&g, &fixed.to_bits(n), 2.0).unwrap();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn histogram_ignores_shot_order(g in graph_strategy(10), masks in prop::collection::vec(any::<u32>(), 1..30), rot in 0usize..30) {
        let n = g.vertex_count();
        let strings: Vec<Vec<bool>> = masks.iter().map(|m| bits_of(m & ((1u32 << n) - 1), n)).collect();
        let mut rotated = strings.clone();
        let k = rot % rotated.len();
        rotated.rotate_left(k);
        rotated.reverse();
        let a = build_histogram(&SampleSet::from_bitstrings(&g, strings).unwrap(), &g);
        let b = build_histogram(&SampleSet::from_bitstrings(&g, rotated).unwrap(), &g);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn counts_match_enumeration(g in graph_strategy(14)) {
        let hist = size_histogram(&g);
        for (k, &c) in hist.iter().enumerate() {
            prop_assert_eq!(count_independent_sets(&g, k).unwrap(), c);
        }
    }

    #[test]
    fn hardness_is_label_invariant(g in graph_strategy(12), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        // Deterministic shuffle driven by the seed.
        let mut s = seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let h = hardness(&g).unwrap();
        prop_assert_eq!(h, hardness(&g.relabel(&perm).unwrap()).unwrap());
    }

    #[test]
    fn bootstrap_interval_contains_estimate(hits in prop::collection::vec(any::<bool>(), 1..60), b in 1usize..400, seed in any::<u64>()) {
        let e = estimate_success_rate(&hits, 1, b, seed).unwrap();
        prop_assert!(e.ci_low <= e.p_mis && e.p_mis <= e.ci_high);
        prop_assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
    }

    #[test]
    fn formats_round_trip(g in graph_strategy(12)) {
        prop_assert_eq!(&parse_json(&to_json(&g).unwrap()).unwrap(), &g);
        let back = parse_dimacs(&to_dimacs(&g)).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_invariants_hold_for_annealing(g in graph_strategy(16), seed in any::<u64>(), strategy in 0usize..3) {
        let sampler = AnnealingSampler { params: AnnealingParams { sweeps: Some(3), ..Default::default() } };
        let strategy = [Rule::In, Rule::Out, Rule::Random][strategy];
        let opts = SolveOptions {
            selection: SelectionParams { strategy, ..Default::default() },
            n_shots: 6,
            seed,
            ..Default::default()
        };
        let r = qredumis_solve(&g, &sampler, &opts).unwrap();
        prop_assert!(is_independent(&g, r.incumbent.members()).unwrap());
        prop_assert!(is_independent(&g, &r.selected).unwrap());
        prop_assert!(r.selected.iter().all(|v| r.removed.binary_search(v).is_err()));
        prop_assert!(r.size() <= alpha(&g));
        prop_assert!(r.size() >= r.selected.len());
        prop_assert!(r.per_iteration.windows(2).all(|w| w[0].incumbent_size <= w[1].incumbent_size));
        prop_assert_eq!(r.sampler_calls, r.iterations - 1);
        // Every removed vertex touches a fixed-in vertex, or was dropped by the out rule.
        if strategy != Rule::Out {
            for &v in &r.removed {
                prop_assert!(r.selected.iter().any(|&s| g.has_edge(s, v)));
            }
        }
    }
}
