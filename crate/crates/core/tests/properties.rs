use proptest::prelude::*;
use proptest::sample::subsequence;

use qrelax::distance::{bfs_distance, DistanceIndex};
use qrelax::oracle::{brute_relax, brute_success, BruteForceConfig};
use qrelax::relax::est;
use qrelax::*;

fn build(n: usize, edges: &[(usize, usize)]) -> EntityGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.entity(&format!("v{i}"));
    }
    for &(u, v) in edges {
        b.add_arc(&format!("v{u}"), "r", &format!("v{v}"));
    }
    b.build_unchecked()
}

fn graph(max_n: usize, density: usize) -> impl Strategy<Value = EntityGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=density * n).prop_map(move |edges| build(n, &edges))
    })
}

/// A graph plus a query of 2..=4 distinct entities.
fn instance(max_n: usize) -> impl Strategy<Value = (EntityGraph, Vec<EntityId>)> {
    (4..=max_n).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=2 * n), 2..=4usize)).prop_flat_map(
        |(n, edges, k)| {
            let all: Vec<EntityId> = (0..n as u32).map(EntityId).collect();
            (Just(build(n, &edges)), subsequence(all, k))
        },
    )
}

fn small_cfg() -> BruteForceConfig {
    BruteForceConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn neighbor_relation_is_symmetric(g in graph(20, 3)) {
        for e in g.entities() {
            prop_assert!(!g.neighbors(e).contains(&e));
            for &n in g.neighbors(e) {
                prop_assert!(g.neighbors(n).contains(&e));
            }
            prop_assert!(g.neighbors(e).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn degrees_sum_to_twice_the_arcs(g in graph(20, 3)) {
        let total: u64 = g.entities().map(|e| g.degree(e) as u64).sum();
        prop_assert_eq!(total, 2 * g.arc_count() as u64);
    }

    #[test]
    fn edge_list_reload_is_identical(edges in prop::collection::vec((0..8usize, 0..8usize), 1..20)) {
        let text: String = edges.iter().map(|(u, v)| format!("n{u}\tr\tn{v}\n")).collect();
        let a = qrelax::graph::load_edge_list(text.as_bytes()).unwrap();
        let b = qrelax::graph::load_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(a.content_hash(), b.content_hash());
        prop_assert_eq!(a.arcs(), b.arcs());
    }

    #[test]
    fn index_matches_bfs(g in graph(60, 2)) {
        let index = DistanceIndex::build(&g);
        for u in g.entities() {
            for v in g.entities() {
                prop_assert_eq!(index.query(u, v).unwrap(), bfs_distance(&g, u, v).unwrap());
            }
        }
    }

    #[test]
    fn distances_are_a_metric(g in graph(25, 2)) {
        let index = DistanceIndex::build(&g);
        for u in g.entities() {
            for v in g.entities() {
                let uv = index.query(u, v).unwrap();
                prop_assert_eq!(uv, index.query(v, u).unwrap());
                if u != v {
                    prop_assert_eq!(uv == Distance::Finite(1), g.neighbors(u).contains(&v));
                }
                for w in g.entities() {
                    let via = uv.plus(index.query(v, w).unwrap());
                    prop_assert!(index.query(u, w).unwrap() <= via);
                }
            }
        }
    }

    #[test]
    fn opt_with_cert_is_sound((g, q) in instance(10), d in 1u32..=6) {
        let dist = BfsOracle::new(&g);
        let query = Query::new(&g, q).unwrap();
        let r = half_diameter(d);
        for c in g.entities() {
            let Some(found) = opt_with_cert(&g, d, &query, c, &[], &dist).unwrap() else { continue };
            prop_assert!(found.len() >= 2);
            prop_assert!(found.entities.iter().all(|&e| dist.distance(e, c).within(r)));
            if d % 2 == 0 {
                prop_assert!(found.certificate.companion.is_none());
            }
            prop_assert!(verify_certificate(&g, d, &found.entities, &found.certificate, &dist));
            let sa = materialize_sa(&g, d, &found.entities, &found.certificate, &dist).unwrap();
            sa.validate(&g, &found.entities, d).unwrap();
        }
    }

    #[test]
    fn successful_subqueries_have_certificates((g, q) in instance(9), d in 1u32..=5) {
        let dist = BfsOracle::new(&g);
        let query = Query::new(&g, q.clone()).unwrap();
        if brute_success(&g, d, &q, &small_cfg()).unwrap() {
            let covered = g.entities().any(|c| {
                opt_with_cert(&g, d, &query, c, &[], &dist)
                    .unwrap()
                    .is_some_and(|f| q.iter().all(|e| f.entities.contains(e)))
            });
            prop_assert!(covered);
        }
    }

    #[test]
    fn relaxers_agree_with_brute_force((g, q) in instance(10), d in 1u32..=6) {
        let dist = BfsOracle::new(&g);
        let query = Query::new(&g, q).unwrap();
        let best = brute_relax(&g, d, &query, &small_cfg()).unwrap().len();
        let bfs = certqr_with(&g, d, &query, &dist, &RelaxOptions::with_witness()).unwrap();
        prop_assert_eq!(bfs.q_max.len(), best);
        for mode in PriorityMode::ALL {
            let out = certqr_plus_with(&g, d, &query, &dist, mode, &RelaxOptions::with_witness()).unwrap();
            prop_assert_eq!(out.q_max.len(), best);
            prop_assert!(out.stats.opt_with_cert_calls <= out.stats.entities_visited);
            match (&out.certificate, &out.witness) {
                (Some(cert), Some(sa)) => {
                    prop_assert!(verify_certificate(&g, d, &out.q_max, cert, &dist));
                    sa.validate(&g, &out.q_max, d).unwrap();
                }
                (None, None) => prop_assert!(out.q_max.is_empty()),
                _ => prop_assert!(false, "certificate and witness disagree"),
            }
        }
    }

    #[test]
    fn success_is_monotone_in_the_bound((g, q) in instance(12), d in 1u32..=6) {
        let dist = BfsOracle::new(&g);
        let query = Query::new(&g, q).unwrap();
        if is_successful(&g, d, &query, &dist).unwrap() {
            for bigger in d + 1..=8 {
                prop_assert!(is_successful(&g, bigger, &query, &dist).unwrap());
            }
        }
    }

    #[test]
    fn successful_subquery_bounds_the_optimum((g, q) in instance(10), d in 1u32..=6, pick in 0usize..64) {
        let dist = BfsOracle::new(&g);
        let query = Query::new(&g, q.clone()).unwrap();
        let best = certqr_plus(&g, d, &query, &dist, PriorityMode::Plain).unwrap().q_max.len();
        let sub: Vec<EntityId> = q.iter().enumerate().filter(|(i, _)| pick & (1 << i) != 0).map(|(_, &e)| e).collect();
        if sub.len() >= 2 {
            let subq = Query::new(&g, sub.clone()).unwrap();
            if is_successful(&g, d, &subq, &dist).unwrap() {
                prop_assert!(best >= sub.len());
            }
        }
    }

    #[test]
    fn priority_integer_part_is_the_estimate((g, q) in instance(12), d in 1u32..=6) {
        let dist = BfsOracle::new(&g);
        let query = Query::new(&g, q).unwrap();
        for mode in PriorityMode::ALL {
            let opts = RelaxOptions { trace: true, ..Default::default() };
            let out = certqr_plus_with(&g, d, &query, &dist, mode, &opts).unwrap();
            for t in &out.trace {
                let size = est(t.entity, t.start, &query, d, &dist).len() as u32;
                prop_assert_eq!(t.priority.estimate, size);
                prop_assert_eq!(t.priority.value().floor() as u32, size);
                prop_assert!((0.0..=0.5).contains(&t.priority.fraction));
            }
        }
    }
}
