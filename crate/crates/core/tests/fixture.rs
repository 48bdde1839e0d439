use std::collections::BTreeSet;

use qrelax::association::{sa_diameter, tree_diameter};
use qrelax::distance::{bfs_distance, bounded_bfs, DistanceIndex};
use qrelax::fixtures::{conf, conference_graph, triangle_graph};
use qrelax::graph::{load_edge_list, load_ntriples};
use qrelax::oracle::{brute_relax, brute_success, bsl, BruteForceConfig};
use qrelax::relax::{est, priority, Priority};
use qrelax::*;

fn ids(g: &EntityGraph, names: &[&str]) -> Vec<EntityId> {
    let mut v: Vec<EntityId> = names.iter().map(|n| conf(g, n)).collect();
    v.sort_unstable();
    v
}

fn query(g: &EntityGraph, names: &[&str]) -> Query {
    Query::new(g, ids(g, names)).unwrap()
}

fn bfs(g: &EntityGraph) -> BfsOracle<'_> {
    BfsOracle::new(g)
}

#[test]
fn conference_graph_shape() {
    let g = conference_graph();
    assert_eq!(g.entity_count(), 11);
    assert_eq!(g.arc_count(), 10);
    assert_eq!(g.load_stats().skipped_literal, 2);
    assert_eq!(g.load_stats().skipped_type, 1);
    let iswc = conf(&g, "ISWC2019");
    assert_eq!(g.neighbors(iswc), ids(&g, &["Paper01", "Paper02", "Paper03", "Dan"]).as_slice());
    assert_eq!(g.degree(iswc), 4);
    let by_arcs = g.arcs().iter().filter(|a| a.tail == iswc || a.head == iswc).count();
    assert_eq!(by_arcs, 4);
}

#[test]
fn ntriples_filtering() {
    let src = "<http://x/a> <http://x/p> <http://x/b> .\n\
               <http://x/b> <http://x/p> <http://x/c> .\n\
               <http://x/a> <http://x/name> \"A\" .\n";
    let g = load_ntriples(src.as_bytes()).unwrap();
    assert_eq!(g.arc_count(), 2);
    assert_eq!(g.load_stats().skipped(), 1);

    let typed = "<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T> .\n";
    let err = load_ntriples(typed.as_bytes()).unwrap_err();
    assert!(matches!(err, Error::EmptyGraph));
}

#[test]
fn edge_list_examples() {
    let g = load_edge_list("a\tr\tb\n".as_bytes()).unwrap();
    assert_eq!((g.entity_count(), g.arc_count()), (2, 1));

    let t = triangle_graph();
    assert_eq!((t.entity_count(), t.arc_count()), (3, 3));
    assert!(t.entities().all(|e| t.degree(e) == 2 && t.neighbors(e).len() == 2));

    let dup = load_edge_list("a\tr\tb\na\tr\tb\n".as_bytes()).unwrap();
    assert_eq!(dup.arc_count(), 2);
    for e in dup.entities() {
        assert_eq!(dup.neighbors(e).len(), 1);
        assert_eq!(dup.degree(e), 2);
    }

    let err = load_edge_list("a\tr\tb\nbroken\n".as_bytes()).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }));
}

#[test]
fn reloading_is_deterministic() {
    let a = conference_graph();
    let b = conference_graph();
    assert_eq!(a.content_hash(), b.content_hash());
    for e in a.entities() {
        assert_eq!(a.name(e), b.name(e));
    }
}

#[test]
fn fixture_distances() {
    let g = conference_graph();
    let d = |a: &str, b: &str| bfs_distance(&g, conf(&g, a), conf(&g, b)).unwrap();
    assert_eq!(d("ISWC2019", "Alice"), Distance::Finite(2));
    assert_eq!(d("ISWC2019", "Bob"), Distance::Finite(2));
    assert_eq!(d("ISWC2019", "Dan"), Distance::Finite(1));
    assert_eq!(d("Alice", "Gary"), Distance::Finite(5));
    assert_eq!(d("Erin", "Erin"), Distance::Finite(0));
}

#[test]
fn index_agrees_with_bfs_on_every_fixture_pair() {
    let g = conference_graph();
    let index = DistanceIndex::build(&g);
    let mut pairs = 0;
    for u in g.entities() {
        for v in g.entities().filter(|v| *v > u) {
            let truth = bfs_distance(&g, u, v).unwrap();
            assert_eq!(index.query(u, v).unwrap(), truth);
            assert_eq!(index.query(v, u).unwrap(), truth);
            pairs += 1;
        }
    }
    assert_eq!(pairs, 55);
}

#[test]
fn index_on_small_graphs() {
    let t = triangle_graph();
    let index = DistanceIndex::build(&t);
    for u in t.entities() {
        for v in t.entities().filter(|&v| v != u) {
            assert_eq!(index.query(u, v).unwrap(), Distance::Finite(1));
        }
    }
    let split = load_edge_list("a\tr\tb\nc\tr\td\n".as_bytes()).unwrap();
    let index = DistanceIndex::build(&split);
    let (a, c) = (split.resolve("a").unwrap(), split.resolve("c").unwrap());
    assert_eq!(index.query(a, c).unwrap(), Distance::Unreachable);
}

#[test]
fn index_file_round_trip_and_staleness() {
    let g = conference_graph();
    let index = DistanceIndex::build(&g);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conf.idx");
    index.save(&path).unwrap();
    let loaded = DistanceIndex::load(&path, &g).unwrap();
    for u in g.entities() {
        for v in g.entities() {
            assert_eq!(loaded.query(u, v).unwrap(), index.query(u, v).unwrap());
        }
    }
    let err = DistanceIndex::load(&path, &triangle_graph()).unwrap_err();
    assert!(matches!(err, Error::StaleIndex { .. }));

    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(matches!(DistanceIndex::load(&path, &g).unwrap_err(), Error::IndexFormat(_)));
}

#[test]
fn bounded_bfs_examples() {
    let g = conference_graph();
    let gary = bounded_bfs(&g, conf(&g, "Gary"), 2).unwrap();
    let got: BTreeSet<(EntityId, u32)> = gary.iter().collect();
    let want: BTreeSet<(EntityId, u32)> =
        [("Gary", 0), ("Frank", 1), ("Paper02", 2)].iter().map(|&(n, d)| (conf(&g, n), d)).collect();
    assert_eq!(got, want);

    let zero = bounded_bfs(&g, conf(&g, "Dan"), 0).unwrap();
    assert_eq!(zero.iter().collect::<Vec<_>>(), vec![(conf(&g, "Dan"), 0)]);

    let iswc = bounded_bfs(&g, conf(&g, "ISWC2019"), 2).unwrap();
    let got: BTreeSet<(EntityId, u32)> = iswc.iter().collect();
    let want: BTreeSet<(EntityId, u32)> = [
        ("ISWC2019", 0),
        ("Paper01", 1),
        ("Paper02", 1),
        ("Paper03", 1),
        ("Dan", 1),
        ("Alice", 2),
        ("Carol", 2),
        ("Bob", 2),
        ("Erin", 2),
        ("Frank", 2),
    ]
    .iter()
    .map(|&(n, d)| (conf(&g, n), d))
    .collect();
    assert_eq!(got, want);
}

#[test]
fn opt_with_cert_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);

    let iswc = opt_with_cert(&g, 4, &q, conf(&g, "ISWC2019"), &[], &dist).unwrap().unwrap();
    assert_eq!(iswc.entities, ids(&g, &["Alice", "Bob", "Dan"]));
    assert_eq!(iswc.certificate, Certificate { center: conf(&g, "ISWC2019"), companion: None });

    let p2 = opt_with_cert(&g, 4, &q, conf(&g, "Paper02"), &[], &dist).unwrap().unwrap();
    assert_eq!(p2.entities, ids(&g, &["Bob", "Dan", "Gary"]));

    let q3 = query(&g, &["Dan", "Erin", "Frank"]);
    let odd = opt_with_cert(&g, 3, &q3, conf(&g, "ISWC2019"), &[], &dist).unwrap().unwrap();
    assert_eq!(odd.entities, q3.entities());
    assert_eq!(odd.certificate.companion, Some(conf(&g, "Paper02")));

    let abd = query(&g, &["Alice", "Bob", "Dan"]);
    let tied = opt_with_cert(&g, 3, &abd, conf(&g, "ISWC2019"), &[], &dist).unwrap().unwrap();
    assert_eq!(tied.entities, ids(&g, &["Alice", "Dan"]));
    let cfg = BruteForceConfig::default();
    assert!(brute_success(&g, 3, &tied.entities, &cfg).unwrap());
    assert!(brute_success(&g, 3, &ids(&g, &["Bob", "Dan"]), &cfg).unwrap());

    let known = ids(&g, &["Bob", "Dan", "Gary"]);
    assert!(opt_with_cert(&g, 4, &q, conf(&g, "ISWC2019"), &known, &dist).unwrap().is_none());

    assert!(opt_with_cert(&g, 4, &q, EntityId(99), &[], &dist).is_err());
}

#[test]
fn verify_certificate_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    let abd = ids(&g, &["Alice", "Bob", "Dan"]);
    let iswc = Certificate { center: conf(&g, "ISWC2019"), companion: None };
    assert!(verify_certificate(&g, 4, &abd, &iswc, &dist));
    assert!(!verify_certificate(&g, 3, &abd, &iswc, &dist));

    let t = triangle_graph();
    let (a, b) = (t.resolve("a").unwrap(), t.resolve("b").unwrap());
    let pair = Certificate { center: a, companion: Some(b) };
    assert!(verify_certificate(&t, 1, &[a, b], &pair, &BfsOracle::new(&t)));
}

#[test]
fn materialized_fixture_associations() {
    let g = conference_graph();
    let dist = bfs(&g);
    let abd = ids(&g, &["Alice", "Bob", "Dan"]);
    let iswc = Certificate { center: conf(&g, "ISWC2019"), companion: None };
    let sa = materialize_sa(&g, 4, &abd, &iswc, &dist).unwrap();
    assert_eq!(sa.arcs.len(), 5);
    assert_eq!(sa.diameter, 4);
    let pairs: BTreeSet<BTreeSet<&str>> = sa
        .arcs
        .iter()
        .map(|&a| {
            let arc = g.arc(a);
            [arc.tail, arc.head].iter().map(|&e| g.name(e).trim_start_matches("http://example.org/")).collect()
        })
        .collect();
    let want: BTreeSet<BTreeSet<&str>> = [
        ["Alice", "Paper01"],
        ["Paper01", "ISWC2019"],
        ["Bob", "Paper02"],
        ["Paper02", "ISWC2019"],
        ["ISWC2019", "Dan"],
    ]
    .iter()
    .map(|p| p.iter().copied().collect())
    .collect();
    assert_eq!(pairs, want);
    assert_eq!(sa_diameter(&g, &sa).unwrap(), 4);
    sa.validate(&g, &abd, 4).unwrap();

    let all = ids(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let wide = materialize_sa(
        &g,
        5,
        &all,
        &Certificate { center: conf(&g, "ISWC2019"), companion: Some(conf(&g, "Paper02")) },
        &dist,
    )
    .unwrap();
    wide.validate(&g, &all, 5).unwrap();
    assert_eq!(wide.diameter, 5);
    assert_eq!(wide.vertices.len(), 8);
    assert_eq!(wide.arcs.len(), 7);
    assert!(wide.vertices.contains(&conf(&g, "Frank")));
}

#[test]
fn adjacent_pair_association() {
    let t = triangle_graph();
    let (a, b) = (t.resolve("a").unwrap(), t.resolve("b").unwrap());
    let cert = Certificate { center: a, companion: Some(b) };
    let sa = materialize_sa(&t, 1, &[a, b], &cert, &BfsOracle::new(&t)).unwrap();
    assert_eq!(sa.arcs.len(), 1);
    assert_eq!(sa.diameter, 1);
}

#[test]
fn tree_diameter_examples() {
    let g = load_edge_list("a\tr\tb\nb\tr\tc\nc\tr\td\n".as_bytes()).unwrap();
    let all: Vec<EntityId> = g.entities().collect();
    assert_eq!(tree_diameter(&g, &all, &[0, 1, 2]).unwrap(), 3);
    assert_eq!(tree_diameter(&g, &all[..2], &[0]).unwrap(), 1);
    let t = triangle_graph();
    let tv: Vec<EntityId> = t.entities().collect();
    assert!(tree_diameter(&t, &tv, &[0, 1, 2]).is_err());
}

#[test]
fn certqr_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let out = certqr(&g, 4, &q, &dist).unwrap();
    let optima = [ids(&g, &["Alice", "Bob", "Dan"]), ids(&g, &["Bob", "Dan", "Gary"])];
    assert!(optima.contains(&out.q_max));
    assert_eq!(out.stats.opt_with_cert_calls, 11);

    let abd = query(&g, &["Alice", "Bob", "Dan"]);
    assert_eq!(certqr(&g, 4, &abd, &dist).unwrap().q_max, abd.entities());

    let t = triangle_graph();
    let tq = Query::new(&t, t.entities()).unwrap();
    assert_eq!(certqr(&t, 1, &tq, &BfsOracle::new(&t)).unwrap().q_max.len(), 2);

    let split = load_edge_list("a\tr\tb\nc\tr\td\n".as_bytes()).unwrap();
    let sq = Query::from_names(&split, &["a", "c"]).unwrap();
    let out = certqr(&split, 6, &sq, &BfsOracle::new(&split)).unwrap();
    assert!(out.q_max.is_empty());
    assert!(out.certificate.is_none());
}

#[test]
fn est_and_priority_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let bob = conf(&g, "Bob");
    assert_eq!(est(bob, bob, &q, 4, &dist).len(), 4);
    assert_eq!(est(conf(&g, "Erin"), bob, &q, 4, &dist), vec![bob]);
    assert_eq!(est(conf(&g, "ISWC2019"), bob, &q, 4, &dist).len(), 3);

    let dan = conf(&g, "Dan");
    let plain = priority(&g, dan, dan, &q, 4, &dist, PriorityMode::Plain);
    assert_eq!(plain.value(), 4.0);
    let ds = priority(&g, bob, bob, &q, 4, &dist, PriorityMode::Distance);
    assert_eq!(ds.value(), 4.125);
    let dg = priority(&g, conf(&g, "ISWC2019"), dan, &q, 4, &dist, PriorityMode::Degree);
    assert!((dg.value() - (4.0 + 1.0 / 6.0)).abs() < 1e-12);
    assert_eq!(dg, Priority { estimate: 4, fraction: 1.0 / 6.0 });
}

#[test]
fn certqr_plus_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let out = certqr_plus(&g, 4, &q, &dist, PriorityMode::Plain).unwrap();
    assert_eq!(out.q_max, ids(&g, &["Bob", "Dan", "Gary"]));
    assert_eq!(out.stats.opt_with_cert_calls, 4);

    let ad = query(&g, &["Alice", "Dan"]);
    for mode in PriorityMode::ALL {
        assert_eq!(certqr_plus(&g, 4, &ad, &dist, mode).unwrap().q_max, ad.entities());
    }

    let split = load_edge_list("a\tr\tb\nc\tr\td\n".as_bytes()).unwrap();
    let sq = Query::from_names(&split, &["a", "d"]).unwrap();
    for d in 1..=6 {
        assert!(certqr_plus(&split, d, &sq, &BfsOracle::new(&split), PriorityMode::Combined).unwrap().q_max.is_empty());
    }
}

#[test]
fn is_successful_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    assert!(is_successful(&g, 4, &query(&g, &["Alice", "Bob", "Dan"]), &dist).unwrap());
    assert!(!is_successful(&g, 4, &query(&g, &["Alice", "Bob", "Dan", "Gary"]), &dist).unwrap());
    assert!(!is_successful(&g, 3, &query(&g, &["Alice", "Bob", "Dan"]), &dist).unwrap());
}

#[test]
fn invalid_inputs_are_rejected() {
    let g = conference_graph();
    let dist = bfs(&g);
    assert!(Query::new(&g, [conf(&g, "Alice")]).is_err());
    assert!(Query::new(&g, [conf(&g, "Alice"), conf(&g, "Alice")]).is_err());
    assert!(Query::new(&g, [conf(&g, "Alice"), EntityId(40)]).is_err());
    let q = query(&g, &["Alice", "Bob"]);
    assert!(certqr(&g, 0, &q, &dist).is_err());
    assert!(certqr_plus(&g, 0, &q, &dist, PriorityMode::Plain).is_err());
}

#[test]
fn brute_force_examples() {
    let cfg = BruteForceConfig::default();
    let t = triangle_graph();
    let all: Vec<EntityId> = t.entities().collect();
    assert!(!brute_success(&t, 1, &all, &cfg).unwrap());
    assert!(brute_success(&t, 2, &all, &cfg).unwrap());

    let g = conference_graph();
    assert!(brute_success(&g, 4, &ids(&g, &["Alice", "Bob", "Dan"]), &cfg).unwrap());

    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let optimum = brute_relax(&g, 4, &q, &cfg).unwrap();
    assert_eq!(optimum.len(), 3);
    let abd = query(&g, &["Alice", "Bob", "Dan"]);
    assert_eq!(brute_relax(&g, 4, &abd, &cfg).unwrap(), abd.entities());

    let split = load_edge_list("a\tr\tb\nc\tr\td\n".as_bytes()).unwrap();
    let sq = Query::from_names(&split, &["a", "c"]).unwrap();
    assert!(brute_relax(&split, 4, &sq, &cfg).unwrap().is_empty());
}

#[test]
fn bsl_examples() {
    let g = conference_graph();
    let dist = bfs(&g);
    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let long = std::time::Duration::from_secs(60);
    let out = bsl(&g, 4, &q, &dist, long, &RelaxOptions::default()).unwrap();
    assert_eq!(out.q_max.len(), 3);
    // the whole query first, then size-3 sub-queries in lexicographic order
    // until the first success: {Alice, Bob, Dan} comes first
    assert_eq!(out.q_max, ids(&g, &["Alice", "Bob", "Dan"]));
    assert_eq!(out.stats.candidates_checked, 2);
    assert!(verify_certificate(&g, 4, &out.q_max, &out.certificate.unwrap(), &dist));

    let abd = query(&g, &["Alice", "Bob", "Dan"]);
    assert_eq!(bsl(&g, 4, &abd, &dist, long, &RelaxOptions::default()).unwrap().q_max, abd.entities());

    let t = triangle_graph();
    let tq = Query::new(&t, t.entities()).unwrap();
    assert_eq!(bsl(&t, 1, &tq, &BfsOracle::new(&t), long, &RelaxOptions::default()).unwrap().q_max.len(), 2);

    let zero = bsl(&g, 4, &q, &dist, std::time::Duration::ZERO, &RelaxOptions::default()).unwrap();
    assert!(zero.stats.terminated_early);
    assert!(zero.q_max.is_empty());
}

#[test]
fn outcome_json_shape() {
    let g = conference_graph();
    let dist = bfs(&g);
    let q = query(&g, &["Alice", "Bob", "Dan", "Gary"]);
    let out = certqr_plus_with(&g, 4, &q, &dist, PriorityMode::Plain, &RelaxOptions::with_witness()).unwrap();
    let json = serde_json::to_value(out.to_json(&g)).unwrap();
    assert_eq!(json["status"], "relaxed");
    assert_eq!(json["removed"], serde_json::json!(["http://example.org/Alice"]));
    assert_eq!(json["certificate"]["center"], "http://example.org/Paper02");
    assert!(json["certificate"].get("companion").is_none());
    assert!(json["witness"]["arcs"].as_array().unwrap().iter().all(|a| a.get("label").is_some()));
    assert_eq!(json["stats"]["opt_with_cert_calls"], 4);
}
