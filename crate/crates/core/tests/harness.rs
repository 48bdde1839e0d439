use std::time::Duration;

use qrelax::bench::{read_csv, run_bench, save_records, write_csv, Algorithm, BenchConfig};
use qrelax::distance::bounded_bfs;
use qrelax::fixtures::{conf, conference_graph, triangle_graph};
use qrelax::graph::load_edge_list;
use qrelax::quality::compute_quality;
use qrelax::workload::{gen_clustered_queries, QueryKind, Workload, WorkloadQuery};
use qrelax::*;

fn fixture_workload(g: &EntityGraph) -> Workload {
    Workload {
        queries: vec![WorkloadQuery {
            id: "fixture".into(),
            entities: ["Alice", "Bob", "Dan", "Gary"].iter().map(|n| g.name(conf(g, n)).to_owned()).collect(),
            kind: QueryKind::Random,
            n: 4,
        }],
    }
}

fn config(algorithms: &str, timeout: Duration) -> BenchConfig {
    BenchConfig {
        algorithms: Algorithm::parse_list(algorithms).unwrap(),
        d_list: vec![4],
        timeout,
        repetitions: 3,
        parallel: false,
    }
}

#[test]
fn bench_counts_certificate_checks() {
    let g = conference_graph();
    let index = DistanceIndex::build(&g);
    let records =
        run_bench(&g, &index, &fixture_workload(&g), &config("certqr,certqr+", Duration::from_secs(60))).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].algorithm, "certqr");
    assert_eq!(records[0].stats.opt_with_cert_calls, 11);
    assert_eq!(records[1].algorithm, "certqr+");
    assert_eq!(records[1].stats.opt_with_cert_calls, 4);
    assert!(records.iter().all(|r| r.q_max_size == 3 && !r.timed_out));
}

#[test]
fn every_algorithm_reports_the_same_size() {
    let g = conference_graph();
    let index = DistanceIndex::build(&g);
    let mut cfg = config("certqr,certqr+,dg,ds,dgs,bsl,brute", Duration::from_secs(60));
    cfg.d_list = vec![2, 3, 4, 5];
    cfg.parallel = true;
    let records = run_bench(&g, &index, &fixture_workload(&g), &cfg).unwrap();
    assert_eq!(records.len(), 28);
    for d in 2..=5 {
        let sizes: Vec<usize> = records.iter().filter(|r| r.d == d).map(|r| r.q_max_size).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "D={d}: {sizes:?}");
    }
}

#[test]
fn zero_timeout_flags_every_run() {
    let g = conference_graph();
    let index = DistanceIndex::build(&g);
    let records = run_bench(&g, &index, &fixture_workload(&g), &config("certqr,dgs,bsl", Duration::ZERO)).unwrap();
    for r in &records {
        assert!(r.timed_out, "{} finished", r.algorithm);
        assert_eq!(r.wall_time_secs, 0.0);
    }
}

#[test]
fn unknown_algorithms_are_rejected() {
    assert!(matches!(Algorithm::parse_list("certqr,fastest"), Err(Error::Argument(_))));
}

#[test]
fn csv_round_trip() {
    let g = conference_graph();
    let index = DistanceIndex::build(&g);
    let records = run_bench(&g, &index, &fixture_workload(&g), &config("certqr,ds", Duration::from_secs(60))).unwrap();
    let mut buf = Vec::new();
    write_csv(&records, &mut buf).unwrap();
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), records.len());
    for (a, b) in records.iter().zip(&back) {
        assert_eq!(a.query_id, b.query_id);
        assert_eq!(a.algorithm, b.algorithm);
        assert_eq!(a.stats.opt_with_cert_calls, b.stats.opt_with_cert_calls);
        assert_eq!(a.wall_time_secs, b.wall_time_secs);
        assert_eq!(a.q_max_size, b.q_max_size);
    }

    let dir = tempfile::tempdir().unwrap();
    save_records(&records, &dir.path().join("out.csv")).unwrap();
    assert!(dir.path().join("out.json").exists());
    let file = std::fs::File::open(dir.path().join("out.csv")).unwrap();
    assert_eq!(read_csv(file).unwrap(), back);
}

#[test]
fn quality_examples() {
    let g = conference_graph();
    let dist = BfsOracle::new(&g);
    let q = Query::new(&g, ["Alice", "Bob", "Dan", "Gary"].map(|n| conf(&g, n))).unwrap();
    let rec = compute_quality(&g, &dist, "q", &q, 4, 8).unwrap();
    assert_eq!((rec.n_min, rec.d_min), (Some(1), Some(5)));

    let abd = Query::new(&g, ["Alice", "Bob", "Dan"].map(|n| conf(&g, n))).unwrap();
    let rec = compute_quality(&g, &dist, "q", &abd, 4, 8).unwrap();
    assert_eq!((rec.n_min, rec.d_min), (Some(0), Some(4)));

    let split = load_edge_list("a\tr\tb\nc\tr\td\n".as_bytes()).unwrap();
    let sq = Query::from_names(&split, &["a", "d"]).unwrap();
    let rec = compute_quality(&split, &BfsOracle::new(&split), "q", &sq, 4, 8).unwrap();
    assert_eq!((rec.n_min, rec.d_min), (None, None));

    let t = triangle_graph();
    let tq = Query::new(&t, t.entities()).unwrap();
    assert_eq!(compute_quality(&t, &BfsOracle::new(&t), "t", &tq, 1, 4).unwrap().d_min, Some(2));

    assert!(compute_quality(&g, &dist, "q", &q, 4, 3).is_err());
}

#[test]
fn quality_minimum_is_tight() {
    let g = qrelax::synthetic::erdos_renyi(30, 0.08, 4);
    let dist = DistanceIndex::build(&g);
    let w = qrelax::workload::gen_random_queries(&g, 40, 3, 9).unwrap();
    for (id, q) in w.resolve(&g).unwrap() {
        let rec = compute_quality(&g, &dist, &id, &q, 4, 10).unwrap();
        if let Some(dm) = rec.d_min {
            assert!(is_successful(&g, dm, &q, &dist).unwrap());
            if dm >= 2 {
                assert!(!is_successful(&g, dm - 1, &q, &dist).unwrap());
            }
            assert_eq!(dm <= 4, rec.n_min == Some(0));
        }
    }
}

#[test]
fn clustered_fixture_queries_stay_local() {
    let g = conference_graph();
    let w = gen_clustered_queries(&g, 30, 3, 2, 5).unwrap();
    for (_, q) in w.resolve(&g).unwrap() {
        let near = q.entities().iter().any(|&c| {
            let ball = bounded_bfs(&g, c, 2).unwrap();
            q.entities().iter().all(|&e| ball.contains(e))
        });
        assert!(near);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    w.save(&path).unwrap();
    assert_eq!(Workload::load(&path).unwrap(), w);
}
