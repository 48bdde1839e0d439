//! Timing harness: every (query, algorithm, bound) cell is run several times
//! and the median run is recorded.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::DistanceOracle;
use crate::error::{Error, Result};
use crate::graph::EntityGraph;
use crate::oracle::{brute_relax_outcome, bsl, BruteForceConfig};
use crate::query::Query;
use crate::relax::{certqr_plus_with, certqr_with, PriorityMode, RelaxOptions, RelaxationOutcome, RunStats};
use crate::workload::Workload;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    CertQr,
    CertQrPlus(PriorityMode),
    Bsl,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::CertQr,
        Algorithm::CertQrPlus(PriorityMode::Plain),
        Algorithm::CertQrPlus(PriorityMode::Degree),
        Algorithm::CertQrPlus(PriorityMode::Distance),
        Algorithm::CertQrPlus(PriorityMode::Combined),
        Algorithm::Bsl,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::CertQr => "certqr",
            Algorithm::CertQrPlus(PriorityMode::Plain) => "certqr+",
            Algorithm::CertQrPlus(mode) => mode.as_str(),
            Algorithm::Bsl => "bsl",
            Algorithm::Brute => "brute",
        }
    }

    /// Parses a comma-separated list, rejecting unknown names up front.
    pub fn parse_list(s: &str) -> Result<Vec<Algorithm>> {
        s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown algorithm {s:?}")))
    }
}

/// Runs one algorithm once. `timeout` bounds the run; a run that hits it has
/// `terminated_early` set.
pub fn run_algorithm<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    dist: &O,
    algorithm: Algorithm,
    d: u32,
    query: &Query,
    opts: &RelaxOptions,
    timeout: Option<Duration>,
) -> Result<RelaxationOutcome> {
    let mut opts = opts.clone();
    if let Some(t) = timeout {
        opts.deadline = Instant::now().checked_add(t);
    }
    match algorithm {
        Algorithm::CertQr => certqr_with(g, d, query, dist, &opts),
        Algorithm::CertQrPlus(mode) => certqr_plus_with(g, d, query, dist, mode, &opts),
        Algorithm::Bsl => bsl(g, d, query, dist, timeout.unwrap_or(Duration::MAX), &opts),
        Algorithm::Brute => {
            let cfg = match timeout {
                Some(_) => BruteForceConfig { step_cap: u64::MAX, ..Default::default() },
                None => BruteForceConfig::default(),
            };
            brute_relax_outcome(g, d, query, &cfg, &opts)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub query_id: String,
    pub algorithm: String,
    pub d: u32,
    /// Median wall time; the timeout value for runs that hit it.
    pub wall_time_secs: f64,
    pub stats: RunStats,
    pub timed_out: bool,
    pub q_max_size: usize,
}

/// Flat CSV row for a [`BenchRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BenchRow {
    query_id: String,
    algorithm: String,
    d: u32,
    wall_time_secs: f64,
    timed_out: bool,
    q_max_size: usize,
    entities_visited: u64,
    opt_with_cert_calls: u64,
    priority_computations: u64,
    distance_calls: u64,
    queue_operations: u64,
    candidates_checked: u64,
    run_wall_time_secs: f64,
}

impl From<&BenchRecord> for BenchRow {
    fn from(r: &BenchRecord) -> Self {
        BenchRow {
            query_id: r.query_id.clone(),
            algorithm: r.algorithm.clone(),
            d: r.d,
            wall_time_secs: r.wall_time_secs,
            timed_out: r.timed_out,
            q_max_size: r.q_max_size,
            entities_visited: r.stats.entities_visited,
            opt_with_cert_calls: r.stats.opt_with_cert_calls,
            priority_computations: r.stats.priority_computations,
            distance_calls: r.stats.distance_calls,
            queue_operations: r.stats.queue_operations,
            candidates_checked: r.stats.candidates_checked,
            run_wall_time_secs: r.stats.wall_time.as_secs_f64(),
        }
    }
}

impl From<BenchRow> for BenchRecord {
    fn from(r: BenchRow) -> Self {
        BenchRecord {
            query_id: r.query_id,
            algorithm: r.algorithm,
            d: r.d,
            wall_time_secs: r.wall_time_secs,
            stats: RunStats {
                entities_visited: r.entities_visited,
                opt_with_cert_calls: r.opt_with_cert_calls,
                priority_computations: r.priority_computations,
                distance_calls: r.distance_calls,
                queue_operations: r.queue_operations,
                candidates_checked: r.candidates_checked,
                wall_time: Duration::from_secs_f64(r.run_wall_time_secs),
                terminated_early: r.timed_out,
            },
            timed_out: r.timed_out,
            q_max_size: r.q_max_size,
        }
    }
}

pub fn write_csv<W: std::io::Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in records {
        writer.serialize(BenchRow::from(r))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<BenchRecord>> {
    csv::Reader::from_reader(r).deserialize::<BenchRow>().map(|row| Ok(row?.into())).collect()
}

/// Writes `<stem>.csv` and `<stem>.json` next to `path`.
pub fn save_records(records: &[BenchRecord], path: &Path) -> Result<()> {
    let csv_path = path.with_extension("csv");
    write_csv(records, std::io::BufWriter::new(std::fs::File::create(csv_path)?))?;
    let json = std::io::BufWriter::new(std::fs::File::create(path.with_extension("json"))?);
    serde_json::to_writer_pretty(json, records)?;
    Ok(())
}

/// Lower median (the middle element for odd counts).
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub d_list: Vec<u32>,
    pub timeout: Duration,
    pub repetitions: usize,
    /// Run cells on the rayon pool instead of one after another.
    pub parallel: bool,
}

fn run_cell<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    dist: &O,
    id: &str,
    query: &Query,
    algorithm: Algorithm,
    d: u32,
    cfg: &BenchConfig,
) -> Result<BenchRecord> {
    let mut runs = Vec::with_capacity(cfg.repetitions);
    for _ in 0..cfg.repetitions {
        let outcome = run_algorithm(g, dist, algorithm, d, query, &RelaxOptions::default(), Some(cfg.timeout))?;
        let timed_out = outcome.stats.terminated_early;
        let secs = if timed_out { cfg.timeout.as_secs_f64() } else { outcome.stats.wall_time.as_secs_f64() };
        runs.push((secs, timed_out, outcome));
    }
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (secs, timed_out, outcome) = runs.swap_remove((runs.len() - 1) / 2);
    Ok(BenchRecord {
        query_id: id.to_owned(),
        algorithm: algorithm.name().to_owned(),
        d,
        wall_time_secs: secs,
        stats: outcome.stats,
        timed_out,
        q_max_size: outcome.q_max.len(),
    })
}

pub fn run_bench<O: DistanceOracle + Sync + ?Sized>(
    g: &EntityGraph,
    dist: &O,
    workload: &Workload,
    cfg: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    if cfg.repetitions == 0 {
        return Err(Error::Argument("repetitions must be at least 1".into()));
    }
    let queries = workload.resolve(g)?;
    let cells: Vec<(usize, Algorithm, u32)> = (0..queries.len())
        .flat_map(|qi| cfg.algorithms.iter().flat_map(move |&a| cfg.d_list.iter().map(move |&d| (qi, a, d))))
        .collect();
    let run = |&(qi, a, d): &(usize, Algorithm, u32)| {
        let (id, query) = &queries[qi];
        run_cell(g, dist, id, query, a, d, cfg)
    };
    if cfg.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_three() {
        assert_eq!(median(&mut [1.0, 2.0, 100.0]), 2.0);
        assert_eq!(median(&mut [100.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [5.0]), 5.0);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!(Algorithm::parse_list("certqr,nope").is_err());
        assert_eq!(Algorithm::parse_list("certqr, dgs").unwrap().len(), 2);
    }
}
