//! Query workloads for experiments.

use std::path::Path;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::bounded_bfs;
use crate::error::{Error, Result};
use crate::graph::{EntityGraph, EntityId};
use crate::query::Query;

/// Seed resamples allowed per clustered query before giving up.
pub const CLUSTER_RETRY_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Random,
    Clustered,
}

impl std::str::FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(QueryKind::Random),
            "clustered" => Ok(QueryKind::Clustered),
            other => Err(Error::Argument(format!("unknown query kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadQuery {
    pub id: String,
    /// Entity identifiers as they appear in the graph.
    pub entities: Vec<String>,
    pub kind: QueryKind,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub queries: Vec<WorkloadQuery>,
}

impl Workload {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Resolves every query against `g`.
    pub fn resolve(&self, g: &EntityGraph) -> Result<Vec<(String, Query)>> {
        self.queries.iter().map(|wq| Ok((wq.id.clone(), Query::from_names(g, &wq.entities)?))).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Workload> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(file)?)
    }

    fn push(&mut self, g: &EntityGraph, kind: QueryKind, mut ids: Vec<EntityId>) {
        ids.sort_unstable();
        let n = ids.len();
        self.queries.push(WorkloadQuery {
            id: format!("{}-{}-{:04}", kind_tag(kind), n, self.queries.len()),
            entities: ids.into_iter().map(|e| g.name(e).to_owned()).collect(),
            kind,
            n,
        });
    }
}

fn kind_tag(kind: QueryKind) -> &'static str {
    match kind {
        QueryKind::Random => "r",
        QueryKind::Clustered => "c",
    }
}

fn check_n(g: &EntityGraph, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Argument(format!("query size must be at least 2, got {n}")));
    }
    if n > g.entity_count() {
        return Err(Error::Argument(format!("query size {n} exceeds entity count {}", g.entity_count())));
    }
    Ok(())
}

/// `count` queries of `n` entities drawn uniformly without replacement.
pub fn gen_random_queries(g: &EntityGraph, count: usize, n: usize, seed: u64) -> Result<Workload> {
    check_n(g, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut workload = Workload::default();
    for _ in 0..count {
        let ids = g.entities().choose_multiple(&mut rng, n);
        workload.push(g, QueryKind::Random, ids);
    }
    Ok(workload)
}

/// `count` queries each made of a uniformly drawn seed entity plus `n − 1`
/// entities from its `hops`-hop neighborhood. Seeds whose neighborhood is too
/// small are redrawn.
pub fn gen_clustered_queries(g: &EntityGraph, count: usize, n: usize, hops: u32, seed: u64) -> Result<Workload> {
    check_n(g, n)?;
    if hops == 0 {
        return Err(Error::Argument("hop radius must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut workload = Workload::default();
    for _ in 0..count {
        let mut chosen = None;
        for _ in 0..CLUSTER_RETRY_CAP {
            let center = EntityId(rng.gen_range(0..g.entity_count() as u32));
            let around: Vec<EntityId> =
                bounded_bfs(g, center, hops)?.iter().map(|(e, _)| e).filter(|&e| e != center).collect();
            if around.len() >= n - 1 {
                let mut ids: Vec<EntityId> = around.choose_multiple(&mut rng, n - 1).copied().collect();
                ids.push(center);
                chosen = Some(ids);
                break;
            }
        }
        let ids = chosen.ok_or_else(|| {
            Error::Generation(format!(
                "no seed with at least {} entities within {hops} hops after {CLUSTER_RETRY_CAP} draws",
                n - 1
            ))
        })?;
        workload.push(g, QueryKind::Clustered, ids);
    }
    Ok(workload)
}
