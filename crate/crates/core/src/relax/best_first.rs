use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use super::priority::compute;
use super::{FrontierElement, Priority, PriorityMode, RelaxOptions, RelaxationOutcome};
use crate::association::materialize_sa;
use crate::certificate::{best_certified, CertifiedSubQuery};
use crate::distance::{CountingOracle, DistanceOracle};
use crate::error::Result;
use crate::graph::{EntityGraph, EntityId};
use crate::query::{check_diameter, half_diameter, Query};

struct Entry {
    priority: Priority,
    // earlier insertions win ties
    seq: Reverse<u64>,
    entity: EntityId,
    search: usize,
    hops: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.cmp(&other.priority).then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn certqr_plus<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    dist: &O,
    mode: PriorityMode,
) -> Result<RelaxationOutcome> {
    certqr_plus_with(g, d, query, dist, mode, &RelaxOptions::default())
}

/// Best-first relaxation.
///
/// Runs one search per query entity over a shared max-priority queue. The
/// integer part of a priority bounds the size of any sub-query certified by
/// the entity or by anything reached after it along shortest paths from the
/// same start, so the loop ends once the top of the queue cannot beat the
/// current best (or is at most one). Each entity is checked at most once
/// across all searches.
pub fn certqr_plus_with<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    dist: &O,
    mode: PriorityMode,
    opts: &RelaxOptions,
) -> Result<RelaxationOutcome> {
    check_diameter(d)?;
    let started = Instant::now();
    let counted = CountingOracle::new(dist);
    let radius = half_diameter(d);
    let q = query.entities();
    let mut outcome = RelaxationOutcome::empty(q);

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut visited: Vec<HashSet<EntityId>> = vec![HashSet::new(); q.len()];
    let mut seen: HashSet<EntityId> = HashSet::new();
    let mut checked: HashSet<EntityId> = HashSet::new();

    let mut insert =
        |heap: &mut BinaryHeap<Entry>, outcome: &mut RelaxationOutcome, entity: EntityId, search: usize, hops: u32| {
            let priority = compute(g, entity, q[search], q, d, &counted, mode);
            outcome.stats.priority_computations += 1;
            outcome.stats.queue_operations += 1;
            if opts.trace {
                outcome.trace.push(FrontierElement { entity, start: q[search], priority });
            }
            heap.push(Entry { priority, seq: Reverse(seq), entity, search, hops });
            seq += 1;
        };

    for (i, &qe) in q.iter().enumerate() {
        insert(&mut heap, &mut outcome, qe, i, 0);
        visited[i].insert(qe);
        seen.insert(qe);
    }

    let mut best: Option<CertifiedSubQuery> = None;
    let mut pulls = 0u64;
    while let Some(top) = heap.pop() {
        outcome.stats.queue_operations += 1;
        if pulls.is_multiple_of(256) && opts.expired() {
            outcome.stats.terminated_early = true;
            break;
        }
        pulls += 1;
        let known = best.as_ref().map_or(0, CertifiedSubQuery::len);
        let bound = top.priority.estimate as usize;
        if bound <= known || bound <= 1 {
            break;
        }
        if checked.insert(top.entity) {
            outcome.stats.opt_with_cert_calls += 1;
            if let Some(found) = best_certified(g, d, q, top.entity, known, &counted) {
                if found.len() > known {
                    best = Some(found);
                }
            }
        }
        let known = best.as_ref().map_or(0, CertifiedSubQuery::len);
        if top.hops < radius && bound > known {
            let start = q[top.search];
            for &next in g.neighbors(top.entity) {
                if visited[top.search].contains(&next) {
                    continue;
                }
                if !counted.distance(next, start).is(top.hops + 1) {
                    continue;
                }
                insert(&mut heap, &mut outcome, next, top.search, top.hops + 1);
                visited[top.search].insert(next);
                seen.insert(next);
            }
        }
    }

    outcome.stats.entities_visited = seen.len() as u64;
    if let Some(best) = best {
        if opts.witness {
            outcome.witness = Some(materialize_sa(g, d, &best.entities, &best.certificate, &counted)?);
        }
        outcome.q_max = best.entities;
        outcome.certificate = Some(best.certificate);
    }
    outcome.stats.distance_calls = counted.calls();
    outcome.stats.wall_time = started.elapsed();
    Ok(outcome)
}

/// Whether the whole query is successful under bound `d`.
pub fn is_successful<O: DistanceOracle + ?Sized>(g: &EntityGraph, d: u32, query: &Query, dist: &O) -> Result<bool> {
    let outcome = certqr_plus(g, d, query, dist, PriorityMode::Plain)?;
    Ok(outcome.q_max.len() == query.len())
}
