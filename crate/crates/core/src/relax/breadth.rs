use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use super::{RelaxOptions, RelaxationOutcome};
use crate::association::materialize_sa;
use crate::certificate::{best_certified, CertifiedSubQuery};
use crate::distance::{CountingOracle, DistanceOracle};
use crate::error::Result;
use crate::graph::{EntityGraph, EntityId};
use crate::query::{check_diameter, half_diameter, Query};

pub fn certqr<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    dist: &O,
) -> Result<RelaxationOutcome> {
    certqr_with(g, d, query, dist, &RelaxOptions::default())
}

/// Breadth-first relaxation.
///
/// One search starts from every query entity at once over a shared visited
/// set, so each entity is reached from its closest query entity. Every
/// dequeued entity is offered to the certificate check; expansion stops
/// `⌈D/2⌉` hops from the start entity.
pub fn certqr_with<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    dist: &O,
    opts: &RelaxOptions,
) -> Result<RelaxationOutcome> {
    check_diameter(d)?;
    let started = Instant::now();
    let counted = CountingOracle::new(dist);
    let radius = half_diameter(d);
    let q = query.entities();
    let mut outcome = RelaxationOutcome::empty(q);

    let mut queue: VecDeque<(EntityId, u32)> = VecDeque::new();
    let mut visited: HashSet<EntityId> = HashSet::new();
    for &qe in q {
        if visited.insert(qe) {
            queue.push_back((qe, 0));
            outcome.stats.queue_operations += 1;
        }
    }

    let mut best: Option<CertifiedSubQuery> = None;
    while let Some((e, hops)) = queue.pop_front() {
        outcome.stats.queue_operations += 1;
        if outcome.stats.opt_with_cert_calls.is_multiple_of(256) && opts.expired() {
            outcome.stats.terminated_early = true;
            break;
        }
        let known = best.as_ref().map_or(0, CertifiedSubQuery::len);
        outcome.stats.opt_with_cert_calls += 1;
        if let Some(found) = best_certified(g, d, q, e, known, &counted) {
            if found.len() > known {
                best = Some(found);
            }
        }
        if hops < radius {
            for &next in g.neighbors(e) {
                if visited.insert(next) {
                    queue.push_back((next, hops + 1));
                    outcome.stats.queue_operations += 1;
                }
            }
        }
    }

    outcome.stats.entities_visited = visited.len() as u64;
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
