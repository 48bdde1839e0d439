//! Certificates of success.
//!
//! A sub-query is successful under diameter bound `D` exactly when some entity
//! `c` (the center) lies within `⌈D/2⌉` hops of every member and, for odd `D`,
//! a neighbor `c'` of `c` (the companion) lies `⌈D/2⌉ - 1` hops from every
//! member sitting exactly `⌈D/2⌉` hops from `c` (a critical member).
//! [`opt_with_cert`] finds the largest sub-query one candidate center certifies.

use serde::Serialize;

use crate::distance::DistanceOracle;
use crate::error::Result;
use crate::graph::{EntityGraph, EntityId};
use crate::query::{check_diameter, half_diameter, Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Certificate {
    pub center: EntityId,
    /// Present only for odd bounds with at least one critical member.
    pub companion: Option<EntityId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedSubQuery {
    /// Sorted by entity index, at least two members.
    pub entities: Vec<EntityId>,
    pub certificate: Certificate,
}

impl CertifiedSubQuery {
    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

/// Largest sub-query of `query` that `center` certifies, or `None` when the
/// best such sub-query has fewer than two members or is not larger than
/// `known` (a sub-query already known to succeed).
pub fn opt_with_cert<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    center: EntityId,
    known: &[EntityId],
    dist: &O,
) -> Result<Option<CertifiedSubQuery>> {
    check_diameter(d)?;
    g.check(center)?;
    Ok(best_certified(g, d, query.entities(), center, known.len(), dist))
}

pub(crate) fn best_certified<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &[EntityId],
    center: EntityId,
    known_len: usize,
    dist: &O,
) -> Option<CertifiedSubQuery> {
    let radius = half_diameter(d);
    let mut within = Vec::with_capacity(query.len());
    let mut critical = Vec::new();
    for &qe in query {
        let hops = dist.distance(qe, center);
        if hops.within(radius) {
            within.push(qe);
            if hops.is(radius) {
                critical.push(qe);
            }
        }
    }
    if within.len() <= known_len {
        return None;
    }

    let (entities, companion) = if d.is_multiple_of(2) || critical.len() <= 1 {
        let companion = match critical.first() {
            Some(&qe) if d % 2 == 1 => first_companion_for(g, center, qe, radius - 1, dist),
            _ => None,
        };
        (within, companion)
    } else {
        let mut best: Option<(EntityId, Vec<EntityId>)> = None;
        for &c2 in g.neighbors(center) {
            let reached: Vec<EntityId> =
                critical.iter().copied().filter(|&qe| dist.distance(qe, c2).is(radius - 1)).collect();
            if best.as_ref().is_none_or(|(_, r)| reached.len() > r.len()) {
                best = Some((c2, reached));
            }
        }
        let (companion, reached) = match best {
            Some((c2, r)) if !r.is_empty() => (Some(c2), r),
            _ => (None, Vec::new()),
        };
        let mut entities: Vec<EntityId> =
            within.into_iter().filter(|qe| !critical.contains(qe) || reached.contains(qe)).collect();
        entities.sort_unstable();
        (entities, companion)
    };

    if entities.len() > 1 {
        Some(CertifiedSubQuery { entities, certificate: Certificate { center, companion } })
    } else {
        None
    }
}

fn first_companion_for<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    center: EntityId,
    critical: EntityId,
    hops: u32,
    dist: &O,
) -> Option<EntityId> {
    g.neighbors(center).iter().copied().find(|&c2| dist.distance(critical, c2).is(hops))
}

/// Whether `cert` satisfies both certificate conditions for `subquery`.
pub fn verify_certificate<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    subquery: &[EntityId],
    cert: &Certificate,
    dist: &O,
) -> bool {
    if d == 0 || !g.contains(cert.center) || subquery.iter().any(|&e| !g.contains(e)) {
        return false;
    }
    let radius = half_diameter(d);
    let mut has_critical = false;
    for &qe in subquery {
        let hops = dist.distance(qe, cert.center);
        if !hops.within(radius) {
            return false;
        }
        has_critical |= hops.is(radius);
    }
    if d.is_multiple_of(2) || !has_critical {
        return true;
    }
    let Some(c2) = cert.companion else {
        return false;
    };
    if !g.contains(c2) || g.neighbors(cert.center).binary_search(&c2).is_err() {
        return false;
    }
    subquery.iter().all(|&qe| !dist.distance(qe, cert.center).is(radius) || dist.distance(qe, c2).is(radius - 1))
}
