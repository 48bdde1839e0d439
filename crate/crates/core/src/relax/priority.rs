use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distance::{Distance, DistanceOracle};
use crate::error::Error;
use crate::graph::{EntityGraph, EntityId};
use crate::query::{half_diameter, Query};

/// How ties between equal estimates are ordered in the best-first search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityMode {
    /// Estimate size only.
    #[default]
    Plain,
    /// Prefer low-degree entities: `+ 1/(2 + deg(e))`.
    #[serde(rename = "dg")]
    Degree,
    /// Prefer entities close to a possible certificate: `+ 1/2^(1 + hp)`.
    #[serde(rename = "ds")]
    Distance,
    /// Both: `+ 1/(2 + deg(e))^(1 + hp)`.
    #[serde(rename = "dgs")]
    Combined,
}

impl PriorityMode {
    pub const ALL: [PriorityMode; 4] =
        [PriorityMode::Plain, PriorityMode::Degree, PriorityMode::Distance, PriorityMode::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            PriorityMode::Plain => "plain",
            PriorityMode::Degree => "dg",
            PriorityMode::Distance => "ds",
            PriorityMode::Combined => "dgs",
        }
    }
}

impl fmt::Display for PriorityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PriorityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        PriorityMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown priority mode {s:?}")))
    }
}

/// A frontier priority: integer estimate plus a heuristic fraction in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Priority {
    pub estimate: u32,
    pub fraction: f64,
}

impl Priority {
    pub fn value(self) -> f64 {
        self.estimate as f64 + self.fraction
    }
}

impl Eq for Priority {}

impl Ord for Priority {
    fn cmp(&self, other: &Self) -> Ordering {
        self.estimate.cmp(&other.estimate).then_with(|| self.fraction.total_cmp(&other.fraction))
    }
}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Query entities that `e`, or an entity reached after it in the search from
/// `start`, could still certify: `start` plus every other query entity `qe`
/// with `dist(e, start) + dist(e, qe) <= d`.
pub fn est<O: DistanceOracle + ?Sized>(e: EntityId, start: EntityId, query: &Query, d: u32, dist: &O) -> Vec<EntityId> {
    estimate(e, start, query.entities(), d, dist).0
}

/// Priority of `e` in the search from `start` under `mode`.
pub fn priority<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    e: EntityId,
    start: EntityId,
    query: &Query,
    d: u32,
    dist: &O,
    mode: PriorityMode,
) -> Priority {
    compute(g, e, start, query.entities(), d, dist, mode)
}

// returns (estimate set, hp) where hp lower-bounds the hops from e to any
// certificate of the estimate set
fn estimate<O: DistanceOracle + ?Sized>(
    e: EntityId,
    start: EntityId,
    query: &[EntityId],
    d: u32,
    dist: &O,
) -> (Vec<EntityId>, u32) {
    let radius = half_diameter(d);
    let from_start = dist.distance(e, start);
    let mut members = vec![start];
    let mut hp = from_start.finite().map_or(0, |h| h.saturating_sub(radius));
    if let Distance::Finite(base) = from_start {
        for &qe in query {
            if qe == start {
                continue;
            }
            if let Distance::Finite(h) = dist.distance(e, qe) {
                if base + h <= d {
                    members.push(qe);
                    hp = hp.max(h.saturating_sub(radius));
                }
            }
        }
    }
    members.sort_unstable();
    (members, hp)
}

pub(crate) fn compute<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    e: EntityId,
    start: EntityId,
    query: &[EntityId],
    d: u32,
    dist: &O,
    mode: PriorityMode,
) -> Priority {
    let (members, hp) = estimate(e, start, query, d, dist);
    let exponent = 1 + hp as i32;
    let fraction = match mode {
        PriorityMode::Plain => 0.0,
        PriorityMode::Degree => 1.0 / (2.0 + g.degree(e) as f64),
        PriorityMode::Distance => 0.5f64.powi(exponent),
        PriorityMode::Combined => (2.0 + g.degree(e) as f64).powi(-exponent),
    };
    Priority { estimate: members.len() as u32, fraction }
}
