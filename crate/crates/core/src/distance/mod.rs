//! Exact unweighted shortest-path distances over the undirected view of an
//! [`EntityGraph`].
//!
//! Algorithms take any [`DistanceOracle`]; [`DistanceIndex`] is the fast
//! landmark-labeling implementation and [`BfsOracle`] answers every call with
//! a fresh breadth-first search.

mod bfs;
mod landmark;

use std::cell::Cell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::EntityId;

pub use bfs::{bfs_distance, bfs_distances_from, bounded_bfs, BfsOracle, BoundedBfsFrontier};
pub use landmark::{DistanceIndex, IndexBuildStats, INDEX_FORMAT_VERSION, INDEX_MAGIC};

/// Hop count between two entities, or [`Distance::Unreachable`].
///
/// `Unreachable` orders after every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub const ZERO: Distance = Distance::Finite(0);

    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }

    pub fn is_reachable(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// `self <= bound` with unreachable never within any bound.
    #[inline]
    pub fn within(self, bound: u32) -> bool {
        matches!(self, Distance::Finite(d) if d <= bound)
    }

    #[inline]
    pub fn is(self, value: u32) -> bool {
        self == Distance::Finite(value)
    }

    /// Sum of two distances; unreachable absorbs.
    pub fn plus(self, other: Distance) -> Distance {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Unreachable,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Source of exact entity-to-entity distances.
///
/// Callers guarantee both entities belong to the graph the oracle serves.
pub trait DistanceOracle {
    fn distance(&self, u: EntityId, v: EntityId) -> Distance;
}

impl<T: DistanceOracle + ?Sized> DistanceOracle for &T {
    fn distance(&self, u: EntityId, v: EntityId) -> Distance {
        (**self).distance(u, v)
    }
}

/// Wraps an oracle and counts how many distances were requested.
pub struct CountingOracle<'a, O: ?Sized> {
    inner: &'a O,
    calls: Cell<u64>,
}

impl<'a, O: DistanceOracle + ?Sized> CountingOracle<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        Self { inner, calls: Cell::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }
}

impl<O: DistanceOracle + ?Sized> DistanceOracle for CountingOracle<'_, O> {
    #[inline]
    fn distance(&self, u: EntityId, v: EntityId) -> Distance {
        self.calls.set(self.calls.get() + 1);
        self.inner.distance(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreachable_orders_last() {
        assert!(Distance::Finite(u32::MAX) < Distance::Unreachable);
        assert!(Distance::Finite(0) < Distance::Finite(1));
        assert!(!Distance::Unreachable.within(u32::MAX));
        assert!(Distance::Finite(3).within(3));
        assert!(!Distance::Finite(4).within(3));
        assert_eq!(Distance::Finite(2).plus(Distance::Unreachable), Distance::Unreachable);
        assert_eq!(Distance::Finite(2).plus(Distance::Finite(3)), Distance::Finite(5));
    }
}
