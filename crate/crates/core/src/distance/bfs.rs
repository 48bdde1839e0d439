use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{Distance, DistanceOracle};
use crate::error::Result;
use crate::graph::{EntityGraph, EntityId};

/// Exact hop distance between `u` and `v` by breadth-first search.
pub fn bfs_distance(g: &EntityGraph, u: EntityId, v: EntityId) -> Result<Distance> {
    g.check(u)?;
    g.check(v)?;
    if u == v {
        return Ok(Distance::ZERO);
    }
    let mut dist = vec![u32::MAX; g.entity_count()];
    let mut queue = VecDeque::new();
    dist[u.index()] = 0;
    queue.push_back(u);
    while let Some(x) = queue.pop_front() {
        let next = dist[x.index()] + 1;
        for &y in g.neighbors(x) {
            if dist[y.index()] == u32::MAX {
                if y == v {
                    return Ok(Distance::Finite(next));
                }
                dist[y.index()] = next;
                queue.push_back(y);
            }
        }
    }
    Ok(Distance::Unreachable)
}

/// Distances from `source` to every entity.
pub fn bfs_distances_from(g: &EntityGraph, source: EntityId) -> Result<Vec<Distance>> {
    g.check(source)?;
    let mut dist = vec![Distance::Unreachable; g.entity_count()];
    let mut queue = VecDeque::new();
    dist[source.index()] = Distance::ZERO;
    queue.push_back((source, 0u32));
    while let Some((x, d)) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y.index()] == Distance::Unreachable {
                dist[y.index()] = Distance::Finite(d + 1);
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok(dist)
}

/// Entities within a hop radius of an origin, with their exact distances.
#[derive(Debug, Clone)]
pub struct BoundedBfsFrontier {
    origin: EntityId,
    radius: u32,
    // discovery (BFS) order
    order: Vec<(EntityId, u32)>,
    lookup: HashMap<EntityId, u32>,
}

impl BoundedBfsFrontier {
    pub fn origin(&self) -> EntityId {
        self.origin
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn distance(&self, e: EntityId) -> Option<u32> {
        self.lookup.get(&e).copied()
    }

    pub fn contains(&self, e: EntityId) -> bool {
        self.lookup.contains_key(&e)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `(entity, distance)` pairs in discovery order.
    pub fn iter(&self) -> impl Iterator<Item = (EntityId, u32)> + '_ {
        self.order.iter().copied()
    }
}

/// Breadth-first search from `origin` that stops at `radius` hops.
pub fn bounded_bfs(g: &EntityGraph, origin: EntityId, radius: u32) -> Result<BoundedBfsFrontier> {
    g.check(origin)?;
    let mut order = vec![(origin, 0)];
    let mut lookup = HashMap::from([(origin, 0)]);
    let mut head = 0;
    while head < order.len() {
        let (x, d) = order[head];
        head += 1;
        if d == radius {
            continue;
        }
        for &y in g.neighbors(x) {
            if let Entry::Vacant(slot) = lookup.entry(y) {
                slot.insert(d + 1);
                order.push((y, d + 1));
            }
        }
    }
    Ok(BoundedBfsFrontier { origin, radius, order, lookup })
}

/// Oracle answering each request with a breadth-first search. Slow but
/// obviously correct; the reference the landmark index is checked against.
#[derive(Debug, Clone, Copy)]
pub struct BfsOracle<'g> {
    graph: &'g EntityGraph,
}

impl<'g> BfsOracle<'g> {
    pub fn new(graph: &'g EntityGraph) -> Self {
        Self { graph }
    }
}

impl DistanceOracle for BfsOracle<'_> {
    fn distance(&self, u: EntityId, v: EntityId) -> Distance {
        bfs_distance(self.graph, u, v).expect("entity outside the oracle's graph")
    }
}
