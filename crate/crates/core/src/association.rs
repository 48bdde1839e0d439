//! Semantic associations: trees in the entity-relation graph that connect the
//! members of a sub-query, have only members as leaves, and respect the
//! diameter bound.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::certificate::{verify_certificate, Certificate};
use crate::distance::DistanceOracle;
use crate::error::{Error, Result};
use crate::graph::{ArcIndex, EntityGraph, EntityId};
use crate::query::half_diameter;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticAssociation {
    /// Sorted by entity index.
    pub vertices: Vec<EntityId>,
    /// Sorted original arc indices.
    pub arcs: Vec<ArcIndex>,
    pub diameter: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcJson {
    pub tail: String,
    pub label: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticAssociationJson {
    pub vertices: Vec<String>,
    pub arcs: Vec<ArcJson>,
    pub diameter: u32,
}

impl SemanticAssociation {
    /// Builds an association from a vertex set and arcs, computing its diameter.
    pub fn from_parts(
        g: &EntityGraph,
        vertices: impl IntoIterator<Item = EntityId>,
        arcs: impl IntoIterator<Item = ArcIndex>,
    ) -> Result<SemanticAssociation> {
        let mut vertices: Vec<EntityId> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut arcs: Vec<ArcIndex> = arcs.into_iter().collect();
        arcs.sort_unstable();
        arcs.dedup();
        let diameter = tree_diameter(g, &vertices, &arcs)?;
        Ok(SemanticAssociation { vertices, arcs, diameter })
    }

    pub fn to_json(&self, g: &EntityGraph) -> SemanticAssociationJson {
        SemanticAssociationJson {
            vertices: self.vertices.iter().map(|&e| g.name(e).to_owned()).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|&a| {
                    let arc = g.arc(a);
                    ArcJson {
                        tail: g.name(arc.tail).to_owned(),
                        label: g.label_name(arc.label).to_owned(),
                        head: g.name(arc.head).to_owned(),
                    }
                })
                .collect(),
            diameter: self.diameter,
        }
    }

    /// Vertices of degree one within the association.
    pub fn leaves(&self, g: &EntityGraph) -> Vec<EntityId> {
        let mut degree: HashMap<EntityId, usize> = HashMap::new();
        for &a in &self.arcs {
            let arc = g.arc(a);
            *degree.entry(arc.tail).or_default() += 1;
            *degree.entry(arc.head).or_default() += 1;
        }
        let mut leaves: Vec<EntityId> = degree.into_iter().filter(|&(_, k)| k == 1).map(|(e, _)| e).collect();
        leaves.sort_unstable();
        leaves
    }

    /// Checks every structural requirement against `subquery` and bound `d`:
    /// a tree, containing the sub-query, with only sub-query leaves, and a
    /// recomputed diameter equal to the stored one and at most `d`.
    pub fn validate(&self, g: &EntityGraph, subquery: &[EntityId], d: u32) -> Result<()> {
        let diameter = tree_diameter(g, &self.vertices, &self.arcs)?;
        let fail = |m: String| Err(Error::Internal(m));
        if diameter != self.diameter {
            return fail(format!("stored diameter {} != {}", self.diameter, diameter));
        }
        if diameter > d {
            return fail(format!("diameter {diameter} exceeds bound {d}"));
        }
        if let Some(missing) = subquery.iter().find(|e| self.vertices.binary_search(e).is_err()) {
            return fail(format!("sub-query entity {missing} missing"));
        }
        if let Some(leaf) = self.leaves(g).into_iter().find(|e| !subquery.contains(e)) {
            return fail(format!("leaf {leaf} is not a sub-query entity"));
        }
        Ok(())
    }
}

/// Diameter of the tree formed by `arcs` over `vertices`, by double BFS.
///
/// Fails if the arcs do not form a spanning tree of the vertex set.
pub fn tree_diameter(g: &EntityGraph, vertices: &[EntityId], arcs: &[ArcIndex]) -> Result<u32> {
    let not_tree = |m: &str| Err(Error::Argument(format!("not a tree: {m}")));
    if vertices.is_empty() {
        return not_tree("no vertices");
    }
    if arcs.len() + 1 != vertices.len() {
        return not_tree("arc count must be vertex count minus one");
    }
    let pos: HashMap<EntityId, usize> = vertices.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut adj = vec![Vec::new(); vertices.len()];
    for &a in arcs {
        if a as usize >= g.arc_count() {
            return not_tree("unknown arc");
        }
        let arc = g.arc(a);
        let (Some(&t), Some(&h)) = (pos.get(&arc.tail), pos.get(&arc.head)) else {
            return not_tree("arc endpoint outside vertex set");
        };
        if t == h {
            return not_tree("self-loop");
        }
        adj[t].push(h);
        adj[h].push(t);
    }
    let bfs = |src: usize| {
        let mut dist = vec![u32::MAX; adj.len()];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        let mut far = (src, 0);
        while let Some(x) = queue.pop_front() {
            if dist[x] > far.1 {
                far = (x, dist[x]);
            }
            for &y in &adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        (far, dist.iter().all(|&d| d != u32::MAX))
    };
    let ((far, _), connected) = bfs(0);
    if !connected {
        return not_tree("disconnected");
    }
    let ((_, diameter), _) = bfs(far);
    Ok(diameter)
}

/// Diameter of a materialized association, recomputed from its arcs.
pub fn sa_diameter(g: &EntityGraph, sa: &SemanticAssociation) -> Result<u32> {
    tree_diameter(g, &sa.vertices, &sa.arcs)
}

/// Builds a witness association from a verified certificate.
///
/// Every member is joined to the center along a shortest path; for odd bounds
/// with a companion, paths are grown toward the center/companion pair joined
/// by their smallest-index arc. At each step the path moves to the
/// closer entity reachable through the smallest-index arc, so the merged
/// paths always form a tree. Leaves that are not members are pruned.
pub fn materialize_sa<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    subquery: &[EntityId],
    cert: &Certificate,
    dist: &O,
) -> Result<SemanticAssociation> {
    if subquery.is_empty() {
        return Err(Error::Argument("empty sub-query".into()));
    }
    if !verify_certificate(g, d, subquery, cert, dist) {
        return Err(Error::Argument("certificate does not verify for the sub-query".into()));
    }
    let radius = half_diameter(d);

    let mut roots = vec![cert.center];
    let mut root_arc = None;
    if let (1, Some(c2)) = (d % 2, cert.companion) {
        roots.push(c2);
        root_arc = g.first_arc_between(cert.center, c2);
        if root_arc.is_none() {
            return Err(Error::Internal("companion is not adjacent to center".into()));
        }
    }

    // depths from the root set, bounded by the radius
    let mut depth: HashMap<EntityId, u32> = roots.iter().map(|&r| (r, 0)).collect();
    let mut queue: VecDeque<EntityId> = roots.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        let dx = depth[&x];
        if dx == radius {
            continue;
        }
        for &y in g.neighbors(x) {
            if let std::collections::hash_map::Entry::Vacant(slot) = depth.entry(y) {
                slot.insert(dx + 1);
                queue.push_back(y);
            }
        }
    }

    let mut vertices: BTreeSet<EntityId> = BTreeSet::new();
    let mut arcs: BTreeSet<ArcIndex> = BTreeSet::new();
    if let Some(a) = root_arc {
        vertices.extend(roots.iter().copied());
        arcs.insert(a);
    }
    for &qe in subquery {
        let mut v = qe;
        let Some(&dv) = depth.get(&v) else {
            return Err(Error::Internal(format!("{} unreachable from the certificate", g.name(qe))));
        };
        let mut dv = dv;
        vertices.insert(v);
        while dv > 0 {
            let (parent, arc) = g
                .incident(v)
                .iter()
                .filter(|(nb, _)| depth.get(nb) == Some(&(dv - 1)))
                .min_by_key(|&&(_, a)| a)
                .copied()
                .ok_or_else(|| Error::Internal("broken shortest-path layering".into()))?;
            arcs.insert(arc);
            vertices.insert(parent);
            v = parent;
            dv -= 1;
        }
    }

    let (vertices, arcs) = prune_leaves(g, vertices, arcs, subquery);
    let sa = SemanticAssociation::from_parts(g, vertices, arcs)
        .map_err(|e| Error::Internal(format!("materialized subgraph is not a tree: {e}")))?;
    sa.validate(g, subquery, d)?;
    Ok(sa)
}

/// Repeatedly removes leaves that are not in `keep`.
pub(crate) fn prune_leaves(
    g: &EntityGraph,
    mut vertices: BTreeSet<EntityId>,
    mut arcs: BTreeSet<ArcIndex>,
    keep: &[EntityId],
) -> (BTreeSet<EntityId>, BTreeSet<ArcIndex>) {
    let mut incident: HashMap<EntityId, Vec<ArcIndex>> = HashMap::new();
    for &a in &arcs {
        let arc = g.arc(a);
        incident.entry(arc.tail).or_default().push(a);
        incident.entry(arc.head).or_default().push(a);
    }
    let mut stack: Vec<EntityId> =
        incident.iter().filter(|(e, list)| list.len() == 1 && !keep.contains(e)).map(|(&e, _)| e).collect();
    while let Some(leaf) = stack.pop() {
        let Some(&[a]) = incident.get(&leaf).map(Vec::as_slice) else {
            continue;
        };
        let Some(other) = g.arc(a).other(leaf) else { continue };
        arcs.remove(&a);
        vertices.remove(&leaf);
        incident.remove(&leaf);
        if let Some(list) = incident.get_mut(&other) {
            list.retain(|&x| x != a);
            if list.len() == 1 && !keep.contains(&other) {
                stack.push(other);
            }
        }
    }
    (vertices, arcs)
}
