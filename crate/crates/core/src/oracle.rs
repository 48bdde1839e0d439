//! Ground truth by exhaustive search, and the enumeration baseline.
//!
//! [`brute_success`] decides success directly from the definition of a
//! semantic association: it enumerates subtrees of the graph rooted at one
//! query entity and succeeds when one of them contains every query entity
//! with diameter at most `D`. Pruning non-query leaves from such a subtree
//! never increases its diameter, so this is the same as asking for a tree
//! whose leaves are all query entities. Nothing here relies on certificates.
//!
//! Pruning is sound because tree distances are never shorter than graph
//! distances: a vertex farther than `D` hops from some query entity can never
//! be in a successful tree, and a partial tree whose diameter already exceeds
//! `D` cannot recover.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use itertools::Itertools;

use crate::association::{prune_leaves, SemanticAssociation};
use crate::certificate::best_certified;
use crate::distance::{bfs_distances_from, CountingOracle, Distance, DistanceOracle};
use crate::error::{Error, Result};
use crate::graph::{EntityGraph, EntityId};
use crate::query::{check_diameter, Query};
use crate::relax::{RelaxOptions, RelaxationOutcome};

/// Bounds for the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceConfig {
    /// Most non-query vertices a candidate tree may hold. `None` uses
    /// `D·(|Q|−1) + 1 − |Q|`, which no successful tree can exceed.
    pub max_extra: Option<usize>,
    /// Search nodes explored before giving up as inconclusive.
    pub step_cap: u64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig { max_extra: None, step_cap: 50_000_000 }
    }
}

impl BruteForceConfig {
    fn extra_limit(&self, g: &EntityGraph, d: u32, members: usize) -> usize {
        let safe = (d as usize * (members.saturating_sub(1)) + 1).saturating_sub(members);
        let free = g.entity_count().saturating_sub(members);
        self.max_extra.unwrap_or(safe).min(free)
    }
}

#[derive(Debug)]
enum Abort {
    Cap(u64),
    Deadline,
}

struct SubtreeSearch<'a> {
    g: &'a EntityGraph,
    d: u32,
    members: &'a [EntityId],
    // hops from each member, indexed [member][entity] when precomputed
    to_member: &'a dyn Fn(EntityId, usize) -> Distance,
    max_extra: usize,
    step_cap: u64,
    deadline: Option<Instant>,
    steps: u64,

    position: Vec<u32>,
    tree: Vec<EntityId>,
    tree_dist: Vec<Vec<u32>>,
    tree_edges: Vec<(EntityId, EntityId)>,
    frontier: Vec<(EntityId, EntityId)>,
    members_in: usize,
    extra_in: usize,
}

const OUT: u32 = u32::MAX;

impl SubtreeSearch<'_> {
    fn is_member(&self, e: EntityId) -> bool {
        self.members.contains(&e)
    }

    fn admissible(&self, parent: Option<EntityId>, w: EntityId) -> bool {
        if !self.is_member(w) && self.extra_in >= self.max_extra {
            return false;
        }
        if !(0..self.members.len()).all(|i| (self.to_member)(w, i).within(self.d)) {
            return false;
        }
        match parent {
            None => true,
            Some(u) => {
                let row = &self.tree_dist[self.position[u.index()] as usize];
                row.iter().all(|&h| h < self.d)
            }
        }
    }

    fn add(&mut self, parent: Option<EntityId>, w: EntityId) {
        let mut row: Vec<u32> = match parent {
            Some(u) => self.tree_dist[self.position[u.index()] as usize].iter().map(|h| h + 1).collect(),
            None => Vec::new(),
        };
        row.push(0);
        for (i, r) in self.tree_dist.iter_mut().enumerate() {
            r.push(row[i]);
        }
        self.position[w.index()] = self.tree.len() as u32;
        self.tree.push(w);
        self.tree_dist.push(row);
        if let Some(u) = parent {
            self.tree_edges.push((u, w));
        }
        if self.is_member(w) {
            self.members_in += 1;
        } else {
            self.extra_in += 1;
        }
        for &x in self.g.neighbors(w) {
            if self.position[x.index()] == OUT {
                self.frontier.push((w, x));
            }
        }
    }

    fn remove(&mut self, w: EntityId, frontier_len: usize) {
        self.frontier.truncate(frontier_len);
        self.tree.pop();
        self.tree_dist.pop();
        for r in &mut self.tree_dist {
            r.pop();
        }
        self.tree_edges.pop();
        self.position[w.index()] = OUT;
        if self.is_member(w) {
            self.members_in -= 1;
        } else {
            self.extra_in -= 1;
        }
    }

    fn grow(&mut self) -> std::result::Result<bool, Abort> {
        self.steps += 1;
        if self.steps > self.step_cap {
            return Err(Abort::Cap(self.steps));
        }
        if self.steps % 1024 == 1 && self.deadline.is_some_and(|t| Instant::now() >= t) {
            return Err(Abort::Deadline);
        }
        if self.members_in == self.members.len() {
            return Ok(true);
        }
        let mut popped = Vec::new();
        let mut found = false;
        while let Some((u, w)) = self.frontier.pop() {
            popped.push((u, w));
            if self.position[w.index()] != OUT || !self.admissible(Some(u), w) {
                continue;
            }
            let mark = self.frontier.len();
            self.add(Some(u), w);
            let result = self.grow()?;
            if result {
                found = true;
                break;
            }
            self.remove(w, mark);
        }
        if !found {
            while let Some(e) = popped.pop() {
                self.frontier.push(e);
            }
        }
        Ok(found)
    }
}

type FoundTree = (Vec<EntityId>, Vec<(EntityId, EntityId)>);

fn search_tree(
    g: &EntityGraph,
    d: u32,
    members: &[EntityId],
    to_member: &dyn Fn(EntityId, usize) -> Distance,
    cfg: &BruteForceConfig,
    deadline: Option<Instant>,
) -> std::result::Result<Option<FoundTree>, Abort> {
    let mut search = SubtreeSearch {
        g,
        d,
        members,
        to_member,
        max_extra: cfg.extra_limit(g, d, members.len()),
        step_cap: cfg.step_cap,
        deadline,
        steps: 0,
        position: vec![OUT; g.entity_count()],
        tree: Vec::new(),
        tree_dist: Vec::new(),
        tree_edges: Vec::new(),
        frontier: Vec::new(),
        members_in: 0,
        extra_in: 0,
    };
    let root = members[0];
    if !search.admissible(None, root) {
        return Ok(None);
    }
    search.add(None, root);
    let found = search.grow()?;
    Ok(found.then(|| (search.tree.clone(), search.tree_edges.clone())))
}

fn validate_members(g: &EntityGraph, d: u32, members: &[EntityId]) -> Result<Vec<EntityId>> {
    check_diameter(d)?;
    for &e in members {
        g.check(e)?;
    }
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::Argument("no query entities".into()));
    }
    Ok(members)
}

fn member_rows(g: &EntityGraph, members: &[EntityId]) -> Result<Vec<Vec<Distance>>> {
    members.iter().map(|&m| bfs_distances_from(g, m)).collect()
}

fn to_association(
    g: &EntityGraph,
    members: &[EntityId],
    vertices: Vec<EntityId>,
    edges: Vec<(EntityId, EntityId)>,
) -> Result<SemanticAssociation> {
    let mut arcs = BTreeSet::new();
    for (u, w) in edges {
        let arc = g.first_arc_between(u, w).ok_or_else(|| Error::Internal("tree edge without an arc".into()))?;
        arcs.insert(arc);
    }
    let (vertices, arcs) = prune_leaves(g, vertices.into_iter().collect(), arcs, members);
    SemanticAssociation::from_parts(g, vertices, arcs)
}

/// Whether `members` is successful under bound `d`, decided by exhaustive
/// subtree enumeration.
pub fn brute_success(g: &EntityGraph, d: u32, members: &[EntityId], cfg: &BruteForceConfig) -> Result<bool> {
    Ok(brute_witness(g, d, members, cfg)?.is_some())
}

/// Like [`brute_success`] but returns the association found.
pub fn brute_witness(
    g: &EntityGraph,
    d: u32,
    members: &[EntityId],
    cfg: &BruteForceConfig,
) -> Result<Option<SemanticAssociation>> {
    let members = validate_members(g, d, members)?;
    let rows = member_rows(g, &members)?;
    let lookup = |e: EntityId, i: usize| rows[i][e.index()];
    match search_tree(g, d, &members, &lookup, cfg, None) {
        Ok(Some((v, e))) => Ok(Some(to_association(g, &members, v, e)?)),
        Ok(_) => Ok(None),
        Err(Abort::Cap(steps)) => Err(Error::Inconclusive { steps }),
        Err(Abort::Deadline) => unreachable!("no deadline set"),
    }
}

struct Enumeration {
    found: Option<(Vec<EntityId>, SemanticAssociation)>,
    checked: u64,
    timed_out: bool,
}

// sub-queries by non-increasing size, lexicographic by index within a size
fn enumerate_subqueries(
    g: &EntityGraph,
    d: u32,
    query: &[EntityId],
    to_entity: &dyn Fn(EntityId, EntityId) -> Distance,
    cfg: &BruteForceConfig,
    deadline: Option<Instant>,
) -> Result<Enumeration> {
    let mut checked = 0;
    for size in (2..=query.len()).rev() {
        for members in query.iter().copied().combinations(size) {
            checked += 1;
            let lookup = |e: EntityId, i: usize| to_entity(e, members[i]);
            match search_tree(g, d, &members, &lookup, cfg, deadline) {
                Ok(Some((v, e))) => {
                    let sa = to_association(g, &members, v, e)?;
                    return Ok(Enumeration { found: Some((members, sa)), checked, timed_out: false });
                }
                Ok(_) => {}
                Err(Abort::Cap(steps)) => return Err(Error::Inconclusive { steps }),
                Err(Abort::Deadline) => {
                    return Ok(Enumeration { found: None, checked, timed_out: true });
                }
            }
        }
    }
    Ok(Enumeration { found: None, checked, timed_out: false })
}

/// A maximum successful sub-query found by checking every sub-query with
/// [`brute_success`], largest first. Empty when none succeeds.
pub fn brute_relax(g: &EntityGraph, d: u32, query: &Query, cfg: &BruteForceConfig) -> Result<Vec<EntityId>> {
    check_diameter(d)?;
    let q = query.entities();
    let rows = member_rows(g, q)?;
    let to_entity = |e: EntityId, m: EntityId| {
        let i = q.binary_search(&m).expect("member of query");
        rows[i][e.index()]
    };
    let result = enumerate_subqueries(g, d, q, &to_entity, cfg, None)?;
    Ok(result.found.map(|(members, _)| members).unwrap_or_default())
}

/// [`brute_relax`] packaged as a relaxation outcome, with the oracle's tree as
/// witness and a certificate read off that tree.
pub fn brute_relax_outcome(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    cfg: &BruteForceConfig,
    opts: &RelaxOptions,
) -> Result<RelaxationOutcome> {
    check_diameter(d)?;
    let started = Instant::now();
    let q = query.entities();
    let rows = member_rows(g, q)?;
    let to_entity = |e: EntityId, m: EntityId| {
        let i = q.binary_search(&m).expect("member of query");
        rows[i][e.index()]
    };
    let result = enumerate_subqueries(g, d, q, &to_entity, cfg, opts.deadline)?;
    let oracle = crate::distance::BfsOracle::new(g);
    finish_outcome(g, d, q, result, &oracle, opts, started)
}

/// Enumeration baseline: checks sub-queries from largest to smallest, each by
/// exhaustive search, and returns the first success. Stops with
/// `terminated_early` and an empty result once `timeout` elapses.
pub fn bsl<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    query: &Query,
    dist: &O,
    timeout: Duration,
    opts: &RelaxOptions,
) -> Result<RelaxationOutcome> {
    check_diameter(d)?;
    let started = Instant::now();
    let deadline = started.checked_add(timeout);
    let deadline = match (deadline, opts.deadline) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let counted = CountingOracle::new(dist);
    let to_entity = |e: EntityId, m: EntityId| counted.distance(e, m);
    let cfg = BruteForceConfig { max_extra: None, step_cap: u64::MAX };
    let result = enumerate_subqueries(g, d, query.entities(), &to_entity, &cfg, deadline)?;
    let mut outcome = finish_outcome(g, d, query.entities(), result, &counted, opts, started)?;
    outcome.stats.distance_calls = counted.calls();
    Ok(outcome)
}

fn finish_outcome<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    d: u32,
    q: &[EntityId],
    result: Enumeration,
    dist: &O,
    opts: &RelaxOptions,
    started: Instant,
) -> Result<RelaxationOutcome> {
    let mut outcome = RelaxationOutcome::empty(q);
    outcome.stats.candidates_checked = result.checked;
    outcome.stats.terminated_early = result.timed_out;
    if let Some((members, sa)) = result.found {
        // some vertex of any association certifies its members
        let certificate = sa
            .vertices
            .iter()
            .find_map(|&c| best_certified(g, d, &members, c, members.len() - 1, dist))
            .filter(|c| c.entities == members)
            .map(|c| c.certificate)
            .ok_or_else(|| Error::Internal("association without a certificate".into()))?;
        outcome.q_max = members;
        outcome.certificate = Some(certificate);
        outcome.stats.entities_visited = sa.vertices.len() as u64;
        if opts.witness {
            outcome.witness = Some(sa);
        }
    }
    outcome.stats.wall_time = started.elapsed();
    Ok(outcome)
}
