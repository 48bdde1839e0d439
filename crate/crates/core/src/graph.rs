//! Entity-relation graphs.
//!
//! Storage keeps the directed, labeled multigraph exactly as loaded so that
//! semantic associations can be reported with their original arcs. Every
//! algorithm in this crate only looks at the undirected simple view exposed by
//! [`EntityGraph::neighbors`]: arc direction and parallel arcs never matter for
//! distances.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Dense entity index. Indices are assigned in first-appearance order and are
/// stable for the lifetime of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Index of an arc. Arc indices follow input order, which is the fixed arc
/// order used whenever a deterministic choice between arcs is needed.
pub type ArcIndex = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledArc {
    pub tail: EntityId,
    pub head: EntityId,
    pub label: u32,
}

impl LabeledArc {
    /// The endpoint opposite to `e`, if `e` is an endpoint.
    pub fn other(&self, e: EntityId) -> Option<EntityId> {
        if self.tail == e {
            Some(self.head)
        } else if self.head == e {
            Some(self.tail)
        } else {
            None
        }
    }
}

/// Counters collected while reading a graph file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub lines_read: usize,
    pub triples_read: usize,
    pub skipped_literal: usize,
    pub skipped_type: usize,
    pub skipped_blank_node: usize,
}

impl LoadStats {
    pub fn skipped(&self) -> usize {
        self.skipped_literal + self.skipped_type + self.skipped_blank_node
    }
}

/// Immutable entity-relation graph.
#[derive(Debug, Clone)]
pub struct EntityGraph {
    names: Vec<String>,
    name_index: HashMap<String, EntityId>,
    labels: Vec<String>,
    arcs: Vec<LabeledArc>,
    degrees: Vec<u32>,
    // incident (neighbor, arc) pairs, self-loops excluded, sorted per entity
    incident_offsets: Vec<usize>,
    incident: Vec<(EntityId, ArcIndex)>,
    // deduplicated neighbor sets
    neighbor_offsets: Vec<usize>,
    neighbor_list: Vec<EntityId>,
    load_stats: LoadStats,
}

/// Incrementally assembles an [`EntityGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    names: Vec<String>,
    name_index: HashMap<String, EntityId>,
    labels: Vec<String>,
    label_index: HashMap<String, u32>,
    arcs: Vec<LabeledArc>,
    stats: LoadStats,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns an entity, returning its existing index if already present.
    pub fn entity(&mut self, name: &str) -> EntityId {
        if let Some(&id) = self.name_index.get(name) {
            return id;
        }
        let id = EntityId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.name_index.insert(name.to_owned(), id);
        id
    }

    fn label(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.label_index.get(name) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(name.to_owned());
        self.label_index.insert(name.to_owned(), id);
        id
    }

    pub fn add_arc(&mut self, tail: &str, label: &str, head: &str) -> ArcIndex {
        let tail = self.entity(tail);
        let head = self.entity(head);
        let label = self.label(label);
        self.arcs.push(LabeledArc { tail, head, label });
        (self.arcs.len() - 1) as ArcIndex
    }

    pub fn build(self) -> Result<EntityGraph> {
        if self.arcs.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(self.build_unchecked())
    }

    /// Builds the graph even when it has no arcs (e.g. only isolated entities).
    pub fn build_unchecked(self) -> EntityGraph {
        let n = self.names.len();
        let mut degrees = vec![0u32; n];
        let mut incident_lists: Vec<Vec<(EntityId, ArcIndex)>> = vec![Vec::new(); n];
        for (i, arc) in self.arcs.iter().enumerate() {
            degrees[arc.tail.index()] += 1;
            degrees[arc.head.index()] += 1;
            if arc.tail != arc.head {
                incident_lists[arc.tail.index()].push((arc.head, i as ArcIndex));
                incident_lists[arc.head.index()].push((arc.tail, i as ArcIndex));
            }
        }

        let mut incident_offsets = Vec::with_capacity(n + 1);
        let mut incident = Vec::with_capacity(self.arcs.len() * 2);
        let mut neighbor_offsets = Vec::with_capacity(n + 1);
        let mut neighbor_list = Vec::new();
        incident_offsets.push(0);
        neighbor_offsets.push(0);
        for mut list in incident_lists {
            list.sort_unstable();
            let mut last = None;
            for &(nb, _) in &list {
                if last != Some(nb) {
                    neighbor_list.push(nb);
                    last = Some(nb);
                }
            }
            incident.extend(list);
            incident_offsets.push(incident.len());
            neighbor_offsets.push(neighbor_list.len());
        }

        EntityGraph {
            names: self.names,
            name_index: self.name_index,
            labels: self.labels,
            arcs: self.arcs,
            degrees,
            incident_offsets,
            incident,
            neighbor_offsets,
            neighbor_list,
            load_stats: self.stats,
        }
    }
}

/// Input formats understood by [`load_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    NTriples,
    Tsv,
}

impl GraphFormat {
    /// `.nt` files are N-Triples, everything else is a TSV edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("nt") => GraphFormat::NTriples,
            _ => GraphFormat::Tsv,
        }
    }
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nt" | "ntriples" => Ok(GraphFormat::NTriples),
            "tsv" => Ok(GraphFormat::Tsv),
            other => Err(Error::Argument(format!("unknown graph format {other:?}"))),
        }
    }
}

pub fn load_graph(path: &Path, format: Option<GraphFormat>) -> Result<EntityGraph> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    match format.unwrap_or_else(|| GraphFormat::from_path(path)) {
        GraphFormat::NTriples => load_ntriples(file),
        GraphFormat::Tsv => load_edge_list(file),
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Term<'a> {
    Iri(&'a str),
    Blank(&'a str),
    Literal,
}

struct TermReader<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> TermReader<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.line[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<u8> {
        self.line.as_bytes().get(self.pos).copied()
    }

    fn term(&mut self) -> std::result::Result<Term<'a>, String> {
        self.skip_ws();
        match self.peek() {
            Some(b'<') => {
                let start = self.pos + 1;
                let len = self.line[start..].find('>').ok_or_else(|| "unterminated IRI".to_string())?;
                self.pos = start + len + 1;
                Ok(Term::Iri(&self.line[start..start + len]))
            }
            Some(b'_') => {
                if !self.line[self.pos..].starts_with("_:") {
                    return Err("malformed blank node".into());
                }
                let start = self.pos;
                let len = self.line[start..].find(char::is_whitespace).unwrap_or(self.line.len() - start);
                self.pos = start + len;
                Ok(Term::Blank(&self.line[start..start + len]))
            }
            Some(b'"') => {
                let bytes = self.line.as_bytes();
                let mut i = self.pos + 1;
                loop {
                    match bytes.get(i) {
                        None => return Err("unterminated literal".into()),
                        Some(b'\\') => i += 2,
                        Some(b'"') => break,
                        Some(_) => i += 1,
                    }
                }
                self.pos = i + 1;
                match self.peek() {
                    Some(b'@') => {
                        let rest = &self.line[self.pos..];
                        let len = rest.find(|c: char| c.is_whitespace() || c == '.').unwrap_or(rest.len());
                        if len <= 1 {
                            return Err("empty language tag".into());
                        }
                        self.pos += len;
                    }
                    Some(b'^') => {
                        if !self.line[self.pos..].starts_with("^^<") {
                            return Err("malformed datatype".into());
                        }
                        self.pos += 2;
                        self.term()?;
                    }
                    _ => {}
                }
                Ok(Term::Literal)
            }
            Some(_) => Err(format!("unexpected character at column {}", self.pos + 1)),
            None => Err("expected 3 terms followed by '.'".into()),
        }
    }

    fn finish(&mut self) -> std::result::Result<(), String> {
        self.skip_ws();
        if self.peek() != Some(b'.') {
            return Err("expected '.' after object".into());
        }
        self.pos += 1;
        self.skip_ws();
        match self.peek() {
            None | Some(b'#') => Ok(()),
            Some(_) => Err("trailing content after '.'".into()),
        }
    }
}

/// Reads the N-Triples subset used for entity-relation graphs.
///
/// One arc is created per triple whose subject and object are both IRIs and
/// whose predicate is not `rdf:type`. Literal-object, `rdf:type`, and
/// blank-node triples are skipped and counted in [`LoadStats`].
pub fn load_ntriples<R: BufRead>(source: R) -> Result<EntityGraph> {
    let mut builder = GraphBuilder::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        builder.stats.lines_read += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut reader = TermReader { line: trimmed, pos: 0 };
        let parse_err = |message: String| Error::Parse { line: lineno, message };
        let subject = reader.term().map_err(parse_err)?;
        let predicate = reader.term().map_err(parse_err)?;
        let object = reader.term().map_err(parse_err)?;
        reader.finish().map_err(parse_err)?;

        let predicate = match predicate {
            Term::Iri(p) => p,
            _ => return Err(parse_err("predicate must be an IRI".into())),
        };
        if subject == Term::Literal {
            return Err(parse_err("subject cannot be a literal".into()));
        }
        builder.stats.triples_read += 1;

        if predicate == RDF_TYPE {
            builder.stats.skipped_type += 1;
            continue;
        }
        match (subject, object) {
            (_, Term::Literal) => builder.stats.skipped_literal += 1,
            (Term::Iri(s), Term::Iri(o)) => {
                builder.add_arc(s, predicate, o);
            }
            _ => builder.stats.skipped_blank_node += 1,
        }
    }
    builder.build()
}

/// Reads a tab-separated edge list with lines `tail<TAB>label<TAB>head`.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<EntityGraph> {
    let mut builder = GraphBuilder::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        builder.stats.lines_read += 1;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 || cols.iter().any(|c| c.trim().is_empty()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 3 tab-separated columns, found {}", cols.len()),
            });
        }
        builder.stats.triples_read += 1;
        builder.add_arc(strip_brackets(cols[0].trim()), strip_brackets(cols[1].trim()), strip_brackets(cols[2].trim()));
    }
    builder.build()
}

fn strip_brackets(s: &str) -> &str {
    s.strip_prefix('<').and_then(|s| s.strip_suffix('>')).unwrap_or(s)
}

impl EntityGraph {
    pub fn entity_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn entities(&self) -> impl ExactSizeIterator<Item = EntityId> {
        (0..self.names.len() as u32).map(EntityId)
    }

    pub fn contains(&self, e: EntityId) -> bool {
        e.index() < self.names.len()
    }

    pub fn check(&self, e: EntityId) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::InvalidEntity(e.index()))
        }
    }

    pub fn name(&self, e: EntityId) -> &str {
        &self.names[e.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<EntityId> {
        self.name_index.get(strip_brackets(name)).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<EntityId> {
        self.lookup(name).ok_or_else(|| Error::UnknownEntity(name.to_owned()))
    }

    pub fn arcs(&self) -> &[LabeledArc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcIndex) -> &LabeledArc {
        &self.arcs[a as usize]
    }

    pub fn label_name(&self, label: u32) -> &str {
        &self.labels[label as usize]
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn load_stats(&self) -> &LoadStats {
        &self.load_stats
    }

    /// Deduplicated undirected neighbors of `e`, ascending by index.
    #[inline]
    pub fn neighbors(&self, e: EntityId) -> &[EntityId] {
        let i = e.index();
        &self.neighbor_list[self.neighbor_offsets[i]..self.neighbor_offsets[i + 1]]
    }

    pub fn try_neighbors(&self, e: EntityId) -> Result<&[EntityId]> {
        self.check(e)?;
        Ok(self.neighbors(e))
    }

    /// `(neighbor, arc)` pairs incident to `e`, one per non-loop arc, sorted by
    /// neighbor then arc index.
    pub fn incident(&self, e: EntityId) -> &[(EntityId, ArcIndex)] {
        let i = e.index();
        &self.incident[self.incident_offsets[i]..self.incident_offsets[i + 1]]
    }

    /// Smallest-index arc joining `u` and `v`, if they are adjacent.
    pub fn first_arc_between(&self, u: EntityId, v: EntityId) -> Option<ArcIndex> {
        let list = self.incident(u);
        let start = list.partition_point(|&(nb, _)| nb < v);
        list.get(start).filter(|(nb, _)| *nb == v).map(|&(_, a)| a)
    }

    /// Number of arcs incident from or to `e`; a self-loop counts twice.
    #[inline]
    pub fn degree(&self, e: EntityId) -> u32 {
        self.degrees[e.index()]
    }

    pub fn try_degree(&self, e: EntityId) -> Result<u32> {
        self.check(e)?;
        Ok(self.degree(e))
    }

    /// SHA-256 over entity names and arcs. Used to tie a persisted
    /// distance index to the graph it was built from.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update((self.names.len() as u64).to_le_bytes());
        for name in &self.names {
            hasher.update((name.len() as u64).to_le_bytes());
            hasher.update(name.as_bytes());
        }
        hasher.update((self.arcs.len() as u64).to_le_bytes());
        for arc in &self.arcs {
            hasher.update(arc.tail.0.to_le_bytes());
            hasher.update(arc.head.0.to_le_bytes());
            let label = &self.labels[arc.label as usize];
            hasher.update((label.len() as u64).to_le_bytes());
            hasher.update(label.as_bytes());
        }
        hasher.finalize().into()
    }

    pub fn stats(&self) -> GraphStats {
        let mut distribution = BTreeMap::new();
        for &d in &self.degrees {
            *distribution.entry(d).or_insert(0usize) += 1;
        }
        GraphStats {
            entities: self.entity_count(),
            arcs: self.arc_count(),
            relation_labels: self.labels.len(),
            max_degree: self.degrees.iter().copied().max().unwrap_or(0),
            mean_degree: if self.names.is_empty() {
                0.0
            } else {
                2.0 * self.arcs.len() as f64 / self.names.len() as f64
            },
            degree_distribution: distribution,
            load: self.load_stats,
        }
    }
}

/// Summary written by `load-stats`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphStats {
    pub entities: usize,
    pub arcs: usize,
    pub relation_labels: usize,
    pub max_degree: u32,
    pub mean_degree: f64,
    /// degree → number of entities with that degree
    pub degree_distribution: BTreeMap<u32, usize>,
    pub load: LoadStats,
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
