//! Pruned landmark labeling.
//!
//! Every entity stores `(landmark, hops)` pairs such that for any two connected
//! entities some common landmark lies on a shortest path between them. Labels
//! are built by pruned breadth-first searches rooted at entities in descending
//! degree order (ties by ascending index); a search stops expanding at an
//! entity whose distance is already answered by the labels built so far.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use log::debug;
use serde::{Deserialize, Serialize};

use super::{Distance, DistanceOracle};
use crate::error::{Error, Result};
use crate::graph::{hex, EntityGraph, EntityId};

pub const INDEX_MAGIC: &[u8; 4] = b"QRIX";
pub const INDEX_FORMAT_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IndexBuildStats {
    pub label_entries: u64,
    pub build_time: Duration,
}

/// Exact distance index over one [`EntityGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceIndex {
    graph_hash: [u8; 32],
    offsets: Vec<usize>,
    // (landmark, hops), sorted by landmark within each entity
    entries: Vec<(EntityId, u32)>,
    stats: IndexBuildStats,
}

impl DistanceIndex {
    pub fn build(g: &EntityGraph) -> DistanceIndex {
        let start = Instant::now();
        let n = g.entity_count();

        let mut order: Vec<EntityId> = g.entities().collect();
        order.sort_by_key(|&e| (std::cmp::Reverse(g.degree(e)), e));

        // labels keyed by landmark rank while building, so each list stays
        // sorted by rank as roots are processed in order
        let mut labels: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut root_label = vec![u32::MAX; n];
        let mut dist = vec![u32::MAX; n];
        let mut touched = Vec::new();
        let mut queue = VecDeque::new();

        for (rank, &root) in order.iter().enumerate() {
            let rank = rank as u32;
            for &(l, d) in &labels[root.index()] {
                root_label[l as usize] = d;
            }

            dist[root.index()] = 0;
            touched.push(root);
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                let du = dist[u.index()];
                let covered = labels[u.index()].iter().any(|&(l, d)| {
                    let r = root_label[l as usize];
                    r != u32::MAX && r + d <= du
                });
                if covered {
                    continue;
                }
                labels[u.index()].push((rank, du));
                for &w in g.neighbors(u) {
                    if dist[w.index()] == u32::MAX {
                        dist[w.index()] = du + 1;
                        touched.push(w);
                        queue.push_back(w);
                    }
                }
            }

            for e in touched.drain(..) {
                dist[e.index()] = u32::MAX;
            }
            for &(l, _) in &labels[root.index()] {
                root_label[l as usize] = u32::MAX;
            }
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut entries = Vec::with_capacity(labels.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in labels {
            let start_len = entries.len();
            entries.extend(list.into_iter().map(|(rank, d)| (order[rank as usize], d)));
            entries[start_len..].sort_unstable();
            offsets.push(entries.len());
        }

        let stats = IndexBuildStats { label_entries: entries.len() as u64, build_time: start.elapsed() };
        debug!("built landmark index: {} entities, {} label entries in {:?}", n, stats.label_entries, stats.build_time);
        DistanceIndex { graph_hash: g.content_hash(), offsets, entries, stats }
    }

    pub fn entity_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn stats(&self) -> &IndexBuildStats {
        &self.stats
    }

    pub fn graph_hash_hex(&self) -> String {
        hex(&self.graph_hash)
    }

    /// Label of `e`: `(landmark, hops)` pairs sorted by landmark.
    pub fn label(&self, e: EntityId) -> &[(EntityId, u32)] {
        &self.entries[self.offsets[e.index()]..self.offsets[e.index() + 1]]
    }

    /// Exact distance, rejecting entities outside the indexed graph.
    pub fn query(&self, u: EntityId, v: EntityId) -> Result<Distance> {
        for e in [u, v] {
            if e.index() >= self.entity_count() {
                return Err(Error::InvalidEntity(e.index()));
            }
        }
        Ok(self.query_unchecked(u, v))
    }

    #[inline]
    fn query_unchecked(&self, u: EntityId, v: EntityId) -> Distance {
        if u == v {
            return Distance::ZERO;
        }
        let (a, b) = (self.label(u), self.label(v));
        let (mut i, mut j) = (0, 0);
        let mut best = u32::MAX;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    best = best.min(a[i].1 + b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        if best == u32::MAX {
            Distance::Unreachable
        } else {
            Distance::Finite(best)
        }
    }

    /// Whether this index was built from `g`.
    pub fn matches(&self, g: &EntityGraph) -> bool {
        self.graph_hash == g.content_hash()
    }

    /// Binary layout: magic, little-endian `u16` version, 32-byte graph hash,
    /// then LEB128 varints: entity count, build time in microseconds, and per
    /// entity a label length followed by `(landmark, hops)` pairs.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(INDEX_MAGIC)?;
        w.write_all(&INDEX_FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.graph_hash)?;
        leb128::write::unsigned(&mut w, self.entity_count() as u64)?;
        leb128::write::unsigned(&mut w, self.stats.build_time.as_micros() as u64)?;
        for i in 0..self.entity_count() {
            let label = self.label(EntityId(i as u32));
            leb128::write::unsigned(&mut w, label.len() as u64)?;
            for &(l, d) in label {
                leb128::write::unsigned(&mut w, l.0 as u64)?;
                leb128::write::unsigned(&mut w, d as u64)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an index and checks it against `g`'s content hash.
    pub fn read_from<R: Read>(mut r: R, g: &EntityGraph) -> Result<DistanceIndex> {
        let format = |what: &str| Error::IndexFormat(what.to_owned());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| format("missing header"))?;
        if &magic != INDEX_MAGIC {
            return Err(format("bad magic bytes"));
        }
        let mut version = [0u8; 2];
        r.read_exact(&mut version).map_err(|_| format("missing version"))?;
        let version = u16::from_le_bytes(version);
        if version != INDEX_FORMAT_VERSION {
            return Err(Error::IndexFormat(format!("unsupported version {version}")));
        }
        let mut graph_hash = [0u8; 32];
        r.read_exact(&mut graph_hash).map_err(|_| format("missing graph hash"))?;
        let actual = g.content_hash();
        if graph_hash != actual {
            return Err(Error::StaleIndex { expected: hex(&graph_hash), actual: hex(&actual) });
        }

        let mut varint = |what: &str| -> Result<u64> {
            leb128::read::unsigned(&mut r).map_err(|e| Error::IndexFormat(format!("{what}: {e}")))
        };
        let n = varint("entity count")? as usize;
        if n != g.entity_count() {
            return Err(format("entity count differs from graph"));
        }
        let build_time = Duration::from_micros(varint("build time")?);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for _ in 0..n {
            let len = varint("label length")?;
            for _ in 0..len {
                let l = varint("landmark")?;
                let d = varint("hops")?;
                if l as usize >= n || d > u32::MAX as u64 {
                    return Err(format("label entry out of range"));
                }
                entries.push((EntityId(l as u32), d as u32));
            }
            offsets.push(entries.len());
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(format("trailing bytes"));
        }
        let stats = IndexBuildStats { label_entries: entries.len() as u64, build_time };
        Ok(DistanceIndex { graph_hash, offsets, entries, stats })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path, g: &EntityGraph) -> Result<DistanceIndex> {
        let file = std::fs::File::open(path)?;
        DistanceIndex::read_from(std::io::BufReader::new(file), g)
    }
}

impl DistanceOracle for DistanceIndex {
    #[inline]
    fn distance(&self, u: EntityId, v: EntityId) -> Distance {
        self.query_unchecked(u, v)
    }
}
