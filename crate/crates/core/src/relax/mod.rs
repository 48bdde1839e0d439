//! Query relaxation: find a maximum successful sub-query.
//!
//! [`certqr`] visits every entity within `⌈D/2⌉` hops of some query entity in
//! breadth-first order and asks each whether it certifies a larger sub-query.
//! [`certqr_plus`] runs one best-first search per query entity over a shared
//! priority queue and stops as soon as no queued entity can lead to a larger
//! sub-query than the best found.

mod best_first;
mod breadth;
mod priority;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::association::{SemanticAssociation, SemanticAssociationJson};
use crate::certificate::Certificate;
use crate::graph::{EntityGraph, EntityId};

pub use best_first::{certqr_plus, certqr_plus_with, is_successful};
pub use breadth::{certqr, certqr_with};
pub use priority::{est, priority, Priority, PriorityMode};

/// Per-run knobs shared by all relaxation algorithms.
#[derive(Debug, Clone, Default)]
pub struct RelaxOptions {
    /// Materialize a witness association for the result.
    pub witness: bool,
    /// Record every frontier element inserted by the best-first search.
    pub trace: bool,
    /// Stop with `terminated_early` set once this instant passes.
    pub deadline: Option<Instant>,
}

impl RelaxOptions {
    pub fn with_witness() -> Self {
        RelaxOptions { witness: true, ..Default::default() }
    }

    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Operation counts and timing for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub entities_visited: u64,
    pub opt_with_cert_calls: u64,
    pub priority_computations: u64,
    pub distance_calls: u64,
    pub queue_operations: u64,
    /// Candidate sub-queries checked by enumeration baselines.
    pub candidates_checked: u64,
    #[serde(with = "secs")]
    pub wall_time: Duration,
    pub terminated_early: bool,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

/// One `⟨entity, start query entity, priority⟩` triple of the best-first
/// frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierElement {
    pub entity: EntityId,
    pub start: EntityId,
    pub priority: Priority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Success,
    Relaxed,
    NoSolution,
}

/// Result of a relaxation run.
#[derive(Debug, Clone)]
pub struct RelaxationOutcome {
    pub query: Vec<EntityId>,
    /// Empty, or at least two entities, sorted by index.
    pub q_max: Vec<EntityId>,
    pub certificate: Option<Certificate>,
    pub witness: Option<SemanticAssociation>,
    pub stats: RunStats,
    pub trace: Vec<FrontierElement>,
}

impl RelaxationOutcome {
    pub(crate) fn empty(query: &[EntityId]) -> Self {
        RelaxationOutcome {
            query: query.to_vec(),
            q_max: Vec::new(),
            certificate: None,
            witness: None,
            stats: RunStats::default(),
            trace: Vec::new(),
        }
    }

    pub fn status(&self) -> OutcomeStatus {
        if self.q_max.is_empty() {
            OutcomeStatus::NoSolution
        } else if self.q_max.len() == self.query.len() {
            OutcomeStatus::Success
        } else {
            OutcomeStatus::Relaxed
        }
    }

    /// Query entities dropped by the relaxation.
    pub fn removed(&self) -> Vec<EntityId> {
        self.query.iter().copied().filter(|e| self.q_max.binary_search(e).is_err()).collect()
    }

    pub fn to_json(&self, g: &EntityGraph) -> OutcomeJson {
        let names = |v: &[EntityId]| v.iter().map(|&e| g.name(e).to_owned()).collect();
        OutcomeJson {
            status: self.status(),
            q_max: names(&self.q_max),
            removed: names(&self.removed()),
            certificate: self.certificate.map(|c| CertificateJson {
                center: g.name(c.center).to_owned(),
                companion: c.companion.map(|e| g.name(e).to_owned()),
            }),
            witness: self.witness.as_ref().map(|w| w.to_json(g)),
            stats: self.stats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub center: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub companion: Option<String>,
}

/// Wire form of a [`RelaxationOutcome`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub status: OutcomeStatus,
    pub q_max: Vec<String>,
    pub removed: Vec<String>,
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<SemanticAssociationJson>,
    pub stats: RunStats,
}
