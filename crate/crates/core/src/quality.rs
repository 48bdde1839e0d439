//! Compactness metrics for failing queries.

use serde::{Deserialize, Serialize};

use crate::distance::DistanceOracle;
use crate::error::{Error, Result};
use crate::graph::EntityGraph;
use crate::query::Query;
use crate::relax::{certqr_plus, is_successful, PriorityMode};

/// `d_min`: smallest diameter bound under which the whole query succeeds
/// (`None` = not attainable up to the ceiling). `n_min`: fewest entities to
/// drop for success at the reference bound (`None` = no sub-query succeeds).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityRecord {
    pub query_id: String,
    pub reference_d: u32,
    pub d_min: Option<u32>,
    pub n_min: Option<usize>,
}

pub fn compute_quality<O: DistanceOracle + ?Sized>(
    g: &EntityGraph,
    dist: &O,
    query_id: &str,
    query: &Query,
    reference_d: u32,
    ceiling: u32,
) -> Result<QualityRecord> {
    if ceiling < reference_d {
        return Err(Error::Argument(format!("ceiling {ceiling} is below the reference bound {reference_d}")));
    }
    let mut d_min = None;
    for d in 1..=ceiling {
        if is_successful(g, d, query, dist)? {
            d_min = Some(d);
            break;
        }
    }
    let relaxed = certqr_plus(g, reference_d, query, dist, PriorityMode::Plain)?;
    let n_min = (!relaxed.q_max.is_empty()).then(|| query.len() - relaxed.q_max.len());
    Ok(QualityRecord { query_id: query_id.to_owned(), reference_d, d_min, n_min })
}
