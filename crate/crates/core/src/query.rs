use crate::error::{Error, Result};
use crate::graph::{EntityGraph, EntityId};

/// A relationship query: at least two distinct entities of one graph, kept
/// sorted by entity index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    entities: Vec<EntityId>,
}

impl Query {
    /// Deduplicates `entities` and checks they belong to `g`.
    pub fn new(g: &EntityGraph, entities: impl IntoIterator<Item = EntityId>) -> Result<Query> {
        let mut entities: Vec<EntityId> = entities.into_iter().collect();
        for &e in &entities {
            g.check(e)?;
        }
        entities.sort_unstable();
        entities.dedup();
        if entities.len() < 2 {
            return Err(Error::Argument(format!("a query needs at least 2 distinct entities, got {}", entities.len())));
        }
        Ok(Query { entities })
    }

    pub fn from_names<S: AsRef<str>>(g: &EntityGraph, names: &[S]) -> Result<Query> {
        let ids = names.iter().map(|n| g.resolve(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Query::new(g, ids)
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn contains(&self, e: EntityId) -> bool {
        self.entities.binary_search(&e).is_ok()
    }

    pub fn names<'g>(&self, g: &'g EntityGraph) -> Vec<&'g str> {
        self.entities.iter().map(|&e| g.name(e)).collect()
    }
}

/// `⌈D/2⌉`: the largest distance allowed between a certificate center and a
/// query entity under diameter bound `d`.
#[inline]
pub fn half_diameter(d: u32) -> u32 {
    d.div_ceil(2)
}

pub(crate) fn check_diameter(d: u32) -> Result<()> {
    if d == 0 {
        Err(Error::Argument("diameter bound must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    #[test]
    fn dedup_then_size_check() {
        let g = load_edge_list("a\tr\tb\n".as_bytes()).unwrap();
        let a = g.resolve("a").unwrap();
        let b = g.resolve("b").unwrap();
        assert!(Query::new(&g, [a, a]).is_err());
        let q = Query::new(&g, [b, a, b]).unwrap();
        assert_eq!(q.entities(), &[a, b]);
        assert!(Query::new(&g, [a, EntityId(5)]).is_err());
        assert!(Query::from_names(&g, &["a", "zzz"]).is_err());
    }

    #[test]
    fn half_diameter_rounds_up() {
        assert_eq!(half_diameter(1), 1);
        assert_eq!(half_diameter(2), 1);
        assert_eq!(half_diameter(3), 2);
        assert_eq!(half_diameter(4), 2);
        assert_eq!(half_diameter(5), 3);
    }
}
