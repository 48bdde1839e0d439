//! Seeded random graphs for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EntityGraph, GraphBuilder};

fn name(i: usize) -> String {
    format!("e{i}")
}

/// G(n, p) random graph with entities `e0..e{n-1}`; every entity exists even
/// when isolated.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> EntityGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.entity(&name(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                b.add_arc(&name(i), "rel", &name(j));
            }
        }
    }
    b.build_unchecked()
}

/// Preferential-attachment graph: each new entity links to `m` existing ones
/// chosen with probability proportional to degree, giving the hub-heavy
/// degree distribution typical of knowledge graphs.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> EntityGraph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.entity(&name(i));
    }
    // each arc endpoint appears once, so uniform picks are degree-weighted
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * m);
    for i in 0..=m {
        for j in 0..i {
            b.add_arc(&name(i), "rel", &name(j));
            endpoints.extend([i, j]);
        }
    }
    let labels = ["cites", "knows", "partOf", "locatedIn"];
    for i in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            b.add_arc(&name(i), labels[rng.gen_range(0..labels.len())], &name(t));
            endpoints.extend([i, t]);
        }
    }
    b.build_unchecked()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = erdos_renyi(20, 0.2, 3);
        let b = erdos_renyi(20, 0.2, 3);
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.entity_count(), 20);
        let g = preferential_attachment(200, 2, 5);
        assert_eq!(g.entity_count(), 200);
        assert_eq!(g.arc_count(), 3 + 197 * 2);
    }
}
