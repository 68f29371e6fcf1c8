//! Extremal instance generators: generalized wheels `W(k-2,n)` sitting
//! exactly on the edge threshold, the same plus one random edge, and seeded
//! uniform random graphs with a fixed edge count.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{t_threshold, Graph};
use crate::{Error, Result};

/// The generalized wheel `W(k-2,n) = K_{k-2} + C_{n-k+2}`: apex clique on
/// ids `0..k-2`, rim cycle on the rest, apexes joined to everything.
/// `K_0 + C_n` is plain `C_n`. Edge count is exactly `t_k(n)` and minimum
/// degree exactly `k`.
pub fn gen_wheel(k: u32, n: u64) -> Result<Graph> {
    if k < 2 || n < k as u64 + 2 {
        return Err(Error::WheelTooSmall { k, n });
    }
    let n = n as usize;
    let apexes = (k - 2) as usize;
    let rim = n - apexes;
    debug_assert!(rim >= 4);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for a in 0..apexes as u32 {
        for b in (a + 1)..apexes as u32 {
            edges.push((a, b));
        }
        for r in apexes as u32..n as u32 {
            edges.push((a, r));
        }
    }
    let first = apexes as u32;
    for i in 0..rim as u32 {
        edges.push((first + i, first + (i + 1) % rim as u32));
    }
    let g = Graph::from_edges(n, edges)?;
    debug_assert_eq!(g.edge_count() as u64, t_threshold(k, n as u64).unwrap());
    debug_assert_eq!(g.min_degree(), Some(k as usize));
    Ok(g)
}

/// Wheel plus one uniformly random non-edge: edge count `t_k(n) + 1`,
/// minimum degree still `k`. Deterministic per seed.
pub fn gen_extremal_plus_one(k: u32, n: u64, seed: u64) -> Result<Graph> {
    let g = gen_wheel(k, n)?;
    let nn = g.vertex_count();
    let max = nn as u64 * (nn as u64 - 1) / 2;
    if g.edge_count() as u64 >= max {
        return Err(Error::NoNonEdge);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u, v) = loop {
        let u = rng.gen_range(0..nn as u32);
        let v = rng.gen_range(0..nn as u32);
        if u != v && !g.has_edge(u, v) {
            break (u.min(v), u.max(v));
        }
    };
    let mut edges: Vec<(u32, u32)> = g.edges().collect();
    edges.push((u, v));
    Graph::from_edges(nn, edges)
}

/// Uniform random simple graph on `n` vertices with exactly `m` edges,
/// sampled by rejection against the already-chosen set. Deterministic
/// per seed.
pub fn gen_random_with_edges(n: u64, m: u64, seed: u64) -> Result<Graph> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(Error::TooManyEdges { requested: m, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: BTreeSet<(u32, u32)> = BTreeSet::new();
    while (chosen.len() as u64) < m {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        chosen.insert((u.min(v), u.max(v)));
    }
    Graph::from_edges(n as usize, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::k_core;

    #[test]
    fn wheel_examples() {
        let w = gen_wheel(3, 6).unwrap();
        assert_eq!(w.edge_count(), 10);
        assert_eq!(w.min_degree(), Some(3));

        let c8 = gen_wheel(2, 8).unwrap();
        assert_eq!(c8.edge_count(), 8);

        let w = gen_wheel(4, 10).unwrap();
        assert_eq!(w.edge_count(), 25);
    }

    #[test]
    fn wheel_threshold_sweep() {
        for k in 2..=6u32 {
            for n in (k as u64 + 2)..=60 {
                let w = gen_wheel(k, n).unwrap();
                assert_eq!(w.edge_count() as u64, t_threshold(k, n).unwrap());
                assert_eq!(w.min_degree(), Some(k as usize));
                // the k-2 apexes have degree n-1
                for a in 0..(k - 2) {
                    assert_eq!(w.degree(a) as u64, n - 1);
                }
            }
        }
    }

    #[test]
    fn wheel_too_small() {
        assert!(matches!(gen_wheel(3, 4), Err(Error::WheelTooSmall { .. })));
    }

    #[test]
    fn plus_one_counts() {
        let g = gen_extremal_plus_one(3, 6, 17).unwrap();
        assert_eq!(g.edge_count(), 11);
        assert_eq!(g.min_degree(), Some(3));
        // deterministic per seed
        let h = gen_extremal_plus_one(3, 6, 17).unwrap();
        assert_eq!(g, h);
        let other = gen_extremal_plus_one(2, 12, 3).unwrap();
        assert_eq!(other.edge_count(), 13);
        assert_eq!(other, gen_extremal_plus_one(2, 12, 3).unwrap());
    }

    #[test]
    fn random_fixed_edges() {
        let g = gen_random_with_edges(5, 10, 1).unwrap();
        assert_eq!(g.edge_count(), 10); // K5 forced
        let g = gen_random_with_edges(5, 0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        let a = gen_random_with_edges(6, 7, 99).unwrap();
        let b = gen_random_with_edges(6, 7, 99).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            gen_random_with_edges(4, 7, 0),
            Err(Error::TooManyEdges { .. })
        ));
    }

    #[test]
    fn wheel_is_its_own_core() {
        for k in 3..=5u32 {
            let w = gen_wheel(k, (k + 4) as u64).unwrap();
            assert_eq!(k_core(&w, k).len(), w.vertex_count());
        }
    }
}
