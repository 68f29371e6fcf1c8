//! Brute-force oracles: exhaustive minimum-order subgraph search, the naive
//! good-set closure, and randomized cover checking. Everything is seeded and
//! refuses graphs above the configured vertex budget.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{k_core, Graph, VertexSet};
use crate::{Error, Result};

/// Budget for exhaustive and randomized oracle operations.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub trial_count: usize,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 16, trial_count: 100, seed: 0 }
    }
}

/// Exhaustive minimum-cardinality vertex set inducing min degree >= k, or
/// None when no such subgraph exists. The search runs inside the k-core
/// (which contains every candidate); ties go to the lexicographically
/// smallest id set.
pub fn min_order_mindeg_subgraph(
    g: &Graph,
    k: u32,
    budget: &OracleBudget,
) -> Result<Option<VertexSet>> {
    let core = k_core(g, k);
    if core.is_empty() {
        return Ok(None);
    }
    if core.len() > budget.max_vertices.min(64) {
        return Err(Error::BudgetExceeded { vertices: core.len(), max: budget.max_vertices });
    }
    let ids: Vec<u32> = core.as_slice().to_vec();
    let m = ids.len();
    // adjacency restricted to the core, as bitmasks over core positions
    let mut adj = vec![0u64; m];
    for (i, &u) in ids.iter().enumerate() {
        for &w in g.neighbors(u) {
            if let Ok(j) = ids.binary_search(&w) {
                adj[i] |= 1 << j;
            }
        }
    }
    let feasible = |mask: u64| -> bool {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (adj[i] & mask).count_ones() < k {
                return false;
            }
        }
        true
    };
    // sizes ascending; within a size, combinations in lexicographic order of
    // the increasing index tuple
    for size in (k as usize + 1)..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mask = combo.iter().fold(0u64, |acc, &i| acc | (1 << i));
            if feasible(mask) {
                return Ok(Some(
                    VertexSet::from_sorted(combo.iter().map(|&i| ids[i]).collect()),
                ));
            }
            let mut advanced = false;
            for pos in (0..size).rev() {
                if combo[pos] < pos + m - size {
                    combo[pos] += 1;
                    for j in pos + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    // the k-core itself always qualifies, so the loop must have returned
    unreachable!("nonempty k-core guarantees a feasible subset")
}

/// Naive good-set closure: maintains a family of sets, repeatedly applying
/// the three rules in a seed-shuffled order until stable. The resulting
/// family of maximal good sets is independent of the randomization.
pub fn brute_good_closure(g: &Graph, k: u32, budget: &OracleBudget) -> Result<Vec<VertexSet>> {
    let n = g.vertex_count();
    if n > budget.max_vertices {
        return Err(Error::BudgetExceeded { vertices: n, max: budget.max_vertices });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut family: Vec<BTreeSet<u32>> = (0..n as u32)
        .filter(|&v| g.degree(v) == k as usize)
        .map(|v| [v].into_iter().collect())
        .collect();
    loop {
        let mut changed = false;
        // rule 3: merge any two sets that intersect or are joined by an edge
        'merge: loop {
            for i in 0..family.len() {
                for j in (i + 1)..family.len() {
                    let touch = family[i].intersection(&family[j]).next().is_some()
                        || family[i].iter().any(|&u| {
                            g.neighbors(u).iter().any(|w| family[j].contains(w))
                        });
                    if touch {
                        let b = family.swap_remove(j);
                        family[i].extend(b);
                        changed = true;
                        continue 'merge;
                    }
                }
            }
            break;
        }
        // rule 2: absorb any vertex with at most k-1 neighbors outside a set
        let mut verts: Vec<u32> = (0..n as u32).collect();
        verts.shuffle(&mut rng);
        let mut set_order: Vec<usize> = (0..family.len()).collect();
        set_order.shuffle(&mut rng);
        'absorb: for &v in &verts {
            for &si in &set_order {
                if family[si].contains(&v) {
                    continue;
                }
                let outside = g
                    .neighbors(v)
                    .iter()
                    .filter(|w| !family[si].contains(w))
                    .count();
                if outside <= k as usize - 1 {
                    family[si].insert(v);
                    changed = true;
                    break 'absorb;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<VertexSet> = family
        .into_iter()
        .map(|s| VertexSet::from_sorted(s.into_iter().collect()))
        .collect();
    out.sort_by_key(|s| s.min_id());
    Ok(out)
}

/// A failing cover found by [`random_cover_check`].
#[derive(Debug, Clone)]
pub struct CoverCounterexample {
    pub trial: usize,
    pub seed: u64,
    pub cover: Graph,
}

/// Generates `trial_count` random (H,S,k)-covers (fresh vertices and edges
/// added until every vertex outside `V(H) \ S` has degree >= k) and checks
/// each for a nonempty k-core. Returns the first failing cover, if any.
pub fn random_cover_check(
    h: &Graph,
    s: &VertexSet,
    k: u32,
    budget: &OracleBudget,
) -> Result<Option<CoverCounterexample>> {
    let n = h.vertex_count();
    if n > budget.max_vertices {
        return Err(Error::BudgetExceeded { vertices: n, max: budget.max_vertices });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for trial in 0..budget.trial_count {
        let cover = random_cover(h, s, k, &mut rng);
        debug_assert!({
            let embed: Vec<u32> = (0..n as u32).collect();
            crate::cover::is_cover(&cover, h, &embed, s, k).unwrap()
        });
        if k_core(&cover, k).is_empty() {
            return Ok(Some(CoverCounterexample { trial, seed: budget.seed, cover }));
        }
    }
    Ok(None)
}

/// One random cover of (H,S,k): H plus a random number of fresh vertices,
/// plus random edges until all of S and all fresh vertices reach degree k.
/// With no deficient vertices it may return H itself.
fn random_cover(h: &Graph, s: &VertexSet, k: u32, rng: &mut ChaCha8Rng) -> Graph {
    let n_h = h.vertex_count();
    let fresh = rng.gen_range(0..=k as usize + 2);
    let mut n = n_h + fresh;
    let mut edges: BTreeSet<(u32, u32)> = h.edges().collect();
    let mut deg = vec![0usize; n];
    for &(a, b) in &edges {
        deg[a as usize] += 1;
        deg[b as usize] += 1;
    }
    loop {
        let needy: Vec<u32> = (0..n as u32)
            .filter(|&v| (v as usize >= n_h || s.contains(v)) && deg[v as usize] < k as usize)
            .collect();
        let Some(&x) = needy.as_slice().choose(rng) else {
            break;
        };
        let options: Vec<u32> = (0..n as u32)
            .filter(|&y| y != x && !edges.contains(&(x.min(y), x.max(y))))
            .collect();
        match options.as_slice().choose(rng) {
            Some(&y) => {
                edges.insert((x.min(y), x.max(y)));
                deg[x as usize] += 1;
                deg[y as usize] += 1;
            }
            None => {
                // x already adjacent to everything: bring in another vertex
                n += 1;
                deg.push(0);
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_extremal_plus_one, gen_random_with_edges, gen_wheel};
    use crate::goodset::maximal_good_sets;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n as u32).map(|i| (i, (i + 1) % n as u32))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn min_subgraph_examples() {
        let budget = OracleBudget::default();
        let c5 = cycle(5);
        assert_eq!(
            min_order_mindeg_subgraph(&c5, 2, &budget).unwrap().unwrap().len(),
            5
        );
        let k5 = complete(5);
        let found = min_order_mindeg_subgraph(&k5, 3, &budget).unwrap().unwrap();
        assert_eq!(found.as_slice(), &[0, 1, 2, 3]);

        // W(1,6) plus chord between two rim vertices at distance 2
        let w = gen_wheel(3, 6).unwrap();
        let mut edges: Vec<(u32, u32)> = w.edges().collect();
        edges.push((1, 3));
        let g = Graph::from_edges(6, edges).unwrap();
        let found = min_order_mindeg_subgraph(&g, 3, &budget).unwrap().unwrap();
        assert_eq!(found.len(), 4);
        assert_eq!(found.as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn min_subgraph_none_and_budget() {
        let p3 = Graph::from_edges(3, [(0u32, 1), (1, 2)]).unwrap();
        assert!(min_order_mindeg_subgraph(&p3, 2, &OracleBudget::default())
            .unwrap()
            .is_none());
        let big = cycle(30);
        let tight = OracleBudget { max_vertices: 10, ..Default::default() };
        assert!(matches!(
            min_order_mindeg_subgraph(&big, 2, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn brute_closure_examples() {
        let budget = OracleBudget::default();
        let fams = brute_good_closure(&cycle(5), 2, &budget).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].len(), 5);

        let mut edges: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5u32).map(|i| (5 + i, 5 + (i + 1) % 5)));
        let two = Graph::from_edges(10, edges).unwrap();
        let fams = brute_good_closure(&two, 2, &budget).unwrap();
        assert_eq!(fams.len(), 2);

        assert!(brute_good_closure(&complete(5), 2, &budget).unwrap().is_empty());
    }

    #[test]
    fn brute_closure_seed_independent() {
        for gseed in 0..20u64 {
            let g = gen_random_with_edges(9, 13, gseed).unwrap();
            for k in 2..=3u32 {
                let base = brute_good_closure(
                    &g,
                    k,
                    &OracleBudget { seed: 0, ..Default::default() },
                )
                .unwrap();
                for seed in 1..5u64 {
                    let other = brute_good_closure(
                        &g,
                        k,
                        &OracleBudget { seed, ..Default::default() },
                    )
                    .unwrap();
                    assert_eq!(base, other);
                }
            }
        }
    }

    #[test]
    fn engine_matches_brute_closure() {
        for gseed in 0..60u64 {
            let n = 6 + (gseed % 7) as u64;
            let m = gseed % (n * (n - 1) / 2 + 1);
            let g = gen_random_with_edges(n, m, gseed ^ 0x5eed).unwrap();
            for k in 2..=4u32 {
                let brute = brute_good_closure(&g, k, &OracleBudget::default()).unwrap();
                let engine: Vec<VertexSet> = maximal_good_sets(&g, k)
                    .into_iter()
                    .map(|s| s.vertices)
                    .collect();
                assert_eq!(brute, engine, "graph seed {gseed} k {k}");
            }
        }
    }

    #[test]
    fn cover_check_pass_and_counterexample() {
        let p3 = Graph::from_edges(3, [(0u32, 1), (1, 2)]).unwrap();
        let s: VertexSet = [0u32, 2].into_iter().collect();
        let budget = OracleBudget { trial_count: 100, seed: 7, ..Default::default() };
        assert!(random_cover_check(&p3, &s, 2, &budget).unwrap().is_none());

        // with S empty, H itself is a valid cover and has no 2-core
        let empty = VertexSet::new();
        let counter = random_cover_check(&p3, &empty, 2, &budget).unwrap();
        assert!(counter.is_some());

        // H with nonempty k-core passes trivially
        let c4 = cycle(4);
        assert!(random_cover_check(&c4, &empty, 2, &budget).unwrap().is_none());
    }

    #[test]
    fn wheel_extremality_small() {
        let budget = OracleBudget::default();
        for k in 3..=5u32 {
            for n in (k as u64 + 2)..=10 {
                let w = gen_wheel(k, n).unwrap();
                let min = min_order_mindeg_subgraph(&w, k, &budget).unwrap().unwrap();
                assert_eq!(min.len() as u64, n, "wheel W({},{}) has a proper core", k - 2, n);
            }
        }
    }

    #[test]
    fn plus_one_creates_proper_subgraph() {
        let budget = OracleBudget::default();
        for k in 3..=4u32 {
            for n in (k as u64 + 2)..=10 {
                let g = gen_extremal_plus_one(k, n, n ^ 0x77).unwrap();
                let min = min_order_mindeg_subgraph(&g, k, &budget).unwrap().unwrap();
                assert!(
                    (min.len() as u64) < n,
                    "plus-one instance should have a proper min-degree-{k} subgraph"
                );
            }
        }
    }
}
