//! Dyadic collection of maximal good sets, per-vertex neighbor families,
//! the conflict graph, and the greedy independent set with its Turán-type
//! guarantee.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::goodset::GoodSet;
use crate::graph::{Graph, VertexSet};
use crate::{Error, Result};

/// A dyadic-bucketed subfamily of the maximal good sets: member sizes lie in
/// `[2^(i-1), 2^i]` (so any two sizes are within a factor of 2) and the
/// total covers at least `alpha*n / log2 n` vertices while staying below n.
#[derive(Debug, Clone)]
pub struct Collection {
    pub bucket_index: u32,
    /// Members sorted by minimum vertex id.
    pub members: Vec<GoodSet>,
    pub total_size: usize,
}

/// Picks the dyadic bucket maximizing total covered size (ties: smaller
/// index) out of the complete family of maximal good sets. Requires the
/// family to cover at least `alpha*n = n/(2k+2)` vertices; otherwise the
/// caller is directed to the degree-census fallback branch.
pub fn build_collection(sets: Vec<GoodSet>, n: usize, k: u32) -> Result<Collection> {
    let alpha_n = n as f64 / (2 * k + 2) as f64;
    let total_all: usize = sets.iter().map(GoodSet::len).sum();
    if (total_all as f64) < alpha_n {
        return Err(Error::CollectionMass { total: total_all, required: alpha_n });
    }
    // buckets overlap at powers of two, exactly as in the pigeonhole
    // argument; a set of size 2^j is counted in buckets j and j+1
    let max_bucket = 33u32;
    let mut best: Option<(usize, u32)> = None; // (total, index)
    for i in 1..=max_bucket {
        let lo = 1u64 << (i - 1);
        let hi = 1u64 << i;
        let tot: usize = sets
            .iter()
            .map(GoodSet::len)
            .filter(|&s| (s as u64) >= lo && (s as u64) <= hi)
            .sum();
        if tot > best.map_or(0, |(t, _)| t) {
            best = Some((tot, i));
        }
    }
    let (_, bucket_index) = best.expect("a nonempty family fills some bucket");
    let lo = 1u64 << (bucket_index - 1);
    let hi = 1u64 << bucket_index;
    let mut members: Vec<GoodSet> = sets
        .into_iter()
        .filter(|s| (s.len() as u64) >= lo && (s.len() as u64) <= hi)
        .collect();
    members.sort_by_key(GoodSet::min_id);
    let mut total_size: usize = members.iter().map(GoodSet::len).sum();
    if total_size >= n {
        // maximal good sets are disjoint, so the bucket total never exceeds
        // n; dropping one member restores the strict bound
        assert_eq!(total_size, n);
        let drop_at = members
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap();
        total_size -= members[drop_at].len();
        members.remove(drop_at);
    }
    let coll = Collection { bucket_index, members, total_size };
    debug_assert!(coll.total_size < n);
    if let (Some(mn), Some(mx)) = (
        coll.members.iter().map(GoodSet::len).min(),
        coll.members.iter().map(GoodSet::len).max(),
    ) {
        assert!(mx <= 2 * mn, "dyadic ratio violated: sizes {mn}..{mx}");
    }
    Ok(coll)
}

/// For each vertex `s`, the collection members containing a G-neighbor of
/// `s`, truncated deterministically to the k+1 members of smallest minimum
/// vertex id when there are more.
#[derive(Debug, Clone)]
pub struct NeighborFamilies {
    pub k: u32,
    /// Entries sorted by vertex id.
    pub entries: Vec<FamilyEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyEntry {
    pub vertex: u32,
    /// Sorted member indices into `Collection::members`.
    pub members: Vec<u32>,
    pub truncated: bool,
}

pub fn neighbor_families(
    g: &Graph,
    coll: &Collection,
    s: &VertexSet,
    k: u32,
) -> NeighborFamilies {
    let n = g.vertex_count();
    let mut owner = vec![u32::MAX; n];
    for (idx, m) in coll.members.iter().enumerate() {
        for v in m.vertices.iter() {
            owner[v as usize] = idx as u32;
        }
    }
    debug_assert!(s.iter().all(|v| owner[v as usize] == u32::MAX));
    let cap = k as usize + 1;
    let mut entries = Vec::with_capacity(s.len());
    for v in s.iter() {
        let mut fam: Vec<u32> = g
            .neighbors(v)
            .iter()
            .filter_map(|&w| {
                let o = owner[w as usize];
                (o != u32::MAX).then_some(o)
            })
            .collect();
        fam.sort_unstable();
        fam.dedup();
        // members are sorted by min vertex id, so keeping the k+1 smallest
        // indices keeps the k+1 smallest-min-id members
        let truncated = fam.len() > cap;
        if truncated {
            fam.truncate(cap);
        }
        entries.push(FamilyEntry { vertex: v, members: fam, truncated });
    }
    NeighborFamilies { k, entries }
}

/// Auxiliary conflict graph on collection member indices: a clique on every
/// family. An independent set picks at most one member per family.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    pub adj: Vec<Vec<u32>>,
    pub edge_count: usize,
}

impl ConflictGraph {
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Builds a conflict graph directly from an edge list (used by tests and
    /// random property checks).
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> ConflictGraph {
        let mut set: BTreeSet<(u32, u32)> = BTreeSet::new();
        for (u, v) in edges {
            debug_assert!(u != v);
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        let edge_count = set.len();
        for (u, v) in set {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        ConflictGraph { adj, edge_count }
    }
}

pub fn build_conflict_graph(coll: &Collection, fams: &NeighborFamilies) -> ConflictGraph {
    let m = coll.members.len();
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for entry in &fams.entries {
        for (i, &a) in entry.members.iter().enumerate() {
            for &b in &entry.members[i + 1..] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let g = ConflictGraph::from_edges(m, edges);
    let k = fams.k as usize;
    assert!(
        g.edge_count <= fams.entries.len() * (k + 1) * k / 2,
        "conflict graph exceeds |S| * C(k+1,2) edges"
    );
    g
}

/// Greedy independent set: repeatedly take a minimum-degree vertex (ties:
/// smallest index) and delete its closed neighborhood. The result has size
/// at least m/(2c+1) where c = e/m — checked on every call.
pub fn greedy_independent_set(a: &ConflictGraph) -> VertexSet {
    let m = a.vertex_count();
    let mut alive = vec![true; m];
    let mut deg: Vec<usize> = a.adj.iter().map(Vec::len).collect();
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        (0..m as u32).map(|v| Reverse((deg[v as usize], v))).collect();
    let mut picked: Vec<u32> = Vec::new();
    while let Some(Reverse((d, v))) = heap.pop() {
        if !alive[v as usize] || d != deg[v as usize] {
            continue;
        }
        picked.push(v);
        let mut removed = vec![v];
        for &w in &a.adj[v as usize] {
            if alive[w as usize] {
                removed.push(w);
            }
        }
        for &x in &removed {
            alive[x as usize] = false;
        }
        for &x in &removed {
            for &y in &a.adj[x as usize] {
                if alive[y as usize] {
                    deg[y as usize] -= 1;
                    heap.push(Reverse((deg[y as usize], y)));
                }
            }
        }
    }
    let is = VertexSet::from_unsorted(picked);
    for v in is.iter() {
        for &w in &a.adj[v as usize] {
            assert!(!is.contains(w), "independent set contains a conflict edge");
        }
    }
    // Turán-type guarantee, exact in integers: |IS| (2e + m) >= m^2
    assert!(
        is.len() * (2 * a.edge_count + m) >= m * m,
        "greedy independent set below the m/(2c+1) bound"
    );
    is
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_random_with_edges;
    use crate::goodset::{GoodSetTrace, TraceStep};

    fn fake_set(ids: &[u32]) -> GoodSet {
        // trace content is irrelevant for bucketing tests
        let mut steps = vec![TraceStep::Seed { vertex: ids[0] }];
        for &v in &ids[1..] {
            steps.push(TraceStep::Absorb { vertex: v });
        }
        GoodSet {
            vertices: ids.iter().copied().collect(),
            trace: GoodSetTrace::new(steps),
        }
    }

    #[test]
    fn bucket_selection_pigeonhole() {
        // sizes {1,1,1,6,6}: bucket 3 (4..8) wins with total 12
        let mut next = 0u32;
        let mut mk = |size: u32| {
            let ids: Vec<u32> = (next..next + size).collect();
            next += size;
            fake_set(&ids)
        };
        let sets = vec![mk(1), mk(1), mk(1), mk(6), mk(6)];
        let coll = build_collection(sets, 20, 2).unwrap();
        assert_eq!(coll.bucket_index, 3);
        assert_eq!(coll.members.len(), 2);
        assert_eq!(coll.total_size, 12);
    }

    #[test]
    fn bucket_drop_when_total_reaches_n() {
        // two disjoint 5-sets on n=10: total 10 = n, drop one
        let sets = vec![fake_set(&[0, 1, 2, 3, 4]), fake_set(&[5, 6, 7, 8, 9])];
        let coll = build_collection(sets, 10, 2).unwrap();
        assert_eq!(coll.bucket_index, 3);
        assert_eq!(coll.members.len(), 1);
        assert_eq!(coll.total_size, 5);
    }

    #[test]
    fn bucket_all_singletons() {
        let sets: Vec<GoodSet> = (0..100u32).map(|i| fake_set(&[i])).collect();
        let coll = build_collection(sets, 600, 2).unwrap();
        assert_eq!(coll.bucket_index, 1);
        assert_eq!(coll.total_size, 100);
    }

    #[test]
    fn mass_precondition() {
        let sets = vec![fake_set(&[0])];
        assert!(matches!(
            build_collection(sets, 600, 2),
            Err(Error::CollectionMass { .. })
        ));
    }

    #[test]
    fn families_truncate_deterministically() {
        // star: s = vertex 0 adjacent to one vertex of each member
        let k = 2u32;
        let member_count = 5usize;
        let mut edges = Vec::new();
        for i in 0..member_count as u32 {
            edges.push((0, 1 + i));
        }
        let g = Graph::from_edges(1 + member_count, edges).unwrap();
        let members: Vec<GoodSet> = (0..member_count as u32).map(|i| fake_set(&[1 + i])).collect();
        let coll = Collection { bucket_index: 1, members, total_size: member_count };
        let s: VertexSet = [0u32].into_iter().collect();
        let fams = neighbor_families(&g, &coll, &s, k);
        assert_eq!(fams.entries.len(), 1);
        assert!(fams.entries[0].truncated);
        assert_eq!(fams.entries[0].members, vec![0, 1, 2]);
    }

    #[test]
    fn families_empty_and_exact() {
        let g = Graph::from_edges(4, [(0u32, 1), (2, 3)]).unwrap();
        let coll = Collection {
            bucket_index: 1,
            members: vec![fake_set(&[1]), fake_set(&[3])],
            total_size: 2,
        };
        let s: VertexSet = [0u32, 2].into_iter().collect();
        let fams = neighbor_families(&g, &coll, &s, 3);
        assert_eq!(fams.entries[0].members, vec![0]);
        assert!(!fams.entries[0].truncated);
        assert_eq!(fams.entries[1].members, vec![1]);
    }

    #[test]
    fn conflict_graph_clique_union() {
        let coll = Collection {
            bucket_index: 1,
            members: (0..3u32).map(|i| fake_set(&[i])).collect(),
            total_size: 3,
        };
        let fams = NeighborFamilies {
            k: 3,
            entries: vec![
                FamilyEntry { vertex: 10, members: vec![0, 1], truncated: false },
                FamilyEntry { vertex: 11, members: vec![1, 2], truncated: false },
            ],
        };
        let a = build_conflict_graph(&coll, &fams);
        assert_eq!(a.edge_count, 2);
        assert_eq!(a.adj[1], vec![0, 2]);

        let empty = build_conflict_graph(
            &coll,
            &NeighborFamilies { k: 3, entries: vec![] },
        );
        assert_eq!(empty.edge_count, 0);
    }

    #[test]
    fn greedy_examples() {
        let edgeless = ConflictGraph::from_edges(4, core::iter::empty());
        assert_eq!(greedy_independent_set(&edgeless).len(), 4);

        let triangle = ConflictGraph::from_edges(3, [(0u32, 1), (1, 2), (0, 2)]);
        assert_eq!(greedy_independent_set(&triangle).len(), 1);

        let star = ConflictGraph::from_edges(5, [(0u32, 1), (0, 2), (0, 3), (0, 4)]);
        let is = greedy_independent_set(&star);
        assert_eq!(is.as_slice(), &[1, 2, 3, 4]);
    }

    #[test]
    fn greedy_turan_bound_random() {
        for seed in 0..200u64 {
            let m = 3 + (seed % 20) as usize;
            let e = (seed % 29).min((m * (m - 1) / 2) as u64);
            let g = gen_random_with_edges(m as u64, e, seed ^ 0xabcd).unwrap();
            let a = ConflictGraph::from_edges(m, g.edges());
            // the bound assert runs inside
            let _ = greedy_independent_set(&a);
        }
    }
}
