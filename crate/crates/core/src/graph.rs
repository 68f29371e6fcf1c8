//! Simple undirected graphs over dense vertex ids, degeneracy peeling,
//! induced subgraphs, and the edge-threshold / removable-count formulas.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Sorted set of dense vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet(Vec<u32>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Builds a set from arbitrary ids, sorting and deduplicating.
    pub fn from_unsorted(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    /// Wraps a vector that is already strictly increasing.
    pub fn from_sorted(ids: Vec<u32>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn min_id(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().all(|v| !large.contains(v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        Self::from_unsorted(out)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        Self::from_unsorted(iter.into_iter().collect())
    }
}

/// Simple undirected graph: dense 0-based ids, sorted adjacency lists, and an
/// optional map back to original input labels (`None` means the label of `v`
/// is the decimal form of `v`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from an edge iterator, deduplicating parallel edges.
    /// Returns the graph together with the number of duplicates dropped.
    /// Self-loops are rejected.
    pub fn build(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<(Graph, usize)> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut listed = 0usize;
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { line: 0 });
            }
            let max = u.max(v) as usize;
            if max >= n {
                return Err(Error::IdOutOfRange { id: u.max(v), vertex_count: n });
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            listed += 1;
        }
        let mut kept = 0usize;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            kept += list.len();
        }
        let kept = kept / 2;
        Ok((
            Graph { adj, edge_count: kept, labels: None },
            listed - kept,
        ))
    }

    /// `build` for callers that guarantee edges are already simple.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph> {
        let (g, dups) = Self::build(n, edges)?;
        debug_assert_eq!(dups, 0);
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Iterates edges as `(u, v)` with `u < v`, in id order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(|l| l.len()).min()
    }

    /// Number of vertices with degree exactly `d`.
    pub fn degree_census(&self, d: usize) -> usize {
        self.adj.iter().filter(|l| l.len() == d).count()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        debug_assert_eq!(labels.len(), self.vertex_count());
        self.labels = Some(labels);
    }

    /// Original input label of `v`.
    pub fn label(&self, v: u32) -> String {
        match &self.labels {
            Some(ls) => ls[v as usize].clone(),
            None => v.to_string(),
        }
    }

    /// Induced subgraph on `w`, re-indexed to dense ids `0..w.len()` in the
    /// order of `w`. Labels follow the vertices.
    pub fn induced(&self, w: &VertexSet) -> Result<Graph> {
        let n = self.vertex_count();
        if let Some(bad) = w.iter().find(|&v| v as usize >= n) {
            return Err(Error::IdOutOfRange { id: bad, vertex_count: n });
        }
        let mut back = vec![u32::MAX; n];
        for (new, old) in w.iter().enumerate() {
            back[old as usize] = new as u32;
        }
        let mut adj: Vec<Vec<u32>> = Vec::with_capacity(w.len());
        let mut edge_count = 0usize;
        for old in w.iter() {
            let list: Vec<u32> = self.adj[old as usize]
                .iter()
                .filter_map(|&nb| {
                    let mapped = back[nb as usize];
                    (mapped != u32::MAX).then_some(mapped)
                })
                .collect();
            // source list is sorted by old id; w preserves order, so mapped
            // ids are already increasing
            debug_assert!(list.windows(2).all(|p| p[0] < p[1]));
            edge_count += list.len();
            adj.push(list);
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| w.iter().map(|old| ls[old as usize].clone()).collect());
        Ok(Graph { adj, edge_count: edge_count / 2, labels })
    }
}

/// Result of parsing edge-list text.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// Duplicate edge lines dropped during deduplication.
    pub duplicates: usize,
}

/// Parses the edge-list text format: one edge per line as two
/// whitespace-separated labels; `#`-lines and blank lines are ignored.
/// Labels are mapped to dense ids in first-appearance order.
pub fn parse_edge_list(text: &str) -> Result<ParsedGraph> {
    let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::MalformedLine { line: idx + 1 }),
        };
        if a == b {
            return Err(Error::SelfLoop { line: idx + 1 });
        }
        let ua = *ids.entry(a).or_insert_with(|| {
            order.push(a);
            (order.len() - 1) as u32
        });
        let ub = *ids.entry(b).or_insert_with(|| {
            order.push(b);
            (order.len() - 1) as u32
        });
        edges.push((ua, ub));
    }
    let (mut graph, duplicates) = Graph::build(order.len(), edges)?;
    graph.set_labels(order.into_iter().map(String::from).collect());
    Ok(ParsedGraph { graph, duplicates })
}

/// Serializes a graph in the edge-list format, prefixed by the given header
/// comment lines (written as `# ...`).
pub fn write_edge_list(g: &Graph, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
    for (u, v) in g.edges() {
        out.push_str(&g.label(u));
        out.push(' ');
        out.push_str(&g.label(v));
        out.push('\n');
    }
    out
}

/// Outcome of peeling to the k-core: the removal order and the surviving set.
#[derive(Debug, Clone)]
pub struct PeelResult {
    /// Vertices removed, in order; each had degree <= k-1 at removal time.
    pub removed: Vec<u32>,
    /// Degree each removed vertex had at its removal time.
    pub removed_degrees: Vec<u32>,
    /// The k-core.
    pub core: VertexSet,
}

/// Peels vertices of degree <= k-1, lowest id first, until none remain.
pub fn peel_to_core(g: &Graph, k: u32) -> PeelResult {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let mut alive = vec![true; n];
    let mut queue: alloc::collections::BTreeSet<u32> = (0..n as u32)
        .filter(|&v| deg[v as usize] < k as usize)
        .collect();
    let mut removed = Vec::new();
    let mut removed_degrees = Vec::new();
    while let Some(&v) = queue.iter().next() {
        queue.remove(&v);
        if !alive[v as usize] {
            continue;
        }
        alive[v as usize] = false;
        removed.push(v);
        removed_degrees.push(deg[v as usize] as u32);
        for &w in g.neighbors(v) {
            if alive[w as usize] {
                deg[w as usize] -= 1;
                if deg[w as usize] < k as usize {
                    queue.insert(w);
                }
            }
        }
    }
    let core = VertexSet::from_sorted(
        (0..n as u32).filter(|&v| alive[v as usize]).collect(),
    );
    PeelResult { removed, removed_degrees, core }
}

/// The unique maximum vertex set inducing minimum degree >= k (possibly
/// empty). Every call checks its own output.
pub fn k_core(g: &Graph, k: u32) -> VertexSet {
    let core = peel_to_core(g, k).core;
    // min-degree postcondition, checked on every call
    for v in core.iter() {
        let kept = g.neighbors(v).iter().filter(|&&w| core.contains(w)).count();
        assert!(
            kept >= k as usize,
            "k-core postcondition violated: vertex {v} keeps degree {kept} < {k}"
        );
    }
    core
}

/// Binomial coefficient C(m, 2) with saturation at zero for m < 2.
fn choose2(m: i64) -> i64 {
    if m < 2 {
        0
    } else {
        m * (m - 1) / 2
    }
}

/// The algebraic form of `t_k`, defined for every integer argument. Only the
/// checked [`t_threshold`] is part of the public contract; this exists so the
/// edge-accounting identities can be asserted on small remainders as well.
pub fn t_alg(k: u32, n: i64) -> i64 {
    let k = k as i64;
    (k - 1) * (n - k + 2) + choose2(k - 2)
}

/// The edge threshold `t_k(n) = (k-1)(n-k+2) + C(k-2,2)`; one more edge
/// forces a minimum-degree-k subgraph on fewer than n vertices.
pub fn t_threshold(k: u32, n: u64) -> Result<u64> {
    if n <= k as u64 {
        return Err(Error::ThresholdDomain { k, n });
    }
    Ok(t_alg(k, n as i64) as u64)
}

/// Which removable-count bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `n / (4 (k+1)^5 log2 n)`
    Main,
    /// `floor(sqrt(n / 6k^3))`
    Sqrt,
}

/// The removable-vertex quantity of the two headline bounds; the caller
/// subtracts it from n.
pub fn size_bound(k: u32, n: u64, which: BoundKind) -> f64 {
    debug_assert!(n >= 2);
    let nf = n as f64;
    let kf = k as f64;
    match which {
        BoundKind::Main => nf / (4.0 * libm::pow(kf + 1.0, 5.0) * libm::log2(nf)),
        BoundKind::Sqrt => libm::floor(libm::sqrt(nf / (6.0 * kf * kf * kf))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n as u32).map(|i| (i, (i + 1) % n as u32))).unwrap()
    }

    pub(crate) fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn parse_basic() {
        let p = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(p.graph.vertex_count(), 3);
        assert_eq!(p.graph.edge_count(), 2);
        assert_eq!(p.duplicates, 0);
    }

    #[test]
    fn parse_dedup_reports() {
        let p = parse_edge_list("a b\nb a").unwrap();
        assert_eq!(p.graph.vertex_count(), 2);
        assert_eq!(p.graph.edge_count(), 1);
        assert_eq!(p.duplicates, 1);
        assert_eq!(p.graph.label(0), "a");
        assert_eq!(p.graph.label(1), "b");
    }

    #[test]
    fn parse_self_loop_rejected() {
        assert_eq!(parse_edge_list("x x").unwrap_err(), Error::SelfLoop { line: 1 });
    }

    #[test]
    fn parse_malformed_line_number() {
        let err = parse_edge_list("0 1\nbroken").unwrap_err();
        assert_eq!(err, Error::MalformedLine { line: 2 });
    }

    #[test]
    fn parse_comments_and_blanks() {
        let p = parse_edge_list("# header\n\n0 1\n  \n# tail\n1 2\n").unwrap();
        assert_eq!(p.graph.edge_count(), 2);
    }

    #[test]
    fn induced_identity_edge_empty() {
        let c5 = cycle(5);
        let all: VertexSet = (0..5).collect();
        let g = c5.induced(&all).unwrap();
        assert_eq!(g.edge_count(), 5);

        let two: VertexSet = [0u32, 1].into_iter().collect();
        let g = c5.induced(&two).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);

        let empty = VertexSet::new();
        let g = c5.induced(&empty).unwrap();
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn induced_out_of_range() {
        let c5 = cycle(5);
        let bad: VertexSet = [0u32, 7].into_iter().collect();
        assert!(matches!(c5.induced(&bad), Err(Error::IdOutOfRange { .. })));
    }

    #[test]
    fn kcore_cycle() {
        let c6 = cycle(6);
        assert_eq!(k_core(&c6, 2).len(), 6);
        assert!(k_core(&c6, 3).is_empty());
    }

    #[test]
    fn kcore_wheel() {
        // W(1,6): hub 0 joined to C5 on 1..=5; min degree 3, no proper
        // induced subgraph of min degree 3
        let w = crate::gen::gen_wheel(3, 6).unwrap();
        assert_eq!(k_core(&w, 3).len(), 6);
    }

    #[test]
    fn kcore_maximality_bruteforce() {
        // any vertex set inducing min degree >= k is inside the k-core
        let g = parse_edge_list("0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n5 6").unwrap().graph;
        for k in 2..4u32 {
            let core = k_core(&g, k);
            let n = g.vertex_count();
            for mask in 1u32..(1 << n) {
                let set: VertexSet =
                    (0..n as u32).filter(|&v| mask & (1 << v) != 0).collect();
                let ok = set.iter().all(|v| {
                    g.neighbors(v).iter().filter(|&&w| set.contains(w)).count()
                        >= k as usize
                });
                if ok {
                    assert!(set.is_subset(&core));
                }
            }
        }
    }

    #[test]
    fn threshold_values() {
        assert_eq!(t_threshold(3, 6).unwrap(), 10);
        assert_eq!(t_threshold(3, 4).unwrap(), 6);
        assert_eq!(t_threshold(4, 10).unwrap(), 25);
        for n in 4..=1000u64 {
            assert_eq!(t_threshold(3, n).unwrap(), 2 * n - 2);
        }
        assert!(t_threshold(3, 3).is_err());
    }

    #[test]
    fn size_bound_values() {
        let b = size_bound(2, 1 << 20, BoundKind::Main);
        assert!((b - 53.93909).abs() < 1e-3, "{b}");
        let b = size_bound(2, 100, BoundKind::Main);
        assert!((b - 0.015486).abs() < 1e-4, "{b}");
        assert_eq!(size_bound(2, 600, BoundKind::Sqrt), 3.0);
    }

    #[test]
    fn peeling_tracks_induction_step() {
        // e(G - v) >= t_k(n)+1 - (k-1) >= t_k(n-1)+1 along any sub-degree peel
        let k = 2u32;
        let mut g = cycle(8);
        // hang a path off vertex 0
        let mut edges: Vec<(u32, u32)> = g.edges().collect();
        edges.push((0, 8));
        edges.push((8, 9));
        g = Graph::from_edges(10, edges).unwrap();
        let mut e = g.edge_count() as i64;
        let mut n = g.vertex_count() as i64;
        let peel = peel_to_core(&g, k);
        if e >= t_alg(k, n) + 1 {
            for (&_v, &d) in peel.removed.iter().zip(&peel.removed_degrees) {
                assert!(d <= k - 1);
                e -= d as i64;
                n -= 1;
                assert!(e >= t_alg(k, n) + 1);
            }
        }
    }
}
