//! Good-set closure engine.
//!
//! A good set is grown by three rules: a degree-k vertex seeds a singleton
//! (rule 1); a vertex with at most k-1 neighbors outside a good set is
//! absorbed (rule 2); two good sets that intersect or are joined by an edge
//! merge (rule 3). The closure is confluent, so the family of maximal good
//! sets is unique; this module computes that family in near-linear time with
//! a union-find over components and a lazy candidate queue, and records a
//! replayable derivation trace for every set. Traces support the halving
//! step: dropping the last derivation step yields a good subset of at least
//! half the size.

use alloc::collections::{BTreeSet, BinaryHeap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::graph::{Graph, VertexSet};
use crate::{Error, Result};

/// One derivation step. `Absorb` extends the set built by the immediately
/// preceding step; `Merge` refers to earlier steps by index and carries the
/// witness that justified it (an edge `u v` meeting both sides, or `v v` for
/// a shared vertex).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStep {
    Seed { vertex: u32 },
    Absorb { vertex: u32 },
    Merge { left: u32, right: u32, witness: (u32, u32) },
}

/// Replayable derivation of a good set. Steps are listed children-first,
/// every subtree occupying a contiguous index range ending at its root; the
/// final step builds the full set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSetTrace {
    steps: Vec<TraceStep>,
}

impl GoodSetTrace {
    pub fn new(steps: Vec<TraceStep>) -> Self {
        GoodSetTrace { steps }
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Line-oriented serialization: `seed v`, `absorb v`,
    /// `merge <left> <right> via u v`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            match *step {
                TraceStep::Seed { vertex } => out.push_str(&format!("seed {vertex}\n")),
                TraceStep::Absorb { vertex } => out.push_str(&format!("absorb {vertex}\n")),
                TraceStep::Merge { left, right, witness } => out.push_str(&format!(
                    "merge {left} {right} via {} {}\n",
                    witness.0, witness.1
                )),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<GoodSetTrace> {
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let invalid = |reason: &str| Error::TraceInvalid {
                step: idx,
                reason: reason.to_string(),
            };
            let step = match toks.as_slice() {
                ["seed", v] => TraceStep::Seed {
                    vertex: v.parse().map_err(|_| invalid("bad vertex id"))?,
                },
                ["absorb", v] => TraceStep::Absorb {
                    vertex: v.parse().map_err(|_| invalid("bad vertex id"))?,
                },
                ["merge", l, r, "via", u, w] => TraceStep::Merge {
                    left: l.parse().map_err(|_| invalid("bad step index"))?,
                    right: r.parse().map_err(|_| invalid("bad step index"))?,
                    witness: (
                        u.parse().map_err(|_| invalid("bad vertex id"))?,
                        w.parse().map_err(|_| invalid("bad vertex id"))?,
                    ),
                },
                _ => return Err(invalid("unrecognized step")),
            };
            steps.push(step);
        }
        Ok(GoodSetTrace { steps })
    }

    /// Rewrites all vertex references through `f` (step indices unchanged).
    pub fn map_ids(&self, mut f: impl FnMut(u32) -> u32) -> GoodSetTrace {
        let steps = self
            .steps
            .iter()
            .map(|step| match *step {
                TraceStep::Seed { vertex } => TraceStep::Seed { vertex: f(vertex) },
                TraceStep::Absorb { vertex } => TraceStep::Absorb { vertex: f(vertex) },
                TraceStep::Merge { left, right, witness } => TraceStep::Merge {
                    left,
                    right,
                    witness: (f(witness.0), f(witness.1)),
                },
            })
            .collect();
        GoodSetTrace { steps }
    }
}

/// A good set together with its derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSet {
    pub vertices: VertexSet,
    pub trace: GoodSetTrace,
}

impl GoodSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn min_id(&self) -> u32 {
        self.vertices.min_id().expect("good sets are nonempty")
    }
}

/// Count of edges of `g` with at least one endpoint in `c`.
pub fn edges_meeting(g: &Graph, c: &VertexSet) -> Result<usize> {
    let n = g.vertex_count();
    if let Some(bad) = c.iter().find(|&v| v as usize >= n) {
        return Err(Error::IdOutOfRange { id: bad, vertex_count: n });
    }
    let mut deg_sum = 0usize;
    let mut internal = 0usize;
    for v in c.iter() {
        deg_sum += g.degree(v);
        internal += g.neighbors(v).iter().filter(|&&w| w > v && c.contains(w)).count();
    }
    Ok(deg_sum - internal)
}

fn assert_edge_bound(g: &Graph, k: u32, c: &VertexSet) {
    // Claim: when delta(G) >= k, every good set meets at most (k-1)|C|+1
    // edges. Below that degree floor the closure can bridge through
    // low-degree vertices and the bound genuinely fails, so it is only
    // asserted where it is a theorem.
    if g.min_degree().map_or(true, |d| d < k as usize) {
        return;
    }
    let meets = edges_meeting(g, c).expect("good set ids in range");
    assert!(
        meets <= (k as usize - 1) * c.len() + 1,
        "good-set edge bound violated: {} edges meet a set of size {} (k={})",
        meets,
        c.len(),
        k
    );
}

/// Replays a trace against `g`, validating every step against the three
/// rules, and returns the vertex set it builds. Handles arbitrary
/// rule-conforming traces, including merges justified by a shared vertex.
pub fn replay_trace(g: &Graph, k: u32, trace: &GoodSetTrace) -> Result<VertexSet> {
    let steps = trace.steps();
    let invalid = |step: usize, reason: &str| Error::TraceInvalid {
        step,
        reason: reason.to_string(),
    };
    if steps.is_empty() {
        return Err(invalid(0, "empty trace"));
    }
    let n = g.vertex_count();
    let check_id = |v: u32| {
        if (v as usize) < n {
            Ok(())
        } else {
            Err(Error::IdOutOfRange { id: v, vertex_count: n })
        }
    };
    let mut sets: Vec<Option<BTreeSet<u32>>> = Vec::with_capacity(steps.len());
    let mut live = 0usize;
    for (i, step) in steps.iter().enumerate() {
        match *step {
            TraceStep::Seed { vertex } => {
                check_id(vertex)?;
                if g.degree(vertex) != k as usize {
                    return Err(invalid(i, "rule 1: seed vertex degree is not k"));
                }
                let mut s = BTreeSet::new();
                s.insert(vertex);
                sets.push(Some(s));
                live += 1;
            }
            TraceStep::Absorb { vertex } => {
                check_id(vertex)?;
                if i == 0 {
                    return Err(invalid(i, "absorb has no preceding step"));
                }
                let mut base = match sets[i - 1].take() {
                    Some(s) => s,
                    None => return Err(invalid(i, "absorb base already consumed")),
                };
                if base.contains(&vertex) {
                    return Err(invalid(i, "rule 2: vertex already in the set"));
                }
                let outside = g
                    .neighbors(vertex)
                    .iter()
                    .filter(|w| !base.contains(w))
                    .count();
                if outside > k as usize - 1 {
                    return Err(invalid(i, "rule 2: more than k-1 neighbors outside"));
                }
                base.insert(vertex);
                sets.push(Some(base));
            }
            TraceStep::Merge { left, right, witness } => {
                let (l, r) = (left as usize, right as usize);
                if l >= i || r >= i || l == r {
                    return Err(invalid(i, "merge refers to invalid steps"));
                }
                let a = match sets[l].take() {
                    Some(s) => s,
                    None => return Err(invalid(i, "merge left side already consumed")),
                };
                let b = match sets[r].take() {
                    Some(s) => s,
                    None => return Err(invalid(i, "merge right side already consumed")),
                };
                let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                let intersects = small.iter().any(|v| big.contains(v));
                if !intersects {
                    let (u, w) = witness;
                    check_id(u)?;
                    check_id(w)?;
                    if u == w || !g.has_edge(u, w) {
                        return Err(invalid(i, "rule 3: witness edge missing"));
                    }
                    let meets_both = (big.contains(&u) && small.contains(&w))
                        || (big.contains(&w) && small.contains(&u));
                    if !meets_both {
                        return Err(invalid(i, "rule 3: witness edge does not meet both sides"));
                    }
                }
                big.extend(small);
                sets.push(Some(big));
                live -= 1;
            }
        }
    }
    if live != 1 {
        return Err(invalid(
            steps.len() - 1,
            "trace does not combine into a single set",
        ));
    }
    let last = sets
        .pop()
        .flatten()
        .expect("final step is never consumed");
    Ok(VertexSet::from_sorted(last.into_iter().collect()))
}

/// Computes the family of maximal good sets in the default deterministic
/// order (vertices processed lowest id first, merges before absorbs).
pub fn maximal_good_sets(g: &Graph, k: u32) -> Vec<GoodSet> {
    let order: Vec<u32> = (0..g.vertex_count() as u32).collect();
    maximal_good_sets_with_order(g, k, &order)
}

/// Same family under an arbitrary worklist order (a permutation of the
/// vertex ids). The family of maximal vertex sets is order-invariant;
/// only the traces differ.
pub fn maximal_good_sets_with_order(g: &Graph, k: u32, order: &[u32]) -> Vec<GoodSet> {
    debug_assert!(k >= 2);
    debug_assert_eq!(order.len(), g.vertex_count());
    let mut engine = Engine::new(g, k, order);
    engine.run();
    engine.finish()
}

#[derive(Debug, Clone, Copy)]
enum ArenaNode {
    Seed { vertex: u32 },
    Absorb { base: u32, vertex: u32 },
    Merge { left: u32, right: u32, witness: (u32, u32) },
}

struct Engine<'a> {
    g: &'a Graph,
    k: usize,
    rank: Vec<u32>,
    parent: Vec<u32>,
    in_set: Vec<bool>,
    members: Vec<Vec<u32>>,
    comp_min: Vec<u32>,
    comp_trace: Vec<u32>,
    comp_count: usize,
    in_cnt: Vec<u32>,
    arena: Vec<ArenaNode>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
    merge_q: VecDeque<(u32, u32)>,
    cnt_scratch: Vec<u32>,
    touched: Vec<u32>,
    min_in_set: u32,
}

impl<'a> Engine<'a> {
    fn new(g: &'a Graph, k: u32, order: &[u32]) -> Self {
        let n = g.vertex_count();
        let mut rank = vec![0u32; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        Engine {
            g,
            k: k as usize,
            rank,
            parent: (0..n as u32).collect(),
            in_set: vec![false; n],
            members: vec![Vec::new(); n],
            comp_min: vec![u32::MAX; n],
            comp_trace: vec![u32::MAX; n],
            comp_count: 0,
            in_cnt: vec![0; n],
            arena: Vec::new(),
            heap: BinaryHeap::new(),
            merge_q: VecDeque::new(),
            cnt_scratch: vec![0; n],
            touched: Vec::new(),
            min_in_set: u32::MAX,
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = self.parent[v as usize];
        }
        v
    }

    fn push_candidate(&mut self, v: u32) {
        // necessary condition for rule 2 against any single component
        if !self.in_set[v as usize]
            && self.g.degree(v) <= self.in_cnt[v as usize] as usize + self.k - 1
        {
            self.heap.push(Reverse((self.rank[v as usize], v)));
        }
    }

    fn run(&mut self) {
        let g = self.g;
        let n = g.vertex_count();
        let order: Vec<u32> = {
            let mut by_rank: Vec<u32> = (0..n as u32).collect();
            by_rank.sort_unstable_by_key(|&v| self.rank[v as usize]);
            by_rank
        };
        // rule 1: every degree-k vertex seeds a singleton
        for &v in &order {
            if g.degree(v) == self.k {
                self.in_set[v as usize] = true;
                self.members[v as usize].push(v);
                self.comp_min[v as usize] = v;
                self.arena.push(ArenaNode::Seed { vertex: v });
                self.comp_trace[v as usize] = (self.arena.len() - 1) as u32;
                self.comp_count += 1;
                self.min_in_set = self.min_in_set.min(v);
            }
        }
        if self.comp_count == 0 {
            return;
        }
        for &v in &order {
            if self.in_set[v as usize] {
                for &w in g.neighbors(v) {
                    if self.in_set[w as usize] {
                        if w > v {
                            self.merge_q.push_back((v, w));
                        }
                    } else {
                        self.in_cnt[w as usize] += 1;
                    }
                }
            }
        }
        for &v in &order {
            self.push_candidate(v);
        }
        let low_degree_exists = (0..n as u32).any(|v| g.degree(v) < self.k);
        loop {
            self.drain_merges();
            while let Some(Reverse((_, v))) = self.heap.pop() {
                if !self.in_set[v as usize] {
                    self.try_absorb(v);
                }
                self.drain_merges();
            }
            // a vertex of degree <= k-1 is absorbable into every good set,
            // so it bridges all components into one (rule 2 then rule 3 via
            // the shared vertex)
            if low_degree_exists && self.comp_count >= 2 {
                self.bridge_collapse();
            } else {
                break;
            }
        }
    }

    fn try_absorb(&mut self, v: u32) {
        let deg = self.g.degree(v);
        debug_assert!(self.touched.is_empty());
        for i in 0..deg {
            let w = self.g.neighbors(v)[i];
            if self.in_set[w as usize] {
                let r = self.find(w);
                if self.cnt_scratch[r as usize] == 0 {
                    self.touched.push(r);
                }
                self.cnt_scratch[r as usize] += 1;
            }
        }
        let mut best: Option<(u32, u32)> = None; // (cnt, root)
        for &r in &self.touched {
            let cnt = self.cnt_scratch[r as usize];
            let better = match best {
                None => true,
                Some((bc, br)) => {
                    cnt > bc
                        || (cnt == bc
                            && self.comp_min[r as usize] < self.comp_min[br as usize])
                }
            };
            if better {
                best = Some((cnt, r));
            }
        }
        for r in self.touched.drain(..) {
            self.cnt_scratch[r as usize] = 0;
        }
        let (best_cnt, target) = match best {
            Some((c, r)) => (c as usize, r),
            // no neighbor in any component: absorbable only if deg <= k-1,
            // into the component holding the smallest in-set vertex
            None => (0, self.find(self.min_in_set)),
        };
        if deg > best_cnt + self.k - 1 {
            return;
        }
        self.arena.push(ArenaNode::Absorb {
            base: self.comp_trace[target as usize],
            vertex: v,
        });
        self.comp_trace[target as usize] = (self.arena.len() - 1) as u32;
        self.in_set[v as usize] = true;
        self.parent[v as usize] = target;
        self.members[target as usize].push(v);
        self.comp_min[target as usize] = self.comp_min[target as usize].min(v);
        self.min_in_set = self.min_in_set.min(v);
        for i in 0..deg {
            let w = self.g.neighbors(v)[i];
            if self.in_set[w as usize] {
                if self.find(w) != target {
                    self.merge_q.push_back((v, w));
                }
            } else {
                self.in_cnt[w as usize] += 1;
                self.push_candidate(w);
            }
        }
    }

    fn drain_merges(&mut self) {
        while let Some((u, w)) = self.merge_q.pop_front() {
            let ru = self.find(u);
            let rw = self.find(w);
            if ru == rw {
                continue;
            }
            let node = ArenaNode::Merge {
                left: self.comp_trace[ru as usize],
                right: self.comp_trace[rw as usize],
                witness: (u, w),
            };
            self.union_components(ru, rw, node);
        }
    }

    /// Unions two component roots under the given already-built merge node.
    /// The smaller side is relocated and its boundary rescanned: merging can
    /// newly satisfy rule 2 for outside vertices whose neighbors were split
    /// between the two sides.
    fn union_components(&mut self, ra: u32, rb: u32, node: ArenaNode) {
        let (big, small) =
            if self.members[ra as usize].len() >= self.members[rb as usize].len() {
                (ra, rb)
            } else {
                (rb, ra)
            };
        let moved = core::mem::take(&mut self.members[small as usize]);
        for &x in &moved {
            for &y in self.g.neighbors(x) {
                self.push_candidate(y);
            }
        }
        self.members[big as usize].extend(moved);
        self.parent[small as usize] = big;
        self.comp_min[big as usize] =
            self.comp_min[big as usize].min(self.comp_min[small as usize]);
        self.arena.push(node);
        self.comp_trace[big as usize] = (self.arena.len() - 1) as u32;
        self.comp_count -= 1;
    }

    /// Merges all components into one through the lowest-rank vertex of
    /// degree <= k-1. Such a vertex b already sits in some component (it is
    /// always absorbable); for every other component T, `T + b` is good by
    /// rule 2 and intersects b's component, so rule 3 merges them.
    fn bridge_collapse(&mut self) {
        let n = self.g.vertex_count();
        let b = (0..n as u32)
            .filter(|&v| self.g.degree(v) < self.k)
            .min_by_key(|&v| self.rank[v as usize])
            .expect("caller checked a low-degree vertex exists");
        debug_assert!(self.in_set[b as usize]);
        let mut roots: Vec<u32> = (0..n as u32)
            .filter(|&v| self.in_set[v as usize] && self.find(v) == v)
            .collect();
        roots.sort_unstable_by_key(|&r| self.comp_min[r as usize]);
        for r in roots {
            // every union below involves b's component, so a listed root is
            // either still a root or already merged into it
            let home = self.find(b);
            if self.find(r) == home {
                continue;
            }
            self.arena.push(ArenaNode::Absorb {
                base: self.comp_trace[r as usize],
                vertex: b,
            });
            let absorbed = (self.arena.len() - 1) as u32;
            let node = ArenaNode::Merge {
                left: self.comp_trace[home as usize],
                right: absorbed,
                witness: (b, b),
            };
            // the absorb node is folded into r's trace before the union
            self.comp_trace[r as usize] = absorbed;
            self.union_components(home, r, node);
        }
    }

    fn finish(&mut self) -> Vec<GoodSet> {
        let g = self.g;
        let n = g.vertex_count();
        let mut roots: Vec<u32> = (0..n as u32)
            .filter(|&v| self.in_set[v as usize] && self.find(v) == v)
            .collect();
        roots.sort_unstable_by_key(|&r| self.comp_min[r as usize]);
        let mut step_index = vec![0u32; self.arena.len()];
        let mut out = Vec::with_capacity(roots.len());
        for &r in &roots {
            let vertices = VertexSet::from_unsorted(self.members[r as usize].clone());
            let trace = self.extract_trace(self.comp_trace[r as usize], &mut step_index);
            out.push(GoodSet { vertices, trace });
        }
        self.check_postconditions(&out);
        out
    }

    fn extract_trace(&self, root: u32, step_index: &mut [u32]) -> GoodSetTrace {
        enum Frame {
            Enter(u32),
            Exit(u32),
        }
        let mut steps = Vec::new();
        let mut stack = vec![Frame::Enter(root)];
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Enter(i) => {
                    stack.push(Frame::Exit(i));
                    match self.arena[i as usize] {
                        ArenaNode::Seed { .. } => {}
                        ArenaNode::Absorb { base, .. } => stack.push(Frame::Enter(base)),
                        ArenaNode::Merge { left, right, .. } => {
                            stack.push(Frame::Enter(right));
                            stack.push(Frame::Enter(left));
                        }
                    }
                }
                Frame::Exit(i) => {
                    let step = match self.arena[i as usize] {
                        ArenaNode::Seed { vertex } => TraceStep::Seed { vertex },
                        ArenaNode::Absorb { base, vertex } => {
                            debug_assert_eq!(
                                step_index[base as usize] as usize,
                                steps.len() - 1,
                                "absorb base must be the preceding step"
                            );
                            TraceStep::Absorb { vertex }
                        }
                        ArenaNode::Merge { left, right, witness } => TraceStep::Merge {
                            left: step_index[left as usize],
                            right: step_index[right as usize],
                            witness,
                        },
                    };
                    steps.push(step);
                    step_index[i as usize] = (steps.len() - 1) as u32;
                }
            }
        }
        GoodSetTrace { steps }
    }

    fn check_postconditions(&mut self, family: &[GoodSet]) {
        let g = self.g;
        // no cross edges between distinct maximal sets
        for (u, w) in g.edges() {
            if self.in_set[u as usize] && self.in_set[w as usize] {
                assert_eq!(
                    self.find(u),
                    self.find(w),
                    "maximal good sets must have no cross edges"
                );
            }
        }
        // every degree-k vertex covered exactly once (sets are disjoint by
        // construction, so covered-once reduces to membership)
        for v in 0..g.vertex_count() as u32 {
            if g.degree(v) == self.k {
                assert!(
                    self.in_set[v as usize],
                    "degree-k vertex {v} missing from the family"
                );
            }
        }
        for set in family {
            assert_edge_bound(g, self.k as u32, &set.vertices);
            validate_engine_trace(g, self.k as u32, set);
        }
    }
}

/// Fast structural validation of an engine-produced trace: replays it with
/// flat arrays (valid because engine subtrees are disjoint except for
/// bridge-duplicated low-degree vertices) and checks it rebuilds exactly the
/// claimed vertex set. Falls back to the general replay when a vertex
/// appears in more than one step.
fn validate_engine_trace(g: &Graph, k: u32, set: &GoodSet) {
    let steps = set.trace.steps();
    let mut seen = vec![false; g.vertex_count()];
    let mut duplicated = false;
    for step in steps {
        if let TraceStep::Seed { vertex } | TraceStep::Absorb { vertex } = *step {
            if seen[vertex as usize] {
                duplicated = true;
                break;
            }
            seen[vertex as usize] = true;
        }
    }
    let rebuilt = if duplicated {
        replay_trace(g, k, &set.trace).expect("engine trace must replay")
    } else {
        replay_disjoint(g, k, &set.trace).expect("engine trace must replay")
    };
    assert_eq!(
        rebuilt, set.vertices,
        "engine trace does not rebuild its vertex set"
    );
}

/// Array-based replay for traces in which every vertex enters exactly once.
/// Union-find over step ids tracks which set each vertex currently belongs
/// to, giving O((n+m) alpha) validation.
fn replay_disjoint(g: &Graph, k: u32, trace: &GoodSetTrace) -> Result<VertexSet> {
    let steps = trace.steps();
    let invalid = |step: usize, reason: &str| Error::TraceInvalid {
        step,
        reason: reason.to_string(),
    };
    if steps.is_empty() {
        return Err(invalid(0, "empty trace"));
    }
    let n = g.vertex_count();
    let mut owner = vec![u32::MAX; n];
    let mut parent: Vec<u32> = (0..steps.len() as u32).collect();
    let mut consumed = vec![false; steps.len()];
    let mut live = 0usize;
    fn find(parent: &mut [u32], mut s: u32) -> u32 {
        while parent[s as usize] != s {
            let p = parent[s as usize];
            parent[s as usize] = parent[p as usize];
            s = parent[s as usize];
        }
        s
    }
    for (i, step) in steps.iter().enumerate() {
        match *step {
            TraceStep::Seed { vertex } => {
                if (vertex as usize) >= n {
                    return Err(Error::IdOutOfRange { id: vertex, vertex_count: n });
                }
                if g.degree(vertex) != k as usize {
                    return Err(invalid(i, "rule 1: seed vertex degree is not k"));
                }
                if owner[vertex as usize] != u32::MAX {
                    return Err(invalid(i, "vertex enters twice"));
                }
                owner[vertex as usize] = i as u32;
                live += 1;
            }
            TraceStep::Absorb { vertex } => {
                if (vertex as usize) >= n {
                    return Err(Error::IdOutOfRange { id: vertex, vertex_count: n });
                }
                if i == 0 || consumed[i - 1] {
                    return Err(invalid(i, "absorb base unavailable"));
                }
                if owner[vertex as usize] != u32::MAX {
                    return Err(invalid(i, "vertex enters twice"));
                }
                let base = find(&mut parent, (i - 1) as u32);
                let outside = g
                    .neighbors(vertex)
                    .iter()
                    .filter(|&&w| {
                        owner[w as usize] == u32::MAX
                            || find(&mut parent, owner[w as usize]) != base
                    })
                    .count();
                if outside > k as usize - 1 {
                    return Err(invalid(i, "rule 2: more than k-1 neighbors outside"));
                }
                owner[vertex as usize] = i as u32;
                consumed[i - 1] = true;
                parent[i - 1] = i as u32;
            }
            TraceStep::Merge { left, right, witness } => {
                let (l, r) = (left as usize, right as usize);
                if l >= i || r >= i || l == r || consumed[l] || consumed[r] {
                    return Err(invalid(i, "merge operands unavailable"));
                }
                let (u, w) = witness;
                if (u as usize) >= n || (w as usize) >= n {
                    return Err(Error::IdOutOfRange { id: u.max(w), vertex_count: n });
                }
                if u == w || !g.has_edge(u, w) {
                    return Err(invalid(i, "rule 3: witness edge missing"));
                }
                let ou = owner[u as usize];
                let ow = owner[w as usize];
                if ou == u32::MAX || ow == u32::MAX {
                    return Err(invalid(i, "rule 3: witness endpoints not in the sides"));
                }
                let (cu, cw) = (find(&mut parent, ou), find(&mut parent, ow));
                let meets = (cu == left && cw == right) || (cu == right && cw == left);
                if !meets {
                    return Err(invalid(i, "rule 3: witness edge does not meet both sides"));
                }
                consumed[l] = true;
                consumed[r] = true;
                parent[l] = i as u32;
                parent[r] = i as u32;
                live -= 1;
            }
        }
    }
    if live != 1 || consumed[steps.len() - 1] {
        return Err(invalid(steps.len() - 1, "trace does not combine into a single set"));
    }
    let last = (steps.len() - 1) as u32;
    let vertices: Vec<u32> = (0..n as u32)
        .filter(|&v| {
            owner[v as usize] != u32::MAX && find(&mut parent, owner[v as usize]) == last
        })
        .collect();
    Ok(VertexSet::from_sorted(vertices))
}

/// Per-step shape data for contiguous tree traces: subtree step span,
/// vertex count, and minimum vertex.
struct TraceShape {
    span: Vec<u32>,
    size: Vec<u64>,
    min_vertex: Vec<u32>,
    duplicated: bool,
}

fn analyze(trace: &GoodSetTrace) -> Result<TraceShape> {
    let steps = trace.steps();
    let invalid = |step: usize, reason: &str| Error::TraceInvalid {
        step,
        reason: reason.to_string(),
    };
    let mut span = vec![0u32; steps.len()];
    let mut size = vec![0u64; steps.len()];
    let mut min_vertex = vec![u32::MAX; steps.len()];
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut duplicated = false;
    for (i, step) in steps.iter().enumerate() {
        match *step {
            TraceStep::Seed { vertex } => {
                span[i] = 1;
                size[i] = 1;
                min_vertex[i] = vertex;
                duplicated |= !seen.insert(vertex);
            }
            TraceStep::Absorb { vertex } => {
                if i == 0 {
                    return Err(invalid(i, "absorb has no preceding step"));
                }
                span[i] = span[i - 1] + 1;
                size[i] = size[i - 1] + 1;
                min_vertex[i] = min_vertex[i - 1].min(vertex);
                duplicated |= !seen.insert(vertex);
            }
            TraceStep::Merge { left, right, .. } => {
                let (l, r) = (left as usize, right as usize);
                if r != i - 1 || l >= r {
                    return Err(invalid(i, "merge operands are not contiguous subtrees"));
                }
                let right_start = i - span[r] as usize;
                if l + 1 != right_start {
                    return Err(invalid(i, "merge operands are not contiguous subtrees"));
                }
                span[i] = span[l] + span[r] + 1;
                size[i] = size[l] + size[r];
                min_vertex[i] = min_vertex[l].min(min_vertex[r]);
            }
        }
    }
    if span[steps.len() - 1] as usize != steps.len() {
        return Err(invalid(steps.len() - 1, "trailing steps outside the derivation tree"));
    }
    Ok(TraceShape { span, size, min_vertex, duplicated })
}

/// Vertices entering within a step slice (each Seed/Absorb vertex, dedup).
fn slice_vertices(steps: &[TraceStep]) -> VertexSet {
    steps
        .iter()
        .filter_map(|s| match *s {
            TraceStep::Seed { vertex } | TraceStep::Absorb { vertex } => Some(vertex),
            TraceStep::Merge { .. } => None,
        })
        .collect()
}

/// Extracts the subtree ending at `end` (inclusive) as a standalone trace.
fn slice_trace(steps: &[TraceStep], shape: &TraceShape, end: usize) -> GoodSetTrace {
    let start = end + 1 - shape.span[end] as usize;
    let shift = start as u32;
    let steps = steps[start..=end]
        .iter()
        .map(|s| match *s {
            TraceStep::Merge { left, right, witness } => TraceStep::Merge {
                left: left - shift,
                right: right - shift,
                witness,
            },
            other => other,
        })
        .collect();
    GoodSetTrace { steps }
}

fn subtree_good_set(trace: &GoodSetTrace, shape: &TraceShape, end: usize) -> GoodSet {
    let sub = slice_trace(trace.steps(), shape, end);
    let vertices = slice_vertices(sub.steps());
    GoodSet { vertices, trace: sub }
}

fn subtree_size(trace: &GoodSetTrace, shape: &TraceShape, end: usize) -> u64 {
    if shape.duplicated {
        let start = end + 1 - shape.span[end] as usize;
        slice_vertices(&trace.steps()[start..=end]).len() as u64
    } else {
        shape.size[end]
    }
}

/// Drops the final derivation step: a good subset C' with
/// `|C|/2 <= |C'| <= |C|-1`. A final absorb drops that vertex; a final merge
/// keeps the larger side (ties: the side containing the smallest id).
pub fn half_subset(g: &Graph, k: u32, m: &GoodSet) -> Result<GoodSet> {
    if m.len() <= 1 {
        return Err(Error::SingletonGoodSet);
    }
    let shape = analyze(&m.trace)?;
    let steps = m.trace.steps();
    let last = steps.len() - 1;
    let result = match steps[last] {
        TraceStep::Seed { .. } => return Err(Error::SingletonGoodSet),
        TraceStep::Absorb { .. } => subtree_good_set(&m.trace, &shape, last - 1),
        TraceStep::Merge { left, right, .. } => {
            let (l, r) = (left as usize, right as usize);
            let (sl, sr) = (
                subtree_size(&m.trace, &shape, l),
                subtree_size(&m.trace, &shape, r),
            );
            let pick = if sl > sr {
                l
            } else if sr > sl {
                r
            } else if shape.min_vertex[l] <= shape.min_vertex[r] {
                l
            } else {
                r
            };
            subtree_good_set(&m.trace, &shape, pick)
        }
    };
    let (c, cp) = (m.len(), result.len());
    assert!(
        2 * cp >= c && cp <= c - 1,
        "halving bounds violated: |C|={c}, |C'|={cp}"
    );
    assert_edge_bound(g, k, &result.vertices);
    Ok(result)
}

/// Repeated halving until the size lies in `[lo, hi]`. Implemented as a
/// single descent through the derivation tree, which is step-for-step the
/// same rule `half_subset` applies. Requires `hi >= 2*lo - 1` so that
/// halving cannot jump over the window.
pub fn shrink_to_range(g: &Graph, k: u32, m: &GoodSet, lo: f64, hi: f64) -> Result<GoodSet> {
    assert!(hi >= 2.0 * lo - 1.0, "window [{lo}, {hi}] can be jumped over");
    if (m.len() as f64) < lo {
        return Err(Error::SetTooSmall { size: m.len(), lo });
    }
    if m.len() as f64 <= hi {
        return Ok(m.clone());
    }
    assert!(hi >= 1.0, "window top below 1 cannot hold any good set");
    let shape = analyze(&m.trace)?;
    let steps = m.trace.steps();
    let mut cur = steps.len() - 1;
    while subtree_size(&m.trace, &shape, cur) as f64 > hi {
        match steps[cur] {
            TraceStep::Seed { .. } => return Err(Error::SingletonGoodSet),
            TraceStep::Absorb { .. } => cur -= 1,
            TraceStep::Merge { left, right, .. } => {
                let (l, r) = (left as usize, right as usize);
                let (sl, sr) = (
                    subtree_size(&m.trace, &shape, l),
                    subtree_size(&m.trace, &shape, r),
                );
                cur = if sl > sr {
                    l
                } else if sr > sl {
                    r
                } else if shape.min_vertex[l] <= shape.min_vertex[r] {
                    l
                } else {
                    r
                };
            }
        }
    }
    let result = subtree_good_set(&m.trace, &shape, cur);
    assert!(
        result.len() as f64 >= lo,
        "halving fell through the window floor: size {} < {lo}",
        result.len()
    );
    assert_edge_bound(g, k, &result.vertices);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_random_with_edges, gen_wheel};
    use crate::graph::Graph;
    use alloc::collections::BTreeSet as Set;

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

    fn families(sets: &[GoodSet]) -> Set<Vec<u32>> {
        sets.iter().map(|s| s.vertices.as_slice().to_vec()).collect()
    }

    #[test]
    fn cycle_closes_to_whole() {
        let sets = maximal_good_sets(&cycle(5), 2);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].vertices.len(), 5);
    }

    #[test]
    fn two_cycles_stay_separate() {
        let mut edges: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5u32).map(|i| (5 + i, 5 + (i + 1) % 5)));
        let g = Graph::from_edges(10, edges).unwrap();
        let sets = maximal_good_sets(&g, 2);
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].vertices.as_slice(), &[0, 1, 2, 3, 4]);
        assert_eq!(sets[1].vertices.as_slice(), &[5, 6, 7, 8, 9]);
    }

    #[test]
    fn clique_has_no_seeds() {
        assert!(maximal_good_sets(&complete(5), 2).is_empty());
    }

    #[test]
    fn replay_seed_examples() {
        let c5 = cycle(5);
        let t = GoodSetTrace::new(vec![TraceStep::Seed { vertex: 0 }]);
        assert_eq!(replay_trace(&c5, 2, &t).unwrap().as_slice(), &[0]);

        let t = GoodSetTrace::new(vec![
            TraceStep::Seed { vertex: 0 },
            TraceStep::Seed { vertex: 1 },
            TraceStep::Merge { left: 0, right: 1, witness: (0, 1) },
        ]);
        assert_eq!(replay_trace(&c5, 2, &t).unwrap().as_slice(), &[0, 1]);

        let k5 = complete(5);
        let t = GoodSetTrace::new(vec![TraceStep::Seed { vertex: 0 }]);
        assert!(matches!(
            replay_trace(&k5, 2, &t),
            Err(Error::TraceInvalid { step: 0, .. })
        ));
    }

    #[test]
    fn replay_rejects_bad_absorb() {
        let c5 = cycle(5);
        // vertex 2 has both neighbors outside {0}
        let t = GoodSetTrace::new(vec![
            TraceStep::Seed { vertex: 0 },
            TraceStep::Absorb { vertex: 2 },
        ]);
        assert!(matches!(
            replay_trace(&c5, 2, &t),
            Err(Error::TraceInvalid { step: 1, .. })
        ));
    }

    #[test]
    fn trace_text_round_trip() {
        let sets = maximal_good_sets(&cycle(6), 2);
        let text = sets[0].trace.to_text();
        let parsed = GoodSetTrace::parse(&text).unwrap();
        assert_eq!(parsed, sets[0].trace);
    }

    #[test]
    fn engine_traces_replay_everywhere() {
        for seed in 0..40u64 {
            let g = gen_random_with_edges(10, 14, seed).unwrap();
            for k in 2..=4u32 {
                for set in maximal_good_sets(&g, k) {
                    let rebuilt = replay_trace(&g, k, &set.trace).unwrap();
                    assert_eq!(rebuilt, set.vertices);
                }
            }
        }
    }

    #[test]
    fn edges_meeting_examples() {
        let w = gen_wheel(3, 6).unwrap();
        let all: VertexSet = (0..6).collect();
        let meets = edges_meeting(&w, &all).unwrap();
        assert_eq!(meets, 10);
        assert!(meets <= 2 * 6 + 1);

        let c5 = cycle(5);
        let single: VertexSet = [0u32].into_iter().collect();
        assert_eq!(edges_meeting(&c5, &single).unwrap(), 2);
        assert_eq!(edges_meeting(&c5, &VertexSet::new()).unwrap(), 0);
    }

    #[test]
    fn half_subset_drops_last_step() {
        let c5 = cycle(5);
        let sets = maximal_good_sets(&c5, 2);
        let half = half_subset(&c5, 2, &sets[0]).unwrap();
        assert!(half.len() >= 3 && half.len() <= 4);
        assert_eq!(replay_trace(&c5, 2, &half.trace).unwrap(), half.vertices);

        // singleton rejection: a seed-only set
        let k5_plus = {
            // one degree-2 vertex hanging off K4: seed stays singleton
            let mut edges = vec![(0u32, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            edges.push((0, 4));
            edges.push((1, 4));
            Graph::from_edges(5, edges).unwrap()
        };
        let sets = maximal_good_sets(&k5_plus, 2);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].len(), 1);
        assert!(matches!(
            half_subset(&k5_plus, 2, &sets[0]),
            Err(Error::SingletonGoodSet)
        ));
    }

    #[test]
    fn shrink_matches_iterated_halving() {
        for seed in 0..30u64 {
            let g = gen_random_with_edges(14, 20, seed).unwrap();
            for set in maximal_good_sets(&g, 2) {
                if set.len() < 4 {
                    continue;
                }
                let lo = set.len() as f64 / 4.0;
                let hi = set.len() as f64 / 2.0;
                let direct = shrink_to_range(&g, 2, &set, lo, hi).unwrap();
                let mut iter = set.clone();
                while iter.len() as f64 > hi {
                    iter = half_subset(&g, 2, &iter).unwrap();
                }
                assert_eq!(direct.vertices, iter.vertices);
                assert!(direct.len() as f64 >= lo);
            }
        }
    }

    #[test]
    fn shrink_identity_and_too_small() {
        let c5 = cycle(5);
        let sets = maximal_good_sets(&c5, 2);
        let same = shrink_to_range(&c5, 2, &sets[0], 3.0, 5.0).unwrap();
        assert_eq!(same.vertices, sets[0].vertices);
        assert!(matches!(
            shrink_to_range(&c5, 2, &sets[0], 8.0, 16.0),
            Err(Error::SetTooSmall { .. })
        ));
    }

    #[test]
    fn order_invariance_of_family() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for seed in 0..20u64 {
            let g = gen_random_with_edges(16, 26, seed).unwrap();
            for k in 2..=3u32 {
                let base = families(&maximal_good_sets(&g, k));
                for _ in 0..20 {
                    let mut order: Vec<u32> = (0..16).collect();
                    order.shuffle(&mut rng);
                    let shuffled = families(&maximal_good_sets_with_order(&g, k, &order));
                    assert_eq!(base, shuffled);
                }
            }
        }
    }

    #[test]
    fn low_degree_vertices_bridge_components() {
        // two 5-cycles plus an isolated vertex: the isolated vertex is
        // absorbable into every good set, so everything collapses into one
        let mut edges: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5u32).map(|i| (5 + i, 5 + (i + 1) % 5)));
        let g = Graph::from_edges(11, edges).unwrap();
        let sets = maximal_good_sets(&g, 2);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].len(), 11);
        let rebuilt = replay_trace(&g, 2, &sets[0].trace).unwrap();
        assert_eq!(rebuilt, sets[0].vertices);
    }

    #[test]
    fn degree_k_vertices_covered_once() {
        for seed in 100..140u64 {
            let g = gen_random_with_edges(12, 18, seed).unwrap();
            for k in 2..=4u32 {
                let sets = maximal_good_sets(&g, k);
                for v in 0..12u32 {
                    if g.degree(v) == k as usize {
                        let holders =
                            sets.iter().filter(|s| s.vertices.contains(v)).count();
                        assert_eq!(holders, 1);
                    }
                }
                // pairwise disjoint and non-adjacent
                for i in 0..sets.len() {
                    for j in (i + 1)..sets.len() {
                        assert!(sets[i].vertices.is_disjoint(&sets[j].vertices));
                        for u in sets[i].vertices.iter() {
                            for &w in g.neighbors(u) {
                                assert!(!sets[j].vertices.contains(w));
                            }
                        }
                    }
                }
            }
        }
    }
}
