//! End-to-end extraction: peel to the k-core, branch on the degree-k census
//! and the good-set structure, and return a small subgraph of minimum degree
//! k together with a certificate chain that an independent verifier can
//! replay. Also houses the greedy removal-chain baseline.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::conflict::{build_collection, build_conflict_graph, greedy_independent_set, neighbor_families, Collection};
use crate::cover::{build_cover_set, phi, CoverCertificate};
use crate::goodset::{edges_meeting, maximal_good_sets, replay_trace, shrink_to_range, GoodSet};
use crate::graph::{k_core, peel_to_core, size_bound, t_alg, t_threshold, BoundKind, Graph, VertexSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Theorem3,
    GreedyChain,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Theorem3 => "theorem3",
            Strategy::GreedyChain => "greedy-chain",
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        match s {
            "theorem3" => Some(Strategy::Theorem3),
            "greedy-chain" => Some(Strategy::GreedyChain),
            _ => None,
        }
    }
}

/// Which case of the algorithm produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Peeling alone already removed the full bound's worth of vertices.
    PeeledOnly,
    /// Some maximal good set exceeded n/(k+1); a halved subset was removed.
    LargeGoodSet,
    /// Collection, cover set, conflict graph, independent set.
    Main,
    /// Degree-k census below alpha*n; greedy chain substituted, no bound.
    Lemma4Fallback,
    /// Greedy chain requested explicitly.
    GreedyChain,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::PeeledOnly => "peeled-only",
            Branch::LargeGoodSet => "large-good-set",
            Branch::Main => "main",
            Branch::Lemma4Fallback => "lemma4-fallback",
            Branch::GreedyChain => "greedy-chain",
        }
    }

    pub fn parse(s: &str) -> Option<Branch> {
        match s {
            "peeled-only" => Some(Branch::PeeledOnly),
            "large-good-set" => Some(Branch::LargeGoodSet),
            "main" => Some(Branch::Main),
            "lemma4-fallback" => Some(Branch::Lemma4Fallback),
            "greedy-chain" => Some(Branch::GreedyChain),
            _ => None,
        }
    }
}

/// Closed-form expression for the claimed removable-vertex count, kept
/// symbolic so verification can recheck the arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuaranteeExpr {
    /// `n / (4 (k+1)^5 log2 n)`
    MainBound { k: u32, n: u64 },
    /// `n / (2k+2)`
    HalvingBound { k: u32, n: u64 },
}

impl GuaranteeExpr {
    pub fn evaluate(&self) -> f64 {
        match *self {
            GuaranteeExpr::MainBound { k, n } => size_bound(k, n, BoundKind::Main),
            GuaranteeExpr::HalvingBound { k, n } => n as f64 / (2 * k + 2) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guarantee {
    pub expr: GuaranteeExpr,
    pub removable: f64,
}

#[derive(Debug, Clone)]
pub struct StageStat {
    pub label: String,
    pub vertices: usize,
    pub edges: usize,
}

/// Certificate payload, everything in the ids of the input graph.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// Vertices peeled before the branch logic, in removal order.
    pub peel_order: Vec<u32>,
    pub detail: BranchCertificate,
}

#[derive(Debug, Clone)]
pub enum BranchCertificate {
    PeeledOnly,
    LargeGoodSet {
        /// The oversized maximal good set.
        maximal: GoodSet,
        /// Its halved subset that was removed.
        removed: GoodSet,
    },
    Main {
        collection: Collection,
        /// Present exactly when the remainder H had an empty k-core.
        cover: Option<CoverCertificate>,
        /// Indices of the independent set in `collection.members`.
        chosen: Vec<u32>,
    },
    /// One removed maximal good set per round (greedy chain and the
    /// census fallback).
    Chain { rounds: Vec<GoodSet> },
}

#[derive(Debug, Clone)]
pub struct ExtractionResult {
    /// Vertex set (input ids) inducing minimum degree >= k.
    pub subgraph: VertexSet,
    pub branch: Branch,
    /// Removal stages in order (input ids).
    pub removed: Vec<VertexSet>,
    pub guarantee: Option<Guarantee>,
    pub certificate: Certificate,
    pub stats: Vec<StageStat>,
}

fn complement(n: usize, set: &VertexSet) -> VertexSet {
    VertexSet::from_sorted((0..n as u32).filter(|&v| !set.contains(v)).collect())
}

fn map_set(set: &VertexSet, to_parent: &[u32]) -> VertexSet {
    VertexSet::from_unsorted(set.iter().map(|v| to_parent[v as usize]).collect())
}

fn map_good(set: &GoodSet, to_parent: &[u32]) -> GoodSet {
    GoodSet {
        vertices: map_set(&set.vertices, to_parent),
        trace: set.trace.map_ids(|v| to_parent[v as usize]),
    }
}

fn stage(label: &str, g: &Graph) -> StageStat {
    StageStat { label: label.to_string(), vertices: g.vertex_count(), edges: g.edge_count() }
}

const REL_SLACK: f64 = 1e-9;

fn within_bound(size: usize, n: usize, removable: f64) -> bool {
    (size as f64) <= n as f64 - removable + REL_SLACK * removable.max(1.0)
}

/// Runs the extraction algorithm. Requires `n >= k+1` and
/// `e >= t_k(n) + 1`; claim-level assertion failures inside indicate
/// implementation bugs and abort.
pub fn extract(g: &Graph, k: u32, strategy: Strategy) -> Result<ExtractionResult> {
    let n = g.vertex_count();
    let e = g.edge_count();
    if (n as u64) < k as u64 + 1 {
        return Err(Error::Hypothesis {
            detail: format!("n = {n} but the statement needs n >= k+1 = {}", k + 1),
        });
    }
    let threshold = t_threshold(k, n as u64).map_err(|_| Error::Hypothesis {
        detail: format!("n = {n} but the statement needs n >= k+1 = {}", k + 1),
    })?;
    if (e as u64) < threshold + 1 {
        return Err(Error::Hypothesis {
            detail: format!("e = {e} < t_{k}({n}) + 1 = {}", threshold + 1),
        });
    }

    // stage 1: peel to the k-core, tracking the induction step
    let peel = peel_to_core(g, k);
    let mut e_run = e as i64;
    let mut n_run = n as i64;
    for (&v, &d) in peel.removed.iter().zip(&peel.removed_degrees) {
        assert!(d < k, "peeled vertex {v} had degree {d} >= k");
        e_run -= d as i64;
        n_run -= 1;
        assert!(
            e_run >= t_alg(k, n_run) + 1,
            "induction step lost the edge hypothesis at n = {n_run}"
        );
    }
    assert!(
        !peel.core.is_empty(),
        "a graph above the threshold has a nonempty k-core"
    );
    let to_orig: Vec<u32> = peel.core.as_slice().to_vec();
    let g1 = g.induced(&peel.core)?;
    let n1 = g1.vertex_count();
    let e1 = g1.edge_count();
    assert_eq!(e1 as i64, e_run);
    assert!(n1 >= k as usize + 2, "hypothesis cannot survive at n = k+1");

    let mut stats = vec![stage("input", g), stage("k-core", &g1)];
    let mut removed: Vec<VertexSet> = Vec::new();
    if !peel.removed.is_empty() {
        removed.push(VertexSet::from_unsorted(peel.removed.clone()));
    }
    let peel_order = peel.removed.clone();

    if strategy == Strategy::GreedyChain {
        let (rounds, survivors) = chain_rounds(&g1, k);
        for r in &rounds {
            removed.push(map_set(&r.vertices, &to_orig));
        }
        let subgraph = map_set(&survivors, &to_orig);
        let result = ExtractionResult {
            subgraph,
            branch: Branch::GreedyChain,
            removed,
            guarantee: None,
            certificate: Certificate {
                peel_order,
                detail: BranchCertificate::Chain {
                    rounds: rounds.iter().map(|r| map_good(r, &to_orig)).collect(),
                },
            },
            stats,
        };
        finish_checks(g, k, &result);
        return Ok(result);
    }

    let main_expr = GuaranteeExpr::MainBound { k, n: n as u64 };
    let main_bound = main_expr.evaluate();

    // peeling alone can satisfy the bound when it is non-vacuous
    if main_bound >= 1.0 && ((n - n1) as f64) >= libm::ceil(main_bound) {
        stats.push(stage("subgraph", &g1));
        let result = ExtractionResult {
            subgraph: peel.core.clone(),
            branch: Branch::PeeledOnly,
            removed,
            guarantee: Some(Guarantee { expr: main_expr, removable: main_bound }),
            certificate: Certificate { peel_order, detail: BranchCertificate::PeeledOnly },
            stats,
        };
        finish_checks(g, k, &result);
        return Ok(result);
    }

    // stage 2: degree-k census against alpha = 1/(2k+2), exact in integers
    let census = g1.degree_census(k as usize);
    if census * (2 * k as usize + 2) < n1 {
        let (rounds, survivors) = chain_rounds(&g1, k);
        for r in &rounds {
            removed.push(map_set(&r.vertices, &to_orig));
        }
        let subgraph = map_set(&survivors, &to_orig);
        let result = ExtractionResult {
            subgraph,
            branch: Branch::Lemma4Fallback,
            removed,
            guarantee: None,
            certificate: Certificate {
                peel_order,
                detail: BranchCertificate::Chain {
                    rounds: rounds.iter().map(|r| map_good(r, &to_orig)).collect(),
                },
            },
            stats,
        };
        finish_checks(g, k, &result);
        return Ok(result);
    }

    // stage 3: maximal good sets; a set above n/(k+1) gets halved into
    // [n/(2k+2), n/(k+1)] and removed
    let sets = maximal_good_sets(&g1, k);
    if let Some(pos) = sets
        .iter()
        .position(|s| s.len() * (k as usize + 1) > n1)
    {
        let lo = n1 as f64 / (2 * k + 2) as f64;
        let hi = n1 as f64 / (k + 1) as f64;
        let removed_set = shrink_to_range(&g1, k, &sets[pos], lo, hi)
            .expect("oversized set admits a halved subset in the window");
        assert!(
            removed_set.len() <= n1 - k as usize - 1,
            "removed set too large for the edge-accounting step"
        );
        let keep = complement(n1, &removed_set.vertices);
        let g2 = g1.induced(&keep)?;
        // a good set meets few edges, so the remainder stays above t_k
        let v2 = n1 - removed_set.len();
        assert!(
            g2.edge_count() as i64 >= t_alg(k, v2 as i64),
            "remainder fell below the threshold after removing a good set"
        );
        let w = k_core(&g2, k);
        assert!(!w.is_empty(), "remainder above t_k must have a nonempty k-core");
        let keep_ids = keep.as_slice();
        let sub_g1: VertexSet =
            VertexSet::from_unsorted(w.iter().map(|i| keep_ids[i as usize]).collect());
        let subgraph = map_set(&sub_g1, &to_orig);
        let expr = GuaranteeExpr::HalvingBound { k, n: n as u64 };
        let removable = expr.evaluate();
        assert!(
            within_bound(subgraph.len(), n1, n1 as f64 / (2 * k + 2) as f64),
            "halving branch output exceeds n - n/(2k+2)"
        );
        stats.push(stage("after-removal", &g2));
        let g_final = g2.induced(&w)?;
        stats.push(stage("subgraph", &g_final));
        removed.push(map_set(&removed_set.vertices, &to_orig));
        let result = ExtractionResult {
            subgraph,
            branch: Branch::LargeGoodSet,
            removed,
            guarantee: Some(Guarantee { expr, removable }),
            certificate: Certificate {
                peel_order,
                detail: BranchCertificate::LargeGoodSet {
                    maximal: map_good(&sets[pos], &to_orig),
                    removed: map_good(&removed_set, &to_orig),
                },
            },
            stats,
        };
        finish_checks(g, k, &result);
        return Ok(result);
    }

    // stage 4: dyadic collection and the cover set of the remainder
    let sum_all: usize = sets.iter().map(GoodSet::len).sum();
    assert!(sum_all >= census, "degree-k vertices must be covered by the family");
    let coll = build_collection(sets, n1, k)
        .expect("census branch guarantees the collection mass precondition");
    let alpha_n = n1 as f64 / (2 * k + 2) as f64;
    let log_n1 = libm::log2(n1 as f64);
    assert!(
        coll.total_size as f64 >= alpha_n / log_n1 - REL_SLACK * alpha_n.max(1.0),
        "collection total below alpha n / log2 n"
    );
    assert!(coll.total_size < n1);
    let mut member_union = VertexSet::new();
    let mut meets_sum = 0usize;
    for m in &coll.members {
        member_union = member_union.union(&m.vertices);
        meets_sum += edges_meeting(&g1, &m.vertices).unwrap();
    }
    assert_eq!(member_union.len(), coll.total_size, "members must be disjoint");
    let keep_h = complement(n1, &member_union);
    let h = g1.induced(&keep_h)?;
    let v_h = n1 - coll.total_size;
    assert_eq!(h.vertex_count(), v_h);
    assert!(v_h >= 1);
    // members are pairwise non-adjacent, so removed edge sets are disjoint
    assert_eq!(h.edge_count(), e1 - meets_sum);
    assert!(
        h.edge_count() as i64 >= t_alg(k, v_h as i64) - coll.members.len() as i64 + 1,
        "edge accounting for the remainder came up short"
    );

    let keep_h_ids = keep_h.as_slice();
    let (s_g1, cover_cert) = if k_core(&h, k).is_empty() {
        let cert = build_cover_set(&h, k)?;
        let s_g1 = VertexSet::from_unsorted(
            cert.s.iter().map(|v| keep_h_ids[v as usize]).collect(),
        );
        let cert_g1 = CoverCertificate {
            s: s_g1.clone(),
            peel_order: cert
                .peel_order
                .iter()
                .map(|&v| keep_h_ids[v as usize])
                .collect(),
            phi_value: cert.phi_value,
        };
        (s_g1, Some(cert_g1))
    } else {
        (VertexSet::new(), None)
    };
    assert!(
        s_g1.len() <= 2 * coll.members.len() + (k as usize) * (k as usize),
        "cover set exceeds 2|C| + k^2"
    );

    // stage 5: families, conflict graph, independent set
    let fams = neighbor_families(&g1, &coll, &s_g1, k);
    let a = build_conflict_graph(&coll, &fams);
    let chosen = greedy_independent_set(&a);
    let kp1_4 = (k as usize + 1).pow(4);
    assert!(
        chosen.len() * kp1_4 >= coll.members.len(),
        "independent set below |C| / (k+1)^4"
    );
    for entry in &fams.entries {
        let hits = entry.members.iter().filter(|&&i| chosen.contains(i)).count();
        assert!(hits <= 1, "independent set picked two members of one family");
    }

    // stage 6: remove the chosen members, return the k-core of the rest
    let mut removed_union = VertexSet::new();
    let mut removed_mass = 0usize;
    for i in chosen.iter() {
        let m = &coll.members[i as usize];
        removed_union = removed_union.union(&m.vertices);
        removed_mass += m.len();
    }
    let branch_bound = alpha_n / (2.0 * kp1_4 as f64 * log_n1);
    assert!(
        removed_mass as f64 >= branch_bound - REL_SLACK * branch_bound.max(1.0),
        "main branch removed less than alpha n / (2 (k+1)^4 log2 n)"
    );
    let keep2 = complement(n1, &removed_union);
    let g3 = g1.induced(&keep2)?;
    let w = k_core(&g3, k);
    assert!(
        !w.is_empty(),
        "the remainder is an (H,S,k)-cover and must contain a min-degree-k subgraph"
    );
    let keep2_ids = keep2.as_slice();
    let sub_g1: VertexSet =
        VertexSet::from_unsorted(w.iter().map(|i| keep2_ids[i as usize]).collect());
    let subgraph = map_set(&sub_g1, &to_orig);
    let removable = main_expr.evaluate();
    stats.push(stage("after-removal", &g3));
    let g_final = g3.induced(&w)?;
    stats.push(stage("subgraph", &g_final));
    removed.push(map_set(&removed_union, &to_orig));
    let result = ExtractionResult {
        subgraph,
        branch: Branch::Main,
        removed,
        guarantee: Some(Guarantee { expr: main_expr, removable }),
        certificate: Certificate {
            peel_order,
            detail: BranchCertificate::Main {
                collection: Collection {
                    bucket_index: coll.bucket_index,
                    members: coll.members.iter().map(|m| map_good(m, &to_orig)).collect(),
                    total_size: coll.total_size,
                },
                cover: cover_cert.map(|c| CoverCertificate {
                    s: map_set(&c.s, &to_orig),
                    peel_order: c.peel_order.iter().map(|&v| to_orig[v as usize]).collect(),
                    phi_value: c.phi_value,
                }),
                chosen: chosen.iter().collect(),
            },
        },
        stats,
    };
    finish_checks(g, k, &result);
    Ok(result)
}

/// Greedy removal chain on a graph that already has minimum degree >= k:
/// repeatedly remove the first maximal good set whose removal keeps minimum
/// degree >= k and a nonempty remainder, recomputing the family each round.
pub fn greedy_chain(g: &Graph, k: u32) -> ExtractionResult {
    debug_assert!(g.min_degree().map_or(false, |d| d >= k as usize));
    let (rounds, survivors) = chain_rounds(g, k);
    let removed = rounds.iter().map(|r| r.vertices.clone()).collect();
    let result = ExtractionResult {
        subgraph: survivors,
        branch: Branch::GreedyChain,
        removed,
        guarantee: None,
        certificate: Certificate {
            peel_order: Vec::new(),
            detail: BranchCertificate::Chain { rounds },
        },
        stats: vec![stage("input", g)],
    };
    finish_checks(g, k, &result);
    result
}

/// Chain rounds on `g` (ids of `g`): returns the removed good sets in order
/// and the surviving vertex set.
fn chain_rounds(g: &Graph, k: u32) -> (Vec<GoodSet>, VertexSet) {
    let mut cur = g.clone();
    let mut to_g: Vec<u32> = (0..g.vertex_count() as u32).collect();
    let mut rounds: Vec<GoodSet> = Vec::new();
    loop {
        let sets = maximal_good_sets(&cur, k);
        let mut picked: Option<GoodSet> = None;
        for set in sets {
            if set.len() >= cur.vertex_count() {
                continue;
            }
            let survives = (0..cur.vertex_count() as u32)
                .filter(|&v| !set.vertices.contains(v))
                .all(|v| {
                    let lost = cur
                        .neighbors(v)
                        .iter()
                        .filter(|&&w| set.vertices.contains(w))
                        .count();
                    cur.degree(v) - lost >= k as usize
                });
            if survives {
                picked = Some(set);
                break;
            }
        }
        let Some(set) = picked else { break };
        rounds.push(map_good(&set, &to_g));
        let keep = complement(cur.vertex_count(), &set.vertices);
        let next = cur.induced(&keep).expect("keep set is in range");
        to_g = keep.iter().map(|v| to_g[v as usize]).collect();
        cur = next;
    }
    let survivors = VertexSet::from_unsorted(to_g);
    (rounds, survivors)
}

/// Always-on exit checks shared by every branch.
fn finish_checks(g: &Graph, k: u32, r: &ExtractionResult) {
    assert!(!r.subgraph.is_empty(), "output subgraph must be nonempty");
    for v in r.subgraph.iter() {
        let d = g
            .neighbors(v)
            .iter()
            .filter(|&&w| r.subgraph.contains(w))
            .count();
        assert!(d >= k as usize, "output vertex {v} has degree {d} < {k}");
    }
    let core = k_core(g, k);
    assert!(r.subgraph.is_subset(&core), "output must lie inside the k-core");
    if let Some(guar) = &r.guarantee {
        assert!(
            within_bound(r.subgraph.len(), g.vertex_count(), guar.removable),
            "guarantee violated: |subgraph| > n - removable"
        );
    }
    match r.branch {
        Branch::Lemma4Fallback | Branch::GreedyChain => {}
        _ => {
            let bound = size_bound(k, g.vertex_count() as u64, BoundKind::Main);
            assert!(
                within_bound(r.subgraph.len(), g.vertex_count(), bound),
                "theorem-level bound violated"
            );
        }
    }
}

/// One entry of a verification report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), pass, detail });
    }

    fn ok(&mut self, name: &str, pass: bool) {
        self.push(name, pass, String::new());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Independently re-checks an extraction result from its certificate: the
/// output invariants, the peel, every removed good set's derivation and edge
/// bound, disjointness, the cover-set inequalities, the family consumer
/// condition, and the guarantee arithmetic. Failures become report entries,
/// never panics.
pub fn verify_certificate(g: &Graph, k: u32, r: &ExtractionResult) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let n = g.vertex_count();

    rep.ok("subgraph-nonempty", !r.subgraph.is_empty());
    let min_deg_ok = !r.subgraph.is_empty()
        && r.subgraph.iter().all(|v| {
            g.neighbors(v).iter().filter(|&&w| r.subgraph.contains(w)).count()
                >= k as usize
        });
    rep.ok("subgraph-min-degree", min_deg_ok);
    let core = k_core(g, k);
    rep.ok("subgraph-in-kcore", r.subgraph.is_subset(&core));

    // removal stages: in range, pairwise disjoint, disjoint from the output
    let mut stage_ok = r
        .removed
        .iter()
        .all(|s| s.iter().all(|v| (v as usize) < n) && s.is_disjoint(&r.subgraph));
    for i in 0..r.removed.len() {
        for j in (i + 1)..r.removed.len() {
            stage_ok &= r.removed[i].is_disjoint(&r.removed[j]);
        }
    }
    rep.ok("removal-stages-disjoint", stage_ok);

    // peel stage: every peeled vertex had degree <= k-1 at its turn
    let cert = &r.certificate;
    let mut deg: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    let mut gone = vec![false; n];
    let mut peel_ok = true;
    for &v in &cert.peel_order {
        if (v as usize) >= n || gone[v as usize] || deg[v as usize] > k as usize - 1 {
            peel_ok = false;
            break;
        }
        gone[v as usize] = true;
        for &w in g.neighbors(v) {
            if !gone[w as usize] {
                deg[w as usize] -= 1;
            }
        }
    }
    let peel_set = VertexSet::from_unsorted(cert.peel_order.clone());
    peel_ok &= peel_set.len() == cert.peel_order.len();
    if !cert.peel_order.is_empty() {
        peel_ok &= r.removed.first() == Some(&peel_set);
    }
    rep.push("peel-valid", peel_ok, String::new());

    let g1_set = complement(n, &peel_set);
    let Ok(g1) = g.induced(&g1_set) else {
        rep.ok("stage-graph-reconstruction", false);
        return rep;
    };
    let n1 = g1.vertex_count();
    let to_g1 = inverse_map(n, &g1_set);
    let branch_removed: &[VertexSet] =
        if cert.peel_order.is_empty() { &r.removed } else { &r.removed[1..] };

    match (&cert.detail, r.branch) {
        (BranchCertificate::PeeledOnly, Branch::PeeledOnly) => {
            rep.ok("peeled-only-core", r.subgraph == core && branch_removed.is_empty());
        }
        (BranchCertificate::LargeGoodSet { maximal, removed }, Branch::LargeGoodSet) => {
            verify_good_set_in(&mut rep, &g1, &to_g1, k, maximal, "maximal-set");
            verify_good_set_in(&mut rep, &g1, &to_g1, k, removed, "removed-set");
            rep.ok("removed-within-maximal", removed.vertices.is_subset(&maximal.vertices));
            let size = removed.len();
            let lo = n1 as f64 / (2 * k + 2) as f64;
            let hi = n1 as f64 / (k + 1) as f64;
            let window_ok = (size as f64) >= lo - REL_SLACK * lo.max(1.0)
                && (size as f64) <= hi + REL_SLACK * hi.max(1.0)
                && size <= n1 - k as usize - 1;
            rep.push(
                "removed-size-window",
                window_ok,
                format!("|C'| = {size}, window [{lo}, {hi}]"),
            );
            rep.ok(
                "maximal-set-oversized",
                maximal.len() * (k as usize + 1) > n1,
            );
            rep.ok(
                "branch-removed-matches",
                branch_removed.len() == 1 && branch_removed[0] == removed.vertices,
            );
            let mappable = removed
                .vertices
                .iter()
                .all(|v| (v as usize) < n && to_g1[v as usize] != u32::MAX);
            if mappable {
                let removed_g1 = map_set(&removed.vertices, &to_g1);
                verify_remainder_core(&mut rep, &g1, k, &[removed_g1.clone()], &r.subgraph, &g1_set, n);
                let v2 = n1 as i64 - size as i64;
                if let Some(rem) = induced_minus(&g1, &removed_g1) {
                    rep.ok(
                        "remainder-edge-threshold",
                        rem.edge_count() as i64 >= t_alg(k, v2),
                    );
                }
            } else {
                rep.ok("remainder-kcore", false);
            }
        }
        (BranchCertificate::Main { collection, cover, chosen }, Branch::Main) => {
            verify_main(
                &mut rep, g, &g1, &to_g1, &g1_set, k, n1, collection, cover, chosen,
                branch_removed, &r.subgraph,
            );
        }
        (BranchCertificate::Chain { rounds }, Branch::GreedyChain | Branch::Lemma4Fallback) => {
            verify_chain(&mut rep, &g1, &to_g1, k, rounds, branch_removed, &r.subgraph, &g1_set, n);
        }
        _ => rep.ok("branch-certificate-shape", false),
    }

    // guarantee arithmetic
    match (&r.guarantee, r.branch) {
        (None, Branch::Lemma4Fallback | Branch::GreedyChain) => {
            rep.ok("guarantee-arithmetic", true);
        }
        (Some(guar), _) => {
            let recomputed = guar.expr.evaluate();
            let arith_ok = (recomputed - guar.removable).abs()
                <= REL_SLACK * recomputed.abs().max(1.0);
            let bound_ok = within_bound(r.subgraph.len(), n, recomputed);
            rep.push(
                "guarantee-arithmetic",
                arith_ok && bound_ok,
                format!("claimed {} recomputed {}", guar.removable, recomputed),
            );
        }
        (None, _) => rep.ok("guarantee-arithmetic", false),
    }
    if !matches!(r.branch, Branch::Lemma4Fallback | Branch::GreedyChain) {
        let bound = size_bound(k, n as u64, BoundKind::Main);
        rep.push(
            "theorem-bound",
            within_bound(r.subgraph.len(), n, bound),
            format!("|subgraph| = {}, n - bound = {}", r.subgraph.len(), n as f64 - bound),
        );
    }
    rep
}

fn inverse_map(n_parent: usize, keep: &VertexSet) -> Vec<u32> {
    let mut inv = vec![u32::MAX; n_parent];
    for (i, v) in keep.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

fn induced_minus(g: &Graph, remove: &VertexSet) -> Option<Graph> {
    let keep = complement(g.vertex_count(), remove);
    g.induced(&keep).ok()
}

/// Replays a good set recorded in input ids against a stage graph.
fn verify_good_set_in(
    rep: &mut VerificationReport,
    stage_g: &Graph,
    to_stage: &[u32],
    k: u32,
    set: &GoodSet,
    label: &str,
) {
    let mappable = set
        .vertices
        .iter()
        .all(|v| (v as usize) < to_stage.len() && to_stage[v as usize] != u32::MAX);
    if !mappable {
        rep.push(format!("{label}-replay").as_str(), false, "vertices outside stage graph".into());
        return;
    }
    let local = map_good(set, to_stage);
    match replay_trace(stage_g, k, &local.trace) {
        Ok(rebuilt) if rebuilt == local.vertices => {
            rep.ok(&format!("{label}-replay"), true);
        }
        Ok(_) => rep.push(
            &format!("{label}-replay"),
            false,
            "trace rebuilds a different set".into(),
        ),
        Err(err) => rep.push(&format!("{label}-replay"), false, err.to_string()),
    }
    // edge bound (claim on good sets in min-degree-k graphs)
    let meets = edges_meeting(stage_g, &local.vertices).unwrap_or(usize::MAX);
    rep.push(
        &format!("{label}-edge-bound"),
        meets <= (k as usize - 1) * set.len() + 1,
        format!("{meets} edges meet {} vertices", set.len()),
    );
}

/// Removes `stages` (input-id sets mapped through g1) in order and checks
/// the final k-core matches the claimed subgraph.
fn verify_remainder_core(
    rep: &mut VerificationReport,
    g1: &Graph,
    k: u32,
    stages_g1: &[VertexSet],
    subgraph: &VertexSet,
    g1_set: &VertexSet,
    _n: usize,
) {
    let mut all = VertexSet::new();
    for s in stages_g1 {
        all = all.union(s);
    }
    let Some(rest) = induced_minus(g1, &all) else {
        rep.ok("remainder-kcore", false);
        return;
    };
    let keep = complement(g1.vertex_count(), &all);
    let w = k_core(&rest, k);
    let keep_ids = keep.as_slice();
    let g1_ids = g1_set.as_slice();
    let sub: VertexSet = VertexSet::from_unsorted(
        w.iter().map(|i| g1_ids[keep_ids[i as usize] as usize]).collect(),
    );
    rep.push(
        "remainder-kcore",
        &sub == subgraph,
        format!("recomputed core of size {}, claimed {}", sub.len(), subgraph.len()),
    );
}

fn verify_main(
    rep: &mut VerificationReport,
    _g: &Graph,
    g1: &Graph,
    to_g1: &[u32],
    g1_set: &VertexSet,
    k: u32,
    n1: usize,
    collection: &Collection,
    cover: &Option<CoverCertificate>,
    chosen: &[u32],
    branch_removed: &[VertexSet],
    subgraph: &VertexSet,
) {
    let ku = k as usize;
    // census branch condition
    let census = g1.degree_census(ku);
    rep.ok("census-at-least-alpha-n", census * (2 * ku + 2) >= n1);

    // members: replay, disjoint, non-adjacent, dyadic, size window
    let mut members_g1: Vec<VertexSet> = Vec::new();
    let mut ok_map = true;
    for (i, m) in collection.members.iter().enumerate() {
        verify_good_set_in(rep, g1, to_g1, k, m, &format!("member-{i}"));
        if m.vertices.iter().all(|v| to_g1[v as usize] != u32::MAX) {
            members_g1.push(map_set(&m.vertices, to_g1));
        } else {
            ok_map = false;
        }
    }
    if !ok_map {
        rep.ok("members-in-stage-graph", false);
        return;
    }
    let mut disjoint = true;
    let mut non_adjacent = true;
    for i in 0..members_g1.len() {
        for j in (i + 1)..members_g1.len() {
            disjoint &= members_g1[i].is_disjoint(&members_g1[j]);
        }
    }
    for m in &members_g1 {
        for v in m.iter() {
            for &w in g1.neighbors(v) {
                let in_other = members_g1
                    .iter()
                    .any(|other| !core::ptr::eq(other, m) && other.contains(w));
                non_adjacent &= !(in_other && !m.contains(w));
            }
        }
    }
    rep.ok("members-pairwise-disjoint", disjoint);
    rep.ok("members-pairwise-non-adjacent", non_adjacent);

    let sizes: Vec<usize> = collection.members.iter().map(GoodSet::len).collect();
    let lo = 1u64 << (collection.bucket_index - 1);
    let hi = 1u64 << collection.bucket_index;
    rep.ok(
        "collection-dyadic",
        sizes.iter().all(|&s| (s as u64) >= lo && (s as u64) <= hi)
            && sizes.iter().max().unwrap_or(&0) <= &(2 * sizes.iter().min().unwrap_or(&1)),
    );
    let total: usize = sizes.iter().sum();
    let alpha_n = n1 as f64 / (2 * k + 2) as f64;
    let threshold = alpha_n / libm::log2(n1 as f64);
    rep.push(
        "collection-total-window",
        total == collection.total_size
            && (total as f64) >= threshold - REL_SLACK * threshold.max(1.0)
            && total < n1,
        format!("total {total}, window [{threshold}, {n1})"),
    );
    // every good set in the collection respects the size cap of this branch
    rep.ok(
        "no-oversized-member",
        sizes.iter().all(|&s| s * (ku + 1) <= n1),
    );

    // remainder H and the cover set
    let mut member_union = VertexSet::new();
    for m in &members_g1 {
        member_union = member_union.union(m);
    }
    let Some(h) = induced_minus(g1, &member_union) else {
        rep.ok("remainder-construction", false);
        return;
    };
    let keep_h = complement(n1, &member_union);
    let to_h = inverse_map(n1, &keep_h);
    let v_h = h.vertex_count();
    rep.ok(
        "remainder-edge-accounting",
        h.edge_count() as i64 >= t_alg(k, v_h as i64) - collection.members.len() as i64 + 1,
    );
    let s_g1: VertexSet = match cover {
        None => {
            rep.ok("cover-or-core", !k_core(&h, k).is_empty());
            VertexSet::new()
        }
        Some(cert) => {
            let mut ok = k_core(&h, k).is_empty();
            // S and peel order live in input ids; pull them into H
            let mappable = cert
                .s
                .iter()
                .chain(cert.peel_order.iter().copied())
                .all(|v| {
                    (v as usize) < to_g1.len()
                        && to_g1[v as usize] != u32::MAX
                        && to_h[to_g1[v as usize] as usize] != u32::MAX
                });
            if !mappable {
                rep.ok("cover-or-core", false);
                return;
            }
            let s_h: VertexSet = cert
                .s
                .iter()
                .map(|v| to_h[to_g1[v as usize] as usize])
                .collect();
            let phi_h = phi(&h, k);
            ok &= (s_h.len() as i64) <= phi_h && phi_h == cert.phi_value;
            ok &= s_h.iter().all(|v| h.degree(v) <= ku - 1);
            // peel order: all of V(H), degree <= k-1 at each level
            let order: Vec<u32> = cert
                .peel_order
                .iter()
                .map(|&v| to_h[to_g1[v as usize] as usize])
                .collect();
            ok &= order.len() == v_h;
            let mut deg: Vec<usize> = (0..v_h as u32).map(|v| h.degree(v)).collect();
            let mut gone = vec![false; v_h];
            for (idx, &v) in order.iter().enumerate() {
                let last = idx + 1 == order.len();
                if gone[v as usize] || (!last && deg[v as usize] > ku - 1) {
                    ok = false;
                    break;
                }
                gone[v as usize] = true;
                for &w in h.neighbors(v) {
                    if !gone[w as usize] {
                        deg[w as usize] -= 1;
                    }
                }
            }
            ok &= gone.iter().all(|&b| b);
            rep.ok("cover-or-core", ok);
            map_set(&cert.s, to_g1)
        }
    };
    rep.ok(
        "cover-size-bound",
        s_g1.len() <= 2 * collection.members.len() + ku * ku,
    );

    // consumer condition: at most one chosen member per family
    if !s_g1.is_disjoint(&member_union) {
        rep.ok("cover-disjoint-from-members", false);
        return;
    }
    let coll_g1 = Collection {
        bucket_index: collection.bucket_index,
        members: collection
            .members
            .iter()
            .map(|m| GoodSet {
                vertices: map_set(&m.vertices, to_g1),
                trace: m.trace.map_ids(|v| to_g1[v as usize]),
            })
            .collect(),
        total_size: collection.total_size,
    };
    let fams = neighbor_families(g1, &coll_g1, &s_g1, k);
    let chosen_set: VertexSet = chosen.iter().copied().collect();
    let consumer_ok = fams.entries.iter().all(|e| {
        e.members.iter().filter(|&&i| chosen_set.contains(i)).count() <= 1
    }) && chosen
        .iter()
        .all(|&i| (i as usize) < collection.members.len());
    rep.ok("family-consumer-condition", consumer_ok);
    rep.ok(
        "independent-set-size",
        chosen.len() * (ku + 1).pow(4) >= collection.members.len(),
    );

    // removed stage equals the chosen union; final core matches
    let mut chosen_union_g1 = VertexSet::new();
    for &i in chosen {
        chosen_union_g1 = chosen_union_g1.union(&members_g1[i as usize]);
    }
    let g1_ids = g1_set.as_slice();
    let chosen_union: VertexSet = VertexSet::from_unsorted(
        chosen_union_g1.iter().map(|v| g1_ids[v as usize]).collect(),
    );
    rep.ok(
        "branch-removed-matches",
        branch_removed.len() == 1 && branch_removed[0] == chosen_union,
    );
    verify_remainder_core(
        rep,
        g1,
        k,
        &[chosen_union_g1],
        subgraph,
        g1_set,
        g1.vertex_count(),
    );
}

fn verify_chain(
    rep: &mut VerificationReport,
    g1: &Graph,
    _to_g1: &[u32],
    k: u32,
    rounds: &[GoodSet],
    branch_removed: &[VertexSet],
    subgraph: &VertexSet,
    g1_set: &VertexSet,
    n: usize,
) {
    let rounds_match = branch_removed.len() == rounds.len()
        && rounds
            .iter()
            .zip(branch_removed)
            .all(|(r, s)| &r.vertices == s);
    rep.ok("chain-rounds-match-stages", rounds_match);

    // replay each round against its stage graph
    let mut cur = g1.clone();
    let mut to_cur = inverse_map(n, g1_set);
    let mut ok = true;
    for (i, round) in rounds.iter().enumerate() {
        verify_good_set_in(rep, &cur, &to_cur, k, round, &format!("round-{i}"));
        let local = map_set(&round.vertices, &to_cur);
        let Some(next) = induced_minus(&cur, &local) else {
            ok = false;
            break;
        };
        if next.vertex_count() == 0 || next.min_degree().map_or(true, |d| d < k as usize) {
            ok = false;
            break;
        }
        let keep = complement(cur.vertex_count(), &local);
        // compose: input id -> next stage id
        let to_keep = inverse_map(cur.vertex_count(), &keep);
        to_cur = to_cur
            .iter()
            .map(|&s| if s == u32::MAX { u32::MAX } else { to_keep[s as usize] })
            .collect();
        cur = next;
    }
    rep.ok("chain-remainders-min-degree", ok);
    // survivors equal the claimed subgraph
    let mut survivor = VertexSet::new();
    if ok {
        let mut all = VertexSet::new();
        for r in rounds {
            all = all.union(&r.vertices);
        }
        survivor = g1_set.difference(&all);
    }
    rep.push(
        "chain-survivors-match",
        ok && &survivor == subgraph,
        format!("survivors {}, claimed {}", survivor.len(), subgraph.len()),
    );
}
