use alloc::string::String;
use core::fmt;

/// Errors surfaced by the library. Variants are grouped by the contract they
/// violate so callers (in particular the CLI) can map them onto exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Edge-list line is not two whitespace-separated labels.
    MalformedLine { line: usize },
    /// Edge-list line joins a vertex to itself.
    SelfLoop { line: usize },
    /// A vertex id is outside the graph's id range.
    IdOutOfRange { id: u32, vertex_count: usize },
    /// `t_k(n)` requested outside its domain `n >= k+1`.
    ThresholdDomain { k: u32, n: u64 },
    /// Input graph fails the theorem hypothesis (`n >= k+1` and
    /// `e >= t_k(n)+1`).
    Hypothesis { detail: String },
    /// Operation requires an empty k-core but the graph has one.
    NonemptyKCore,
    /// Operation requires a nonempty graph.
    EmptyGraph,
    /// A singleton good set cannot be halved.
    SingletonGoodSet,
    /// Good set too small for the requested shrink window.
    SetTooSmall { size: usize, lo: f64 },
    /// Collection precondition failed: total good-set mass below `alpha * n`.
    /// Callers should take the degree-census fallback branch.
    CollectionMass { total: usize, required: f64 },
    /// Exhaustive oracle refused a graph above its vertex budget.
    BudgetExceeded { vertices: usize, max: usize },
    /// Cover embedding maps two vertices to the same image.
    EmbeddingNotInjective,
    /// A derivation trace failed validation at the named step.
    TraceInvalid { step: usize, reason: String },
    /// Generator domain errors.
    WheelTooSmall { k: u32, n: u64 },
    /// No non-edge available to add.
    NoNonEdge,
    /// Requested more edges than the complete graph holds.
    TooManyEdges { requested: u64, max: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MalformedLine { line } => {
                write!(f, "line {line}: expected two whitespace-separated vertex labels")
            }
            Error::SelfLoop { line } => write!(f, "line {line}: self-loop rejected"),
            Error::IdOutOfRange { id, vertex_count } => {
                write!(f, "vertex id {id} out of range (graph has {vertex_count} vertices)")
            }
            Error::ThresholdDomain { k, n } => {
                write!(f, "t_k(n) requires n >= k+1 (got k={k}, n={n})")
            }
            Error::Hypothesis { detail } => write!(f, "hypothesis violation: {detail}"),
            Error::NonemptyKCore => write!(f, "graph has a nonempty k-core"),
            Error::EmptyGraph => write!(f, "graph has no vertices"),
            Error::SingletonGoodSet => write!(f, "singleton good set cannot be halved"),
            Error::SetTooSmall { size, lo } => {
                write!(f, "good set of size {size} is below the window floor {lo}")
            }
            Error::CollectionMass { total, required } => write!(
                f,
                "good-set mass {total} below alpha*n = {required}; take the degree-census fallback"
            ),
            Error::BudgetExceeded { vertices, max } => {
                write!(f, "oracle budget exceeded: {vertices} vertices > max {max}")
            }
            Error::EmbeddingNotInjective => write!(f, "cover embedding is not injective"),
            Error::TraceInvalid { step, reason } => {
                write!(f, "trace invalid at step {step}: {reason}")
            }
            Error::WheelTooSmall { k, n } => {
                write!(f, "wheel W(k-2,n) requires n >= k+2 (got k={k}, n={n})")
            }
            Error::NoNonEdge => write!(f, "graph is complete; no non-edge to add"),
            Error::TooManyEdges { requested, max } => {
                write!(f, "requested {requested} edges but the complete graph has {max}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
