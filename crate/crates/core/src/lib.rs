//! Exact subgraph matching over vertex-labeled, undirected graphs.
//!
//! The engine answers isomorphic-subgraph queries in two phases. An offline
//! phase walks every edge of the data graph, extracts small per-edge feature
//! structures (anchored stars for edges with a low-degree endpoint, anchored
//! paths for edges between two high-degree vertices), and files them into
//! three hash indexes keyed by order-invariant digests. The online phase
//! plans a DFS traversal of the query, retrieves candidate data edges per
//! DFS edge from the indexes, and grows match trees in parallel until every
//! complete, conflict-free branch is reported as an exact match.
//!
//! Candidate retrieval never drops a true match (the digests map isomorphic
//! features to equal keys), so the final enumeration is exact: its output
//! equals brute-force search, which [`oracle`] provides as independent
//! ground truth.
//!
//! ```
//! use anchormatch::engine::QueryConfig;
//! use anchormatch::graph::Graph;
//! use anchormatch::index::{build_indexes, IndexConfig};
//! use anchormatch::embedding::Backend;
//!
//! let data = Graph::parse("t 3 3\nv 0 0 2\nv 1 0 2\nv 2 0 2\ne 0 1\ne 1 2\ne 0 2\n").unwrap();
//! let query = data.clone();
//! let idx = build_indexes(&data, &Backend::Wl, &IndexConfig::default()).unwrap();
//! let out = anchormatch::engine::query(&query, &data, &idx, &Backend::Wl, &QueryConfig::default()).unwrap();
//! assert_eq!(out.matches.len(), 6); // |Aut(K3)|
//! ```

pub(crate) mod bytes;
pub mod embedding;
pub mod engine;
pub mod feature;
pub mod gen;
pub mod graph;
pub mod index;
pub mod metrics;
pub mod oracle;
pub mod plan;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// What went wrong while parsing a graph file, reported with its line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("vertex {vertex}: declared degree {declared} but {computed} incident edges")]
    DegreeMismatch {
        vertex: u32,
        declared: usize,
        computed: usize,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("vertex id {0} out of range")]
    InvalidVertex(u32),

    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(u32, u32),

    #[error("feature radius {0} is unsupported; only radius 1 is implemented")]
    UnsupportedRadius(u32),

    #[error("label {0} is outside the embedding feature table (|sigma| = {1})")]
    LabelOutOfRange(u32, u32),

    #[error("non-finite embedding component {0}")]
    NonFiniteEmbedding(f64),

    #[error("embedding backend mismatch: key was produced by {key}, index expects {index}")]
    BackendMismatch { key: &'static str, index: &'static str },

    #[error("model digest mismatch: key carries {key:#018x}, index expects {index:#018x}")]
    ModelDigestMismatch { key: u64, index: u64 },

    #[error("graph digest mismatch: index was built over {index:#018x}, queried graph is {graph:#018x}")]
    GraphDigestMismatch { index: u64, graph: u64 },

    #[error("training set is empty: no edge has an endpoint of degree <= {dstar}")]
    EmptyTrainingSet { dstar: u32 },

    #[error("label grid infeasible: need {needed} axis values spaced {xi} apart inside [{a}, {b}]")]
    InfeasibleLabelGrid { needed: usize, xi: f64, a: f64, b: f64 },

    #[error("query graph is disconnected; growth needs a single DFS cover")]
    DisconnectedQuery,

    #[error("query graph must contain at least one edge")]
    EdgelessQuery,

    #[error("start-vertex count {k} out of range 1..={max}")]
    StartCountOutOfRange { k: usize, max: usize },

    #[error("oracle bound exceeded: |V(Q)| = {size} > {bound}")]
    OracleBound { size: usize, bound: usize },

    #[error("infeasible generator spec: {0}")]
    InfeasibleGenSpec(String),

    #[error("could not collect {requested} walk vertices (graph component too small)")]
    WalkExhausted { requested: usize },

    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("file checksum mismatch (truncated or corrupted)")]
    ChecksumMismatch,

    #[error("unexpected end of file")]
    Truncated,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    fn parse(line: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, kind }
    }
}
