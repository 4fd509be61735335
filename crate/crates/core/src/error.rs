use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("label {label} on edge ({u},{v}) is not -1 or 1")]
    InvalidLabel { u: usize, v: usize, label: i64 },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("edge ({0},{1}) listed twice with different labels")]
    ConflictingEdge(usize, usize),

    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cycle of length {len} is too short (need at least {min})")]
    CycleTooShort { len: usize, min: usize },

    #[error("degenerate slot: vertex {vertex} repeats at cyclic distance {distance}")]
    DegenerateSlot { vertex: usize, distance: usize },

    #[error("pair ({0},{1}) of the power is not an edge of the graph")]
    NotContained(usize, usize),

    #[error("ordering is not a permutation of the vertex set")]
    NotPermutation,

    #[error("cycle length {len} outside [{min}, {max}]")]
    LengthBound { len: usize, min: usize, max: usize },

    #[error("unequal occurrence counts: vertex {a} appears {ca} times, vertex {b} appears {cb} times")]
    UnequalCounts { a: usize, ca: usize, b: usize, cb: usize },

    #[error("template limit exceeded: {0}")]
    TemplateLimit(String),

    #[error("tiling covers vertex {0} more than once")]
    Overlap(usize),

    #[error("tiling leaves vertex {0} uncovered")]
    Uncovered(usize),

    #[error("vertices {0} and {1} are not adjacent, so the set is not a clique")]
    NotClique(usize, usize),

    #[error("tile {index} is not one of the four clique types")]
    Unclassifiable { index: usize },

    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },

    #[error("oracle supports at most {cap} vertices, got {n}")]
    OracleCap { n: usize, cap: usize },

    #[error("{n} vertices cannot be split into blocks of {k}")]
    Divisibility { n: usize, k: usize },

    #[error("claim configuration not realizable: {0}")]
    Unrealizable(String),

    #[error("no cluster is adjacent to all of {0:?}")]
    NoCommonNeighbor(Vec<usize>),

    #[error("no admissible vertex for path position {position}")]
    CandidateExhaustion { position: usize },

    #[error("stage {stage} failed: {reason}")]
    Stage { stage: String, reason: String },
}

impl Error {
    /// Stable machine-readable identifier used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
            Error::InvalidLabel { .. } => "invalid_label",
            Error::SelfLoop(_) => "self_loop",
            Error::ConflictingEdge(..) => "conflicting_edge",
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::CycleTooShort { .. } => "cycle_too_short",
            Error::DegenerateSlot { .. } => "degenerate_slot",
            Error::NotContained(..) => "not_contained",
            Error::NotPermutation => "not_permutation",
            Error::LengthBound { .. } => "length_bound",
            Error::UnequalCounts { .. } => "unequal_counts",
            Error::TemplateLimit(_) => "template_limit",
            Error::Overlap(_) => "overlap",
            Error::Uncovered(_) => "uncovered",
            Error::NotClique(..) => "not_clique",
            Error::Unclassifiable { .. } => "unclassifiable",
            Error::BudgetExhausted { .. } => "budget_exhausted",
            Error::OracleCap { .. } => "oracle_cap",
            Error::Divisibility { .. } => "divisibility",
            Error::Unrealizable(_) => "unrealizable",
            Error::NoCommonNeighbor(_) => "no_common_neighbor",
            Error::CandidateExhaustion { .. } => "candidate_exhaustion",
            Error::Stage { .. } => "stage_failure",
        }
    }
}
