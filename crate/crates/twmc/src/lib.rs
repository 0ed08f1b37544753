//! Model counting and decision procedures for a counting modal logic on
//! graphs of small treewidth.
//!
//! The library answers questions of the form "how many ways are there to
//! choose vertex sets X̄ and edge sets Ȳ such that an arithmetic side
//! condition holds and every vertex satisfies a counting modal formula?"
//! Problems such as vertex cover, dominating set, feedback vertex set or
//! longest path are expressed in this logic (see [`problems`] for a built-in
//! catalogue and [`logic`] for the textual format).
//!
//! Two engines are provided:
//!
//! * [`count_dp`] — exact model counting by dynamic programming over a nice
//!   tree decomposition, for sentences whose side condition only involves
//!   cardinalities.
//! * [`cutcount`] — a randomized decision procedure (one-sided Monte Carlo,
//!   no false positives) for sentences that additionally bound the number of
//!   connected components of the chosen sets.
//!
//! Supporting modules handle graph and tree-decomposition I/O ([`graph`],
//! [`decomp`]), normalization of decompositions ([`nice`]), the finite
//! monoids of ultimately periodic counting sets ([`upset`]), a brute-force
//! reference oracle ([`oracle`]), and a generator of provably hard girth
//! instances from 3-CNF formulas ([`hardness`]).

pub mod compile;
pub mod count_dp;
pub mod cutcount;
pub mod decomp;
pub mod graph;
pub mod hardness;
mod hash;
pub mod logic;
pub mod nice;
pub mod oracle;
pub mod problems;
pub mod upset;

/// Errors produced by parsing, validation and the solver engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed ultimately periodic set literal.
    #[error("invalid counting set `{text}`: {reason}")]
    ParseUpSet { text: String, reason: String },

    /// A malformed graph file.
    #[error("graph parse error on line {line}: {reason}")]
    ParseGraph { line: usize, reason: String },

    /// A structurally invalid graph (bad endpoint, self-loop, duplicate edge).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// A malformed tree-decomposition file.
    #[error("decomposition parse error on line {line}: {reason}")]
    ParseDecomposition { line: usize, reason: String },

    /// A decomposition that fails the three decomposition axioms.
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    /// A malformed problem specification.
    #[error("problem parse error on line {line}: {reason}")]
    ParseProblem { line: usize, reason: String },

    /// A specification that parses but breaks a well-formedness rule.
    #[error("ill-formed problem `{problem}`: {reason}")]
    IllFormed { problem: String, reason: String },

    /// An instance that does not fit the specification it is paired with.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A malformed bindings document.
    #[error("bindings error: {0}")]
    Bindings(String),

    /// A malformed DIMACS CNF file.
    #[error("cnf parse error on line {line}: {reason}")]
    ParseCnf { line: usize, reason: String },

    /// Unsupported parameter to the hardness generator.
    #[error("hardness generator: {0}")]
    Hardness(String),

    /// Work exceeded an explicit budget (table size, oracle enumeration, …).
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// The requested operation does not apply to this specification.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A malformed JSON document (bindings, serialized decompositions).
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
