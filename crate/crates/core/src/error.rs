use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The sampled spectrum of the symbol varies with direction beyond the
    /// clustering tolerance, so the operator is outside the supported class.
    #[error("symbol spectrum varies with direction: {0}")]
    NonInvariantSymbol(String),

    /// Two eigenvalue clusters are closer than the resolution tolerance, so
    /// expressions dividing by eigenvalue gaps are not well defined.
    #[error("eigenvalue gap below tolerance: |mu_{i} - mu_{k}| = {gap:.3e}")]
    DegenerateGap { i: usize, k: usize, gap: f64 },

    /// A dense symmetric tensor of this rank exceeds the configured cap.
    #[error("tensor rank {rank} exceeds cap {cap}")]
    RankCap { rank: usize, cap: usize },

    /// Total trace requires an even number of indices.
    #[error("total trace requires even rank, got {0}")]
    OddRank(usize),

    /// The symbol failed a positivity check.
    #[error("leading symbol not positive definite: min eigenvalue {0:.3e}")]
    NotPositiveDefinite(f64),

    /// A lattice sum was requested with a cutoff too small for the target
    /// tail bound; `required` is a sufficient cutoff.
    #[error("lattice cutoff {given} too small, need at least {required}")]
    CutoffViolation { given: usize, required: usize },

    /// An operation needed so(m) generator matrices that the bundle lacks.
    #[error("fiber bundle has no generator matrices")]
    MissingGenerators,

    /// Dimension or construction constraint violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bundle invariant failed on construction or load.
    #[error("bundle validation failed: {0}")]
    BundleInvariant(String),

    /// Numerical evaluation of a special function failed to converge.
    #[error("special function evaluation failed: {0}")]
    Numerics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
