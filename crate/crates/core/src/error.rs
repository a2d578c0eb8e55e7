use thiserror::Error;

use crate::fim::MultiIndex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("multi-index length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("class functions live at different levels: {0} vs {1}")]
    LevelMismatch(MultiIndex, MultiIndex),

    #[error("invalid arrangement: {0}")]
    InvalidSpec(String),

    #[error("element {0} is not in the lattice")]
    NotInLattice(String),

    #[error("lattice at level {level} is truncated at codimension {max_codim}, degree {degree} needs at least {degree}")]
    Truncated {
        level: MultiIndex,
        max_codim: usize,
        degree: usize,
    },

    #[error("lattice is not closed under the group action: image of element {0} is missing")]
    CorruptAction(usize),

    #[error("no character polynomial of multidegree <= {0} fits the samples")]
    FitInconsistent(MultiIndex),

    #[error("samples do not determine a polynomial of multidegree <= {bound} ({rank} independent equations for {unknowns} unknowns)")]
    FitUnderdetermined {
        bound: MultiIndex,
        rank: usize,
        unknowns: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is not a nonnegative integer; the class function is not a character")]
    NotACharacter(String),

    #[error("orbit decomposition failed for element {element}: matched {matches} primitive classes")]
    OrbitMatch { element: usize, matches: usize },

    #[error("level {0} exceeds the cost guard (entries must be <= {1})")]
    CostGuard(MultiIndex, usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
