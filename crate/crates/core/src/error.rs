use std::fmt;

use serde::{Deserialize, Serialize};

/// Referee verdict for an illegal move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    Radius,
    Nesting,
    Support,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::Radius => "RADIUS",
            Violation::Nesting => "NESTING",
            Violation::Support => "SUPPORT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("hyperplane is not rational for this lattice: {0}")]
    NotRational(String),
    #[error("basis is singular")]
    SingularBasis,
    #[error("basis is not unimodular (|det| = {0})")]
    NotUnimodular(String),
    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::lattice::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("hyperplane basis is degenerate")]
    DegenerateBase,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ball does not meet the support")]
    EmptyIntersection,
    #[error("no admissible point found: {0}")]
    NotFound(String),
    #[error("strategy breakdown: {0}")]
    StrategyBreakdown(String),
    #[error("base strategy broke the rules: {0}")]
    BaseStrategyViolation(Violation),
    #[error("no hyperplane with vanishing time component: {0}")]
    NotCase1(String),
    #[error("invalid transcript: {0}")]
    InvalidTranscript(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
