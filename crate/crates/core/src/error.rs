use thiserror::Error;

use crate::space::ElemSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ground space: {0}")]
    InvalidSpace(String),

    #[error("element {element} is out of range for a space of size {size}")]
    OutOfRange { element: usize, size: usize },

    #[error("space of size {size} exceeds the enumeration cap {cap}")]
    SpaceTooLarge { size: usize, cap: usize },

    #[error("operands live on different ground spaces")]
    SpaceMismatch,

    #[error("empty list of convexities")]
    EmptyList,

    #[error("hull table has no entry for {0}")]
    MissingEntry(ElemSet),

    #[error("hull entry for {set} is {hull}, which does not contain the set")]
    ExtensivityViolation { set: ElemSet, hull: ElemSet },

    #[error("hull of the empty set must be empty, got {0}")]
    NonEmptyHullOfEmpty(ElemSet),

    #[error("unknown convexity id `{0}`")]
    UnknownConvexityId(String),

    #[error("duplicate convexity id `{0}`")]
    DuplicateId(String),

    #[error("threshold {threshold} is outside 1..={members}")]
    ThresholdOutOfRange { threshold: usize, members: usize },

    #[error("a fractoconvexity needs at least one block")]
    EmptyFracto,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("precondition not checked: {0}")]
    PreconditionNotChecked(String),

    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("window of size {0} is too small (need at least 2)")]
    WindowTooSmall(usize),

    #[error("unknown center index {0}")]
    UnknownCenter(usize),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("the halfspace leaves no sample points")]
    EmptySubspace,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("arity error at byte {offset}: threshold {threshold} exceeds {members} ids")]
    ExprArity { offset: usize, threshold: usize, members: usize },

    #[error("duplicate id `{id}` at byte {offset}")]
    ExprDuplicateId { offset: usize, id: String },

    #[error("space file: {0}")]
    SpaceFile(String),
}
