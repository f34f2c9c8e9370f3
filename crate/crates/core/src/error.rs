use thiserror::Error;

use crate::metrics::MetricReport;
use crate::uniformity::BaseReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space size {0} outside the supported range 1..=4096")]
    SpaceSize(usize),
    #[error("labels must be {expected} pairwise distinct names")]
    InvalidLabels { expected: usize },
    #[error("operands live on spaces of size {left} and {right}")]
    SpaceMismatch { left: usize, right: usize },
    #[error("element index {index} out of range for a space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("relation is not reflexive and symmetric")]
    NotReflexiveSymmetric,
    #[error("relation is not reflexive")]
    NotReflexive,
    #[error("relation is not an equivalence relation")]
    NotEquivalence,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("matrix is not square of the expected shape")]
    ShapeMismatch,
    #[error("semimetric fails its declared axioms")]
    InvalidSemiMetric(Box<MetricReport>),
    #[error("value has no exact rational power with exponent {0}")]
    InexactPower(String),
    #[error("map sends {index} outside a target space of size {size}")]
    MapOutOfRange { index: usize, size: usize },
    #[error("invalid sub-base: {0}")]
    InvalidSubbase(String),
    #[error("invalid uniformity base")]
    InvalidBase(Box<BaseReport>),
    #[error("empty list where a nonempty one is required")]
    EmptyList,
    #[error("enumeration over a space of size {size} exceeds the cap {cap}")]
    SpaceTooLargeForEnumeration { size: usize, cap: usize },
    #[error("set is not open")]
    NotOpen,
    #[error("set is not contained in the target set")]
    NotContained,
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("product of sizes {0} and {1} exceeds 4096")]
    ProductTooLarge(usize, usize),
    #[error("zero has no valuation")]
    ZeroInput,
    #[error("duplicate sample {0}")]
    DuplicateSample(String),
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("relation is neither left- nor right-invariant")]
    NotInvariant,
    #[error("invalid neighborhood family: {0}")]
    InvalidFilterBase(String),
    #[error("no member V of the family satisfies V·V ⊆ W for W = {0:?}")]
    NoSquareRoot(Vec<usize>),
    #[error("{0:?} is not a subgroup")]
    NotSubgroup(Vec<usize>),
    #[error("family is not compatible with conjugation by {g}")]
    NotConjugationCompatible { g: usize },
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("{0}")]
    Parse(String),
    #[error("unsupported absolute value configuration: {0}")]
    Unsupported(String),
}
