//! Uniform spaces on finite carriers with exact rational arithmetic.
//!
//! Relations are dense bit matrices, distances are exact rationals, and a
//! uniformity is always represented by a validated base: membership,
//! compatibility and separation queries reduce to "some base element is
//! contained in ...".

pub mod connectivity;
pub mod error;
pub mod exact;
pub mod groups;
pub mod metrics;
pub mod random;
pub mod relation;
pub mod scalars;
pub mod set;
pub mod uniformity;

pub use error::{Error, Result};
pub use exact::Rational;
pub use groups::FiniteGroup;
pub use metrics::{QParam, SemiMetric};
pub use relation::{FiniteSpace, Partition, Relation};
pub use scalars::AbsoluteValue;
pub use set::ElementSet;
pub use uniformity::{Topology, UniformityBase};
