//! Fair allocation of indivisible goods and chores under restricted additive
//! utilities.
//!
//! * [`fisher`]: EF1 + PO allocations of bivalued chores through a Fisher market.
//! * [`mms`]: maximin share values and MMS allocations for factored, weakly
//!   lexicographic and factored personalized bivalued utilities.
//! * [`pareto`]: Pareto improvements, improvement chains and MMS + PO.
//! * [`fairness`] and [`oracle`]: predicate checks and brute-force ground truth.
//!
//! Everything is exact. Valuations are integers of any [`Scalar`] type and
//! prices are [`Ratio`]s over the same type.

pub mod classify;
pub mod error;
pub mod fairness;
pub mod fisher;
pub mod fixtures;
pub mod gen;
pub mod instance;
pub mod io;
pub mod mms;
pub mod oracle;
pub mod ordered;
pub mod pareto;
pub mod scalar;

pub use num_bigint::BigInt;
pub use num_rational::Ratio;

pub use classify::{classify, ClassSet, ClassTag, UtilityClass};
pub use error::{Error, Result};
pub use fairness::{FairnessReport, Property, Witness};
pub use instance::{Allocation, Instance, Kind, PartialAllocation};
pub use ordered::{lift_allocation, order_instance, OrderedView};
pub use scalar::Scalar;

/// Instance over 64-bit valuations, the common case.
pub type IntInstance = Instance<i64>;
/// Instance over 128-bit valuations.
pub type WideInstance = Instance<i128>;
/// Instance over arbitrary-precision valuations.
pub type BigInstance = Instance<BigInt>;

/// Exact price or pain-per-buck ratio over `i64`.
pub type Price = Ratio<i64>;
/// Exact price over arbitrary-precision integers.
pub type BigPrice = Ratio<BigInt>;
