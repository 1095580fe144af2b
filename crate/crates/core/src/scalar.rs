//! The exact integer scalar every valuation is expressed in.
//!
//! Solvers branch on exact equalities (MPB membership, tier boundaries,
//! divisibility), so only integer types are admitted here; prices and
//! pain-per-buck ratios are built on top as [`num_rational::Ratio`].

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Signed, ToPrimitive};

/// An exact, signed integer type usable as a valuation.
///
/// Implemented for every type satisfying the bounds; in practice `i64`,
/// `i128` and [`num_bigint::BigInt`].
pub trait Scalar:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + Send
    + Sync
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedMul
    + Sum
    + for<'a> Sum<&'a Self>
    + 'static
{
    fn from_usize_exact(value: usize) -> Self {
        Self::from_usize(value).expect("usize fits in scalar")
    }
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + Send
        + Sync
        + FromPrimitive
        + ToPrimitive
        + CheckedAdd
        + CheckedMul
        + Sum
        + for<'a> Sum<&'a T>
        + 'static
{
}

/// Sum of `values[r]` over the given item indices.
pub fn sum_over<S: Scalar>(values: &[S], items: &[usize]) -> S {
    items.iter().map(|&r| &values[r]).sum()
}
