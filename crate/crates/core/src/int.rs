//! Integer scalar abstraction.
//!
//! Every algorithm in this crate is exact: words carry integer exponents,
//! matrices have integer entries, and every decision (free reduction,
//! conjugacy, unimodularity, divisor chains) is made with integer arithmetic.
//! Floating point has no role here. The [`Int`] trait names the scalar
//! operations the algorithms need; it is implemented automatically for the
//! built-in signed integers and for `num_bigint::BigInt`. The crate-root
//! aliases fix `BigInt` as the default scalar so that exponents like
//! `b^(10^6)` stay exact, while small self-contained searches can instantiate
//! the same code with `i64`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::{Integer, Roots};
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Scalar integers: ordered ring arithmetic, gcd and exact division from
/// [`Integer`], sign handling from [`Signed`], integer square roots from
/// [`Roots`], and conversions for the few places an algorithm needs a
/// machine-sized count (which error out instead of truncating).
pub trait Int:
    Integer
    + Signed
    + Roots
    + Clone
    + Hash
    + Debug
    + Display
    + ToPrimitive
    + FromPrimitive
    + From<i32>
    + 'static
{
}

impl<T> Int for T where
    T: Integer
        + Signed
        + Roots
        + Clone
        + Hash
        + Debug
        + Display
        + ToPrimitive
        + FromPrimitive
        + From<i32>
        + 'static
{
}

/// Builds a scalar from an `i64`.
///
/// Panics only if the scalar type cannot hold the value (e.g. instantiating
/// with `i32`); the supported scalar types (`i64`, `i128`, `BigInt`) always
/// succeed.
pub fn from_i64<T: Int>(value: i64) -> T {
    T::from_i64(value).expect("scalar type too narrow for i64 value")
}

/// The scalar one, two, ... small constants without sprinkling `From` calls.
pub fn small<T: Int>(value: i32) -> T {
    T::from(value)
}
