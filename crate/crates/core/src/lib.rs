//! Exact intersection calculus for degenerate fibers of surface fibrations.
//!
//! The crate models one-dimensional singular fibers as weighted dual graphs,
//! simulates embedded resolution of the reduced fiber and cyclic base change
//! followed by semistable reduction, and evaluates the numerical invariants
//! and inequalities attached to a fibration (per-fiber Chern numbers, global
//! defect invariants, height bounds for algebraic points).
//!
//! All verdict-relevant arithmetic is exact.  Computations are generic over a
//! [`Scalar`] type; [`Rat`] (arbitrary-precision rationals) is the default
//! used by every shipped front end.

pub mod basechange;
pub mod error;
pub mod fiber;
pub mod heights;
pub mod invariants;
pub mod lattice;
pub mod resolution;
pub mod scalar;

pub use error::Error;
pub use scalar::Scalar;

/// Default exact scalar: arbitrary-precision rational numbers.
pub type Rat = num_rational::BigRational;

/// Fixed-width exact rationals, adequate for small hand inputs.
pub type Rat64 = num_rational::Rational64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Convenience constructor for the default scalar from an integer.
pub fn rat(n: i64) -> Rat {
    <Rat as Scalar>::from_int(n)
}

/// Convenience constructor for the default scalar from a fraction.
pub fn ratio(n: i64, d: i64) -> Rat {
    rat(n) / rat(d)
}
