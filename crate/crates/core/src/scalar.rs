//! Scalar abstraction for coefficient arithmetic.
//!
//! Divisor-class coefficients, canonical-class solutions and all derived
//! invariants are computed over a [`Scalar`].  Exact types (`BigRational`,
//! `Ratio<i64>`) give bit-exact verdicts; `f64` satisfies the same interface
//! for quick numeric experiments but must not back any verdict path.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// Field-like coefficient type for the engine.
///
/// Beyond the num-traits bounds this adds integer embedding/extraction, which
/// the generic code needs to move between the integer combinatorics (graphs,
/// multiplicities, pairings) and scalar-valued results.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + 'static
{
    /// Embed an integer.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer embeds into scalar")
    }

    /// Exact fraction constructor.
    fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }

    /// Return `Some(n)` iff the value is exactly the integer `n`.
    fn to_int(&self) -> Option<i64>;

    /// True iff the value is an exact integer.
    fn is_integer_value(&self) -> bool {
        self.to_int().is_some()
    }
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_int(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }
}

impl Scalar for Ratio<i64> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n)
    }

    fn to_int(&self) -> Option<i64> {
        if self.is_integer() {
            Some(*self.numer())
        } else {
            None
        }
    }
}

impl Scalar for f64 {
    fn to_int(&self) -> Option<i64> {
        if self.is_finite() && self.fract() == 0.0 {
            Some(*self as i64)
        } else {
            None
        }
    }
}

/// Sum of an iterator of scalars (num-traits `Num` lacks `Sum`).
pub fn total<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_round_trip() {
        assert_eq!(<BigRational as Scalar>::from_int(-7).to_int(), Some(-7));
        assert_eq!(<Ratio<i64> as Scalar>::from_int(42).to_int(), Some(42));
        assert_eq!(Scalar::to_int(&3.0f64), Some(3));
    }

    #[test]
    fn fractions_are_not_integers() {
        let half = <BigRational as Scalar>::from_frac(1, 2);
        assert_eq!(half.to_int(), None);
        assert!(!half.is_integer_value());
        assert_eq!(Scalar::to_int(&0.5f64), None);
    }

    #[test]
    fn total_folds() {
        let xs = [1, 2, 3].map(<BigRational as Scalar>::from_int);
        assert_eq!(total(xs).to_int(), Some(6));
    }
}
