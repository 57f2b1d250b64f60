//! Heights of algebraic points and the inequalities that bound them.
//!
//! An algebraic point on the generic fiber spreads out to a horizontal
//! curve on the surface; its canonical height and logarithmic
//! discriminant are exact rationals built from that curve's numerical
//! data.  This module evaluates the height inequality, the canonical
//! class inequality, and the Miyaoka-type bound on configurations of
//! rational double points, always reporting exact margins.

use crate::error::Error;
use crate::invariants::FibrationSummary;
use crate::rat;
use crate::{Rat, Result};
use num_traits::{Signed, ToPrimitive, Zero};

/// An algebraic point, described by the numerical data of the horizontal
/// curve it spreads out to.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicPoint {
    /// Field degree of the point; the fiber degree of the horizontal curve.
    pub degree: i64,
    /// Intersection of the relative canonical class with the curve.
    pub k_dot_e: Rat,
    /// Genus of the normalization of the horizontal curve.
    pub genus_tilde: i64,
    /// Self-intersection of the curve; only meaningful for sections.
    pub e_self: Option<Rat>,
}

impl AlgebraicPoint {
    pub fn new(
        degree: i64,
        k_dot_e: Rat,
        genus_tilde: i64,
        e_self: Option<Rat>,
    ) -> Result<Self> {
        if degree < 1 {
            return Err(Error::input("point degree must be at least 1"));
        }
        if genus_tilde < 0 {
            return Err(Error::input("normalization genus must be nonnegative"));
        }
        if let Some(sq) = &e_self {
            if degree != 1 {
                return Err(Error::input(
                    "a self-intersection is only meaningful for sections (degree 1)",
                ));
            }
            // For a section the adjunction-type identity pins the height
            // to minus the self-intersection.
            if k_dot_e != -sq.clone() {
                return Err(Error::input(format!(
                    "section data inconsistent: canonical degree {k_dot_e} must equal minus the self-intersection {sq}"
                )));
            }
        }
        Ok(AlgebraicPoint {
            degree,
            k_dot_e,
            genus_tilde,
            e_self,
        })
    }
}

/// Canonical height and logarithmic discriminant of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointInvariants {
    pub h_k: Rat,
    pub d_disc: Rat,
}

pub fn point_invariants(p: &AlgebraicPoint) -> PointInvariants {
    let deg = rat(p.degree);
    PointInvariants {
        h_k: p.k_dot_e.clone() / deg.clone(),
        d_disc: rat(2 * p.genus_tilde - 2) / deg,
    }
}

/// Outcome of an exact inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SatisfiedStrict,
    SatisfiedEquality,
    Violated,
}

/// An inequality `value <= bound` (or `<` when strictness is required)
/// with its exact margin.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub verdict: Verdict,
    pub value: Rat,
    pub bound: Rat,
    /// `bound - value`; negative means violated.
    pub margin: Rat,
    pub margin_approx: f64,
    /// Whether equality already counts as a violation.
    pub strict_required: bool,
    /// Raised when equality holds but contradicts a side condition.
    pub inconsistency: Option<String>,
}

impl BoundReport {
    fn build(
        value: Rat,
        bound: Rat,
        strict_required: bool,
        equality_note: Option<String>,
    ) -> Self {
        let margin = bound.clone() - value.clone();
        let verdict = if margin.is_negative() {
            Verdict::Violated
        } else if margin.is_zero() {
            if strict_required {
                Verdict::Violated
            } else {
                Verdict::SatisfiedEquality
            }
        } else {
            Verdict::SatisfiedStrict
        };
        let inconsistency = if verdict == Verdict::SatisfiedEquality {
            equality_note
        } else {
            None
        };
        BoundReport {
            verdict,
            value,
            bound,
            margin_approx: approx(&margin),
            margin,
            strict_required,
            inconsistency,
        }
    }

    /// How far above the bound the value sits, when violated.
    pub fn violation_excess(&self) -> Option<Rat> {
        (self.verdict == Verdict::Violated && self.margin.is_negative())
            .then(|| -self.margin.clone())
    }
}

/// Decimal view of an exact rational, for report display.
pub fn approx(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Check the height inequality for a point: the height is bounded by
/// `(2g-1)(d(P) + s) - K^2` for semistable fibrations (equality only on
/// smooth ones), and strictly by the same expression with `3s` otherwise.
/// Assumes a non-trivial fibration; triviality cannot be read off the
/// summary.
pub fn check_height_bound(
    fs: &FibrationSummary,
    p: &AlgebraicPoint,
) -> Result<BoundReport> {
    if fs.g < 2 {
        return Err(Error::unsupported(
            "the height inequality requires fiber genus at least 2",
        ));
    }
    let inv = point_invariants(p);
    let s_multiplier = if fs.semistable { 1 } else { 3 };
    let bound = rat(2 * fs.g - 1) * (inv.d_disc.clone() + rat(s_multiplier * fs.s))
        - fs.ksq_rel.clone();
    let note = (fs.s > 0).then(|| {
        format!(
            "equality requires a smooth fibration, but s = {} singular fibers are listed",
            fs.s
        )
    });
    Ok(BoundReport::build(inv.h_k, bound, !fs.semistable, note))
}

/// Check the canonical class inequality: `K^2 <= (2g-2)(2b-2+s)` for
/// semistable fibrations (equality only on smooth ones), strict with `3s`
/// otherwise.
pub fn check_canonical_class(fs: &FibrationSummary) -> Result<BoundReport> {
    if fs.g < 2 {
        return Err(Error::unsupported(
            "the canonical class inequality requires fiber genus at least 2",
        ));
    }
    let s_multiplier = if fs.semistable { 1 } else { 3 };
    let bound = rat(2 * fs.g - 2) * rat(2 * fs.b - 2 + s_multiplier * fs.s);
    let note = (fs.s > 0).then(|| {
        format!(
            "equality requires a smooth fibration, but s = {} singular fibers are listed",
            fs.s
        )
    });
    Ok(BoundReport::build(
        fs.ksq_rel.clone(),
        bound,
        !fs.semistable,
        note,
    ))
}

/// Rational double point types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdeKind {
    A,
    D,
    E,
}

/// Miyaoka's contribution `m` of one rational double point of the given
/// type and rank.
pub fn miyaoka_m(kind: AdeKind, r: i64) -> Result<Rat> {
    match kind {
        AdeKind::A => {
            if r < 0 {
                return Err(Error::input("A-type rank must be nonnegative"));
            }
            Ok(rat(3 * (r + 1)) - Rat::new(3.into(), (r + 1).into()))
        }
        AdeKind::D => {
            if r < 4 {
                return Err(Error::input("D-type rank must be at least 4"));
            }
            Ok(rat(3 * (r + 1)) - Rat::new(3.into(), (4 * (r - 2)).into()))
        }
        AdeKind::E => match r {
            6 => Ok(rat(21) - Rat::new(1.into(), 8.into())),
            7 => Ok(rat(24) - Rat::new(1.into(), 16.into())),
            8 => Ok(rat(27) - Rat::new(1.into(), 40.into())),
            _ => Err(Error::input("E-type rank must be 6, 7, or 8")),
        },
    }
}

/// Excess contribution created when a chain singularity of `mu` rational
/// double curves splits into two of `mu1` and `mu2` at a section crossing
/// (`mu = mu1 + mu2 + 1`).
pub fn split_excess(mu: i64, mu1: i64, mu2: i64) -> Result<Rat> {
    if mu1 < 0 || mu2 < 0 || mu != mu1 + mu2 + 1 {
        return Err(Error::input(format!(
            "invalid split: {mu} must equal {mu1} + {mu2} + 1"
        )));
    }
    let term = |m: i64| Rat::new(3.into(), (m + 1).into());
    let closed = term(mu1) + term(mu2) - term(mu);
    let from_m = miyaoka_m(AdeKind::A, mu)?
        - miyaoka_m(AdeKind::A, mu1)?
        - miyaoka_m(AdeKind::A, mu2)?;
    if closed != from_m {
        return Err(Error::internal(
            "split excess disagrees with the A-chain contribution difference",
        ));
    }
    Ok(closed)
}

/// Verdict of the Miyaoka-type bound for disjoint rational double point
/// curves `E_i` on a surface together with a divisor `D`:
/// `sum m(E_i) + 3 chi_top(D) <= 3 c2(S) - (K_S + D)^2`.
pub fn miyaoka_check(
    c2_s: Rat,
    ksq_plus_d: Rat,
    ade_list: &[(AdeKind, i64)],
    chi_top_d: i64,
) -> Result<BoundReport> {
    let mut lhs = rat(3 * chi_top_d);
    for &(kind, r) in ade_list {
        lhs += miyaoka_m(kind, r)?;
    }
    let rhs = rat(3) * c2_s - ksq_plus_d;
    Ok(BoundReport::build(lhs, rhs, false, None))
}

/// Per-section data at the singular points of the stable model: the chain
/// lengths `mu_q`, and the splittings induced at points the section
/// passes through.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionLocalData {
    /// Chain lengths of all singular points, splittings already applied.
    pub mu_list: Vec<i64>,
    /// `(mu, mu1, mu2)` for each split point.
    pub epsilon_terms: Vec<(i64, i64, i64)>,
}

/// The refined height bound for a section of a semistable fibration over
/// a base of positive genus:
/// `sum 3/(mu_q + 1) + (2g-1)(2b-2) - K^2 + epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedHeightBound {
    pub bound: Rat,
    pub chain_term: Rat,
    pub epsilon: Rat,
}

pub fn refined_height_bound(
    fs: &FibrationSummary,
    sd: &SectionLocalData,
) -> Result<RefinedHeightBound> {
    if !fs.semistable {
        return Err(Error::input(
            "the refined height bound applies to semistable fibrations",
        ));
    }
    if fs.b < 1 {
        return Err(Error::unsupported(
            "the refined height bound requires a base of positive genus",
        ));
    }
    // Each chain of length mu contributes mu + 1 to the relative Euler
    // number; the supplied list must account for all of it.
    let euler_total: i64 = sd.mu_list.iter().map(|&mu| mu + 1).sum();
    if rat(euler_total) != fs.e_f {
        return Err(Error::input(format!(
            "chain lengths account for an Euler number of {euler_total}, but the fibration has {}",
            fs.e_f
        )));
    }
    let mut chain_term = Rat::zero();
    for &mu in &sd.mu_list {
        if mu < 0 {
            return Err(Error::input("chain lengths must be nonnegative"));
        }
        chain_term += Rat::new(3.into(), (mu + 1).into());
    }
    let mut epsilon = Rat::zero();
    for &(mu, mu1, mu2) in &sd.epsilon_terms {
        epsilon += split_excess(mu, mu1, mu2)?;
    }
    let bound = chain_term.clone() + rat((2 * fs.g - 1) * (2 * fs.b - 2))
        - fs.ksq_rel.clone()
        + epsilon.clone();
    Ok(RefinedHeightBound {
        bound,
        chain_term,
        epsilon,
    })
}

/// Sanity warnings about a fibration summary.  `non_trivial` is the
/// caller's assertion that the fibration is not birationally a product.
pub fn validate_fibration(fs: &FibrationSummary, non_trivial: bool) -> Vec<String> {
    let mut warnings = Vec::new();
    let noether_defect =
        rat(12) * fs.chi_f.clone() - fs.ksq_rel.clone() - fs.e_f.clone();
    if !noether_defect.is_zero() {
        warnings.push(format!(
            "relative Noether identity fails with defect {noether_defect}"
        ));
    }
    if fs.b == 0 && non_trivial && fs.s < 2 {
        warnings.push(format!(
            "a non-trivial fibration over a rational base has at least 2 singular fibers; only {} listed",
            fs.s
        ));
    }
    if fs.b == 0 && non_trivial && fs.semistable && fs.s < 5 {
        warnings.push(format!(
            "a non-trivial semistable fibration over a rational base has at least 5 singular fibers; only {} listed",
            fs.s
        ));
    }
    warnings
}
