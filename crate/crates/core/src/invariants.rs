//! Per-fiber and global numerical invariants.
//!
//! Every singular fiber carries three nonnegative rationals: a
//! canonical-degree defect, an Euler-number defect, and their Noether
//! combination.  They measure the distance from semistability and are
//! computed here by two independent routes that must agree exactly: a
//! closed formula on the input graph, and a simulation ledger through
//! resolution plus base change.  Global invariants subtract the per-fiber
//! totals from the standard relative invariants of the fibration.

use crate::basechange::{choose_e, pullback_fiber, PullbackResult};
use crate::error::Error;
use crate::fiber::FiberGraph;
use crate::rat;
use crate::resolution::{resolve, total_alpha, ResolutionLog};
use crate::{Rat, Result};
use num_traits::{Signed, Zero};

/// The three defect invariants of one fiber, plus the data they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberInvariants {
    /// Canonical-degree defect (dual-route checked).
    pub c1_sq: Rat,
    /// Euler-number defect.
    pub c2: Rat,
    /// Noether combination `(c1_sq + c2) / 12`.
    pub chi: Rat,
    /// Contraction defect from the semistable reduction.
    pub c_minus_1: Rat,
    /// Total resolution defect of the fiber's singular points.
    pub alpha_total: i64,
    /// Base-change order used by the simulation route.
    pub e_used: i64,
}

/// Invariants together with the full simulation trace.
#[derive(Debug, Clone)]
pub struct FiberPipeline {
    pub invariants: FiberInvariants,
    pub log: ResolutionLog,
    pub pullback: PullbackResult,
}

/// Compute the defect invariants of one fiber.
pub fn fiber_invariants(f: &FiberGraph) -> Result<FiberInvariants> {
    Ok(fiber_pipeline(f, None)?.invariants)
}

/// Compute the defect invariants with an explicit base-change order
/// (`None` picks the smallest admissible one) and keep the trace.
pub fn fiber_pipeline(f: &FiberGraph, order: Option<i64>) -> Result<FiberPipeline> {
    let g = f.fiber_genus()?;
    let log = resolve(f)?;
    let e = order.unwrap_or_else(|| choose_e(&log));
    let pullback = pullback_fiber(&log.final_graph, e)?;

    let alpha = total_alpha(&log);
    let pa = f.pa_red();
    let fred_sq = f.fred_square()?;

    // Route one: closed formula on the input graph.
    let c1_closed =
        rat(4 * (g - pa) + fred_sq + alpha) - pullback.c_minus_1.clone();
    // Route two: resolution blow-up count plus the cover-side ledger.
    let c1_ledger = rat(log.steps.len() as i64) + pullback.ksq_ledger.clone();
    if c1_closed != c1_ledger {
        return Err(Error::internal(format!(
            "canonical-defect routes disagree: closed formula {c1_closed}, simulation ledger {c1_ledger} (fiber genus {g}, alpha {alpha}, contracted {})",
            pullback.contracted_per_point
        )));
    }

    // Euler-number defect, localized at the single preimage point.
    let generic = 2 - 2 * g;
    let local_above: i64 = pullback
        .fibers_above
        .iter()
        .map(|piece| piece.chi_top() - generic)
        .sum();
    let c2 = rat(f.chi_top() - generic) - Rat::new(local_above.into(), e.into());
    let chi = (c1_closed.clone() + c2.clone()) / rat(12);

    Ok(FiberPipeline {
        invariants: FiberInvariants {
            c1_sq: c1_closed,
            c2,
            chi,
            c_minus_1: pullback.c_minus_1.clone(),
            alpha_total: alpha,
            e_used: e,
        },
        log,
        pullback,
    })
}

/// A fibration: base data, relative invariants, and its singular fibers.
#[derive(Debug, Clone)]
pub struct FibrationSummary {
    /// Fiber genus.
    pub g: i64,
    /// Base-curve genus.
    pub b: i64,
    /// Number of singular fibers.
    pub s: i64,
    /// Relative canonical self-intersection.
    pub ksq_rel: Rat,
    /// Relative Euler characteristic of the structure sheaf.
    pub chi_f: Rat,
    /// Relative topological Euler number.
    pub e_f: Rat,
    pub fibers: Vec<FiberGraph>,
    pub semistable: bool,
}

impl FibrationSummary {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: i64,
        b: i64,
        s: i64,
        ksq_rel: Rat,
        chi_f: Rat,
        e_f: Rat,
        fibers: Vec<FiberGraph>,
        semistable: bool,
    ) -> Result<Self> {
        if g < 1 {
            return Err(Error::input("fiber genus must be at least 1"));
        }
        if b < 0 {
            return Err(Error::input("base genus must be nonnegative"));
        }
        if s != fibers.len() as i64 {
            return Err(Error::input(format!(
                "fibration lists {} singular fibers but claims s = {s}",
                fibers.len()
            )));
        }
        if rat(12) * chi_f.clone() != ksq_rel.clone() + e_f.clone() {
            return Err(Error::input(format!(
                "relative invariants violate the Noether identity: 12 * {chi_f} != {ksq_rel} + {e_f}"
            )));
        }
        for fiber in &fibers {
            if fiber.fiber_genus()? != g {
                return Err(Error::input(
                    "a listed fiber has a different genus than the fibration",
                ));
            }
            let class = fiber.classify()?;
            if !class.relatively_minimal {
                return Err(Error::input(
                    "a listed fiber contains a rational (-1)-curve; the fibration must be relatively minimal",
                ));
            }
            if semistable && !class.semistable {
                return Err(Error::input(
                    "fibration is flagged semistable but lists a non-semistable fiber",
                ));
            }
        }
        Ok(FibrationSummary {
            g,
            b,
            s,
            ksq_rel,
            chi_f,
            e_f,
            fibers,
            semistable,
        })
    }
}

/// Global invariants: relative invariants minus the per-fiber totals.
#[derive(Debug, Clone)]
pub struct GlobalInvariants {
    pub i_k: Rat,
    pub i_chi: Rat,
    pub i_e: Rat,
    pub per_fiber: Vec<FiberInvariants>,
    pub nonnegative: bool,
    /// Vanishing of `i_k` or `i_chi` characterizes isotriviality for
    /// fibrations of genus at least 2; `None` below that.
    pub isotrivial_indicated: Option<bool>,
    pub violations: Vec<String>,
}

pub fn global_invariants(fs: &FibrationSummary) -> Result<GlobalInvariants> {
    let mut per_fiber = Vec::with_capacity(fs.fibers.len());
    for fiber in &fs.fibers {
        per_fiber.push(fiber_invariants(fiber)?);
    }
    let sum = |pick: &dyn Fn(&FiberInvariants) -> &Rat| -> Rat {
        per_fiber
            .iter()
            .map(pick)
            .fold(Rat::zero(), |acc, x| acc + x.clone())
    };
    let i_k = fs.ksq_rel.clone() - sum(&|inv| &inv.c1_sq);
    let i_chi = fs.chi_f.clone() - sum(&|inv| &inv.chi);
    let i_e = fs.e_f.clone() - sum(&|inv| &inv.c2);

    let mut violations = Vec::new();
    for (name, value) in [("I_K", &i_k), ("I_chi", &i_chi), ("I_e", &i_e)] {
        if value.is_negative() {
            violations.push(format!(
                "{name} = {value} is negative; the supplied relative invariants are inconsistent with the listed fibers"
            ));
        }
    }
    if fs.semistable {
        let nonzero = per_fiber.iter().any(|inv| {
            !inv.c1_sq.is_zero() || !inv.c2.is_zero() || !inv.chi.is_zero()
        });
        if nonzero {
            violations.push(
                "fibration is flagged semistable but a fiber has non-zero defects"
                    .to_string(),
            );
        }
    }
    let nonnegative = violations.is_empty();
    let isotrivial_indicated =
        (fs.g >= 2).then(|| i_k.is_zero() || i_chi.is_zero());
    Ok(GlobalInvariants {
        i_k,
        i_chi,
        i_e,
        per_fiber,
        nonnegative,
        isotrivial_indicated,
        violations,
    })
}

/// Per-fiber upper bound on the sum of the canonical and contraction
/// defects.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberBoundReport {
    pub g: i64,
    pub pa_red: i64,
    pub c1_sq: Rat,
    pub c_minus_1: Rat,
    /// Margin of `c1_sq + c_minus_1 <= 4g - 3`.
    pub margin_basic: Rat,
    /// Margin of the sharpened bound `<= 4g - 4`, present when
    /// `pa_red > 0`.
    pub margin_sharp: Option<Rat>,
    /// The bound is guaranteed for fibrations of genus at least 2.
    pub applicable: bool,
    /// Verdict of the effective bound, when applicable.
    pub holds: Option<bool>,
}

/// Evaluate the per-fiber defect bound with exact margins.
pub fn check_fiber_bound(f: &FiberGraph) -> Result<FiberBoundReport> {
    let inv = fiber_invariants(f)?;
    let g = f.fiber_genus()?;
    let pa = f.pa_red();
    let total = inv.c1_sq.clone() + inv.c_minus_1.clone();
    let margin_basic = rat(4 * g - 3) - total.clone();
    let margin_sharp = (pa > 0).then(|| rat(4 * g - 4) - total);
    let applicable = g >= 2;
    let holds = applicable.then(|| {
        let effective = margin_sharp.as_ref().unwrap_or(&margin_basic);
        !effective.is_negative()
    });
    Ok(FiberBoundReport {
        g,
        pa_red: pa,
        c1_sq: inv.c1_sq,
        c_minus_1: inv.c_minus_1,
        margin_basic,
        margin_sharp,
        applicable,
        holds,
    })
}

/// Outcome of simulating a degree-`d` semistable-reduction base change on
/// a whole fibration.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub d: i64,
    /// `(order, skipped-reason)` per listed fiber.
    pub per_fiber: Vec<(i64, Option<String>)>,
    pub i_before: (Rat, Rat, Rat),
    pub i_after: (Rat, Rat, Rat),
    /// All three invariants scale exactly by `d`.
    pub scaling_holds: bool,
    /// Genus of the covering base curve.
    pub new_base_genus: i64,
    /// Extra totally ramified non-critical points needed for parity.
    pub extra_branch_points: i64,
    /// Singular fibers of the pulled-back fibration.
    pub new_singular_fibers: i64,
    pub notes: Vec<String>,
}

/// Simulate the base change of degree `d` (local order per fiber taken
/// from `orders`, default smallest admissible) and audit the exact scaling
/// of all three global invariants.
pub fn check_scaling(
    fs: &FibrationSummary,
    d: i64,
    orders: &[Option<i64>],
) -> Result<ScalingReport> {
    if d < 1 {
        return Err(Error::input("cover degree must be at least 1"));
    }
    if !orders.is_empty() && orders.len() != fs.fibers.len() {
        return Err(Error::input(
            "one order override per listed fiber expected",
        ));
    }
    let global = global_invariants(fs)?;
    let mut notes = Vec::new();
    let mut per_fiber = Vec::with_capacity(fs.fibers.len());
    let mut sum_c1 = Rat::zero();
    let mut sum_c2 = Rat::zero();
    let mut sum_chi = Rat::zero();
    let mut ram_correction = 0i64; // sum over critical values of (d/e)(e-1)
    let mut new_singular = 0i64;
    let mut any_skipped = false;

    for (idx, fiber) in fs.fibers.iter().enumerate() {
        let log = resolve(fiber)?;
        let e = orders
            .get(idx)
            .copied()
            .flatten()
            .unwrap_or_else(|| choose_e(&log));
        if d % e != 0 {
            return Err(Error::input(format!(
                "cover degree {d} is not divisible by the order {e} needed at fiber {idx}"
            )));
        }
        match fiber_pipeline(fiber, Some(e)) {
            Ok(pipeline) => {
                sum_c1 += pipeline.invariants.c1_sq.clone();
                sum_c2 += pipeline.invariants.c2.clone();
                sum_chi += pipeline.invariants.chi.clone();
                ram_correction += (d / e) * (e - 1);
                for piece in &pipeline.pullback.fibers_above {
                    // Pulled-back fibers must be semistable with vanishing
                    // defects; verified by running the pipeline on them.
                    let above = fiber_invariants(piece)?;
                    if !above.c1_sq.is_zero()
                        || !above.c2.is_zero()
                        || !above.chi.is_zero()
                    {
                        return Err(Error::internal(
                            "pulled-back fiber has non-zero defects",
                        ));
                    }
                    if !piece.classify()?.smooth {
                        new_singular += d / e;
                    }
                }
                per_fiber.push((e, None));
            }
            Err(Error::Unsupported(reason)) => {
                any_skipped = true;
                notes.push(format!("fiber {idx} skipped: {reason}"));
                per_fiber.push((e, Some(reason)));
            }
            Err(other) => return Err(other),
        }
    }

    // Covering base curve: Hurwitz with total ramification over the
    // critical values, plus the minimal number of extra totally ramified
    // points needed to make the genus integral and nonnegative.
    let base = d * (2 * fs.b - 2) + ram_correction;
    let mut extra = 0i64;
    let (new_base_genus, extra_branch_points) = if d == 1 {
        (fs.b, 0)
    } else {
        loop {
            let doubled = base + extra * (d - 1);
            if doubled >= -2 && doubled % 2 == 0 {
                break ((doubled + 2) / 2, extra);
            }
            extra += 1;
        }
    };

    let i_before = (
        global.i_k.clone(),
        global.i_chi.clone(),
        global.i_e.clone(),
    );
    let scaled = |x: &Rat| rat(d) * x.clone();
    let (i_after, scaling_holds) = if any_skipped {
        notes.push(
            "scaling not asserted: some fibers were skipped".to_string(),
        );
        ((Rat::zero(), Rat::zero(), Rat::zero()), false)
    } else {
        // Relative invariants of the pulled-back (semistable) fibration.
        let ksq_after = scaled(&(fs.ksq_rel.clone() - sum_c1));
        let chi_after = scaled(&(fs.chi_f.clone() - sum_chi));
        let e_after = scaled(&(fs.e_f.clone() - sum_c2));
        let holds = ksq_after == scaled(&global.i_k)
            && chi_after == scaled(&global.i_chi)
            && e_after == scaled(&global.i_e);
        ((ksq_after, chi_after, e_after), holds)
    };

    Ok(ScalingReport {
        d,
        per_fiber,
        i_before,
        i_after,
        scaling_holds,
        new_base_genus,
        extra_branch_points,
        new_singular_fibers: new_singular,
        notes,
    })
}
