//! Embedded resolution of fiber singularities.
//!
//! Each singular point worse than a node is blown up along its proximity
//! tree until the reduced total transform has only ordinary double points.
//! The log records, per blow-up: the multiplicity `m` of the current
//! reduced total transform at the center, the multiplicity `mbar` of the
//! strict transform of the original curve, and the coefficient of the new
//! exceptional curve in the pulled-back (non-reduced) fiber.  The final
//! graph is the resulting configuration with nodes only.
//!
//! Every resolution is verified twice: the combinatorial bookkeeping is
//! replayed through the divisor-class lattice and both intersection tables
//! must agree exactly.

use crate::error::Error;
use crate::fiber::{FiberComponent, FiberGraph};
use crate::lattice::{DivisorClass, IntersectionLattice};
use crate::{Rat64, Result};
use std::collections::BTreeMap;

/// One blow-up of the resolution sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUpStep {
    /// Id of the singular point being resolved.
    pub singularity: String,
    /// Index of the tree point within that singularity.
    pub point: usize,
    /// Label of the exceptional curve this blow-up creates.
    pub label: String,
    /// Multiplicity of the reduced total transform at the center.
    pub m: i64,
    /// Multiplicity of the strict transform of the original reduced curve.
    pub mbar: i64,
    /// Coefficient of the exceptional curve in the pulled-back fiber.
    pub exc_multiplicity: i64,
}

/// Per-singularity summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPointReport {
    pub singularity: String,
    /// Indices into `ResolutionLog::steps`.
    pub steps: Vec<usize>,
    /// `sum (m - 2)^2` over those steps.
    pub alpha: i64,
    /// Delta-invariant of the singular point.
    pub delta: i64,
}

/// Full record of an embedded resolution.
#[derive(Debug, Clone)]
pub struct ResolutionLog {
    pub steps: Vec<BlowUpStep>,
    pub points: Vec<SingularPointReport>,
    /// Resolved configuration: strict transforms (original ids) followed by
    /// exceptional curves, nodes only.
    pub final_graph: FiberGraph,
    /// Self-intersections in `final_graph` component order, from direct
    /// blow-up bookkeeping (independent of the fiber relation).
    pub final_squares: Vec<i64>,
}

/// Resolution-defect of one resolved singular point.
pub fn alpha_of(log: &ResolutionLog, singularity: &str) -> Result<i64> {
    log.points
        .iter()
        .find(|p| p.singularity == singularity)
        .map(|p| p.alpha)
        .ok_or_else(|| {
            Error::input(format!("unknown singular point `{singularity}`"))
        })
}

/// Total resolution-defect `sum_p alpha_p` of the fiber.
pub fn total_alpha(log: &ResolutionLog) -> i64 {
    log.points.iter().map(|p| p.alpha).sum()
}

/// Execute the embedded resolution of every singular point of `f`.
///
/// Points are processed singularity by singularity in input order and
/// depth-first through each proximity tree.  The result is self-audited:
/// the directly computed intersection numbers of the final graph must
/// match both the fiber relation and an independent lattice replay.
pub fn resolve(f: &FiberGraph) -> Result<ResolutionLog> {
    let n_orig = f.components().len();
    let orig_squares = f.self_intersections()?;
    let mults: Vec<i64> = f.components().iter().map(|c| c.multiplicity).collect();

    // Fresh exceptional labels: E1, E2, ... skipping user-taken ids.
    let mut label_counter = 0usize;
    let mut fresh_label = || loop {
        label_counter += 1;
        let candidate = format!("E{label_counter}");
        if f.index_of(&candidate).is_none() {
            return candidate;
        }
    };

    let mut steps: Vec<BlowUpStep> = Vec::new();
    let mut reports: Vec<SingularPointReport> = Vec::new();
    // (cluster index, point index) -> exceptional label.
    let mut exc_labels: BTreeMap<(usize, usize), String> = BTreeMap::new();
    // Per cluster: exceptional coefficients in the pulled-back fiber.
    let mut exc_mults: Vec<Vec<i64>> = Vec::new();
    let mut extra_edges: Vec<(String, String)> = Vec::new();
    let mut exc_components: Vec<FiberComponent> = Vec::new();
    let mut exc_squares: Vec<i64> = Vec::new();

    for (ci, cluster) in f.clusters().iter().enumerate() {
        let sing_id = f.singularities()[ci].0.clone();
        let np = cluster.point_count();

        // Coefficient of each exceptional curve in the pulled-back fiber:
        // weighted branch multiplicities plus the coefficients of the
        // exceptional curves through the center.
        let mut w = vec![0i64; np];
        for p in 0..np {
            w[p] = cluster.weighted_mbar_at(p, &|c| mults[c])
                + cluster
                    .proximities(p)
                    .iter()
                    .map(|&q| w[q])
                    .sum::<i64>();
        }
        exc_mults.push(w.clone());

        // Depth-first order (children in index order).
        let mut order = Vec::with_capacity(np);
        let mut stack: Vec<usize> = (0..np)
            .filter(|&p| cluster.parent(p).is_none())
            .rev()
            .collect();
        while let Some(p) = stack.pop() {
            order.push(p);
            let children: Vec<usize> = (0..np)
                .filter(|&q| cluster.parent(q) == Some(p))
                .collect();
            stack.extend(children.into_iter().rev());
        }

        // Termination witness: the weight of the unprocessed part of the
        // cluster strictly decreases with every blow-up.
        let weight = |remaining: &[bool]| -> i64 {
            (0..np)
                .filter(|&p| remaining[p])
                .map(|p| {
                    let m = cluster.m_at(p);
                    m * (m - 1) / 2
                })
                .sum()
        };
        let mut remaining = vec![true; np];

        let mut step_indices = Vec::with_capacity(np);
        for &p in &order {
            let before = weight(&remaining);
            remaining[p] = false;
            let after = weight(&remaining);
            if after >= before {
                return Err(Error::internal(
                    "blow-up did not decrease the remaining cluster weight",
                ));
            }
            let label = fresh_label();
            exc_labels.insert((ci, p), label.clone());
            step_indices.push(steps.len());
            steps.push(BlowUpStep {
                singularity: sing_id.clone(),
                point: p,
                label: label.clone(),
                m: cluster.m_at(p),
                mbar: cluster.mbar_at(p),
                exc_multiplicity: w[p],
            });
            exc_components.push(FiberComponent {
                id: label,
                genus: 0,
                multiplicity: w[p],
            });
            exc_squares.push(-1 - cluster.proximate_points(p).len() as i64);
        }

        reports.push(SingularPointReport {
            singularity: sing_id,
            steps: step_indices,
            alpha: cluster.alpha(),
            delta: cluster.delta(),
        });

        // Strict transforms of branches attach to the exceptional curve of
        // their last tree point, one transverse node per branch end.
        for p in 0..np {
            for (comp, count) in cluster.branch_ends(p) {
                for _ in 0..count {
                    extra_edges.push((
                        f.components()[comp].id.clone(),
                        exc_labels[&(ci, p)].clone(),
                    ));
                }
            }
        }
        // Exceptional curves meet iff one center is proximate to the other
        // and no later center is proximate to both.
        for q in 0..np {
            for p in cluster.proximate_points(q) {
                let separated = (0..np).any(|r| {
                    let prox = cluster.proximities(r);
                    prox.contains(&p) && prox.contains(&q)
                });
                if !separated {
                    extra_edges.push((
                        exc_labels[&(ci, q)].clone(),
                        exc_labels[&(ci, p)].clone(),
                    ));
                }
            }
        }
    }

    // Assemble the final graph.
    let mut components: Vec<FiberComponent> = f.components().to_vec();
    components.extend(exc_components);
    let mut edges_by_id: Vec<(String, String)> = f
        .edges()
        .iter()
        .map(|&(i, j)| {
            (
                f.components()[i].id.clone(),
                f.components()[j].id.clone(),
            )
        })
        .collect();
    edges_by_id.extend(extra_edges);
    let final_graph = FiberGraph::new(components, &edges_by_id, vec![])?;
    let final_graph = if f.cover_components().is_empty() {
        final_graph
    } else {
        let by_id: BTreeMap<String, i64> = f
            .cover_components()
            .iter()
            .map(|(&i, &k)| (f.components()[i].id.clone(), k))
            .collect();
        final_graph.with_cover_components(&by_id)?
    };

    // Direct self-intersections: strict transforms drop by the square of
    // each branch multiplicity; an exceptional curve starts at -1 and drops
    // once per proximate center.
    let mut final_squares = Vec::with_capacity(final_graph.components().len());
    for i in 0..n_orig {
        let drop: i64 = f
            .clusters()
            .iter()
            .map(|cl| {
                (0..cl.point_count())
                    .map(|p| {
                        let m = cl
                            .mbar_by_component(p)
                            .get(&i)
                            .copied()
                            .unwrap_or(0);
                        m * m
                    })
                    .sum::<i64>()
            })
            .sum();
        final_squares.push(orig_squares[i] - drop);
    }
    final_squares.extend(exc_squares);

    // Audit 1: the final graph's fiber relation must reproduce the directly
    // computed squares.
    let relation_squares = final_graph.self_intersections()?;
    if relation_squares != final_squares {
        return Err(Error::internal(
            "resolved graph violates the fiber relation",
        ));
    }

    let log = ResolutionLog {
        steps,
        points: reports,
        final_graph,
        final_squares,
    };

    // Audit 2: independent replay through the divisor-class lattice.
    verify_by_lattice(f, &log)?;
    Ok(log)
}

/// Replay the resolution through the divisor-class lattice and compare
/// every intersection number of the final configuration.
pub fn verify_by_lattice(f: &FiberGraph, log: &ResolutionLog) -> Result<()> {
    let n_orig = f.components().len();
    let squares = f.self_intersections()?;
    let cross = f.cross_matrix();
    let mut gram = vec![vec![0i64; n_orig]; n_orig];
    for i in 0..n_orig {
        for j in 0..n_orig {
            gram[i][j] = if i == j { squares[i] } else { cross[i][j] };
        }
    }
    let labels: Vec<String> =
        f.components().iter().map(|c| c.id.clone()).collect();
    let mut lattice = IntersectionLattice::new(labels, gram)?;

    // Tracked classes, in final-graph component order.
    let mut classes: Vec<DivisorClass<Rat64>> = (0..n_orig)
        .map(|i| DivisorClass::basis(i, n_orig))
        .collect();
    let cluster_index: BTreeMap<&str, usize> = f
        .singularities()
        .iter()
        .enumerate()
        .map(|(ci, (id, _))| (id.as_str(), ci))
        .collect();
    // (cluster, point) -> tracked index.
    let mut exc_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    for step in &log.steps {
        let ci = cluster_index[step.singularity.as_str()];
        let cluster = &f.clusters()[ci];
        let p = step.point;

        let mut center: Vec<(DivisorClass<Rat64>, i64)> = Vec::new();
        let mut center_slots: Vec<usize> = Vec::new();
        for (&comp, &m) in cluster.mbar_by_component(p).iter() {
            center.push((classes[comp].clone(), m));
            center_slots.push(comp);
        }
        for &q in &cluster.proximities(p) {
            let slot = exc_index[&(ci, q)];
            center.push((classes[slot].clone(), 1));
            center_slots.push(slot);
        }

        let result = lattice.blow_up(&center, step.label.as_str())?;
        for class in classes.iter_mut() {
            *class = result.lattice.pull_back(class);
        }
        for (slot, strict) in center_slots.iter().zip(result.strict_transforms) {
            classes[*slot] = strict;
        }
        exc_index.insert((ci, p), classes.len());
        classes.push(result.exceptional);
        lattice = result.lattice;
    }

    // Compare with the combinatorial final graph.
    let final_cross = log.final_graph.cross_matrix();
    let n = classes.len();
    if n != log.final_graph.components().len() {
        return Err(Error::internal(
            "lattice replay produced a different number of classes",
        ));
    }
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j {
                log.final_squares[i]
            } else {
                final_cross[i][j]
            };
            let got: Rat64 = lattice.pair(&classes[i], &classes[j]);
            if got != Rat64::from_integer(expected) {
                return Err(Error::internal(format!(
                    "lattice replay disagrees with the resolved graph at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// One per-step inequality instance: `mbar >= m - 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepBound {
    pub singularity: String,
    pub point: usize,
    /// `mbar - (m - 2)`; non-negative when the bound holds.
    pub margin: i64,
}

/// Report of the resolution inequalities for one fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionBounds {
    pub per_step: Vec<StepBound>,
    pub steps_hold: bool,
    pub alpha_total: i64,
    pub pa_red: i64,
    /// `2 * pa_red - alpha_total`; non-negative when the bound holds.
    pub alpha_margin: i64,
    pub alpha_holds: bool,
    pub alpha_equality: bool,
    /// The equality case occurs exactly when `pa_red = 0`.
    pub equality_iff_pa_zero: bool,
}

/// Evaluate the per-step and total resolution bounds with exact margins.
pub fn check_resolution_bounds(
    log: &ResolutionLog,
    f: &FiberGraph,
) -> ResolutionBounds {
    let per_step: Vec<StepBound> = log
        .steps
        .iter()
        .map(|s| StepBound {
            singularity: s.singularity.clone(),
            point: s.point,
            margin: s.mbar - (s.m - 2),
        })
        .collect();
    let steps_hold = per_step.iter().all(|b| b.margin >= 0);
    let alpha_total = total_alpha(log);
    let pa_red = f.pa_red();
    let alpha_margin = 2 * pa_red - alpha_total;
    let alpha_equality = alpha_margin == 0;
    ResolutionBounds {
        steps_hold,
        per_step,
        alpha_total,
        pa_red,
        alpha_margin,
        alpha_holds: alpha_margin >= 0,
        alpha_equality,
        equality_iff_pa_zero: alpha_equality == (pa_red == 0),
    }
}
