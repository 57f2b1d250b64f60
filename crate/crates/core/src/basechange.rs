//! Cyclic base change and semistable reduction, simulated locally over one
//! critical value.
//!
//! The cover of order `e` is totally ramified over the critical value.  Its
//! effect on the fiber decomposes into local data: each component lifts to
//! a cyclic cover determined by the junction monodromy, each node of the
//! configuration normalizes into rational double points resolved by chains
//! of (-2)-curves, and the assembled reduced fiber is contracted to its
//! relatively minimal semistable model.  The number of contracted curves
//! divided by `e` is the defect `c_minus_1`.

use crate::error::Error;
use crate::fiber::{FiberComponent, FiberGraph};
use crate::lattice::{a_chain_gram, rational_canonical, ExceptionalConfig};
use crate::resolution::ResolutionLog;
use crate::{rat, Rat, Result};
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeSet;

/// Normalized local picture above one node of an SNC fiber.
///
/// The two branches through the node carry multiplicities `a` and `b`; the
/// base change has order `e` with `a | e` and `b | e`.  Everything else is
/// determined: the node has `points_above` preimages, each a rational
/// double point whose minimal resolution inserts a chain of
/// `chain_length_per_point` curves of self-intersection -2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalNodeCover {
    pub a: i64,
    pub b: i64,
    pub e: i64,
    pub points_above: i64,
    pub chain_length_per_point: i64,
}

/// Smallest admissible base-change order: the lcm of every component
/// multiplicity of the resolved fiber.  Any positive multiple is also
/// admissible.
pub fn choose_e(log: &ResolutionLog) -> i64 {
    log.final_graph
        .components()
        .iter()
        .map(|c| c.multiplicity)
        .fold(1i64, |acc, m| acc.lcm(&m))
}

/// Normalize the local model `s^e = x^a y^b` above a node.
///
/// The computation runs through the exponent lattice: sheets correspond to
/// the factors of the equation, and each factor's normalization is the
/// cyclic-quotient germ read off from the saturated lattice, resolved by
/// its Hirzebruch-Jung continued fraction.  The result is always a chain
/// of (-2)-curves; the continued-fraction expansion is asserted to consist
/// of 2s.
pub fn local_model(a: i64, b: i64, e: i64) -> Result<LocalNodeCover> {
    if a < 1 || b < 1 || e < 1 {
        return Err(Error::input("local model needs positive a, b, e"));
    }
    if e % a != 0 || e % b != 0 {
        return Err(Error::input(format!(
            "base-change order {e} is not divisible by the branch multiplicities ({a}, {b})"
        )));
    }
    // Sheets of the normalization: factors of s^e - x^a y^b.
    let g = a.gcd(&b);
    let n = e / g;
    let ap = a / g;
    let bp = b / g;

    // Exponent lattice of one factor s'^n = x^{ap} y^{bp}: the dual lattice
    // is {(u, v) : ap*u + bp*v = 0 mod n}, with the quadrant cone.  Its
    // rays have primitive generators (n/ap, 0) and (0, n/bp); expressing
    // the second in a basis extending the first yields the quotient order
    // and offset.
    let step = n / ap; // first coordinate period of the lattice
    let m = n / (ap * bp); // index of the cone basis in the lattice
    let p0 = ((-bp) % step + step) % step; // f2 = (p0, ap) completes a basis
    let t = (p0 + bp) / step;
    debug_assert_eq!((p0 + bp) % step, 0);
    let c = 1 - t * m; // second ray = (c, m) in the basis (f1, f2)
    let c_norm = ((c % m) + m) % m; // shear to the normal form (c_norm, m)

    let chain = if m == 1 {
        Vec::new()
    } else {
        // q parameter of the standard quotient cone; resolution curves have
        // self-intersections given by the negative continued fraction m/q.
        let q = m - c_norm;
        negative_continued_fraction(m, q)?
    };
    if chain.iter().any(|&s| s != 2) {
        return Err(Error::internal(
            "local model produced a non-A-type quotient singularity",
        ));
    }
    let k = chain.len() as i64;
    // Closed-form cross-check: e / lcm(a, b) - 1.
    if k != e / a.lcm(&b) - 1 {
        return Err(Error::internal(
            "local model chain length disagrees with the closed form",
        ));
    }
    Ok(LocalNodeCover {
        a,
        b,
        e,
        points_above: g,
        chain_length_per_point: k,
    })
}

/// Negative (Hirzebruch-Jung) continued-fraction expansion of `num/den`:
/// `num/den = a1 - 1/(a2 - 1/(...))`, all `ai >= 2`.
fn negative_continued_fraction(mut num: i64, mut den: i64) -> Result<Vec<i64>> {
    if den < 1 || num <= den || num.gcd(&den) != 1 {
        return Err(Error::internal(
            "continued fraction expects coprime num > den >= 1",
        ));
    }
    let mut out = Vec::new();
    while den > 0 {
        let q = (num + den - 1) / den;
        out.push(q);
        let next_den = q * den - num;
        num = den;
        den = next_den;
    }
    Ok(out)
}

/// How the preimage of one component splits, when the dual graph alone does
/// not determine it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverSpec {
    /// No external data: allowed only when the splitting is forced.
    Unspecified,
    /// Connected cover (one component).
    FullCover,
    /// Exactly this many components.
    Supplied(i64),
}

/// Covering data of one fiber component: `count` isomorphic components,
/// each of the given genus, each mapping with the given degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentCover {
    pub count: i64,
    pub genus: i64,
    pub degree: i64,
}

/// Describe the preimage of one component under the cyclic cover.
///
/// `incident` lists the local multiplicity of the opposite branch at every
/// point where the branch divisor crosses the component (for a node on the
/// fiber: the multiplicity of the other component; a self-node contributes
/// two entries of the component's own multiplicity).  The preimage of the
/// punctured component is an unbranched cover with one sheet per unit of
/// the component's multiplicity (or `e` sheets for a component outside the
/// branch divisor, multiplicity 0), and the loop around a puncture acts by
/// adding the incident multiplicity.  Component count comes from orbit
/// counting, genera from Riemann-Hurwitz.
pub fn component_cover(
    c: &FiberComponent,
    e: i64,
    incident: &[i64],
    spec: CoverSpec,
) -> Result<ComponentCover> {
    if c.multiplicity < 0 || c.genus < 0 || e < 1 {
        return Err(Error::input("invalid component or order"));
    }
    let n = if c.multiplicity == 0 { e } else { c.multiplicity };
    if e % n != 0 {
        return Err(Error::input(format!(
            "order {e} is not divisible by the multiplicity of `{}`",
            c.id
        )));
    }
    let total: i64 = incident.iter().sum();
    if total % n != 0 {
        return Err(Error::input(
            "incident multiplicities violate the product-one relation",
        ));
    }
    // Orbits of the subgroup generated by the puncture monodromies.  For a
    // genus-0 component, or one outside the branch divisor (where the
    // cover factors through the base), this determines the splitting; a
    // positive-genus branch component has undetermined handle monodromy.
    let forced = incident.iter().fold(n, |acc, &b| acc.gcd(&b));
    let determined = c.genus == 0 || c.multiplicity == 0;
    let k = match (spec, determined) {
        (CoverSpec::Unspecified, true) => forced,
        (CoverSpec::Unspecified, false) if forced == 1 => 1,
        (CoverSpec::Unspecified, false) => {
            return Err(Error::unsupported(format!(
                "component `{}` has positive genus; covering data required",
                c.id
            )))
        }
        (CoverSpec::FullCover, true) if forced != 1 => {
            return Err(Error::input(format!(
                "component `{}` cannot carry a connected cover (forced splitting {forced})",
                c.id
            )))
        }
        (CoverSpec::FullCover, _) => 1,
        (CoverSpec::Supplied(k), true) if k != forced => {
            return Err(Error::input(format!(
                "component `{}` splits into exactly {forced} pieces, not {k}",
                c.id
            )))
        }
        (CoverSpec::Supplied(k), _) => {
            if k < 1 || forced % k != 0 {
                return Err(Error::input(format!(
                    "component `{}`: covering component count {k} must divide {forced}",
                    c.id
                )));
            }
            k
        }
    };
    // Riemann-Hurwitz on one covering component (degree n/k).
    let rhs = (n / k) * (2 * c.genus - 2)
        + incident
            .iter()
            .map(|&b| {
                let d = n.gcd(&b);
                (d / k) * (n / d - 1)
            })
            .sum::<i64>();
    if rhs % 2 != 0 || rhs + 2 < 0 {
        return Err(Error::internal(
            "Riemann-Hurwitz produced a non-integral or negative genus",
        ));
    }
    Ok(ComponentCover {
        count: k,
        genus: (rhs + 2) / 2,
        degree: n / k,
    })
}

/// Result of the simulated base change over one critical value.
#[derive(Debug, Clone)]
pub struct PullbackResult {
    /// Semistable fiber(s) above the (single, totally ramified) preimage of
    /// the critical value.  More than one entry means the cover convention
    /// disconnected the preimage.
    pub fibers_above: Vec<FiberGraph>,
    /// Curves contracted to reach the relatively minimal model.
    pub contracted_per_point: i64,
    /// Labels of the contracted curves, in contraction order.
    pub contracted_labels: Vec<String>,
    /// `contracted_per_point / e`, exact.
    pub c_minus_1: Rat,
    /// Cover-side canonical-degree accounting used by the dual-route
    /// self-intersection check downstream.
    pub ksq_ledger: Rat,
    pub e_used: i64,
    pub warnings: Vec<String>,
}

/// Pick-first contraction policy (returns an index into the candidate list).
fn first_candidate(_candidates: &[usize]) -> usize {
    0
}

/// Simulate the order-`e` base change on an SNC fiber and reduce to the
/// relatively minimal semistable model.
pub fn pullback_fiber(f: &FiberGraph, e: i64) -> Result<PullbackResult> {
    pullback_fiber_with_policy(f, e, &first_candidate)
}

/// Same as [`pullback_fiber`], with a pluggable choice of which
/// contractible curve to collapse next (the result must not depend on it).
pub fn pullback_fiber_with_policy(
    f: &FiberGraph,
    e: i64,
    pick: &dyn Fn(&[usize]) -> usize,
) -> Result<PullbackResult> {
    if !f.clusters().is_empty() {
        return Err(Error::input(
            "pullback needs a configuration with nodes only; resolve first",
        ));
    }
    if e < 1 {
        return Err(Error::input("base-change order must be at least 1"));
    }
    for c in f.components() {
        if e % c.multiplicity != 0 {
            return Err(Error::input(format!(
                "order {e} is not divisible by the multiplicity of `{}`",
                c.id
            )));
        }
    }
    let mut warnings = Vec::new();

    // Covering data per component.
    let n_comps = f.components().len();
    let mut punctures: Vec<Vec<i64>> = vec![Vec::new(); n_comps];
    for &(i, j) in f.edges() {
        if i == j {
            let m = f.components()[i].multiplicity;
            punctures[i].push(m);
            punctures[i].push(m);
        } else {
            punctures[i].push(f.components()[j].multiplicity);
            punctures[j].push(f.components()[i].multiplicity);
        }
    }
    let mut covers = Vec::with_capacity(n_comps);
    for (i, c) in f.components().iter().enumerate() {
        let spec = match f.cover_components().get(&i) {
            Some(&k) => CoverSpec::Supplied(k),
            None if c.genus > 0 && c.multiplicity > 1 => {
                warnings.push(format!(
                    "component `{}` has positive genus and no covering data; assuming a connected full cover",
                    c.id
                ));
                CoverSpec::FullCover
            }
            None => CoverSpec::Unspecified,
        };
        covers.push(component_cover(c, e, &punctures[i], spec)?);
    }

    // Assemble the resolved pullback: covering components, then chain
    // curves inserted at the node preimages.  Everything has multiplicity 1.
    let mut labels: Vec<String> = Vec::new();
    let mut genera: Vec<i64> = Vec::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    // cover_start[i] = index of the first covering component of input i.
    let mut cover_start = Vec::with_capacity(n_comps);
    for (i, cover) in covers.iter().enumerate() {
        cover_start.push(labels.len());
        let id = &f.components()[i].id;
        for j in 0..cover.count {
            let label = if cover.count == 1 {
                id.clone()
            } else {
                format!("{id}~{j}")
            };
            if !used.insert(label.clone()) {
                return Err(Error::input(format!(
                    "component id `{label}` collides with a generated cover label; rename it"
                )));
            }
            labels.push(label);
            genera.push(cover.genus);
        }
    }

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut chain_lengths_used: BTreeSet<i64> = BTreeSet::new();
    let mut chain_counter = 0usize;
    let mut fresh_chain_label = |used: &mut BTreeSet<String>| loop {
        chain_counter += 1;
        let candidate = format!("T{chain_counter}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
    };
    // Spanning-tree bookkeeping on the input graph, to flag sheet-matching
    // conventions on cycle-closing nodes.
    let mut dsu: Vec<usize> = (0..n_comps).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let root = find(dsu, dsu[x]);
            dsu[x] = root;
        }
        dsu[x]
    }

    let mut euler_nodes = 0i64;
    for &(i, j) in f.edges() {
        let (a, b) = (
            f.components()[i].multiplicity,
            f.components()[j].multiplicity,
        );
        let local = local_model(a, b, e)?;
        let k = local.chain_length_per_point;
        if k > 0 {
            chain_lengths_used.insert(k);
        }
        euler_nodes += local.points_above * (k + 1);

        let closes_cycle = find(&mut dsu, i) == find(&mut dsu, j);
        if !closes_cycle {
            let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
            dsu[ri] = rj;
        }
        if closes_cycle && local.points_above > 1 {
            warnings.push(format!(
                "node between `{}` and `{}` closes a cycle with {} preimages; sheet matching chosen by convention",
                f.components()[i].id,
                f.components()[j].id,
                local.points_above
            ));
        }

        for t in 0..local.points_above {
            let side_i = cover_start[i] + (t % covers[i].count) as usize;
            let side_j = cover_start[j] + (t % covers[j].count) as usize;
            if k == 0 {
                edges.push((side_i, side_j));
            } else {
                let mut prev = side_i;
                for _ in 0..k {
                    let label = fresh_chain_label(&mut used);
                    labels.push(label);
                    genera.push(0);
                    let cur = labels.len() - 1;
                    edges.push((prev, cur));
                    prev = cur;
                }
                edges.push((prev, side_j));
            }
        }
    }

    // Crepancy of the inserted chains: their rational canonical class is
    // zero, so the resolution changes no canonical accounting.
    for &k in &chain_lengths_used {
        let config =
            ExceptionalConfig::new(vec![0; k as usize], a_chain_gram(k as usize))?;
        let kappa: Vec<Rat> = rational_canonical(&config)?;
        if kappa.iter().any(|x| !x.is_zero()) {
            return Err(Error::internal(
                "inserted chain has non-zero rational canonical class",
            ));
        }
    }

    // Independent Euler-number prediction: sheets over each punctured
    // component plus the node gadgets.
    let chi_predicted: i64 = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.multiplicity * (2 - 2 * c.genus - punctures[i].len() as i64)
        })
        .sum::<i64>()
        + euler_nodes;
    let chi_assembled: i64 = genera.iter().map(|g| 2 - 2 * g).sum::<i64>()
        - edges.len() as i64;
    if chi_assembled != chi_predicted {
        return Err(Error::internal(format!(
            "assembled pullback has Euler number {chi_assembled}, monodromy model predicts {chi_predicted}"
        )));
    }

    // Maintained intersection table of the reduced pullback: squares from
    // the fiber relation (all multiplicities 1), off-diagonal from edges.
    let total = labels.len();
    let mut gram = vec![vec![0i64; total]; total];
    for &(x, y) in &edges {
        if x != y {
            gram[x][y] += 1;
            gram[y][x] += 1;
        }
    }
    for v in 0..total {
        gram[v][v] = -(0..total).filter(|&w| w != v).map(|w| gram[v][w]).sum::<i64>();
    }

    // Contraction loop: collapse smooth rational (-1)-curves, re-deriving
    // squares from the maintained table each round.
    let mut alive = vec![true; total];
    let mut contracted = 0i64;
    let mut contracted_labels: Vec<String> = Vec::new();
    loop {
        let candidates: Vec<usize> = (0..total)
            .filter(|&v| {
                alive[v]
                    && genera[v] == 0
                    && gram[v][v] == -1
                    && !edges.iter().any(|&(x, y)| x == v && y == v)
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        let v = candidates[pick(&candidates)];
        // Push forward the pairing and replace the node bookkeeping.
        let ends: Vec<usize> = edges
            .iter()
            .filter(|&&(x, y)| x == v || y == v)
            .map(|&(x, y)| if x == v { y } else { x })
            .collect();
        for x in 0..total {
            if !alive[x] || x == v {
                continue;
            }
            for y in 0..total {
                if !alive[y] || y == v {
                    continue;
                }
                gram[x][y] += gram[x][v] * gram[v][y];
            }
        }
        edges.retain(|&(x, y)| x != v && y != v);
        for p in 0..ends.len() {
            for q in (p + 1)..ends.len() {
                let (x, y) = (ends[p].min(ends[q]), ends[p].max(ends[q]));
                edges.push((x, y));
            }
        }
        alive[v] = false;
        contracted += 1;
        contracted_labels.push(labels[v].clone());
    }

    // Split the result into connected pieces and rebuild graphs.
    let alive_indices: Vec<usize> =
        (0..total).filter(|&v| alive[v]).collect();
    let mut piece_dsu: Vec<usize> = (0..total).collect();
    for &(x, y) in &edges {
        let (rx, ry) = (find(&mut piece_dsu, x), find(&mut piece_dsu, y));
        piece_dsu[rx] = ry;
    }
    let mut roots: Vec<usize> = alive_indices
        .iter()
        .map(|&v| find(&mut piece_dsu, v))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() > 1 {
        warnings.push(
            "pullback fiber is disconnected; reporting each connected piece separately"
                .to_string(),
        );
    }

    let mut fibers_above = Vec::with_capacity(roots.len());
    for &root in &roots {
        let members: Vec<usize> = alive_indices
            .iter()
            .copied()
            .filter(|&v| find(&mut piece_dsu, v) == root)
            .collect();
        let comps: Vec<FiberComponent> = members
            .iter()
            .map(|&v| FiberComponent {
                id: labels[v].clone(),
                genus: genera[v],
                multiplicity: 1,
            })
            .collect();
        let piece_edges: Vec<(String, String)> = edges
            .iter()
            .filter(|&&(x, y)| members.contains(&x) && members.contains(&y))
            .map(|&(x, y)| (labels[x].clone(), labels[y].clone()))
            .collect();
        let graph = FiberGraph::new(comps, &piece_edges, vec![])?;
        // Cross-check: the fiber relation on the rebuilt piece must agree
        // with the maintained table.
        let squares = graph.self_intersections()?;
        for (slot, &v) in members.iter().enumerate() {
            if squares[slot] != gram[v][v] {
                return Err(Error::internal(
                    "contracted configuration disagrees with the maintained intersection table",
                ));
            }
        }
        let class = graph.classify()?;
        if !class.semistable {
            return Err(Error::internal(
                "pullback fiber failed to become semistable",
            ));
        }
        if !class.relatively_minimal {
            return Err(Error::internal(
                "contraction loop left a (-1)-curve behind",
            ));
        }
        fibers_above.push(graph);
    }

    let c_minus_1 = Rat::new(contracted.into(), e.into());
    if !c_minus_1.is_integer() && contracted != 0 {
        warnings.push(format!(
            "contracted count {contracted} is not divisible by e = {e}; c_minus_1 is the exact rational"
        ));
    }

    // Cover-side canonical accounting: adjunction totals of the input SNC
    // graph against the fibration genus, minus the contraction defect.
    let g = f.fiber_genus()?;
    let squares = f.self_intersections()?;
    let k_dot_fred: i64 = (0..n_comps)
        .map(|i| 2 * f.component_pa(i) - 2 - squares[i])
        .sum();
    let fred_sq = f.fred_square()?;
    let ksq_ledger =
        rat(2 * (2 * g - 2) - fred_sq - 2 * k_dot_fred) - c_minus_1.clone();

    Ok(PullbackResult {
        fibers_above,
        contracted_per_point: contracted,
        contracted_labels,
        c_minus_1,
        ksq_ledger,
        e_used: e,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::fixtures::*;
    use crate::ratio;
    use crate::resolution::resolve;
    use proptest::prelude::*;

    #[test]
    fn local_model_closed_forms() {
        for e in 1..=6 {
            let lm = local_model(1, 1, e).unwrap();
            assert_eq!((lm.points_above, lm.chain_length_per_point), (1, e - 1));
        }
        let lm = local_model(2, 1, 2).unwrap();
        assert_eq!((lm.points_above, lm.chain_length_per_point), (1, 0));
        let lm = local_model(2, 2, 2).unwrap();
        assert_eq!((lm.points_above, lm.chain_length_per_point), (2, 0));
        let lm = local_model(2, 1, 4).unwrap();
        assert_eq!((lm.points_above, lm.chain_length_per_point), (1, 1));
        let lm = local_model(2, 2, 4).unwrap();
        assert_eq!((lm.points_above, lm.chain_length_per_point), (2, 1));
        let lm = local_model(3, 2, 6).unwrap();
        assert_eq!((lm.points_above, lm.chain_length_per_point), (1, 0));
        let lm = local_model(6, 4, 12).unwrap();
        assert_eq!((lm.points_above, lm.chain_length_per_point), (2, 0));
        assert!(local_model(2, 1, 3).is_err());
    }

    proptest! {
        #[test]
        fn local_model_matches_oracle(a in 1i64..7, b in 1i64..7, mult in 1i64..5) {
            let e = a.lcm(&b) * mult;
            let lm = local_model(a, b, e).unwrap();
            prop_assert_eq!(lm.points_above, a.gcd(&b));
            prop_assert_eq!(lm.chain_length_per_point, e / a.lcm(&b) - 1);
        }
    }

    #[test]
    fn choose_e_examples() {
        let log = resolve(&theta()).unwrap();
        assert_eq!(choose_e(&log), 1);
        let log = resolve(&kodaira_ii()).unwrap();
        assert_eq!(choose_e(&log), 6);
        let log = resolve(&kodaira_i0_star()).unwrap();
        assert_eq!(choose_e(&log), 2);
        let log = resolve(&kodaira_iii()).unwrap();
        assert_eq!(choose_e(&log), 4);
    }

    #[test]
    fn component_cover_examples() {
        // Central component of the star fiber: connected double cover of
        // genus 1.
        let c = comp("Z", 0, 2);
        let cover =
            component_cover(&c, 2, &[1, 1, 1, 1], CoverSpec::Unspecified)
                .unwrap();
        assert_eq!(
            cover,
            ComponentCover {
                count: 1,
                genus: 1,
                degree: 2
            }
        );
        // Leg: a single rational copy.
        let c = comp("L", 0, 1);
        let cover = component_cover(&c, 2, &[2], CoverSpec::Unspecified).unwrap();
        assert_eq!(
            cover,
            ComponentCover {
                count: 1,
                genus: 0,
                degree: 1
            }
        );
        // A component outside the branch divisor: e disjoint copies.
        let c = comp("S", 3, 0);
        let cover = component_cover(&c, 5, &[], CoverSpec::Unspecified).unwrap();
        assert_eq!(
            cover,
            ComponentCover {
                count: 5,
                genus: 3,
                degree: 1
            }
        );
        // Positive genus with several sheets needs data.
        let c = comp("C", 1, 2);
        assert!(component_cover(&c, 2, &[2, 2], CoverSpec::Unspecified).is_err());
        let cover = component_cover(&c, 2, &[2, 2], CoverSpec::FullCover).unwrap();
        assert_eq!(cover.count, 1);
        let cover =
            component_cover(&c, 2, &[2, 2], CoverSpec::Supplied(2)).unwrap();
        assert_eq!(cover.count, 2);
        assert!(component_cover(&c, 2, &[2, 2], CoverSpec::Supplied(3)).is_err());
        // Genus 0 is always forced.
        let c = comp("R", 0, 2);
        assert!(component_cover(&c, 2, &[2, 2], CoverSpec::Supplied(1)).is_err());
        // Product-one violation.
        let c = comp("R", 0, 2);
        assert!(component_cover(&c, 2, &[1], CoverSpec::Unspecified).is_err());
    }

    proptest! {
        #[test]
        fn cover_data_is_independent_of_e(n in 1i64..5, g in 0i64..3, mult in 1i64..4) {
            // Punctures chosen to satisfy the product-one relation.
            let c = comp("C", g, n);
            let incident = vec![n; 2];
            let spec = if g > 0 { CoverSpec::FullCover } else { CoverSpec::Unspecified };
            let base = component_cover(&c, n, &incident, spec).unwrap();
            let again = component_cover(&c, n * mult, &incident, spec).unwrap();
            prop_assert_eq!(base, again);
        }
    }

    #[test]
    fn node_fiber_doubles_to_two_node_cycle() {
        let f = kodaira_i1();
        let result = pullback_fiber(&f, 2).unwrap();
        assert_eq!(result.contracted_per_point, 0);
        assert!(result.c_minus_1.is_zero());
        assert_eq!(result.fibers_above.len(), 1);
        let expect = kodaira_i2();
        assert_eq!(result.fibers_above[0].signature(), expect.signature());
    }

    #[test]
    fn node_fiber_triples_to_triangle() {
        let f = kodaira_i1();
        let result = pullback_fiber(&f, 3).unwrap();
        let got = &result.fibers_above[0];
        assert_eq!(got.components().len(), 3);
        assert_eq!(got.node_count(), 3);
        assert!(got.classify().unwrap().semistable);
        assert_eq!(got.fiber_genus().unwrap(), 1);
        assert!(result.c_minus_1.is_zero());
    }

    #[test]
    fn star_fiber_becomes_smooth_elliptic() {
        let f = kodaira_i0_star();
        let result = pullback_fiber(&f, 2).unwrap();
        assert_eq!(result.contracted_per_point, 4);
        assert_eq!(result.c_minus_1, rat(2));
        assert_eq!(result.fibers_above.len(), 1);
        let fiber = &result.fibers_above[0];
        assert!(fiber.classify().unwrap().smooth);
        assert_eq!(fiber.components()[0].genus, 1);
    }

    #[test]
    fn semistable_fiber_gains_subdivided_nodes() {
        let f = theta();
        let result = pullback_fiber(&f, 2).unwrap();
        assert!(result.c_minus_1.is_zero());
        let fiber = &result.fibers_above[0];
        assert_eq!(fiber.components().len(), 5);
        assert_eq!(fiber.node_count(), 6);
        assert!(fiber.classify().unwrap().semistable);
        assert_eq!(fiber.fiber_genus().unwrap(), 2);
    }

    #[test]
    fn resolved_cusp_fiber_reduces_to_smooth_elliptic() {
        let log = resolve(&kodaira_ii()).unwrap();
        let e = choose_e(&log);
        assert_eq!(e, 6);
        let result = pullback_fiber(&log.final_graph, e).unwrap();
        assert_eq!(result.contracted_per_point, 6);
        assert_eq!(result.c_minus_1, rat(1));
        let fiber = &result.fibers_above[0];
        assert!(fiber.classify().unwrap().smooth);
        assert_eq!(fiber.components()[0].genus, 1);
    }

    #[test]
    fn c_minus_1_is_stable_under_larger_admissible_orders() {
        let log = resolve(&kodaira_ii()).unwrap();
        let small = pullback_fiber(&log.final_graph, 6).unwrap();
        let large = pullback_fiber(&log.final_graph, 12).unwrap();
        assert_eq!(large.contracted_per_point, 12);
        assert_eq!(small.c_minus_1, large.c_minus_1);
        assert_eq!(
            small.fibers_above[0].signature(),
            large.fibers_above[0].signature()
        );
    }

    #[test]
    fn resolved_tacnode_fiber_reduces_to_smooth_elliptic() {
        let log = resolve(&kodaira_iii()).unwrap();
        let e = choose_e(&log);
        assert_eq!(e, 4);
        let result = pullback_fiber(&log.final_graph, e).unwrap();
        assert_eq!(result.contracted_per_point, 4);
        assert_eq!(result.c_minus_1, rat(1));
        assert!(result.fibers_above[0].classify().unwrap().smooth);
    }

    #[test]
    fn genus_two_cusp_has_fractional_defect() {
        let log = resolve(&genus2_cusp()).unwrap();
        let e = choose_e(&log);
        assert_eq!(e, 6);
        let result = pullback_fiber(&log.final_graph, e).unwrap();
        assert_eq!(result.contracted_per_point, 5);
        assert_eq!(result.c_minus_1, ratio(5, 6));
        assert!(result
            .warnings
            .iter()
            .any(|w| w.contains("not divisible")));
        let fiber = &result.fibers_above[0];
        assert!(fiber.classify().unwrap().semistable);
        assert_eq!(fiber.fiber_genus().unwrap(), 2);
        // Two elliptic curves joined at one point.
        assert_eq!(fiber.components().len(), 2);
        assert!(fiber.components().iter().all(|c| c.genus == 1));
        assert_eq!(fiber.node_count(), 1);
    }

    #[test]
    fn pullback_requires_resolved_input() {
        assert!(pullback_fiber(&kodaira_ii(), 6).is_err());
        // Inadmissible order.
        assert!(pullback_fiber(&kodaira_i0_star(), 3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn contraction_count_is_order_independent(choices in proptest::collection::vec(0usize..8, 32)) {
            let log = resolve(&kodaira_ii()).unwrap();
            let baseline = pullback_fiber(&log.final_graph, 6).unwrap();
            let cursor = std::cell::Cell::new(0usize);
            let pick = |cands: &[usize]| {
                let i = cursor.get();
                cursor.set(i + 1);
                choices[i % choices.len()] % cands.len()
            };
            let shuffled = pullback_fiber_with_policy(&log.final_graph, 6, &pick).unwrap();
            prop_assert_eq!(baseline.contracted_per_point, shuffled.contracted_per_point);
            prop_assert_eq!(baseline.c_minus_1, shuffled.c_minus_1);
            prop_assert_eq!(
                baseline.fibers_above[0].signature(),
                shuffled.fibers_above[0].signature()
            );
        }
    }
}
