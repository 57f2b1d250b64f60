//! Weighted dual graphs of degenerate fibers.
//!
//! A fiber is a connected configuration of irreducible curves: components
//! carry geometric genus and multiplicity, edges are ordinary double points
//! (a self-edge is a self-node), and worse singular points are described by
//! proximity trees of infinitely near points.  Self-intersections are never
//! stored; they are recovered exactly from `F . C_i = 0`.

use crate::error::Error;
use crate::Result;
use std::collections::{BTreeMap, BTreeSet};

/// Irreducible component of a fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberComponent {
    pub id: String,
    /// Geometric genus of the component.
    pub genus: i64,
    /// Multiplicity in the fiber divisor.
    pub multiplicity: i64,
}

/// Singular point worse than an ordinary double point, located on one or
/// more components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingularityDescriptor {
    /// An ordinary double point.  Always encoded as a graph edge; the
    /// variant exists so the descriptor taxonomy is closed, and expands to
    /// the empty proximity tree.
    Node { at: (String, String) },
    /// One smooth branch with a simple cusp (multiplicity sequence 2).
    Cusp { at: String },
    /// Two smooth branches with contact of order two.  The entries may name
    /// the same component (a self-tangency).
    Tacnode { at: (String, String) },
    /// `m >= 3` pairwise transverse smooth branches; one entry per branch,
    /// repeats allowed.
    Ordinary { at: Vec<String> },
    /// Explicit tree of infinitely near points.
    Custom { tree: Vec<TreePoint> },
}

/// One infinitely near point of a custom proximity tree.
///
/// `parent` is the point this one is infinitely near to (`None` for the
/// root); `proximate_to` lists at most one additional, earlier point whose
/// exceptional curve also passes through this point (a satellite point);
/// `branches` gives, per local branch of the original curve through this
/// point, its component and its multiplicity here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePoint {
    pub parent: Option<usize>,
    pub proximate_to: Vec<usize>,
    pub branches: Vec<(String, i64)>,
}

/// Expanded singularity: proximity structure plus branch chains.
#[derive(Debug, Clone)]
pub struct Cluster {
    points: Vec<ClusterPoint>,
    branches: Vec<ClusterBranch>,
}

#[derive(Debug, Clone)]
struct ClusterPoint {
    parent: Option<usize>,
    satellite_of: Option<usize>,
}

#[derive(Debug, Clone)]
struct ClusterBranch {
    component: usize,
    /// `(point, multiplicity)` along the branch, root first.
    chain: Vec<(usize, i64)>,
}

impl Cluster {
    fn empty() -> Self {
        Cluster {
            points: Vec::new(),
            branches: Vec::new(),
        }
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn parent(&self, p: usize) -> Option<usize> {
        self.points[p].parent
    }

    /// Earlier points whose exceptional curve passes through `p`.
    pub fn proximities(&self, p: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(q) = self.points[p].parent {
            out.push(q);
        }
        if let Some(q) = self.points[p].satellite_of {
            out.push(q);
        }
        out
    }

    /// Points proximate to `q`, in blow-up order.
    pub fn proximate_points(&self, q: usize) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&p| self.proximities(p).contains(&q))
            .collect()
    }

    /// Components with a branch in this cluster.
    pub fn components(&self) -> BTreeSet<usize> {
        self.branches.iter().map(|b| b.component).collect()
    }

    /// Multiplicity of the reduced original curve at point `p`, split by
    /// component.
    pub fn mbar_by_component(&self, p: usize) -> BTreeMap<usize, i64> {
        let mut out = BTreeMap::new();
        for branch in &self.branches {
            for &(point, mult) in &branch.chain {
                if point == p {
                    *out.entry(branch.component).or_insert(0) += mult;
                }
            }
        }
        out
    }

    /// Multiplicity of the reduced original curve at point `p`.
    pub fn mbar_at(&self, p: usize) -> i64 {
        self.mbar_by_component(p).values().sum()
    }

    /// Multiplicity of the current reduced total transform at `p`: branches
    /// plus the exceptional curves through the point.
    pub fn m_at(&self, p: usize) -> i64 {
        self.mbar_at(p) + self.proximities(p).len() as i64
    }

    /// Delta-invariant of the singular point.
    pub fn delta(&self) -> i64 {
        (0..self.points.len())
            .map(|p| {
                let m = self.mbar_at(p);
                m * (m - 1) / 2
            })
            .sum()
    }

    /// Resolution defect `sum_p (m_p - 2)^2` over the blow-up centers.
    pub fn alpha(&self) -> i64 {
        (0..self.points.len())
            .map(|p| {
                let d = self.m_at(p) - 2;
                d * d
            })
            .sum()
    }

    /// Local intersection contributions between distinct components,
    /// keyed by `(i, j)` with `i < j`.
    pub fn cross_pairs(&self) -> BTreeMap<(usize, usize), i64> {
        let mut out = BTreeMap::new();
        for p in 0..self.points.len() {
            let by_comp = self.mbar_by_component(p);
            let items: Vec<_> = by_comp.iter().collect();
            for a in 0..items.len() {
                for b in (a + 1)..items.len() {
                    *out.entry((*items[a].0, *items[b].0)).or_insert(0) +=
                        items[a].1 * items[b].1;
                }
            }
        }
        out
    }

    /// Delta contribution of this point to component `c` alone (own-branch
    /// singularity plus same-component branch crossings).
    pub fn own_delta(&self, c: usize) -> i64 {
        (0..self.points.len())
            .map(|p| {
                let m = self.mbar_by_component(p).get(&c).copied().unwrap_or(0);
                m * (m - 1) / 2
            })
            .sum()
    }

    /// Branches of component `c` whose last tree point is `p`.
    pub fn branch_ends(&self, p: usize) -> BTreeMap<usize, i64> {
        let mut out = BTreeMap::new();
        for branch in &self.branches {
            if branch.chain.last().map(|&(q, _)| q) == Some(p) {
                *out.entry(branch.component).or_insert(0) += 1;
            }
        }
        out
    }

    /// Total multiplicity with which `c`'s branches pass through `p`,
    /// weighted by a per-component factor (used for non-reduced transforms).
    pub fn weighted_mbar_at(&self, p: usize, weight: &dyn Fn(usize) -> i64) -> i64 {
        self.mbar_by_component(p)
            .iter()
            .map(|(&c, &m)| weight(c) * m)
            .sum()
    }

    fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Ok(());
        }
        if self.points[0].parent.is_some() {
            return Err(Error::input("proximity tree must start at its root"));
        }
        for (idx, point) in self.points.iter().enumerate() {
            match point.parent {
                None if idx != 0 => {
                    return Err(Error::input(
                        "proximity tree has more than one root",
                    ))
                }
                Some(parent) if parent >= idx => {
                    return Err(Error::input(
                        "proximity-tree parents must precede their children",
                    ))
                }
                _ => {}
            }
            if let Some(target) = point.satellite_of {
                if target >= idx {
                    return Err(Error::input(
                        "satellite targets must precede the point",
                    ));
                }
                let parent = point.parent.ok_or_else(|| {
                    Error::input("the root cannot be a satellite")
                })?;
                if !self.proximities(parent).contains(&target) {
                    return Err(Error::input(
                        "satellite target is not a proximity of the parent",
                    ));
                }
            }
        }
        for branch in &self.branches {
            if branch.chain.is_empty() {
                return Err(Error::input("branch with empty chain"));
            }
            if branch.chain[0].0 != 0 {
                return Err(Error::input("every branch must pass the root"));
            }
            for window in branch.chain.windows(2) {
                let (p, mp) = window[0];
                let (q, mq) = window[1];
                if self.points[q].parent != Some(p) {
                    return Err(Error::input(
                        "branch chain must follow parent links",
                    ));
                }
                if mq > mp {
                    return Err(Error::input(
                        "branch multiplicity increases along the tree",
                    ));
                }
            }
            let &(_, last_mult) = branch.chain.last().unwrap();
            if last_mult != 1 {
                return Err(Error::input(
                    "branch is not resolved within the tree (last multiplicity exceeds 1)",
                ));
            }
            for &(_, m) in &branch.chain {
                if m < 1 {
                    return Err(Error::input("branch multiplicity below 1"));
                }
            }
        }
        for p in 0..self.points.len() {
            let m = self.m_at(p);
            if m < 2 {
                return Err(Error::input(format!(
                    "tree point {p} is not a singular point of the reduced curve"
                )));
            }
            // Proximity constraint on curve multiplicities.
            let proximate_sum: i64 = self
                .proximate_points(p)
                .iter()
                .map(|&q| self.mbar_at(q))
                .sum();
            if proximate_sum > self.mbar_at(p) {
                return Err(Error::input(format!(
                    "multiplicities proximate to tree point {p} exceed the proximity constraint"
                )));
            }
            if m == 2 && self.is_ordinary_double(p) {
                return Err(Error::input(format!(
                    "tree point {p} is an ordinary double point and must not be blown up"
                )));
            }
        }
        Ok(())
    }

    /// A point with two local units is an ordinary double point iff both
    /// units are smooth and transverse; tangency is witnessed by a shared
    /// child point.
    fn is_ordinary_double(&self, p: usize) -> bool {
        #[derive(PartialEq)]
        enum Unit {
            Branch(usize),
            Exceptional(usize),
        }
        let mut units = Vec::new();
        for (b, branch) in self.branches.iter().enumerate() {
            if let Some(&(_, m)) = branch.chain.iter().find(|&&(q, _)| q == p) {
                if m > 1 {
                    return false; // a singular branch: not a node
                }
                units.push(Unit::Branch(b));
            }
        }
        for q in self.proximities(p) {
            units.push(Unit::Exceptional(q));
        }
        if units.len() != 2 {
            return false;
        }
        let children: Vec<usize> = (0..self.points.len())
            .filter(|&ch| self.points[ch].parent == Some(p))
            .collect();
        for &ch in &children {
            let through = |unit: &Unit| match unit {
                Unit::Branch(b) => {
                    self.branches[*b].chain.iter().any(|&(q, _)| q == ch)
                }
                Unit::Exceptional(q) => {
                    self.points[ch].satellite_of == Some(*q)
                }
            };
            if through(&units[0]) && through(&units[1]) {
                return false; // tangent: shared infinitely near point
            }
        }
        true
    }
}

/// Expand a descriptor into its canonical cluster.  `resolve` maps a
/// component id to its index.
fn expand_descriptor(
    desc: &SingularityDescriptor,
    resolve: &dyn Fn(&str) -> Result<usize>,
) -> Result<Cluster> {
    let cluster = match desc {
        SingularityDescriptor::Node { .. } => Cluster::empty(),
        SingularityDescriptor::Cusp { at } => {
            let c = resolve(at)?;
            Cluster {
                points: vec![
                    ClusterPoint {
                        parent: None,
                        satellite_of: None,
                    },
                    ClusterPoint {
                        parent: Some(0),
                        satellite_of: None,
                    },
                    ClusterPoint {
                        parent: Some(1),
                        satellite_of: Some(0),
                    },
                ],
                branches: vec![ClusterBranch {
                    component: c,
                    chain: vec![(0, 2), (1, 1), (2, 1)],
                }],
            }
        }
        SingularityDescriptor::Tacnode { at } => {
            let a = resolve(&at.0)?;
            let b = resolve(&at.1)?;
            Cluster {
                points: vec![
                    ClusterPoint {
                        parent: None,
                        satellite_of: None,
                    },
                    ClusterPoint {
                        parent: Some(0),
                        satellite_of: None,
                    },
                ],
                branches: vec![
                    ClusterBranch {
                        component: a,
                        chain: vec![(0, 1), (1, 1)],
                    },
                    ClusterBranch {
                        component: b,
                        chain: vec![(0, 1), (1, 1)],
                    },
                ],
            }
        }
        SingularityDescriptor::Ordinary { at } => {
            if at.len() < 3 {
                return Err(Error::input(
                    "ordinary point needs at least three branches (two is a node)",
                ));
            }
            let branches = at
                .iter()
                .map(|id| {
                    Ok(ClusterBranch {
                        component: resolve(id)?,
                        chain: vec![(0, 1)],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Cluster {
                points: vec![ClusterPoint {
                    parent: None,
                    satellite_of: None,
                }],
                branches,
            }
        }
        SingularityDescriptor::Custom { tree } => expand_custom(tree, resolve)?,
    };
    cluster.validate()?;
    Ok(cluster)
}

fn expand_custom(
    tree: &[TreePoint],
    resolve: &dyn Fn(&str) -> Result<usize>,
) -> Result<Cluster> {
    if tree.is_empty() {
        return Err(Error::input("custom singularity with empty tree"));
    }
    let mut points = Vec::with_capacity(tree.len());
    for (idx, spec) in tree.iter().enumerate() {
        if spec.proximate_to.len() > 1 {
            return Err(Error::input(format!(
                "tree point {idx}: a point is proximate to at most one point besides its parent"
            )));
        }
        points.push(ClusterPoint {
            parent: spec.parent,
            satellite_of: spec.proximate_to.first().copied(),
        });
    }

    // Assign branch identities: root entries spawn branches; each later
    // entry continues, in order, an unconsumed branch of the same component
    // active at the parent.
    let mut branches: Vec<ClusterBranch> = Vec::new();
    // Branches whose chain currently ends at a given point, not yet claimed
    // by a child.
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    for (idx, spec) in tree.iter().enumerate() {
        for (comp_id, mult) in &spec.branches {
            let comp = resolve(comp_id)?;
            match spec.parent {
                None => {
                    branches.push(ClusterBranch {
                        component: comp,
                        chain: vec![(idx, *mult)],
                    });
                    active[idx].push(branches.len() - 1);
                }
                Some(parent) => {
                    let slot = active[parent]
                        .iter()
                        .position(|&b| branches[b].component == comp)
                        .ok_or_else(|| {
                            Error::input(format!(
                                "tree point {idx}: no branch of `{comp_id}` available at the parent"
                            ))
                        })?;
                    let b = active[parent].remove(slot);
                    branches[b].chain.push((idx, *mult));
                    active[idx].push(b);
                }
            }
        }
    }
    Ok(Cluster { points, branches })
}

/// Classification verdict for a fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberClass {
    /// Reduced with at worst ordinary double points.
    pub semistable: bool,
    /// No smooth rational component of self-intersection -1.
    pub relatively_minimal: bool,
    /// A single smooth reduced component.
    pub smooth: bool,
}

/// Weighted dual graph of a fiber.
#[derive(Debug, Clone)]
pub struct FiberGraph {
    components: Vec<FiberComponent>,
    /// Index pairs `(i, j)` with `i <= j`; a self-edge is a self-node.
    edges: Vec<(usize, usize)>,
    singularities: Vec<(String, SingularityDescriptor)>,
    clusters: Vec<Cluster>,
    /// Optional covering splitting data for positive-genus components,
    /// keyed by component index: the number of covering components.
    cover_components: BTreeMap<usize, i64>,
}

impl FiberGraph {
    pub fn new(
        components: Vec<FiberComponent>,
        edges_by_id: &[(String, String)],
        singularities: Vec<(Option<String>, SingularityDescriptor)>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::input("fiber needs at least one component"));
        }
        let mut index = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(Error::input(format!(
                    "duplicate component id `{}`",
                    c.id
                )));
            }
            if c.genus < 0 {
                return Err(Error::input(format!(
                    "component `{}` has negative genus",
                    c.id
                )));
            }
            if c.multiplicity < 1 {
                return Err(Error::input(format!(
                    "component `{}` has multiplicity below 1",
                    c.id
                )));
            }
        }
        let resolve = |id: &str| -> Result<usize> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::input(format!("unknown component id `{id}`")))
        };
        let mut edges = Vec::with_capacity(edges_by_id.len());
        for (a, b) in edges_by_id {
            let (i, j) = (resolve(a)?, resolve(b)?);
            edges.push((i.min(j), i.max(j)));
        }
        edges.sort_unstable();

        let mut named = Vec::with_capacity(singularities.len());
        let mut clusters = Vec::with_capacity(singularities.len());
        let mut seen_ids = BTreeSet::new();
        for (k, (id, desc)) in singularities.into_iter().enumerate() {
            if matches!(desc, SingularityDescriptor::Node { .. }) {
                return Err(Error::input(
                    "ordinary double points are graph edges; remove the node descriptor",
                ));
            }
            let id = id.unwrap_or_else(|| format!("s{k}"));
            if !seen_ids.insert(id.clone()) {
                return Err(Error::input(format!(
                    "duplicate singularity id `{id}`"
                )));
            }
            clusters.push(expand_descriptor(&desc, &resolve)?);
            named.push((id, desc));
        }

        let graph = FiberGraph {
            components,
            edges,
            singularities: named,
            clusters,
            cover_components: BTreeMap::new(),
        };
        graph.check_connected()?;
        Ok(graph)
    }

    /// Attach covering splitting data (`component id -> number of covering
    /// components`) consumed by the base-change simulation.
    pub fn with_cover_components(
        mut self,
        data: &BTreeMap<String, i64>,
    ) -> Result<Self> {
        for (id, &k) in data {
            let i = self
                .index_of(id)
                .ok_or_else(|| Error::input(format!("unknown component id `{id}`")))?;
            if k < 1 {
                return Err(Error::input(
                    "covering component count must be at least 1",
                ));
            }
            self.cover_components.insert(i, k);
        }
        Ok(self)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.components.len();
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let root = find(dsu, dsu[x]);
                dsu[x] = root;
            }
            dsu[x]
        }
        let union = |dsu: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(dsu, a), find(dsu, b));
            dsu[ra] = rb;
        };
        for &(i, j) in &self.edges {
            union(&mut dsu, i, j);
        }
        for cluster in &self.clusters {
            let comps: Vec<usize> = cluster.components().into_iter().collect();
            for pair in comps.windows(2) {
                union(&mut dsu, pair[0], pair[1]);
            }
        }
        let root = find(&mut dsu, 0);
        for i in 1..n {
            if find(&mut dsu, i) != root {
                return Err(Error::input(format!(
                    "fiber is not connected (component `{}` is isolated)",
                    self.components[i].id
                )));
            }
        }
        Ok(())
    }

    pub fn components(&self) -> &[FiberComponent] {
        &self.components
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn singularities(&self) -> &[(String, SingularityDescriptor)] {
        &self.singularities
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cover_components(&self) -> &BTreeMap<usize, i64> {
        &self.cover_components
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    /// Number of ordinary double points encoded as edges (self-edges count
    /// once).
    pub fn node_count(&self) -> usize {
        self.edges.len()
    }

    fn self_edges(&self, i: usize) -> i64 {
        self.edges.iter().filter(|&&(a, b)| a == i && b == i).count() as i64
    }

    /// Intersection numbers `C_i . C_j` for `i != j`: edges plus local
    /// contributions of the point singularities.
    pub fn cross_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.components.len();
        let mut cross = vec![vec![0i64; n]; n];
        for &(i, j) in &self.edges {
            if i != j {
                cross[i][j] += 1;
                cross[j][i] += 1;
            }
        }
        for cluster in &self.clusters {
            for ((a, b), m) in cluster.cross_pairs() {
                cross[a][b] += m;
                cross[b][a] += m;
            }
        }
        cross
    }

    /// Self-intersections from the fiber relation
    /// `n_i C_i^2 = - sum_{j != i} n_j (C_i . C_j)`.
    pub fn self_intersections(&self) -> Result<Vec<i64>> {
        let cross = self.cross_matrix();
        let n = self.components.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let rhs: i64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| self.components[j].multiplicity * cross[i][j])
                .sum();
            let ni = self.components[i].multiplicity;
            if rhs % ni != 0 {
                return Err(Error::input(format!(
                    "inconsistent configuration: `{}` has non-integral self-intersection",
                    self.components[i].id
                )));
            }
            out.push(-rhs / ni);
        }
        Ok(out)
    }

    /// Arithmetic genus of one component as an embedded curve (geometric
    /// genus plus self-nodes plus its own shares of worse singular points).
    pub fn component_pa(&self, i: usize) -> i64 {
        self.components[i].genus
            + self.self_edges(i)
            + self
                .clusters
                .iter()
                .map(|cl| cl.own_delta(i))
                .sum::<i64>()
    }

    /// Arithmetic genus of the reduced fiber.
    pub fn pa_red(&self) -> i64 {
        let genus_sum: i64 = self.components.iter().map(|c| c.genus).sum();
        let delta_edges = self.edges.len() as i64;
        let delta_points: i64 = self.clusters.iter().map(|cl| cl.delta()).sum();
        genus_sum + delta_edges + delta_points - (self.components.len() as i64 - 1)
    }

    /// Self-intersection of the reduced fiber class.
    pub fn fred_square(&self) -> Result<i64> {
        let squares = self.self_intersections()?;
        let cross = self.cross_matrix();
        let n = self.components.len();
        let mut total: i64 = squares.iter().sum();
        for i in 0..n {
            for j in (i + 1)..n {
                total += 2 * cross[i][j];
            }
        }
        Ok(total)
    }

    /// Genus of the fibration this fiber belongs to, via adjunction:
    /// `K . F = 2g - 2`.
    pub fn fiber_genus(&self) -> Result<i64> {
        let squares = self.self_intersections()?;
        let k_dot_f: i64 = (0..self.components.len())
            .map(|i| {
                self.components[i].multiplicity
                    * (2 * self.component_pa(i) - 2 - squares[i])
            })
            .sum();
        if k_dot_f % 2 != 0 {
            return Err(Error::input(
                "inconsistent configuration: K . F is odd",
            ));
        }
        let g = (k_dot_f + 2) / 2;
        if g < 0 {
            return Err(Error::input(
                "inconsistent configuration: negative fiber genus",
            ));
        }
        Ok(g)
    }

    /// Topological Euler number of the support of the fiber.
    pub fn chi_top(&self) -> i64 {
        let sum_components: i64 = self
            .components
            .iter()
            .map(|c| 2 - 2 * c.genus)
            .sum();
        let gluing_edges = self.edges.len() as i64;
        let gluing_points: i64 = self
            .clusters
            .iter()
            .map(|cl| cl.branch_count() as i64 - 1)
            .sum();
        sum_components - gluing_edges - gluing_points
    }

    pub fn classify(&self) -> Result<FiberClass> {
        let squares = self.self_intersections()?;
        let reduced = self
            .components
            .iter()
            .all(|c| c.multiplicity == 1);
        let semistable = reduced && self.clusters.is_empty();
        let smooth = semistable
            && self.components.len() == 1
            && self.edges.is_empty();
        let relatively_minimal = !(0..self.components.len()).any(|i| {
            self.components[i].genus == 0
                && squares[i] == -1
                && self.component_pa(i) == 0
        });
        Ok(FiberClass {
            semistable,
            relatively_minimal,
            smooth,
        })
    }

    /// Coarse isomorphism signature: sorted component data with sorted
    /// neighbour profiles, plus the sorted edge multiset.  Adequate to
    /// distinguish the small graphs the engine works with.
    pub fn signature(&self) -> FiberSignature {
        let profile = |i: usize| {
            let c = &self.components[i];
            (c.genus, c.multiplicity)
        };
        let mut comps: Vec<(ComponentProfile, Vec<ComponentProfile>)> = (0
            ..self.components.len())
            .map(|i| {
                let mut nbrs = Vec::new();
                for &(a, b) in &self.edges {
                    if a == i {
                        nbrs.push(profile(b));
                    }
                    if b == i && a != b {
                        nbrs.push(profile(a));
                    }
                }
                nbrs.sort_unstable();
                (profile(i), nbrs)
            })
            .collect();
        comps.sort();
        let mut edges: Vec<(ComponentProfile, ComponentProfile)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (pa, pb) = (profile(a), profile(b));
                (pa.min(pb), pa.max(pb))
            })
            .collect();
        edges.sort_unstable();
        FiberSignature {
            components: comps,
            edges,
            singular_points: self.clusters.len(),
        }
    }
}

/// `(genus, multiplicity)` of one component, the unit of comparison in a
/// [`FiberSignature`].
pub type ComponentProfile = (i64, i64);

/// Order-insensitive structural summary of a fiber graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberSignature {
    pub components: Vec<(ComponentProfile, Vec<ComponentProfile>)>,
    pub edges: Vec<(ComponentProfile, ComponentProfile)>,
    pub singular_points: usize,
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn i1_numbers() {
        let f = kodaira_i1();
        assert_eq!(f.self_intersections().unwrap(), vec![0]);
        assert_eq!(f.pa_red(), 1);
        assert_eq!(f.fred_square().unwrap(), 0);
        assert_eq!(f.fiber_genus().unwrap(), 1);
        assert_eq!(f.chi_top(), 1);
        let class = f.classify().unwrap();
        assert!(class.semistable && class.relatively_minimal && !class.smooth);
    }

    #[test]
    fn i0_star_numbers() {
        let f = kodaira_i0_star();
        assert_eq!(
            f.self_intersections().unwrap(),
            vec![-2, -2, -2, -2, -2]
        );
        assert_eq!(f.pa_red(), 0);
        assert_eq!(f.fred_square().unwrap(), -2);
        assert_eq!(f.fiber_genus().unwrap(), 1);
        assert_eq!(f.chi_top(), 6);
        assert!(!f.classify().unwrap().semistable);
        assert!(f.classify().unwrap().relatively_minimal);
    }

    #[test]
    fn theta_numbers() {
        let f = theta();
        assert_eq!(f.self_intersections().unwrap(), vec![-3, -3]);
        assert_eq!(f.pa_red(), 2);
        assert_eq!(f.fred_square().unwrap(), 0);
        assert_eq!(f.fiber_genus().unwrap(), 2);
        assert_eq!(f.chi_top(), 1);
        assert!(f.classify().unwrap().semistable);
    }

    #[test]
    fn cusp_fiber_numbers() {
        let f = kodaira_ii();
        assert_eq!(f.self_intersections().unwrap(), vec![0]);
        assert_eq!(f.pa_red(), 1);
        assert_eq!(f.fiber_genus().unwrap(), 1);
        assert_eq!(f.chi_top(), 2);
        assert!(!f.classify().unwrap().semistable);
        let cl = &f.clusters()[0];
        assert_eq!(cl.delta(), 1);
        assert_eq!(cl.alpha(), 1);
        assert_eq!(
            (0..cl.point_count()).map(|p| cl.m_at(p)).collect::<Vec<_>>(),
            vec![2, 2, 3]
        );
        assert_eq!(
            (0..cl.point_count()).map(|p| cl.mbar_at(p)).collect::<Vec<_>>(),
            vec![2, 1, 1]
        );
    }

    #[test]
    fn tacnode_fiber_numbers() {
        let f = kodaira_iii();
        assert_eq!(f.self_intersections().unwrap(), vec![-2, -2]);
        assert_eq!(f.pa_red(), 1);
        assert_eq!(f.fiber_genus().unwrap(), 1);
        assert_eq!(f.chi_top(), 3);
        let cl = &f.clusters()[0];
        assert_eq!(cl.delta(), 2);
        assert_eq!(cl.alpha(), 1);
        assert_eq!(
            (0..cl.point_count()).map(|p| cl.m_at(p)).collect::<Vec<_>>(),
            vec![2, 3]
        );
        assert_eq!(f.cross_matrix()[0][1], 2);
    }

    #[test]
    fn genus2_cusp_numbers() {
        let f = genus2_cusp();
        assert_eq!(f.pa_red(), 2);
        assert_eq!(f.fiber_genus().unwrap(), 2);
        assert_eq!(f.chi_top(), 0);
        assert_eq!(f.fred_square().unwrap(), 0);
    }

    #[test]
    fn ordinary_triple_point_numbers() {
        let f = FiberGraph::new(
            vec![comp("C", 0, 1)],
            &[],
            vec![(
                None,
                SingularityDescriptor::Ordinary {
                    at: vec!["C".into(), "C".into(), "C".into()],
                },
            )],
        )
        .unwrap();
        assert_eq!(f.self_intersections().unwrap(), vec![0]);
        assert_eq!(f.pa_red(), 3);
        assert_eq!(f.fiber_genus().unwrap(), 3);
        assert_eq!(f.chi_top(), 0);
        assert_eq!(f.clusters()[0].delta(), 3);
        assert_eq!(f.clusters()[0].alpha(), 1);
    }

    #[test]
    fn self_tacnode_numbers() {
        let f = FiberGraph::new(
            vec![comp("C", 0, 1)],
            &[],
            vec![(
                None,
                SingularityDescriptor::Tacnode {
                    at: ("C".into(), "C".into()),
                },
            )],
        )
        .unwrap();
        assert_eq!(f.pa_red(), 2);
        assert_eq!(f.fiber_genus().unwrap(), 2);
        assert_eq!(f.self_intersections().unwrap(), vec![0]);
    }

    #[test]
    fn custom_cusp_tree_matches_builtin() {
        let custom = FiberGraph::new(
            vec![comp("C", 0, 1)],
            &[],
            vec![(
                None,
                SingularityDescriptor::Custom {
                    tree: vec![
                        TreePoint {
                            parent: None,
                            proximate_to: vec![],
                            branches: vec![("C".into(), 2)],
                        },
                        TreePoint {
                            parent: Some(0),
                            proximate_to: vec![],
                            branches: vec![("C".into(), 1)],
                        },
                        TreePoint {
                            parent: Some(1),
                            proximate_to: vec![0],
                            branches: vec![("C".into(), 1)],
                        },
                    ],
                },
            )],
        )
        .unwrap();
        let builtin = kodaira_ii();
        let (a, b) = (&custom.clusters()[0], &builtin.clusters()[0]);
        assert_eq!(a.delta(), b.delta());
        assert_eq!(a.alpha(), b.alpha());
        assert_eq!(
            (0..a.point_count()).map(|p| a.m_at(p)).collect::<Vec<_>>(),
            (0..b.point_count()).map(|p| b.m_at(p)).collect::<Vec<_>>(),
        );
        assert_eq!(custom.pa_red(), builtin.pa_red());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        // Unknown component in an edge.
        assert!(FiberGraph::new(
            vec![comp("C", 0, 1)],
            &[edge("C", "X")],
            vec![]
        )
        .is_err());
        // Multiplicity zero.
        assert!(
            FiberGraph::new(vec![comp("C", 0, 0)], &[], vec![]).is_err()
        );
        // Disconnected.
        assert!(FiberGraph::new(
            vec![comp("A", 0, 1), comp("B", 0, 1)],
            &[],
            vec![]
        )
        .is_err());
        // Node descriptors are edges.
        assert!(FiberGraph::new(
            vec![comp("A", 0, 1), comp("B", 0, 1)],
            &[edge("A", "B")],
            vec![(
                None,
                SingularityDescriptor::Node {
                    at: ("A".into(), "B".into())
                }
            )],
        )
        .is_err());
        // Ordinary point with two branches is a node.
        assert!(FiberGraph::new(
            vec![comp("A", 0, 1), comp("B", 0, 1)],
            &[edge("A", "B")],
            vec![(
                None,
                SingularityDescriptor::Ordinary {
                    at: vec!["A".into(), "B".into()]
                }
            )],
        )
        .is_err());
    }

    #[test]
    fn non_integral_self_intersection_is_rejected() {
        let f = FiberGraph::new(
            vec![comp("A", 0, 2), comp("B", 0, 1)],
            &[edge("A", "B")],
            vec![],
        )
        .unwrap();
        assert!(f.self_intersections().is_err());
    }

    #[test]
    fn custom_tree_blowing_up_a_plain_node_is_rejected() {
        // Two smooth transverse branches with no shared child: an ordinary
        // double point, not a valid blow-up center.
        let result = FiberGraph::new(
            vec![comp("A", 0, 1), comp("B", 0, 1)],
            &[edge("A", "B")],
            vec![(
                None,
                SingularityDescriptor::Custom {
                    tree: vec![TreePoint {
                        parent: None,
                        proximate_to: vec![],
                        branches: vec![("A".into(), 1), ("B".into(), 1)],
                    }],
                },
            )],
        );
        assert!(result.is_err());
    }

    #[test]
    fn custom_tree_proximity_violation_is_rejected() {
        // Child multiplicity exceeding the parent's: 2 proximate to 1.
        let result = FiberGraph::new(
            vec![comp("C", 0, 1)],
            &[],
            vec![(
                None,
                SingularityDescriptor::Custom {
                    tree: vec![
                        TreePoint {
                            parent: None,
                            proximate_to: vec![],
                            branches: vec![("C".into(), 2)],
                        },
                        TreePoint {
                            parent: Some(0),
                            proximate_to: vec![],
                            branches: vec![("C".into(), 3)],
                        },
                    ],
                },
            )],
        );
        assert!(result.is_err());
    }

    #[test]
    fn node_cluster_is_trivial() {
        // Expanded directly: a node blows up nothing and contributes no
        // resolution defect.
        let resolve = |_: &str| Ok(0usize);
        let cluster = super::expand_descriptor(
            &SingularityDescriptor::Node {
                at: ("C".into(), "C".into()),
            },
            &resolve,
        )
        .unwrap();
        assert_eq!(cluster.point_count(), 0);
        assert_eq!(cluster.alpha(), 0);
        assert_eq!(cluster.delta(), 0);
    }

    #[test]
    fn signatures_distinguish_small_kodaira_types() {
        assert_ne!(kodaira_i1().signature(), kodaira_i2().signature());
        assert_eq!(kodaira_i2().signature(), kodaira_i2().signature());
    }
}
