//! Divisor-class lattices with exact integer pairings.
//!
//! A lattice holds an ordered basis of curve classes and their Gram matrix.
//! Blowing up extends the basis by an exceptional class `e` with `e^2 = -1`
//! orthogonal to the pulled-back old basis, so pullback is an isometry and
//! the strict transform of a class through the center with multiplicity `m`
//! is `pullback(D) - m*e`.

use crate::error::Error;
use crate::scalar::Scalar;
use crate::Result;

/// Ordered basis of curve classes with their integer intersection pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionLattice {
    labels: Vec<String>,
    gram: Vec<Vec<i64>>,
    tower_depth: usize,
}

/// Divisor class as coefficients over a lattice basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorClass<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> DivisorClass<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        DivisorClass { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        DivisorClass {
            coeffs: coeffs.iter().map(|&c| S::from_int(c)).collect(),
        }
    }

    /// `i`-th basis class of a rank-`dim` lattice.
    pub fn basis(i: usize, dim: usize) -> Self {
        let mut coeffs = vec![S::zero(); dim];
        coeffs[i] = S::one();
        DivisorClass { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        DivisorClass {
            coeffs: vec![S::zero(); dim],
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "class rank mismatch");
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "class rank mismatch");
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, by: &S) -> Self {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|a| a.clone() * by.clone()).collect(),
        }
    }
}

/// Result of one blow-up: the extended lattice, its new exceptional class,
/// and the strict transforms of the classes that passed through the center.
#[derive(Debug, Clone)]
pub struct BlowUpResult<S: Scalar> {
    pub lattice: IntersectionLattice,
    pub exceptional: DivisorClass<S>,
    pub strict_transforms: Vec<DivisorClass<S>>,
}

impl IntersectionLattice {
    /// Build a lattice from basis labels and a symmetric integer Gram matrix.
    pub fn new(labels: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = labels.len();
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(Error::input("Gram matrix shape does not match basis size"));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::input(format!(
                        "Gram matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.clone()) {
                return Err(Error::input(format!("duplicate basis label `{label}`")));
            }
        }
        Ok(IntersectionLattice {
            labels,
            gram,
            tower_depth: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Number of blow-ups this lattice sits above its base.
    pub fn tower_depth(&self) -> usize {
        self.tower_depth
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis_class<S: Scalar>(&self, label: &str) -> Result<DivisorClass<S>> {
        let i = self
            .index_of(label)
            .ok_or_else(|| Error::input(format!("unknown basis label `{label}`")))?;
        Ok(DivisorClass::basis(i, self.rank()))
    }

    /// Intersection number of two classes.
    pub fn pair<S: Scalar>(&self, a: &DivisorClass<S>, b: &DivisorClass<S>) -> S {
        assert_eq!(a.dim(), self.rank(), "class rank mismatch");
        assert_eq!(b.dim(), self.rank(), "class rank mismatch");
        let mut acc = S::zero();
        for (i, ai) in a.coeffs().iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs().iter().enumerate() {
                if bj.is_zero() || self.gram[i][j] == 0 {
                    continue;
                }
                acc = acc + ai.clone() * bj.clone() * S::from_int(self.gram[i][j]);
            }
        }
        acc
    }

    pub fn self_pair<S: Scalar>(&self, a: &DivisorClass<S>) -> S {
        self.pair(a, a)
    }

    /// Blow up a point lying on the given classes with the given multiplicities.
    ///
    /// Returns the extended lattice (old basis pulled back, new exceptional
    /// class `label` with square -1) together with the strict transforms
    /// `pullback(D) - m*e` of the listed classes.
    pub fn blow_up<S: Scalar>(
        &self,
        through_center: &[(DivisorClass<S>, i64)],
        label: impl Into<String>,
    ) -> Result<BlowUpResult<S>> {
        let label = label.into();
        if self.index_of(&label).is_some() {
            return Err(Error::input(format!(
                "exceptional label `{label}` already in basis"
            )));
        }
        for (class, mult) in through_center {
            if class.dim() != self.rank() {
                return Err(Error::input("class rank does not match lattice"));
            }
            if *mult < 0 {
                return Err(Error::input("negative multiplicity at blow-up center"));
            }
        }
        let n = self.rank();
        let mut gram = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut row = self.gram[i].clone();
            row.push(0);
            gram.push(row);
        }
        let mut last = vec![0i64; n + 1];
        last[n] = -1;
        gram.push(last);
        let mut labels = self.labels.clone();
        labels.push(label);
        let lattice = IntersectionLattice {
            labels,
            gram,
            tower_depth: self.tower_depth + 1,
        };
        let exceptional: DivisorClass<S> = DivisorClass::basis(n, n + 1);
        let strict_transforms = through_center
            .iter()
            .map(|(class, mult)| {
                let pulled: DivisorClass<S> = lattice_pad(class);
                pulled.sub(&exceptional.scale(&S::from_int(*mult)))
            })
            .collect();
        Ok(BlowUpResult {
            lattice,
            exceptional,
            strict_transforms,
        })
    }

    /// Pull a class back along the most recent blow-up (coefficient padding).
    pub fn pull_back<S: Scalar>(&self, class: &DivisorClass<S>) -> DivisorClass<S> {
        assert_eq!(
            class.dim() + 1,
            self.rank(),
            "pull_back expects a class from the previous floor"
        );
        lattice_pad(class)
    }
}

fn lattice_pad<S: Scalar>(class: &DivisorClass<S>) -> DivisorClass<S> {
    let mut coeffs = class.coeffs().to_vec();
    coeffs.push(S::zero());
    DivisorClass::from_coeffs(coeffs)
}

/// A configuration of exceptional curves: genera plus restricted pairing.
///
/// The pairing must be negative definite for the adjunction system to have a
/// unique solution.
#[derive(Debug, Clone)]
pub struct ExceptionalConfig {
    genera: Vec<i64>,
    gram: Vec<Vec<i64>>,
}

impl ExceptionalConfig {
    pub fn new(genera: Vec<i64>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = genera.len();
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(Error::input("configuration pairing shape mismatch"));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::input("configuration pairing not symmetric"));
                }
            }
        }
        if genera.iter().any(|&g| g < 0) {
            return Err(Error::input("negative genus in configuration"));
        }
        Ok(ExceptionalConfig { genera, gram })
    }

    /// Restrict a lattice pairing to the given curve classes.
    pub fn from_classes<S: Scalar>(
        lattice: &IntersectionLattice,
        curves: &[(i64, DivisorClass<S>)],
    ) -> Result<Self> {
        let mut gram = vec![vec![0i64; curves.len()]; curves.len()];
        for (i, (_, a)) in curves.iter().enumerate() {
            for (j, (_, b)) in curves.iter().enumerate() {
                let p = lattice.pair(a, b);
                gram[i][j] = p.to_int().ok_or_else(|| {
                    Error::input("configuration pairing is not integral")
                })?;
            }
        }
        ExceptionalConfig::new(curves.iter().map(|(g, _)| *g).collect(), gram)
    }

    pub fn len(&self) -> usize {
        self.genera.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genera.is_empty()
    }
}

/// Solve the adjunction system for the rational canonical class of a
/// negative-definite configuration.
///
/// Returns coefficients `alpha` with
/// `sum_j alpha_j (G_i . G_j) + G_i^2 = 2 p_a(G_i) - 2` for every `i`.
/// Chains of (-2)-curves solve to zero; a lone (-1)-curve to +1; a lone
/// (-3)-curve to -1/3.
pub fn rational_canonical<S: Scalar>(config: &ExceptionalConfig) -> Result<Vec<S>> {
    let n = config.len();
    // Augmented system M * alpha = rhs with rhs_i = 2 g_i - 2 - G_i^2.
    let mut m: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| S::from_int(config.gram[i][j])).collect())
        .collect();
    let mut rhs: Vec<S> = (0..n)
        .map(|i| S::from_int(2 * config.genera[i] - 2 - config.gram[i][i]))
        .collect();

    // Symmetric elimination without pivoting.  Negative definiteness is
    // equivalent to every pivot being negative (Sylvester); a zero or
    // positive pivot rejects the configuration.
    for k in 0..n {
        let pivot = m[k][k].clone();
        if !pivot.is_negative() {
            return Err(Error::input(
                "configuration pairing is not negative definite",
            ));
        }
        for i in (k + 1)..n {
            if m[i][k].is_zero() {
                continue;
            }
            let factor = m[i][k].clone() / pivot.clone();
            for j in k..n {
                let delta = factor.clone() * m[k][j].clone();
                m[i][j] = m[i][j].clone() - delta;
            }
            let delta = factor * rhs[k].clone();
            rhs[i] = rhs[i].clone() - delta;
        }
    }
    let mut alpha = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in (i + 1)..n {
            acc = acc - m[i][j].clone() * alpha[j].clone();
        }
        alpha[i] = acc / m[i][i].clone();
    }
    Ok(alpha)
}

/// Rational canonical class composed back into the ambient lattice.
pub fn rational_canonical_class<S: Scalar>(
    lattice: &IntersectionLattice,
    curves: &[(i64, DivisorClass<S>)],
) -> Result<(Vec<S>, DivisorClass<S>)> {
    let config = ExceptionalConfig::from_classes(lattice, curves)?;
    let alpha: Vec<S> = rational_canonical(&config)?;
    let mut class = DivisorClass::zero(lattice.rank());
    for (a, (_, c)) in alpha.iter().zip(curves) {
        class = class.add(&c.scale(a));
    }
    Ok((alpha, class))
}

/// Gram matrix of a chain of `n` smooth rational (-2)-curves.
pub fn a_chain_gram(n: usize) -> Vec<Vec<i64>> {
    let mut gram = vec![vec![0i64; n]; n];
    for i in 0..n {
        gram[i][i] = -2;
        if i + 1 < n {
            gram[i][i + 1] = 1;
            gram[i + 1][i] = 1;
        }
    }
    gram
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::total;
    use crate::{rat, Rat};
    use num_traits::Zero;

    fn simple_lattice() -> IntersectionLattice {
        // One curve of square k = 3 plus an unrelated curve.
        IntersectionLattice::new(
            vec!["C".into(), "D".into()],
            vec![vec![3, 1], vec![1, -2]],
        )
        .unwrap()
    }

    #[test]
    fn strict_transform_square_drops_by_m_squared() {
        let base = simple_lattice();
        let c: DivisorClass<Rat> = base.basis_class("C").unwrap();
        for m in 0..4 {
            let up = base.blow_up(&[(c.clone(), m)], "E1").unwrap();
            let st = &up.strict_transforms[0];
            assert_eq!(up.lattice.self_pair(st), rat(3 - m * m));
            assert_eq!(up.lattice.pair(st, &up.exceptional), rat(m));
            assert_eq!(up.lattice.self_pair(&up.exceptional), rat(-1));
        }
    }

    #[test]
    fn pullback_is_isometry_and_orthogonal_to_exceptional() {
        let base = simple_lattice();
        let c: DivisorClass<Rat> = base.basis_class("C").unwrap();
        let d: DivisorClass<Rat> = base.basis_class("D").unwrap();
        let up = base.blow_up::<Rat>(&[], "E1").unwrap();
        let pc = up.lattice.pull_back(&c);
        let pd = up.lattice.pull_back(&d);
        assert_eq!(up.lattice.pair(&pc, &pd), base.pair(&c, &d));
        assert_eq!(up.lattice.self_pair(&pc), base.self_pair(&c));
        assert_eq!(up.lattice.pair(&pc, &up.exceptional), rat(0));
        assert_eq!(up.lattice.tower_depth(), 1);
    }

    #[test]
    fn transverse_classes_separate_after_one_blow_up() {
        // Two classes meeting once, both through the center with mult 1:
        // strict transforms become disjoint.
        let base = IntersectionLattice::new(
            vec!["A".into(), "B".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let a: DivisorClass<Rat> = base.basis_class("A").unwrap();
        let b: DivisorClass<Rat> = base.basis_class("B").unwrap();
        let up = base.blow_up(&[(a, 1), (b, 1)], "E1").unwrap();
        assert_eq!(
            up.lattice
                .pair(&up.strict_transforms[0], &up.strict_transforms[1]),
            rat(0)
        );
    }

    #[test]
    fn node_center_drops_square_by_four() {
        let base =
            IntersectionLattice::new(vec!["C".into()], vec![vec![0]]).unwrap();
        let c: DivisorClass<Rat> = base.basis_class("C").unwrap();
        let up = base.blow_up(&[(c, 2)], "E1").unwrap();
        assert_eq!(up.lattice.self_pair(&up.strict_transforms[0]), rat(-4));
    }

    #[test]
    fn canonical_class_of_minus_two_chains_vanishes() {
        for n in 1..=6 {
            let config =
                ExceptionalConfig::new(vec![0; n], a_chain_gram(n)).unwrap();
            let alpha: Vec<Rat> = rational_canonical(&config).unwrap();
            assert!(alpha.iter().all(|a| a.is_zero()), "chain length {n}");
        }
    }

    #[test]
    fn canonical_class_of_single_curves() {
        let minus_one =
            ExceptionalConfig::new(vec![0], vec![vec![-1]]).unwrap();
        assert_eq!(rational_canonical::<Rat>(&minus_one).unwrap(), vec![rat(1)]);

        let minus_three =
            ExceptionalConfig::new(vec![0], vec![vec![-3]]).unwrap();
        assert_eq!(
            rational_canonical::<Rat>(&minus_three).unwrap(),
            vec![crate::ratio(-1, 3)]
        );
    }

    #[test]
    fn canonical_class_of_disjoint_chains_vanishes() {
        // A_2 + A_3, block diagonal.
        let mut gram = vec![vec![0i64; 5]; 5];
        let a2 = a_chain_gram(2);
        let a3 = a_chain_gram(3);
        for i in 0..2 {
            for j in 0..2 {
                gram[i][j] = a2[i][j];
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                gram[2 + i][2 + j] = a3[i][j];
            }
        }
        let config = ExceptionalConfig::new(vec![0; 5], gram).unwrap();
        let alpha: Vec<Rat> = rational_canonical(&config).unwrap();
        assert!(alpha.iter().all(|a| a.is_zero()));
    }

    #[test]
    fn indefinite_configurations_are_rejected() {
        for gram in [vec![vec![0i64]], vec![vec![1i64]], vec![vec![2i64]]] {
            let config = ExceptionalConfig::new(vec![0], gram).unwrap();
            assert!(rational_canonical::<Rat>(&config).is_err());
        }
        // Chain with one degenerate direction.
        let gram = vec![vec![-2, 2], vec![2, -2]];
        let config = ExceptionalConfig::new(vec![0, 0], gram).unwrap();
        assert!(rational_canonical::<Rat>(&config).is_err());
    }

    #[test]
    fn adjunction_holds_exactly_for_solutions() {
        // Star-shaped negative-definite configuration (central -3, three legs).
        let gram = vec![
            vec![-3, 1, 1, 1],
            vec![1, -2, 0, 0],
            vec![1, 0, -2, 0],
            vec![1, 0, 0, -2],
        ];
        let config = ExceptionalConfig::new(vec![0; 4], gram.clone()).unwrap();
        let alpha: Vec<Rat> = rational_canonical(&config).unwrap();
        for i in 0..4 {
            let k_dot: Rat = total(
                (0..4).map(|j| alpha[j].clone() * rat(gram[i][j])),
            );
            assert_eq!(k_dot + rat(gram[i][i]), rat(-2), "adjunction at {i}");
        }
    }

    #[test]
    fn works_over_fixed_width_rationals() {
        let config = ExceptionalConfig::new(vec![0], vec![vec![-3]]).unwrap();
        let alpha: Vec<crate::Rat64> = rational_canonical(&config).unwrap();
        assert_eq!(alpha, vec![crate::Rat64::new(-1, 3)]);
    }
}
