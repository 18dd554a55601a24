//! Spherically homogeneous rooted trees, their automorphism portraits and
//! the multiplicity-free decomposition of the boundary representation.

mod projective;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::ArithError;
use crate::Rational;

pub use projective::{ProjectiveLayers, DEFAULT_ENUMERATION_BUDGET, ProjectiveTree, ProjectiveTreeSpec, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("enumerating {points} vectors exceeds the budget of {budget}")]
    EnumerationBudget { points: u128, budget: u128 },
    #[error("points are not equidistant from the base point: levels {0} and {1}")]
    NotEquidistant(u32, u32),
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Numbers as JSON integers, or strings when they exceed 64 bits.
pub fn big_json(x: &BigUint) -> serde_json::Value {
    match x.to_u64() {
        Some(v) => serde_json::json!(v),
        None => serde_json::json!(x.to_string()),
    }
}

pub(crate) fn serialize_big<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(big_json))
}

/// Branching prefix `(m_1, …, m_D)` of the tree `T_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeSpec {
    pub branching: Vec<u64>,
}

impl TreeSpec {
    pub fn new(branching: Vec<u64>) -> Result<Self, TreeError> {
        if let Some(m) = branching.iter().find(|&&m| m < 2) {
            return Err(TreeError::Param(format!("branching numbers must be at least 2, got {m}")));
        }
        Ok(Self { branching })
    }

    pub fn depth(&self) -> usize {
        self.branching.len()
    }

    /// `|L_m(n)| = m_1 ⋯ m_n`.
    pub fn layer_size(&self, n: usize) -> BigUint {
        self.branching[..n].iter().map(|&m| BigUint::from(m)).product()
    }

    /// Vertices of level `n` as digit strings, lexicographically.
    pub fn layer(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &m in &self.branching[..n] {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..m as usize).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// Rooted automorphism given by a permutation of the children at each
/// vertex. Missing permutations and subtrees are the identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Portrait {
    perm: Option<Vec<usize>>,
    children: BTreeMap<usize, Portrait>,
}

impl Portrait {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_none() && self.children.is_empty()
    }

    fn image(&self, a: usize) -> usize {
        self.perm.as_ref().map_or(a, |p| p[a])
    }

    fn preimage(&self, b: usize) -> usize {
        self.perm.as_ref().map_or(b, |p| p.iter().position(|&x| x == b).unwrap())
    }

    fn child(&self, a: usize) -> Portrait {
        self.children.get(&a).cloned().unwrap_or_default()
    }

    fn set_child(&mut self, a: usize, c: Portrait) {
        if c.is_identity() {
            self.children.remove(&a);
        } else {
            self.children.insert(a, c);
        }
    }

    fn set_perm(&mut self, p: Vec<usize>) {
        let trivial = p.iter().enumerate().all(|(i, &x)| i == x);
        self.perm = (!trivial).then_some(p);
    }

    pub fn act(&self, v: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(v.len());
        let mut g = Some(self);
        for &a in v {
            match g {
                Some(node) => {
                    out.push(node.image(a));
                    g = node.children.get(&a);
                }
                None => out.push(a),
            }
        }
        out
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Portrait) -> Portrait {
        let mut out = Portrait::identity();
        let size = self.perm.as_ref().or(other.perm.as_ref()).map(|p| p.len());
        if let Some(m) = size {
            out.set_perm((0..m).map(|a| other.image(self.image(a))).collect());
        }
        let mut keys: Vec<usize> = self.children.keys().copied().collect();
        keys.extend(other.children.keys().map(|&b| self.preimage(b)));
        keys.sort_unstable();
        keys.dedup();
        for a in keys {
            out.set_child(a, self.child(a).then(&other.child(self.image(a))));
        }
        out
    }

    pub fn inverse(&self) -> Portrait {
        let mut out = Portrait::identity();
        if let Some(p) = &self.perm {
            let mut q = vec![0; p.len()];
            for (a, &b) in p.iter().enumerate() {
                q[b] = a;
            }
            out.set_perm(q);
        }
        for (&a, c) in &self.children {
            out.set_child(self.image(a), c.inverse());
        }
        out
    }

    /// Whether every permutation is a bijection of the right size for `spec`.
    pub fn is_valid(&self, spec: &TreeSpec) -> bool {
        self.valid_at(&spec.branching)
    }

    fn valid_at(&self, branching: &[u64]) -> bool {
        let Some((&m, rest)) = branching.split_first() else {
            return self.is_identity();
        };
        if let Some(p) = &self.perm {
            let mut seen = vec![false; m as usize];
            if p.len() != m as usize || p.iter().any(|&b| b >= m as usize || std::mem::replace(&mut seen[b], true)) {
                return false;
            }
        }
        self.children.iter().all(|(&a, c)| a < m as usize && c.valid_at(rest))
    }
}

fn transposition(m: u64, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m as usize).collect();
    p.swap(a, b);
    p
}

fn common_prefix(x: &[usize], y: &[usize]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

/// An automorphism fixing `base` and mapping `x` to `y`, if they lie at
/// equal distance from `base`.
pub fn prefix_witness(spec: &TreeSpec, base: &[usize], x: &[usize], y: &[usize]) -> Option<Portrait> {
    let c = common_prefix(base, x);
    if c != common_prefix(base, y) || x.len() != y.len() {
        return None;
    }
    // swap the first differing digits, then walk down the image path
    let mut chain = Vec::new();
    for i in c..x.len() {
        chain.push((i, transposition(spec.branching[i], x[i], y[i])));
    }
    let mut g = Portrait::identity();
    for (i, perm) in chain.into_iter().rev() {
        let mut node = Portrait::identity();
        node.set_perm(perm);
        if !g.is_identity() {
            node.set_child(x[i], g);
        }
        g = node;
    }
    for i in (0..c).rev() {
        let mut node = Portrait::identity();
        node.set_child(x[i], g);
        g = node;
    }
    Some(g)
}

/// Number of orbits of the stabiliser of the level-`n` vertex `0…0` on
/// `L_m(n)`, with each orbit certified by explicit witnesses.
pub fn orbit_count_layer(spec: &TreeSpec, n: usize) -> Result<usize, TreeError> {
    if n > spec.depth() {
        return Err(TreeError::Param(format!("level {n} exceeds the depth {}", spec.depth())));
    }
    let base = vec![0usize; n];
    let layer = spec.layer(n);
    let mut classes: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    for v in &layer {
        classes.entry(common_prefix(&base, v)).or_default().push(v);
    }
    let pairwise = layer.len() <= 256;
    for members in classes.values() {
        let rep = members[0];
        for (i, x) in members.iter().enumerate() {
            let sources: &[&Vec<usize>] = if pairwise { &members[..=i] } else { std::slice::from_ref(&rep) };
            for y in sources {
                let g = prefix_witness(spec, &base, y, x)
                    .ok_or_else(|| TreeError::NoWitness(format!("{y:?} -> {x:?}")))?;
                if !g.is_valid(spec) || g.act(y) != **x || g.act(&base) != base {
                    return Err(TreeError::NoWitness(format!("{y:?} -> {x:?}")));
                }
            }
        }
    }
    Ok(classes.len())
}

/// Constituent dimensions of `C[L_m(D)]`, each of multiplicity one.
pub fn tree_zeta(spec: &TreeSpec) -> Vec<(BigUint, u64)> {
    let mut out = vec![(BigUint::one(), 1)];
    let mut prefix = BigUint::one();
    for &m in &spec.branching {
        out.push((&prefix * (m - 1), 1));
        prefix *= m;
    }
    out
}

/// Total multiplicity of each dimension.
pub fn aggregate(list: &[(BigUint, u64)]) -> BTreeMap<BigUint, u64> {
    let mut out = BTreeMap::new();
    for (dim, mult) in list {
        *out.entry(dim.clone()).or_insert(0) += mult;
    }
    out
}

/// Boundary representation of a tree whose branching is a finite prefix
/// followed by the constant `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundarySeries {
    pub prefix: Vec<u64>,
    pub tail: u64,
}

impl BoundarySeries {
    pub fn new(prefix: Vec<u64>, tail: u64) -> Result<Self, TreeError> {
        TreeSpec::new(prefix.clone())?;
        if tail < 2 {
            return Err(TreeError::Param(format!("tail branching must be at least 2, got {tail}")));
        }
        Ok(Self { prefix, tail })
    }

    pub fn truncation(&self, depth: usize) -> TreeSpec {
        let branching = (0..depth)
            .map(|i| self.prefix.get(i).copied().unwrap_or(self.tail))
            .collect();
        TreeSpec { branching }
    }

    /// The first `count` dimensions.
    pub fn dimensions(&self, count: usize) -> Vec<BigUint> {
        tree_zeta(&self.truncation(count.saturating_sub(1)))
            .into_iter()
            .map(|(d, _)| d)
            .collect()
    }

    /// One constituent per layer and the dimensions grow like `C·tail^k`,
    /// so `Σ dim^{−σ}` converges for every `σ > 0`.
    pub fn abscissa(&self) -> Rational {
        Rational::zero()
    }

    /// Partial sum of `Σ dim^{−s}` at a non-positive integer `s = −k`.
    pub fn partial_sum_at_negative(&self, count: usize, k: u32) -> BigUint {
        self.dimensions(count).iter().map(|d| d.pow(k)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn zeta_lists() {
        assert_eq!(tree_zeta(&TreeSpec::new(vec![]).unwrap()), vec![(BigUint::one(), 1)]);
        let z = tree_zeta(&TreeSpec::new(vec![2, 2, 2]).unwrap());
        let dims: Vec<BigUint> = z.iter().map(|(d, _)| d.clone()).collect();
        assert_eq!(dims, big(&[1, 1, 2, 4]));
        assert_eq!(aggregate(&z)[&BigUint::one()], 2);
        assert!(TreeSpec::new(vec![2, 1]).is_err());
    }

    #[test]
    fn regular_tree_expansion() {
        // 1 + (d−1)^{−s}/(1 − d^{−s}) has dimensions 1, (d−1)d^k
        for d in 2..6u64 {
            let s = BoundarySeries::new(vec![], d).unwrap();
            let expect: Vec<BigUint> = std::iter::once(BigUint::one())
                .chain((0..6).map(|k| BigUint::from(d - 1) * BigUint::from(d).pow(k)))
                .collect();
            assert_eq!(s.dimensions(7), expect);
            assert_eq!(s.abscissa(), Rational::zero());
        }
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(orbit_count_layer(&TreeSpec::new(vec![2, 3]).unwrap(), 0).unwrap(), 1);
        assert_eq!(orbit_count_layer(&TreeSpec::new(vec![2, 3]).unwrap(), 2).unwrap(), 3);
        for m in [vec![2, 3, 2], vec![3, 3], vec![4, 2, 3]] {
            let spec = TreeSpec::new(m).unwrap();
            for n in 0..=spec.depth() {
                assert_eq!(orbit_count_layer(&spec, n).unwrap(), n + 1);
            }
        }
        assert!(orbit_count_layer(&TreeSpec::new(vec![2]).unwrap(), 2).is_err());
    }

    #[test]
    fn orbit_count_matches_dimension() {
        // dim End = n + 1 forces the new constituent to have dimension |L(n)| − |L(n−1)|
        let spec = TreeSpec::new(vec![3, 2, 4]).unwrap();
        let z = tree_zeta(&spec);
        for n in 1..=3 {
            assert_eq!(orbit_count_layer(&spec, n).unwrap(), n + 1);
            assert_eq!(z[n].0, spec.layer_size(n) - spec.layer_size(n - 1));
        }
    }

    #[test]
    fn witness_rejects_unequal_distance() {
        let spec = TreeSpec::new(vec![2, 2]).unwrap();
        assert!(prefix_witness(&spec, &[0, 0], &[0, 1], &[1, 1]).is_none());
    }

    fn arb_portrait(branching: Vec<u64>) -> BoxedStrategy<Portrait> {
        let Some((&m, rest)) = branching.split_first() else {
            return Just(Portrait::identity()).boxed();
        };
        let rest = rest.to_vec();
        let children = prop::collection::vec(arb_portrait(rest), m as usize);
        (Just((0..m as usize).collect::<Vec<_>>()).prop_shuffle(), children)
            .prop_map(|(perm, kids)| {
                let mut g = Portrait::identity();
                g.set_perm(perm);
                for (a, c) in kids.into_iter().enumerate() {
                    g.set_child(a, c);
                }
                g
            })
            .boxed()
    }

    proptest! {
        #[test]
        fn composition_and_inverse(g in arb_portrait(vec![3, 2, 2]), h in arb_portrait(vec![3, 2, 2])) {
            let spec = TreeSpec::new(vec![3, 2, 2]).unwrap();
            prop_assert!(g.is_valid(&spec));
            for v in spec.layer(3) {
                prop_assert_eq!(g.then(&h).act(&v), h.act(&g.act(&v)));
                prop_assert_eq!(g.inverse().act(&g.act(&v)), v.clone());
                // prefixes are preserved
                prop_assert_eq!(g.act(&v[..2]), g.act(&v)[..2].to_vec());
            }
            prop_assert!(g.then(&g.inverse()).is_identity());
        }

        #[test]
        fn dimensions_sum_to_layer(m in prop::collection::vec(2u64..6, 0..6)) {
            let spec = TreeSpec::new(m).unwrap();
            let total: BigUint = tree_zeta(&spec).into_iter().map(|(d, k)| d * k).sum();
            prop_assert_eq!(total, spec.layer_size(spec.depth()));
        }
    }
}
