//! The tree of `P^n(Δ/𝔓^k)`, `k ≥ 0`, for the maximal order `Δ` of a
//! central division algebra of index d over `Q_p` (`Δ = Z_p` when d = 1).

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use super::{TreeError, TreeSpec};
use crate::arith::{is_prime, CyclicAlgebra, CyclicAlgebraElem, GaloisRing, GaloisRingElem};

type Elem = CyclicAlgebraElem<GaloisRingElem>;
type Vector = Vec<Elem>;
type Matrix = Vec<Vec<Elem>>;

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 2_000_000;

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectiveTreeSpec {
    pub p: u64,
    pub n: usize,
    pub depth: u32,
    #[serde(default = "one_usize")]
    pub d: usize,
    #[serde(default = "one_usize")]
    pub inv: usize,
}

/// Enumerated layer sizes, the induced branching and the closed values
/// `m_1 = (q^{d(n+1)} − 1)/(q^d − 1)`, `m_k = q^{dn}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectiveLayers {
    pub layer_sizes: Vec<u64>,
    pub branching: Vec<u64>,
    #[serde(serialize_with = "super::serialize_big")]
    pub closed: Vec<BigUint>,
}

impl ProjectiveLayers {
    pub fn matches_closed(&self) -> bool {
        self.branching.len() == self.closed.len()
            && self.branching.iter().zip(&self.closed).all(|(&a, b)| BigUint::from(a) == *b)
    }

    pub fn tree(&self) -> TreeSpec {
        TreeSpec {
            branching: self.branching.clone(),
        }
    }
}

/// `g = [[1, 0], [a, h]]` with `x·g = y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Largest `j` with `x ≡ ξ₀ ≡ y (mod 𝔓^j)`.
    pub level: u32,
    pub matrix: Matrix,
}

pub struct ProjectiveTree {
    spec: ProjectiveTreeSpec,
    alg: CyclicAlgebra<GaloisRing>,
}

impl ProjectiveTree {
    pub fn new(spec: ProjectiveTreeSpec) -> Result<Self, TreeError> {
        if !is_prime(spec.p) {
            return Err(TreeError::Param(format!("{} is not a prime", spec.p)));
        }
        if spec.n == 0 || spec.d == 0 {
            return Err(TreeError::Param("n and d must be at least 1".into()));
        }
        let level = (spec.depth as usize).div_ceil(spec.d).max(1) as u32;
        let alg = CyclicAlgebra::new(GaloisRing::new(spec.p, spec.d, level)?, spec.inv)?;
        Ok(Self { spec, alg })
    }

    pub fn spec(&self) -> &ProjectiveTreeSpec {
        &self.spec
    }

    pub fn algebra(&self) -> &CyclicAlgebra<GaloisRing> {
        &self.alg
    }

    /// `q^d`, the size of the residue field `Δ/𝔓`.
    pub fn residue_size(&self) -> BigUint {
        BigUint::from(self.spec.p).pow(self.spec.d as u32)
    }

    pub fn closed_branching(&self) -> Vec<BigUint> {
        let qd = self.residue_size();
        let n = self.spec.n as u32;
        (1..=self.spec.depth)
            .map(|k| {
                if k == 1 {
                    (Pow::pow(&qd, n + 1) - 1u32) / (&qd - 1u32)
                } else {
                    Pow::pow(&qd, n)
                }
            })
            .collect()
    }

    /// Element from integer coordinates: a single integer, or the `d²`
    /// coefficients of the slices `Σ_j a_j Π^j`.
    pub fn element(&self, coords: &[i64]) -> Result<Elem, TreeError> {
        let d = self.spec.d;
        let base = self.alg.base();
        match coords.len() {
            1 => Ok(self.alg.from_base(&base.from_int(coords[0]))),
            n if n == d * d => {
                let m = base.modulus() as i64;
                let slices = coords
                    .chunks(d)
                    .map(|c| base.elem(&c.iter().map(|&x| x.rem_euclid(m) as u64).collect::<Vec<_>>()))
                    .collect();
                Ok(CyclicAlgebraElem { slices })
            }
            n => Err(TreeError::Param(format!("an element needs 1 or {} coordinates, got {n}", d * d))),
        }
    }

    /// Integer coordinates (a single integer when d = 1).
    pub fn coordinates(&self, x: &Elem) -> Vec<u64> {
        self.alg.coordinates(x)
    }

    fn reduce(&self, x: &Elem, k: u32) -> Elem {
        self.alg.reduce_mod_pk(x, k)
    }

    fn mul(&self, x: &Elem, y: &Elem, k: u32) -> Elem {
        self.reduce(&self.alg.mul(x, y), k)
    }

    fn unit(&self, x: &Elem, k: u32) -> bool {
        k > 0 && self.alg.is_unit(x)
    }

    pub fn is_primitive(&self, x: &[Elem], k: u32) -> bool {
        x.iter().any(|c| self.unit(c, k))
    }

    /// Representative with first unit coordinate 1.
    pub fn canonical(&self, x: &[Elem], k: u32) -> Result<Vector, TreeError> {
        let i = x.iter().position(|c| self.unit(c, k)).ok_or(TreeError::NotPrimitive)?;
        let z = self.alg.inv_mod_pk(&x[i], k)?;
        Ok(x.iter().map(|c| self.mul(&z, c, k)).collect())
    }

    fn budget_check(&self, k: u32, budget: u128) -> Result<(), TreeError> {
        let size = BigUint::from(self.spec.p).pow(self.spec.d as u32 * k * (self.spec.n as u32 + 1));
        let points = u128::try_from(size).unwrap_or(u128::MAX);
        if points > budget {
            return Err(TreeError::EnumerationBudget { points, budget });
        }
        Ok(())
    }

    /// Points of `P^n(Δ/𝔓^k)` by canonicalising every primitive vector.
    pub fn layer(&self, k: u32, budget: u128) -> Result<Vec<Vector>, TreeError> {
        if k == 0 {
            return Ok(vec![Vec::new()]);
        }
        self.budget_check(k, budget)?;
        let ring = self.alg.elements_mod_pk(k);
        let mut seen = HashSet::new();
        let mut idx = vec![0usize; self.spec.n + 1];
        loop {
            let x: Vector = idx.iter().map(|&i| ring[i].clone()).collect();
            if self.is_primitive(&x, k) {
                seen.insert(self.canonical(&x, k)?);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    let mut out: Vec<Vector> = seen.into_iter().collect();
                    out.sort_by_key(|v| v.iter().map(|c| self.coordinates(c)).collect::<Vec<_>>());
                    return Ok(out);
                }
                idx[pos] += 1;
                if idx[pos] < ring.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Layer sizes up to the depth; checks that every vertex of level
    /// `k − 1` has the same number of children.
    pub fn layers(&self, budget: u128) -> Result<ProjectiveLayers, TreeError> {
        let mut sizes = Vec::new();
        let mut branching = Vec::new();
        for k in 1..=self.spec.depth {
            let layer = self.layer(k, budget)?;
            let mut fibres: BTreeMap<Vec<Vec<u64>>, u64> = BTreeMap::new();
            for x in &layer {
                let parent: Vec<Vec<u64>> = x.iter().map(|c| self.coordinates(&self.reduce(c, k - 1))).collect();
                *fibres.entry(parent).or_insert(0) += 1;
            }
            let counts: HashSet<u64> = fibres.values().copied().collect();
            if counts.len() != 1 {
                return Err(TreeError::NoWitness(format!("layer {k} is not spherically homogeneous")));
            }
            branching.push(*counts.iter().next().unwrap());
            sizes.push(layer.len() as u64);
        }
        Ok(ProjectiveLayers {
            layer_sizes: sizes,
            branching,
            closed: self.closed_branching(),
        })
    }

    pub fn base_point(&self) -> Vector {
        let mut v = vec![self.alg.zero(); self.spec.n + 1];
        v[0] = self.alg.one();
        v
    }

    /// Largest `j ≤ k` with `x ≡ ξ₀ (mod 𝔓^j)`.
    pub fn sphere_level(&self, x: &[Elem], k: u32) -> Result<u32, TreeError> {
        if !self.is_primitive(x, k) {
            return Err(TreeError::NotPrimitive);
        }
        if !self.unit(&x[0], k) {
            return Ok(0);
        }
        let c = self.canonical(x, k)?;
        Ok(c[1..]
            .iter()
            .map(|e| self.alg.pi_valuation(&self.reduce(e, k)).min(k))
            .min()
            .unwrap())
    }

    /// Row vector times matrix over `Δ/𝔓^k`.
    pub fn act(&self, x: &[Elem], g: &Matrix, k: u32) -> Vector {
        (0..g[0].len())
            .map(|col| {
                let s = x
                    .iter()
                    .zip(g)
                    .fold(self.alg.zero(), |acc, (xi, row)| self.alg.add(&acc, &self.alg.mul(xi, &row[col])));
                self.reduce(&s, k)
            })
            .collect()
    }

    fn matmul(&self, a: &Matrix, b: &Matrix, k: u32) -> Matrix {
        a.iter().map(|row| self.act(row, b, k)).collect()
    }

    fn identity(&self, n: usize) -> Matrix {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { self.alg.one() } else { self.alg.zero() }).collect())
            .collect()
    }

    /// Identity with row `i` replaced by `w`, so that `e_i·G = w`.
    fn row_matrix(&self, w: &[Elem], i: usize) -> Matrix {
        let mut g = self.identity(w.len());
        g[i] = w.to_vec();
        g
    }

    /// Inverse of [`Self::row_matrix`]: row `i` becomes
    /// `w_i^{-1}(e_i − Σ_{m≠i} w_m e_m)`.
    fn row_matrix_inverse(&self, w: &[Elem], i: usize, k: u32) -> Result<Matrix, TreeError> {
        let z = self.alg.inv_mod_pk(&w[i], k)?;
        let mut g = self.identity(w.len());
        g[i] = (0..w.len())
            .map(|m| if m == i { z.clone() } else { self.reduce(&self.alg.neg(&self.alg.mul(&z, &w[m])), k) })
            .collect();
        Ok(g)
    }

    fn swap_matrix(&self, n: usize, i: usize, l: usize) -> Matrix {
        let mut g = self.identity(n);
        g.swap(i, l);
        g
    }

    /// `h ∈ GL_n(Δ/𝔓^k)` with `u·h = v` for primitive `u`, `v`, and its inverse.
    fn transporter(&self, u: &[Elem], v: &[Elem], k: u32) -> Result<(Matrix, Matrix), TreeError> {
        let i = u.iter().position(|c| self.unit(c, k)).ok_or(TreeError::NotPrimitive)?;
        let l = v.iter().position(|c| self.unit(c, k)).ok_or(TreeError::NotPrimitive)?;
        let n = u.len();
        let swap = self.swap_matrix(n, i, l);
        let h = self.matmul(&self.matmul(&self.row_matrix_inverse(u, i, k)?, &swap, k), &self.row_matrix(v, l), k);
        let h_inv = self.matmul(&self.matmul(&self.row_matrix_inverse(v, l, k)?, &swap, k), &self.row_matrix(u, i), k);
        Ok((h, h_inv))
    }

    /// `u` with `Π^j u ≡ x (mod 𝔓^k)`.
    fn strip(&self, x: &Elem, j: u32, k: u32) -> Result<Elem, TreeError> {
        self.alg
            .div_left_pi_pow(x, j)
            .map(|u| self.reduce(&u, k))
            .ok_or_else(|| TreeError::NoWitness(format!("coordinate not divisible by Π^{j}")))
    }

    /// An element of the stabiliser of `ξ₀` carrying `x` to `y` in
    /// `P^n(Δ/𝔓^k)`.
    pub fn witness(&self, x: &[Elem], y: &[Elem], k: u32) -> Result<Witness, TreeError> {
        let n = self.spec.n;
        if x.len() != n + 1 || y.len() != n + 1 {
            return Err(TreeError::Param(format!("points need {} coordinates", n + 1)));
        }
        let x: Vector = x.iter().map(|c| self.reduce(c, k)).collect();
        let y: Vector = y.iter().map(|c| self.reduce(c, k)).collect();
        let (jx, jy) = (self.sphere_level(&x, k)?, self.sphere_level(&y, k)?);
        if jx != jy {
            return Err(TreeError::NotEquidistant(jx, jy));
        }
        let j = jx;
        if j == k {
            return Ok(Witness {
                level: j,
                matrix: self.identity(n + 1),
            });
        }
        // make x_0 ≡ 1 (mod 𝔓^j) on both sides
        let normalise = |v: Vector| -> Result<Vector, TreeError> {
            if j == 0 {
                return Ok(v);
            }
            let diff = self.reduce(&self.alg.sub(&v[0], &self.alg.one()), j);
            if diff == self.alg.zero() {
                Ok(v)
            } else {
                self.canonical(&v, k)
            }
        };
        let xs = normalise(x.clone())?;
        let ys = normalise(y.clone())?;
        let u: Vector = xs[1..].iter().map(|c| self.strip(c, j, k)).collect::<Result<_, _>>()?;
        let v: Vector = ys[1..].iter().map(|c| self.strip(c, j, k)).collect::<Result<_, _>>()?;
        let (h, h_inv) = self.transporter(&u, &v, k)?;
        // Π^j Σ u_m a_m = y_0 − x_0 with a supported on one unit coordinate of u
        let c = self.strip(&self.alg.sub(&ys[0], &xs[0]), j, k)?;
        let i = u.iter().position(|e| self.unit(e, k)).unwrap();
        let mut a = vec![self.alg.zero(); n];
        a[i] = self.mul(&self.alg.inv_mod_pk(&u[i], k)?, &c, k);
        let mut g = vec![std::iter::once(self.alg.one()).chain(vec![self.alg.zero(); n]).collect::<Vector>()];
        for m in 0..n {
            let mut row = vec![a[m].clone()];
            row.extend(h[m].iter().cloned());
            g.push(row);
        }
        // verification: x·g = y projectively, ξ₀·g = ξ₀, h invertible
        let image = self.act(&x, &g, k);
        if self.canonical(&image, k)? != self.canonical(&y, k)? {
            return Err(TreeError::NoWitness("x·g differs from y".into()));
        }
        if self.act(&self.base_point(), &g, k) != self.base_point() {
            return Err(TreeError::NoWitness("g moves the base point".into()));
        }
        if self.matmul(&h, &h_inv, k) != self.identity(n) {
            return Err(TreeError::NoWitness("h is not invertible".into()));
        }
        Ok(Witness { level: j, matrix: g })
    }

    /// Checks all equidistant pairs in layer `k`; returns the number of
    /// distance classes, which is the orbit count of the stabiliser.
    pub fn distance_classes(&self, k: u32, budget: u128) -> Result<usize, TreeError> {
        let layer = self.layer(k, budget)?;
        let mut classes: BTreeMap<u32, Vec<&Vector>> = BTreeMap::new();
        for x in &layer {
            classes.entry(self.sphere_level(x, k)?).or_default().push(x);
        }
        use rayon::prelude::*;
        for members in classes.values() {
            members.par_iter().try_for_each(|x| {
                members.iter().try_for_each(|y| self.witness(x, y, k).map(|_| ()))
            })?;
        }
        Ok(classes.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::GelfandSeries;
    use crate::trees::tree_zeta;

    fn tree(p: u64, n: usize, d: usize, depth: u32) -> ProjectiveTree {
        ProjectiveTree::new(ProjectiveTreeSpec { p, n, depth, d, inv: 1 }).unwrap()
    }

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn layer_examples() {
        let l = tree(2, 1, 1, 2).layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(l.branching, vec![3, 2]);
        assert_eq!(l.layer_sizes, vec![3, 6]);
        assert!(l.matches_closed());
        let l = tree(3, 2, 1, 1).layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(l.branching, vec![13]);
        let l = tree(2, 1, 2, 1).layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(l.branching, vec![5]);
        assert!(l.matches_closed());
    }

    #[test]
    fn deeper_layers_match_closed() {
        for (p, n, d, k) in [(3, 1, 1, 3), (2, 2, 1, 2), (2, 1, 2, 2), (2, 1, 3, 1)] {
            let l = tree(p, n, d, k).layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert!(l.matches_closed(), "{p} {n} {d} {k}: {l:?}");
        }
    }

    #[test]
    fn budget_guard() {
        let err = tree(5, 3, 1, 3).layers(1000).unwrap_err();
        assert!(matches!(err, TreeError::EnumerationBudget { .. }));
    }

    #[test]
    fn explicit_witness() {
        let t = tree(2, 1, 1, 2);
        let e = |c: i64| t.element(&[c]).unwrap();
        let x = vec![e(1), e(2)];
        let y = vec![e(3), e(2)];
        let w = t.witness(&x, &y, 2).unwrap();
        assert_eq!(w.level, 1);
        let flat: Vec<Vec<u64>> = w.matrix.iter().map(|r| r.iter().map(|c| t.coordinates(c)[0]).collect()).collect();
        assert_eq!(flat, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(t.act(&x, &w.matrix, 2), y);
        let id = t.witness(&x, &x, 2).unwrap();
        assert_eq!(t.act(&x, &id.matrix, 2), x);
    }

    #[test]
    fn unequal_distance_rejected() {
        let t = tree(2, 1, 1, 2);
        let e = |c: i64| t.element(&[c]).unwrap();
        let err = t.witness(&[e(1), e(2)], &[e(1), e(1)], 2).unwrap_err();
        assert_eq!(err, TreeError::NotEquidistant(1, 0));
    }

    #[test]
    fn distance_transitive_small_layers() {
        for (p, n, d) in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 2)] {
            let t = tree(p, n, d, 2);
            for k in 1..=2 {
                assert_eq!(t.distance_classes(k, DEFAULT_ENUMERATION_BUDGET).unwrap(), k as usize + 1);
            }
        }
    }

    #[test]
    fn gelfand_composition() {
        for (p, n, d) in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 1, 2)] {
            let t = tree(p, n, d, if d == 2 { 2 } else { 3 });
            let layers = t.layers(DEFAULT_ENUMERATION_BUDGET).unwrap();
            let dims: Vec<BigUint> = tree_zeta(&layers.tree()).into_iter().map(|(x, _)| x).collect();
            let series = GelfandSeries::new(p, n as u32, d as u32).unwrap();
            let expect: Vec<BigUint> = series
                .dimensions(dims.len())
                .into_iter()
                .map(|x| x.to_biguint().unwrap())
                .collect();
            assert_eq!(dims, expect);
        }
        assert_eq!(
            tree_zeta(&tree(2, 1, 1, 3).layers(DEFAULT_ENUMERATION_BUDGET).unwrap().tree())
                .into_iter()
                .map(|(x, _)| x)
                .collect::<Vec<_>>(),
            big(&[1, 2, 3, 6])
        );
    }
}
