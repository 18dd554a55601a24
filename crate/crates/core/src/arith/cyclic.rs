//! Cyclic algebras `Δ = ⊕_{j<d} 𝔢 Π^j` with `Π^d = p` and `Π x = σ(x) Π`,
//! where `σ = Frob^h`.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;

use super::{ArithError, GaloisRing, GaloisRingElem};
use crate::Rational;

/// An unramified extension ring of degree d over the p-adic integers (or a
/// model of it) together with its Frobenius.
pub trait UnramifiedBase {
    type Elem: Clone + Debug + PartialEq + Eq + Hash;
    /// Prime-subring scalars (residues or exact integers).
    type Scalar: Clone + Debug + PartialEq;

    fn prime(&self) -> u64;
    fn degree(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `Frob^k`.
    fn frobenius_pow(&self, a: &Self::Elem, k: usize) -> Self::Elem;
    fn trace(&self, a: &Self::Elem) -> Self::Scalar;
    /// The d basis elements over the prime subring.
    fn basis(&self) -> Vec<Self::Elem>;
    /// Coordinates over the prime subring in the basis above.
    fn coordinates(&self, a: &Self::Elem) -> Vec<Self::Scalar>;
}

impl UnramifiedBase for GaloisRing {
    type Elem = GaloisRingElem;
    type Scalar = u64;

    fn prime(&self) -> u64 {
        self.p()
    }
    fn degree(&self) -> usize {
        GaloisRing::degree(self)
    }
    fn zero(&self) -> GaloisRingElem {
        GaloisRing::zero(self)
    }
    fn one(&self) -> GaloisRingElem {
        GaloisRing::one(self)
    }
    fn from_int(&self, n: i64) -> GaloisRingElem {
        GaloisRing::from_int(self, n)
    }
    fn add(&self, a: &GaloisRingElem, b: &GaloisRingElem) -> GaloisRingElem {
        GaloisRing::add(self, a, b)
    }
    fn neg(&self, a: &GaloisRingElem) -> GaloisRingElem {
        GaloisRing::neg(self, a)
    }
    fn mul(&self, a: &GaloisRingElem, b: &GaloisRingElem) -> GaloisRingElem {
        GaloisRing::mul(self, a, b)
    }
    fn frobenius_pow(&self, a: &GaloisRingElem, k: usize) -> GaloisRingElem {
        GaloisRing::frobenius_pow(self, a, k)
    }
    fn trace(&self, a: &GaloisRingElem) -> u64 {
        GaloisRing::trace(self, a)
    }
    fn basis(&self) -> Vec<GaloisRingElem> {
        let mut out = vec![GaloisRing::one(self)];
        for i in 1..GaloisRing::degree(self) {
            out.push(GaloisRing::mul(self, &out[i - 1], &self.root()));
        }
        out
    }
    fn coordinates(&self, a: &GaloisRingElem) -> Vec<u64> {
        a.coeffs.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicAlgebraElem<E> {
    /// `x = Σ_j slices[j] Π^j`.
    pub slices: Vec<E>,
}

#[derive(Debug, Clone)]
pub struct CyclicAlgebra<B: UnramifiedBase> {
    base: B,
    inv: usize,
}

impl<B: UnramifiedBase> CyclicAlgebra<B> {
    /// `inv` is the Hasse invariant numerator h, with `gcd(h, d) = 1`.
    pub fn new(base: B, inv: usize) -> Result<Self, ArithError> {
        let d = base.degree();
        if num_integer::gcd(inv, d) != 1 {
            return Err(ArithError::Param(format!(
                "invariant {inv} is not coprime to the degree {d}"
            )));
        }
        Ok(Self { base, inv: inv % d.max(1) })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    pub fn invariant(&self) -> usize {
        self.inv
    }

    /// `σ^k` where `σ = Frob^h`.
    pub fn sigma_pow(&self, a: &B::Elem, k: usize) -> B::Elem {
        let d = self.degree();
        self.base.frobenius_pow(a, (self.inv * k) % d)
    }

    pub fn zero(&self) -> CyclicAlgebraElem<B::Elem> {
        CyclicAlgebraElem {
            slices: vec![self.base.zero(); self.degree()],
        }
    }

    pub fn from_base(&self, a: &B::Elem) -> CyclicAlgebraElem<B::Elem> {
        let mut z = self.zero();
        z.slices[0] = a.clone();
        z
    }

    pub fn one(&self) -> CyclicAlgebraElem<B::Elem> {
        self.from_base(&self.base.one())
    }

    /// `a Π^j` for `j < d`.
    pub fn monomial(&self, a: &B::Elem, j: usize) -> CyclicAlgebraElem<B::Elem> {
        let mut z = self.zero();
        z.slices[j] = a.clone();
        z
    }

    pub fn pi(&self) -> CyclicAlgebraElem<B::Elem> {
        if self.degree() == 1 {
            return self.from_base(&self.base.from_int(self.base.prime() as i64));
        }
        self.monomial(&self.base.one(), 1)
    }

    pub fn add(
        &self,
        x: &CyclicAlgebraElem<B::Elem>,
        y: &CyclicAlgebraElem<B::Elem>,
    ) -> CyclicAlgebraElem<B::Elem> {
        CyclicAlgebraElem {
            slices: x
                .slices
                .iter()
                .zip(&y.slices)
                .map(|(a, b)| self.base.add(a, b))
                .collect(),
        }
    }

    pub fn neg(&self, x: &CyclicAlgebraElem<B::Elem>) -> CyclicAlgebraElem<B::Elem> {
        CyclicAlgebraElem {
            slices: x.slices.iter().map(|a| self.base.neg(a)).collect(),
        }
    }

    pub fn sub(
        &self,
        x: &CyclicAlgebraElem<B::Elem>,
        y: &CyclicAlgebraElem<B::Elem>,
    ) -> CyclicAlgebraElem<B::Elem> {
        self.add(x, &self.neg(y))
    }

    pub fn mul(
        &self,
        x: &CyclicAlgebraElem<B::Elem>,
        y: &CyclicAlgebraElem<B::Elem>,
    ) -> CyclicAlgebraElem<B::Elem> {
        let d = self.degree();
        let p = self.base.from_int(self.base.prime() as i64);
        let mut out = self.zero();
        for (i, a) in x.slices.iter().enumerate() {
            if *a == self.base.zero() {
                continue;
            }
            for (j, b) in y.slices.iter().enumerate() {
                if *b == self.base.zero() {
                    continue;
                }
                // a Π^i b Π^j = a σ^i(b) Π^{i+j}
                let mut c = self.base.mul(a, &self.sigma_pow(b, i));
                let mut k = i + j;
                if k >= d {
                    c = self.base.mul(&c, &p);
                    k -= d;
                }
                out.slices[k] = self.base.add(&out.slices[k], &c);
            }
        }
        out
    }

    pub fn pow(&self, x: &CyclicAlgebraElem<B::Elem>, mut e: u128) -> CyclicAlgebraElem<B::Elem> {
        let mut r = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// `tr_{Δ}(x) = Tr(x_0)`, the trace of the `Π^0` slice.
    pub fn reduced_trace(&self, x: &CyclicAlgebraElem<B::Elem>) -> B::Scalar {
        self.base.trace(&x.slices[0])
    }

    /// Basis `e_i Π^j` in the order `(j, i)`.
    pub fn basis(&self) -> Vec<CyclicAlgebraElem<B::Elem>> {
        let mut out = Vec::new();
        for j in 0..self.degree() {
            for e in self.base.basis() {
                out.push(self.monomial(&e, j));
            }
        }
        out
    }

    /// Coordinates in [`Self::basis`].
    pub fn coordinates(&self, x: &CyclicAlgebraElem<B::Elem>) -> Vec<B::Scalar> {
        x.slices
            .iter()
            .flat_map(|a| self.base.coordinates(a))
            .collect()
    }
}

impl<B: UnramifiedBase<Scalar = i64>> CyclicAlgebra<B> {
    /// Structure matrix of `(x, y) ↦ tr(x y Π^{−m})` in [`Self::basis`].
    /// With `m = m₀d + m₁` this is `p^{−m₀} tr((xy)_{m₁})`, the trace of
    /// the `Π^{m₁}` slice.
    pub fn trace_form(&self, m: usize) -> Vec<Vec<Rational>> {
        let d = self.degree();
        let scale = Rational::new(BigInt::from(1), BigInt::from(self.base.prime()).pow((m / d) as u32));
        let basis = self.basis();
        basis
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| {
                        let z = self.mul(x, y);
                        Rational::from_integer(BigInt::from(self.base.trace(&z.slices[m % d]))) * &scale
                    })
                    .collect()
            })
            .collect()
    }
}

impl CyclicAlgebra<GaloisRing> {
    /// Π-adic valuation, capped at `d·L`.
    pub fn pi_valuation(&self, x: &CyclicAlgebraElem<GaloisRingElem>) -> u32 {
        let d = self.degree() as u32;
        x.slices
            .iter()
            .enumerate()
            .map(|(j, a)| d * self.base.valuation(a) + j as u32)
            .min()
            .unwrap_or(0)
            .min(d * self.base.level())
    }

    pub fn is_unit(&self, x: &CyclicAlgebraElem<GaloisRingElem>) -> bool {
        self.base.is_unit(&x.slices[0])
    }

    /// Reduction modulo `𝔓^k`: slice j is kept modulo `p^{⌈(k−j)/d⌉}`.
    pub fn reduce_mod_pk(&self, x: &CyclicAlgebraElem<GaloisRingElem>, k: u32) -> CyclicAlgebraElem<GaloisRingElem> {
        let d = self.degree() as i64;
        CyclicAlgebraElem {
            slices: x
                .slices
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    let e = super::ceil_div(k as i64 - j as i64, d).max(0) as u32;
                    self.base.truncate(a, e)
                })
                .collect(),
        }
    }

    /// All elements of `Δ/𝔓^k` in reduced form.
    pub fn elements_mod_pk(&self, k: u32) -> Vec<CyclicAlgebraElem<GaloisRingElem>> {
        let d = self.degree() as i64;
        let mut out = vec![self.zero()];
        for j in 0..self.degree() {
            let e = super::ceil_div(k as i64 - j as i64, d).max(0) as u32;
            let slice_vals = self.base.elements_mod(e);
            let mut next = Vec::with_capacity(out.len() * slice_vals.len());
            for x in &out {
                for a in &slice_vals {
                    let mut y = x.clone();
                    y.slices[j] = a.clone();
                    next.push(y);
                }
            }
            out = next;
        }
        out
    }

    /// Inverse of a unit modulo `𝔓^k`.
    pub fn inv_mod_pk(&self, x: &CyclicAlgebraElem<GaloisRingElem>, k: u32) -> Result<CyclicAlgebraElem<GaloisRingElem>, ArithError> {
        if !self.is_unit(x) {
            return Err(ArithError::NotUnit);
        }
        // Newton iteration y ← y(2 − xy) starting from the residue-field inverse.
        let y0 = self.base.inv(&x.slices[0])?;
        let mut y = self.from_base(&y0);
        let two = self.from_base(&self.base.from_int(2));
        for _ in 0..=k.max(1).ilog2() + 2 {
            let xy = self.mul(x, &y);
            y = self.mul(&y, &self.sub(&two, &xy));
            y = self.reduce_mod_pk(&y, k);
        }
        Ok(y)
    }

    /// Left division by `Π^j`: returns `u` with `Π^j u ≡ x (mod 𝔓^k)`, when
    /// `x ∈ 𝔓^j`.
    pub fn div_left_pi_pow(&self, x: &CyclicAlgebraElem<GaloisRingElem>, j: u32) -> Option<CyclicAlgebraElem<GaloisRingElem>> {
        let d = self.degree();
        let mut y = x.clone();
        for _ in 0..j {
            // Π^{-1} (Σ a_i Π^i) = Σ σ^{-1}(a_i) Π^{i−1}; slice 0 must be divisible by p.
            let mut z = self.zero();
            for (i, a) in y.slices.iter().enumerate() {
                let back = self.sigma_pow(a, d - 1);
                if i == 0 {
                    let q = self.base.div_p_pow(&back, 1)?;
                    z.slices[d - 1] = self.base.add(&z.slices[d - 1], &q);
                } else {
                    z.slices[i - 1] = self.base.add(&z.slices[i - 1], &back);
                }
            }
            y = z;
        }
        Some(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn algebra(p: u64, d: usize, inv: usize, level: u32) -> CyclicAlgebra<GaloisRing> {
        CyclicAlgebra::new(GaloisRing::new(p, d, level).unwrap(), inv).unwrap()
    }

    fn elem(a: &CyclicAlgebra<GaloisRing>, coeffs: &[u64]) -> CyclicAlgebraElem<GaloisRingElem> {
        let d = a.degree();
        CyclicAlgebraElem {
            slices: (0..d).map(|j| a.base().elem(&coeffs[j * d..(j + 1) * d])).collect(),
        }
    }

    #[test]
    fn pi_relations() {
        for (p, d, h) in [(3u64, 2usize, 1usize), (2, 2, 1), (2, 3, 1), (2, 3, 2), (5, 2, 1)] {
            let a = algebra(p, d, h, 3);
            let pi = a.pi();
            assert_eq!(a.pow(&pi, d as u128), a.from_base(&a.base().from_int(p as i64)));
            let xi = a.from_base(&a.base().root());
            let lhs = a.mul(&pi, &xi);
            let rhs = a.mul(&a.from_base(&a.sigma_pow(&a.base().root(), 1)), &pi);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn reduced_trace_examples() {
        let a = algebra(3, 2, 1, 4);
        assert_eq!(a.reduced_trace(&a.one()), 2);
        assert_eq!(a.reduced_trace(&a.pi()), 0);
        let xi = a.base().root();
        let direct = a.base().add(&xi, &a.base().frobenius(&xi));
        assert_eq!(direct.coeffs[1], 0);
        assert_eq!(a.reduced_trace(&a.from_base(&xi)), direct.coeffs[0]);
    }

    #[test]
    fn inverse_and_division() {
        let a = algebra(2, 2, 1, 3);
        let x = elem(&a, &[1, 1, 0, 1]);
        let y = a.inv_mod_pk(&x, 5).unwrap();
        assert_eq!(a.reduce_mod_pk(&a.mul(&x, &y), 5), a.one());
        let px = a.mul(&a.pi(), &x);
        let back = a.div_left_pi_pow(&px, 1).unwrap();
        assert_eq!(a.reduce_mod_pk(&back, 4), a.reduce_mod_pk(&x, 4));
    }

    #[test]
    fn trace_form_divisors() {
        use crate::arith::{PeriodRing, Valuation};
        use crate::smith::smith_valuations;
        for (p, d, h) in [(3u64, 2usize, 1usize), (2, 3, 1), (5, 2, 1)] {
            let a = CyclicAlgebra::new(PeriodRing::new(p, d).unwrap(), h).unwrap();
            for m in 0..4 {
                let (m0, m1) = ((m / d) as i64, m % d);
                let mut expect = vec![Valuation::Finite(-m0); (m1 + 1) * d];
                expect.extend(vec![Valuation::Finite(1 - m0); (d - m1 - 1) * d]);
                assert_eq!(smith_valuations(&a.trace_form(m), p).nu, expect, "p={p} d={d} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn associativity_and_trace_symmetry(c in prop::collection::vec(0u64..27, 12)) {
            let a = algebra(3, 2, 1, 3);
            let x = elem(&a, &c[0..4]);
            let y = elem(&a, &c[4..8]);
            let z = elem(&a, &c[8..12]);
            prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
            prop_assert_eq!(a.reduced_trace(&a.mul(&x, &y)), a.reduced_trace(&a.mul(&y, &x)));
            let pi = a.pi();
            let lhs = a.mul(&pi, &x);
            let sx = CyclicAlgebraElem { slices: x.slices.iter().map(|s| a.sigma_pow(s, 1)).collect() };
            prop_assert_eq!(lhs, a.mul(&sx, &pi));
        }

        #[test]
        fn associativity_degree_three(c in prop::collection::vec(0u64..8, 27), h in 1usize..3) {
            let a = algebra(2, 3, h, 3);
            let x = elem(&a, &c[0..9]);
            let y = elem(&a, &c[9..18]);
            let z = elem(&a, &c[18..27]);
            prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
            prop_assert_eq!(a.reduced_trace(&a.mul(&x, &y)), a.reduced_trace(&a.mul(&y, &x)));
        }
    }
}
