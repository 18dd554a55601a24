//! Rational functions in `(q, t)` with binomial denominators, where
//! `t = q^{-s}`, and the closed-form zeta functions.

mod catalog;
mod parabolic;

pub use catalog::{division, gl3_borel, max_parabolic, u3_borel, GelfandSeries};
pub use parabolic::{
    enumerate_xi, parabolic_index_formula, parabolic_orbit_formula, parabolic_volume, volume_gl, Xi,
};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::poly::{rpow, LaurentPoly};
use crate::Rational;

pub type Poly = LaurentPoly<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosedFormError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("pole at q = {q}, t = {t}")]
    PoleAtPoint { q: String, t: String },
    #[error("not expandable as a power series in t: {0}")]
    NonExpandable(String),
    #[error("denominator factor 1 − q^0 t^0 vanishes identically")]
    ZeroDenominator,
}

/// `N(q, t) / Π (1 − q^a t^b)^{m}` with every factor normalised to `b > 0`
/// or `b = 0 < a`.
#[derive(Clone, Debug)]
pub struct BiRational {
    num: Poly,
    den: BTreeMap<(i32, i32), u32>,
}

fn is_canonical(a: i32, b: i32) -> bool {
    b > 0 || (b == 0 && a > 0)
}

impl BiRational {
    pub fn from_poly(num: Poly) -> Self {
        Self {
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn monomial(c: i64, a: i32, b: i32) -> Self {
        Self::from_poly(Poly::monomial(BigInt::from(c), a, b))
    }

    /// `num / Π (1 − q^a t^b)^m`, normalised and reduced.
    pub fn new(num: Poly, factors: &[(i32, i32, u32)]) -> Result<Self, ClosedFormError> {
        let mut num = num;
        let mut den = BTreeMap::new();
        for &(a, b, m) in factors {
            if m == 0 {
                continue;
            }
            if a == 0 && b == 0 {
                return Err(ClosedFormError::ZeroDenominator);
            }
            if is_canonical(a, b) {
                *den.entry((a, b)).or_insert(0) += m;
            } else {
                // 1/(1 − X) = −X^{-1}/(1 − X^{-1})
                let sign = if m % 2 == 0 { 1 } else { -1 };
                num = num.shift(-a * m as i32, -b * m as i32).scale(&BigInt::from(sign));
                *den.entry((-a, -b)).or_insert(0) += m;
            }
        }
        Ok(Self { num, den }.reduce())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// Denominator factors `(a, b, multiplicity)`.
    pub fn factors(&self) -> Vec<(i32, i32, u32)> {
        self.den.iter().map(|(&(a, b), &m)| (a, b, m)).collect()
    }

    /// Cancels binomial factors, including partial cancellation of
    /// `1 − X^g` against `(1 − X^g)/(1 − X^k)` for `k | g`.
    pub fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        loop {
            let mut changed = false;
            let keys: Vec<(i32, i32)> = self.den.keys().copied().collect();
            for (a, b) in keys {
                let Some(&m) = self.den.get(&(a, b)) else { continue };
                if m == 0 {
                    continue;
                }
                if let Some(q) = self.num.div_binomial(a, b) {
                    self.num = q;
                    self.dec(a, b);
                    changed = true;
                    continue;
                }
                let g = a.unsigned_abs().gcd(&b.unsigned_abs()) as i32;
                for k in (1..g).filter(|k| g % k == 0) {
                    let (ak, bk) = (a / g * k, b / g * k);
                    let trial = &self.num * &Poly::binomial(ak, bk);
                    if let Some(q) = trial.div_binomial(a, b) {
                        self.num = q;
                        self.dec(a, b);
                        *self.den.entry((ak, bk)).or_insert(0) += 1;
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self
    }

    fn dec(&mut self, a: i32, b: i32) {
        let e = self.den.get_mut(&(a, b)).expect("factor present");
        *e -= 1;
        if *e == 0 {
            self.den.remove(&(a, b));
        }
    }

    /// Numerator over the denominator `den ⊇ self.den`.
    fn lift(&self, den: &BTreeMap<(i32, i32), u32>) -> Poly {
        let mut num = self.num.clone();
        for (&(a, b), &m) in den {
            let have = self.den.get(&(a, b)).copied().unwrap_or(0);
            for _ in have..m {
                num = &num * &Poly::binomial(a, b);
            }
        }
        num
    }

    fn common_den(&self, o: &Self) -> BTreeMap<(i32, i32), u32> {
        let mut den = self.den.clone();
        for (&k, &m) in &o.den {
            let e = den.entry(k).or_insert(0);
            *e = (*e).max(m);
        }
        den
    }

    pub fn add(&self, o: &Self) -> Self {
        let den = self.common_den(o);
        Self {
            num: &self.lift(&den) + &o.lift(&den),
            den,
        }
        .reduce()
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut den = self.den.clone();
        for (&k, &m) in &o.den {
            *den.entry(k).or_insert(0) += m;
        }
        Self {
            num: &self.num * &o.num,
            den,
        }
        .reduce()
    }

    /// Multiplies by `c q^a t^b`.
    pub fn scale_monomial(&self, c: i64, a: i32, b: i32) -> Self {
        Self {
            num: self.num.shift(a, b).scale(&BigInt::from(c)),
            den: self.den.clone(),
        }
        .reduce()
    }

    /// `R(q^{-1}, t^{-1})`.
    pub fn invert_vars(&self) -> Self {
        // 1/(1 − X^{-1}) = −X/(1 − X)
        let mut num = self.num.invert_vars();
        for (&(a, b), &m) in &self.den {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            num = num.shift(a * m as i32, b * m as i32).scale(&BigInt::from(sign));
        }
        Self {
            num,
            den: self.den.clone(),
        }
        .reduce()
    }

    /// `self − other` cross-multiplied over the common denominator.
    pub fn residual(&self, o: &Self) -> Poly {
        let den = self.common_den(o);
        &self.lift(&den) - &o.lift(&den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Exact value at `q = qv`, `t = tv`.
    pub fn eval(&self, qv: &Rational, tv: &Rational) -> Result<Rational, ClosedFormError> {
        let mut den = Rational::one();
        for (&(a, b), &m) in &self.den {
            let f = Rational::one() - rpow(qv, a) * rpow(tv, b);
            if f.is_zero() {
                return Err(ClosedFormError::PoleAtPoint {
                    q: qv.to_string(),
                    t: tv.to_string(),
                });
            }
            for _ in 0..m {
                den *= &f;
            }
        }
        Ok(self.num.eval(qv, tv) / den)
    }

    /// Value at `s = −1`, i.e. `t = q`.
    pub fn at_minus_one(&self, q: u64) -> Result<Rational, ClosedFormError> {
        let qv = Rational::from_integer(BigInt::from(q));
        self.eval(&qv, &qv)
    }

    /// Abscissa of convergence `max a/b` over factors with `b ≥ 1`; `None`
    /// stands for −∞ (a Dirichlet polynomial).
    pub fn abscissa(&self) -> Option<Rational> {
        self.den
            .keys()
            .filter(|(_, b)| *b >= 1)
            .map(|&(a, b)| Rational::new(BigInt::from(a), BigInt::from(b)))
            .max()
    }

    /// Coefficients of `t^0..t^{e_max}` after substituting `q`.
    pub fn expand(&self, q: u64, e_max: u32) -> Result<Vec<Rational>, ClosedFormError> {
        let qv = Rational::from_integer(BigInt::from(q));
        let lo = self.num.t_degree_range().map_or(0, |r| r.0).min(0);
        let len = (e_max as i64 - lo as i64 + 1) as usize;
        // series in t, index i ↔ exponent lo + i
        let mut series = vec![Rational::zero(); len];
        for (&(a, b), c) in self.num.terms() {
            let idx = (b - lo) as usize;
            if idx < len {
                series[idx] += Rational::from_integer(c.clone()) * rpow(&qv, a);
            }
        }
        for (&(a, b), &m) in &self.den {
            let c = rpow(&qv, a);
            for _ in 0..m {
                if b == 0 {
                    let f = Rational::one() - &c;
                    if f.is_zero() {
                        return Err(ClosedFormError::PoleAtPoint {
                            q: q.to_string(),
                            t: "any".into(),
                        });
                    }
                    for x in series.iter_mut() {
                        *x = &*x / &f;
                    }
                } else {
                    // multiply by 1/(1 − c t^b): s_i += c s_{i−b}
                    let b = b as usize;
                    for i in b..len {
                        let add = &c * &series[i - b];
                        series[i] += add;
                    }
                }
            }
        }
        let neg = (-lo) as usize;
        if let Some(i) = series[..neg].iter().position(|x| !x.is_zero()) {
            return Err(ClosedFormError::NonExpandable(format!(
                "non-zero coefficient of t^{}",
                lo as i64 + i as i64
            )));
        }
        Ok(series[neg..].to_vec())
    }

    /// Formal expansion in `Q((q))[[t]]`: coefficients of `q^k t^e` for
    /// `k ≤ k_max`, `0 ≤ e ≤ e_max`.
    pub fn expand_formal(&self, k_max: i32, e_max: u32) -> Result<BTreeMap<(i32, u32), BigInt>, ClosedFormError> {
        let e_max = e_max as i32;
        let lo = self.num.t_degree_range().map_or(0, |r| r.0).min(0);
        // later factors lower q-exponents by at most this much
        let slack: i32 = self
            .den
            .iter()
            .filter(|(&(a, b), _)| b > 0 && a < 0)
            .map(|(&(a, b), &m)| -a * ((e_max - lo) / b) * m as i32)
            .sum();
        let k_hi = k_max + slack;
        let mut series: BTreeMap<(i32, i32), BigInt> = self
            .num
            .terms()
            .filter(|(&(k, e), _)| e <= e_max && k <= k_hi)
            .map(|(&(k, e), c)| ((k, e), c.clone()))
            .collect();
        for (&(a, b), &m) in &self.den {
            for _ in 0..m {
                let mut next: BTreeMap<(i32, i32), BigInt> = BTreeMap::new();
                for (&(k, e), c) in &series {
                    let (mut k2, mut e2) = (k, e);
                    while e2 <= e_max && k2 <= k_hi {
                        *next.entry((k2, e2)).or_insert_with(BigInt::zero) += c;
                        k2 += a;
                        e2 += b;
                    }
                }
                next.retain(|_, c| !c.is_zero());
                series = next;
            }
        }
        if let Some((&(k, e), _)) = series.iter().find(|(&(_, e), _)| e < 0) {
            return Err(ClosedFormError::NonExpandable(format!("term q^{k} t^{e}")));
        }
        Ok(series
            .into_iter()
            .filter(|&((k, _), _)| k <= k_max)
            .map(|((k, e), c)| ((k, e as u32), c))
            .collect())
    }

    /// Expansion with non-negative integer coefficients, as a Dirichlet
    /// series of a representation must have.
    pub fn expand_counts(&self, q: u64, e_max: u32) -> Result<Vec<u128>, ClosedFormError> {
        self.expand(q, e_max)?
            .into_iter()
            .enumerate()
            .map(|(e, c)| {
                if c.is_integer() && !c.is_negative() {
                    c.to_integer().to_u128().ok_or_else(|| ClosedFormError::NonExpandable("overflow".into()))
                } else {
                    Err(ClosedFormError::NonExpandable(format!("coefficient {c} of t^{e}")))
                }
            })
            .collect()
    }

    pub fn report(&self) -> BiRationalReport {
        let big = |c: &BigInt| match c.to_i64() {
            Some(v) => json!(v),
            None => json!(c.to_string()),
        };
        let mut num: Vec<_> = self.num.terms().collect();
        num.sort_by_key(|(&(a, b), _)| (b, a));
        BiRationalReport {
            num: num.iter().map(|(&(a, b), c)| (a, b, big(c))).collect(),
            den_qpow: 0,
            den_factors: self.factors(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.report()).expect("serialisable")
    }
}

/// JSON layout: numerator terms `[a, b, c]` for `c q^a t^b` (big values as
/// strings) and denominator factors `[a, b, m]` for `(1 − q^a t^b)^m`.
#[derive(Debug, Clone, Serialize)]
pub struct BiRationalReport {
    pub num: Vec<(i32, i32, serde_json::Value)>,
    pub den_qpow: i32,
    pub den_factors: Vec<(i32, i32, u32)>,
}

impl PartialEq for BiRational {
    fn eq(&self, o: &Self) -> bool {
        self.residual(o).is_zero()
    }
}

impl fmt::Display for BiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.num)?;
        for (&(a, b), &m) in &self.den {
            let mono = Poly::qt(a, b);
            write!(f, " / (1 - {mono})")?;
            if m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

/// Checks `R(q^{-1}, t^{-1}) = q^E R(q, t)`; the error carries the
/// cross-multiplied residual.
pub fn functional_equation_check(r: &BiRational, exponent: i32) -> Result<(), Poly> {
    let lhs = r.invert_vars();
    let rhs = r.scale_monomial(1, exponent, 0);
    let res = lhs.residual(&rhs);
    if res.is_zero() {
        Ok(())
    } else {
        Err(res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn p(terms: &[((i32, i32), i64)]) -> Poly {
        Poly::from_terms(terms.iter().map(|&(k, c)| (k, BigInt::from(c))))
    }

    #[test]
    fn normalisation_and_reduction() {
        // (1 − t^2)/(1 − t) = 1 + t
        let r = BiRational::new(Poly::binomial(0, 2), &[(0, 1, 1)]).unwrap();
        assert!(r.factors().is_empty());
        assert_eq!(r.numerator(), &p(&[((0, 0), 1), ((0, 1), 1)]));
        // (1 + t)/(1 − t^2) = 1/(1 − t)
        let r = BiRational::new(p(&[((0, 0), 1), ((0, 1), 1)]), &[(0, 2, 1)]).unwrap();
        assert_eq!(r.factors(), vec![(0, 1, 1)]);
        // 1/(1 − q^{-1}) = −q/(1 − q)
        let r = BiRational::new(Poly::one(), &[(-1, 0, 1)]).unwrap();
        assert_eq!(r.factors(), vec![(1, 0, 1)]);
        assert_eq!(r.eval(&rat(3), &rat(1)).unwrap(), Rational::new(3.into(), 2.into()));
    }

    #[test]
    fn constant_one() {
        let one = BiRational::one();
        assert_eq!(one.expand(3, 2).unwrap(), vec![rat(1), rat(0), rat(0)]);
        assert!(functional_equation_check(&one, 0).is_ok());
        assert_eq!(one.abscissa(), None);
    }

    #[test]
    fn geometric_expansion() {
        let r = BiRational::new(Poly::one(), &[(1, 2, 1)]).unwrap();
        assert_eq!(r.expand_counts(2, 5).unwrap(), vec![1, 0, 2, 0, 4, 0]);
        let bad = BiRational::from_poly(p(&[((0, -1), 1)]));
        assert!(matches!(bad.expand(2, 3), Err(ClosedFormError::NonExpandable(_))));
        let pole = BiRational::new(Poly::one(), &[(-1, 1, 1)]).unwrap();
        assert!(matches!(pole.at_minus_one(3), Err(ClosedFormError::PoleAtPoint { .. })));
    }

    #[test]
    fn json_layout() {
        let r = BiRational::new(Poly::binomial(-1, 1).scale(&BigInt::from(3)), &[(0, 1, 1)]).unwrap();
        assert_eq!(
            r.to_json(),
            r#"{"num":[[0,0,3],[-1,1,-3]],"den_qpow":0,"den_factors":[[0,1,1]]}"#
        );
    }

    proptest! {
        #[test]
        fn inversion_is_an_involution(
            terms in prop::collection::vec(((-3i32..3, 0i32..4), -5i64..5), 1..6),
            facs in prop::collection::vec((-3i32..4, 0i32..3, 1u32..3), 0..3),
        ) {
            let facs: Vec<_> = facs.into_iter().filter(|&(a, b, _)| a != 0 || b != 0).collect();
            let r = BiRational::new(p(&terms.iter().map(|&(k, c)| (k, c)).collect::<Vec<_>>()), &facs).unwrap();
            prop_assert_eq!(r.invert_vars().invert_vars(), r.clone());
            let s = r.add(&BiRational::one());
            prop_assert_eq!(s.sub(&BiRational::one()), r);
        }
    }
}
