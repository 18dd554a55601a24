//! Sparse polynomials with exact coefficients: bivariate Laurent polynomials
//! in (q, t) and multivariate polynomials in T_1..T_k.

use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact ring of coefficients.
pub trait Coefficient:
    Clone + Debug + Display + PartialEq + Zero + One + Neg<Output = Self> + Send + Sync
{
}

impl<T> Coefficient for T where
    T: Clone + Debug + Display + PartialEq + Zero + One + Neg<Output = T> + Send + Sync
{
}

/// `Σ c_{a,b} q^a t^b`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentPoly<C> {
    terms: BTreeMap<(i32, i32), C>,
}

impl<C: Coefficient> Default for LaurentPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(C::one(), 0, 0)
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: C, a: i32, b: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// `q^a t^b`.
    pub fn qt(a: i32, b: i32) -> Self {
        Self::monomial(C::one(), a, b)
    }

    pub fn from_terms<I: IntoIterator<Item = ((i32, i32), C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in it {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, a: i32, b: i32, c: C) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(C::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i32, b: i32) -> C {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    /// Multiplies by `q^a t^b`.
    pub fn shift(&self, a: i32, b: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(x, y), c)| ((x + a, y + b), c.clone()))
                .collect(),
        }
    }

    /// `P(q^{-1}, t^{-1})`.
    pub fn invert_vars(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(x, y), c)| ((-x, -y), c.clone()))
                .collect(),
        }
    }

    pub fn t_degree_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|k| k.1).min()?;
        let hi = self.terms.keys().map(|k| k.1).max()?;
        Some((lo, hi))
    }

    pub fn q_degree_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|k| k.0).min()?;
        let hi = self.terms.keys().map(|k| k.0).max()?;
        Some((lo, hi))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// `1 − q^a t^b`.
    pub fn binomial(a: i32, b: i32) -> Self {
        let mut p = Self::one();
        p.add_term(a, b, -C::one());
        p
    }

    /// Exact quotient by `1 − q^a t^b`, or `None` when not divisible.
    /// Requires `b > 0`, or `b = 0` and `a > 0`.
    pub fn div_binomial(&self, a: i32, b: i32) -> Option<Self> {
        assert!(b > 0 || (b == 0 && a > 0));
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Along the direction (a, b) every line {v + k(a,b)} is independent:
        // N = Q − x Q gives Q_v = N_v + Q_{v − (a,b)} within each line.
        let mut quotient = Self::zero();
        let key = |&(x, y): &(i32, i32)| -> (i64, i64, i64) {
            // line invariant and position on the line
            if b > 0 {
                let pos = y.div_euclid(b);
                let base_y = y.rem_euclid(b);
                let base_x = x - pos * a;
                (base_x as i64, base_y as i64, pos as i64)
            } else {
                let pos = x.div_euclid(a);
                let base_x = x.rem_euclid(a);
                (base_x as i64, y as i64, pos as i64)
            }
        };
        let mut lines: BTreeMap<(i64, i64), BTreeMap<i64, C>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let (u, v, pos) = key(k);
            lines.entry((u, v)).or_default().insert(pos, c.clone());
        }
        for ((u, v), pts) in lines {
            let lo = *pts.keys().next().unwrap();
            let hi = *pts.keys().next_back().unwrap();
            let mut prev = C::zero();
            for pos in lo..=hi {
                let n = pts.get(&pos).cloned().unwrap_or_else(C::zero);
                let qv = n + prev.clone();
                if pos == hi {
                    if !qv.is_zero() {
                        return None;
                    }
                } else {
                    let (x, y) = if b > 0 {
                        (u as i32 + pos as i32 * a, v as i32 + pos as i32 * b)
                    } else {
                        (u as i32 + pos as i32 * a, v as i32)
                    };
                    quotient.add_term(x, y, qv.clone());
                }
                prev = qv;
            }
        }
        Some(quotient)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }
}

impl<C: Coefficient + Integer + Clone> LaurentPoly<C> {
    /// Value at `q = qv`, `t = tv` as an exact rational.
    pub fn eval(&self, qv: &Ratio<C>, tv: &Ratio<C>) -> Ratio<C> {
        let mut s = Ratio::zero();
        for (&(a, b), c) in &self.terms {
            s = s + Ratio::from_integer(c.clone()) * rpow(qv, a) * rpow(tv, b);
        }
        s
    }
}

/// Integer power of an exact rational; `x` must be non-zero if `e < 0`.
pub fn rpow<C: Clone + Integer>(x: &Ratio<C>, e: i32) -> Ratio<C> {
    let mut r = Ratio::one();
    for _ in 0..e.unsigned_abs() {
        r = r * x.clone();
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

impl<'a, C: Coefficient> Add for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, o: Self) -> LaurentPoly<C> {
        let mut r = self.clone();
        for (&(a, b), c) in &o.terms {
            r.add_term(a, b, c.clone());
        }
        r
    }
}

impl<'a, C: Coefficient> Sub for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, o: Self) -> LaurentPoly<C> {
        let mut r = self.clone();
        for (&(a, b), c) in &o.terms {
            r.add_term(a, b, -c.clone());
        }
        r
    }
}

impl<'a, C: Coefficient> Mul for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, o: Self) -> LaurentPoly<C> {
        let mut r = LaurentPoly::zero();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &o.terms {
                r.add_term(a + x, b + y, c.clone() * d.clone());
            }
        }
        r
    }
}

impl<C: Coefficient> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Coefficient> Add for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, o: Self) -> LaurentPoly<C> {
        &self + &o
    }
}

impl<C: Coefficient> Sub for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, o: Self) -> LaurentPoly<C> {
        &self - &o
    }
}

impl<C: Coefficient> Mul for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, o: Self) -> LaurentPoly<C> {
        &self * &o
    }
}

impl<C: Coefficient + Signed> Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut order: Vec<_> = self.terms.iter().collect();
        order.sort_by_key(|(&(a, b), _)| std::cmp::Reverse((b, a)));
        for (&(a, b), c) in order {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            if !unit || (a == 0 && b == 0) {
                write!(f, "{mag}")?;
            }
            let mut parts = Vec::new();
            match a {
                0 => {}
                1 => parts.push("q".to_string()),
                _ => parts.push(format!("q^{a}")),
            }
            match b {
                0 => {}
                1 => parts.push("t".to_string()),
                _ => parts.push(format!("t^{b}")),
            }
            if !parts.is_empty() {
                if !unit {
                    write!(f, "*")?;
                }
                write!(f, "{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Multivariate polynomial `Σ c_α T^α` in a fixed number of variables.
#[derive(Clone, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub struct MPoly<C: Ord> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coefficient + Ord> MPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], C::one());
        p
    }

    /// Linear form `Σ c_k T_k`.
    pub fn linear(coeffs: &[C]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[k] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps.clone()).or_insert_with(C::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            for (f, d) in &o.terms {
                let g: Vec<u32> = e.iter().zip(f).map(|(x, y)| x + y).collect();
                r.add_term(g, c.clone() * d.clone());
            }
        }
        r
    }

    pub fn eval(&self, x: &[C]) -> C {
        let mut s = C::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m = m * xi.clone();
                }
            }
            s = s + m;
        }
        s
    }

    /// Keeps only the first `k` variables after setting the others to zero.
    pub fn restrict(&self, k: usize) -> Self {
        let mut r = Self::zero(k);
        for (e, c) in &self.terms {
            if e[k..].iter().all(|&x| x == 0) {
                r.add_term(e[..k].to_vec(), c.clone());
            }
        }
        r
    }

    /// Sign normalisation: leading coefficient (in term order) made positive.
    pub fn normalize_sign(&self) -> Self
    where
        C: Signed,
    {
        match self.terms.values().next_back() {
            Some(c) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }
}

impl<C: Coefficient + Ord + Signed> Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("T{}", i + 1)
                    } else {
                        format!("T{}^{}", i + 1, k)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = LaurentPoly<i64>;

    #[test]
    fn binomial_division() {
        // (1 − t^2) = (1 − t)(1 + t)
        let n = P::binomial(0, 2);
        let qt = n.div_binomial(0, 1).unwrap();
        assert_eq!(qt, &P::one() + &P::qt(0, 1));
        assert!(P::qt(0, 1).div_binomial(0, 1).is_none());
        // (1 − q^3) / (1 − q)
        let n = P::binomial(3, 0);
        let qt = n.div_binomial(1, 0).unwrap();
        assert_eq!(qt, &(&P::one() + &P::qt(1, 0)) + &P::qt(2, 0));
    }

    #[test]
    fn display_is_readable() {
        let p = &P::binomial(-1, 1).scale(&3) + &P::qt(0, 2);
        assert_eq!(p.to_string(), "t^2 - 3*q^-1*t + 3");
    }

    proptest! {
        #[test]
        fn division_inverts_multiplication(
            terms in prop::collection::vec(((-3i32..3, 0i32..4), -5i64..5), 0..8),
            a in -3i32..4, b in 0i32..3,
        ) {
            prop_assume!(b > 0 || a > 0);
            let p = P::from_terms(terms.into_iter());
            let prod = &p * &P::binomial(a, b);
            prop_assert_eq!(prod.div_binomial(a, b), Some(p));
        }
    }
}
