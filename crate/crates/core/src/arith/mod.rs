//! Exact p-adic arithmetic: valuations, modular helpers, truncated
//! exponentials, Galois rings and cyclic division algebras.

mod cyclic;
mod galois;
mod periods;

pub use cyclic::{CyclicAlgebra, CyclicAlgebraElem, UnramifiedBase};
pub use galois::{GaloisRing, GaloisRingElem};
pub use periods::PeriodRing;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("exponential does not converge: v_p(a) = {valuation}, need at least {required}")]
    ConvergenceViolation { valuation: i64, required: i64 },
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("p^{exponent} does not fit in 64 bits for p = {p}")]
    ModulusTooLarge { p: u64, exponent: u32 },
    #[error("{0} is not a p-adic integer")]
    NotIntegral(String),
    #[error("element is not a unit")]
    NotUnit,
    #[error("invalid parameter: {0}")]
    Param(String),
}

/// p-adic valuation in `Z ∪ {+∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// The base ring Z_p: residue field size q = p, uniformiser p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalRingSpec {
    p: u64,
}

impl LocalRingSpec {
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if is_prime(p) {
            Ok(Self { p })
        } else {
            Err(ArithError::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p
    }
}

/// An exact rational together with its p-adic valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuedScalar<T: Clone + Integer> {
    pub value: Ratio<T>,
}

impl<T: Clone + Integer + FromPrimitive> ValuedScalar<T> {
    pub fn new(value: Ratio<T>) -> Self {
        Self { value }
    }

    pub fn valuation(&self, p: u64) -> Valuation {
        valuation(&self.value, p)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// v_p of a non-zero integer; `Infinite` for zero.
pub fn valuation_int<T: Clone + Integer + FromPrimitive>(x: &T, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let pt = T::from_u64(p).expect("prime fits in the integer type");
    let mut v = 0i64;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pt);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        y = q;
        v += 1;
    }
}

/// v_p(a/b) = v_p(a) − v_p(b).
pub fn valuation<T: Clone + Integer + FromPrimitive>(x: &Ratio<T>, p: u64) -> Valuation {
    match (valuation_int(x.numer(), p), valuation_int(x.denom(), p)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => Valuation::Infinite,
    }
}

/// p^e as u64, if it fits.
pub fn checked_pow(p: u64, e: u32) -> Result<u64, ArithError> {
    p.checked_pow(e)
        .ok_or(ArithError::ModulusTooLarge { p, exponent: e })
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Residue of a p-integral rational modulo `m = p^k`.
pub fn rational_mod(x: &Rational, m: u64) -> Result<u64, ArithError> {
    let mb = BigInt::from(m);
    let num = x.numer().mod_floor(&mb).to_u64().expect("reduced below modulus");
    let den = x.denom().mod_floor(&mb).to_u64().expect("reduced below modulus");
    let inv = inv_mod(den, m).ok_or_else(|| ArithError::NotIntegral(x.to_string()))?;
    Ok(mul_mod(num, inv, m))
}

/// Signed integer residue in `[0, m)`.
pub fn int_mod(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

/// v_p(n!) by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> i64 {
    let mut v = 0;
    let mut pk = p;
    while pk <= n {
        v += (n / pk) as i64;
        match pk.checked_mul(p) {
            Some(x) => pk = x,
            None => break,
        }
    }
    v
}

fn exp_min_valuation(p: u64) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// Number of series terms after which every term `a^k/k!` has valuation at
/// least `m`, given `v_p(a) ≥ v`.
fn exp_terms(v: i64, p: u64, m: i64) -> u64 {
    let mut k = 1u64;
    loop {
        let lower = v * k as i64 - factorial_valuation(k, p);
        if lower >= m {
            let mut ok = true;
            // the lower bound is eventually increasing; make sure it stays above m
            for j in k..k + 2 * p {
                if v * j as i64 - factorial_valuation(j, p) < m {
                    ok = false;
                    break;
                }
            }
            if ok {
                return k;
            }
        }
        k += 1;
    }
}

/// Truncated exponential `Σ a^k/k!` reduced modulo `p^m`.
pub fn padic_exp(a: &Rational, p: u64, m: u32) -> Result<u64, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if m == 0 {
        return Err(ArithError::ZeroPrecision);
    }
    let modulus = checked_pow(p, m)?;
    let v = match valuation(a, p) {
        Valuation::Infinite => return Ok(1 % modulus),
        Valuation::Finite(v) => v,
    };
    let required = exp_min_valuation(p);
    if v < required {
        return Err(ArithError::ConvergenceViolation {
            valuation: v,
            required,
        });
    }
    let terms = exp_terms(v, p, m as i64);
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for k in 1..terms {
        term = term * a / Rational::from_integer(BigInt::from(k));
        sum += &term;
    }
    rational_mod(&sum, modulus)
}

/// Exact rational matrix product.
pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

/// Matrix exponential `exp(A)` reduced modulo `p^m`, for a rational matrix
/// whose entries all have valuation at least 1 (2 when p = 2).
///
/// The series is summed exactly over the rationals, so no intermediate
/// precision is lost; the number of terms uses the working precision
/// `m + ⌈m/(p−1)⌉` bound.
pub fn padic_exp_matrix(a: &[Vec<Rational>], p: u64, m: u32) -> Result<Vec<Vec<u64>>, ArithError> {
    if m == 0 {
        return Err(ArithError::ZeroPrecision);
    }
    let modulus = checked_pow(p, m)?;
    let n = a.len();
    let v = a
        .iter()
        .flatten()
        .map(|x| valuation(x, p))
        .min()
        .unwrap_or(Valuation::Infinite);
    let required = exp_min_valuation(p);
    let mut sum: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    if let Valuation::Finite(v) = v {
        if v < required {
            return Err(ArithError::ConvergenceViolation {
                valuation: v,
                required,
            });
        }
        // Matrix powers can only raise valuations, so the scalar bound applies.
        let work = m as i64 + (m as i64 + p as i64 - 2) / (p as i64 - 1);
        let terms = exp_terms(v, p, work);
        let mut term = sum.clone();
        for k in 1..terms {
            term = mat_mul(&term, a);
            let kk = Rational::from_integer(BigInt::from(k));
            for row in term.iter_mut() {
                for x in row.iter_mut() {
                    *x = &*x / &kk;
                }
            }
            for (srow, trow) in sum.iter_mut().zip(&term) {
                for (s, t) in srow.iter_mut().zip(trow) {
                    *s += t;
                }
            }
        }
    }
    sum.iter()
        .map(|row| row.iter().map(|x| rational_mod(x, modulus)).collect())
        .collect()
}

/// `⌈a/b⌉` for `b > 0`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b) + if Integer::mod_floor(&a, &b) == 0 { 0 } else { 1 }
}

/// Coerces any signed primitive into the exact rational type.
pub fn rat<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat_frac<T: Into<BigInt>>(n: T, d: T) -> Rational {
    Rational::new(n.into(), d.into())
}

/// True when `x` is a p-adic integer.
pub fn is_p_integral<T: Clone + Integer + FromPrimitive + Signed>(x: &Ratio<T>, p: u64) -> bool {
    valuation(x, p) >= Valuation::Finite(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&Ratio::new(9i64, 2), 3), Valuation::Finite(2));
        assert_eq!(valuation(&Ratio::new(0i64, 1), 5), Valuation::Infinite);
        assert_eq!(valuation(&Ratio::new(3i64, 4), 2), Valuation::Finite(-2));
        assert_eq!(valuation(&rat_frac(-50, 3), 5), Valuation::Finite(2));
    }

    #[test]
    fn exp_of_three_mod_27() {
        // 1 + 3 + 9/2 + 27/6 with 1/2 ≡ 14 (mod 27); later terms vanish.
        let expected = (1 + 3 + 9 * 14 + 9 * 14) % 27;
        assert_eq!(padic_exp(&rat(3), 3, 3).unwrap(), expected);
        assert_eq!(expected, 13);
        assert_eq!(padic_exp(&rat(0), 3, 4).unwrap(), 1);
    }

    #[test]
    fn exp_inverse_identity() {
        for p in [3u64, 5, 7] {
            for a in [p as i64, (p * p) as i64] {
                for m in 1..=6u32 {
                    let modulus = p.pow(m);
                    let x = padic_exp(&rat(a), p, m).unwrap();
                    let y = padic_exp(&rat(-a), p, m).unwrap();
                    assert_eq!(mul_mod(x, y, modulus), 1 % modulus);
                    assert_eq!(x % p, 1);
                }
            }
        }
        let x = padic_exp(&rat(4), 2, 5).unwrap();
        let y = padic_exp(&rat(-4), 2, 5).unwrap();
        assert_eq!(mul_mod(x, y, 32), 1);
    }

    #[test]
    fn exp_rejects_small_valuation() {
        assert!(matches!(
            padic_exp(&rat(2), 2, 3),
            Err(ArithError::ConvergenceViolation { .. })
        ));
        assert!(matches!(
            padic_exp(&rat_frac(1, 3), 3, 3),
            Err(ArithError::ConvergenceViolation { .. })
        ));
    }

    #[test]
    fn matrix_exp_of_nilpotent() {
        // exp(3 E12) = 1 + 3 E12 exactly.
        let a = vec![vec![rat(0), rat(3)], vec![rat(0), rat(0)]];
        let e = padic_exp_matrix(&a, 3, 3).unwrap();
        assert_eq!(e, vec![vec![1, 3], vec![0, 1]]);
        let d = vec![vec![rat(3), rat(0)], vec![rat(0), rat(0)]];
        let e = padic_exp_matrix(&d, 3, 3).unwrap();
        assert_eq!(e[0][0], padic_exp(&rat(3), 3, 3).unwrap());
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(2, 27), Some(14));
        assert_eq!(inv_mod(3, 27), None);
        assert_eq!(rational_mod(&rat_frac(9, 2), 27).unwrap(), 18);
        assert!(rational_mod(&rat_frac(1, 3), 27).is_err());
        assert_eq!(ceil_div(-3, 2), -1);
        assert_eq!(ceil_div(3, 2), 2);
        assert_eq!(factorial_valuation(9, 3), 4);
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let x = Ratio::new(a, b);
            let y = Ratio::new(c, d);
            let vx = valuation(&x, p);
            let vy = valuation(&y, p);
            let vxy = valuation(&(x * y), p);
            match (vx, vy) {
                (Valuation::Finite(u), Valuation::Finite(w)) => prop_assert_eq!(vxy, Valuation::Finite(u + w)),
                _ => prop_assert_eq!(vxy, Valuation::Infinite),
            }
            let vs = valuation(&(x + y), p);
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
    }
}
