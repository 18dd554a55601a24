//! Closed forms of the zeta functions in the catalog.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{parabolic_volume, BiRational, ClosedFormError, Poly};
use crate::Rational;

fn poly(terms: &[(i32, i32, i64)]) -> Poly {
    Poly::from_terms(terms.iter().map(|&(a, b, c)| ((a, b), BigInt::from(c))))
}

fn check_r(r: u32) -> Result<i32, ClosedFormError> {
    if r == 0 {
        return Err(ClosedFormError::Param("r must be at least 1".into()));
    }
    Ok(r as i32)
}

/// `Ind_{B^r}^{G^r}(1)` for `G = GL_3(o)`:
/// `q^{3r−2} t³ (q − t)(u(1/t) − q u(t)) / ((1 − t)(1 − q t⁶))` with
/// `u(X) = X² − 2X + 1 − 2X⁻¹ + X⁻² − X⁻³`.
pub fn gl3_borel(r: u32) -> Result<BiRational, ClosedFormError> {
    let r = check_r(r)?;
    let u = [(2, 1), (1, -2), (0, 1), (-1, -2), (-2, 1), (-3, -1)];
    // t³ u(1/t) and t³ q u(t)
    let a = poly(&u.map(|(k, c)| (0, 3 - k, c)));
    let b = poly(&u.map(|(k, c)| (1, 3 + k, c)));
    let num = (&poly(&[(1, 0, 1), (0, 1, -1)]) * &(&a - &b)).shift(3 * r - 2, 0);
    BiRational::new(num, &[(0, 1, 1), (1, 6, 1)])
}

/// `Ind_{B^r}^{G^r}(1)` for the unramified unitary group `U_3`:
/// `q^{3r−2} t² (q − t)(t u(1/t) + q u(t)) / (1 − q t⁶)` with
/// `u(X) = X² + X + X⁻²`.
pub fn u3_borel(r: u32) -> Result<BiRational, ClosedFormError> {
    let r = check_r(r)?;
    let u = [(2, 1), (1, 1), (-2, 1)];
    let a = poly(&u.map(|(k, c)| (0, 3 - k, c)));
    let b = poly(&u.map(|(k, c)| (1, 2 + k, c)));
    let num = (&poly(&[(1, 0, 1), (0, 1, -1)]) * &(&a + &b)).shift(3 * r - 2, 0);
    BiRational::new(num, &[(1, 6, 1)])
}

/// Maximal parabolic `P_{n,t}` of `GL_n`:
/// `q^{rt(n−t)} Σ_{J ⊆ {1..t}} V_{n,t}(J) Π_{j∈J} T_j/(1 − T_j)`,
/// `T_j = t^{j(n−j)}`.
pub fn max_parabolic(n: u32, t: u32, r: u32) -> Result<BiRational, ClosedFormError> {
    let r = check_r(r)?;
    if t < 1 || 2 * t > n {
        return Err(ClosedFormError::Param(format!("need 1 ≤ t ≤ n − t, got n = {n}, t = {t}")));
    }
    let mut sum = BiRational::zero();
    for mask in 0u32..1 << t {
        let j: Vec<u32> = (1..=t).filter(|x| mask >> (x - 1) & 1 == 1).collect();
        let mut term = parabolic_volume(n, t, &j)?;
        for &x in &j {
            let e = (x * (n - x)) as i32;
            term = term.mul(&BiRational::new(Poly::qt(0, e), &[(0, e, 1)])?);
        }
        sum = sum.add(&term);
    }
    Ok(sum.scale_monomial(1, r * (t * (n - t)) as i32, 0))
}

/// `GL_{n+1}(Δ)` over a division algebra of index d, induced from the
/// stabiliser of a point of `P^n(Δ)`:
/// `q^{rnd²} (1 − q^{−dn} t^{dn}) / (1 − t^{dn})`.
pub fn division(n: u32, d: u32, r: u32) -> Result<BiRational, ClosedFormError> {
    let r = check_r(r)?;
    if n < 1 || d < 1 {
        return Err(ClosedFormError::Param("need n, d ≥ 1".into()));
    }
    let k = (d * n) as i32;
    let num = Poly::binomial(-k, k).shift(r * (n * d * d) as i32, 0);
    BiRational::new(num, &[(0, k, 1)])
}

/// `1 + a^{-s} (q^{-ds} + b^{-s}/(1 − q^{-dns}))` with
/// `a = (q^{dn} − 1)/(q^d − 1)` and `b = q^{d(n+1)} − 1`: the zeta function
/// of `GL_{n+1}(Δ)` acting on the boundary of its projective tree. The
/// dimensions are not powers of q, so the series is kept by its constituent
/// dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GelfandSeries {
    pub q: u64,
    pub n: u32,
    pub d: u32,
}

impl GelfandSeries {
    pub fn new(q: u64, n: u32, d: u32) -> Result<Self, ClosedFormError> {
        if q < 2 || n < 1 || d < 1 {
            return Err(ClosedFormError::Param("need q ≥ 2 and n, d ≥ 1".into()));
        }
        Ok(Self { q, n, d })
    }

    fn qp(&self, e: u32) -> BigInt {
        BigInt::from(self.q).pow(e)
    }

    pub fn a(&self) -> BigInt {
        (self.qp(self.d * self.n) - 1u32) / (self.qp(self.d) - 1u32)
    }

    pub fn b(&self) -> BigInt {
        self.qp(self.d * (self.n + 1)) - 1u32
    }

    /// Dimensions of the first `count` constituents, each of multiplicity
    /// one: `1`, `a q^d`, then `a b q^{dnk}` for `k ≥ 0`.
    pub fn dimensions(&self, count: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::one(), self.a() * self.qp(self.d)];
        let ab = self.a() * self.b();
        let mut k = 0;
        while out.len() < count {
            out.push(&ab * self.qp(self.d * self.n * k));
            k += 1;
        }
        out.truncate(count);
        out
    }

    /// Value at `s = −1`: `1 + a(q^d + b/(1 − q^{dn}))`.
    pub fn at_minus_one(&self) -> Rational {
        let r = |x: BigInt| Rational::from_integer(x);
        let tail = r(self.b()) / (Rational::one() - r(self.qp(self.d * self.n)));
        Rational::one() + r(self.a()) * (r(self.qp(self.d)) + tail)
    }

    /// The only pole comes from `1 − q^{−dns}`, at `Re s = 0`.
    pub fn abscissa(&self) -> Rational {
        Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::super::functional_equation_check;
    use super::*;
    use crate::arith::{rat, rat_frac};

    #[test]
    fn gl3_borel_series() {
        let z = gl3_borel(1).unwrap();
        assert_eq!(z.expand_counts(3, 4).unwrap(), vec![27, 0, 42, 12, 54]);
        assert_eq!(z.abscissa(), Some(rat_frac(1, 6)));
        for r in 1..4 {
            let z = gl3_borel(r).unwrap();
            assert_eq!(z.expand(5, 0).unwrap()[0], rat(5i64.pow(3 * r)));
        }
    }

    #[test]
    fn u3_borel_series() {
        let z = u3_borel(1).unwrap();
        assert_eq!(z.expand_counts(3, 4).unwrap(), vec![27, 0, 6, 24, 18]);
        assert_eq!(z.abscissa(), Some(rat_frac(1, 6)));
    }

    #[test]
    fn parabolic_t1() {
        let z = max_parabolic(2, 1, 1).unwrap();
        let expect = BiRational::new(Poly::binomial(-1, 1).shift(1, 0), &[(0, 1, 1)]).unwrap();
        assert_eq!(z, expect);
        assert_eq!(z.expand_counts(3, 2).unwrap(), vec![3, 2, 2]);
        assert!(functional_equation_check(&z, -1).is_ok());
        assert_eq!(z.abscissa(), Some(rat(0)));
    }

    #[test]
    fn division_series() {
        let z = division(1, 2, 1).unwrap();
        assert_eq!(z.expand_counts(3, 4).unwrap(), vec![81, 0, 72, 0, 72]);
        assert_eq!(z.at_minus_one(3).unwrap(), rat(0));
        for n in 1..=3 {
            assert_eq!(division(n, 1, 2).unwrap(), max_parabolic(n + 1, 1, 2).unwrap());
        }
    }

    #[test]
    fn gelfand_values() {
        let g = GelfandSeries::new(2, 1, 1).unwrap();
        // m = (3, 2, 2, ...): dimensions 1, 2, 3, 6, 12
        let dims: Vec<BigInt> = g.dimensions(5);
        assert_eq!(dims, [1, 2, 3, 6, 12].map(BigInt::from).to_vec());
        for (q, n, d) in [(2, 1, 1), (3, 2, 1), (2, 1, 2), (5, 3, 2)] {
            assert_eq!(GelfandSeries::new(q, n, d).unwrap().at_minus_one(), rat(0));
        }
    }

    #[test]
    fn bad_params() {
        assert!(gl3_borel(0).is_err());
        assert!(max_parabolic(3, 2, 1).is_err());
        assert!(division(0, 1, 1).is_err());
    }
}
