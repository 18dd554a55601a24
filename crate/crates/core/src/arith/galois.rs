//! Galois rings `GR(p^L, d) = (Z/p^L)[x]/(f)` where `f` is the minimal
//! polynomial of a Teichmüller lift of a primitive `(p^d − 1)`-th root of
//! unity. Frobenius sends the root to its p-th power.

use super::{checked_pow, inv_mod, mul_mod, prime_factors, pow_mod, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaloisRingElem {
    pub coeffs: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct GaloisRing {
    p: u64,
    d: usize,
    level: u32,
    modulus: u64,
    /// `x^d = Σ reduction[i] x^i`.
    reduction: Vec<u64>,
    /// Coefficients of `σ(x^i) = x^{p i}`.
    frob: Vec<Vec<u64>>,
}

// ---- polynomials over F_p, lowest degree first ----

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let m = trim(m.to_vec());
    let lead_inv = inv_mod(*m.last().unwrap(), p).unwrap();
    while a.len() >= m.len() {
        let shift = a.len() - m.len();
        let c = mul_mod(*a.last().unwrap(), lead_inv, p);
        for (i, &mi) in m.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - mul_mod(c, mi, p)) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&out, f, p)
}

fn poly_powmod(base: &[u64], mut e: u128, f: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_mulmod(&r, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    r
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    let x = vec![0u64, 1];
    for i in 1..=d / 2 {
        let xp = poly_powmod(&x, (p as u128).pow(i as u32), f, p);
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        if poly_gcd(f, &diff, p).len() > 1 {
            return false;
        }
    }
    true
}

fn is_primitive(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if !is_irreducible(f, p) {
        return false;
    }
    let order = (p as u128).pow(d as u32) - 1;
    let x = vec![0u64, 1];
    if d == 1 {
        // x ≡ −f0: need a generator of F_p^*
        let g = (p - f[0]) % p;
        if g == 0 {
            return false;
        }
        return prime_factors(p - 1)
            .into_iter()
            .all(|r| pow_mod(g, (p - 1) / r, p) != 1);
    }
    prime_factors(order as u64)
        .into_iter()
        .all(|r| poly_powmod(&x, order / r as u128, f, p) != vec![1u64])
}

/// The lexicographically first monic primitive polynomial of degree `d`.
fn primitive_polynomial(p: u64, d: usize) -> Vec<u64> {
    let total = p.pow(d as u32);
    for code in 0..total {
        let mut f = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if is_primitive(&f, p) {
            return f;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

impl GaloisRing {
    /// Builds `GR(p^level, d)`.
    pub fn new(p: u64, d: usize, level: u32) -> Result<Self, ArithError> {
        if !super::is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if d == 0 {
            return Err(ArithError::Param("extension degree must be positive".into()));
        }
        if level == 0 {
            return Err(ArithError::ZeroPrecision);
        }
        let modulus = checked_pow(p, level)?;
        checked_pow(p, d as u32)?;
        let fbar = primitive_polynomial(p, d);
        // Any lift of fbar; the Teichmüller root is lim x^{q^k}.
        let naive = GaloisRing {
            p,
            d,
            level,
            modulus,
            reduction: fbar[..d].iter().map(|&c| (modulus - c) % modulus).collect(),
            frob: Vec::new(),
        };
        let q = p.pow(d as u32) as u128;
        let mut omega = naive.root();
        for _ in 0..level {
            omega = naive.pow(&omega, q);
        }
        // Minimal polynomial of ω: solve Σ c_i ω^i = ω^d.
        let mut cols = vec![naive.one()];
        for i in 1..=d {
            cols.push(naive.mul(&cols[i - 1], &omega));
        }
        let mut aug: Vec<Vec<u64>> = (0..d)
            .map(|row| {
                let mut r: Vec<u64> = (0..d).map(|c| cols[c].coeffs[row]).collect();
                r.push(cols[d].coeffs[row]);
                r
            })
            .collect();
        let reduction = solve_unit_system(&mut aug, modulus, p)
            .ok_or_else(|| ArithError::Param("Teichmüller basis not invertible".into()))?;
        let mut ring = GaloisRing {
            p,
            d,
            level,
            modulus,
            reduction,
            frob: Vec::new(),
        };
        let xp = ring.pow(&ring.root(), p as u128);
        let mut frob = vec![ring.one()];
        for i in 1..d {
            frob.push(ring.mul(&frob[i - 1], &xp));
        }
        ring.frob = frob.into_iter().map(|e| e.coeffs).collect();
        Ok(ring)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Coefficients `c_i` of the defining relation `x^d = Σ c_i x^i`.
    pub fn relation(&self) -> &[u64] {
        &self.reduction
    }

    pub fn elem(&self, coeffs: &[u64]) -> GaloisRingElem {
        assert_eq!(coeffs.len(), self.d);
        GaloisRingElem {
            coeffs: coeffs.iter().map(|c| c % self.modulus).collect(),
        }
    }

    pub fn zero(&self) -> GaloisRingElem {
        GaloisRingElem {
            coeffs: vec![0; self.d],
        }
    }

    pub fn from_int(&self, n: i64) -> GaloisRingElem {
        let mut z = self.zero();
        z.coeffs[0] = super::int_mod(n, self.modulus);
        z
    }

    pub fn one(&self) -> GaloisRingElem {
        self.from_int(1)
    }

    /// The Teichmüller root ξ.
    pub fn root(&self) -> GaloisRingElem {
        let mut z = self.zero();
        if self.d == 1 {
            z.coeffs[0] = super::int_mod(self.reduction[0] as i64, self.modulus);
        } else {
            z.coeffs[1] = 1;
        }
        z
    }

    pub fn add(&self, a: &GaloisRingElem, b: &GaloisRingElem) -> GaloisRingElem {
        GaloisRingElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % self.modulus)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GaloisRingElem) -> GaloisRingElem {
        GaloisRingElem {
            coeffs: a
                .coeffs
                .iter()
                .map(|x| (self.modulus - x) % self.modulus)
                .collect(),
        }
    }

    pub fn sub(&self, a: &GaloisRingElem, b: &GaloisRingElem) -> GaloisRingElem {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &GaloisRingElem, c: u64) -> GaloisRingElem {
        GaloisRingElem {
            coeffs: a.coeffs.iter().map(|&x| mul_mod(x, c, self.modulus)).collect(),
        }
    }

    pub fn mul(&self, a: &GaloisRingElem, b: &GaloisRingElem) -> GaloisRingElem {
        let m = self.modulus;
        let d = self.d;
        let mut prod = vec![0u64; 2 * d];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, m)) % m;
            }
        }
        if d == 1 {
            return GaloisRingElem {
                coeffs: vec![prod[0]],
            };
        }
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &r) in self.reduction.iter().enumerate() {
                prod[k - d + i] = (prod[k - d + i] + mul_mod(c, r, m)) % m;
            }
        }
        prod.truncate(d);
        GaloisRingElem { coeffs: prod }
    }

    pub fn pow(&self, a: &GaloisRingElem, mut e: u128) -> GaloisRingElem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Absolute Frobenius `ξ ↦ ξ^p`.
    pub fn frobenius(&self, a: &GaloisRingElem) -> GaloisRingElem {
        let mut out = self.zero();
        for (i, &c) in a.coeffs.iter().enumerate() {
            if c != 0 {
                let img = GaloisRingElem {
                    coeffs: self.frob[i].clone(),
                };
                out = self.add(&out, &self.scale(&img, c));
            }
        }
        out
    }

    pub fn frobenius_pow(&self, a: &GaloisRingElem, k: usize) -> GaloisRingElem {
        let mut x = a.clone();
        for _ in 0..k % self.d {
            x = self.frobenius(&x);
        }
        x
    }

    /// Trace to `Z/p^L`: `Σ_{i<d} σ^i(a)`.
    pub fn trace(&self, a: &GaloisRingElem) -> u64 {
        let mut s = self.zero();
        let mut x = a.clone();
        for _ in 0..self.d {
            s = self.add(&s, &x);
            x = self.frobenius(&x);
        }
        debug_assert!(s.coeffs[1..].iter().all(|&c| c == 0));
        s.coeffs[0]
    }

    pub fn is_unit(&self, a: &GaloisRingElem) -> bool {
        a.coeffs.iter().any(|c| c % self.p != 0)
    }

    /// Minimum p-adic valuation of the coefficients, capped at the level.
    pub fn valuation(&self, a: &GaloisRingElem) -> u32 {
        a.coeffs
            .iter()
            .map(|&c| {
                if c == 0 {
                    self.level
                } else {
                    let mut v = 0;
                    let mut c = c;
                    while c % self.p == 0 {
                        c /= self.p;
                        v += 1;
                    }
                    v
                }
            })
            .min()
            .unwrap_or(self.level)
    }

    /// Inverse of a unit, via `a^{|units| − 1}`.
    pub fn inv(&self, a: &GaloisRingElem) -> Result<GaloisRingElem, ArithError> {
        if !self.is_unit(a) {
            return Err(ArithError::NotUnit);
        }
        let q = (self.p as u128).pow(self.d as u32);
        let order = (q - 1) * q.pow(self.level - 1);
        Ok(self.pow(a, order - 1))
    }

    /// Divides by `p^k` an element all of whose coefficients are divisible by
    /// `p^k`; the result is determined modulo `p^{L−k}` and lifted canonically.
    pub fn div_p_pow(&self, a: &GaloisRingElem, k: u32) -> Option<GaloisRingElem> {
        let pk = self.p.pow(k);
        if a.coeffs.iter().any(|c| c % pk != 0) {
            return None;
        }
        Some(GaloisRingElem {
            coeffs: a.coeffs.iter().map(|c| c / pk).collect(),
        })
    }

    /// Reduces coefficients modulo `p^k` (k ≤ level).
    pub fn truncate(&self, a: &GaloisRingElem, k: u32) -> GaloisRingElem {
        let pk = self.p.pow(k.min(self.level));
        GaloisRingElem {
            coeffs: a.coeffs.iter().map(|c| c % pk).collect(),
        }
    }

    /// All elements with coefficients reduced modulo `p^k`.
    pub fn elements_mod(&self, k: u32) -> Vec<GaloisRingElem> {
        let pk = self.p.pow(k.min(self.level));
        let total = pk.pow(self.d as u32);
        (0..total)
            .map(|mut code| {
                let coeffs = (0..self.d)
                    .map(|_| {
                        let c = code % pk;
                        code /= pk;
                        c
                    })
                    .collect();
                GaloisRingElem { coeffs }
            })
            .collect()
    }
}

/// Solves `A c = b` modulo `m = p^L` for `A` invertible mod p; `aug` holds
/// `[A | b]`.
pub(crate) fn solve_unit_system(aug: &mut [Vec<u64>], m: u64, p: u64) -> Option<Vec<u64>> {
    let n = aug.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| aug[r][col] % p != 0)?;
        aug.swap(col, piv);
        let inv = inv_mod(aug[col][col], m)?;
        for x in aug[col].iter_mut() {
            *x = mul_mod(*x, inv, m);
        }
        for r in 0..n {
            if r != col && aug[r][col] != 0 {
                let f = aug[r][col];
                for c in 0..=n {
                    let sub = mul_mod(f, aug[col][c], m);
                    aug[r][c] = (aug[r][c] + m - sub) % m;
                }
            }
        }
    }
    Some(aug.iter().map(|row| row[n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_is_teichmuller() {
        for (p, d, l) in [(2u64, 2usize, 5u32), (3, 2, 4), (5, 2, 3), (2, 3, 4), (3, 3, 2), (7, 1, 3)] {
            let r = GaloisRing::new(p, d, l).unwrap();
            let q = (p as u128).pow(d as u32);
            let xi = r.root();
            assert_eq!(r.pow(&xi, q - 1), r.one(), "p={p} d={d}");
            // primitive: no smaller order modulo p
            for f in prime_factors((q - 1) as u64) {
                assert_ne!(r.pow(&xi, (q - 1) / f as u128), r.one());
            }
        }
    }

    #[test]
    fn frobenius_has_order_d() {
        for (p, d, l) in [(2u64, 2usize, 4u32), (3, 2, 3), (2, 3, 3), (3, 3, 2), (5, 2, 2)] {
            let r = GaloisRing::new(p, d, l).unwrap();
            for e in r.elements_mod(1).iter().take(50) {
                let e = r.add(&r.mul(e, &r.root()), &r.from_int(p as i64));
                assert_eq!(r.frobenius_pow(&e, d), e);
                if d > 1 && e == r.root() {
                    assert_ne!(r.frobenius(&e), e);
                }
            }
            // σ is a ring homomorphism fixing Z/p^L
            let a = r.add(&r.root(), &r.from_int(2));
            let b = r.mul(&r.root(), &r.root());
            assert_eq!(
                r.frobenius(&r.mul(&a, &b)),
                r.mul(&r.frobenius(&a), &r.frobenius(&b))
            );
            assert_eq!(r.frobenius(&r.from_int(5)), r.from_int(5));
        }
    }

    #[test]
    fn trace_of_root_squares_to_minus_two() {
        // ξ is a primitive 8th root of unity in GR(3^L, 2): (ξ + ξ³)² = −2.
        let r = GaloisRing::new(3, 2, 5).unwrap();
        let t = r.trace(&r.root());
        let m = r.modulus();
        assert_eq!(mul_mod(t, t, m), m - 2);
        assert_eq!(r.trace(&r.one()), 2);
    }

    #[test]
    fn inverse_roundtrip() {
        let r = GaloisRing::new(3, 2, 3).unwrap();
        let a = r.add(&r.root(), &r.from_int(1));
        let ai = r.inv(&a).unwrap();
        assert_eq!(r.mul(&a, &ai), r.one());
        assert!(r.inv(&r.from_int(3)).is_err());
    }
}
