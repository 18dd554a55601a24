//! An exact integral model of the degree-d unramified extension of Z_p:
//! the ring of integers of the degree-d subfield K of Q(ζ_ℓ), written in the
//! basis of Gaussian periods. Both multiplication and Frobenius have integer
//! structure constants, and p is inert in K by the choice of ℓ.

use super::{is_prime, pow_mod, prime_factors, ArithError, UnramifiedBase};

#[derive(Debug, Clone)]
pub struct PeriodRing {
    p: u64,
    d: usize,
    ell: u64,
    /// `η_i η_j = Σ_k table[i][j][k] η_k`.
    table: Vec<Vec<Vec<i64>>>,
    /// Frobenius sends `η_i` to `η_{i + frob_shift}`.
    frob_shift: usize,
}

fn primitive_root(ell: u64) -> u64 {
    if ell == 2 {
        return 1;
    }
    let fs = prime_factors(ell - 1);
    (2..ell)
        .find(|&g| fs.iter().all(|&f| pow_mod(g, (ell - 1) / f, ell) != 1))
        .expect("primes have primitive roots")
}

fn discrete_log(g: u64, a: u64, ell: u64) -> usize {
    let mut x = 1 % ell;
    for k in 0..ell {
        if x == a % ell {
            return k as usize;
        }
        x = x * g % ell;
    }
    unreachable!("a is a unit modulo ell")
}

impl PeriodRing {
    pub fn new(p: u64, d: usize) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if d == 0 {
            return Err(ArithError::Param("extension degree must be positive".into()));
        }
        let mut ell = 2u64;
        let (g, ind_p) = loop {
            if is_prime(ell) && ell != p && (ell - 1) % d as u64 == 0 {
                let g = primitive_root(ell);
                let ind = discrete_log(g, p % ell, ell) % d;
                if num_integer::gcd(ind, d) == 1 {
                    break (g, ind);
                }
            }
            ell += 1;
        };
        // coset[c] = i when c ∈ g^i H, H the subgroup of d-th powers.
        let mut coset = vec![usize::MAX; ell as usize];
        let mut x = 1u64;
        for k in 0..(ell - 1) as usize {
            coset[x as usize] = k % d;
            x = x * g % ell;
        }
        let f = ((ell - 1) / d as u64) as i64;
        let mut table = vec![vec![vec![0i64; d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut hits = vec![0i64; d];
                let mut zero_pairs = 0i64;
                for a in 1..ell {
                    if coset[a as usize] != i {
                        continue;
                    }
                    for b in 1..ell {
                        if coset[b as usize] != j {
                            continue;
                        }
                        let c = (a + b) % ell;
                        if c == 0 {
                            zero_pairs += 1;
                        } else {
                            hits[coset[c as usize]] += 1;
                        }
                    }
                }
                // ζ^0 = 1 = −Σ_k η_k; other sums are H-invariant.
                for k in 0..d {
                    debug_assert_eq!(hits[k] % f, 0);
                    table[i][j][k] = hits[k] / f - zero_pairs;
                }
            }
        }
        Ok(Self {
            p,
            d,
            ell,
            table,
            frob_shift: ind_p,
        })
    }

    /// The prime ℓ with `K ⊂ Q(ζ_ℓ)`.
    pub fn conductor(&self) -> u64 {
        self.ell
    }

    pub fn period(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.d];
        v[i] = 1;
        v
    }
}

impl UnramifiedBase for PeriodRing {
    type Elem = Vec<i64>;
    type Scalar = i64;

    fn prime(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        self.d
    }
    fn zero(&self) -> Vec<i64> {
        vec![0; self.d]
    }
    fn one(&self) -> Vec<i64> {
        vec![-1; self.d]
    }
    fn from_int(&self, n: i64) -> Vec<i64> {
        vec![-n; self.d]
    }
    fn add(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn neg(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }
    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        let mut out = vec![0i64; self.d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                for (k, &c) in self.table[i][j].iter().enumerate() {
                    out[k] += x * y * c;
                }
            }
        }
        out
    }
    fn frobenius_pow(&self, a: &Vec<i64>, k: usize) -> Vec<i64> {
        let shift = (self.frob_shift * k) % self.d;
        let mut out = vec![0; self.d];
        for (i, &x) in a.iter().enumerate() {
            out[(i + shift) % self.d] = x;
        }
        out
    }
    fn trace(&self, a: &Vec<i64>) -> i64 {
        // Tr(η_i) = Σ_k η_k = −1
        -a.iter().sum::<i64>()
    }
    fn basis(&self) -> Vec<Vec<i64>> {
        (0..self.d).map(|i| self.period(i)).collect()
    }
    fn coordinates(&self, a: &Vec<i64>) -> Vec<i64> {
        a.clone()
    }
}
