//! Orbit combinatorics of `GL_t × GL_{n−t}` on `t × (n−t)` matrices over
//! `f/o`, which drive the maximal parabolic formula.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::{BiRational, ClosedFormError, Poly};
use crate::poly::rpow;
use crate::Rational;

/// `𝒱_q(m) = Π_{j=1}^m (1 − q^{−j})`.
pub fn volume_gl(m: u32) -> Poly {
    (1..=m as i32).fold(Poly::one(), |acc, j| &acc * &Poly::binomial(-j, 0))
}

fn volume_value(m: u32, q: &Rational) -> Rational {
    (1..=m as i32).fold(Rational::one(), |acc, j| acc * (Rational::one() - rpow(q, -j)))
}

/// `V_{n,t}(J)` for `J = {x_1 < … < x_k} ⊆ {1..t}`.
pub fn parabolic_volume(n: u32, t: u32, j: &[u32]) -> Result<BiRational, ClosedFormError> {
    if j.windows(2).any(|w| w[0] >= w[1]) || j.iter().any(|&x| x < 1 || x > t) || 2 * t > n {
        return Err(ClosedFormError::Param(format!("bad subset {j:?} for n = {n}, t = {t}")));
    }
    let last = j.last().copied().unwrap_or(0);
    let num = &volume_gl(t) * &volume_gl(n - t);
    let mut factors = Vec::new();
    let mut inv = |m: u32| factors.extend((1..=m as i32).map(|k| (-k, 0, 1)));
    inv(t - last);
    inv(n - t - last);
    let mut prev = 0;
    for &x in j {
        inv(x - prev);
        prev = x;
    }
    BiRational::new(num, &factors)
}

/// Orbit label `ξ = (u, γ)`: elementary divisors `p^{γ_i}` with
/// multiplicity `u_i`, `γ_1 < … < γ_k < 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Xi {
    pub u: Vec<u32>,
    pub gamma: Vec<i64>,
}

impl Xi {
    pub fn rank(&self) -> u32 {
        self.u.iter().sum()
    }

    fn check(&self, n: u32, t: u32) -> Result<(), ClosedFormError> {
        let bad = self.u.len() != self.gamma.len()
            || self.u.contains(&0)
            || self.rank() > t
            || 2 * t > n
            || self.gamma.iter().any(|&g| g >= 0)
            || self.gamma.windows(2).any(|w| w[0] >= w[1]);
        if bad {
            return Err(ClosedFormError::Param(format!("invalid orbit label {self:?} for n = {n}, t = {t}")));
        }
        Ok(())
    }
}

/// `e` with `|g : stab(ω_ξ)|^{1/2} = q^e`:
/// `Σ_i −u_i γ_i (n − u_i − 2 Σ_{j<i} u_j)`.
pub fn parabolic_index_formula(n: u32, t: u32, xi: &Xi) -> Result<i64, ClosedFormError> {
    xi.check(n, t)?;
    let mut before = 0i64;
    let mut e = 0i64;
    for (&u, &g) in xi.u.iter().zip(&xi.gamma) {
        let u = u as i64;
        e += -u * g * (n as i64 - u - 2 * before);
        before += u;
    }
    Ok(e)
}

/// Size of the orbit with label ξ:
/// `𝒱(t)𝒱(n−t)/(𝒱(t−N)𝒱(n−t−N)) Π 𝒱(u_i)^{-1} q^{−(n−N)γ_i u_i + Σ_{j<i}(γ_i−γ_j)u_i u_j}`.
pub fn parabolic_orbit_formula(n: u32, t: u32, xi: &Xi, q: u64) -> Result<Rational, ClosedFormError> {
    xi.check(n, t)?;
    let qv = Rational::from_integer(BigInt::from(q));
    let big_n = xi.rank();
    let mut size = volume_value(t, &qv) * volume_value(n - t, &qv)
        / (volume_value(t - big_n, &qv) * volume_value(n - t - big_n, &qv));
    for i in 0..xi.u.len() {
        let (ui, gi) = (xi.u[i] as i64, xi.gamma[i]);
        let mut e = -(n as i64 - big_n as i64) * gi * ui;
        for j in 0..i {
            e += (gi - xi.gamma[j]) * ui * xi.u[j] as i64;
        }
        size = size / volume_value(xi.u[i], &qv) * rpow(&qv, e as i32);
    }
    Ok(size)
}

fn compositions(total: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![vec![]];
    }
    (1..=total)
        .flat_map(|first| {
            compositions(total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn increasing(k: usize, lo: i64) -> Vec<Vec<i64>> {
    // strictly increasing sequences of length k in [lo, −1]
    if k == 0 {
        return vec![vec![]];
    }
    (lo..0)
        .flat_map(|first| {
            increasing(k - 1, first + 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// All labels of orbits at level at most L (`γ_1 ≥ −L`).
pub fn enumerate_xi(t: u32, level: u32) -> Vec<Xi> {
    let mut out = Vec::new();
    for big_n in 0..=t {
        for u in compositions(big_n) {
            for gamma in increasing(u.len(), -(level as i64)) {
                out.push(Xi { u: u.clone(), gamma });
            }
        }
    }
    out
}
