//! The double series
//! `Ξ(Q, t) = Σ_{ℓ ∈ Z} Σ_{n ∈ Z_{≥N}^u} Q^{−min_j(λ_j(ℓ,n) + ε_j)} t^{−min_j(β_j(ℓ,n) + δ_j)}`:
//! truncations, its rational form, and the inversion identity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::{BiRational, ClosedFormError, Poly};
use crate::linalg::{invert, kernel};
use crate::Rational;

/// Largest `u` handled by [`xi_rational`].
pub const MAX_RATIONAL_U: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum XiError {
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    #[error("rational form limited to u ≤ {MAX_RATIONAL_U}, got {0}")]
    SizeLimit(usize),
    #[error("malformed spec: {0}")]
    Format(String),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// Linear forms on `Z^{1+u}` are coefficient vectors `(c_ℓ, c_1, …, c_u)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiSpec {
    pub u: usize,
    pub d: usize,
    pub lambda: Vec<Vec<i64>>,
    pub beta: Vec<Vec<i64>>,
    pub eps: Vec<i64>,
    pub delta: Vec<i64>,
    #[serde(rename = "N")]
    pub n: i64,
}

fn dot(f: &[i64], v: &[i64]) -> i64 {
    f.iter().zip(v).map(|(a, b)| a * b).sum()
}

impl XiSpec {
    pub fn from_json(s: &str) -> Result<Self, XiError> {
        serde_json::from_str(s).map_err(|e| XiError::Format(e.to_string()))
    }

    /// Same forms with shifts replaced.
    pub fn with_shifts(&self, n: i64, eps: Vec<i64>, delta: Vec<i64>) -> Self {
        Self {
            n,
            eps,
            delta,
            ..self.clone()
        }
    }

    /// `(j₀, a)` with `β_{j₀}(ℓ, n) = aℓ`.
    pub fn anchor(&self) -> Option<(usize, i64)> {
        (1..=self.d).find_map(|j| {
            let b = &self.beta[j];
            (b[0] >= 1 && b[1..].iter().all(|&x| x == 0)).then_some((j, b[0]))
        })
    }

    pub fn validate(&self) -> Result<(), XiError> {
        let bad = |s: String| Err(XiError::AssumptionViolation(s));
        let dim = self.u + 1;
        if self.u == 0 || self.d == 0 {
            return Err(XiError::Format("u and d must be at least 1".into()));
        }
        let shapes_ok = self.lambda.len() == self.d + 1
            && self.beta.len() == self.d + 1
            && self.eps.len() == self.d + 1
            && self.delta.len() == self.d + 1
            && self.lambda.iter().chain(&self.beta).all(|f| f.len() == dim);
        if !shapes_ok {
            return Err(XiError::Format(format!(
                "expected {} forms of length {dim} and shift vectors of length {}",
                self.d + 1,
                self.d + 1
            )));
        }
        if self.n < 0 {
            return Err(XiError::Format("N must be non-negative".into()));
        }
        // negative on the positive orthant iff negative on the unit vectors
        if let Some(i) = self.lambda[0].iter().position(|&c| c >= 0) {
            return bad(format!("λ₀ is not strictly negative: λ₀(e_{i}) = {}", self.lambda[0][i]));
        }
        if self.beta[0].iter().any(|&c| c != 0) {
            return bad("β₀ must vanish".into());
        }
        if self.delta[0] != 0 {
            return bad("δ₀ must be 0".into());
        }
        if self.anchor().is_none() {
            return bad("no β_j of the form aℓ with a ≥ 1".into());
        }
        Ok(())
    }

    /// `(Q-exponent, t-exponent)` of the point `v = (ℓ, n)`.
    pub fn exponents(&self, v: &[i64]) -> (i64, i64) {
        let k = (0..=self.d).map(|j| dot(&self.lambda[j], v) + self.eps[j]).min().unwrap();
        let e = (0..=self.d).map(|j| dot(&self.beta[j], v) + self.delta[j]).min().unwrap();
        (-k, -e)
    }

    /// Shifts absorbing the bound N: `ε'_j = ε_j + λ_j(0, N, …, N)`.
    pub fn normalized(&self) -> Self {
        let mut v = vec![self.n; self.u + 1];
        v[0] = 0;
        Self {
            eps: (0..=self.d).map(|j| self.eps[j] + dot(&self.lambda[j], &v)).collect(),
            delta: (0..=self.d).map(|j| self.delta[j] + dot(&self.beta[j], &v)).collect(),
            n: 0,
            ..self.clone()
        }
    }
}

/// Coefficient table `(k, e) ↦ count` for `k ≤ k_max`, `e ≤ e_max`, by
/// direct enumeration.
pub fn xi_truncate(spec: &XiSpec, k_max: i64, e_max: i64) -> Result<BTreeMap<(i64, i64), u64>, XiError> {
    spec.validate()?;
    let (j0, a) = spec.anchor().expect("validated");
    let l_min = Integer::div_floor(&-(e_max + spec.delta[j0]), &a);
    let c: Vec<i64> = spec.lambda[0].iter().map(|x| -x).collect();
    // −λ₀(v) − ε₀ ≤ k, so c·v ≤ k_max + ε₀
    let budget = k_max + spec.eps[0];
    let mut out = BTreeMap::new();
    let mut v = vec![0i64; spec.u + 1];
    let base_n: i64 = c[1..].iter().map(|ci| ci * spec.n).sum();
    let l_max = Integer::div_floor(&(budget - base_n), &c[0]);
    for l in l_min..=l_max {
        v[0] = l;
        walk(spec, &c, 1, budget - c[0] * l, &mut v, k_max, e_max, &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    spec: &XiSpec,
    c: &[i64],
    i: usize,
    room: i64,
    v: &mut Vec<i64>,
    k_max: i64,
    e_max: i64,
    out: &mut BTreeMap<(i64, i64), u64>,
) {
    if i == v.len() {
        let (k, e) = spec.exponents(v);
        if k <= k_max && e <= e_max {
            *out.entry((k, e)).or_insert(0) += 1;
        }
        return;
    }
    let rest: i64 = c[i + 1..].iter().map(|ci| ci * spec.n).sum();
    let hi = Integer::div_floor(&(room - rest), &c[i]);
    for x in spec.n..=hi {
        v[i] = x;
        walk(spec, c, i + 1, room - c[i] * x, v, k_max, e_max, out);
    }
}

/// Single coefficient of `Q^k t^e`.
pub fn xi_coefficient(spec: &XiSpec, k: i64, e: i64) -> Result<u64, XiError> {
    if e < 0 {
        return Ok(0);
    }
    Ok(xi_truncate(spec, k, e)?.get(&(k, e)).copied().unwrap_or(0))
}

/// `a·v ≤ b` over integer points.
#[derive(Debug, Clone)]
struct Halfspace {
    a: Vec<i64>,
    b: i64,
}

/// Lattice points `{v ∈ Z^D : a_i·v ≤ b_i}` of a polyhedron inside the
/// non-negative orthant.
struct Polyhedron {
    dim: usize,
    cons: Vec<Halfspace>,
}

fn to_rat(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

impl Polyhedron {
    fn contains(&self, v: &[i64]) -> bool {
        self.cons.iter().all(|h| dot(&h.a, v) <= h.b)
    }

    fn contains_rat(&self, v: &[Rational]) -> bool {
        self.cons.iter().all(|h| {
            let s: Rational = h.a.iter().zip(v).map(|(&a, x)| to_rat(a) * x).sum();
            s <= to_rat(h.b)
        })
    }

    fn vertices(&self) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for s in subsets(self.cons.len(), self.dim) {
            let m: Vec<Vec<Rational>> = s.iter().map(|&i| self.cons[i].a.iter().map(|&x| to_rat(x)).collect()).collect();
            let Some(inv) = invert(&m) else { continue };
            let rhs: Vec<Rational> = s.iter().map(|&i| to_rat(self.cons[i].b)).collect();
            let v: Vec<Rational> = inv.iter().map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum()).collect();
            if self.contains_rat(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Primitive integer generators of the extreme rays of the recession
    /// cone.
    fn rays(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for s in subsets(self.cons.len(), self.dim - 1) {
            let m: Vec<Vec<Rational>> = s.iter().map(|&i| self.cons[i].a.iter().map(|&x| to_rat(x)).collect()).collect();
            let ker = kernel(&m, self.dim);
            if ker.len() != 1 {
                continue;
            }
            let r = primitive(&ker[0]);
            for cand in [r.clone(), r.iter().map(|x| -x).collect::<Vec<_>>()] {
                let ok = self.cons.iter().all(|h| dot(&h.a, &cand) <= 0);
                if ok && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
        out
    }

    /// `(numerator terms, rays)` with `Σ_{v ∈ P} z^v = Σ c_w z^w / Π (1 − z^r)`.
    fn generating_function(&self) -> (Vec<(Vec<i64>, i64)>, Vec<Vec<i64>>) {
        let verts = self.vertices();
        if verts.is_empty() {
            return (Vec::new(), Vec::new());
        }
        let rays = self.rays();
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for v in &verts {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i].floor().to_integer().to_i64().unwrap());
                hi[i] = hi[i].max(v[i].ceil().to_integer().to_i64().unwrap());
            }
        }
        for r in &rays {
            for i in 0..self.dim {
                if r[i] > 0 {
                    hi[i] += r[i];
                } else {
                    lo[i] += r[i];
                }
            }
        }
        let shifts: Vec<(Vec<i64>, i64)> = (0u32..1 << rays.len())
            .map(|mask| {
                let mut s = vec![0i64; self.dim];
                for (k, r) in rays.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        for i in 0..self.dim {
                            s[i] += r[i];
                        }
                    }
                }
                (s, if mask.count_ones() % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        let mut num = Vec::new();
        let mut w = lo.clone();
        loop {
            let c: i64 = shifts
                .iter()
                .filter(|(s, _)| {
                    let p: Vec<i64> = w.iter().zip(s).map(|(a, b)| a - b).collect();
                    self.contains(&p)
                })
                .map(|(_, sign)| sign)
                .sum();
            if c != 0 {
                num.push((w.clone(), c));
            }
            // odometer over the box
            let mut i = 0;
            loop {
                if i == self.dim {
                    return (num, rays);
                }
                if w[i] < hi[i] {
                    w[i] += 1;
                    break;
                }
                w[i] = lo[i];
                i += 1;
            }
        }
    }
}

fn primitive(v: &[Rational]) -> Vec<i64> {
    let den = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter().map(|x| (x / &g).to_i64().expect("small ray")).collect()
}

/// Affine form `v ↦ lin·v + c` on the transformed coordinates.
#[derive(Clone)]
struct Affine {
    lin: Vec<i64>,
    c: i64,
}

impl Affine {
    fn at(&self, v: &[i64]) -> i64 {
        dot(&self.lin, v) + self.c
    }
}

/// Rational form of Ξ via the region decomposition
/// `(argmin of λ, argmin of β, sign of ℓ)`, smallest index winning ties.
pub fn xi_rational(spec: &XiSpec) -> Result<BiRational, XiError> {
    spec.validate()?;
    if spec.u > MAX_RATIONAL_U {
        return Err(XiError::SizeLimit(spec.u));
    }
    let s = spec.normalized();
    let dim = s.u + 1;
    let mut total = BiRational::zero();
    // ℓ = sign·ℓ' + offset with ℓ' ≥ 0
    for (sign, offset) in [(1i64, 0i64), (-1, -1)] {
        let tr = |f: &[i64], c: i64| -> Affine {
            let mut lin = f.to_vec();
            lin[0] = f[0] * sign;
            Affine { lin, c: c + f[0] * offset }
        };
        for j in 0..=s.d {
            for k in 0..=s.d {
                let mut cons = Vec::new();
                let mut strict = |forms: &[Vec<i64>], shifts: &[i64], pick: usize| {
                    for i in 0..=s.d {
                        if i == pick {
                            continue;
                        }
                        // form_pick + shift_pick (<|≤) form_i + shift_i
                        let diff: Vec<i64> = forms[pick].iter().zip(&forms[i]).map(|(a, b)| a - b).collect();
                        let aff = tr(&diff, shifts[pick] - shifts[i]);
                        let b = if i < pick { -1 } else { 0 };
                        cons.push(Halfspace { a: aff.lin, b: b - aff.c });
                    }
                };
                strict(&s.lambda, &s.eps, j);
                strict(&s.beta, &s.delta, k);
                for i in 0..dim {
                    let mut a = vec![0i64; dim];
                    a[i] = -1;
                    cons.push(Halfspace { a, b: 0 });
                }
                let poly = Polyhedron { dim, cons };
                let (num, rays) = poly.generating_function();
                if num.is_empty() {
                    continue;
                }
                let qexp = tr(&s.lambda[j].iter().map(|x| -x).collect::<Vec<_>>(), -s.eps[j]);
                let texp = tr(&s.beta[k].iter().map(|x| -x).collect::<Vec<_>>(), -s.delta[k]);
                let mut p = Poly::zero();
                for (w, c) in &num {
                    p.add_term(qexp.at(w) as i32, texp.at(w) as i32, BigInt::from(*c));
                }
                let factors: Vec<(i32, i32, u32)> = rays
                    .iter()
                    .map(|r| (dot(&qexp.lin, r) as i32, dot(&texp.lin, r) as i32, 1))
                    .collect();
                if factors.iter().any(|&(a, b, _)| b < 0 || (b == 0 && a <= 0)) {
                    return Err(XiError::AssumptionViolation(format!(
                        "region ({j}, {k}) has a non-convergent direction"
                    )));
                }
                total = total.add(&BiRational::new(p, &factors)?);
            }
        }
    }
    Ok(total)
}

/// Checks `Ξ_{1,0,0}(Q^{-1}, t^{-1}) = (−1)^{u+1} Ξ_{0,0,0}(Q, t)`.
pub fn inversion_check(spec: &XiSpec) -> Result<bool, XiError> {
    spec.validate()?;
    let zeros = vec![0i64; spec.d + 1];
    let one = xi_rational(&spec.with_shifts(1, zeros.clone(), zeros.clone()))?;
    let zero = xi_rational(&spec.with_shifts(0, zeros.clone(), zeros))?;
    let sign = if spec.u % 2 == 1 { 1 } else { -1 };
    Ok(one.invert_vars() == zero.scale_monomial(sign, 0, 0))
}

/// Compares the expansion of the rational form with the truncation on
/// `k_lo ≤ k < k_lo + width`, `0 ≤ e < width`; returns mismatching cells.
pub fn compare_window(spec: &XiSpec, k_lo: i64, width: i64) -> Result<Vec<((i64, i64), i64, i64)>, XiError> {
    let k_hi = k_lo + width - 1;
    let e_hi = width - 1;
    let trunc = xi_truncate(spec, k_hi, e_hi)?;
    let rat = xi_rational(spec)?.expand_formal(k_hi as i32, e_hi as u32)?;
    let mut bad = Vec::new();
    for k in k_lo..=k_hi {
        for e in 0..=e_hi {
            let a = trunc.get(&(k, e)).copied().unwrap_or(0) as i64;
            let b = rat
                .get(&(k as i32, e as u32))
                .map(|x| x.to_i64().expect("small coefficient"))
                .unwrap_or(0);
            if a != b {
                bad.push(((k, e), a, b));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basic() -> XiSpec {
        XiSpec {
            u: 1,
            d: 1,
            lambda: vec![vec![-1, -1], vec![-1, -1]],
            beta: vec![vec![0, 0], vec![1, 0]],
            eps: vec![0, 0],
            delta: vec![0, 0],
            n: 1,
        }
    }

    #[test]
    fn validation() {
        assert!(basic().validate().is_ok());
        let mut s = basic();
        s.lambda[0] = vec![1, -1];
        assert!(matches!(s.validate(), Err(XiError::AssumptionViolation(_))));
        let mut s = basic();
        s.delta[0] = 1;
        assert!(matches!(s.validate(), Err(XiError::AssumptionViolation(_))));
        assert!(matches!(inversion_check(&{
            let mut s = basic();
            s.lambda[0] = vec![0, -1];
            s
        }), Err(XiError::AssumptionViolation(_))));
    }

    #[test]
    fn basic_coefficients() {
        let s = basic();
        assert_eq!(xi_coefficient(&s, 1, 0).unwrap(), 1);
        assert_eq!(xi_coefficient(&s, 0, 1).unwrap(), 1);
        assert_eq!(xi_coefficient(&s, 0, -1).unwrap(), 0);
    }

    #[test]
    fn basic_rational_form() {
        // Q/(1−Q) · (1/(1−Q) + Q^{-1}t/(1−Q^{-1}t))
        let a = BiRational::new(Poly::qt(1, 0), &[(1, 0, 2)]).unwrap();
        let b = BiRational::new(Poly::qt(0, 1), &[(1, 0, 1), (-1, 1, 1)]).unwrap();
        assert_eq!(xi_rational(&basic()).unwrap(), a.add(&b));
    }

    fn two_level() -> XiSpec {
        XiSpec {
            u: 2,
            d: 1,
            lambda: vec![vec![-1, -1, -1], vec![-1, -1, -1]],
            beta: vec![vec![0, 0, 0], vec![1, 0, 0]],
            eps: vec![0, 0],
            delta: vec![0, 0],
            n: 1,
        }
    }

    fn skewed() -> XiSpec {
        XiSpec {
            u: 1,
            d: 2,
            lambda: vec![vec![-2, -1], vec![-1, -3], vec![1, -2]],
            beta: vec![vec![0, 0], vec![2, 0], vec![1, -1]],
            eps: vec![0, 1, -1],
            delta: vec![0, 2, 1],
            n: 1,
        }
    }

    fn mixed() -> XiSpec {
        XiSpec {
            u: 2,
            d: 2,
            lambda: vec![vec![-1, -1, -2], vec![-2, 1, -1], vec![0, -1, 0]],
            beta: vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 1, -1]],
            eps: vec![0, 0, 1],
            delta: vec![0, 0, 0],
            n: 0,
        }
    }

    #[test]
    fn rational_matches_truncation() {
        for s in [basic(), two_level(), skewed(), mixed()] {
            let bad = compare_window(&s, -6, 12).unwrap();
            assert!(bad.is_empty(), "{s:?}: {:?}", &bad[..bad.len().min(5)]);
        }
    }

    #[test]
    fn inversion() {
        for s in [basic(), two_level(), skewed(), mixed()] {
            assert!(inversion_check(&s).unwrap(), "{s:?}");
        }
    }

    #[test]
    fn size_guard() {
        let mut s = two_level();
        s.u = 3;
        for f in s.lambda.iter_mut().chain(s.beta.iter_mut()) {
            f.push(f[1]);
        }
        assert!(s.validate().is_ok());
        assert_eq!(xi_rational(&s), Err(XiError::SizeLimit(3)));
    }

    #[test]
    fn n_shift() {
        let s = basic();
        let n = s.normalized();
        assert_eq!(n.eps, vec![-1, -1]);
        assert_eq!(xi_truncate(&s, 6, 6).unwrap(), xi_truncate(&n, 6, 6).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = basic();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"N\":1"));
        assert_eq!(XiSpec::from_json(&text).unwrap(), s);
    }
}
