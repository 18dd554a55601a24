//! Exhaustive evaluation of the zeta function of an induced representation
//! on truncated duals, and coadjoint orbits of `exp(p^r g)` at finite level.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{checked_pow, is_prime, padic_exp_matrix, rational_mod, ArithError};
use crate::lattice::{min_permissible_r, LatticeError, SplitLattice};
use crate::linalg::left_inverse;
use crate::pfaffian::{full_form_index, GridIndexer, PfaffianError};
use crate::Rational;

/// Default cap on the number of enumerated points.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Index(#[from] PfaffianError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{points} points exceed the budget of {budget}")]
    OverflowGuard { points: u128, budget: u64 },
    #[error("invalid job: {0}")]
    Param(String),
    #[error("orbit computations need an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("the lattice has no integral matrix realisation")]
    NoRealization,
    #[error("working precision too low: {0}")]
    PrecisionError(String),
    #[error("multiplicity {numerator}/sqrt({denominator}) is not an integer")]
    NonIntegralMultiplicity { numerator: u64, denominator: u64 },
}

/// Induced representation `Ind_{exp(p^r h)}^{exp(p^r g)}(1)` truncated at
/// level L.
#[derive(Debug, Clone)]
pub struct ZetaJob {
    pub slat: SplitLattice,
    pub p: u64,
    pub r: u32,
    pub level: u32,
    pub budget: u64,
}

impl ZetaJob {
    pub fn new(slat: SplitLattice, p: u64, r: u32, level: u32) -> Self {
        Self {
            slat,
            p,
            r,
            level,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        if !is_prime(self.p) {
            return Err(ArithError::NotPrime(self.p).into());
        }
        if self.r < min_permissible_r(self.p) {
            return Err(OrbitError::Param(format!("r = {} not permissible for p = {}", self.r, self.p)));
        }
        if self.level == 0 {
            return Err(OrbitError::Param("L must be at least 1".into()));
        }
        Ok(())
    }

    /// `p^{L(m+1)}`.
    pub fn grid_size(&self) -> u128 {
        (self.p as u128).pow(self.level * self.slat.m_plus_1() as u32)
    }
}

/// Point counts `N_e` of the grid by index exponent; the Dirichlet
/// coefficient of `q^{-es}` is `N_e q^{r(m+1) − e}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletTally {
    pub q: u64,
    pub r: u32,
    pub level: u32,
    pub m_plus_1: usize,
    /// Coefficients with `e ≤ exact_up_to` are final; negative if none are.
    pub exact_up_to: i64,
    pub point_counts: BTreeMap<u32, u64>,
}

/// JSON form of a tally with fixed field order.
#[derive(Debug, Clone, Serialize)]
pub struct TallyReport {
    pub q: u64,
    pub r: u32,
    #[serde(rename = "L")]
    pub level: u32,
    pub exact_up_to: i64,
    pub coefficients: Vec<(u32, u128)>,
}

impl DirichletTally {
    pub fn total_points(&self) -> u128 {
        self.point_counts.values().map(|&c| c as u128).sum()
    }

    /// `N_e q^{r(m+1) − e}` as an exact rational.
    pub fn raw_coefficient(&self, e: u32) -> Rational {
        let n = self.point_counts.get(&e).copied().unwrap_or(0);
        let q = BigInt::from(self.q);
        let num = BigInt::from(n) * q.pow(self.r * self.m_plus_1 as u32);
        Rational::new(num, q.pow(e))
    }

    /// Certified coefficient `r_{q^e}`; `None` beyond `exact_up_to`.
    pub fn coefficient(&self, e: u32) -> Option<u128> {
        if e as i64 > self.exact_up_to {
            return None;
        }
        let c = self.raw_coefficient(e);
        assert!(c.is_integer(), "certified coefficient {c} is not integral");
        c.to_integer().to_u128()
    }

    /// All certified coefficients, including zeros.
    pub fn coefficients(&self) -> Vec<(u32, u128)> {
        if self.exact_up_to < 0 {
            return Vec::new();
        }
        (0..=self.exact_up_to as u32)
            .map(|e| (e, self.coefficient(e).expect("within certified range")))
            .collect()
    }

    pub fn report(&self) -> TallyReport {
        TallyReport {
            q: self.q,
            r: self.r,
            level: self.level,
            exact_up_to: self.exact_up_to,
            coefficients: self.coefficients(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.report()).expect("tally serialises")
    }
}

fn decode(mut idx: u64, base: u64, out: &mut [u64]) {
    for d in out.iter_mut() {
        *d = idx % base;
        idx /= base;
    }
}

/// Tallies the index exponent over the grid `(p^{-L}Z/Z)^{m+1}` without the
/// finiteness checks; used directly for splits that are not relatively FAb.
pub fn grid_tally(slat: &SplitLattice, p: u64, r: u32, level: u32, budget: u64) -> Result<DirichletTally, OrbitError> {
    let m1 = slat.m_plus_1();
    let points = (p as u128).pow(level * m1 as u32);
    if points > budget as u128 {
        return Err(OrbitError::OverflowGuard { points, budget });
    }
    let exact_up_to = match slat.commutator_content(p) {
        Some(eps) => level as i64 - eps,
        None => -1,
    };
    let mut tally = DirichletTally {
        q: p,
        r,
        level,
        m_plus_1: m1,
        exact_up_to,
        point_counts: BTreeMap::new(),
    };
    if level == 0 {
        tally.point_counts.insert(0, 1);
        return Ok(tally);
    }
    let indexer = GridIndexer::new(slat, p, level)?;
    let base = checked_pow(p, level)?;
    let points = points as u64;
    const BLOCK: u64 = 1 << 12;
    let blocks = points.div_ceil(BLOCK);
    tally.point_counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut local = BTreeMap::new();
            let mut xs = vec![0u64; m1];
            let mut scratch = Vec::new();
            for idx in b * BLOCK..((b + 1) * BLOCK).min(points) {
                decode(idx, base, &mut xs);
                *local.entry(indexer.index(&xs, &mut scratch)).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (e, c) in b {
                *a.entry(e).or_insert(0) += c;
            }
            a
        });
    Ok(tally)
}

/// `ζ = q^{r(m+1)} Σ_x q^{−e(x)(1+s)}` over the grid at level L, with `e`
/// computed on the unscaled lattice.
pub fn bruteforce_zeta(job: &ZetaJob) -> Result<DirichletTally, OrbitError> {
    job.validate()?;
    job.slat.check_relative_fab()?;
    grid_tally(&job.slat, job.p, job.r, job.level, job.budget)
}

/// Coadjoint action of the generators `exp(±p^r Y_i)` on `Hom(g_r, p^{-L}Z/Z)`.
#[derive(Debug, Clone)]
pub struct CoadjointAction {
    n: usize,
    m1: usize,
    modulus: u64,
    /// `gens[i][s]`: matrix of `ω ↦ g.ω` for `g = exp(±p^r Y_i)`.
    gens: Vec<[Vec<Vec<u64>>; 2]>,
}

impl CoadjointAction {
    pub fn new(job: &ZetaJob) -> Result<Self, OrbitError> {
        job.validate()?;
        if job.p == 2 {
            return Err(OrbitError::EvenPrime(job.p));
        }
        let real = job.slat.realization().ok_or(OrbitError::NoRealization)?;
        let n = job.slat.rank();
        let modulus = checked_pow(job.p, job.level)?;
        let to_rat = |x: i64| Rational::from_integer(BigInt::from(x));
        let flat: Vec<Vec<Rational>> = real
            .basis
            .iter()
            .map(|m| m.iter().flatten().map(|&x| to_rat(x)).collect())
            .collect();
        let pinv = left_inverse(&flat).ok_or(OrbitError::NoRealization)?;
        let pinv: Vec<Vec<u64>> = pinv
            .iter()
            .map(|row| row.iter().map(|x| rational_mod(x, modulus)).collect())
            .collect::<Result<_, _>>()
            .map_err(|_| OrbitError::NoRealization)?;
        let scale = Rational::from_integer(BigInt::from(job.p).pow(job.r));
        let mut gens = Vec::with_capacity(n);
        for b in &real.basis {
            let mut pair: [Vec<Vec<u64>>; 2] = [Vec::new(), Vec::new()];
            for (s, sign) in [1i64, -1].into_iter().enumerate() {
                let a: Vec<Vec<Rational>> = b
                    .iter()
                    .map(|row| row.iter().map(|&x| to_rat(x * sign) * &scale).collect())
                    .collect();
                let g = padic_exp_matrix(&a, job.p, job.level)?;
                let neg: Vec<Vec<Rational>> = a.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
                let ginv = padic_exp_matrix(&neg, job.p, job.level)?;
                check_inverse(&g, &ginv, modulus)?;
                // A[j][k]: coordinates of g^{-1} Y_j g
                let mut act = vec![vec![0u64; n]; n];
                for (j, y) in real.basis.iter().enumerate() {
                    let conj = conjugate(&ginv, y, &g, modulus);
                    let v: Vec<u64> = conj.into_iter().flatten().collect();
                    for k in 0..n {
                        let mut acc = 0u64;
                        for (c, x) in pinv[k].iter().zip(&v) {
                            acc = (acc + mulm(*c, *x, modulus)) % modulus;
                        }
                        act[j][k] = acc;
                    }
                }
                pair[s] = act;
            }
            gens.push(pair);
        }
        Ok(Self {
            n,
            m1: job.slat.m_plus_1(),
            modulus,
            gens,
        })
    }

    fn apply(&self, a: &[Vec<u64>], w: &[u64], dims: std::ops::Range<usize>) -> Vec<u64> {
        dims.clone()
            .map(|j| {
                dims.clone()
                    .fold(0u64, |acc, k| (acc + mulm(a[j][k], w[k - dims.start], self.modulus)) % self.modulus)
            })
            .collect()
    }

    fn bfs(&self, start: &[u64], gens: &[usize], dims: std::ops::Range<usize>) -> Vec<Vec<u64>> {
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.to_vec());
        queue.push_back(start.to_vec());
        while let Some(w) = queue.pop_front() {
            for &i in gens {
                for a in &self.gens[i] {
                    let v = self.apply(a, &w, dims.clone());
                    if seen.insert(v.clone()) {
                        queue.push_back(v);
                    }
                }
            }
        }
        let mut out: Vec<Vec<u64>> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// `G.ω` for `ω` given by numerators over `p^L`.
    pub fn orbit(&self, w: &[u64]) -> Vec<Vec<u64>> {
        let all: Vec<usize> = (0..self.n).collect();
        self.bfs(w, &all, 0..self.n)
    }

    /// `H.η` for `η` on the subalgebra coordinates.
    pub fn sub_orbit(&self, eta: &[u64]) -> Vec<Vec<u64>> {
        let sub: Vec<usize> = (self.m1..self.n).collect();
        self.bfs(eta, &sub, self.m1..self.n)
    }
}

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mat_mul_mod(a: &[Vec<u64>], b: &[Vec<u64>], m: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let k = b.len();
    let c = b[0].len();
    let mut out = vec![vec![0u64; c]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] == 0 {
                continue;
            }
            for j in 0..c {
                out[i][j] = (out[i][j] + mulm(a[i][l], b[l][j], m)) % m;
            }
        }
    }
    out
}

fn conjugate(ginv: &[Vec<u64>], y: &[Vec<i64>], g: &[Vec<u64>], m: u64) -> Vec<Vec<u64>> {
    let ym: Vec<Vec<u64>> = y
        .iter()
        .map(|row| row.iter().map(|&x| x.rem_euclid(m as i64) as u64).collect())
        .collect();
    mat_mul_mod(&mat_mul_mod(ginv, &ym, m), g, m)
}

fn check_inverse(g: &[Vec<u64>], ginv: &[Vec<u64>], m: u64) -> Result<(), OrbitError> {
    let prod = mat_mul_mod(g, ginv, m);
    for (i, row) in prod.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != u64::from(i == j) % m {
                return Err(OrbitError::PrecisionError("exp(A) exp(−A) ≠ 1".into()));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitInfo {
    /// Least element of the orbit, as numerators over `p^L`.
    pub representative: Vec<u64>,
    pub size: u64,
    /// `e` with `|g_r : stab(ω)| = q^{2e}`.
    pub index_exponent: i64,
    /// Orbit elements vanishing on the subalgebra.
    pub annihilator_points: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitData {
    pub p: u64,
    pub r: u32,
    #[serde(rename = "L")]
    pub level: u32,
    pub orbits: Vec<OrbitInfo>,
}

impl OrbitData {
    /// `Σ_O m(O, 0) dim(O)^{-s}` as point counts per `e`, i.e. the same
    /// normalisation as [`DirichletTally::raw_coefficient`].
    pub fn induced_coefficients(&self) -> Result<BTreeMap<u32, u128>, OrbitError> {
        let mut out = BTreeMap::new();
        for o in &self.orbits {
            if o.annihilator_points == 0 {
                continue;
            }
            let dim = self.p.pow(o.index_exponent as u32);
            if o.annihilator_points % dim != 0 {
                return Err(OrbitError::NonIntegralMultiplicity {
                    numerator: o.annihilator_points,
                    denominator: o.size,
                });
            }
            *out.entry(o.index_exponent as u32).or_insert(0) += (o.annihilator_points / dim) as u128;
        }
        Ok(out)
    }
}

fn numerators_to_form(w: &[u64], p: u64, level: u32) -> Vec<Rational> {
    let den = BigInt::from(p).pow(level);
    w.iter().map(|&a| Rational::new(BigInt::from(a), den.clone())).collect()
}

/// All coadjoint orbits on the level-L dual of `g_r`.
pub fn coadjoint_orbits(job: &ZetaJob) -> Result<OrbitData, OrbitError> {
    let action = CoadjointAction::new(job)?;
    let n = job.slat.rank();
    let m1 = job.slat.m_plus_1();
    let base = action.modulus;
    let points = (base as u128).pow(n as u32);
    if points > job.budget as u128 {
        return Err(OrbitError::OverflowGuard { points, budget: job.budget });
    }
    let points = points as u64;
    let scaled = job.slat.scale(job.p, job.r);
    let encode = |w: &[u64]| w.iter().rev().fold(0u64, |acc, &x| acc * base + x);
    let mut visited = vec![false; points as usize];
    let mut orbits = Vec::new();
    let mut w = vec![0u64; n];
    for idx in 0..points {
        if visited[idx as usize] {
            continue;
        }
        decode(idx, base, &mut w);
        let orbit = action.orbit(&w);
        for v in &orbit {
            visited[encode(v) as usize] = true;
        }
        let e = full_form_index(&scaled, &numerators_to_form(&w, job.p, job.level), job.p)?;
        let annihilator_points = orbit.iter().filter(|v| v[m1..].iter().all(|&x| x == 0)).count() as u64;
        orbits.push(OrbitInfo {
            representative: orbit[0].clone(),
            size: orbit.len() as u64,
            index_exponent: e,
            annihilator_points,
        });
    }
    Ok(OrbitData {
        p: job.p,
        r: job.r,
        level: job.level,
        orbits,
    })
}

/// `IN(ω, η) / (|G.ω| |H.η|)^{1/2}`: the multiplicity of `π_ω` in
/// `Ind_H^G(σ_η)`.
pub fn induced_multiplicity(omega: &[u64], eta: &[u64], job: &ZetaJob) -> Result<u64, OrbitError> {
    let action = CoadjointAction::new(job)?;
    let m1 = job.slat.m_plus_1();
    if omega.len() != job.slat.rank() || eta.len() != job.slat.rank() - m1 {
        return Err(OrbitError::Param("form has the wrong number of coordinates".into()));
    }
    let g_orbit = action.orbit(omega);
    let h_orbit: HashSet<Vec<u64>> = action.sub_orbit(eta).into_iter().collect();
    let hits = g_orbit.iter().filter(|v| h_orbit.contains(&v[m1..])).count() as u64;
    let denom = g_orbit.len() as u64 * h_orbit.len() as u64;
    let root = denom.sqrt();
    if root * root != denom || hits % root != 0 {
        return Err(OrbitError::NonIntegralMultiplicity { numerator: hits, denominator: denom });
    }
    Ok(hits / root)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_family, gl_borel, heisenberg, Family, FamilyParams, LieLattice};

    #[test]
    fn gl3_borel_constant_term_and_conservation() {
        let job = ZetaJob::new(gl_borel(3).unwrap(), 3, 1, 2);
        let t = bruteforce_zeta(&job).unwrap();
        assert_eq!(t.exact_up_to, 2);
        assert_eq!(t.coefficient(0), Some(27));
        assert_eq!(t.total_points(), 3u128.pow(6));
        let json = t.to_json();
        assert!(json.starts_with(r#"{"q":3,"r":1,"L":2,"exact_up_to":2,"coefficients":[[0,27],"#), "{json}");
    }

    #[test]
    fn monotone_exactness() {
        let slat = gl_borel(3).unwrap();
        let a = bruteforce_zeta(&ZetaJob::new(slat.clone(), 3, 1, 1)).unwrap();
        let b = bruteforce_zeta(&ZetaJob::new(slat, 3, 1, 2)).unwrap();
        for (e, c) in a.coefficients() {
            assert_eq!(b.coefficient(e), Some(c));
        }
    }

    #[test]
    fn division_algebra_coefficients() {
        let params = FamilyParams { family: Family::GlDivision { n: 1, d: 2, inv: 1 }, p: 3, r: 1 };
        let job = ZetaJob::new(build_family(&params).unwrap(), 3, 1, 2);
        let t = bruteforce_zeta(&job).unwrap();
        assert_eq!(t.coefficients(), vec![(0, 81), (1, 0), (2, 72)]);
    }

    #[test]
    fn guards() {
        let lat = LieLattice::new(vec!["a".into(), "b".into()], vec![crate::arith::rat(0); 8]);
        let abelian = SplitLattice::with_subalgebra(lat, 2).unwrap();
        assert!(matches!(
            bruteforce_zeta(&ZetaJob::new(abelian, 3, 1, 1)),
            Err(OrbitError::Lattice(LatticeError::RelativeFAbViolation { .. }))
        ));
        let big = ZetaJob::new(gl_borel(3).unwrap(), 3, 1, 3).with_budget(1000);
        assert!(matches!(bruteforce_zeta(&big), Err(OrbitError::OverflowGuard { .. })));
        let even = ZetaJob::new(gl_borel(2).unwrap(), 2, 2, 1);
        assert_eq!(CoadjointAction::new(&even).err(), Some(OrbitError::EvenPrime(2)));
    }

    #[test]
    fn tally_is_independent_of_worker_count() {
        let slat = gl_borel(3).unwrap();
        let run = |k| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .unwrap()
                .install(|| grid_tally(&slat, 3, 1, 2, DEFAULT_BUDGET).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn gl2_level_one_orbits_are_points() {
        let data = coadjoint_orbits(&ZetaJob::new(gl_borel(2).unwrap(), 3, 1, 1)).unwrap();
        assert_eq!(data.orbits.len(), 81);
        assert!(data.orbits.iter().all(|o| o.size == 1));
    }

    #[test]
    fn heisenberg_orbit_and_multiplicity() {
        let job = ZetaJob::new(heisenberg(), 3, 1, 2);
        let action = CoadjointAction::new(&job).unwrap();
        // coordinates (Y, Z, X); ω(Z') = 1/9
        let omega = [0, 1, 0];
        assert_eq!(action.orbit(&omega).len(), 9);
        assert_eq!(action.orbit(&[0, 0, 0]).len(), 1);
        assert_eq!(induced_multiplicity(&omega, &[0], &job).unwrap(), 1);
        assert_eq!(induced_multiplicity(&[0, 0, 0], &[0], &job).unwrap(), 1);
    }
}
