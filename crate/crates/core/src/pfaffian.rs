//! Pfaffian families of commutator matrices and the stabiliser index of a
//! form, computed from Pfaffian norms and from elementary divisors.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{checked_pow, rational_mod, valuation, ArithError, Valuation};
use crate::lattice::SplitLattice;
use crate::poly::MPoly;
use crate::smith::{smith_valuations, smith_valuations_mod, ValuationProfile};
use crate::Rational;

/// Largest matrix size for the symbolic route.
pub const MAX_SYMBOLIC_RANK: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfaffianError {
    #[error("symbolic Pfaffians limited to rank {MAX_SYMBOLIC_RANK}, got {0}")]
    SizeLimit(usize),
    #[error("index routes disagree at {point}: elementary divisors give {smith}, Pfaffians give {pfaffian}")]
    RouteMismatch { point: String, smith: i64, pfaffian: i64 },
    #[error("elementary divisors of an alternating matrix do not pair up")]
    Unpaired,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `F_k`: the non-zero Pfaffians of principal `2k × 2k` submatrices, with the
/// subalgebra variables set to zero. `levels[0] = {1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfaffianFamily {
    pub nvars: usize,
    pub levels: Vec<Vec<MPoly<Rational>>>,
}

impl PfaffianFamily {
    /// `max_k max_{f ∈ F_k} −v_p(f(x))`, clipped at zero.
    pub fn norm_exponent(&self, x: &[Rational], p: u64) -> i64 {
        let mut best = 0i64;
        for level in self.levels.iter().skip(1) {
            for f in level {
                if let Valuation::Finite(v) = valuation(&f.eval(x), p) {
                    best = best.max(-v);
                }
            }
        }
        best
    }

    /// `−min_{f ∈ F_k} v_p(f(x))` for a single k (`None` if all vanish).
    pub fn level_exponent(&self, k: usize, x: &[Rational], p: u64) -> Option<i64> {
        self.levels[k]
            .iter()
            .filter_map(|f| valuation(&f.eval(x), p).finite())
            .map(|v| -v)
            .max()
    }
}

/// Commutator matrix with entries linear forms in the complement variables.
fn reduced_forms(slat: &SplitLattice) -> Vec<Vec<MPoly<Rational>>> {
    let lat = slat.lattice();
    let m1 = slat.m_plus_1();
    (0..lat.rank())
        .map(|i| {
            (0..lat.rank())
                .map(|j| MPoly::linear(&lat.bracket_basis(i, j)[..m1]))
                .collect()
        })
        .collect()
}

/// Pfaffians of every principal submatrix, by expansion along the first
/// index of each subset.
pub fn pfaffian_family(slat: &SplitLattice) -> Result<PfaffianFamily, PfaffianError> {
    let n = slat.rank();
    if n > MAX_SYMBOLIC_RANK {
        return Err(PfaffianError::SizeLimit(n));
    }
    let m1 = slat.m_plus_1();
    let a = reduced_forms(slat);
    let mut memo: HashMap<u32, MPoly<Rational>> = HashMap::new();
    memo.insert(0, MPoly::one(m1));
    let mut masks: Vec<u32> = (1u32..1 << n).filter(|m| m.count_ones() % 2 == 0).collect();
    masks.sort_by_key(|m| m.count_ones());
    let mut levels: Vec<Vec<MPoly<Rational>>> = vec![vec![MPoly::one(m1)]];
    levels.resize(n / 2 + 1, Vec::new());
    for mask in masks {
        let i0 = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i0);
        let mut pf = MPoly::zero(m1);
        let mut sign = true;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let sub = &memo[&(rest & !(1 << j))];
            if !a[i0][j].is_zero() && !sub.is_zero() {
                let term = a[i0][j].mul(sub);
                pf = if sign { pf.add(&term) } else { pf.sub(&term) };
            }
            sign = !sign;
        }
        if !pf.is_zero() {
            levels[mask.count_ones() as usize / 2].push(pf.clone());
        }
        memo.insert(mask, pf);
    }
    for level in levels.iter_mut() {
        let mut seen: Vec<MPoly<Rational>> = Vec::new();
        for f in level.drain(..) {
            let f = f.normalize_sign();
            if !seen.contains(&f) {
                seen.push(f);
            }
        }
        seen.sort();
        *level = seen;
    }
    Ok(PfaffianFamily { nvars: m1, levels })
}

/// Commutator matrix of the form with complement coordinates `x` (subalgebra
/// coordinates zero).
pub fn evaluated_matrix(slat: &SplitLattice, x: &[Rational]) -> Vec<Vec<Rational>> {
    let mut w = x.to_vec();
    w.resize(slat.rank(), Rational::zero());
    slat.lattice().evaluate_form(&w)
}

/// Index exponent from elementary divisors, checking that they pair up.
pub fn smith_exponent(slat: &SplitLattice, x: &[Rational], p: u64) -> Result<(i64, ValuationProfile), PfaffianError> {
    let prof = smith_valuations(&evaluated_matrix(slat, x), p);
    if !prof.is_paired() {
        return Err(PfaffianError::Unpaired);
    }
    let neg = prof.negative_part();
    debug_assert_eq!(neg % 2, 0);
    Ok((neg / 2, prof))
}

/// Both index routes for a fixed split; the symbolic one only when the rank
/// allows it.
#[derive(Debug, Clone)]
pub struct IndexEngine {
    slat: SplitLattice,
    family: Option<PfaffianFamily>,
}

impl IndexEngine {
    pub fn new(slat: &SplitLattice) -> Self {
        Self {
            slat: slat.clone(),
            family: pfaffian_family(slat).ok(),
        }
    }

    pub fn family(&self) -> Option<&PfaffianFamily> {
        self.family.as_ref()
    }

    /// `e` with `|g : stab_g(ω)|^{1/2} = p^e`.
    pub fn index(&self, x: &[Rational], p: u64) -> Result<i64, PfaffianError> {
        let (e, _) = smith_exponent(&self.slat, x, p)?;
        if let Some(f) = &self.family {
            let e2 = f.norm_exponent(x, p);
            if e2 != e {
                return Err(PfaffianError::RouteMismatch {
                    point: format!("{x:?}"),
                    smith: e,
                    pfaffian: e2,
                });
            }
        }
        Ok(e)
    }
}

/// One-shot version of [`IndexEngine::index`].
pub fn index_of_form(slat: &SplitLattice, x: &[Rational], p: u64) -> Result<i64, PfaffianError> {
    IndexEngine::new(slat).index(x, p)
}

/// Fast evaluation of the index on the grid `x = x'/p^L`, working modulo
/// `p^L`: `e = ½ Σ max(L − ν'_i, 0)` with `ν'` the divisors of `R(x')`.
#[derive(Debug, Clone)]
pub struct GridIndexer {
    n: usize,
    p: u64,
    level: u32,
    modulus: u64,
    /// `(i, j, [(k, c_{ijk} mod p^L)])` for `i < j`.
    entries: Vec<(usize, usize, Vec<(usize, u64)>)>,
}

impl GridIndexer {
    pub fn new(slat: &SplitLattice, p: u64, level: u32) -> Result<Self, PfaffianError> {
        let modulus = checked_pow(p, level)?;
        if modulus > u32::MAX as u64 {
            return Err(ArithError::ModulusTooLarge { p, exponent: level }.into());
        }
        let lat = slat.lattice();
        let n = lat.rank();
        let m1 = slat.m_plus_1();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut v = Vec::new();
                for k in 0..m1 {
                    let c = lat.constant(i, j, k);
                    if !c.is_zero() {
                        let r = rational_mod(c, modulus)?;
                        if r != 0 {
                            v.push((k, r));
                        }
                    }
                }
                if !v.is_empty() {
                    entries.push((i, j, v));
                }
            }
        }
        Ok(Self { n, p, level, modulus, entries })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Index exponent at the grid point with numerators `xs`.
    pub fn index(&self, xs: &[u64], scratch: &mut Vec<u64>) -> u32 {
        let n = self.n;
        scratch.clear();
        scratch.resize(n * n, 0);
        let m = self.modulus;
        for (i, j, v) in &self.entries {
            let mut s = 0u64;
            for &(k, c) in v {
                s = (s + c * xs[k]) % m;
            }
            scratch[i * n + j] = s;
            scratch[j * n + i] = (m - s) % m;
        }
        let nu = smith_valuations_mod(scratch, n, n, self.p, self.level, m);
        let total: u32 = nu.iter().map(|&v| self.level - v.min(self.level)).sum();
        total / 2
    }
}

/// Converts grid numerators to coordinates `x'/p^L`.
pub fn grid_point(xs: &[u64], p: u64, level: u32) -> Vec<Rational> {
    let den = BigInt::from(p).pow(level);
    xs.iter()
        .map(|&a| Rational::new(BigInt::from(a), den.clone()))
        .collect()
}

/// Index exponent of a full form (all coordinates, subalgebra included).
pub fn full_form_index(slat: &SplitLattice, w: &[Rational], p: u64) -> Result<i64, PfaffianError> {
    let prof = smith_valuations(&slat.lattice().evaluate_form(w), p);
    if !prof.is_paired() {
        return Err(PfaffianError::Unpaired);
    }
    Ok(prof.negative_part() / 2)
}
