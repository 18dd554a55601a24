//! Lie lattices given by structure constants, split into a complement and
//! a subalgebra, together with the catalog of families.

mod catalog;
mod io;

pub use catalog::{
    build_family, default_nonresidue, gl_borel, gl_division, gl_lattice, gl_parabolic, heisenberg, u3, Family,
    FamilyParams,
};
pub use io::{load_custom_lattice, parse_custom_lattice, CustomLattice};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{is_p_integral, valuation, Valuation};
use crate::linalg::rank;
use crate::smith::smith_valuations;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("antisymmetry fails at ({i}, {j}, {k})")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails for basis triple ({i}, {j}, {k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("the subalgebra is not closed: [{i}, {j}] leaves it")]
    NotSubalgebra { i: usize, j: usize },
    #[error("h + [g, g] has rank {rank} < {n}: infinite index")]
    RelativeFAbViolation { rank: usize, n: usize },
    #[error("invalid parameters: {0}")]
    ParamError(String),
    #[error("malformed lattice description: {0}")]
    Format(String),
}

/// A free Lie lattice with `[Y_i, Y_j] = Σ_k c_{ijk} Y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieLattice {
    n: usize,
    c: Vec<Rational>,
    labels: Vec<String>,
}

impl LieLattice {
    /// From a dense constant array indexed `c[(i * n + j) * n + k]`.
    pub fn new(labels: Vec<String>, c: Vec<Rational>) -> Self {
        let n = labels.len();
        assert_eq!(c.len(), n * n * n, "constant array must have n^3 entries");
        Self { n, c, labels }
    }

    /// From a bracket on coordinate vectors.
    pub fn from_bracket<F>(labels: Vec<String>, bracket: F) -> Self
    where
        F: Fn(usize, usize) -> Vec<Rational>,
    {
        let n = labels.len();
        let mut c = vec![Rational::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                let v = bracket(i, j);
                for (k, x) in v.into_iter().enumerate() {
                    c[(i * n + j) * n + k] = x;
                }
            }
        }
        Self { n, c, labels }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[(i * self.n + j) * self.n + k]
    }

    /// `[Y_i, Y_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        let s = (i * self.n + j) * self.n;
        &self.c[s..s + self.n]
    }

    /// Bracket of coordinate vectors.
    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &ab * c;
                    }
                }
            }
        }
        out
    }

    /// Antisymmetry and Jacobi on all basis triples.
    pub fn validate(&self) -> Result<(), LatticeError> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if *self.constant(i, j, k) != -self.constant(j, i, k) {
                        return Err(LatticeError::AntisymmetryViolation { i, j, k });
                    }
                }
            }
        }
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        };
        for i in 0..n {
            for j in i + 1..n {
                let ij = self.bracket_basis(i, j).to_vec();
                for k in j + 1..n {
                    let jk = self.bracket_basis(j, k).to_vec();
                    let ki = self.bracket_basis(k, i).to_vec();
                    let a = self.bracket(&ij, &unit(k));
                    let b = self.bracket(&jk, &unit(i));
                    let c = self.bracket(&ki, &unit(j));
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(LatticeError::JacobiViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Multiplies all constants by `p^r`: the lattice `p^r g` in the basis
    /// `p^r Y_i`.
    pub fn scaled(&self, p: u64, r: u32) -> Self {
        let f = Rational::from_integer(num_bigint::BigInt::from(p).pow(r));
        Self {
            n: self.n,
            c: self.c.iter().map(|x| x * &f).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Commutator matrix `R(T)_{ij} = Σ_k c_{ijk} T_k`, each entry given by
    /// its coefficient vector over `T_1..T_n`.
    pub fn commutator_matrix(&self) -> Vec<Vec<Vec<Rational>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.bracket_basis(i, j).to_vec()).collect())
            .collect()
    }

    /// Evaluates `R(w)_{ij} = Σ_{k ∈ coords} c_{ijk} w_k`.
    pub fn evaluate_form(&self, w: &[Rational]) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        self.bracket_basis(i, j)
                            .iter()
                            .zip(w)
                            .filter(|(c, x)| !c.is_zero() && !x.is_zero())
                            .map(|(c, x)| c * x)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.c.iter().all(|x| is_p_integral(x, p))
    }
}

/// Integer matrices realising the basis of a matrix lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRealization {
    pub size: usize,
    pub basis: Vec<Vec<Vec<i64>>>,
}

/// `g = k ⊕ h` with the complement spanned by the first `m_plus_1` basis
/// vectors and `h` by the rest.
#[derive(Debug, Clone)]
pub struct SplitLattice {
    lattice: LieLattice,
    m_plus_1: usize,
    realization: Option<MatrixRealization>,
}

impl SplitLattice {
    /// Checks that `h` is a subalgebra and that `|g : h + [g, g]|` is finite.
    pub fn new(lattice: LieLattice, m_plus_1: usize) -> Result<Self, LatticeError> {
        let s = Self::with_subalgebra(lattice, m_plus_1)?;
        s.check_relative_fab()?;
        Ok(s)
    }

    /// Only checks that `h` is a subalgebra. Such splits can still be used
    /// for finite-level orbit computations.
    pub fn with_subalgebra(lattice: LieLattice, m_plus_1: usize) -> Result<Self, LatticeError> {
        lattice.validate()?;
        let n = lattice.rank();
        if m_plus_1 > n {
            return Err(LatticeError::ParamError(format!(
                "complement rank {m_plus_1} exceeds lattice rank {n}"
            )));
        }
        for i in m_plus_1..n {
            for j in m_plus_1..n {
                if lattice.bracket_basis(i, j)[..m_plus_1].iter().any(|x| !x.is_zero()) {
                    return Err(LatticeError::NotSubalgebra { i, j });
                }
            }
        }
        Ok(Self {
            lattice,
            m_plus_1,
            realization: None,
        })
    }

    pub fn with_realization(mut self, r: MatrixRealization) -> Self {
        assert_eq!(r.basis.len(), self.lattice.rank());
        self.realization = Some(r);
        self
    }

    pub fn lattice(&self) -> &LieLattice {
        &self.lattice
    }

    pub fn m_plus_1(&self) -> usize {
        self.m_plus_1
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn realization(&self) -> Option<&MatrixRealization> {
        self.realization.as_ref()
    }

    /// Rank over Q of `h + [g, g]`.
    pub fn relative_commutator_rank(&self) -> usize {
        let n = self.rank();
        let mut rows: Vec<Vec<Rational>> = (self.m_plus_1..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                v
            })
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                let b = self.lattice.bracket_basis(i, j);
                if b.iter().any(|x| !x.is_zero()) {
                    rows.push(b.to_vec());
                }
            }
        }
        rank(&rows)
    }

    pub fn check_relative_fab(&self) -> Result<(), LatticeError> {
        let r = self.relative_commutator_rank();
        if r < self.rank() {
            return Err(LatticeError::RelativeFAbViolation { rank: r, n: self.rank() });
        }
        Ok(())
    }

    /// The least ε with `p^ε k ⊆ pr_k([g, g])` over Z_(p); `None` when the
    /// projection has infinite index.
    pub fn commutator_content(&self, p: u64) -> Option<i64> {
        let n = self.rank();
        let m1 = self.m_plus_1;
        if m1 == 0 {
            return Some(0);
        }
        let mut rows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let b = &self.lattice.bracket_basis(i, j)[..m1];
                if b.iter().any(|x| !x.is_zero()) {
                    rows.push(b.to_vec());
                }
            }
        }
        if rows.len() < m1 {
            return None;
        }
        let prof = smith_valuations(&rows, p);
        prof.nu
            .iter()
            .map(|v| v.finite())
            .collect::<Option<Vec<i64>>>()
            .map(|v| v.into_iter().max().unwrap_or(0))
    }

    /// The congruence lattice `p^r g` with the same split.
    pub fn scale(&self, p: u64, r: u32) -> Self {
        Self {
            lattice: self.lattice.scaled(p, r),
            m_plus_1: self.m_plus_1,
            realization: self.realization.clone(),
        }
    }
}

/// Minimal valuation among the constants (`Infinite` for abelian lattices).
pub fn constant_valuation(lat: &LieLattice, p: u64) -> Valuation {
    lat.c.iter().map(|x| valuation(x, p)).min().unwrap_or(Valuation::Infinite)
}

/// Least permissible congruence level for the prime p.
pub fn min_permissible_r(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        // ⌈1/(p−2)⌉, and at least 1
        1
    }
}
