//! The families of split lattices: Borel and maximal parabolic subalgebras
//! of gl_n, the Borel of the unramified unitary algebra u_3, and maximal
//! parabolics of gl_{n+1} over a cyclic division algebra.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{min_permissible_r, LatticeError, LieLattice, MatrixRealization, SplitLattice};
use crate::arith::{is_prime, pow_mod, CyclicAlgebra, PeriodRing};
use crate::linalg::left_inverse;
use crate::Rational;

type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// gl_n split by its upper-triangular Borel.
    GlBorel { n: usize },
    /// gl_n split by the parabolic `{X_ij = 0 : i ≤ t < j}`.
    GlParabolic { n: usize, t: usize },
    /// u_3 for the quadratic extension `Z_p[δ]`, `δ² = nonresidue`.
    U3 { nonresidue: i64 },
    /// gl_{n+1}(Δ), Δ of index d and invariant `inv/d`.
    GlDivision { n: usize, d: usize, inv: usize },
}

impl Family {
    /// u_3 with the default non-residue: −1 if p ≡ 3 (mod 4), else the
    /// least positive non-residue.
    pub fn u3_for_prime(p: u64) -> Result<Self, LatticeError> {
        Ok(Family::U3 {
            nonresidue: default_nonresidue(p)?,
        })
    }

    /// Complement rank.
    pub fn m_plus_1(&self) -> usize {
        match *self {
            Family::GlBorel { n } => n * (n - 1) / 2,
            Family::GlParabolic { n, t } => t * (n - t),
            Family::U3 { .. } => 3,
            Family::GlDivision { n, d, .. } => n * d * d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(flatten)]
    pub family: Family,
    pub p: u64,
    pub r: u32,
}

fn is_square_mod(a: i64, p: u64) -> bool {
    let a = a.rem_euclid(p as i64) as u64;
    a == 0 || pow_mod(a, (p - 1) / 2, p) == 1
}

pub fn default_nonresidue(p: u64) -> Result<i64, LatticeError> {
    if p == 2 || !is_prime(p) {
        return Err(LatticeError::ParamError(format!("u3 needs an odd prime, got {p}")));
    }
    if p % 4 == 3 {
        return Ok(-1);
    }
    Ok((2..p as i64).find(|&a| !is_square_mod(a, p)).expect("non-residues exist"))
}

impl FamilyParams {
    pub fn validate(&self) -> Result<(), LatticeError> {
        let err = |s: String| Err(LatticeError::ParamError(s));
        if !is_prime(self.p) {
            return err(format!("{} is not prime", self.p));
        }
        if self.r < min_permissible_r(self.p) {
            return err(format!("r = {} is not permissible for p = {}", self.r, self.p));
        }
        match self.family {
            Family::GlBorel { n } if n < 2 => err("gl_borel needs n ≥ 2".into()),
            Family::GlParabolic { n, t } if t < 1 || 2 * t > n => {
                err(format!("gl_parabolic needs 1 ≤ t ≤ n − t, got n = {n}, t = {t}"))
            }
            Family::U3 { nonresidue } => {
                if self.p == 2 {
                    return err("u3 needs an odd prime".into());
                }
                if is_square_mod(nonresidue, self.p) {
                    return err(format!("{nonresidue} is a square modulo {}", self.p));
                }
                Ok(())
            }
            Family::GlDivision { n, d, inv } => {
                if n < 1 || d < 1 {
                    return err("gl_division needs n, d ≥ 1".into());
                }
                if num_integer::gcd(inv, d) != 1 {
                    return err(format!("invariant {inv} is not coprime to {d}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Builds the split lattice (unscaled, i.e. at level 0).
pub fn build_family(params: &FamilyParams) -> Result<SplitLattice, LatticeError> {
    params.validate()?;
    match params.family {
        Family::GlBorel { n } => gl_borel(n),
        Family::GlParabolic { n, t } => gl_parabolic(n, t),
        Family::U3 { nonresidue } => u3(nonresidue),
        Family::GlDivision { n, d, inv } => gl_division(n, d, inv, params.p),
    }
}

fn elementary(n: usize, i: usize, j: usize) -> IntMatrix {
    let mut m = vec![vec![0i64; n]; n];
    m[i][j] = 1;
    m
}

fn commutator(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j] - b[i][k] * a[k][j];
            }
        }
    }
    out
}

fn flatten(m: &IntMatrix) -> Vec<Rational> {
    m.iter()
        .flatten()
        .map(|&x| Rational::from_integer(BigInt::from(x)))
        .collect()
}

/// A lattice spanned by integer matrices, with brackets expressed in the
/// same basis.
pub(crate) fn from_matrices(labels: Vec<String>, mats: Vec<IntMatrix>) -> (LieLattice, MatrixRealization) {
    let size = mats[0].len();
    let vecs: Vec<Vec<Rational>> = mats.iter().map(flatten).collect();
    let pinv = left_inverse(&vecs).expect("matrix basis is linearly independent");
    let coords = |v: &[Rational]| -> Vec<Rational> {
        pinv.iter()
            .map(|row| row.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    };
    let lat = LieLattice::from_bracket(labels, |i, j| {
        let c = flatten(&commutator(&mats[i], &mats[j]));
        let x = coords(&c);
        debug_assert_eq!(
            {
                let mut back = vec![Rational::zero(); c.len()];
                for (k, xk) in x.iter().enumerate() {
                    for (b, v) in back.iter_mut().zip(&vecs[k]) {
                        *b += xk * v;
                    }
                }
                back
            },
            c,
            "bracket leaves the span"
        );
        x
    });
    (lat, MatrixRealization { size, basis: mats })
}

fn build_gl(n: usize, order: Vec<(usize, usize)>) -> (LieLattice, MatrixRealization) {
    let labels = order.iter().map(|(i, j)| format!("E{}{}", i + 1, j + 1)).collect();
    let mats = order.iter().map(|&(i, j)| elementary(n, i, j)).collect();
    from_matrices(labels, mats)
}

/// gl_n in the row-major basis `E_ij`.
pub fn gl_lattice(n: usize) -> (LieLattice, MatrixRealization) {
    let order = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    build_gl(n, order)
}

fn finish(lat: LieLattice, real: MatrixRealization, m1: usize) -> Result<SplitLattice, LatticeError> {
    Ok(SplitLattice::new(lat, m1)?.with_realization(real))
}

/// Complement: strictly lower triangular, ordered by decreasing distance to
/// the diagonal then by row (for n = 3: E31, E21, E32). Subalgebra: the
/// diagonal, then the strictly upper part by distance and decreasing row.
pub fn gl_borel(n: usize) -> Result<SplitLattice, LatticeError> {
    let mut lower: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    lower.sort_by_key(|&(i, j)| (std::cmp::Reverse(i - j), i));
    let mut upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    upper.sort_by_key(|&(i, j)| (j - i, std::cmp::Reverse(i)));
    let m1 = lower.len();
    let mut order = lower;
    order.extend((0..n).map(|i| (i, i)));
    order.extend(upper);
    let (lat, real) = build_gl(n, order);
    finish(lat, real, m1)
}

/// Complement: the block `i ≤ t < j`, row-major; subalgebra: the rest.
pub fn gl_parabolic(n: usize, t: usize) -> Result<SplitLattice, LatticeError> {
    let all: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let in_block = |&(i, j): &(usize, usize)| i < t && j >= t;
    let mut order: Vec<(usize, usize)> = all.iter().copied().filter(in_block).collect();
    let m1 = order.len();
    order.extend(all.iter().copied().filter(|x| !in_block(x)));
    let (lat, real) = build_gl(n, order);
    finish(lat, real, m1)
}

/// Heisenberg lattice with `[X, Y] = Z`: complement `(Y, Z)`, subalgebra the
/// line of X. The split has infinite relative index, so only the subalgebra
/// condition is checked.
pub fn heisenberg() -> SplitLattice {
    let labels = vec!["Y".to_string(), "Z".to_string(), "X".to_string()];
    let mats = vec![elementary(3, 1, 2), elementary(3, 0, 2), elementary(3, 0, 1)];
    let (lat, real) = from_matrices(labels, mats);
    SplitLattice::with_subalgebra(lat, 2)
        .expect("Heisenberg split is a subalgebra")
        .with_realization(real)
}

/// 3×3 matrices over `Z[δ]`, `δ² = D`, stored as `(X, Y)` for `X + δY`.
#[derive(Clone)]
struct DeltaMatrix {
    x: IntMatrix,
    y: IntMatrix,
}

impl DeltaMatrix {
    fn zero() -> Self {
        Self {
            x: vec![vec![0; 3]; 3],
            y: vec![vec![0; 3]; 3],
        }
    }

    fn mul(&self, o: &Self, dd: i64) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    r.x[i][j] += self.x[i][k] * o.x[k][j] + dd * self.y[i][k] * o.y[k][j];
                    r.y[i][j] += self.x[i][k] * o.y[k][j] + self.y[i][k] * o.x[k][j];
                }
            }
        }
        r
    }

    fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                r.x[i][j] -= o.x[i][j];
                r.y[i][j] -= o.y[i][j];
            }
        }
        r
    }

    fn flatten(&self) -> Vec<Rational> {
        self.x
            .iter()
            .flatten()
            .chain(self.y.iter().flatten())
            .map(|&v| Rational::from_integer(BigInt::from(v)))
            .collect()
    }

    /// Whether `σ(Z)^T W + W Z = 0`, W the antidiagonal matrix of ones.
    fn is_unitary_lie(&self) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                // (σ(Z)^T W)_{ij} = σ(Z)_{2−j, i}; (W Z)_{ij} = Z_{2−i, j}
                let ax = self.x[2 - j][i] + self.x[2 - i][j];
                let ay = -self.y[2 - j][i] + self.y[2 - i][j];
                if ax != 0 || ay != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds a 3×3 element from entries `(row, col, a, b)` meaning `a + bδ`.
fn delta_matrix(entries: &[(usize, usize, i64, i64)]) -> DeltaMatrix {
    let mut m = DeltaMatrix::zero();
    for &(i, j, a, b) in entries {
        m.x[i][j] += a;
        m.y[i][j] += b;
    }
    m
}

/// The Borel split of u_3: complement `A = δ(E21 + E32)`, `B = E21 − E32`,
/// `C = δE31`; subalgebra the upper-triangular part.
pub fn u3(nonresidue: i64) -> Result<SplitLattice, LatticeError> {
    let basis = vec![
        ("A", delta_matrix(&[(1, 0, 0, 1), (2, 1, 0, 1)])),
        ("B", delta_matrix(&[(1, 0, 1, 0), (2, 1, -1, 0)])),
        ("C", delta_matrix(&[(2, 0, 0, 1)])),
        ("H1", delta_matrix(&[(0, 0, 1, 0), (2, 2, -1, 0)])),
        ("H2", delta_matrix(&[(0, 0, 0, 1), (2, 2, 0, 1)])),
        ("H3", delta_matrix(&[(1, 1, 0, 1)])),
        ("H4", delta_matrix(&[(0, 1, 1, 0), (1, 2, -1, 0)])),
        ("H5", delta_matrix(&[(0, 1, 0, 1), (1, 2, 0, 1)])),
        ("H6", delta_matrix(&[(0, 2, 0, 1)])),
    ];
    for (name, m) in &basis {
        assert!(m.is_unitary_lie(), "{name} is not in u3");
    }
    let vecs: Vec<Vec<Rational>> = basis.iter().map(|(_, m)| m.flatten()).collect();
    let pinv = left_inverse(&vecs).expect("u3 basis is independent");
    let labels = basis.iter().map(|(n, _)| n.to_string()).collect();
    let lat = LieLattice::from_bracket(labels, |i, j| {
        let a = &basis[i].1;
        let b = &basis[j].1;
        let c = a.mul(b, nonresidue).sub(&b.mul(a, nonresidue)).flatten();
        pinv.iter()
            .map(|row| row.iter().zip(&c).map(|(x, y)| x * y).sum())
            .collect()
    });
    SplitLattice::new(lat, 3)
}

/// gl_{n+1}(Δ) with Δ the cyclic algebra over the period model of the
/// unramified extension. Basis: `e_i Π^j E_{kl}`; complement `Δ E_{1l}`,
/// `l ≥ 2`.
pub fn gl_division(n: usize, d: usize, inv: usize, p: u64) -> Result<SplitLattice, LatticeError> {
    let base = PeriodRing::new(p, d).map_err(|e| LatticeError::ParamError(e.to_string()))?;
    let alg = CyclicAlgebra::new(base, inv).map_err(|e| LatticeError::ParamError(e.to_string()))?;
    let dbasis = alg.basis();
    let size = n + 1;
    let positions: Vec<(usize, usize)> = {
        let mut comp: Vec<(usize, usize)> = (1..size).map(|l| (0, l)).collect();
        let rest = (0..size)
            .flat_map(|k| (0..size).map(move |l| (k, l)))
            .filter(|&(k, l)| !(k == 0 && l >= 1));
        comp.extend(rest);
        comp
    };
    let dd = d * d;
    // global basis index = position index * d² + Δ-basis index
    let elems: Vec<(usize, usize, usize)> = positions
        .iter()
        .flat_map(|&(k, l)| (0..dd).map(move |b| (k, l, b)))
        .collect();
    let pos_index = |k: usize, l: usize| positions.iter().position(|&x| x == (k, l)).unwrap();
    let labels = elems
        .iter()
        .map(|&(k, l, b)| format!("e{}P{}E{}{}", b % d, b / d, k + 1, l + 1))
        .collect();
    let nn = elems.len();
    let lat = LieLattice::from_bracket(labels, |i, j| {
        let (k1, l1, b1) = elems[i];
        let (k2, l2, b2) = elems[j];
        let mut out = vec![Rational::zero(); nn];
        let mut add = |k: usize, l: usize, x: &crate::arith::CyclicAlgebraElem<Vec<i64>>, sign: i64| {
            let base_idx = pos_index(k, l) * dd;
            for (b, c) in alg.coordinates(x).into_iter().enumerate() {
                if c != 0 {
                    out[base_idx + b] += Rational::from_integer(BigInt::from(sign * c));
                }
            }
        };
        // [a E_{k1 l1}, b E_{k2 l2}] = δ_{l1 k2} ab E_{k1 l2} − δ_{l2 k1} ba E_{k2 l1}
        if l1 == k2 {
            add(k1, l2, &alg.mul(&dbasis[b1], &dbasis[b2]), 1);
        }
        if l2 == k1 {
            add(k2, l1, &alg.mul(&dbasis[b2], &dbasis[b1]), -1);
        }
        out
    });
    SplitLattice::new(lat, n * dd)
}
