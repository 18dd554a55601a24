//! Elementary divisors over the local ring Z_(p): exact rational and
//! modular (`Z/p^K`) valuation-pivot elimination.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Zero};
use serde::Serialize;

use crate::arith::{inv_mod, mul_mod, valuation, Valuation};

/// Sorted elementary-divisor valuations `ν_1 ≤ … ≤ ν_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationProfile {
    #[serde(serialize_with = "ser_nu")]
    pub nu: Vec<Valuation>,
}

fn ser_nu<S: serde::Serializer>(nu: &[Valuation], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(nu.len()))?;
    for v in nu {
        match v {
            Valuation::Finite(x) => seq.serialize_element(&Some(*x))?,
            Valuation::Infinite => seq.serialize_element(&None::<i64>)?,
        }
    }
    seq.end()
}

impl ValuationProfile {
    /// `Σ max(−ν_i, 0)`.
    pub fn negative_part(&self) -> i64 {
        self.nu
            .iter()
            .filter_map(|v| v.finite())
            .map(|v| (-v).max(0))
            .sum()
    }

    /// Whether the finite values pair up: `ν_{2j−1} = ν_{2j}`.
    pub fn is_paired(&self) -> bool {
        let finite: Vec<i64> = self.nu.iter().filter_map(|v| v.finite()).collect();
        finite.len() % 2 == 0 && finite.chunks(2).all(|c| c[0] == c[1])
    }
}

/// Elementary-divisor valuations of a rational matrix over Z_(p); the
/// profile has `min(rows, cols)` entries.
pub fn smith_valuations<T>(a: &[Vec<Ratio<T>>], p: u64) -> ValuationProfile
where
    T: Clone + Integer + FromPrimitive,
{
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Ratio<T>>> = a.to_vec();
    let mut nu = Vec::with_capacity(rows.min(cols));
    for step in 0..rows.min(cols) {
        // pivot: minimal valuation, ties row-major
        let mut best: Option<(Valuation, usize, usize)> = None;
        for i in step..rows {
            for j in step..cols {
                let v = valuation(&m[i][j], p);
                if v.is_infinite() {
                    continue;
                }
                if best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            nu.extend(std::iter::repeat(Valuation::Infinite).take(rows.min(cols) - step));
            break;
        };
        m.swap(step, pi);
        for row in m.iter_mut() {
            row.swap(step, pj);
        }
        let pivot = m[step][step].clone();
        for i in step + 1..rows {
            if m[i][step].is_zero() {
                continue;
            }
            let f = m[i][step].clone() / pivot.clone();
            for j in step..cols {
                if !m[step][j].is_zero() {
                    let sub = f.clone() * m[step][j].clone();
                    m[i][j] = m[i][j].clone() - sub;
                }
            }
        }
        // column operations only touch row `step` now
        for j in step + 1..cols {
            m[step][j] = Ratio::zero();
        }
        nu.push(v);
    }
    nu.sort();
    ValuationProfile { nu }
}

#[inline]
fn residue_valuation(a: u64, p: u64, k: u32) -> u32 {
    if a == 0 {
        return k;
    }
    let mut v = 0;
    let mut a = a;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

/// Elementary-divisor valuations of a matrix over `Z/p^k` (row-major,
/// `rows × cols`), destroying the input; `k` stands for "at least k".
pub fn smith_valuations_mod(
    m: &mut [u64],
    rows: usize,
    cols: usize,
    p: u64,
    k: u32,
    modulus: u64,
) -> Vec<u32> {
    let r = rows.min(cols);
    let mut out = Vec::with_capacity(r);
    for step in 0..r {
        let mut best = (k, usize::MAX, usize::MAX);
        'scan: for i in step..rows {
            for j in step..cols {
                let a = m[i * cols + j];
                if a == 0 {
                    continue;
                }
                let v = residue_valuation(a, p, k);
                if v < best.0 {
                    best = (v, i, j);
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let (v, pi, pj) = best;
        if pi == usize::MAX {
            out.extend(std::iter::repeat(k).take(r - step));
            break;
        }
        if pi != step {
            for j in 0..cols {
                m.swap(step * cols + j, pi * cols + j);
            }
        }
        if pj != step {
            for i in 0..rows {
                m.swap(i * cols + step, i * cols + pj);
            }
        }
        let pv = p.pow(v);
        let unit = m[step * cols + step] / pv;
        let uinv = inv_mod(unit % modulus, modulus).expect("unit part is invertible");
        for i in step + 1..rows {
            let a = m[i * cols + step];
            if a == 0 {
                continue;
            }
            // a = p^w u_i with w ≥ v; factor = p^{w−v} u_i u^{-1}
            let f = mul_mod(a / pv, uinv, modulus);
            for j in step..cols {
                let b = m[step * cols + j];
                if b != 0 {
                    let sub = mul_mod(f, b, modulus);
                    let x = &mut m[i * cols + j];
                    *x = (*x + modulus - sub) % modulus;
                }
            }
        }
        for j in step + 1..cols {
            m[step * cols + j] = 0;
        }
        out.push(v);
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_frac};
    use crate::Rational;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let id: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| rat(if i == j { 1 } else { 0 })).collect())
            .collect();
        assert!(smith_valuations(&id, 3).nu.iter().all(|v| *v == Valuation::Finite(0)));
        let d = vec![vec![rat_frac(1, 3), rat(0)], vec![rat(0), rat(3)]];
        assert_eq!(
            smith_valuations(&d, 3).nu,
            vec![Valuation::Finite(-1), Valuation::Finite(1)]
        );
        let z = vec![vec![rat(0), rat(0)], vec![rat(0), rat(0)]];
        assert_eq!(smith_valuations(&z, 3).nu, vec![Valuation::Infinite; 2]);
        // [[2, 4], [6, 8]] over Z_(2): divisors 2 and 8 (det = −8)
        let a = vec![vec![rat(2), rat(4)], vec![rat(6), rat(8)]];
        assert_eq!(
            smith_valuations(&a, 2).nu,
            vec![Valuation::Finite(1), Valuation::Finite(2)]
        );
    }

    proptest! {
        #[test]
        fn modular_agrees_with_exact(entries in prop::collection::vec(0u64..81, 16)) {
            let (p, k, modulus) = (3u64, 4u32, 81u64);
            let exact: Vec<Vec<Rational>> = (0..4)
                .map(|i| (0..4).map(|j| rat(entries[i * 4 + j] as i64)).collect())
                .collect();
            let mut m = entries.clone();
            let modular = smith_valuations_mod(&mut m, 4, 4, p, k, modulus);
            let ex: Vec<u32> = smith_valuations(&exact, p)
                .nu
                .iter()
                .map(|v| match v {
                    Valuation::Finite(x) => (*x as u32).min(k),
                    Valuation::Infinite => k,
                })
                .collect();
            prop_assert_eq!(modular, ex);
        }

        #[test]
        fn determinant_valuation_is_sum(entries in prop::collection::vec(-20i64..20, 9)) {
            let a: Vec<Vec<Rational>> = (0..3)
                .map(|i| (0..3).map(|j| rat(entries[i * 3 + j])).collect())
                .collect();
            let e = &entries;
            let det = e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6])
                + e[2] * (e[3] * e[7] - e[4] * e[6]);
            let prof = smith_valuations(&a, 2);
            match crate::arith::valuation_int(&det, 2) {
                Valuation::Infinite => prop_assert!(prof.nu.iter().any(|v| v.is_infinite())),
                Valuation::Finite(d) => prop_assert_eq!(prof.nu.iter().map(|v| v.finite().unwrap()).sum::<i64>(), d),
            }
        }
    }
}
