//! Exact rational linear algebra over Q.

use num_traits::{One, Zero};

use crate::Rational;

/// Row-reduced echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let sub = &f * &m[r][j];
                        m[i][j] -= sub;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of the row space.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Coordinates of `target` in the basis `basis` (vectors of equal length),
/// or `None` if it is not in the span.
pub fn solve_in_span(basis: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = basis.len();
    let n = target.len();
    // augmented system: columns are basis vectors
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][k].clone();
    }
    Some(x)
}

/// A matrix `P` with `P · b_i = e_i` for linearly independent `b_i`.
pub fn left_inverse(basis: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let k = basis.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let n = basis[0].len();
    let mut m = basis.to_vec();
    let pivots = rref(&mut m);
    if pivots.len() < k {
        return None;
    }
    // On the pivot coordinates the basis restricts to an invertible k×k block.
    let sub: Vec<Vec<Rational>> = basis
        .iter()
        .map(|b| pivots.iter().map(|&c| b[c].clone()).collect())
        .collect();
    let inv = invert(&sub)?;
    let mut p = vec![vec![Rational::zero(); n]; k];
    for i in 0..k {
        for (j, &c) in pivots.iter().enumerate() {
            p[i][c] = inv[j][i].clone();
        }
    }
    Some(p)
}

/// Basis of the right null space `{x : M x = 0}`.
pub fn kernel(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); cols];
            x[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[r][free].clone();
            }
            x
        })
        .collect()
}

/// Inverse of a square rational matrix.
pub fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Rational::one() } else { Rational::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn span_and_inverse() {
        let b = vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(1)]];
        assert_eq!(rank(&b), 2);
        let x = solve_in_span(&b, &[rat(2), rat(5), rat(3)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(3)]);
        assert!(solve_in_span(&b, &[rat(1), rat(0), rat(0)]).is_none());
        let k = kernel(&b, 3);
        assert_eq!(k, vec![vec![rat(1), rat(-1), rat(1)]]);
        let p = left_inverse(&b).unwrap();
        for (i, bi) in b.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                let dot: Rational = pj.iter().zip(bi).map(|(a, c)| a * c).sum();
                assert_eq!(dot, if i == j { rat(1) } else { rat(0) });
            }
        }
    }
}
