use std::collections::BTreeMap;

use num_bigint::BigInt;
use repzeta::arith::{rat, Valuation};
use repzeta::closed_form::{
    division, enumerate_xi, gl3_borel, parabolic_index_formula, parabolic_orbit_formula, max_parabolic, u3_borel, Xi,
};
use repzeta::lattice::gl_parabolic;
use repzeta::pfaffian::GridIndexer;
use repzeta::smith::smith_valuations;
use repzeta::Rational;

/// Smith type of the `t × (n − t)` block `x'/p^L`.
fn smith_type(xs: &[u64], t: usize, cols: usize, p: u64, level: u32) -> Xi {
    let den = BigInt::from(p).pow(level);
    let m: Vec<Vec<Rational>> = (0..t)
        .map(|i| (0..cols).map(|j| Rational::new(BigInt::from(xs[i * cols + j]), den.clone())).collect())
        .collect();
    let mut counts: BTreeMap<i64, u32> = BTreeMap::new();
    for v in smith_valuations(&m, p).nu {
        if let Valuation::Finite(g) = v {
            if g < 0 {
                *counts.entry(g).or_insert(0) += 1;
            }
        }
    }
    Xi {
        u: counts.values().copied().collect(),
        gamma: counts.keys().copied().collect(),
    }
}

#[test]
fn parabolic_grid_matches_index_and_orbit_formulas() {
    let (p, level) = (3u64, 2u32);
    for (n, t) in [(2usize, 1usize), (3, 1), (4, 2)] {
        let slat = gl_parabolic(n, t).unwrap();
        let grid = GridIndexer::new(&slat, p, level).unwrap();
        let cols = n - t;
        let m1 = t * cols;
        let base = p.pow(level);
        let mut xs = vec![0u64; m1];
        let mut scratch = Vec::new();
        let mut sizes: BTreeMap<Xi, u64> = BTreeMap::new();
        for idx in 0..base.pow(m1 as u32) {
            let mut c = idx;
            for x in xs.iter_mut() {
                *x = c % base;
                c /= base;
            }
            let xi = smith_type(&xs, t, cols, p, level);
            let e = grid.index(&xs, &mut scratch) as i64;
            assert_eq!(e, parabolic_index_formula(n as u32, t as u32, &xi).unwrap(), "n = {n}, t = {t}, {xs:?}");
            *sizes.entry(xi).or_insert(0) += 1;
        }
        let labels = enumerate_xi(t as u32, level);
        assert_eq!(sizes.len(), labels.len());
        for xi in labels {
            let expect = parabolic_orbit_formula(n as u32, t as u32, &xi, p).unwrap();
            assert_eq!(rat(sizes[&xi]), expect, "n = {n}, t = {t}, {xi:?}");
        }
    }
}

#[test]
fn counts_are_non_negative_integers() {
    for q in [2u64, 3, 5, 7] {
        for z in [gl3_borel(1).unwrap(), u3_borel(2).unwrap(), max_parabolic(5, 2, 1).unwrap(), division(2, 3, 1).unwrap()] {
            assert!(z.expand_counts(q, 8).is_ok(), "q = {q}: {z}");
        }
    }
}

#[test]
fn division_symmetry_exponent() {
    // Z(1/q, 1/t) = q^{dn − 2rnd²} Z(q, t); for d = 1 this is (m + 1)(1 − 2r)
    for (n, d) in [(1i32, 1i32), (1, 2), (2, 2), (1, 3)] {
        for r in 1..=2 {
            let z = division(n as u32, d as u32, r as u32).unwrap();
            let e = d * n - 2 * r * n * d * d;
            assert!(repzeta::closed_form::functional_equation_check(&z, e).is_ok(), "n = {n}, d = {d}, r = {r}");
        }
    }
}

#[test]
fn constant_terms() {
    // the t^0 coefficient is q^{r(m+1)}
    for r in 1..=3u32 {
        assert_eq!(gl3_borel(r).unwrap().expand(3, 0).unwrap()[0], rat(3i64.pow(3 * r)));
        assert_eq!(max_parabolic(4, 2, r).unwrap().expand(2, 0).unwrap()[0], rat(2i64.pow(4 * r)));
    }
}
