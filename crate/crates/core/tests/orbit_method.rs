use std::collections::BTreeMap;

use repzeta::lattice::{gl_borel, heisenberg, SplitLattice};
use repzeta::orbit::{coadjoint_orbits, grid_tally, induced_multiplicity, ZetaJob, DEFAULT_BUDGET};

fn tally_counts(slat: &SplitLattice, level: u32) -> BTreeMap<u32, u128> {
    let t = grid_tally(slat, 3, 1, level, DEFAULT_BUDGET).unwrap();
    t.point_counts
        .keys()
        .map(|&e| {
            let c = t.raw_coefficient(e);
            assert!(c.is_integer());
            (e, c.to_integer().try_into().unwrap())
        })
        .collect()
}

fn check_lattice(slat: SplitLattice) {
    let job = ZetaJob::new(slat.clone(), 3, 1, 2);
    let data = coadjoint_orbits(&job).unwrap();
    let total: u64 = data.orbits.iter().map(|o| o.size).sum();
    assert_eq!(total, 9u64.pow(slat.rank() as u32));
    for o in &data.orbits {
        assert_eq!(o.size, 3u64.pow(2 * o.index_exponent as u32));
    }
    // the level-L dual of g_r sees the level-(L − r) grid
    assert_eq!(data.induced_coefficients().unwrap(), tally_counts(&slat, 1));
}

#[test]
fn heisenberg_orbits() {
    check_lattice(heisenberg());
}

#[test]
fn gl2_orbits() {
    check_lattice(gl_borel(2).unwrap());
}

#[test]
fn multiplicity_agrees_with_annihilator_count() {
    let slat = gl_borel(2).unwrap();
    let job = ZetaJob::new(slat.clone(), 3, 1, 2);
    let data = coadjoint_orbits(&job).unwrap();
    let eta = vec![0; slat.rank() - slat.m_plus_1()];
    for o in data.orbits.iter().filter(|o| o.annihilator_points > 0).take(40) {
        let m = induced_multiplicity(&o.representative, &eta, &job).unwrap();
        assert_eq!(m * 3u64.pow(o.index_exponent as u32), o.annihilator_points);
    }
}
