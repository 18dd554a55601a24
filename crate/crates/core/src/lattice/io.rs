//! JSON description of a custom split lattice.
//!
//! ```json
//! {"n": 3, "m_plus_1": 2, "labels": ["Y", "Z", "X"],
//!  "constants": [[3, 1, 2, 1, 1]]}
//! ```
//!
//! Each constant is `[i, j, k, numerator, denominator]` with 1-based indices,
//! meaning `c_{ijk} = numerator / denominator`; the denominator may be
//! omitted. Entries `c_{jik}` missing from the file are filled in by
//! antisymmetry.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{LatticeError, LieLattice, SplitLattice};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomLattice {
    pub n: usize,
    pub m_plus_1: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub constants: Vec<Vec<i64>>,
}

impl CustomLattice {
    pub fn to_lattice(&self) -> Result<LieLattice, LatticeError> {
        let n = self.n;
        let fmt = |s: String| LatticeError::Format(s);
        let labels = match &self.labels {
            Some(l) if l.len() != n => return Err(fmt(format!("{} labels for rank {n}", l.len()))),
            Some(l) => l.clone(),
            None => (1..=n).map(|i| format!("Y{i}")).collect(),
        };
        let mut given: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for entry in &self.constants {
            let (num, den) = match entry.len() {
                4 => (entry[3], 1),
                5 => (entry[3], entry[4]),
                l => return Err(fmt(format!("constant entry has {l} fields, expected 4 or 5"))),
            };
            if den == 0 {
                return Err(fmt("zero denominator".into()));
            }
            let idx: Vec<usize> = entry[..3]
                .iter()
                .map(|&x| {
                    if x < 1 || x as usize > n {
                        Err(fmt(format!("index {x} out of range 1..={n}")))
                    } else {
                        Ok(x as usize - 1)
                    }
                })
                .collect::<Result<_, _>>()?;
            let key = (idx[0], idx[1], idx[2]);
            let value = Rational::new(BigInt::from(num), BigInt::from(den));
            if given.insert(key, value).is_some() {
                return Err(fmt(format!("duplicate constant ({}, {}, {})", entry[0], entry[1], entry[2])));
            }
        }
        let mut c = vec![Rational::zero(); n * n * n];
        for (&(i, j, k), v) in &given {
            c[(i * n + j) * n + k] = v.clone();
            if !given.contains_key(&(j, i, k)) {
                c[(j * n + i) * n + k] = -v;
            }
        }
        Ok(LieLattice::new(labels, c))
    }

    /// Builds the split, running validation and the relative-FAb check.
    pub fn to_split(&self) -> Result<SplitLattice, LatticeError> {
        SplitLattice::new(self.to_lattice()?, self.m_plus_1)
    }
}

pub fn parse_custom_lattice(json: &str) -> Result<SplitLattice, LatticeError> {
    let spec: CustomLattice = serde_json::from_str(json).map_err(|e| LatticeError::Format(e.to_string()))?;
    spec.to_split()
}

pub fn load_custom_lattice(path: &Path) -> Result<SplitLattice, LatticeError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LatticeError::Format(format!("{}: {e}", path.display())))?;
    parse_custom_lattice(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_from_json_is_rejected_as_non_fab() {
        let json = r#"{"n": 3, "m_plus_1": 2, "constants": [[3, 1, 2, 1, 1]]}"#;
        assert!(matches!(
            parse_custom_lattice(json),
            Err(LatticeError::RelativeFAbViolation { .. })
        ));
    }

    #[test]
    fn sl2_from_json() {
        // e, f, h: [e, f] = h, [h, e] = 2e, [h, f] = −2f; complement (e, f)
        let json = r#"{"n": 3, "m_plus_1": 2, "labels": ["e", "f", "h"],
            "constants": [[1, 2, 3, 1], [3, 1, 1, 2], [3, 2, 2, -2]]}"#;
        let s = parse_custom_lattice(json).unwrap();
        assert_eq!(s.rank(), 3);
        assert_eq!(s.lattice().constant(1, 0, 2), &Rational::from_integer((-1).into()));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(
            parse_custom_lattice(r#"{"n": 2, "m_plus_1": 1, "constants": [[1, 3, 1, 1]]}"#),
            Err(LatticeError::Format(_))
        ));
        assert!(matches!(
            parse_custom_lattice(r#"{"n": 2, "m_plus_1": 1, "constants": [[1, 2, 1, 1], [2, 1, 1, 1]]}"#),
            Err(LatticeError::AntisymmetryViolation { .. })
        ));
    }
}
