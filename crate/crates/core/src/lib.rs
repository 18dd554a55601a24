//! Exact computation and cross-verification of representation zeta
//! functions of induced representations of compact p-adic Lie groups.

pub mod arith;
pub mod closed_form;
pub mod cone;
pub mod lattice;
pub mod linalg;
pub mod orbit;
pub mod pfaffian;
pub mod poly;
pub mod smith;
pub mod trees;

use num_bigint::BigInt;
use num_rational::Ratio;

/// Exact rationals used throughout.
pub type Rational = Ratio<BigInt>;
