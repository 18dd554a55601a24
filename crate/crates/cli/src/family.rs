//! Resolution of `--family`/`--lattice` flags to lattices and closed forms.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use repzeta::closed_form::{division, gl3_borel, max_parabolic, u3_borel, BiRational, GelfandSeries};
use repzeta::lattice::{
    build_family, default_nonresidue, heisenberg, load_custom_lattice, Family, FamilyParams, SplitLattice,
};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    #[value(name = "gl3_borel")]
    Gl3Borel,
    #[value(name = "gl_borel")]
    GlBorel,
    #[value(name = "u3_borel", alias = "u3")]
    U3Borel,
    #[value(name = "max_parabolic", alias = "gl_parabolic")]
    MaxParabolic,
    #[value(name = "division", alias = "gl_division")]
    Division,
    #[value(name = "gelfand_gl")]
    GelfandGl,
    #[value(name = "heisenberg")]
    Heisenberg,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Catalogue family
    #[arg(long, value_enum, conflicts_with = "lattice")]
    pub family: Option<FamilyName>,
    /// Custom lattice JSON file
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Hasse invariant numerator of the division algebra
    #[arg(long, default_value_t = 1)]
    pub inv: usize,
    /// Non-square defining the unramified quadratic extension for u3
    #[arg(long, allow_negative_numbers = true)]
    pub nonresidue: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for {family}")))
}

impl FamilyArgs {
    fn name(&self) -> Result<FamilyName, Failure> {
        self.family
            .ok_or_else(|| Failure::Usage("one of --family or --lattice is required".into()))
    }

    /// Lattice at level 0 for the prime `p`.
    pub fn lattice(&self, p: u64) -> Result<SplitLattice, Failure> {
        if let Some(path) = &self.lattice {
            return load_custom_lattice(path).map_err(Failure::lattice);
        }
        let family = match self.name()? {
            FamilyName::Gl3Borel => Family::GlBorel { n: 3 },
            FamilyName::GlBorel => Family::GlBorel {
                n: need(self.n, "n", "gl_borel")?,
            },
            FamilyName::U3Borel => Family::U3 {
                nonresidue: match self.nonresidue {
                    Some(a) => a,
                    None => default_nonresidue(p).map_err(Failure::lattice)?,
                },
            },
            FamilyName::MaxParabolic => Family::GlParabolic {
                n: need(self.n, "n", "max_parabolic")?,
                t: need(self.t, "t", "max_parabolic")?,
            },
            FamilyName::Division => Family::GlDivision {
                n: need(self.n, "n", "division")?,
                d: need(self.d, "d", "division")?,
                inv: self.inv,
            },
            FamilyName::Heisenberg => return Ok(heisenberg()),
            FamilyName::GelfandGl => {
                return Err(Failure::Usage("gelfand_gl has no Lie lattice; use the closed form".into()))
            }
        };
        build_family(&FamilyParams { family, p, r: self.r }).map_err(Failure::lattice)
    }

    /// Closed-form zeta function.
    pub fn closed(&self) -> Result<BiRational, Failure> {
        if self.lattice.is_some() {
            return Err(Failure::Usage("custom lattices have no closed form".into()));
        }
        let r = self.r;
        let res = match self.name()? {
            FamilyName::Gl3Borel => gl3_borel(r),
            FamilyName::GlBorel => match need(self.n, "n", "gl_borel")? {
                3 => gl3_borel(r),
                2 => max_parabolic(2, 1, r),
                n => return Err(Failure::Usage(format!("no closed form for gl_borel with n = {n}"))),
            },
            FamilyName::U3Borel => u3_borel(r),
            FamilyName::MaxParabolic => max_parabolic(
                need(self.n, "n", "max_parabolic")? as u32,
                need(self.t, "t", "max_parabolic")? as u32,
                r,
            ),
            FamilyName::Division => division(
                need(self.n, "n", "division")? as u32,
                need(self.d, "d", "division")? as u32,
                r,
            ),
            FamilyName::GelfandGl => {
                return Err(Failure::Usage(
                    "gelfand_gl is not a rational function in q^{-s}; see `tree` and `zeta closed --q`".into(),
                ))
            }
            FamilyName::Heisenberg => return Err(Failure::Usage("heisenberg has no catalogue closed form".into())),
        };
        res.map_err(Failure::math)
    }

    pub fn gelfand(&self, q: u64) -> Result<Option<GelfandSeries>, Failure> {
        if self.family != Some(FamilyName::GelfandGl) {
            return Ok(None);
        }
        let n = need(self.n, "n", "gelfand_gl")? as u32;
        let d = self.d.unwrap_or(1) as u32;
        GelfandSeries::new(q, n, d).map(Some).map_err(Failure::math)
    }

    /// Rank of the complement, `m + 1`.
    pub fn m_plus_1(&self) -> Result<usize, Failure> {
        if let Some(path) = &self.lattice {
            return Ok(load_custom_lattice(path).map_err(Failure::lattice)?.m_plus_1());
        }
        Ok(match self.name()? {
            FamilyName::Gl3Borel | FamilyName::U3Borel => 3,
            FamilyName::GlBorel => {
                let n = need(self.n, "n", "gl_borel")?;
                n * n.saturating_sub(1) / 2
            }
            FamilyName::MaxParabolic => {
                let (n, t) = (need(self.n, "n", "max_parabolic")?, need(self.t, "t", "max_parabolic")?);
                t * n.saturating_sub(t)
            }
            FamilyName::Division => need(self.n, "n", "division")? * need(self.d, "d", "division")?.pow(2),
            FamilyName::Heisenberg => 2,
            FamilyName::GelfandGl => {
                return Err(Failure::Usage("gelfand_gl has no Lie lattice".into()))
            }
        })
    }
}
