//! Subcommand implementations. Each returns a JSON report (and a CSV table
//! where one makes sense) plus a pass flag.

use std::path::Path;

use num_traits::Zero;
use repzeta::closed_form::BiRational;
use repzeta::cone::{self, XiError, XiSpec};
use repzeta::orbit::{bruteforce_zeta, coadjoint_orbits, induced_multiplicity, OrbitError, ZetaJob, DEFAULT_BUDGET};
use repzeta::trees::{
    self, big_json, orbit_count_layer, BoundarySeries, ProjectiveTree, ProjectiveTreeSpec, TreeError, TreeSpec,
    DEFAULT_ENUMERATION_BUDGET,
};
use repzeta::Rational;
use serde_json::{json, Value};

use crate::family::FamilyArgs;
use crate::{Failure, Global, GridArgs, Outcome, ProjectiveArgs};

fn rational_json(x: &Rational) -> Value {
    if x.is_integer() {
        match i64::try_from(x.to_integer()) {
            Ok(v) => json!(v),
            Err(_) => json!(x.to_string()),
        }
    } else {
        json!(x.to_string())
    }
}

fn orbit_failure(e: OrbitError) -> Failure {
    match e {
        OrbitError::OverflowGuard { .. } => Failure::Usage(format!("{e}; pass --allow-large to proceed")),
        OrbitError::Lattice(l) => Failure::lattice(l),
        other => Failure::math(other),
    }
}

fn xi_failure(e: XiError) -> Failure {
    match e {
        XiError::Format(_) => Failure::Usage(e.to_string()),
        other => Failure::math(other),
    }
}

fn tree_failure(e: TreeError) -> Failure {
    match e {
        TreeError::EnumerationBudget { .. } => Failure::Usage(format!("{e}; pass --allow-large to proceed")),
        TreeError::Param(_) | TreeError::NotPrimitive | TreeError::NotEquidistant(..) => Failure::Usage(e.to_string()),
        other => Failure::math(other),
    }
}

fn job(a: &GridArgs, g: &Global) -> Result<ZetaJob, Failure> {
    let slat = a.family.lattice(a.p)?;
    let budget = if g.allow_large { u64::MAX } else { DEFAULT_BUDGET };
    Ok(ZetaJob::new(slat, a.p, a.family.r, a.level).with_budget(budget))
}

pub fn zeta_oracle(a: &GridArgs, g: &Global) -> Result<Outcome, Failure> {
    let tally = bruteforce_zeta(&job(a, g)?).map_err(orbit_failure)?;
    let mut csv = String::from("e,coefficient\n");
    for (e, c) in tally.coefficients() {
        csv.push_str(&format!("{e},{c}\n"));
    }
    Ok(Outcome {
        json: tally.to_json(),
        csv: Some(csv),
        pass: true,
    })
}

pub fn zeta_closed(f: &FamilyArgs, q: Option<u64>, e_max: u32) -> Result<Outcome, Failure> {
    if let Some(q) = q {
        if let Some(series) = f.gelfand(q)? {
            let dims: Vec<Value> = series
                .dimensions(e_max as usize + 1)
                .iter()
                .map(|d| big_json(&d.to_biguint().expect("dimensions are positive")))
                .collect();
            return Ok(Outcome::pass(json!({ "q": q, "dimensions": dims }).to_string()));
        }
    }
    let z = f.closed()?;
    let mut report = json!({ "zeta": z.report() });
    let mut csv = None;
    if let Some(q) = q {
        let coeffs = z.expand(q, e_max).map_err(Failure::math)?;
        let mut table = String::from("e,coefficient\n");
        for (e, c) in coeffs.iter().enumerate() {
            table.push_str(&format!("{e},{c}\n"));
        }
        csv = Some(table);
        report["q"] = json!(q);
        report["expansion"] = coeffs.iter().map(rational_json).collect();
    }
    Ok(Outcome {
        json: report.to_string(),
        csv,
        pass: true,
    })
}

pub fn zeta_compare(a: &GridArgs, g: &Global) -> Result<Outcome, Failure> {
    let closed = a.family.closed()?;
    let tally = bruteforce_zeta(&job(a, g)?).map_err(orbit_failure)?;
    if tally.exact_up_to < 0 {
        return Err(Failure::Math("no coefficient is certified at this level".into()));
    }
    let expect = closed.expand(a.p, tally.exact_up_to as u32).map_err(Failure::math)?;
    let mut rows = Vec::new();
    let mut csv = String::from("e,oracle,closed,match\n");
    let mut pass = true;
    for (e, c) in expect.iter().enumerate() {
        let got = tally.raw_coefficient(e as u32);
        let ok = got == *c;
        pass &= ok;
        csv.push_str(&format!("{e},{got},{c},{ok}\n"));
        rows.push(json!([e, rational_json(&got), rational_json(c), ok]));
    }
    let report = json!({
        "q": a.p,
        "r": a.family.r,
        "L": a.level,
        "exact_up_to": tally.exact_up_to,
        "pass": pass,
        "coefficients": rows,
    });
    Ok(Outcome {
        json: report.to_string(),
        csv: Some(csv),
        pass,
    })
}

pub fn feq(f: &FamilyArgs, exponent: Option<i32>) -> Result<Outcome, Failure> {
    let z = f.closed()?;
    let exponent = match exponent {
        Some(e) => e,
        None => f.m_plus_1()? as i32 * (1 - 2 * f.r as i32),
    };
    let (pass, residual) = match repzeta::closed_form::functional_equation_check(&z, exponent) {
        Ok(()) => (true, Value::Null),
        Err(res) => (false, json!(res.to_string())),
    };
    Ok(Outcome {
        json: json!({ "exponent": exponent, "pass": pass, "residual": residual }).to_string(),
        csv: None,
        pass,
    })
}

pub fn vanish(f: &FamilyArgs, q: Option<u64>) -> Result<Outcome, Failure> {
    let q = q.ok_or_else(|| Failure::Usage("--q (or --p) is required".into()))?;
    let value = match f.gelfand(q)? {
        Some(series) => series.at_minus_one(),
        None => f.closed()?.at_minus_one(q).map_err(Failure::math)?,
    };
    let pass = value.is_zero();
    Ok(Outcome {
        json: json!({ "q": q, "value": rational_json(&value), "pass": pass }).to_string(),
        csv: None,
        pass,
    })
}

pub fn abscissa(f: &FamilyArgs) -> Result<Outcome, Failure> {
    let value = match f.gelfand(2)? {
        Some(series) => rational_json(&series.abscissa()),
        None => f.closed()?.abscissa().map_or(json!("-inf"), |a| rational_json(&a)),
    };
    Ok(Outcome::pass(json!({ "abscissa": value }).to_string()))
}

fn load_spec(path: &Path) -> Result<XiSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    XiSpec::from_json(&text).map_err(xi_failure)
}

pub fn xi_truncate(path: &Path, k_max: i64, e_max: i64) -> Result<Outcome, Failure> {
    let table = cone::xi_truncate(&load_spec(path)?, k_max, e_max).map_err(xi_failure)?;
    let mut csv = String::from("k,e,count\n");
    let mut rows = Vec::new();
    for (&(k, e), &c) in &table {
        csv.push_str(&format!("{k},{e},{c}\n"));
        rows.push(json!([k, e, c]));
    }
    Ok(Outcome {
        json: json!({ "coefficients": rows }).to_string(),
        csv: Some(csv),
        pass: true,
    })
}

pub fn xi_rational(path: &Path) -> Result<Outcome, Failure> {
    let z: BiRational = cone::xi_rational(&load_spec(path)?).map_err(xi_failure)?;
    Ok(Outcome::pass(z.to_json()))
}

pub fn xi_inversion(path: &Path) -> Result<Outcome, Failure> {
    let spec = load_spec(path)?;
    let pass = cone::inversion_check(&spec).map_err(xi_failure)?;
    let sign = if spec.u % 2 == 1 { 1 } else { -1 };
    Ok(Outcome {
        json: json!({ "sign": sign, "pass": pass }).to_string(),
        csv: None,
        pass,
    })
}

pub fn xi_compare(path: &Path, k_lo: i64, width: i64) -> Result<Outcome, Failure> {
    if width <= 0 {
        return Err(Failure::Usage("--width must be positive".into()));
    }
    let bad = cone::compare_window(&load_spec(path)?, k_lo, width).map_err(xi_failure)?;
    let pass = bad.is_empty();
    let rows: Vec<Value> = bad.iter().map(|&((k, e), a, b)| json!([k, e, a, b])).collect();
    Ok(Outcome {
        json: json!({ "k_lo": k_lo, "width": width, "pass": pass, "mismatches": rows }).to_string(),
        csv: None,
        pass,
    })
}

fn tree_spec(branching: Vec<u64>) -> Result<TreeSpec, Failure> {
    TreeSpec::new(branching).map_err(tree_failure)
}

pub fn tree_zeta(branching: Vec<u64>) -> Result<Outcome, Failure> {
    let spec = tree_spec(branching)?;
    let list = trees::tree_zeta(&spec);
    let mut csv = String::from("dimension,multiplicity\n");
    for (d, m) in &list {
        csv.push_str(&format!("{d},{m}\n"));
    }
    let rows: Vec<Value> = list.iter().map(|(d, m)| json!([big_json(d), m])).collect();
    Ok(Outcome {
        json: json!({ "branching": spec.branching, "dimensions": rows }).to_string(),
        csv: Some(csv),
        pass: true,
    })
}

pub fn tree_orbits(branching: Vec<u64>, level: Option<usize>) -> Result<Outcome, Failure> {
    let spec = tree_spec(branching)?;
    let levels: Vec<usize> = match level {
        Some(n) => vec![n],
        None => (0..=spec.depth()).collect(),
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for n in levels {
        let c = orbit_count_layer(&spec, n).map_err(tree_failure)?;
        pass &= c == n + 1;
        rows.push(json!([n, c]));
    }
    Ok(Outcome {
        json: json!({ "branching": spec.branching, "orbits": rows, "pass": pass }).to_string(),
        csv: None,
        pass,
    })
}

fn projective(t: &ProjectiveArgs) -> Result<ProjectiveTree, Failure> {
    ProjectiveTree::new(ProjectiveTreeSpec {
        p: t.p,
        n: t.n,
        depth: t.depth,
        d: t.d,
        inv: t.inv,
    })
    .map_err(tree_failure)
}

pub fn tree_layers(t: &ProjectiveArgs, g: &Global) -> Result<Outcome, Failure> {
    let tree = projective(t)?;
    let budget = if g.allow_large { u128::MAX } else { DEFAULT_ENUMERATION_BUDGET };
    let layers = tree.layers(budget).map_err(tree_failure)?;
    let pass = layers.matches_closed();
    let mut report = serde_json::to_value(&layers).expect("serialisable");
    report["pass"] = json!(pass);
    Ok(Outcome {
        json: report.to_string(),
        csv: None,
        pass,
    })
}

fn parse_point(tree: &ProjectiveTree, text: &str) -> Result<Vec<repzeta::arith::CyclicAlgebraElem<repzeta::arith::GaloisRingElem>>, Failure> {
    let bad = || Failure::Usage(format!("cannot parse point {text:?}: expected a JSON list"));
    let coords: Vec<Value> = serde_json::from_str(text).map_err(|_| bad())?;
    coords
        .iter()
        .map(|c| {
            let ints: Vec<i64> = match c {
                Value::Number(n) => vec![n.as_i64().ok_or_else(bad)?],
                Value::Array(a) => a.iter().map(|x| x.as_i64().ok_or_else(bad)).collect::<Result<_, _>>()?,
                _ => return Err(bad()),
            };
            tree.element(&ints).map_err(tree_failure)
        })
        .collect()
}

pub fn tree_witness(t: &ProjectiveArgs, x: &str, y: &str) -> Result<Outcome, Failure> {
    let tree = projective(t)?;
    let (xv, yv) = (parse_point(&tree, x)?, parse_point(&tree, y)?);
    let w = tree.witness(&xv, &yv, t.depth).map_err(tree_failure)?;
    let entry = |c| {
        let v = tree.coordinates(c);
        if v.len() == 1 {
            json!(v[0])
        } else {
            json!(v)
        }
    };
    let matrix: Vec<Vec<Value>> = w.matrix.iter().map(|row| row.iter().map(entry).collect()).collect();
    Ok(Outcome::pass(json!({ "level": w.level, "matrix": matrix }).to_string()))
}

pub fn tree_boundary(prefix: Vec<u64>, tail: u64, count: usize) -> Result<Outcome, Failure> {
    let series = BoundarySeries::new(prefix, tail).map_err(tree_failure)?;
    let dims: Vec<Value> = series.dimensions(count).iter().map(big_json).collect();
    Ok(Outcome::pass(
        json!({ "dimensions": dims, "abscissa": rational_json(&series.abscissa()) }).to_string(),
    ))
}

pub fn orbits(a: &GridArgs, g: &Global) -> Result<Outcome, Failure> {
    let data = coadjoint_orbits(&job(a, g)?).map_err(orbit_failure)?;
    Ok(Outcome::pass(serde_json::to_string(&data).expect("serialisable")))
}

pub fn mult(a: &GridArgs, omega: &[u64], eta: &[u64], g: &Global) -> Result<Outcome, Failure> {
    let m = induced_multiplicity(omega, eta, &job(a, g)?).map_err(|e| match e {
        OrbitError::Param(msg) => Failure::Usage(msg),
        other => orbit_failure(other),
    })?;
    Ok(Outcome::pass(json!({ "multiplicity": m }).to_string()))
}
