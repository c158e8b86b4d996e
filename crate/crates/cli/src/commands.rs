//! Command implementations shared by the CLI and the corpus runner. Each
//! returns a human-readable text, a machine value for comparisons, and
//! whether the command's own check passed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use tropcalc_core::complex::examples;
use tropcalc_core::dolbeault::{self, CochainComplex};
use tropcalc_core::milnor;
use tropcalc_core::integrate::{
    boundary_integral, integrate, integrate_region, orientation_sign, stokes_tube_residual,
};
use tropcalc_core::rat::{fmt_rat, int};
use tropcalc_core::{
    build_tube, Error, PiecewiseForm, PolyComplex, Rat, Result, Superform, WeightedCycle,
};

use crate::schema::{
    ClassSpec, ComplexSpec, CycleSpec, FormSpec, Loaded, PolyhedronSpec, SymbolSpec, TubeSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub value: Value,
    pub ok: bool,
}

impl Report {
    fn passed(text: String, value: Value) -> Self {
        Report { text, value, ok: true }
    }
}

fn rat_value(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn check_balance(cycle: &CycleSpec) -> Result<Report> {
    let (_, z) = cycle.load()?;
    let report = z.check_balanced()?;
    let mut text = String::new();
    if report.is_balanced() {
        writeln!(text, "balanced").unwrap();
    } else {
        writeln!(text, "not balanced").unwrap();
    }
    for (face, sum) in &report.violations {
        writeln!(text, "  face {face}: weighted normal sum {sum:?} not in L(face)").unwrap();
    }
    if !report.boundary.is_empty() {
        writeln!(text, "  boundary faces: {:?}", report.boundary).unwrap();
    }
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|(f, s)| {
            let sum: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            json!({"face": f, "sum": sum})
        })
        .collect();
    Ok(Report {
        text,
        value: json!({"balanced": report.is_balanced(), "violations": violations}),
        ok: report.is_balanced(),
    })
}

pub fn degree(cycle: &CycleSpec) -> Result<Report> {
    let (_, z) = cycle.load()?;
    let d = z.degree()?;
    Ok(Report::passed(format!("degree {d}\n"), json!(d)))
}

pub fn integrate_cmd(form: &FormSpec, cycle: &CycleSpec) -> Result<Report> {
    let (loaded, z) = cycle.load()?;
    let alpha = form.load(Some(&loaded))?;
    let z = if alpha.carrier == z.support {
        z
    } else {
        z.refine(&alpha.carrier)?
    };
    let r = integrate(&alpha, &z)?;
    let mut text = String::new();
    for (cell, v) in &r.breakdown {
        writeln!(text, "  cell {cell}: {}", fmt_rat(v)).unwrap();
    }
    writeln!(text, "integral {}", fmt_rat(&r.value)).unwrap();
    Ok(Report::passed(text, rat_value(&r.value)))
}

/// Stokes residual `∫_σ d″α + ∫_∂σ α` on a polytope.
pub fn stokes_region(form: &FormSpec, region: &PolyhedronSpec) -> Result<Report> {
    let sigma = region.build(None)?;
    let complex = PolyComplex::face_lattice(std::slice::from_ref(&sigma))?;
    let own = Loaded {
        listed: complex.maximal_cells(),
        complex,
    };
    let alpha = form.load(Some(&own))?;
    let interior = integrate_region(&alpha.dsecond(), &sigma)?;
    let boundary = boundary_integral(&alpha, &sigma)?.value;
    let residual = &interior + &boundary;
    let text = format!(
        "∫ d″α = {}\n∫_∂ α = {}\nresidual {}\n",
        fmt_rat(&interior),
        fmt_rat(&boundary),
        fmt_rat(&residual)
    );
    Ok(Report {
        text,
        value: rat_value(&residual),
        ok: residual == int(0),
    })
}

/// Iterated tube residual on `V^I` (0-based `I`).
pub fn stokes_tube(form: &FormSpec, tube: &TubeSpec, set: &[usize]) -> Result<Report> {
    let (_, t) = tube.load()?;
    if set.iter().any(|&i| i >= t.q) {
        return Err(Error::BadRange(format!("index set {set:?} outside 1..{}", t.q)));
    }
    let complex = t.tube_complex();
    let own = Loaded {
        listed: complex.maximal_cells(),
        complex,
    };
    let alpha = form.load(Some(&own))?;
    let residual = stokes_tube_residual(&alpha, &t, set)?;
    Ok(Report {
        text: format!("residual {}\n", fmt_rat(&residual)),
        value: rat_value(&residual),
        ok: residual == int(0),
    })
}

pub fn hpq_table(x: &PolyComplex, ps: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    ps.iter().map(|&p| (p, CochainComplex::build(x, p).cohomology())).collect()
}

pub fn hpq(complex: &ComplexSpec, ps: Option<&[usize]>) -> Result<(Report, BTreeMap<usize, Vec<usize>>)> {
    let loaded = complex.load()?;
    let x = &loaded.complex;
    let all: Vec<usize> = (0..=x.ambient_dim).collect();
    let table = hpq_table(x, ps.unwrap_or(&all));
    let mut text = String::new();
    let mut ok = true;
    for (p, dims) in &table {
        let cc = CochainComplex::build(x, *p);
        let euler_c = cc.euler_characteristic();
        let euler_h: i64 = dims
            .iter()
            .enumerate()
            .map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        ok &= cc.is_complex() && euler_c == euler_h;
        writeln!(text, "p={p}: {dims:?}").unwrap();
    }
    let value = if table.len() == 1 {
        json!(table.values().next().unwrap())
    } else {
        json!(table.iter().map(|(p, d)| (p.to_string(), json!(d))).collect::<BTreeMap<_, _>>())
    };
    Ok((Report { text, value, ok }, table))
}

pub fn hpq_csv(table: &BTreeMap<usize, Vec<usize>>) -> String {
    let mut out = String::from("p,q,dim\n");
    for (p, dims) in table {
        for (q, d) in dims.iter().enumerate() {
            writeln!(out, "{p},{q},{d}").unwrap();
        }
    }
    out
}

pub fn cycle_class(class: &ClassSpec) -> Result<Report> {
    let (_, tube) = class.tube.load()?;
    let cover = class.cover.as_ref().map(|c| c.load());
    let c = dolbeault::cycle_class(&tube, cover)?;
    c.zigzag.verify(&c.cover)?;
    let carrier = c.zigzag.carrier();
    let mut text = String::new();
    writeln!(text, "tube: q={} h={} H={} m={}", tube.q, fmt_rat(&tube.h), fmt_rat(&tube.cap), tube.weight).unwrap();
    writeln!(text, "carrier: {} cells, {} maximal", carrier.len(), carrier.maximal_cells().len()).unwrap();
    for (i, th) in c.zigzag.theta.iter().enumerate() {
        let nonzero = th.values().filter(|f| !f.is_zero()).count();
        writeln!(text, "θ_{i}: {} components, {nonzero} nonzero", th.len()).unwrap();
    }
    writeln!(text, "rung identities verified").unwrap();
    Ok(Report::passed(
        text,
        json!({"q": tube.q, "carrier_cells": carrier.len(), "rungs": "verified"}),
    ))
}

pub fn pair(class: &ClassSpec, form: &FormSpec) -> Result<Report> {
    let (base, tube) = class.tube.load()?;
    let omega = form.load(Some(&base))?;
    let cover = class.cover.as_ref().map(|c| c.load());
    let c = dolbeault::cycle_class(&tube, cover)?;
    let r = dolbeault::pair(&c, &omega)?;
    let mut text = String::new();
    writeln!(text, "bulk     {}", fmt_rat(&r.bulk)).unwrap();
    for (i, s) in r.stokes.iter().enumerate() {
        writeln!(text, "stokes {i} {}", fmt_rat(s)).unwrap();
    }
    writeln!(text, "corner   {}", fmt_rat(&r.corner)).unwrap();
    writeln!(text, "m·∫_P ω   {}", fmt_rat(&r.expected)).unwrap();
    writeln!(text, "pairing {}", fmt_rat(r.value())).unwrap();
    Ok(Report::passed(text, rat_value(r.value())))
}

/// Tube of codimension `q` in `Q^n` over `[0,1]^{n−q}`, paired with the
/// positive volume form of the base (so `∫_P ω = 1`).
pub fn demo_cauchy(n: usize, q: usize, m: i64) -> Result<Report> {
    if q == 0 || q > n {
        return Err(Error::BadRange(format!("need 1 ≤ q ≤ n, got n={n}, q={q}")));
    }
    let d = n - q;
    let base = if d == 0 { examples::point() } else { examples::cube(d, 0, 1) };
    let volume = Superform::volume(d).scale(&orientation_sign(d));
    let omega = PiecewiseForm::uniform(base.clone(), volume)?;
    let tube = build_tube(base.clone(), q, int(1), int(2), m)?;
    let c = dolbeault::cycle_class(&tube, None)?;
    let r = dolbeault::pair(&c, &omega)?;
    let z = WeightedCycle::uniform(base, m)?;
    let direct = integrate(&omega, &z)?.value;
    let text = format!(
        "pairing ⟨cl(Z), ω⟩ = {}\n∫_Z ω = {}\n",
        fmt_rat(r.value()),
        fmt_rat(&direct)
    );
    Ok(Report {
        text,
        value: rat_value(r.value()),
        ok: *r.value() == direct,
    })
}

/// Zero-cycle with the given weights at `(0,…,0), (1,0,…), …` in `Q^n`.
pub fn demo_degree(weights: &[i64], n: usize) -> Result<Report> {
    let pts: Vec<_> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let mut x = vec![int(0); n];
            if n > 0 {
                x[0] = int(i as i64);
            }
            (x, w)
        })
        .collect();
    let z = WeightedCycle::points(n, &pts)?;
    let r = dolbeault::degree_pairing(&z, int(0), int(1))?;
    let deg = z.degree()?;
    let text = format!("Σ ⟨cl(p), 1⟩ = {}\ndeg Z = {deg}\n", fmt_rat(&r.total));
    Ok(Report {
        text,
        value: rat_value(&r.total),
        ok: r.total == int(deg),
    })
}

/// τ of a Milnor symbol: the constant (q,0)-form on each maximal cell.
pub fn tau(symbol: &SymbolSpec) -> Result<Report> {
    let (loaded, s) = symbol.load()?;
    let form = milnor::tau(&s, &loaded.complex)?;
    let mut text = String::new();
    let mut cells = BTreeMap::new();
    for c in form.carrier.maximal_cells() {
        let w = form.on(c);
        writeln!(text, "cell {c}: {w}").unwrap();
        cells.insert(c.to_string(), Value::String(w.to_string()));
    }
    let closed = form.dsecond().is_zero();
    writeln!(text, "d″-closed: {closed}").unwrap();
    Ok(Report {
        text,
        value: json!(cells),
        ok: closed,
    })
}

/// Parses `"1,2"`-style lists.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad list entry {t:?}"))))
        .collect()
}

/// `V^I` index set from 1-based user input.
pub fn parse_set(s: &str) -> Result<Vec<usize>> {
    let raw: Vec<usize> = parse_list(s)?;
    if raw.contains(&0) {
        return Err(Error::Parse("tube indices are 1-based".into()));
    }
    let mut set: Vec<usize> = raw.into_iter().map(|i| i - 1).collect();
    set.sort();
    set.dedup();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_sets_are_one_based() {
        assert_eq!(parse_set("2, 1,2").unwrap(), vec![0, 1]);
        assert!(parse_set("0,1").is_err());
        assert!(parse_list::<i64>("1,x").is_err());
        assert_eq!(parse_list::<i64>("").unwrap(), Vec::<i64>::new());
    }

    #[test]
    fn hpq_csv_rows() {
        let table = BTreeMap::from([(0, vec![1, 0]), (1, vec![0, 2])]);
        assert_eq!(hpq_csv(&table), "p,q,dim\n0,0,1\n0,1,0\n1,0,0\n1,1,2\n");
    }

    #[test]
    fn demos() {
        let r = demo_degree(&[4, -1, 2], 1).unwrap();
        assert!(r.ok);
        assert_eq!(r.value, json!("5"));
        let r = demo_cauchy(1, 1, 2).unwrap();
        assert!(r.ok);
        assert_eq!(r.value, json!("2"));
        assert!(matches!(demo_cauchy(2, 3, 1), Err(Error::BadRange(_))));
    }
}
