//! Milnor symbols `{f_1, …, f_q}` modelled by the PL functions
//! `y_i = −log|f_i|`, the τ map to `(q,0)`-forms, and tropical charts.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::PolyComplex;
use crate::error::{Error, Result};
use crate::piecewise::{Affine, PLFunction, PiecewiseForm};
use crate::polyhedron::Polyhedron;
use crate::poly::Polynomial;
use crate::rat::{self, Rat, RatVector};
use crate::superform::Superform;

/// One tuple entry: the PL function of a product `f_1⋯f_k` given as the
/// list of summands `y_{f_1}, …, y_{f_k}`.
pub type Entry = Vec<PLFunction>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTerm {
    pub coef: Rat,
    pub tuple: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub q: usize,
    pub terms: Vec<SymbolTerm>,
}

type TupleKey = Vec<Vec<(usize, Affine)>>;

fn key_of(tuple: &[Entry]) -> TupleKey {
    tuple
        .iter()
        .map(|e| e[0].pieces().map(|(c, a)| (*c, a.clone())).collect())
        .collect()
}

impl Symbol {
    pub fn new(q: usize, terms: Vec<SymbolTerm>) -> Result<Self> {
        for t in &terms {
            if t.tuple.len() != q || t.tuple.iter().any(|e| e.is_empty()) {
                return Err(Error::Schema(format!("symbol entries must be {q} nonempty tuples")));
            }
        }
        Ok(Symbol { q, terms })
    }

    /// `coef·{y_1, …, y_q}` with single-summand entries.
    pub fn single(coef: Rat, functions: Vec<PLFunction>) -> Self {
        Symbol {
            q: functions.len(),
            terms: vec![SymbolTerm {
                coef,
                tuple: functions.into_iter().map(|f| vec![f]).collect(),
            }],
        }
    }

    pub fn scale(&self, c: &Rat) -> Symbol {
        Symbol {
            q: self.q,
            terms: self
                .terms
                .iter()
                .map(|t| SymbolTerm {
                    coef: &t.coef * c,
                    tuple: t.tuple.clone(),
                })
                .collect(),
        }
    }

    /// Expands product entries multilinearly, merges equal tuples, drops
    /// zero coefficients and sorts the terms.
    pub fn normalize(&self) -> Symbol {
        let mut merged: BTreeMap<TupleKey, (Rat, Vec<Entry>)> = BTreeMap::new();
        for t in &self.terms {
            let mut expanded: Vec<Vec<PLFunction>> = vec![Vec::new()];
            for entry in &t.tuple {
                let mut next = Vec::with_capacity(expanded.len() * entry.len());
                for prefix in &expanded {
                    for f in entry {
                        let mut p = prefix.clone();
                        p.push(f.clone());
                        next.push(p);
                    }
                }
                expanded = next;
            }
            for funcs in expanded {
                let tuple: Vec<Entry> = funcs.into_iter().map(|f| vec![f]).collect();
                let key = key_of(&tuple);
                let slot = merged.entry(key).or_insert_with(|| (Rat::zero(), tuple));
                slot.0 += &t.coef;
            }
        }
        Symbol {
            q: self.q,
            terms: merged
                .into_values()
                .filter(|(c, _)| !c.is_zero())
                .map(|(coef, tuple)| SymbolTerm { coef, tuple })
                .collect(),
        }
    }

    fn carrier(&self) -> Result<Option<&PolyComplex>> {
        let mut carrier: Option<&PolyComplex> = None;
        for t in &self.terms {
            for f in t.tuple.iter().flatten() {
                match carrier {
                    None => carrier = Some(&f.carrier),
                    Some(c) if c != &f.carrier => return Err(Error::CarrierMismatch),
                    _ => {}
                }
            }
        }
        Ok(carrier)
    }
}

fn dprime_of_slope(n: usize, slope: &[i64]) -> Superform {
    let mut out = Superform::zero(n, 1, 0);
    for (k, &s) in slope.iter().enumerate() {
        if s != 0 {
            out.add_term(vec![k], vec![], Polynomial::constant(n, rat::int(s)));
        }
    }
    out
}

/// `τ(s)`: on each maximal cell, `Σ coef · d′(slope y_1)∧…∧d′(slope y_q)`.
/// An empty symbol maps to zero on `fallback`.
pub fn tau(s: &Symbol, fallback: &PolyComplex) -> Result<PiecewiseForm> {
    let carrier = s.carrier()?.unwrap_or(fallback).clone();
    let n = carrier.ambient_dim;
    let mut out = PiecewiseForm::zero(carrier.clone(), s.q, 0);
    for m in carrier.maximal_cells() {
        let mut cell_form = Superform::zero(n, s.q, 0);
        for t in &s.terms {
            let mut acc = Superform::constant(n, t.coef.clone());
            for entry in &t.tuple {
                let mut d = Superform::zero(n, 1, 0);
                for f in entry {
                    d = d.add(&dprime_of_slope(n, &f.integral_slope(m)?))?;
                }
                acc = acc.wedge(&d)?;
            }
            cell_form = cell_form.add(&acc)?;
        }
        out.set(m, cell_form)?;
    }
    Ok(out)
}

/// Image of a complex under a PL map `u ↦ (y_1(u), …, y_N(u))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropChart {
    pub carrier: PolyComplex,
    pub functions: Vec<PLFunction>,
    pub image: PolyComplex,
    /// For each maximal cell of the carrier, the image cells covering its
    /// image.
    pub cell_map: BTreeMap<usize, Vec<usize>>,
    /// The cell of the image that is a face of every image cell, if any.
    pub minimal: Option<usize>,
}

/// Builds the image complex of `u` under `functions`. Overlapping images are
/// refined along their facet hyperplanes; if that does not produce a
/// polyhedral complex, fails with `NotPolyhedral`.
pub fn trop_chart(functions: Vec<PLFunction>, u: &PolyComplex) -> Result<TropChart> {
    for f in &functions {
        if &f.carrier != u {
            return Err(Error::CarrierMismatch);
        }
    }
    let big_n = functions.len();
    let mut images: Vec<(usize, Polyhedron)> = Vec::new();
    for m in u.maximal_cells() {
        let mut rows: Vec<RatVector> = Vec::with_capacity(big_n);
        let mut b: RatVector = Vec::with_capacity(big_n);
        for f in &functions {
            let slope = f.integral_slope(m)?;
            rows.push(slope.iter().map(|&s| rat::int(s)).collect());
            b.push(f.piece(m).constant.clone());
        }
        images.push((m, u.polyhedron(m).affine_image(&rows, &b)?));
    }
    let mut distinct: Vec<Polyhedron> = images.iter().map(|(_, p)| p.clone()).collect();
    distinct.sort();
    distinct.dedup();
    // drop images that are faces of other images
    let maximal: Vec<Polyhedron> = distinct
        .iter()
        .filter(|p| !distinct.iter().any(|q| q != *p && p.is_face_of(q)))
        .cloned()
        .collect();
    let image = match PolyComplex::face_lattice(&maximal) {
        Ok(c) => c,
        Err(Error::NonComplex(_)) => refine_overlaps(&maximal, big_n)?,
        Err(e) => return Err(e),
    };
    let mut cell_map = BTreeMap::new();
    for (m, p) in &images {
        let covering: Vec<usize> = image
            .maximal_cells()
            .into_iter()
            .filter(|&c| {
                let x = image.polyhedron(c).relative_interior_point();
                p.contains(&x) && image.cells[c].dim as isize == p.dim()
            })
            .collect();
        let covering = if covering.is_empty() {
            image.find_cell(p).into_iter().collect()
        } else {
            covering
        };
        cell_map.insert(*m, covering);
    }
    let minimal = (0..image.len()).find(|&c| {
        image
            .maximal_cells()
            .into_iter()
            .all(|m| image.closure(m).contains(&c))
    });
    Ok(TropChart {
        carrier: u.clone(),
        functions,
        image,
        cell_map,
        minimal,
    })
}

fn refine_overlaps(cells: &[Polyhedron], n: usize) -> Result<PolyComplex> {
    let mut hyperplanes: Vec<(RatVector, Rat)> = Vec::new();
    for p in cells {
        let h = p.hrep();
        hyperplanes.extend(h.inequalities.iter().cloned());
    }
    hyperplanes.sort();
    hyperplanes.dedup();
    let mut pieces: Vec<Polyhedron> = Vec::new();
    for p in cells {
        let mut parts = vec![p.clone()];
        for (a, b) in &hyperplanes {
            let neg: RatVector = a.iter().map(|x| -x.clone()).collect();
            let mut next = Vec::new();
            for part in parts {
                let up = part.cut(a, b)?;
                let down = part.cut(&neg, &-b.clone())?;
                if up.dim() == part.dim() && down.dim() == part.dim() {
                    next.push(up);
                    next.push(down);
                } else {
                    next.push(part);
                }
            }
            parts = next;
        }
        pieces.extend(parts);
    }
    pieces.sort();
    pieces.dedup();
    let maximal: Vec<Polyhedron> = pieces
        .iter()
        .filter(|p| !pieces.iter().any(|q| q != *p && p.is_face_of(q)))
        .cloned()
        .collect();
    match PolyComplex::face_lattice(&maximal) {
        Ok(mut c) => {
            c.ambient_dim = n;
            Ok(c)
        }
        Err(Error::NonComplex(msg)) => Err(Error::NotPolyhedral(msg)),
        Err(e) => Err(e),
    }
}
