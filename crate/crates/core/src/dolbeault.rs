//! Cellular tropical cohomology `H^{p,q}` and the zigzag construction of
//! the Dolbeault class of a weighted cycle, with its pairing against
//! `d″`-closed forms.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::complex::PolyComplex;
use crate::cycles::{subsets, TubeModel, WeightedCycle};
use crate::error::{Error, Result};
use crate::integrate::{corner_integral, integrate, integrate_cell, tube_pairing};
use crate::linalg;
use crate::milnor::{tau, Symbol};
use crate::piecewise::{pl_partition_of_unity, OpenSet, PLFunction, PiecewiseForm};
use crate::poly::Polynomial;
use crate::rat::{self, Rat, RatVector};
use crate::superform::Superform;

/// `k`-element subsets of `{0..n}` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Plücker coordinates of `v_1∧…∧v_p` in the basis `e_T`, `T` running over
/// [`combinations`]`(M, p)`.
fn wedge_coordinates(vs: &[RatVector], m: usize) -> RatVector {
    combinations(m, vs.len())
        .iter()
        .map(|t| {
            let minor: Vec<RatVector> = vs.iter().map(|v| t.iter().map(|&j| v[j].clone()).collect()).collect();
            linalg::det(&minor)
        })
        .collect()
}

/// Basis of `F_p(σ) = Σ_{τ ⊇ σ} ∧^p L(τ)` inside `∧^p Q^M`.
pub fn coefficient_space(x: &PolyComplex, sigma: usize, p: usize) -> Vec<RatVector> {
    let m = x.ambient_dim;
    let width = combinations(m, p).len();
    let mut gens: Vec<RatVector> = Vec::new();
    for tau in x.star(sigma) {
        let basis: Vec<RatVector> = x.cells[tau].basis.iter().map(|b| rat::to_rat_vec(b)).collect();
        for s in combinations(basis.len(), p) {
            let vs: Vec<RatVector> = s.iter().map(|&i| basis[i].clone()).collect();
            gens.push(wedge_coordinates(&vs, m));
        }
    }
    linalg::row_basis(&gens, width)
        .into_iter()
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .collect()
}

/// The cochain complex `C^{p,•}` with `C^{p,q} = ⊕_{dim σ = q} F_p(σ)^*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainComplex {
    pub p: usize,
    /// Basis labels `(cell, index)` of each `C^{p,q}`.
    pub labels: Vec<Vec<(usize, usize)>>,
    /// `maps[q]` is the coboundary `C^q → C^{q+1}` (rows index `C^{q+1}`).
    pub maps: Vec<Vec<RatVector>>,
}

impl CochainComplex {
    pub fn build(x: &PolyComplex, p: usize) -> CochainComplex {
        let top = x.dim().max(0) as usize;
        let spaces: BTreeMap<usize, Vec<RatVector>> =
            (0..x.len()).into_par_iter().map(|c| (c, coefficient_space(x, c, p))).collect();
        let labels: Vec<Vec<(usize, usize)>> = (0..=top)
            .map(|q| {
                x.cells_of_dim(q)
                    .into_iter()
                    .flat_map(|c| (0..spaces[&c].len()).map(move |i| (c, i)))
                    .collect()
            })
            .collect();
        let maps = (0..top)
            .into_par_iter()
            .map(|q| {
                let col: BTreeMap<(usize, usize), usize> =
                    labels[q].iter().enumerate().map(|(i, l)| (*l, i)).collect();
                let row: BTreeMap<(usize, usize), usize> =
                    labels[q + 1].iter().enumerate().map(|(i, l)| (*l, i)).collect();
                let mut mat = vec![vec![Rat::zero(); labels[q].len()]; labels[q + 1].len()];
                for tau in x.cells_of_dim(q + 1) {
                    for inc in x.facets_of(tau) {
                        let sign = rat::int(inc.sign as i64);
                        // restriction F_p(σ)^* → F_p(τ)^*: evaluate on the
                        // basis of F_p(τ) expressed in that of F_p(σ)
                        for (k, b) in spaces[&tau].iter().enumerate() {
                            let coords = linalg::solve_in_span(&spaces[&inc.face], b)
                                .expect("F_p(τ) lies in F_p(σ)");
                            for (j, c) in coords.into_iter().enumerate() {
                                if !c.is_zero() {
                                    mat[row[&(tau, k)]][col[&(inc.face, j)]] += &sign * c;
                                }
                            }
                        }
                    }
                }
                mat
            })
            .collect();
        CochainComplex { p, labels, maps }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.len()).collect()
    }

    fn ranks(&self) -> Vec<usize> {
        self.maps.par_iter().map(|m| linalg::rank(m)).collect()
    }

    /// Whether every composite `δ_{q+1} δ_q` vanishes.
    pub fn is_complex(&self) -> bool {
        self.maps.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            b.iter().all(|row| {
                (0..a.first().map_or(0, |r| r.len())).all(|j| {
                    row.iter()
                        .zip(a)
                        .fold(Rat::zero(), |acc, (x, arow)| acc + x * &arow[j])
                        .is_zero()
                })
            })
        })
    }

    /// `dim H^{p,q}` for `q = 0..=dim X`.
    pub fn cohomology(&self) -> Vec<usize> {
        let dims = self.dims();
        let ranks = self.ranks();
        (0..dims.len())
            .map(|q| {
                let out = if q < ranks.len() { ranks[q] } else { 0 };
                let inc = if q > 0 { ranks[q - 1] } else { 0 };
                dims[q] - out - inc
            })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims()
            .iter()
            .enumerate()
            .map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// `[h^{p,0}, …, h^{p,dim X}]`.
pub fn hpq(x: &PolyComplex, p: usize) -> Vec<usize> {
    CochainComplex::build(x, p).cohomology()
}

/// A Čech cochain: forms indexed by sorted index sets `J`, meaningful on
/// `U_J = ∩_{j∈J} U_j`.
pub type Cochain = BTreeMap<Vec<usize>, PiecewiseForm>;

/// The zigzag ladder `θ_0, ϑ_1, θ_1, …, ϑ_{k−1}, θ_{k−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zigzag {
    pub rho: Vec<PLFunction>,
    /// `theta[i]` has entries on index sets of size `k − i`.
    pub theta: Vec<Cochain>,
    /// `vartheta[i − 1]` is `ϑ_i`.
    pub vartheta: Vec<Cochain>,
}

impl Zigzag {
    pub fn carrier(&self) -> &PolyComplex {
        &self.rho[0].carrier
    }

    /// Checks `δϑ_i = θ_{i−1}` on every `U_J` and `θ_i = d″ϑ_i`.
    pub fn verify(&self, cover: &[OpenSet]) -> Result<()> {
        let carrier = self.carrier();
        let cells: Vec<(usize, RatVector)> = carrier
            .maximal_cells()
            .into_iter()
            .map(|m| (m, carrier.polyhedron(m).relative_interior_point()))
            .collect();
        for (i, vt) in self.vartheta.iter().enumerate().map(|(i, v)| (i + 1, v)) {
            for (j, th) in &self.theta[i] {
                if vt[j].dsecond() != *th {
                    return Err(Error::Mismatch(format!("θ_{i} ≠ d″ϑ_{i} on {j:?}")));
                }
            }
            for (big, prev) in &self.theta[i - 1] {
                for (m, x) in &cells {
                    if !big.iter().all(|&b| cover[b].contains(x)) {
                        continue;
                    }
                    let mut acc = Superform::zero(prev.dim(), prev.bidegree().0, prev.bidegree().1);
                    for (l, _) in big.iter().enumerate() {
                        let mut small = big.clone();
                        small.remove(l);
                        let term = vt[&small].on(*m);
                        acc = if l % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
                    }
                    if acc != prev.on(*m) {
                        return Err(Error::Mismatch(format!("δϑ_{i} ≠ θ_{} on U_{big:?}", i - 1)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Runs the zigzag from `θ_0` on `U_{0..k}` for a cover with `k` sets.
pub fn zigzag(theta0: &PiecewiseForm, cover: &[OpenSet]) -> Result<Zigzag> {
    let k = cover.len();
    let rho = pl_partition_of_unity(&theta0.carrier, cover).map_err(|e| match e {
        Error::NotACover => Error::NoPartition,
        other => other,
    })?;
    let carrier = rho[0].carrier.clone();
    let rho_forms: Vec<PiecewiseForm> = rho.iter().map(|r| r.to_form()).collect();
    let all: Vec<usize> = (0..k).collect();
    let mut theta: Vec<Cochain> = vec![BTreeMap::from([(all, theta0.transfer(&carrier)?)])];
    let mut vartheta: Vec<Cochain> = Vec::new();
    for i in 1..k {
        let prev = &theta[i - 1];
        let sets: Vec<Vec<usize>> = subsets(k).into_iter().filter(|s| s.len() == k - i).collect();
        let built: Vec<Result<(Vec<usize>, PiecewiseForm)>> = sets
            .into_par_iter()
            .map(|j| {
                let (p, q) = prev.values().next().expect("nonempty cochain").bidegree();
                let mut acc = PiecewiseForm::zero(carrier.clone(), p, q);
                for l in (0..k).filter(|l| !j.contains(l)) {
                    let mut bigger = j.clone();
                    bigger.push(l);
                    bigger.sort();
                    let sign = if j.iter().filter(|&&x| x < l).count() % 2 == 0 {
                        Rat::one()
                    } else {
                        -Rat::one()
                    };
                    acc = acc.add(&rho_forms[l].wedge(&prev[&bigger])?.scale(&sign))?;
                }
                Ok((j, acc))
            })
            .collect();
        let vt: Cochain = built.into_iter().collect::<Result<_>>()?;
        let th: Cochain = vt.iter().map(|(j, f)| (j.clone(), f.dsecond())).collect();
        vartheta.push(vt);
        theta.push(th);
    }
    Ok(Zigzag { rho, theta, vartheta })
}

/// The standard cover `U_k = {y_k < H}` of the outer region.
pub fn standard_cover(tube: &TubeModel) -> Vec<OpenSet> {
    (0..tube.q)
        .map(|k| OpenSet::new(vec![(tube.corner_normal(k), tube.cap.clone())]))
        .collect()
}

/// Dolbeault class of the tube cycle: `θ_0 = τ(m·{y_1, …, y_q})` and its
/// zigzag over the outer region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleClass {
    pub tube: TubeModel,
    pub cover: Vec<OpenSet>,
    pub zigzag: Zigzag,
}

impl CycleClass {
    /// The initial symbol cocycle `θ_0` on `U_{0..q}`.
    pub fn initial(&self) -> &Cochain {
        &self.zigzag.theta[0]
    }

    /// The Dolbeault representative `θ_{q−1}`, a 0-cochain of
    /// `(q, q−1)`-forms.
    pub fn representative(&self) -> &Cochain {
        self.zigzag.theta.last().expect("nonempty ladder")
    }
}

pub fn cycle_class(tube: &TubeModel, cover: Option<Vec<OpenSet>>) -> Result<CycleClass> {
    let cover = cover.unwrap_or_else(|| standard_cover(tube));
    if cover.len() != tube.q {
        return Err(Error::NotACover);
    }
    for set in subsets(tube.q).into_iter().filter(|s| !s.is_empty()) {
        for face in tube.corner(&set) {
            if !face.vertices.iter().all(|v| set.iter().all(|&i| cover[i].contains(v))) {
                return Err(Error::NotACover);
            }
        }
    }
    let carrier = tube.outer_region()?;
    let ys: Vec<PLFunction> = (0..tube.q)
        .map(|k| PLFunction::affine(carrier.clone(), tube.corner_normal(k), Rat::zero()))
        .collect::<Result<_>>()?;
    let theta0 = tau(&Symbol::single(rat::int(tube.weight), ys), &carrier)?;
    let zigzag = zigzag(&theta0, &cover)?;
    Ok(CycleClass {
        tube: tube.clone(),
        cover,
        zigzag,
    })
}

/// All routes of the pairing `⟨[Z], ω⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingReport {
    /// `∫ θ_{q−1} ∧ d″ω` over the outer region.
    pub bulk: Rat,
    /// `stokes[0] = −∫ d″(θ_{q−1}∧ω)`, `stokes[i] = Σ_{|I|=i} ∫_{V^I} θ_{q−i,I}∧ω`.
    pub stokes: Vec<Rat>,
    /// Direct corner contraction on the tube.
    pub corner: Rat,
    /// `m ∫_P ω`.
    pub expected: Rat,
}

impl PairingReport {
    pub fn value(&self) -> &Rat {
        &self.expected
    }
}

fn host(base: &PolyComplex, xb: &[Rat]) -> Option<usize> {
    base.maximal_cells().into_iter().find(|&c| base.polyhedron(c).contains(xb))
}

fn lift(omega_p: &PiecewiseForm, xb: &[Rat], n: usize) -> Result<Superform> {
    let c = host(&omega_p.carrier, xb).ok_or(Error::CarrierMismatch)?;
    let map: Vec<usize> = (0..omega_p.dim()).collect();
    Ok(omega_p.on(c).reindex(n, &map))
}

/// Pairs the class with `ω = χ(y)·π*ω_P`, computing every route and failing
/// with `Mismatch` if they disagree.
pub fn pair(class: &CycleClass, omega_p: &PiecewiseForm) -> Result<PairingReport> {
    let tube = &class.tube;
    let n = tube.ambient_dim();
    let d = tube.base_dim();
    let q = tube.q;
    if omega_p.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "base form on Q^{} for a base in Q^{d}",
            omega_p.dim()
        )));
    }
    if omega_p.bidegree() != (d, d) {
        return Err(Error::BidegreeMismatch {
            expected_p: d,
            expected_q: d,
            found_p: omega_p.bidegree().0,
            found_q: omega_p.bidegree().1,
        });
    }
    let carrier = class.zigzag.carrier().clone();
    let ramp = Rat::one() / (&tube.h - &tube.floor);
    let mut omega = PiecewiseForm::zero(carrier.clone(), d, d);
    for m in carrier.maximal_cells() {
        let x = carrier.polyhedron(m).relative_interior_point();
        let mut chi = Polynomial::one(n);
        for i in 0..q {
            let y = tube.y(i);
            if x[y] < tube.h {
                let mut a = vec![Rat::zero(); n];
                a[y] = ramp.clone();
                chi = chi.mul(&Polynomial::affine(&a, &(-&tube.floor * &ramp)));
            }
        }
        omega.set(m, lift(omega_p, &x[..d], n)?.mul_function(&chi))?;
    }

    let top = &class.zigzag.theta[q - 1];
    let cells: Vec<usize> = carrier.maximal_cells();
    let parts: Vec<Result<(Rat, Rat)>> = cells
        .par_iter()
        .map(|&m| {
            let x = carrier.polyhedron(m).relative_interior_point();
            let k = (0..q).find(|&k| class.cover[k].contains(&x)).ok_or(Error::NotACover)?;
            let theta = top[&vec![k]].on(m);
            let w = omega.on(m);
            let cell = carrier.polyhedron(m);
            let bulk = integrate_cell(&theta.wedge(&w.dsecond())?, cell)?;
            let s0 = -integrate_cell(&theta.wedge(&w)?.dsecond(), cell)?;
            Ok((bulk, s0))
        })
        .collect();
    let (mut bulk, mut s0) = (Rat::zero(), Rat::zero());
    for r in parts {
        let (b, s) = r?;
        bulk += b;
        s0 += s;
    }
    let mut stokes = vec![s0];
    for i in 1..=q {
        let mut acc = Rat::zero();
        for set in subsets(q).into_iter().filter(|s| s.len() == i) {
            let form = class.zigzag.theta[q - i][&set].wedge(&omega)?;
            acc += corner_integral(&form, tube, &set)?;
        }
        stokes.push(acc);
    }

    let t = tube.tube_complex();
    let mut omega_t = PiecewiseForm::zero(t.clone(), d, d);
    for m in t.maximal_cells() {
        let x = t.polyhedron(m).relative_interior_point();
        omega_t.set(m, lift(omega_p, &x[..d], n)?)?;
    }
    let corner = tube_pairing(tube, &omega_t)?;

    let base = WeightedCycle::uniform(omega_p.carrier.clone(), 1)?;
    let expected = rat::int(tube.weight) * integrate(omega_p, &base)?.value;

    let report = PairingReport {
        bulk,
        stokes,
        corner,
        expected,
    };
    let all_agree = report.bulk == report.expected
        && report.corner == report.expected
        && report.stokes.iter().all(|s| *s == report.expected);
    if !all_agree {
        return Err(Error::Mismatch(format!(
            "bulk {}, stokes [{}], corner {}, expected {}",
            rat::fmt_rat(&report.bulk),
            report.stokes.iter().map(rat::fmt_rat).collect::<Vec<_>>().join(", "),
            rat::fmt_rat(&report.corner),
            rat::fmt_rat(&report.expected)
        )));
    }
    Ok(report)
}

/// Pairing of a zero-cycle with the constant function 1, point by point
/// through local tube models of codimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub per_point: Vec<(usize, Rat)>,
    pub total: Rat,
}

pub fn degree_pairing(z: &WeightedCycle, h: Rat, cap: Rat) -> Result<DegreeReport> {
    if z.dim != 0 {
        return Err(Error::WrongDimension {
            expected: 0,
            found: z.dim,
        });
    }
    let q = z.support.ambient_dim;
    let one = PiecewiseForm::uniform(crate::complex::examples::point(), Superform::constant(0, Rat::one()))?;
    let mut by_weight: BTreeMap<i64, Rat> = BTreeMap::new();
    let mut per_point = Vec::new();
    let mut total = Rat::zero();
    for c in z.top_cells() {
        let m = z.weight(c);
        let v = match by_weight.get(&m) {
            Some(v) => v.clone(),
            None => {
                let tube = crate::cycles::build_tube(crate::complex::examples::point(), q, h.clone(), cap.clone(), m)?;
                let v = pair(&cycle_class(&tube, None)?, &one)?.expected;
                by_weight.insert(m, v.clone());
                v
            }
        };
        total += &v;
        per_point.push((c, v));
    }
    Ok(DegreeReport { per_point, total })
}
