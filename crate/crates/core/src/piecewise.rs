//! Piecewise-polynomial superforms and piecewise-linear functions on a
//! polyhedral carrier, and PL partitions of unity.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::complex::{Mode, PolyComplex};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::polyhedron::Polyhedron;
use crate::rat::{self, to_rat_vec, Rat, RatVector};
use crate::superform::Superform;

/// A superform on each maximal cell of an embedded carrier. Missing cells
/// carry the zero form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseForm {
    pub carrier: PolyComplex,
    dim: usize,
    p: usize,
    q: usize,
    forms: BTreeMap<usize, Superform>,
}

impl PiecewiseForm {
    pub fn zero(carrier: PolyComplex, p: usize, q: usize) -> Self {
        let dim = carrier.ambient_dim;
        PiecewiseForm {
            carrier,
            dim,
            p,
            q,
            forms: BTreeMap::new(),
        }
    }

    /// The same form on every maximal cell.
    pub fn uniform(carrier: PolyComplex, form: Superform) -> Result<Self> {
        let mut out = Self::zero(carrier, form.bidegree().0, form.bidegree().1);
        for c in out.carrier.maximal_cells() {
            out.set(c, form.clone())?;
        }
        Ok(out)
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, cell: usize, form: Superform) -> Result<()> {
        if form.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "cell form on Q^{} for a carrier in Q^{}",
                form.dim(),
                self.dim
            )));
        }
        if form.bidegree() != (self.p, self.q) {
            return Err(Error::BidegreeMismatch {
                expected_p: self.p,
                expected_q: self.q,
                found_p: form.bidegree().0,
                found_q: form.bidegree().1,
            });
        }
        if form.is_zero() {
            self.forms.remove(&cell);
        } else {
            self.forms.insert(cell, form);
        }
        Ok(())
    }

    /// The form on a maximal cell.
    pub fn on(&self, cell: usize) -> Superform {
        self.forms
            .get(&cell)
            .cloned()
            .unwrap_or_else(|| Superform::zero(self.dim, self.p, self.q))
    }

    /// The form near an arbitrary cell, read off from its lowest-numbered
    /// maximal coface.
    pub fn near(&self, cell: usize) -> Superform {
        match self.carrier.maximal_cofaces(cell).first() {
            Some(&m) => self.on(m),
            None => Superform::zero(self.dim, self.p, self.q),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (&usize, &Superform)> {
        self.forms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn map(&self, op: impl Fn(&Superform) -> Result<Superform>) -> Result<Self> {
        let mut out: Option<PiecewiseForm> = None;
        for c in self.carrier.maximal_cells() {
            let f = op(&self.on(c))?;
            let o = out.get_or_insert_with(|| {
                let (p, q) = f.bidegree();
                PiecewiseForm::zero(self.carrier.clone(), p, q)
            });
            o.set(c, f)?;
        }
        Ok(out.unwrap_or_else(|| self.clone()))
    }

    pub fn dprime(&self) -> Self {
        let mut out = Self::zero(self.carrier.clone(), self.p + 1, self.q);
        for (&c, f) in &self.forms {
            out.set(c, f.dprime()).expect("shape preserved");
        }
        out
    }

    pub fn dsecond(&self) -> Self {
        let mut out = Self::zero(self.carrier.clone(), self.p, self.q + 1);
        for (&c, f) in &self.forms {
            out.set(c, f.dsecond()).expect("shape preserved");
        }
        out
    }

    fn same_carrier(&self, other: &Self) -> Result<()> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_carrier(other)?;
        let mut out = Self::zero(self.carrier.clone(), self.p, self.q);
        for c in self.carrier.maximal_cells() {
            out.set(c, self.on(c).add(&other.on(c))?)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(self.carrier.clone(), self.p, self.q);
        for (&cell, f) in &self.forms {
            out.set(cell, f.scale(c)).expect("shape preserved");
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_carrier(other)?;
        let mut out = Self::zero(self.carrier.clone(), self.p + other.p, self.q + other.q);
        for c in self.carrier.maximal_cells() {
            out.set(c, self.on(c).wedge(&other.on(c))?)?;
        }
        Ok(out)
    }

    /// Moves the form onto a refinement of its carrier (every maximal cell
    /// of `target` must lie in a maximal cell of the current carrier).
    pub fn transfer(&self, target: &PolyComplex) -> Result<Self> {
        let mut out = Self::zero(target.clone(), self.p, self.q);
        for c in target.maximal_cells() {
            let parent = host_cell(&self.carrier, target.polyhedron(c))
                .ok_or_else(|| Error::Schema("target is not a refinement of the carrier".into()))?;
            out.set(c, self.on(parent))?;
        }
        Ok(out)
    }

    /// Whether coefficient functions agree on every facet shared by two
    /// maximal cells.
    pub fn is_continuous(&self) -> bool {
        self.discontinuities().is_empty()
    }

    /// Shared facets across which some coefficient jumps.
    pub fn discontinuities(&self) -> Vec<usize> {
        let mut bad = Vec::new();
        let maximal: Vec<usize> = self.carrier.maximal_cells();
        for (t, cell) in self.carrier.cells.iter().enumerate() {
            let cofaces: Vec<usize> = self
                .carrier
                .cofacets_of(t)
                .iter()
                .map(|i| i.cell)
                .filter(|c| maximal.contains(c))
                .collect();
            if cofaces.len() < 2 || cell.polyhedron.is_none() {
                continue;
            }
            let first = self.on(cofaces[0]);
            for &other in &cofaces[1..] {
                let diff = first.sub(&self.on(other)).expect("same shape");
                if !vanishes_on(&diff, self.carrier.polyhedron(t)) {
                    bad.push(t);
                    break;
                }
            }
        }
        bad
    }
}

/// Affine parametrization `x = v0 + Σ t_i b_i` of a polyhedron's affine hull
/// by a lattice basis, as `(A, v0)` with `A` of shape `N × dim`.
pub fn lattice_chart(p: &Polyhedron) -> (Vec<RatVector>, RatVector) {
    let basis = p.lattice_basis();
    let n = p.ambient_dim;
    let a: Vec<RatVector> = (0..n)
        .map(|row| basis.iter().map(|b| rat::int(b[row])).collect())
        .collect();
    (a, p.vertices[0].clone())
}

/// Whether every coefficient of `form` vanishes identically on the affine
/// hull of `p`.
fn vanishes_on(form: &Superform, p: &Polyhedron) -> bool {
    let (a, b) = lattice_chart(p);
    let d = p.dim().max(0) as usize;
    form.terms()
        .all(|(_, f)| f.compose_affine(&a, &b, d).is_zero())
}

/// The maximal cell of `carrier` containing `p`.
pub fn host_cell(carrier: &PolyComplex, p: &Polyhedron) -> Option<usize> {
    let x = p.relative_interior_point();
    let cell = carrier.locate(&x)?;
    carrier.maximal_cofaces(cell).into_iter().find(|&m| {
        let host = carrier.polyhedron(m);
        p.vertices.iter().all(|v| host.contains(v))
    })
}

/// `x ↦ slope·x + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Affine {
    pub slope: RatVector,
    pub constant: Rat,
}

impl Affine {
    pub fn new(slope: RatVector, constant: Rat) -> Self {
        Affine { slope, constant }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        Affine::new(vec![Rat::zero(); n], c)
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        rat::dot(&self.slope, x) + &self.constant
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine::new(rat::add(&self.slope, &o.slope), &self.constant + &o.constant)
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        Affine::new(rat::sub(&self.slope, &o.slope), &self.constant - &o.constant)
    }

    pub fn scale(&self, c: &Rat) -> Affine {
        Affine::new(rat::scale(&self.slope, c), &self.constant * c)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::affine(&self.slope, &self.constant)
    }
}

/// A continuous function, affine on each maximal cell of the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    pub carrier: PolyComplex,
    pieces: BTreeMap<usize, Affine>,
}

impl PLFunction {
    /// Validates that every maximal cell has a piece and that pieces agree
    /// on shared faces.
    pub fn new(carrier: PolyComplex, pieces: BTreeMap<usize, Affine>) -> Result<Self> {
        if carrier.mode != Mode::Embedded {
            return Err(Error::Schema("PL functions need an embedded carrier".into()));
        }
        for c in carrier.maximal_cells() {
            match pieces.get(&c) {
                None => return Err(Error::Schema(format!("no affine piece on cell {c}"))),
                Some(a) if a.slope.len() != carrier.ambient_dim => {
                    return Err(Error::DimensionMismatch(format!("slope length on cell {c}")))
                }
                _ => {}
            }
        }
        let f = PLFunction { carrier, pieces };
        if let Some(cell) = f.discontinuity() {
            return Err(Error::Schema(format!("PL function jumps at cell {cell}")));
        }
        Ok(f)
    }

    /// The single affine function `slope·x + c` on every cell.
    pub fn affine(carrier: PolyComplex, slope: RatVector, c: Rat) -> Result<Self> {
        let pieces = carrier
            .maximal_cells()
            .into_iter()
            .map(|m| (m, Affine::new(slope.clone(), c.clone())))
            .collect();
        Self::new(carrier, pieces)
    }

    /// Integer-slope convenience constructor.
    pub fn linear_int(carrier: PolyComplex, slope: &[i64]) -> Result<Self> {
        Self::affine(carrier, to_rat_vec(slope), Rat::zero())
    }

    pub fn piece(&self, cell: usize) -> &Affine {
        &self.pieces[&cell]
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&usize, &Affine)> {
        self.pieces.iter()
    }

    /// Slope on a maximal cell, required to be integral.
    pub fn integral_slope(&self, cell: usize) -> Result<Vec<i64>> {
        self.piece(cell)
            .slope
            .iter()
            .map(|s| {
                if s.is_integer() {
                    i64::try_from(s.to_integer()).map_err(|_| Error::NonIntegralSlope(cell))
                } else {
                    Err(Error::NonIntegralSlope(cell))
                }
            })
            .collect()
    }

    pub fn eval(&self, x: &[Rat]) -> Option<Rat> {
        let cell = self.carrier.locate(x)?;
        let m = *self.carrier.maximal_cofaces(cell).first()?;
        Some(self.pieces[&m].eval(x))
    }

    /// First cell on which two maximal cofaces disagree.
    fn discontinuity(&self) -> Option<usize> {
        for (t, cell) in self.carrier.cells.iter().enumerate() {
            let p = cell.polyhedron.as_ref()?;
            let cofaces = self.carrier.maximal_cofaces(t);
            if cofaces.len() < 2 {
                continue;
            }
            let a = &self.pieces[&cofaces[0]];
            for m in &cofaces[1..] {
                let d = a.sub(&self.pieces[m]);
                let ok = p.vertices.iter().all(|v| d.eval(v).is_zero())
                    && p.rays
                        .iter()
                        .chain(&p.lineality)
                        .all(|r| rat::dot(&d.slope, &to_rat_vec(r)).is_zero());
                if !ok {
                    return Some(t);
                }
            }
        }
        None
    }

    pub fn is_continuous(&self) -> bool {
        self.discontinuity().is_none()
    }

    pub fn add(&self, other: &PLFunction) -> Result<PLFunction> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch);
        }
        let pieces = self
            .pieces
            .iter()
            .map(|(c, a)| (*c, a.add(&other.pieces[c])))
            .collect();
        Ok(PLFunction {
            carrier: self.carrier.clone(),
            pieces,
        })
    }

    pub fn scale(&self, c: &Rat) -> PLFunction {
        PLFunction {
            carrier: self.carrier.clone(),
            pieces: self.pieces.iter().map(|(k, a)| (*k, a.scale(c))).collect(),
        }
    }

    /// The function as a `(0,0)` piecewise form.
    pub fn to_form(&self) -> PiecewiseForm {
        let mut out = PiecewiseForm::zero(self.carrier.clone(), 0, 0);
        for (&c, a) in &self.pieces {
            out.set(c, Superform::function(a.to_polynomial()))
                .expect("shape preserved");
        }
        out
    }

    /// Restates the function on a refinement of its carrier.
    pub fn transfer(&self, target: &PolyComplex) -> Result<PLFunction> {
        let mut pieces = BTreeMap::new();
        for c in target.maximal_cells() {
            let parent = host_cell(&self.carrier, target.polyhedron(c))
                .ok_or_else(|| Error::Schema("target is not a refinement of the carrier".into()))?;
            pieces.insert(c, self.pieces[&parent].clone());
        }
        Ok(PLFunction {
            carrier: target.clone(),
            pieces,
        })
    }
}

/// An open polyhedral set `{x : a_j·x < c_j for all j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenSet {
    pub constraints: Vec<(RatVector, Rat)>,
}

impl OpenSet {
    pub fn new(constraints: Vec<(RatVector, Rat)>) -> Self {
        OpenSet { constraints }
    }

    pub fn whole() -> Self {
        OpenSet {
            constraints: Vec::new(),
        }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.constraints.iter().all(|(a, c)| &rat::dot(a, x) < c)
    }

    /// Smallest slack `c_j − a_j·x`, or `None` for the whole space.
    fn min_slack(&self, x: &[Rat]) -> Option<Rat> {
        self.constraints.iter().map(|(a, c)| c - rat::dot(a, x)).min()
    }
}

/// Smallest ramp width tried before giving up.
const MIN_RAMP_EXPONENT: u32 = 24;

/// PL partition of unity subordinate to `cover` on the bounded complex
/// `carrier`. All returned functions share one refined carrier.
///
/// With `s_i(x) = min_j (c_ij − a_ij·x)` and a ramp width `δ`, the bump
/// `σ_i = clamp((s_i − δ)/δ, 0, 1)` vanishes where `s_i ≤ δ`; the partition
/// is `ρ_k = max(σ_1..σ_k) − max(σ_1..σ_{k−1})`. `δ` is halved until the
/// sets `{s_i ≥ 2δ}` cover the carrier, so that `Σ ρ_k = max σ_i ≡ 1`.
pub fn pl_partition_of_unity(carrier: &PolyComplex, cover: &[OpenSet]) -> Result<Vec<PLFunction>> {
    if !carrier.is_bounded() || carrier.mode != Mode::Embedded {
        return Err(Error::NotACover);
    }
    let n = carrier.ambient_dim;
    if cover.is_empty() {
        return Err(Error::NotACover);
    }
    let mut delta = Rat::one();
    // start with a width comparable to the largest available slack
    if let Some(max_slack) = carrier
        .cells
        .iter()
        .flat_map(|c| c.polyhedron.as_ref().unwrap().vertices.iter())
        .flat_map(|v| cover.iter().filter_map(|u| u.min_slack(v)))
        .max()
    {
        if max_slack > Rat::zero() {
            delta = max_slack / rat::int(4);
        }
    }
    for _ in 0..MIN_RAMP_EXPONENT {
        let refined = refine_for_ramps(carrier, cover, &delta)?;
        if shrunk_sets_cover(&refined, cover, &delta) {
            return Ok(build_partition(&refined, cover, &delta, n));
        }
        delta /= rat::int(2);
    }
    Err(Error::NotACover)
}

fn refine_for_ramps(carrier: &PolyComplex, cover: &[OpenSet], delta: &Rat) -> Result<PolyComplex> {
    let two = rat::int(2);
    let mut hyperplanes: Vec<(RatVector, Rat)> = Vec::new();
    let all: Vec<&(RatVector, Rat)> = cover.iter().flat_map(|u| u.constraints.iter()).collect();
    for (a, c) in &all {
        hyperplanes.push((a.clone(), c - delta));
        hyperplanes.push((a.clone(), c - &(delta * &two)));
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let a = rat::sub(&all[i].0, &all[j].0);
            if a.iter().all(|x| x.is_zero()) {
                continue;
            }
            hyperplanes.push((a, &all[i].1 - &all[j].1));
        }
    }
    hyperplanes.sort();
    hyperplanes.dedup();
    carrier.slice_all(&hyperplanes)
}

fn shrunk_sets_cover(refined: &PolyComplex, cover: &[OpenSet], delta: &Rat) -> bool {
    let threshold = delta * rat::int(2);
    refined.maximal_cells().into_iter().all(|m| {
        let x = refined.polyhedron(m).relative_interior_point();
        cover
            .iter()
            .any(|u| u.min_slack(&x).is_none_or(|s| s >= threshold))
    })
}

/// The affine piece of `σ_i` active at `x`.
fn bump_piece(u: &OpenSet, x: &[Rat], delta: &Rat, n: usize) -> Affine {
    let Some((a, c)) = u
        .constraints
        .iter()
        .min_by(|(a1, c1), (a2, c2)| (c1 - rat::dot(a1, x)).cmp(&(c2 - rat::dot(a2, x))))
    else {
        return Affine::constant(n, Rat::one());
    };
    // (c − a·x − δ)/δ
    let ramp = Affine::new(rat::scale(a, &(-Rat::one() / delta)), (c - delta) / delta);
    let v = ramp.eval(x);
    if v <= Rat::zero() {
        Affine::constant(n, Rat::zero())
    } else if v >= Rat::one() {
        Affine::constant(n, Rat::one())
    } else {
        ramp
    }
}

fn build_partition(refined: &PolyComplex, cover: &[OpenSet], delta: &Rat, n: usize) -> Vec<PLFunction> {
    let mut pieces: Vec<BTreeMap<usize, Affine>> = vec![BTreeMap::new(); cover.len()];
    for m in refined.maximal_cells() {
        let x = refined.polyhedron(m).relative_interior_point();
        let mut running: Option<Affine> = None;
        for (k, u) in cover.iter().enumerate() {
            let s = bump_piece(u, &x, delta, n);
            let next = match &running {
                Some(r) if r.eval(&x) >= s.eval(&x) => r.clone(),
                _ => s,
            };
            let rho = match &running {
                Some(r) => next.sub(r),
                None => next.clone(),
            };
            pieces[k].insert(m, rho);
            running = Some(next);
        }
    }
    pieces
        .into_iter()
        .map(|p| PLFunction {
            carrier: refined.clone(),
            pieces: p,
        })
        .collect()
}

/// Pullback of `form` to the lattice chart of `p`.
pub fn restrict_to_cell(form: &Superform, p: &Polyhedron) -> Result<Superform> {
    let (a, b) = lattice_chart(p);
    form.pullback(&a, &b)
}
