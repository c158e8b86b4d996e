//! Rational polyhedral complexes: face lattices, incidence signs, primitive
//! normals and common refinements.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyhedron::Polyhedron;
use crate::rat::{self, to_rat_vec, IntVector, Rat, RatVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Embedded,
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub dim: usize,
    /// Basis of `L_Z(σ)`; in abstract mode expressed in the complex's
    /// parallelizing lattice `Z^M`.
    pub basis: Vec<IntVector>,
    /// Geometry: always present in embedded mode; in abstract mode an
    /// optional lift of the cell into `Q^M`.
    pub polyhedron: Option<Polyhedron>,
}

/// A codimension-one incidence `face ⊂ cell` with its orientation sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Incidence {
    pub face: usize,
    pub cell: usize,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyComplex {
    pub mode: Mode,
    pub ambient_dim: usize,
    pub cells: Vec<Cell>,
    pub incidences: Vec<Incidence>,
}

/// Result of [`PolyComplex::refine`]: the refined complex and, for every
/// refined cell, the smallest cell of each input containing it.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub complex: PolyComplex,
    pub parent_left: Vec<usize>,
    pub parent_right: Vec<usize>,
}

impl PolyComplex {
    /// The closure under faces of `maximal` with consistent incidence signs.
    /// Fails with `NonComplex` if two cells meet in something that is not a
    /// common face.
    pub fn face_lattice(maximal: &[Polyhedron]) -> Result<PolyComplex> {
        let nonempty: Vec<&Polyhedron> = maximal.iter().filter(|p| !p.is_empty()).collect();
        for i in 0..nonempty.len() {
            for j in i + 1..nonempty.len() {
                let (a, b) = (nonempty[i], nonempty[j]);
                let meet = a.intersect(b)?;
                if meet.is_empty() {
                    continue;
                }
                if !(meet.is_face_of(a) && meet.is_face_of(b)) {
                    return Err(Error::NonComplex(format!(
                        "cells {i} and {j} intersect in a non-face"
                    )));
                }
            }
        }
        Ok(Self::face_lattice_unchecked(maximal))
    }

    /// As [`face_lattice`](Self::face_lattice) without the pairwise
    /// intersection check; for inputs that are complexes by construction.
    pub fn face_lattice_unchecked(maximal: &[Polyhedron]) -> PolyComplex {
        let ambient_dim = maximal.first().map_or(0, |p| p.ambient_dim);
        let mut all: BTreeSet<(isize, Polyhedron)> = BTreeSet::new();
        let mut facets_of: BTreeMap<Polyhedron, Vec<Polyhedron>> = BTreeMap::new();
        let mut level: BTreeSet<Polyhedron> = maximal.iter().filter(|p| !p.is_empty()).cloned().collect();
        while !level.is_empty() {
            let found: Vec<(Polyhedron, isize, Vec<Polyhedron>)> = level
                .into_par_iter()
                .map(|p| {
                    let d = p.dim();
                    let facets = p.facets();
                    (p, d, facets)
                })
                .collect();
            let mut next = BTreeSet::new();
            for (p, d, facets) in found {
                for f in &facets {
                    if !facets_of.contains_key(f) {
                        next.insert(f.clone());
                    }
                }
                all.insert((d, p.clone()));
                facets_of.insert(p, facets);
            }
            next.retain(|f| !facets_of.contains_key(f));
            level = next;
        }
        let ordered: Vec<Polyhedron> = all.into_iter().map(|(_, p)| p).collect();
        let index: BTreeMap<&Polyhedron, usize> =
            ordered.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let cells: Vec<Cell> = ordered
            .iter()
            .map(|p| Cell {
                dim: p.dim() as usize,
                basis: p.lattice_basis(),
                polyhedron: Some(p.clone()),
            })
            .collect();
        let mut complex = PolyComplex {
            mode: Mode::Embedded,
            ambient_dim,
            cells,
            incidences: Vec::new(),
        };
        let complex_ref = &complex;
        let index = &index;
        let mut incidences: Vec<Incidence> = ordered
            .par_iter()
            .enumerate()
            .flat_map_iter(|(ci, p)| {
                facets_of[p].iter().map(move |f| {
                    let fi = index[f];
                    let sign = complex_ref
                        .orientation_sign(fi, ci)
                        .expect("facet relation from face enumeration");
                    Incidence {
                        face: fi,
                        cell: ci,
                        sign,
                    }
                })
            })
            .collect();
        incidences.sort();
        complex.incidences = incidences;
        complex
    }

    /// An abstract complex: cells given by lattice rank and basis inside a
    /// common `Z^M`, with explicit incidences (repeats allowed).
    pub fn abstract_complex(
        ambient_dim: usize,
        cells: Vec<Cell>,
        incidences: Vec<Incidence>,
    ) -> Result<PolyComplex> {
        for c in &cells {
            if c.basis.len() != c.dim || c.basis.iter().any(|b| b.len() != ambient_dim) {
                return Err(Error::Schema("abstract cell basis does not match its rank".into()));
            }
        }
        for inc in &incidences {
            if inc.face >= cells.len() || inc.cell >= cells.len() {
                return Err(Error::Schema("incidence refers to a missing cell".into()));
            }
            if cells[inc.face].dim + 1 != cells[inc.cell].dim {
                return Err(Error::Schema("incidence between cells of wrong dimensions".into()));
            }
            let big: Vec<RatVector> = cells[inc.cell].basis.iter().map(|b| to_rat_vec(b)).collect();
            for b in &cells[inc.face].basis {
                if linalg::solve_in_span(&big, &to_rat_vec(b)).is_none() {
                    return Err(Error::Schema("face lattice is not inside the cell lattice".into()));
                }
            }
        }
        let c = PolyComplex {
            mode: Mode::Abstract,
            ambient_dim,
            cells,
            incidences,
        };
        if !c.boundary_squares_to_zero() {
            return Err(Error::NonComplex("incidence signs violate ∂∘∂ = 0".into()));
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.cells.iter().map(|c| c.dim as isize).max().unwrap_or(-1)
    }

    pub fn polyhedron(&self, id: usize) -> &Polyhedron {
        self.cells[id]
            .polyhedron
            .as_ref()
            .expect("cell has no geometric model")
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == d).collect()
    }

    /// Cells that are not a face of any other cell.
    pub fn maximal_cells(&self) -> Vec<usize> {
        let has_coface: BTreeSet<usize> = self.incidences.iter().map(|i| i.face).collect();
        (0..self.cells.len()).filter(|i| !has_coface.contains(i)).collect()
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.maximal_cells().iter().all(|&i| self.cells[i].dim as isize == d)
    }

    pub fn facets_of(&self, cell: usize) -> Vec<Incidence> {
        self.incidences.iter().filter(|i| i.cell == cell).copied().collect()
    }

    pub fn cofacets_of(&self, face: usize) -> Vec<Incidence> {
        self.incidences.iter().filter(|i| i.face == face).copied().collect()
    }

    /// All cells having `cell` as a (not necessarily proper) face.
    pub fn star(&self, cell: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![cell];
        while let Some(c) = stack.pop() {
            if out.insert(c) {
                stack.extend(self.cofacets_of(c).iter().map(|i| i.cell));
            }
        }
        out
    }

    /// All faces of `cell`, including itself.
    pub fn closure(&self, cell: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![cell];
        while let Some(c) = stack.pop() {
            if out.insert(c) {
                stack.extend(self.facets_of(c).iter().map(|i| i.face));
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|c| if c.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn boundary_squares_to_zero(&self) -> bool {
        // Σ_τ [σ:τ][τ:ρ] = 0 for every σ, ρ two dimensions apart
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for outer in &self.incidences {
            for inner in self.incidences.iter().filter(|i| i.cell == outer.face) {
                *acc.entry((outer.cell, inner.face)).or_default() +=
                    (outer.sign * inner.sign) as i64;
            }
        }
        acc.values().all(|&v| v == 0)
    }

    /// Inward primitive normal of the facet `tau` of `sigma`: a vector of
    /// `L_Z(σ)` generating `L_Z(σ)/L_Z(τ)` and pointing into `σ`, reduced
    /// modulo the Hermite basis of `L_Z(τ)`.
    pub fn primitive_normal(&self, tau: usize, sigma: usize) -> Result<IntVector> {
        let inc = self
            .incidences
            .iter()
            .find(|i| i.face == tau && i.cell == sigma)
            .copied()
            .ok_or(Error::NotAFacet { tau, sigma })?;
        self.incidence_normal(inc)
    }

    /// Inward normal for one specific incidence. In abstract mode the
    /// direction is fixed by the incidence sign (outward-first orientation).
    pub fn incidence_normal(&self, inc: Incidence) -> Result<IntVector> {
        let (tau, sigma) = (inc.face, inc.cell);
        let u = lattice_complement(&self.cells[sigma].basis, &self.cells[tau].basis, self.ambient_dim)
            .ok_or(Error::NotAFacet { tau, sigma })?;
        let inward = match self.mode {
            Mode::Embedded => {
                let w = inward_witness(self.polyhedron(tau), self.polyhedron(sigma))
                    .ok_or(Error::NotAFacet { tau, sigma })?;
                side_of(&self.cells[sigma].basis, &self.cells[tau].basis, &u, &w) > 0
            }
            Mode::Abstract => {
                // sign(det[-u_in, B_τ]) = incidence sign
                let s = orientation_det_sign(&self.cells[sigma].basis, &self.cells[tau].basis, &u);
                -s == inc.sign
            }
        };
        let u: IntVector = if inward { u } else { u.iter().map(|x| -x).collect() };
        Ok(linalg::reduce_mod_hnf(&u, &self.cells[tau].basis))
    }

    fn orientation_sign(&self, tau: usize, sigma: usize) -> Option<i32> {
        let u = lattice_complement(&self.cells[sigma].basis, &self.cells[tau].basis, self.ambient_dim)?;
        let w = inward_witness(self.polyhedron(tau), self.polyhedron(sigma))?;
        let s = side_of(&self.cells[sigma].basis, &self.cells[tau].basis, &u, &w);
        let u_in: IntVector = if s > 0 { u } else { u.iter().map(|x| -x).collect() };
        // outward normal first
        Some(-orientation_det_sign(&self.cells[sigma].basis, &self.cells[tau].basis, &u_in))
    }

    /// Id of the cell whose polyhedron equals `p`.
    pub fn find_cell(&self, p: &Polyhedron) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.polyhedron.as_ref() == Some(p))
    }

    /// Smallest cell whose relative interior contains `x` (embedded mode).
    pub fn locate(&self, x: &[Rat]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, c) in self.cells.iter().enumerate() {
            if let Some(p) = &c.polyhedron {
                if p.contains(x) && best.is_none_or(|b| self.cells[b].dim > c.dim) {
                    best = Some(i);
                }
            }
        }
        best
    }

    /// Maximal cells of `self` containing the cell `cell`.
    pub fn maximal_cofaces(&self, cell: usize) -> Vec<usize> {
        let max: BTreeSet<usize> = self.maximal_cells().into_iter().collect();
        self.star(cell).into_iter().filter(|c| max.contains(c)).collect()
    }

    /// Common refinement on the common support: the cells are the nonempty
    /// intersections of maximal cells of `self` and `other`.
    pub fn refine(&self, other: &PolyComplex) -> Result<Refinement> {
        if self.mode != Mode::Embedded || other.mode != Mode::Embedded {
            return Err(Error::Schema("refine needs embedded complexes".into()));
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch("refine across ambient dimensions".into()));
        }
        let mut pieces: BTreeSet<Polyhedron> = BTreeSet::new();
        for a in self.maximal_cells() {
            for b in other.maximal_cells() {
                let meet = self.polyhedron(a).intersect(other.polyhedron(b))?;
                if !meet.is_empty() {
                    pieces.insert(meet);
                }
            }
        }
        // drop pieces that are faces of larger pieces
        let list: Vec<Polyhedron> = pieces.into_iter().collect();
        let maximal: Vec<Polyhedron> = list
            .iter()
            .filter(|p| {
                !list
                    .iter()
                    .any(|q| q != *p && q.dim() > p.dim() && p.is_face_of(q))
            })
            .cloned()
            .collect();
        let complex = PolyComplex::face_lattice(&maximal)?;
        let parent = |host: &PolyComplex, c: &Cell| -> usize {
            let x = c.polyhedron.as_ref().unwrap().relative_interior_point();
            host.locate(&x).expect("refined cell outside its parent")
        };
        let parent_left = complex.cells.iter().map(|c| parent(self, c)).collect();
        let parent_right = complex.cells.iter().map(|c| parent(other, c)).collect();
        Ok(Refinement {
            complex,
            parent_left,
            parent_right,
        })
    }

    /// Subdivides every maximal cell along the hyperplane `a·x = b`.
    pub fn slice(&self, a: &[Rat], b: &Rat) -> Result<PolyComplex> {
        self.slice_all(&[(a.to_vec(), b.clone())])
    }

    /// Subdivides every maximal cell along all the given hyperplanes.
    pub fn slice_all(&self, hyperplanes: &[(RatVector, Rat)]) -> Result<PolyComplex> {
        let pieces: Vec<Result<Vec<Polyhedron>>> = self
            .maximal_cells()
            .into_par_iter()
            .map(|m| {
                let mut parts = vec![self.polyhedron(m).clone()];
                for (a, b) in hyperplanes {
                    let neg: RatVector = a.iter().map(|x| -x.clone()).collect();
                    let mut next = Vec::with_capacity(parts.len() * 2);
                    for p in parts {
                        let upper = p.cut(a, b)?;
                        let lower = p.cut(&neg, &-b.clone())?;
                        if upper.dim() == p.dim() && lower.dim() == p.dim() {
                            next.push(upper);
                            next.push(lower);
                        } else {
                            next.push(p);
                        }
                    }
                    parts = next;
                }
                Ok(parts)
            })
            .collect();
        let mut out = Vec::new();
        for p in pieces {
            out.extend(p?);
        }
        Ok(PolyComplex::face_lattice_unchecked(&out))
    }

    /// Subcomplex generated by the given maximal cells.
    pub fn subcomplex(&self, cells: &[usize]) -> PolyComplex {
        if self.mode == Mode::Abstract {
            let keep: Vec<usize> = cells
                .iter()
                .flat_map(|&c| self.closure(c))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let new_id = |c: usize| keep.binary_search(&c).ok();
            let incidences = self
                .incidences
                .iter()
                .filter_map(|i| {
                    Some(Incidence {
                        face: new_id(i.face)?,
                        cell: new_id(i.cell)?,
                        sign: i.sign,
                    })
                })
                .collect();
            return PolyComplex {
                mode: Mode::Abstract,
                ambient_dim: self.ambient_dim,
                cells: keep.iter().map(|&c| self.cells[c].clone()).collect(),
                incidences,
            };
        }
        let polys: Vec<Polyhedron> = cells.iter().map(|&c| self.polyhedron(c).clone()).collect();
        PolyComplex::face_lattice_unchecked(&polys)
    }

    pub fn is_bounded(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.polyhedron.as_ref().is_none_or(|p| p.is_bounded()))
    }
}

/// A vector `u ∈ L_Z(σ)` with `L_Z(σ) = L_Z(τ) + Z u`, up to sign.
fn lattice_complement(sigma: &[IntVector], tau: &[IntVector], n: usize) -> Option<IntVector> {
    let d = sigma.len();
    if tau.len() + 1 != d {
        return None;
    }
    let sb: Vec<RatVector> = sigma.iter().map(|b| to_rat_vec(b)).collect();
    let coords: Vec<RatVector> = tau
        .iter()
        .map(|t| linalg::solve_in_span(&sb, &to_rat_vec(t)))
        .collect::<Option<_>>()?;
    let coords_int: Vec<IntVector> = coords
        .iter()
        .map(|c| {
            if c.iter().all(|x| x.is_integer()) {
                Some(c.iter().map(|x| i64::try_from(x.to_integer()).unwrap()).collect())
            } else {
                None
            }
        })
        .collect::<Option<_>>()?;
    // primitive functional vanishing on L_Z(τ)
    let phi = if coords_int.is_empty() {
        vec![1]
    } else {
        let k = linalg::integer_kernel(&coords_int, d);
        if k.len() != 1 {
            return None;
        }
        k[0].clone()
    };
    // c with φ·c = 1
    let c = unit_preimage(&phi)?;
    let mut u = vec![0i64; n];
    for (ci, b) in c.iter().zip(sigma) {
        for (uj, bj) in u.iter_mut().zip(b) {
            *uj += ci * bj;
        }
    }
    Some(u)
}

fn unit_preimage(phi: &[i64]) -> Option<IntVector> {
    // iterated extended gcd
    let mut g = 0i64;
    let mut coef = vec![0i64; phi.len()];
    for (i, &p) in phi.iter().enumerate() {
        if p == 0 {
            continue;
        }
        if g == 0 {
            g = p;
            coef[i] = 1;
            continue;
        }
        let (ng, s, t) = egcd(g, p);
        for c in coef.iter_mut().take(i) {
            *c *= s;
        }
        coef[i] = t;
        g = ng;
    }
    match g {
        1 => Some(coef),
        -1 => Some(coef.iter().map(|x| -x).collect()),
        _ => None,
    }
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = egcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

/// A direction from `τ` into `σ` (vertex or ray of σ outside τ).
fn inward_witness(tau: &Polyhedron, sigma: &Polyhedron) -> Option<RatVector> {
    let base = tau.vertices.first()?;
    if let Some(v) = sigma.vertices.iter().find(|v| !tau.vertices.contains(v)) {
        return Some(rat::sub(v, base));
    }
    sigma
        .rays
        .iter()
        .find(|r| !tau.rays.contains(r))
        .map(|r| to_rat_vec(r))
}

/// Sign of the `u`-coordinate of `w` in the basis `B_τ ∪ {u}` of `L(σ)`.
fn side_of(sigma: &[IntVector], tau: &[IntVector], u: &[i64], w: &[Rat]) -> i32 {
    let _ = sigma;
    let mut basis: Vec<RatVector> = vec![to_rat_vec(u)];
    basis.extend(tau.iter().map(|t| to_rat_vec(t)));
    let c = linalg::solve_in_span(&basis, w).expect("witness outside the cell span");
    rat::sign(&c[0])
}

/// sign det of `[-u, B_τ]` written in the basis `B_σ`.
fn orientation_det_sign(sigma: &[IntVector], tau: &[IntVector], u_in: &[i64]) -> i32 {
    let sb: Vec<RatVector> = sigma.iter().map(|b| to_rat_vec(b)).collect();
    let out: RatVector = u_in.iter().map(|&x| rat::int(-x)).collect();
    let mut rows = vec![linalg::solve_in_span(&sb, &out).expect("normal outside cell lattice")];
    for t in tau {
        rows.push(linalg::solve_in_span(&sb, &to_rat_vec(t)).expect("face outside cell lattice"));
    }
    let d = linalg::det(&rows);
    debug_assert!(!d.is_zero());
    if d.is_positive() {
        1
    } else {
        -1
    }
}

/// Standard small complexes used by demos and tests.
pub mod examples {
    use super::*;
    use crate::rat::int;

    pub fn point() -> PolyComplex {
        PolyComplex::face_lattice_unchecked(&[Polyhedron::point(vec![])])
    }

    /// `[lo, hi]^n` as a single cell.
    pub fn cube(n: usize, lo: i64, hi: i64) -> PolyComplex {
        let p = Polyhedron::cuboid(&vec![int(lo); n], &vec![int(hi); n]).unwrap();
        PolyComplex::face_lattice_unchecked(&[p])
    }

    /// The abstract torus `Q^2/Z^2`: one vertex, two edges, one square.
    pub fn torus2() -> PolyComplex {
        let cells = vec![
            Cell { dim: 0, basis: vec![], polyhedron: None },
            Cell { dim: 1, basis: vec![vec![1, 0]], polyhedron: None },
            Cell { dim: 1, basis: vec![vec![0, 1]], polyhedron: None },
            Cell {
                dim: 2,
                basis: vec![vec![1, 0], vec![0, 1]],
                polyhedron: Some(Polyhedron::cuboid(&[int(0), int(0)], &[int(1), int(1)]).unwrap()),
            },
        ];
        let inc = |face, cell, sign| Incidence { face, cell, sign };
        PolyComplex::abstract_complex(
            2,
            cells,
            vec![
                inc(0, 1, 1),
                inc(0, 1, -1),
                inc(0, 2, 1),
                inc(0, 2, -1),
                inc(1, 3, 1),
                inc(1, 3, -1),
                inc(2, 3, 1),
                inc(2, 3, -1),
            ],
        )
        .unwrap()
    }

    /// The abstract circle `Q/Z`: one vertex, one edge.
    pub fn circle() -> PolyComplex {
        let cells = vec![
            Cell { dim: 0, basis: vec![], polyhedron: None },
            Cell {
                dim: 1,
                basis: vec![vec![1]],
                polyhedron: Some(Polyhedron::cuboid(&[int(0)], &[int(1)]).unwrap()),
            },
        ];
        PolyComplex::abstract_complex(
            1,
            cells,
            vec![
                Incidence { face: 0, cell: 1, sign: 1 },
                Incidence { face: 0, cell: 1, sign: -1 },
            ],
        )
        .unwrap()
    }

    /// The standard tropical line in `Q^2`: rays `(-1,0)`, `(0,-1)`, `(1,1)`.
    pub fn tropical_line() -> PolyComplex {
        let o = vec![int(0), int(0)];
        let ray = |r: IntVector| Polyhedron::new(2, vec![o.clone()], vec![r], vec![]).unwrap();
        PolyComplex::face_lattice_unchecked(&[ray(vec![-1, 0]), ray(vec![0, -1]), ray(vec![1, 1])])
    }
}
