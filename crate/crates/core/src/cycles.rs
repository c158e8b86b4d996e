//! Tropical cycles (weighted pure complexes), balancing, degree, and the
//! tube model of a neighbourhood of a cycle.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::complex::PolyComplex;
use crate::error::{Error, Result};
use crate::linalg;
use crate::polyhedron::Polyhedron;
use crate::rat::{self, to_rat_vec, IntVector, Rat, RatVector};

/// A pure `dim`-dimensional complex with a nonzero integer weight on each
/// top cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCycle {
    pub support: PolyComplex,
    pub dim: usize,
    pub weights: BTreeMap<usize, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BalanceReport {
    /// Interior codimension-one faces whose weighted normal sum leaves
    /// `L(τ)`, with that sum.
    pub violations: Vec<(usize, IntVector)>,
    /// Codimension-one faces with a single coface.
    pub boundary: Vec<usize>,
}

impl BalanceReport {
    pub fn is_balanced(&self) -> bool {
        self.violations.is_empty()
    }
}

impl WeightedCycle {
    pub fn new(support: PolyComplex, dim: usize, weights: BTreeMap<usize, i64>) -> Result<Self> {
        let top = support.maximal_cells();
        if top.iter().any(|&c| support.cells[c].dim != dim) {
            return Err(Error::WrongDimension {
                expected: dim,
                found: support.dim().max(0) as usize,
            });
        }
        for &c in &top {
            match weights.get(&c) {
                Some(&w) if w != 0 => {}
                _ => return Err(Error::Schema(format!("top cell {c} needs a nonzero weight"))),
            }
        }
        if weights.keys().any(|k| !top.contains(k)) {
            return Err(Error::Schema("weight on a cell that is not a top cell".into()));
        }
        Ok(WeightedCycle {
            support,
            dim,
            weights,
        })
    }

    /// Every top cell with weight `w`.
    pub fn uniform(support: PolyComplex, w: i64) -> Result<Self> {
        let dim = support.dim().max(0) as usize;
        let weights = support.maximal_cells().into_iter().map(|c| (c, w)).collect();
        Self::new(support, dim, weights)
    }

    /// Zero-cycle `Σ m_i [p_i]` in `Q^n`.
    pub fn points(n: usize, points: &[(RatVector, i64)]) -> Result<Self> {
        let mut merged: BTreeMap<RatVector, i64> = BTreeMap::new();
        for (p, m) in points {
            if p.len() != n {
                return Err(Error::DimensionMismatch("point of wrong length".into()));
            }
            *merged.entry(p.clone()).or_default() += m;
        }
        merged.retain(|_, m| *m != 0);
        let polys: Vec<Polyhedron> = merged.keys().map(|p| Polyhedron::point(p.clone())).collect();
        let mut support = PolyComplex::face_lattice_unchecked(&polys);
        support.ambient_dim = n;
        let weights = merged
            .iter()
            .map(|(p, m)| (support.find_cell(&Polyhedron::point(p.clone())).unwrap(), *m))
            .collect();
        Self::new(support, 0, weights)
    }

    pub fn weight(&self, cell: usize) -> i64 {
        self.weights.get(&cell).copied().unwrap_or(0)
    }

    pub fn top_cells(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    /// Checks `Σ_{σ ⊃ τ} m_σ u_{σ/τ} ∈ L_Z(τ)` at every codimension-one face.
    pub fn check_balanced(&self) -> Result<BalanceReport> {
        let mut report = BalanceReport::default();
        if self.dim == 0 {
            return Ok(report);
        }
        for tau in self.support.cells_of_dim(self.dim - 1) {
            let cofaces: Vec<_> = self
                .support
                .cofacets_of(tau)
                .into_iter()
                .filter(|i| self.weights.contains_key(&i.cell))
                .collect();
            if cofaces.len() == 1 && self.support.mode == crate::complex::Mode::Embedded {
                report.boundary.push(tau);
                continue;
            }
            let n = self.support.ambient_dim;
            let mut sum = vec![0i64; n];
            for inc in &cofaces {
                let u = self.support.incidence_normal(*inc)?;
                let m = self.weight(inc.cell);
                for (s, x) in sum.iter_mut().zip(&u) {
                    *s += m * x;
                }
            }
            let basis: Vec<RatVector> = self.support.cells[tau].basis.iter().map(|b| to_rat_vec(b)).collect();
            let inside = sum.iter().all(|&x| x == 0)
                || linalg::solve_in_span(&basis, &to_rat_vec(&sum)).is_some();
            if !inside {
                report.violations.push((tau, sum));
            }
        }
        Ok(report)
    }

    /// Sum of the weights of a zero-cycle.
    pub fn degree(&self) -> Result<i64> {
        if self.dim != 0 {
            return Err(Error::WrongDimension {
                expected: 0,
                found: self.dim,
            });
        }
        Ok(self.weights.values().sum())
    }

    /// The same cycle on a refinement: each refined top cell inherits the
    /// weight of the top cell containing it.
    pub fn refine(&self, other: &PolyComplex) -> Result<WeightedCycle> {
        let r = self.support.refine(other)?;
        let mut weights = BTreeMap::new();
        for c in r.complex.maximal_cells() {
            if r.complex.cells[c].dim != self.dim {
                continue;
            }
            let parent = r.parent_left[c];
            let host = self
                .support
                .maximal_cofaces(parent)
                .into_iter()
                .find(|m| self.weights.contains_key(m))
                .ok_or_else(|| Error::Schema("refined cell outside the support".into()))?;
            weights.insert(c, self.weight(host));
        }
        WeightedCycle::new(r.complex, self.dim, weights)
    }
}

/// `P × [h, H]^q` over a bounded, full-dimensional base `P ⊂ Q^{N−q}`, with
/// tube coordinates `y_1..y_q` appended after the base coordinates. The box
/// `P × [floor, H]^q` below the tube carries the test forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeModel {
    pub base: PolyComplex,
    pub q: usize,
    pub h: Rat,
    pub cap: Rat,
    pub floor: Rat,
    pub weight: i64,
}

/// Subsets of `{0..q}` in the order of increasing size, then lexicographic.
pub fn subsets(q: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..1usize << q)
        .map(|mask| (0..q).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

impl TubeModel {
    pub fn base_dim(&self) -> usize {
        self.base.ambient_dim
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim + self.q
    }

    /// Coordinate index of `y_i` (0-based `i`).
    pub fn y(&self, i: usize) -> usize {
        self.base.ambient_dim + i
    }

    pub fn y_coords(&self) -> Vec<usize> {
        (0..self.q).map(|i| self.y(i)).collect()
    }

    /// Inward corner normal `+e_{y_i}`.
    pub fn corner_normal(&self, i: usize) -> RatVector {
        let mut v = vec![Rat::zero(); self.ambient_dim()];
        v[self.y(i)] = Rat::one();
        v
    }

    fn with_fibre(&self, fibre: &[(Rat, Rat)]) -> Vec<Polyhedron> {
        let lo: Vec<Rat> = fibre.iter().map(|f| f.0.clone()).collect();
        let hi: Vec<Rat> = fibre.iter().map(|f| f.1.clone()).collect();
        let block = Polyhedron::cuboid(&lo, &hi).expect("valid box");
        self.base
            .maximal_cells()
            .into_iter()
            .map(|c| self.base.polyhedron(c).product(&block).expect("product of polyhedra"))
            .collect()
    }

    /// Cells of `V^I = P × Π_{i∈I} {h} × Π_{i∉I} [h, H]` (0-based `I`).
    pub fn corner(&self, set: &[usize]) -> Vec<Polyhedron> {
        let fibre: Vec<(Rat, Rat)> = (0..self.q)
            .map(|i| {
                if set.contains(&i) {
                    (self.h.clone(), self.h.clone())
                } else {
                    (self.h.clone(), self.cap.clone())
                }
            })
            .collect();
        self.with_fibre(&fibre)
    }

    /// All corner faces `V^I`, keyed by `I`.
    pub fn corners(&self) -> Vec<(Vec<usize>, Vec<Polyhedron>)> {
        subsets(self.q)
            .into_iter()
            .map(|s| {
                let cells = self.corner(&s);
                (s, cells)
            })
            .collect()
    }

    /// The tube complex `T = V^∅`.
    pub fn tube_complex(&self) -> PolyComplex {
        PolyComplex::face_lattice_unchecked(&self.corner(&[]))
    }

    /// The working box `P × [floor, H]^q`, subdivided along `y_i = h`.
    pub fn box_complex(&self) -> Result<PolyComplex> {
        let fibre = vec![(self.floor.clone(), self.cap.clone()); self.q];
        let c = PolyComplex::face_lattice_unchecked(&self.with_fibre(&fibre));
        let cuts: Vec<(RatVector, Rat)> = (0..self.q).map(|i| (self.corner_normal(i), self.h.clone())).collect();
        c.slice_all(&cuts)
    }

    /// The part `{min_i y_i ≤ h}` of the box.
    pub fn outer_region(&self) -> Result<PolyComplex> {
        let b = self.box_complex()?;
        let keep: Vec<usize> = b
            .maximal_cells()
            .into_iter()
            .filter(|&c| {
                let x = b.polyhedron(c).relative_interior_point();
                (0..self.q).any(|i| x[self.y(i)] < self.h)
            })
            .collect();
        Ok(b.subcomplex(&keep))
    }

    /// Whether `x` lies in the closed tube `y_i ≥ h` for all `i`.
    pub fn in_tube(&self, x: &[Rat]) -> bool {
        (0..self.q).all(|i| x[self.y(i)] >= self.h)
    }
}

/// Builds the tube model over `base` with `q` tube directions, height `h`,
/// cap `H`, and cycle weight `m`; the box floor defaults to `h − 1`.
pub fn build_tube(base: PolyComplex, q: usize, h: Rat, cap: Rat, m: i64) -> Result<TubeModel> {
    if cap <= h {
        return Err(Error::BadRange(format!(
            "cap {} must exceed height {}",
            rat::fmt_rat(&cap),
            rat::fmt_rat(&h)
        )));
    }
    if q == 0 {
        return Err(Error::BadRange("a tube needs q ≥ 1".into()));
    }
    if base.is_empty() || !base.is_bounded() {
        return Err(Error::BadRange("tube base must be a nonempty bounded complex".into()));
    }
    if base.dim() != base.ambient_dim as isize || !base.is_pure() {
        return Err(Error::BadRange("tube base must be pure and full-dimensional".into()));
    }
    let floor = &h - Rat::one();
    Ok(TubeModel {
        base,
        q,
        h,
        cap,
        floor,
        weight: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::examples::{cube, point, tropical_line};
    use crate::rat::int;

    #[test]
    fn whole_space_is_balanced() {
        let plane = Polyhedron::new(2, vec![vec![int(0), int(0)]], vec![], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let z = WeightedCycle::uniform(PolyComplex::face_lattice(&[plane]).unwrap(), 1).unwrap();
        assert!(z.check_balanced().unwrap().is_balanced());
    }

    #[test]
    fn tropical_line_balancing() {
        let l = tropical_line();
        let z = WeightedCycle::uniform(l.clone(), 1).unwrap();
        let rep = z.check_balanced().unwrap();
        assert!(rep.is_balanced());
        assert!(rep.boundary.is_empty());

        let diag = l
            .maximal_cells()
            .into_iter()
            .find(|&c| l.polyhedron(c).rays == vec![vec![1, 1]])
            .unwrap();
        let mut w = z.weights.clone();
        w.insert(diag, 2);
        let bad = WeightedCycle::new(l, 1, w).unwrap().check_balanced().unwrap();
        assert_eq!(bad.violations.len(), 1);
        assert_eq!(bad.violations[0].1, vec![1, 1]);
    }

    #[test]
    fn degrees() {
        let empty = WeightedCycle::points(2, &[]).unwrap();
        assert_eq!(empty.degree().unwrap(), 0);
        let z = WeightedCycle::points(1, &[(vec![int(0)], 2), (vec![int(1)], 3)]).unwrap();
        assert_eq!(z.degree().unwrap(), 5);
        let z = WeightedCycle::points(1, &[(vec![int(0)], -1), (vec![int(1)], 4)]).unwrap();
        assert_eq!(z.degree().unwrap(), 3);
        let seg = WeightedCycle::uniform(cube(1, 0, 1), 1).unwrap();
        assert_eq!(seg.degree(), Err(Error::WrongDimension { expected: 0, found: 1 }));
    }

    #[test]
    fn tube_faces() {
        let t = build_tube(point(), 1, int(0), int(1), 1).unwrap();
        assert_eq!(t.tube_complex().maximal_cells().len(), 1);
        let v1 = t.corner(&[0]);
        assert_eq!(v1, vec![Polyhedron::point(vec![int(0)])]);

        let t = build_tube(cube(1, 0, 1), 1, int(0), int(1), 1).unwrap();
        assert_eq!(t.corner(&[]), vec![Polyhedron::cuboid(&[int(0), int(0)], &[int(1), int(1)]).unwrap()]);
        assert_eq!(t.corner(&[0]), vec![Polyhedron::hull_int(&[vec![0, 0], vec![1, 0]]).unwrap()]);

        let t = build_tube(point(), 2, int(0), int(1), 1).unwrap();
        assert_eq!(t.corner(&[0, 1]), vec![Polyhedron::point(vec![int(0), int(0)])]);

        for q in 1..=3 {
            let t = build_tube(cube(1, 0, 1), q, int(0), int(2), 1).unwrap();
            let corners = t.corners();
            assert_eq!(corners.len(), 1 << q);
            for (set, cells) in corners {
                assert_eq!(cells[0].dim() as usize, 1 + q - set.len());
            }
        }
    }

    #[test]
    fn tube_range_errors() {
        assert!(matches!(build_tube(point(), 1, int(1), int(1), 1), Err(Error::BadRange(_))));
        assert!(matches!(build_tube(tropical_line(), 1, int(0), int(1), 1), Err(Error::BadRange(_))));
    }

    #[test]
    fn outer_region_excludes_tube() {
        let t = build_tube(cube(1, 0, 1), 2, int(0), int(1), 1).unwrap();
        let out = t.outer_region().unwrap();
        assert_eq!(out.maximal_cells().len(), 3);
    }
}
