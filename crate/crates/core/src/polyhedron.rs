//! Rational polyhedra in V-representation, with the face structure, the
//! H-representation and the cell lattice derived on demand.
//!
//! Internally a polyhedron is handled through its homogenization: vertices
//! become `(v, 1)`, rays and lineality `(r, 0)`. Facets of the cone are the
//! extreme rays of its dual, found by the double description method; the
//! result is cached per polyhedron.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rat::{self, to_rat_vec, IntVector, Rat, RatVector};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polyhedron {
    pub ambient_dim: usize,
    pub vertices: Vec<RatVector>,
    pub rays: Vec<IntVector>,
    pub lineality: Vec<IntVector>,
}

/// Affine H-representation: `eq.0 · x = eq.1` and `ineq.0 · x >= ineq.1`.
#[derive(Debug, Clone, Default)]
pub struct HRep {
    pub equations: Vec<(RatVector, Rat)>,
    pub inequalities: Vec<(RatVector, Rat)>,
}

impl HRep {
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|(a, b)| rat::dot(a, x) == *b)
            && self.inequalities.iter().all(|(a, b)| rat::dot(a, x) >= *b)
    }

    /// Strictly inside every inequality (relative interior when the
    /// inequality list is irredundant).
    pub fn contains_relint(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|(a, b)| rat::dot(a, x) == *b)
            && self.inequalities.iter().all(|(a, b)| rat::dot(a, x) > *b)
    }
}

/// Combinatorial face data: each face is a set of generator indices.
#[derive(Debug, Clone)]
struct ConeStructure {
    gens: Vec<RatVector>,
    is_vertex: Vec<bool>,
    lin: Vec<RatVector>,
    /// facet normals in homogeneous coordinates, with their zero sets
    facets: Vec<(RatVector, BTreeSet<usize>)>,
    span: Vec<RatVector>,
}

fn homogenize(p: &Polyhedron) -> (Vec<RatVector>, Vec<bool>, Vec<RatVector>) {
    let mut gens = Vec::new();
    let mut is_vertex = Vec::new();
    for v in &p.vertices {
        let mut g = v.clone();
        g.push(Rat::one());
        gens.push(g);
        is_vertex.push(true);
    }
    for r in &p.rays {
        let mut g = to_rat_vec(r);
        g.push(Rat::zero());
        gens.push(g);
        is_vertex.push(false);
    }
    let lin = p
        .lineality
        .iter()
        .map(|l| {
            let mut g = to_rat_vec(l);
            g.push(Rat::zero());
            g
        })
        .collect();
    (gens, is_vertex, lin)
}

/// Fixed-width bit set over row indices.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn contains_all(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

fn primitive_ray(v: &[Rat]) -> RatVector {
    to_rat_vec(&linalg::primitive_integer(v))
}

/// Extreme rays of the pointed cone `{x ∈ Q^d : r·x ≥ 0 for all rows r}`;
/// the rows must have rank `d`. Double description with the combinatorial
/// adjacency test.
fn extreme_rays(rows: &[RatVector], d: usize) -> Vec<RatVector> {
    let n = rows.len();
    let mut start: Vec<usize> = Vec::with_capacity(d);
    let mut picked: Vec<RatVector> = Vec::with_capacity(d);
    for (i, r) in rows.iter().enumerate() {
        if start.len() == d {
            break;
        }
        let mut trial = picked.clone();
        trial.push(r.clone());
        if linalg::rank(&trial) == trial.len() {
            picked = trial;
            start.push(i);
        }
    }
    debug_assert_eq!(start.len(), d, "constraint rows must have full rank");
    // simplicial start: B x = e_j
    let mut rays: Vec<(RatVector, Bits)> = (0..d)
        .map(|j| {
            let mut aug: Vec<RatVector> = picked
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = r.clone();
                    row.push(if i == j { Rat::one() } else { Rat::zero() });
                    row
                })
                .collect();
            let piv = linalg::rref(&mut aug, d + 1);
            let mut x = vec![Rat::zero(); d];
            for (r, &pc) in piv.iter().enumerate() {
                x[pc] = aug[r][d].clone();
            }
            let mut z = Bits::new(n);
            for (k, &i) in start.iter().enumerate() {
                if k != j {
                    z.set(i);
                }
            }
            (primitive_ray(&x), z)
        })
        .collect();
    let in_start: BTreeSet<usize> = start.iter().copied().collect();
    for (i, row) in rows.iter().enumerate() {
        if in_start.contains(&i) {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|(r, _)| rat::dot(row, r)).collect();
        let mut next: Vec<(RatVector, Bits)> = Vec::new();
        for (k, (r, z)) in rays.iter().enumerate() {
            if vals[k].is_zero() {
                let mut z = z.clone();
                z.set(i);
                next.push((r.clone(), z));
            } else if vals[k].is_positive() {
                next.push((r.clone(), z.clone()));
            }
        }
        for p in (0..rays.len()).filter(|&k| vals[k].is_positive()) {
            for m in (0..rays.len()).filter(|&k| vals[k].is_negative()) {
                let common = rays[p].1.and(&rays[m].1);
                if (common.count() as usize) + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|k| k == p || k == m || !rays[k].1.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let v: RatVector = rays[m]
                    .0
                    .iter()
                    .zip(&rays[p].0)
                    .map(|(rm, rp)| &vals[p] * rm - &vals[m] * rp)
                    .collect();
                let mut z = common;
                z.set(i);
                next.push((primitive_ray(&v), z));
            }
        }
        rays = next;
        if rays.is_empty() {
            break;
        }
    }
    rays.into_iter().map(|(r, _)| r).collect()
}

fn cone_structure(p: &Polyhedron) -> Arc<ConeStructure> {
    const CAPACITY: usize = 1 << 16;
    static CACHE: OnceLock<Mutex<HashMap<Polyhedron, Arc<ConeStructure>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(cs) = cache.lock().expect("cone cache").get(p) {
        return cs.clone();
    }
    let cs = Arc::new(compute_cone_structure(p));
    let mut guard = cache.lock().expect("cone cache");
    if guard.len() >= CAPACITY {
        guard.clear();
    }
    guard.insert(p.clone(), cs.clone());
    cs
}

fn compute_cone_structure(p: &Polyhedron) -> ConeStructure {
    let (gens, is_vertex, lin) = homogenize(p);
    let width = p.ambient_dim + 1;
    let mut all = gens.clone();
    all.extend(lin.iter().cloned());
    let span = linalg::row_basis(&all, width);
    let d = span.len();
    let dl = linalg::rank(&lin);
    let mut facets: Vec<(RatVector, BTreeSet<usize>)> = Vec::new();
    if d > dl + 1 {
        // dual cone in span coordinates, orthogonal to the lineality
        let coords = |g: &RatVector| -> RatVector { span.iter().map(|s| rat::dot(s, g)).collect() };
        let lin_rows: Vec<RatVector> = lin.iter().map(coords).collect();
        let k = if lin_rows.is_empty() {
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
                .collect()
        } else {
            linalg::nullspace(&lin_rows, d)
        };
        let rows: Vec<RatVector> = gens
            .iter()
            .map(|g| {
                let c = coords(g);
                k.iter().map(|kv| rat::dot(&c, kv)).collect()
            })
            .collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for t in extreme_rays(&rows, k.len()) {
            let mut c = vec![Rat::zero(); d];
            for (ti, kv) in t.iter().zip(&k) {
                for (cj, kj) in c.iter_mut().zip(kv) {
                    *cj += ti * kj;
                }
            }
            let mut a = vec![Rat::zero(); width];
            for (ci, s) in c.iter().zip(&span) {
                for (aj, sj) in a.iter_mut().zip(s) {
                    *aj += ci * sj;
                }
            }
            let zero: BTreeSet<usize> = gens
                .iter()
                .enumerate()
                .filter(|(_, g)| rat::dot(&a, g).is_zero())
                .map(|(i, _)| i)
                .collect();
            if seen.insert(zero.clone()) {
                facets.push((a, zero));
            }
        }
    }
    ConeStructure {
        gens,
        is_vertex,
        lin,
        facets,
        span,
    }
}

impl ConeStructure {
    fn face_rank(&self, face: &BTreeSet<usize>) -> usize {
        let mut rows: Vec<RatVector> = face.iter().map(|&i| self.gens[i].clone()).collect();
        rows.extend(self.lin.iter().cloned());
        linalg::rank(&rows)
    }

    /// All faces of the cone (as generator sets) that contain a vertex.
    fn polyhedral_faces(&self) -> Vec<BTreeSet<usize>> {
        let full: BTreeSet<usize> = (0..self.gens.len()).collect();
        let mut faces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut stack = vec![full];
        while let Some(f) = stack.pop() {
            if !faces.insert(f.clone()) {
                continue;
            }
            for (_, z) in &self.facets {
                let g: BTreeSet<usize> = f.intersection(z).copied().collect();
                if g.len() < f.len() && !faces.contains(&g) {
                    stack.push(g);
                }
            }
        }
        faces
            .into_iter()
            .filter(|f| f.iter().any(|&i| self.is_vertex[i]))
            .collect()
    }
}

fn reduce_mod_lineality(v: &[Rat], lin: &[IntVector]) -> RatVector {
    let mut out = v.to_vec();
    for row in lin {
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            continue;
        };
        let f = &out[pc] / Rat::from_integer(row[pc].into());
        if !f.is_zero() {
            for (o, &r) in out.iter_mut().zip(row) {
                *o -= &f * Rat::from_integer(r.into());
            }
        }
    }
    out
}

impl Polyhedron {
    /// Builds a polyhedron and canonicalizes it: lineality in Hermite normal
    /// form, vertices and rays reduced modulo lineality, non-extreme
    /// generators dropped, everything sorted.
    pub fn new(
        ambient_dim: usize,
        vertices: Vec<RatVector>,
        rays: Vec<IntVector>,
        lineality: Vec<IntVector>,
    ) -> Result<Polyhedron> {
        for v in &vertices {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "vertex of length {} in ambient dimension {ambient_dim}",
                    v.len()
                )));
            }
        }
        for r in rays.iter().chain(&lineality) {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "direction of length {} in ambient dimension {ambient_dim}",
                    r.len()
                )));
            }
        }
        if vertices.is_empty() {
            return Ok(Polyhedron::empty(ambient_dim));
        }
        let lin_rat: Vec<RatVector> = lineality.iter().map(|l| to_rat_vec(l)).collect();
        let lineality = linalg::saturated_lattice(&lin_rat, ambient_dim);
        let mut vs: Vec<RatVector> = vertices
            .iter()
            .map(|v| reduce_mod_lineality(v, &lineality))
            .collect();
        vs.sort();
        vs.dedup();
        let mut rs: Vec<IntVector> = rays
            .iter()
            .map(|r| {
                let red = reduce_mod_lineality(&to_rat_vec(r), &lineality);
                linalg::primitive_integer(&red)
            })
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        rs.sort();
        rs.dedup();
        let raw = Polyhedron {
            ambient_dim,
            vertices: vs,
            rays: rs,
            lineality,
        };
        Ok(raw.prune())
    }

    pub fn empty(ambient_dim: usize) -> Polyhedron {
        Polyhedron {
            ambient_dim,
            vertices: Vec::new(),
            rays: Vec::new(),
            lineality: Vec::new(),
        }
    }

    pub fn point(p: RatVector) -> Polyhedron {
        Polyhedron {
            ambient_dim: p.len(),
            vertices: vec![p],
            rays: Vec::new(),
            lineality: Vec::new(),
        }
    }

    /// Convex hull of integer points (convenience for tests and demos).
    pub fn hull_int(points: &[IntVector]) -> Result<Polyhedron> {
        let n = points.first().map_or(0, |p| p.len());
        Polyhedron::new(n, points.iter().map(|p| to_rat_vec(p)).collect(), vec![], vec![])
    }

    /// Axis-aligned box `Π [lo_i, hi_i]`.
    pub fn cuboid(lo: &[Rat], hi: &[Rat]) -> Result<Polyhedron> {
        let n = lo.len();
        let mut verts = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            verts.push(
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            hi[i].clone()
                        } else {
                            lo[i].clone()
                        }
                    })
                    .collect(),
            );
        }
        Polyhedron::new(n, verts, vec![], vec![])
    }

    fn prune(self) -> Polyhedron {
        let cs = cone_structure(&self);
        let lin_rank = cs.lin.len();
        let mut keep_v = Vec::new();
        let mut keep_r = Vec::new();
        for i in 0..cs.gens.len() {
            // minimal face containing g: intersection of facets through g
            let mut face: BTreeSet<usize> = (0..cs.gens.len()).collect();
            for (_, z) in &cs.facets {
                if z.contains(&i) {
                    face = face.intersection(z).copied().collect();
                }
            }
            let extreme = cs.face_rank(&face) == lin_rank + 1;
            if extreme {
                if cs.is_vertex[i] {
                    keep_v.push(self.vertices[i].clone());
                } else {
                    keep_r.push(self.rays[i - self.vertices.len()].clone());
                }
            }
        }
        Polyhedron {
            ambient_dim: self.ambient_dim,
            vertices: keep_v,
            rays: keep_r,
            lineality: self.lineality,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Direction vectors spanning the linear space `L(σ)`.
    pub fn directions(&self) -> Vec<RatVector> {
        let mut dirs = Vec::new();
        if let Some(v0) = self.vertices.first() {
            for v in &self.vertices[1..] {
                dirs.push(rat::sub(v, v0));
            }
        }
        dirs.extend(self.rays.iter().map(|r| to_rat_vec(r)));
        dirs.extend(self.lineality.iter().map(|r| to_rat_vec(r)));
        dirs
    }

    pub fn dim(&self) -> isize {
        if self.is_empty() {
            return -1;
        }
        cone_structure(self).span.len() as isize - 1
    }

    /// Basis of the saturated lattice `L(σ) ∩ Z^N`, Hermite normal form.
    pub fn lattice_basis(&self) -> Vec<IntVector> {
        linalg::saturated_lattice(&self.directions(), self.ambient_dim)
    }

    /// A point in the relative interior (vertex barycenter plus all rays).
    pub fn relative_interior_point(&self) -> RatVector {
        let n = self.ambient_dim;
        let mut p = vec![Rat::zero(); n];
        if self.vertices.is_empty() {
            return p;
        }
        let k = Rat::from_integer((self.vertices.len() as i64).into());
        for v in &self.vertices {
            for (pi, vi) in p.iter_mut().zip(v) {
                *pi += vi;
            }
        }
        for pi in p.iter_mut() {
            *pi /= &k;
        }
        for r in &self.rays {
            for (pi, &ri) in p.iter_mut().zip(r) {
                *pi += Rat::from_integer(ri.into());
            }
        }
        p
    }

    pub fn hrep(&self) -> HRep {
        let n = self.ambient_dim;
        if self.is_empty() {
            // 0 = 1
            let mut a = vec![Rat::zero(); n];
            a.truncate(n);
            return HRep {
                equations: vec![(a, Rat::one())],
                inequalities: vec![],
            };
        }
        let cs = cone_structure(self);
        let perp = linalg::nullspace(&cs.span, n + 1);
        let split = |a: &RatVector| -> (RatVector, Rat) { (a[..n].to_vec(), -a[n].clone()) };
        let equations = perp.iter().map(split).collect();
        let inequalities = cs
            .facets
            .iter()
            // the facet t >= 0 at infinity is not an affine constraint
            .filter(|(_, z)| z.iter().any(|&i| cs.is_vertex[i]))
            .map(|(a, _)| split(a))
            .collect();
        HRep {
            equations,
            inequalities,
        }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        !self.is_empty() && self.hrep().contains(x)
    }

    /// All nonempty faces (including `self`), sorted by dimension.
    pub fn faces(&self) -> Vec<Polyhedron> {
        if self.is_empty() {
            return Vec::new();
        }
        let cs = cone_structure(self);
        let nv = self.vertices.len();
        let mut out: Vec<Polyhedron> = cs
            .polyhedral_faces()
            .into_iter()
            .map(|f| Polyhedron {
                ambient_dim: self.ambient_dim,
                vertices: f
                    .iter()
                    .filter(|&&i| i < nv)
                    .map(|&i| self.vertices[i].clone())
                    .collect(),
                rays: f
                    .iter()
                    .filter(|&&i| i >= nv)
                    .map(|&i| self.rays[i - nv].clone())
                    .collect(),
                lineality: self.lineality.clone(),
            })
            .collect();
        out.sort_by_key(|f| (f.dim(), f.clone()));
        out
    }

    pub fn facets(&self) -> Vec<Polyhedron> {
        let d = self.dim();
        self.faces().into_iter().filter(|f| f.dim() == d - 1).collect()
    }

    pub fn is_face_of(&self, other: &Polyhedron) -> bool {
        other.faces().iter().any(|f| f == self)
    }

    /// Polyhedron given by an affine H-representation.
    pub fn from_hrep(ambient_dim: usize, h: &HRep) -> Result<Polyhedron> {
        let n = ambient_dim;
        let hom = |(a, b): &(RatVector, Rat)| -> RatVector {
            let mut r = a.clone();
            r.push(-b.clone());
            r
        };
        let eqs: Vec<RatVector> = h.equations.iter().map(hom).collect();
        let mut ineqs: Vec<RatVector> = h.inequalities.iter().map(hom).collect();
        let mut t_row = vec![Rat::zero(); n + 1];
        t_row[n] = Rat::one();
        ineqs.push(t_row);
        // lineality of the cone
        let mut all = eqs.clone();
        all.extend(ineqs.iter().cloned());
        let lin_space = linalg::nullspace(&all, n + 1);
        // restrict to W = {eqs = 0} ∩ lin^⊥
        let mut w_rows = eqs.clone();
        w_rows.extend(lin_space.iter().cloned());
        let w = linalg::nullspace(&w_rows, n + 1);
        let d = w.len();
        let mut rays_h: Vec<RatVector> = Vec::new();
        if d == 0 {
            return Ok(Polyhedron::empty(n));
        }
        // inequality rows in W-coordinates
        let rows_w: Vec<RatVector> = ineqs
            .iter()
            .map(|r| w.iter().map(|b| rat::dot(r, b)).collect())
            .collect();
        let mut seen: BTreeSet<RatVector> = BTreeSet::new();
        let mut consider = |c: &RatVector| {
            let vals: Vec<Rat> = rows_w.iter().map(|r| rat::dot(r, c)).collect();
            let c = if vals.iter().all(|v| !v.is_negative()) {
                c.clone()
            } else if vals.iter().all(|v| !v.is_positive()) {
                c.iter().map(|x| -x.clone()).collect()
            } else {
                return;
            };
            let mut z = vec![Rat::zero(); n + 1];
            for (ci, b) in c.iter().zip(&w) {
                for (zj, bj) in z.iter_mut().zip(b) {
                    *zj += ci * bj;
                }
            }
            let key = normalize_ray(&z);
            if seen.insert(key.clone()) {
                rays_h.push(key);
            }
        };
        for r in extreme_rays(&rows_w, d) {
            consider(&r);
        }
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for z in rays_h {
            if z[n].is_zero() {
                rays.push(linalg::primitive_integer(&z[..n]));
            } else {
                let t = z[n].clone();
                vertices.push(z[..n].iter().map(|x| x / &t).collect());
            }
        }
        let lineality: Vec<IntVector> = lin_space
            .iter()
            .map(|l| linalg::primitive_integer(&l[..n]))
            .collect();
        if vertices.is_empty() {
            return Ok(Polyhedron::empty(n));
        }
        Polyhedron::new(n, vertices, rays, lineality)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.is_empty() || other.is_empty() {
            return Ok(Polyhedron::empty(self.ambient_dim));
        }
        let mut h = self.hrep();
        let h2 = other.hrep();
        h.equations.extend(h2.equations);
        h.inequalities.extend(h2.inequalities);
        Polyhedron::from_hrep(self.ambient_dim, &h)
    }

    /// Intersection with the half-space `a·x >= b`.
    pub fn cut(&self, a: &[Rat], b: &Rat) -> Result<Polyhedron> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let mut h = self.hrep();
        h.inequalities.push((a.to_vec(), b.clone()));
        Polyhedron::from_hrep(self.ambient_dim, &h)
    }

    /// Image under `x ↦ A x + b` (A given by rows).
    pub fn affine_image(&self, a: &[RatVector], b: &[Rat]) -> Result<Polyhedron> {
        let m = a.len();
        let vertices = self
            .vertices
            .iter()
            .map(|v| rat::add(&linalg::mat_vec(a, v), b))
            .collect();
        let img = |r: &IntVector| linalg::primitive_integer(&linalg::mat_vec(a, &to_rat_vec(r)));
        let rays = self.rays.iter().map(img).collect();
        let lineality = self.lineality.iter().map(img).collect();
        Polyhedron::new(m, vertices, rays, lineality)
    }

    /// Product `self × other` in `Q^{N+M}`.
    pub fn product(&self, other: &Polyhedron) -> Result<Polyhedron> {
        let n = self.ambient_dim;
        let m = other.ambient_dim;
        let mut vertices = Vec::new();
        for v in &self.vertices {
            for w in &other.vertices {
                let mut x = v.clone();
                x.extend(w.iter().cloned());
                vertices.push(x);
            }
        }
        let pad_l = |r: &IntVector| {
            let mut x = r.clone();
            x.extend(std::iter::repeat_n(0, m));
            x
        };
        let pad_r = |r: &IntVector| {
            let mut x = vec![0; n];
            x.extend(r.iter().copied());
            x
        };
        let rays = self.rays.iter().map(pad_l).chain(other.rays.iter().map(pad_r)).collect();
        let lineality = self
            .lineality
            .iter()
            .map(pad_l)
            .chain(other.lineality.iter().map(pad_r))
            .collect();
        Polyhedron::new(n + m, vertices, rays, lineality)
    }

    /// Triangulation into `dim + 1`-vertex simplices by pulling the first
    /// vertex. Each simplex is a list of vertices.
    pub fn simplices(&self) -> Result<Vec<Vec<RatVector>>> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        if self.is_empty() {
            return Ok(Vec::new());
        }
        let d = self.dim();
        if d == 0 {
            return Ok(vec![vec![self.vertices[0].clone()]]);
        }
        let apex = &self.vertices[0];
        let mut out = Vec::new();
        for facet in self.facets() {
            if facet.vertices.contains(apex) {
                continue;
            }
            for mut s in facet.simplices()? {
                s.insert(0, apex.clone());
                out.push(s);
            }
        }
        Ok(out)
    }
}

fn normalize_ray(z: &[Rat]) -> RatVector {
    let Some(first) = z.iter().find(|x| !x.is_zero()) else {
        return z.to_vec();
    };
    let f = first.abs();
    z.iter().map(|x| x / &f).collect()
}

/// `|det|` of the simplex edge vectors written in the coordinates of `basis`.
pub fn simplex_volume_factor(simplex: &[RatVector], basis: &[RatVector]) -> Rat {
    // |det| of edge vectors in the coordinates of `basis`
    let v0 = &simplex[0];
    let rows: Vec<RatVector> = simplex[1..]
        .iter()
        .map(|v| linalg::solve_in_span(basis, &rat::sub(v, v0)).expect("simplex outside lattice span"))
        .collect();
    linalg::det(&rows).abs()
}
