//! Random generators and independent oracles shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropcalc_core::rat::{int, rat};
use tropcalc_core::{Affine, IntVector, PLFunction, PolyComplex, Polyhedron, Polynomial, Rat, Superform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(r: &mut impl Rng) -> Rat {
    rat(r.gen_range(-5..=5), r.gen_range(1..=3))
}

/// Up to four monomials of total degree at most `deg`.
pub fn poly(r: &mut impl Rng, n: usize, deg: u32) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..r.gen_range(1..=4) {
        let mut exps = vec![0u32; n];
        let mut left = r.gen_range(0..=deg);
        while left > 0 && n > 0 {
            exps[r.gen_range(0..n)] += 1;
            left -= 1;
        }
        p.add_term(exps, small_rat(r));
    }
    p
}

fn subset(r: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(r);
    let mut s = all[..k].to_vec();
    s.sort();
    s
}

/// Random `(p,q)`-form with up to three terms.
pub fn form(r: &mut impl Rng, n: usize, p: usize, q: usize, deg: u32) -> Superform {
    let mut f = Superform::zero(n, p, q);
    for _ in 0..r.gen_range(1..=3) {
        let t = Superform::term(n, &subset(r, n, p), &subset(r, n, q), poly(r, n, deg));
        f = f.add(&t).unwrap();
    }
    f
}

/// `∫_{Π[lo_i, hi_i]} f dx` by iterated antiderivatives, monomial by
/// monomial.
pub fn box_integral(f: &Polynomial, lo: &[Rat], hi: &[Rat]) -> Rat {
    let mut total = Rat::zero();
    for (exps, c) in f.terms() {
        let mut t = c.clone();
        for (k, &e) in exps.iter().enumerate() {
            let e1 = e as i32 + 1;
            t *= (pow(&hi[k], e1) - pow(&lo[k], e1)) / int(e1 as i64);
        }
        total += t;
    }
    total
}

fn pow(x: &Rat, e: i32) -> Rat {
    (0..e).fold(Rat::one(), |acc, _| acc * x)
}

/// Integer points in `[-2,2]^n` until their hull is full-dimensional.
pub fn lattice_polytope(r: &mut impl Rng, n: usize) -> Polyhedron {
    loop {
        let k = r.gen_range(n + 1..=n + 3);
        let pts: Vec<IntVector> = (0..k).map(|_| (0..n).map(|_| r.gen_range(-2..=2)).collect()).collect();
        let p = Polyhedron::hull_int(&pts).unwrap();
        if p.dim() == n as isize {
            return p;
        }
    }
}

/// A random element of `GL_n(Z)` as a product of elementary matrices.
pub fn unimodular(r: &mut impl Rng, n: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        if r.gen_bool(0.5) {
            a[0][0] = -1;
        }
        return a;
    }
    for _ in 0..4 {
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = r.gen_range(-1..=1);
        for k in 0..n {
            let v = a[j][k];
            a[i][k] += c * v;
        }
    }
    if r.gen_bool(0.5) {
        a.swap(0, 1);
    }
    a
}

pub fn to_rat(a: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    a.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect()
}

pub fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| int(x)).collect()
}

/// Total degree sign `(−1)^{p+q}`.
pub fn parity(f: &Superform) -> Rat {
    let (p, q) = f.bidegree();
    if (p + q) % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// The complete fan of the four quadrants.
pub fn quadrant_fan() -> (PolyComplex, Vec<(usize, [i64; 2], [i64; 2])>) {
    let o = vec![int(0), int(0)];
    let quads = [([1, 0], [0, 1]), ([-1, 0], [0, 1]), ([-1, 0], [0, -1]), ([1, 0], [0, -1])];
    let cones: Vec<Polyhedron> = quads
        .iter()
        .map(|(u, v)| Polyhedron::new(2, vec![o.clone()], vec![u.to_vec(), v.to_vec()], vec![]).unwrap())
        .collect();
    let x = PolyComplex::face_lattice(&cones).unwrap();
    let ids = cones.iter().zip(quads).map(|(c, (u, v))| (x.find_cell(c).unwrap(), u, v)).collect();
    (x, ids)
}

/// A continuous PL function with integer values on the four rays.
pub fn fan_function(r: &mut impl Rng) -> (PLFunction, BTreeMap<usize, [i64; 2]>) {
    let (x, quads) = quadrant_fan();
    let vals: BTreeMap<[i64; 2], i64> =
        [[1, 0], [0, 1], [-1, 0], [0, -1]].into_iter().map(|ray| (ray, r.gen_range(-3..=3))).collect();
    let c = small_rat(r);
    let mut pieces = BTreeMap::new();
    let mut slopes = BTreeMap::new();
    for (cell, u, v) in quads {
        // u = ±e_1, v = ±e_2
        let s = [vals[&u] * u[0], vals[&v] * v[1]];
        pieces.insert(cell, Affine::new(ints(&s), c.clone()));
        slopes.insert(cell, s);
    }
    (PLFunction::new(x, pieces).unwrap(), slopes)
}
