//! Properties of superforms, PL functions and integrals.

mod common;

use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use common::*;
use tropcalc_core::complex::examples;
use tropcalc_core::integrate::{facet_jumps, integrate, stokes_residual};
use tropcalc_core::rat::{int, rat};
use tropcalc_core::{Affine, Error, PLFunction, PiecewiseForm, PolyComplex, Polyhedron, Rat, Superform, WeightedCycle};

fn affine_map(r: &mut impl Rng, n: usize, m: usize) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let a = (0..n).map(|_| (0..m).map(|_| int(r.gen_range(-2..=2))).collect()).collect();
    let b = (0..n).map(|_| int(r.gen_range(-2..=2))).collect();
    (a, b)
}

fn random_bidegree(r: &mut impl Rng, n: usize) -> (usize, usize) {
    (r.gen_range(0..=n), r.gen_range(0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pullback_is_a_dga_map(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b) = affine_map(&mut r, n, m);
        let (p1, q1) = random_bidegree(&mut r, n);
        let (p2, q2) = random_bidegree(&mut r, n);
        let f = form(&mut r, n, p1, q1, 3);
        let g = form(&mut r, n, p2, q2, 3);
        let pb = |x: &Superform| x.pullback(&a, &b).unwrap();
        prop_assert_eq!(pb(&f.wedge(&g).unwrap()), pb(&f).wedge(&pb(&g)).unwrap());
        prop_assert_eq!(pb(&f.dprime()), pb(&f).dprime());
        prop_assert_eq!(pb(&f.dsecond()), pb(&f).dsecond());
        prop_assert_eq!(pb(&f.add(&f).unwrap()), pb(&f).scale(&int(2)));
    }

    #[test]
    fn pl_functions_have_constant_differentials(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, _) = fan_function(&mut r);
        prop_assert!(f.is_continuous());
        let df = f.to_form().dsecond();
        for (_, w) in df.cells() {
            prop_assert!(w.dprime().is_zero() && w.dsecond().is_zero());
        }
        // values agree across every shared ray
        let x = &f.carrier;
        for ray in x.cells_of_dim(1) {
            let pt = x.polyhedron(ray).relative_interior_point();
            let vals: Vec<Rat> = x
                .maximal_cofaces(ray)
                .into_iter()
                .map(|c| f.piece(c).eval(&pt))
                .collect();
            prop_assert!(vals.windows(2).all(|w| w[0] == w[1]));
        }
        // shifting one piece breaks continuity, which construction rejects
        let mut pieces: BTreeMap<usize, Affine> = f.pieces().map(|(c, a)| (*c, a.clone())).collect();
        let first = *pieces.keys().next().unwrap();
        let bumped = pieces[&first].add(&Affine::constant(2, int(1)));
        pieces.insert(first, bumped);
        prop_assert!(matches!(PLFunction::new(x.clone(), pieces), Err(Error::Schema(_))));
    }

    #[test]
    fn integrals_are_linear(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let x = PolyComplex::face_lattice(&[lattice_polytope(&mut r, n)]).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let f = PiecewiseForm::uniform(x.clone(), Superform::term(n, &all, &all, poly(&mut r, n, 3))).unwrap();
        let g = PiecewiseForm::uniform(x.clone(), Superform::term(n, &all, &all, poly(&mut r, n, 3))).unwrap();
        let (s, t) = (small_rat(&mut r), small_rat(&mut r));
        let w = r.gen_range(1..=4);
        let z1 = WeightedCycle::uniform(x.clone(), 1).unwrap();
        let zw = WeightedCycle::uniform(x, w).unwrap();
        let int1 = |a: &PiecewiseForm| integrate(a, &z1).unwrap().value;
        let combo = f.scale(&s).add(&g.scale(&t)).unwrap();
        prop_assert_eq!(int1(&combo), &s * int1(&f) + &t * int1(&g));
        prop_assert_eq!(integrate(&f, &zw).unwrap().value, int(w) * int1(&f));
    }

    #[test]
    fn stokes_residual_measures_facet_jumps(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let lo = vec![int(0); n];
        let hi = vec![int(2); n];
        let sigma = Polyhedron::cuboid(&lo, &hi).unwrap();
        let fine = examples::cube(n, 0, 2)
            .slice_all(&[((0..n).map(|k| int(i64::from(k == 0))).collect(), rat(r.gen_range(1..=3), 2))])
            .unwrap();
        let all: Vec<usize> = (0..n).collect();
        let j: Vec<usize> = (1..n).collect();
        let base = Superform::term(n, &all, &j, poly(&mut r, n, 2));
        // continuous data: no jumps, no residual
        let smooth = PiecewiseForm::uniform(fine.clone(), base.clone()).unwrap();
        prop_assert!(facet_jumps(&smooth, &sigma).unwrap().is_zero());
        prop_assert!(stokes_residual(&smooth, &sigma).unwrap().is_zero());
        // perturb one side of the cut
        let mut rough = smooth.clone();
        let cell = fine.maximal_cells()[0];
        let kick = Superform::term(n, &all, &j, poly(&mut r, n, 2));
        rough.set(cell, base.add(&kick).unwrap()).unwrap();
        let jumps = facet_jumps(&rough, &sigma).unwrap();
        prop_assert_eq!(stokes_residual(&rough, &sigma).unwrap(), -jumps);
    }
}
