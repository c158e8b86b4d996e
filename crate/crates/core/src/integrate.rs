//! Lattice-normalized integration of top superforms, boundary and corner
//! integrals, and Stokes residuals.
//!
//! A `(d,d)`-form is integrated over a `d`-cell by pulling it back along a
//! lattice basis `t` of `L_Z(σ)` and integrating
//! `(−1)^{d(d−1)/2} g(t) dt` where `g` is the coefficient of
//! `d′t_1∧…∧d′t_d∧d″t_1∧…∧d″t_d`; equivalently the interleaved form
//! `d′t_1∧d″t_1∧…∧d′t_d∧d″t_d` has positive integral. Boundary terms contract
//! the first `d′` slot with the outward primitive normal; with these
//! conventions `∫_σ d″α = −∫_{∂σ} α`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::complex::PolyComplex;
use crate::cycles::{TubeModel, WeightedCycle};
use crate::error::{Error, Result};
use crate::linalg;
use crate::piecewise::{lattice_chart, PiecewiseForm};
use crate::polyhedron::Polyhedron;
use crate::rat::{self, to_rat_vec, Rat, RatVector};
use crate::superform::{Kind, Superform};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralResult {
    pub value: Rat,
    /// Contribution per cell (top cells of a cycle, facets of a region, …).
    pub breakdown: BTreeMap<usize, Rat>,
}

impl IntegralResult {
    fn from_parts(parts: Vec<(usize, Rat)>) -> Self {
        let breakdown: BTreeMap<usize, Rat> = parts.into_iter().collect();
        let value = breakdown.values().fold(Rat::zero(), |a, b| a + b);
        IntegralResult { value, breakdown }
    }
}

/// `(−1)^{d(d−1)/2}`.
pub fn orientation_sign(d: usize) -> Rat {
    if (d * d.saturating_sub(1) / 2).is_multiple_of(2) {
        rat::one()
    } else {
        -rat::one()
    }
}

/// Integral of a polynomial superform over one bounded cell.
pub fn integrate_cell(form: &Superform, cell: &Polyhedron) -> Result<Rat> {
    let d = cell.dim();
    if d < 0 {
        return Ok(Rat::zero());
    }
    let d = d as usize;
    if form.bidegree() != (d, d) {
        return Err(Error::BidegreeMismatch {
            expected_p: d,
            expected_q: d,
            found_p: form.bidegree().0,
            found_q: form.bidegree().1,
        });
    }
    if form.is_zero() {
        return Ok(Rat::zero());
    }
    if !cell.is_bounded() {
        return Err(Error::Unbounded);
    }
    let (a, v0) = lattice_chart(cell);
    let local = form.pullback(&a, &v0)?;
    let g = local.top_coefficient();
    if g.is_zero() {
        return Ok(Rat::zero());
    }
    if d == 0 {
        return Ok(g.as_constant().unwrap_or_else(Rat::zero));
    }
    let basis: Vec<RatVector> = cell.lattice_basis().iter().map(|b| to_rat_vec(b)).collect();
    let mut total = Rat::zero();
    for simplex in cell.simplices()? {
        let local_vertices: Vec<RatVector> = simplex
            .iter()
            .map(|x| {
                linalg::solve_in_span(&basis, &rat::sub(x, &v0)).expect("vertex in the cell's span")
            })
            .collect();
        total += g.integrate_simplex(&local_vertices);
    }
    Ok(total * orientation_sign(d))
}

/// Whether the restriction of `form` to the affine hull of `cell` vanishes.
fn restricts_to_zero(form: &Superform, cell: &Polyhedron) -> Result<bool> {
    let (a, v0) = lattice_chart(cell);
    Ok(form.pullback(&a, &v0)?.is_zero())
}

/// The form acting on the carrier cell `c` from the side of `region`: taken
/// from a cell of the star of `c` of dimension `dim region` lying in
/// `region`, then from a maximal coface of that cell.
fn side_form(alpha: &PiecewiseForm, c: usize, region: &Polyhedron) -> Superform {
    let carrier = &alpha.carrier;
    let d = region.dim().max(0) as usize;
    let inside = carrier.star(c).into_iter().find(|&s| {
        carrier.cells[s].dim == d && region.contains(&carrier.polyhedron(s).relative_interior_point())
    });
    match inside {
        Some(s) => alpha.near(s),
        None => alpha.near(c),
    }
}

/// Carrier cells of the same dimension as `region` that lie in it.
fn pieces_in(carrier: &PolyComplex, region: &Polyhedron) -> Vec<usize> {
    let d = region.dim();
    (0..carrier.len())
        .filter(|&c| {
            carrier.cells[c].dim as isize == d
                && region.contains(&carrier.polyhedron(c).relative_interior_point())
        })
        .collect()
}

/// `∫_region α` for a piecewise `(d,d)`-form, `d = dim region`.
pub fn integrate_region(alpha: &PiecewiseForm, region: &Polyhedron) -> Result<Rat> {
    let d = region.dim().max(0) as usize;
    if alpha.bidegree() != (d, d) {
        return Err(Error::BidegreeMismatch {
            expected_p: d,
            expected_q: d,
            found_p: alpha.bidegree().0,
            found_q: alpha.bidegree().1,
        });
    }
    let pieces = pieces_in(&alpha.carrier, region);
    let parts: Vec<Result<Rat>> = pieces
        .par_iter()
        .map(|&c| {
            let cell = alpha.carrier.polyhedron(c);
            let form = side_form(alpha, c, region);
            if !cell.is_bounded() {
                return if restricts_to_zero(&form, cell)? {
                    Ok(Rat::zero())
                } else {
                    Err(Error::Unbounded)
                };
            }
            integrate_cell(&form, cell)
        })
        .collect();
    parts.into_iter().try_fold(Rat::zero(), |acc, r| Ok(acc + r?))
}

/// `Σ_σ m_σ ∫_σ α` over the top cells of `z`. The carrier of `α` must refine
/// the support of `z`.
pub fn integrate(alpha: &PiecewiseForm, z: &WeightedCycle) -> Result<IntegralResult> {
    let d = z.dim;
    if alpha.bidegree() != (d, d) {
        return Err(Error::BidegreeMismatch {
            expected_p: d,
            expected_q: d,
            found_p: alpha.bidegree().0,
            found_q: alpha.bidegree().1,
        });
    }
    let cells = z.top_cells();
    let parts: Vec<Result<(usize, Rat)>> = cells
        .par_iter()
        .map(|&s| {
            let v = integrate_region(alpha, z.support.polyhedron(s)).map_err(|e| match e {
                Error::Unbounded => Error::UnboundedSupport(s),
                other => other,
            })?;
            Ok((s, v * rat::int(z.weight(s))))
        })
        .collect();
    Ok(IntegralResult::from_parts(parts.into_iter().collect::<Result<_>>()?))
}

/// `Σ_τ ∫_τ ⟨α; −u_{σ/τ}⟩` over the facets of the bounded cell `sigma`, for a
/// `(d, d−1)`-form with `d = dim σ`. The breakdown is keyed by the facet's
/// position in `sigma.facets()`.
pub fn boundary_integral(alpha: &PiecewiseForm, sigma: &Polyhedron) -> Result<IntegralResult> {
    let d = sigma.dim().max(0) as usize;
    if d == 0 || alpha.bidegree() != (d, d - 1) {
        return Err(Error::BidegreeMismatch {
            expected_p: d,
            expected_q: d.saturating_sub(1),
            found_p: alpha.bidegree().0,
            found_q: alpha.bidegree().1,
        });
    }
    let local = PolyComplex::face_lattice_unchecked(std::slice::from_ref(sigma));
    let top = local.find_cell(sigma).expect("cell of its own face lattice");
    let facets = sigma.facets();
    let mut parts = Vec::with_capacity(facets.len());
    for (k, tau) in facets.iter().enumerate() {
        let t = local.find_cell(tau).expect("facet in face lattice");
        let u_in = local.primitive_normal(t, top)?;
        let u_out: RatVector = u_in.iter().map(|&x| rat::int(-x)).collect();
        let pieces = pieces_in(&alpha.carrier, tau);
        let vals: Vec<Result<Rat>> = pieces
            .par_iter()
            .map(|&c| {
                let form = side_form(alpha, c, sigma);
                let contracted = form.contract(&u_out, Kind::Prime, 1)?;
                integrate_cell(&contracted, alpha.carrier.polyhedron(c))
            })
            .collect();
        let v = vals.into_iter().try_fold(Rat::zero(), |acc, r| Ok::<_, Error>(acc + r?))?;
        parts.push((k, v));
    }
    Ok(IntegralResult::from_parts(parts))
}

/// `∫_σ d″α + ∫_{∂σ} α`, which vanishes for continuous data.
pub fn stokes_residual(alpha: &PiecewiseForm, sigma: &Polyhedron) -> Result<Rat> {
    let lhs = integrate_region(&alpha.dsecond(), sigma)?;
    let rhs = boundary_integral(alpha, sigma)?.value;
    Ok(lhs + rhs)
}

/// Sum over interior facets `c` of the carrier inside `sigma` of
/// `∫_c ⟨α_{D₁}; out₁⟩ + ∫_c ⟨α_{D₂}; out₂⟩`, the mismatch between the two
/// sides. For any piecewise data, `stokes_residual = −facet_jumps`.
pub fn facet_jumps(alpha: &PiecewiseForm, sigma: &Polyhedron) -> Result<Rat> {
    let carrier = &alpha.carrier;
    let d = sigma.dim().max(0) as usize;
    let mut total = Rat::zero();
    for c in 0..carrier.len() {
        if carrier.cells[c].dim + 1 != d {
            continue;
        }
        let x = carrier.polyhedron(c).relative_interior_point();
        if !sigma.contains(&x) || on_boundary(sigma, &x) {
            continue;
        }
        for inc in carrier.cofacets_of(c) {
            if carrier.cells[inc.cell].dim != d {
                continue;
            }
            let u_in = carrier.incidence_normal(inc)?;
            let u_out: RatVector = u_in.iter().map(|&v| rat::int(-v)).collect();
            let form = alpha.near(inc.cell).contract(&u_out, Kind::Prime, 1)?;
            total += integrate_cell(&form, carrier.polyhedron(c))?;
        }
    }
    Ok(total)
}

fn on_boundary(sigma: &Polyhedron, x: &[Rat]) -> bool {
    !sigma.hrep().contains_relint(x)
}

/// Tube face integral `∫_{V^I} α = ∫_{V^I} ⟨α; e_{y_{i_1}}, …, e_{y_{i_k}}⟩`
/// (contractions into `d′` slot 1 in increasing order of `I`), with the form
/// taken from the tube side.
pub fn corner_integral(alpha: &PiecewiseForm, tube: &TubeModel, set: &[usize]) -> Result<Rat> {
    let n = tube.ambient_dim();
    let k = set.len();
    if alpha.bidegree() != (n, n - k) {
        return Err(Error::BidegreeMismatch {
            expected_p: n,
            expected_q: n - k,
            found_p: alpha.bidegree().0,
            found_q: alpha.bidegree().1,
        });
    }
    let normals: Vec<RatVector> = set.iter().map(|&i| tube.corner_normal(i)).collect();
    let carrier = &alpha.carrier;
    let mut jobs = Vec::new();
    for face in tube.corner(set) {
        for c in pieces_in(carrier, &face) {
            jobs.push(c);
        }
    }
    let vals: Vec<Result<Rat>> = jobs
        .par_iter()
        .map(|&c| {
            let form = tube_side_form(alpha, tube, c);
            let contracted = form.contract_prime_seq(&normals)?;
            integrate_cell(&contracted, carrier.polyhedron(c))
        })
        .collect();
    vals.into_iter().try_fold(Rat::zero(), |acc, r| Ok(acc + r?))
}

/// The form near carrier cell `c`, preferring a maximal coface inside the
/// tube.
fn tube_side_form(alpha: &PiecewiseForm, tube: &TubeModel, c: usize) -> Superform {
    let carrier = &alpha.carrier;
    let cofaces = carrier.maximal_cofaces(c);
    let pick = cofaces
        .iter()
        .find(|&&m| tube.in_tube(&carrier.polyhedron(m).relative_interior_point()))
        .or(cofaces.first());
    match pick {
        Some(&m) => alpha.on(m),
        None => Superform::zero(alpha.dim(), alpha.bidegree().0, alpha.bidegree().1),
    }
}

/// Sign `(−1)^{#{i ∈ I : i < j}}` of the iterated tube formula.
pub fn tube_sign(set: &[usize], j: usize) -> Rat {
    if set.iter().filter(|&&i| i < j).count() % 2 == 0 {
        rat::one()
    } else {
        -rat::one()
    }
}

/// `∫_{V^I} d″α − Σ_{j∉I} (−1)^{#{i∈I: i<j}} ∫_{V^{I∪j}} α` for a form that
/// vanishes near the other boundary faces of `V^I`.
pub fn stokes_tube_residual(alpha: &PiecewiseForm, tube: &TubeModel, set: &[usize]) -> Result<Rat> {
    let lhs = corner_integral(&alpha.dsecond(), tube, set)?;
    let mut rhs = Rat::zero();
    for j in (0..tube.q).filter(|j| !set.contains(j)) {
        let mut bigger = set.to_vec();
        bigger.push(j);
        bigger.sort();
        rhs += tube_sign(set, j) * corner_integral(alpha, tube, &bigger)?;
    }
    Ok(lhs - rhs)
}

/// `m·d′y_1∧…∧d′y_q` in the tube's ambient space.
pub fn corner_symbol_form(tube: &TubeModel) -> Superform {
    let n = tube.ambient_dim();
    Superform::term(n, &tube.y_coords(), &[], crate::poly::Polynomial::one(n)).scale(&rat::int(tube.weight))
}

/// Direct corner value `∫_{V^{1..q}} ⟨θ₀∧ω; e_{y_1}, …, e_{y_q}⟩` with
/// `θ₀ = m·d′y_1∧…∧d′y_q`. `ω` must not involve the tube coordinates on the
/// tube cells.
pub fn tube_pairing(tube: &TubeModel, omega: &PiecewiseForm) -> Result<Rat> {
    let n = tube.ambient_dim();
    let dp = n - tube.q;
    if omega.bidegree() != (dp, dp) {
        return Err(Error::BidegreeMismatch {
            expected_p: dp,
            expected_q: dp,
            found_p: omega.bidegree().0,
            found_q: omega.bidegree().1,
        });
    }
    let ys = tube.y_coords();
    for m in omega.carrier.maximal_cells() {
        let x = omega.carrier.polyhedron(m).relative_interior_point();
        if tube.in_tube(&x) && !omega.on(m).independent_of(&ys) {
            return Err(Error::NotPulledBack(m));
        }
    }
    let theta0 = corner_symbol_form(tube);
    let product = omega.map(|w| theta0.wedge(w))?;
    let all: Vec<usize> = (0..tube.q).collect();
    corner_integral(&product, tube, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::examples::{cube, point};
    use crate::cycles::build_tube;
    use crate::poly::Polynomial;
    use crate::rat::{int, rat};

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn integrate_examples() {
        let seg = cube(1, 0, 1);
        let z = WeightedCycle::uniform(seg.clone(), 1).unwrap();
        let a = PiecewiseForm::uniform(seg, Superform::volume(1)).unwrap();
        assert_eq!(integrate(&a, &z).unwrap().value, int(1));

        let diag = PolyComplex::face_lattice(&[Polyhedron::hull_int(&[vec![0, 0], vec![1, 1]]).unwrap()]).unwrap();
        let z = WeightedCycle::uniform(diag.clone(), 1).unwrap();
        let a = PiecewiseForm::uniform(diag, Superform::term(2, &[0], &[0], x(2, 0))).unwrap();
        assert_eq!(integrate(&a, &z).unwrap().value, rat(1, 2));

        // the interleaved form d′x∧d″x∧d′y∧d″y integrates to the area
        let tri = PolyComplex::face_lattice(&[Polyhedron::hull_int(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap()])
            .unwrap();
        let z = WeightedCycle::uniform(tri.clone(), 1).unwrap();
        let f = x(2, 0).add(&x(2, 1));
        let canonical = Superform::term(2, &[0, 1], &[0, 1], f.clone());
        let a = PiecewiseForm::uniform(tri.clone(), canonical).unwrap();
        assert_eq!(integrate(&a, &z).unwrap().value, rat(-1, 3));
        let interleaved = Superform::function(f)
            .wedge(&Superform::dx_prime(2, 0))
            .unwrap()
            .wedge(&Superform::dx_second(2, 0))
            .unwrap()
            .wedge(&Superform::dx_prime(2, 1))
            .unwrap()
            .wedge(&Superform::dx_second(2, 1))
            .unwrap();
        let a = PiecewiseForm::uniform(tri, interleaved).unwrap();
        assert_eq!(integrate(&a, &z).unwrap().value, rat(1, 3));
    }

    #[test]
    fn integrate_errors() {
        let seg = cube(1, 0, 1);
        let z = WeightedCycle::uniform(seg.clone(), 1).unwrap();
        let a = PiecewiseForm::uniform(seg, Superform::dx_prime(1, 0)).unwrap();
        assert!(matches!(integrate(&a, &z), Err(Error::BidegreeMismatch { .. })));

        let ray = PolyComplex::face_lattice(&[Polyhedron::new(1, vec![vec![int(0)]], vec![vec![1]], vec![]).unwrap()])
            .unwrap();
        let z = WeightedCycle::uniform(ray.clone(), 1).unwrap();
        let a = PiecewiseForm::uniform(ray.clone(), Superform::volume(1)).unwrap();
        let top = ray.maximal_cells()[0];
        assert_eq!(integrate(&a, &z).unwrap_err(), Error::UnboundedSupport(top));
        let zero = PiecewiseForm::zero(ray, 1, 1);
        assert_eq!(integrate(&zero, &z).unwrap().value, int(0));
    }

    #[test]
    fn boundary_examples() {
        let seg = cube(1, 0, 1);
        let sigma = seg.polyhedron(seg.maximal_cells()[0]).clone();
        let a = PiecewiseForm::uniform(seg.clone(), Superform::term(1, &[0], &[], x(1, 0))).unwrap();
        let b = boundary_integral(&a, &sigma).unwrap();
        assert_eq!(b.value, int(1));
        let mut contributions: Vec<Rat> = b.breakdown.values().cloned().collect();
        contributions.sort();
        assert_eq!(contributions, vec![int(0), int(1)]);
        assert_eq!(stokes_residual(&a, &sigma).unwrap(), int(0));
        assert_eq!(integrate_region(&a.dsecond(), &sigma).unwrap(), int(-1));

        let c = PiecewiseForm::uniform(seg.clone(), Superform::dx_prime(1, 0)).unwrap();
        let b = boundary_integral(&c, &sigma).unwrap();
        assert_eq!(b.value, int(0));
        let mut contributions: Vec<Rat> = b.breakdown.values().cloned().collect();
        contributions.sort();
        assert_eq!(contributions, vec![int(-1), int(1)]);

        let z = PiecewiseForm::zero(seg, 1, 0);
        assert_eq!(boundary_integral(&z, &sigma).unwrap().value, int(0));
    }

    #[test]
    fn stokes_on_square() {
        let sq = cube(2, 0, 1);
        let sigma = sq.polyhedron(sq.maximal_cells()[0]).clone();
        let f = x(2, 0).pow(2).mul(&x(2, 1)).add(&x(2, 1).pow(3));
        let mut form = Superform::term(2, &[0, 1], &[1], f.clone());
        form = form.add(&Superform::term(2, &[0, 1], &[0], f.mul(&x(2, 0)))).unwrap();
        let a = PiecewiseForm::uniform(sq, form).unwrap();
        assert_eq!(stokes_residual(&a, &sigma).unwrap(), int(0));
    }

    #[test]
    fn discontinuity_shows_up_as_jump() {
        let halves = PolyComplex::face_lattice(&[
            Polyhedron::hull_int(&[vec![0], vec![1]]).unwrap(),
            Polyhedron::hull_int(&[vec![1], vec![2]]).unwrap(),
        ])
        .unwrap();
        let sigma = Polyhedron::hull_int(&[vec![0], vec![2]]).unwrap();
        let mut a = PiecewiseForm::zero(halves.clone(), 1, 0);
        for m in halves.maximal_cells() {
            a.set(m, Superform::term(1, &[0], &[], x(1, 0))).unwrap();
        }
        assert_eq!(stokes_residual(&a, &sigma).unwrap(), int(0));
        assert_eq!(facet_jumps(&a, &sigma).unwrap(), int(0));
        let m = halves.maximal_cells()[1];
        a.set(m, Superform::term(1, &[0], &[], x(1, 0).scale(&int(3)))).unwrap();
        let r = stokes_residual(&a, &sigma).unwrap();
        assert!(!r.is_zero());
        assert_eq!(r, -facet_jumps(&a, &sigma).unwrap());
    }

    #[test]
    fn tube_pairing_examples() {
        let t = build_tube(point(), 1, int(0), int(1), 1).unwrap();
        let omega = PiecewiseForm::uniform(t.tube_complex(), Superform::constant(1, int(1))).unwrap();
        assert_eq!(tube_pairing(&t, &omega).unwrap(), int(1));

        let t = build_tube(cube(1, 0, 1), 1, int(0), int(1), 2).unwrap();
        let vol = Superform::term(2, &[0], &[0], Polynomial::one(2));
        let omega = PiecewiseForm::uniform(t.tube_complex(), vol).unwrap();
        assert_eq!(tube_pairing(&t, &omega).unwrap(), int(2));

        let zero = PiecewiseForm::zero(t.tube_complex(), 1, 1);
        assert_eq!(tube_pairing(&t, &zero).unwrap(), int(0));

        let moving = Superform::term(2, &[0], &[0], x(2, 1));
        let omega = PiecewiseForm::uniform(t.tube_complex(), moving).unwrap();
        assert!(matches!(tube_pairing(&t, &omega), Err(Error::NotPulledBack(_))));
    }

    #[test]
    fn iterated_tube_stokes() {
        // q = 2 over a point: α = f d′y1∧d′y2∧d″y_j with f vanishing at y = 2
        let t = build_tube(point(), 2, int(0), int(2), 1).unwrap();
        let n = 2;
        let cap = Polynomial::constant(n, int(2));
        let bump = cap.sub(&x(n, 0)).mul(&cap.sub(&x(n, 1)));
        let f = bump.mul(&x(n, 0).add(&x(n, 1).pow(2)).add(&Polynomial::one(n)));
        for j in 0..2 {
            let a = Superform::term(n, &[0, 1], &[j], f.clone());
            let a = PiecewiseForm::uniform(t.tube_complex(), a).unwrap();
            assert_eq!(stokes_tube_residual(&a, &t, &[]).unwrap(), int(0));
        }
        for i in 0..2 {
            let a = Superform::term(n, &[0, 1], &[], f.clone());
            let a = PiecewiseForm::uniform(t.tube_complex(), a).unwrap();
            assert_eq!(stokes_tube_residual(&a, &t, &[i]).unwrap(), int(0));
        }
    }
}
