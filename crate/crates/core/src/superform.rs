//! Polynomial `(p,q)`-superforms `Σ f_{IJ} d′x_I ∧ d″x_J` and the bicomplex
//! operations on them.
//!
//! Internally a basis monomial is a strictly increasing list of generator
//! ids in `0..2N`: `k` stands for `d′x_k` and `N + k` for `d″x_k`, so the
//! canonical order puts every `d′` factor before every `d″` factor.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rat::{self, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "dprime")]
    Prime,
    #[serde(rename = "dsecond")]
    Second,
}

/// Multi-index pair `(I, J)`, 0-based and strictly increasing.
pub type Key = (Vec<usize>, Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Superform {
    dim: usize,
    p: usize,
    q: usize,
    terms: BTreeMap<Key, Polynomial>,
}

/// Sorts `gens` in place and returns the permutation sign, or `None` when a
/// generator repeats.
fn sort_sign(gens: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if gens.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl Superform {
    pub fn zero(dim: usize, p: usize, q: usize) -> Self {
        Superform {
            dim,
            p,
            q,
            terms: BTreeMap::new(),
        }
    }

    /// The function `f` as a `(0,0)`-form.
    pub fn function(f: Polynomial) -> Self {
        let mut s = Self::zero(f.nvars(), 0, 0);
        s.add_term(vec![], vec![], f);
        s
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        Self::function(Polynomial::constant(dim, c))
    }

    /// `f · d′x_I ∧ d″x_J` with indices in any order (0-based); the sign of
    /// the sorting permutation is applied.
    pub fn term(dim: usize, i: &[usize], j: &[usize], f: Polynomial) -> Self {
        let mut s = Self::zero(dim, i.len(), j.len());
        s.add_term(i.to_vec(), j.to_vec(), f);
        s
    }

    /// `d′x_k` (0-based).
    pub fn dx_prime(dim: usize, k: usize) -> Self {
        Self::term(dim, &[k], &[], Polynomial::one(dim))
    }

    /// `d″x_k` (0-based).
    pub fn dx_second(dim: usize, k: usize) -> Self {
        Self::term(dim, &[], &[k], Polynomial::one(dim))
    }

    /// `d′x_1 ∧ … ∧ d′x_d ∧ d″x_1 ∧ … ∧ d″x_d` in dimension `d`.
    pub fn volume(dim: usize) -> Self {
        let all: Vec<usize> = (0..dim).collect();
        Self::term(dim, &all, &all, Polynomial::one(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Polynomial)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, i: &[usize], j: &[usize]) -> Polynomial {
        self.terms
            .get(&(i.to_vec(), j.to_vec()))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    /// Coefficient of the canonical volume form; the form must live in its
    /// own top bidegree.
    pub fn top_coefficient(&self) -> Polynomial {
        let all: Vec<usize> = (0..self.dim).collect();
        self.coefficient(&all, &all)
    }

    /// Adds `f · d′x_I ∧ d″x_J`; indices may be unsorted.
    pub fn add_term(&mut self, mut i: Vec<usize>, mut j: Vec<usize>, f: Polynomial) {
        assert_eq!(i.len(), self.p, "d′ degree");
        assert_eq!(j.len(), self.q, "d″ degree");
        assert!(i.iter().chain(&j).all(|&k| k < self.dim), "index out of range");
        assert_eq!(f.nvars(), self.dim, "coefficient arity");
        let (Some(si), Some(sj)) = (sort_sign(&mut i), sort_sign(&mut j)) else {
            return;
        };
        let f = if si * sj < 0 { f.neg() } else { f };
        self.add_canonical((i, j), f);
    }

    fn add_canonical(&mut self, key: Key, f: Polynomial) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&key) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "forms on Q^{} and Q^{}",
                self.dim, other.dim
            )));
        }
        if self.bidegree() != other.bidegree() {
            return Err(Error::BidegreeMismatch {
                expected_p: self.p,
                expected_q: self.q,
                found_p: other.p,
                found_q: other.q,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, f) in &other.terms {
            out.add_canonical(k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map_coefficients(|f| f.scale(c))
    }

    /// Multiplies every coefficient by the function `g`.
    pub fn mul_function(&self, g: &Polynomial) -> Self {
        self.map_coefficients(|f| f.mul(g))
    }

    pub fn map_coefficients(&self, mut op: impl FnMut(&Polynomial) -> Polynomial) -> Self {
        let mut out = Self::zero(self.dim, self.p, self.q);
        for (k, f) in &self.terms {
            out.add_canonical(k.clone(), op(f));
        }
        out
    }

    fn gens(&self, key: &Key) -> Vec<usize> {
        key.0
            .iter()
            .copied()
            .chain(key.1.iter().map(|j| j + self.dim))
            .collect()
    }

    fn key_of(&self, gens: &[usize]) -> Key {
        let i = gens.iter().copied().filter(|&g| g < self.dim).collect();
        let j = gens
            .iter()
            .filter(|&&g| g >= self.dim)
            .map(|g| g - self.dim)
            .collect();
        (i, j)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "wedge of forms on Q^{} and Q^{}",
                self.dim, other.dim
            )));
        }
        let mut out = Self::zero(self.dim, self.p + other.p, self.q + other.q);
        for (k1, f1) in &self.terms {
            let g1 = self.gens(k1);
            for (k2, f2) in &other.terms {
                let mut g: Vec<usize> = g1.iter().chain(&other.gens(k2)).copied().collect();
                if let Some(s) = sort_sign(&mut g) {
                    let f = f1.mul(f2);
                    let f = if s < 0 { f.neg() } else { f };
                    out.add_canonical(self.key_of(&g), f);
                }
            }
        }
        Ok(out)
    }

    /// `Σ_k ∂_k f · gen_k ∧ (…)` with `gen_k = d′x_k` or `d″x_k`.
    fn differential(&self, kind: Kind) -> Self {
        let (dp, dq) = match kind {
            Kind::Prime => (1, 0),
            Kind::Second => (0, 1),
        };
        let mut out = Self::zero(self.dim, self.p + dp, self.q + dq);
        for (key, f) in &self.terms {
            let base = self.gens(key);
            for k in 0..self.dim {
                let df = f.derivative(k);
                if df.is_zero() {
                    continue;
                }
                let gk = match kind {
                    Kind::Prime => k,
                    Kind::Second => k + self.dim,
                };
                let mut g = Vec::with_capacity(base.len() + 1);
                g.push(gk);
                g.extend_from_slice(&base);
                if let Some(s) = sort_sign(&mut g) {
                    out.add_canonical(self.key_of(&g), if s < 0 { df.neg() } else { df });
                }
            }
        }
        out
    }

    /// `d′(f d′x_I∧d″x_J) = Σ_k ∂_k f d′x_k∧d′x_I∧d″x_J`.
    pub fn dprime(&self) -> Self {
        self.differential(Kind::Prime)
    }

    /// `d″(f d′x_I∧d″x_J) = Σ_k ∂_k f (−1)^{|I|} d′x_I∧d″x_k∧d″x_J`.
    pub fn dsecond(&self) -> Self {
        self.differential(Kind::Second)
    }

    /// Inserts `v` into the 1-based `slot` of the given kind, regarding the
    /// `d′` (or `d″`) part as an alternating multilinear form.
    pub fn contract(&self, v: &[Rat], kind: Kind, slot: usize) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against forms on Q^{}",
                v.len(),
                self.dim
            )));
        }
        let degree = match kind {
            Kind::Prime => self.p,
            Kind::Second => self.q,
        };
        if slot == 0 || slot > degree {
            return Err(Error::SlotOutOfRange { slot, degree });
        }
        let (np, nq) = match kind {
            Kind::Prime => (self.p - 1, self.q),
            Kind::Second => (self.p, self.q - 1),
        };
        let slot_sign = if slot % 2 == 1 { 1 } else { -1 };
        let mut out = Self::zero(self.dim, np, nq);
        for ((i, j), f) in &self.terms {
            let idx = match kind {
                Kind::Prime => i,
                Kind::Second => j,
            };
            for (r, &k) in idx.iter().enumerate() {
                if v[k].is_zero() {
                    continue;
                }
                let sign = if r % 2 == 0 { slot_sign } else { -slot_sign };
                let mut rest = idx.clone();
                rest.remove(r);
                let key = match kind {
                    Kind::Prime => (rest, j.clone()),
                    Kind::Second => (i.clone(), rest),
                };
                out.add_canonical(key, f.scale(&(&v[k] * rat::int(i64::from(sign)))));
            }
        }
        Ok(out)
    }

    /// Iterated contraction `⟨α; v_1, …, v_r⟩` into `d′` slot 1, applied in
    /// the listed order.
    pub fn contract_prime_seq(&self, vs: &[Vec<Rat>]) -> Result<Self> {
        let mut out = self.clone();
        for v in vs {
            out = out.contract(v, Kind::Prime, 1)?;
        }
        Ok(out)
    }

    /// Pullback along `x = A t + b` where `A` has one row per coordinate of
    /// this form's space and one column per new variable.
    pub fn pullback(&self, a: &[Vec<Rat>], b: &[Rat]) -> Result<Self> {
        if a.len() != self.dim || b.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "affine map into Q^{} applied to forms on Q^{}",
                a.len(),
                self.dim
            )));
        }
        let m = a.first().map_or(0, |r| r.len());
        if a.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged affine map".into()));
        }
        let cache: Vec<(Superform, Superform)> = (0..self.dim)
            .map(|i| {
                let mut dp = Superform::zero(m, 1, 0);
                let mut ds = Superform::zero(m, 0, 1);
                for (col, c) in a[i].iter().enumerate() {
                    dp.add_term(vec![col], vec![], Polynomial::constant(m, c.clone()));
                    ds.add_term(vec![], vec![col], Polynomial::constant(m, c.clone()));
                }
                (dp, ds)
            })
            .collect();
        let mut out = Superform::zero(m, self.p, self.q);
        for ((i, j), f) in &self.terms {
            let mut acc = Superform::function(f.compose_affine(a, b, m));
            for &k in i {
                acc = acc.wedge(&cache[k].0)?;
            }
            for &k in j {
                acc = acc.wedge(&cache[k].1)?;
            }
            // the loop appended factors on the right of the function, in
            // canonical order, so no reordering sign arises
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Substitutes values for some coordinates (`fixed[k] = Some(c)`), keeping
    /// the ambient dimension; differentials are untouched.
    pub fn substitute(&self, fixed: &[Option<Rat>]) -> Self {
        let n = self.dim;
        let a: Vec<Vec<Rat>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        if r == c && fixed[r].is_none() {
                            Rat::one()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let b: Vec<Rat> = fixed.iter().map(|x| x.clone().unwrap_or_else(Rat::zero)).collect();
        self.map_coefficients(|f| f.compose_affine(&a, &b, n))
    }

    /// Whether neither a coefficient nor a differential involves any of the
    /// given coordinates.
    pub fn independent_of(&self, coords: &[usize]) -> bool {
        self.terms.iter().all(|((i, j), f)| {
            coords.iter().all(|c| !i.contains(c) && !j.contains(c))
                && f.terms().all(|(e, _)| coords.iter().all(|&c| e[c] == 0))
        })
    }

    /// Maximum polynomial degree of the coefficients.
    pub fn poly_degree(&self) -> u32 {
        self.terms.values().map(|f| f.degree()).max().unwrap_or(0)
    }

    /// Re-embeds into `Q^dim` with coordinate `k` sent to `map[k]`.
    pub fn reindex(&self, dim: usize, map: &[usize]) -> Self {
        let mut out = Superform::zero(dim, self.p, self.q);
        for ((i, j), f) in &self.terms {
            let i2: Vec<usize> = i.iter().map(|&k| map[k]).collect();
            let j2: Vec<usize> = j.iter().map(|&k| map[k]).collect();
            out.add_term(i2, j2, f.reindex(dim, map));
        }
        out
    }
}

impl fmt::Display for Superform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for k in i {
                write!(f, " d'x{}", k + 1)?;
            }
            for k in j {
                write!(f, " d\"x{}", k + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(rename = "I")]
    i: Vec<usize>,
    #[serde(rename = "J")]
    j: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<Polynomial>,
    /// constant shorthand for `poly`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coef: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct SuperformRepr {
    dim: usize,
    p: usize,
    q: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Superform {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SuperformRepr {
            dim: self.dim,
            p: self.p,
            q: self.q,
            terms: self
                .terms
                .iter()
                .map(|((i, j), f)| TermRepr {
                    i: i.iter().map(|k| k + 1).collect(),
                    j: j.iter().map(|k| k + 1).collect(),
                    poly: Some(f.clone()),
                    coef: None,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Superform {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SuperformRepr::deserialize(d)?;
        let mut out = Superform::zero(r.dim, r.p, r.q);
        for t in r.terms {
            if t.i.len() != r.p || t.j.len() != r.q {
                return Err(D::Error::custom("term degree differs from the declared bidegree"));
            }
            if t.i.iter().chain(&t.j).any(|&k| k == 0 || k > r.dim) {
                return Err(D::Error::custom("index outside 1..dim"));
            }
            let poly = match (t.poly, t.coef) {
                (Some(p), None) if p.is_zero() => Polynomial::zero(r.dim),
                (Some(p), None) if p.nvars() == r.dim => p,
                (Some(_), None) => return Err(D::Error::custom("coefficient arity differs from dim")),
                (None, Some(c)) => {
                    let c = crate::rat::serde_rat::value_to_rat(&c).map_err(D::Error::custom)?;
                    Polynomial::constant(r.dim, c)
                }
                _ => return Err(D::Error::custom("each term needs exactly one of poly and coef")),
            };
            out.add_term(
                t.i.iter().map(|k| k - 1).collect(),
                t.j.iter().map(|k| k - 1).collect(),
                poly,
            );
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn dprime_examples() {
        let f = Superform::function(x(1, 0).pow(2));
        assert_eq!(f.dprime(), Superform::term(1, &[0], &[], x(1, 0).scale(&int(2))));
        let a = Superform::term(1, &[0], &[], x(1, 0));
        assert!(a.dprime().is_zero());
        let b = Superform::term(2, &[0], &[], x(2, 0).mul(&x(2, 1)));
        assert_eq!(b.dprime(), Superform::term(2, &[0, 1], &[], x(2, 0).neg()));
    }

    #[test]
    fn dsecond_examples() {
        assert_eq!(Superform::function(x(2, 1)).dsecond(), Superform::dx_second(2, 1));
        let a = Superform::term(1, &[0], &[], x(1, 0));
        assert_eq!(a.dsecond(), Superform::term(1, &[0], &[0], Polynomial::one(1).neg()));
        assert!(Superform::dx_second(2, 1).dsecond().is_zero());
    }

    #[test]
    fn wedge_examples() {
        let dp = Superform::dx_prime(1, 0);
        let ds = Superform::dx_second(1, 0);
        assert_eq!(dp.wedge(&ds).unwrap(), Superform::volume(1));
        assert_eq!(ds.wedge(&dp).unwrap(), Superform::volume(1).neg());
        let a = Superform::term(2, &[1], &[0], x(2, 0));
        assert_eq!(Superform::constant(2, int(1)).wedge(&a).unwrap(), a);
        assert!(matches!(dp.wedge(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn contraction_examples() {
        let a = Superform::term(2, &[0, 1], &[], Polynomial::one(2));
        let e1 = vec![int(1), int(0)];
        let e2 = vec![int(0), int(1)];
        assert_eq!(a.contract(&e1, Kind::Prime, 1).unwrap(), Superform::dx_prime(2, 1));
        assert_eq!(a.contract(&e2, Kind::Prime, 1).unwrap(), Superform::dx_prime(2, 0).neg());
        assert_eq!(a.contract(&e2, Kind::Prime, 2).unwrap(), Superform::dx_prime(2, 0));
        let f = Superform::term(1, &[], &[0], x(1, 0));
        assert_eq!(
            f.contract(&[int(3)], Kind::Second, 1).unwrap(),
            Superform::function(x(1, 0).scale(&int(3)))
        );
        assert!(matches!(
            f.contract(&[int(1)], Kind::Prime, 1),
            Err(Error::SlotOutOfRange { slot: 1, degree: 0 })
        ));
    }

    #[test]
    fn pullback_examples() {
        // t ↦ 2t + 1
        let a = Superform::term(1, &[0], &[], x(1, 0));
        let pb = a.pullback(&[vec![int(2)]], &[int(1)]).unwrap();
        let expect = x(1, 0).scale(&int(4)).add(&Polynomial::constant(1, int(2)));
        assert_eq!(pb, Superform::term(1, &[0], &[], expect));
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let b = Superform::term(2, &[1], &[0], x(2, 0).mul(&x(2, 1)));
        assert_eq!(b.pullback(&id, &[int(0), int(0)]).unwrap(), b);
        // t ↦ (t, t)
        let c = Superform::term(2, &[0], &[1], Polynomial::one(2));
        let pc = c.pullback(&[vec![int(1)], vec![int(1)]], &[int(0), int(0)]).unwrap();
        assert_eq!(pc, Superform::volume(1));
    }

    #[test]
    fn json_uses_one_based_indices() {
        let a = Superform::term(2, &[0], &[1], x(2, 0));
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"I\":[1]") && s.contains("\"J\":[2]"));
        let back: Superform = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"dim":1,"p":1,"q":0,"terms":[{"I":[2],"J":[],"poly":{"monomials":[]}}]}"#;
        assert!(serde_json::from_str::<Superform>(bad).is_err());
    }
}
