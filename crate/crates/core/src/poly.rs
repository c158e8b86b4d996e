//! Multivariate polynomials with exact rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{self, Rat};

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rat>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Exponents, c: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// `Σ a_i x_i + b`.
    pub fn affine(a: &[Rat], b: &Rat) -> Self {
        let n = a.len();
        let mut p = Self::constant(n, b.clone());
        for (i, ai) in a.iter().enumerate() {
            p = p.add(&Self::var(n, i).scale(ai));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// The constant value, if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rat) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `∂/∂x_k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut e2 = e.clone();
                e2[k] -= 1;
                out.add_term(e2, c * rat::int(i64::from(e[k])));
            }
        }
        out
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.clone();
                for (xi, &k) in x.iter().zip(e) {
                    if k > 0 {
                        v *= num_traits::pow(xi.clone(), k as usize);
                    }
                }
                v
            })
            .sum()
    }

    /// Substitutes `x_i = Σ_j a[i][j] t_j + b[i]`, giving a polynomial in
    /// `new_nvars` variables `t`.
    pub fn compose_affine(&self, a: &[Vec<Rat>], b: &[Rat], new_nvars: usize) -> Self {
        assert_eq!(a.len(), self.nvars);
        let images: Vec<Polynomial> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| Polynomial::affine(row, bi))
            .collect();
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Self::one(new_nvars), p.clone()]).collect();
        let mut out = Self::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut term = Self::constant(new_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Re-embeds into `nvars` variables by placing variable `i` at `map[i]`.
    pub fn reindex(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// `∫ f dt` over `{t ≥ 0, Σ t ≤ 1}` in `nvars` dimensions, using
    /// `∫ t^α = α! / (|α| + d)!`.
    pub fn integrate_standard_simplex(&self) -> Rat {
        let d = self.nvars as u64;
        self.terms
            .iter()
            .map(|(e, c)| {
                let num: BigInt = e.iter().map(|&k| factorial(u64::from(k))).product();
                let total: u64 = e.iter().map(|&k| u64::from(k)).sum::<u64>() + d;
                c * Rat::new(num, factorial(total))
            })
            .sum()
    }

    /// Lebesgue integral over the simplex with the given `nvars + 1`
    /// vertices.
    pub fn integrate_simplex(&self, vertices: &[Vec<Rat>]) -> Rat {
        let d = self.nvars;
        assert_eq!(vertices.len(), d + 1);
        if d == 0 {
            return self.as_constant().unwrap_or_else(Rat::zero);
        }
        let v0 = &vertices[0];
        // x = v0 + M s, M columns v_i − v0
        let m: Vec<Vec<Rat>> = (0..d)
            .map(|row| (1..=d).map(|col| &vertices[col][row] - &v0[row]).collect())
            .collect();
        let jac = crate::linalg::det(&m);
        let jac = if jac < Rat::zero() { -jac } else { jac };
        self.compose_affine(&m, v0, d).integrate_standard_simplex() * jac
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rat::fmt_rat(c))?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    exps: Vec<u32>,
    #[serde(with = "rat::serde_rat")]
    coef: Rat,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nvars: Option<usize>,
    monomials: Vec<MonomialRepr>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolynomialRepr {
            nvars: self.terms.is_empty().then_some(self.nvars),
            monomials: self
                .terms
                .iter()
                .map(|(e, c)| MonomialRepr {
                    exps: e.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolynomialRepr::deserialize(d)?;
        let n = repr
            .nvars
            .or_else(|| repr.monomials.first().map(|m| m.exps.len()))
            .unwrap_or(0);
        let mut p = Polynomial::zero(n);
        for m in repr.monomials {
            if m.exps.len() != n {
                return Err(serde::de::Error::custom("monomials of different arity"));
            }
            p.add_term(m.exps, m.coef);
        }
        Ok(p)
    }
}
