//! JSON interchange formats. Every rational is a `"p/q"` string (plain JSON
//! integers are accepted too); indices of superform terms are 1-based.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use tropcalc_core::complex::examples;
use tropcalc_core::milnor::{Entry, SymbolTerm};
use tropcalc_core::rat::{serde_rat, serde_rat_mat, serde_rat_vec};
use tropcalc_core::{
    build_tube, Affine, Cell, Error, Incidence, IntVector, OpenSet, PLFunction, PiecewiseForm,
    PolyComplex, Polyhedron, Rat, RatVector, Result, Superform, Symbol, TubeModel, WeightedCycle,
};

/// Reads a file as JSON (`Parse` on malformed text) and decodes it
/// (`Schema` on a structural mismatch).
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    decode(v)
}

pub fn decode<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyhedronSpec {
    #[serde(with = "serde_rat_mat")]
    pub vertices: Vec<RatVector>,
    #[serde(default)]
    pub rays: Vec<IntVector>,
    #[serde(default)]
    pub lineality: Vec<IntVector>,
}

impl PolyhedronSpec {
    pub fn build(&self, ambient_dim: Option<usize>) -> Result<Polyhedron> {
        let n = ambient_dim
            .or_else(|| self.vertices.first().map(|v| v.len()))
            .ok_or_else(|| Error::Schema("polyhedron without vertices".into()))?;
        Polyhedron::new(n, self.vertices.clone(), self.rays.clone(), self.lineality.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSpec {
    pub dim: usize,
    #[serde(default)]
    pub basis: Vec<IntVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolyhedronSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncidenceSpec {
    pub face: usize,
    pub cell: usize,
    pub sign: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ComplexSpec {
    Embedded {
        #[serde(default)]
        ambient_dim: Option<usize>,
        maximal: Vec<PolyhedronSpec>,
    },
    Abstract {
        ambient_dim: usize,
        cells: Vec<CellSpec>,
        incidences: Vec<IncidenceSpec>,
    },
    /// Built-in complexes: `point`, `circle`, `torus`, `tropical_line`,
    /// `cube` (with `n`, `lo`, `hi`).
    Demo {
        name: String,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        lo: Option<i64>,
        #[serde(default)]
        hi: Option<i64>,
    },
}

/// A complex together with the ids of the cells listed by the user, in
/// order; per-cell data in other files refers to this order.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub complex: PolyComplex,
    pub listed: Vec<usize>,
}

pub fn demo_complex(name: &str, n: usize, lo: i64, hi: i64) -> Result<PolyComplex> {
    match name {
        "point" => Ok(examples::point()),
        "circle" => Ok(examples::circle()),
        "torus" => Ok(examples::torus2()),
        "tropical_line" => Ok(examples::tropical_line()),
        "cube" if lo < hi => Ok(examples::cube(n, lo, hi)),
        other => Err(Error::Schema(format!("unknown demo complex {other:?}"))),
    }
}

impl ComplexSpec {
    pub fn load(&self) -> Result<Loaded> {
        match self {
            ComplexSpec::Embedded { ambient_dim, maximal } => {
                let polys: Vec<Polyhedron> = maximal.iter().map(|p| p.build(*ambient_dim)).collect::<Result<_>>()?;
                let complex = PolyComplex::face_lattice(&polys)?;
                let listed = polys
                    .iter()
                    .map(|p| complex.find_cell(p).ok_or_else(|| Error::Schema("empty maximal cell".into())))
                    .collect::<Result<_>>()?;
                Ok(Loaded { complex, listed })
            }
            ComplexSpec::Abstract {
                ambient_dim,
                cells,
                incidences,
            } => {
                let cells: Vec<Cell> = cells
                    .iter()
                    .map(|c| {
                        Ok(Cell {
                            dim: c.dim,
                            basis: c.basis.clone(),
                            polyhedron: c.polytope.as_ref().map(|p| p.build(None)).transpose()?,
                        })
                    })
                    .collect::<Result<_>>()?;
                let incidences = incidences
                    .iter()
                    .map(|i| Incidence {
                        face: i.face,
                        cell: i.cell,
                        sign: i.sign,
                    })
                    .collect();
                let complex = PolyComplex::abstract_complex(*ambient_dim, cells, incidences)?;
                let listed = (0..complex.len()).collect();
                Ok(Loaded { complex, listed })
            }
            ComplexSpec::Demo { name, n, lo, hi } => {
                let complex = demo_complex(name, n.unwrap_or(1), lo.unwrap_or(0), hi.unwrap_or(1))?;
                let listed = match complex.mode {
                    tropcalc_core::Mode::Embedded => complex.maximal_cells(),
                    tropcalc_core::Mode::Abstract => (0..complex.len()).collect(),
                };
                Ok(Loaded { complex, listed })
            }
        }
    }
}

impl Loaded {
    /// Maps per-cell data onto cells: a single entry applies to every
    /// maximal cell; otherwise entries follow the listed cells (embedded)
    /// or the top cells (abstract).
    fn spread<T: Clone>(&self, items: &[T]) -> Result<Vec<(usize, T)>> {
        let targets = match self.complex.mode {
            _ if items.len() == 1 => return Ok(self.complex.maximal_cells().into_iter().map(|c| (c, items[0].clone())).collect()),
            tropcalc_core::Mode::Embedded => self.listed.clone(),
            tropcalc_core::Mode::Abstract => self.complex.maximal_cells(),
        };
        if items.len() != targets.len() {
            return Err(Error::Schema(format!("{} entries for {} cells", items.len(), targets.len())));
        }
        Ok(targets.into_iter().zip(items.iter().cloned()).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Listed(Vec<i64>),
    ById(BTreeMap<String, i64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleSpec {
    pub complex: ComplexSpec,
    #[serde(default)]
    pub dim: Option<usize>,
    pub weights: WeightsSpec,
}

impl CycleSpec {
    pub fn load(&self) -> Result<(Loaded, WeightedCycle)> {
        let loaded = self.complex.load()?;
        let dim = self.dim.unwrap_or(loaded.complex.dim().max(0) as usize);
        let weights: BTreeMap<usize, i64> = match &self.weights {
            WeightsSpec::Listed(ws) => loaded.spread(ws)?.into_iter().collect(),
            WeightsSpec::ById(map) => map
                .iter()
                .map(|(k, &w)| {
                    let id: usize = k.parse().map_err(|_| Error::Schema(format!("bad cell id {k:?}")))?;
                    Ok((id, w))
                })
                .collect::<Result<_>>()?,
        };
        let z = WeightedCycle::new(loaded.complex.clone(), dim, weights)?;
        Ok((loaded, z))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormSpec {
    #[serde(default)]
    pub complex: Option<ComplexSpec>,
    #[serde(default)]
    pub form: Option<Superform>,
    #[serde(default)]
    pub pieces: Option<Vec<Superform>>,
}

impl FormSpec {
    /// The form on its own complex, or on `fallback` if it names none.
    pub fn load(&self, fallback: Option<&Loaded>) -> Result<PiecewiseForm> {
        let own;
        let loaded = match (&self.complex, fallback) {
            (Some(c), _) => {
                own = c.load()?;
                &own
            }
            (None, Some(f)) => f,
            (None, None) => return Err(Error::Schema("form needs a complex".into())),
        };
        let pieces: Vec<Superform> = match (&self.form, &self.pieces) {
            (Some(f), None) => vec![f.clone()],
            (None, Some(p)) if !p.is_empty() => p.clone(),
            _ => return Err(Error::Schema("give exactly one of form and pieces".into())),
        };
        let (p, q) = pieces[0].bidegree();
        let mut out = PiecewiseForm::zero(loaded.complex.clone(), p, q);
        for (cell, f) in loaded.spread(&pieces)? {
            out.set(cell, f)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineSpec {
    #[serde(with = "serde_rat_vec")]
    pub slope: RatVector,
    #[serde(with = "serde_rat", default = "zero")]
    pub constant: Rat,
}

fn zero() -> Rat {
    tropcalc_core::rat::zero()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PLSpec {
    Pieces { pieces: Vec<AffineSpec> },
    Uniform(AffineSpec),
}

impl PLSpec {
    pub fn load(&self, loaded: &Loaded) -> Result<PLFunction> {
        let items = match self {
            PLSpec::Pieces { pieces } => pieces.clone(),
            PLSpec::Uniform(a) => vec![a.clone()],
        };
        let pieces = loaded
            .spread(&items)?
            .into_iter()
            .map(|(c, a)| (c, Affine::new(a.slope, a.constant)))
            .collect();
        PLFunction::new(loaded.complex.clone(), pieces)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntrySpec {
    Product { product: Vec<PLSpec> },
    Single(PLSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(with = "serde_rat")]
    pub coef: Rat,
    pub tuple: Vec<EntrySpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub complex: ComplexSpec,
    pub q: usize,
    pub terms: Vec<TermSpec>,
}

impl SymbolSpec {
    pub fn load(&self) -> Result<(Loaded, Symbol)> {
        let loaded = self.complex.load()?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let tuple: Vec<Entry> = t
                    .tuple
                    .iter()
                    .map(|e| match e {
                        EntrySpec::Single(f) => Ok(vec![f.load(&loaded)?]),
                        EntrySpec::Product { product } => product.iter().map(|f| f.load(&loaded)).collect(),
                    })
                    .collect::<Result<_>>()?;
                Ok(SymbolTerm {
                    coef: t.coef.clone(),
                    tuple,
                })
            })
            .collect::<Result<_>>()?;
        let s = Symbol::new(self.q, terms)?;
        Ok((loaded, s))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeSpec {
    pub base: ComplexSpec,
    pub q: usize,
    #[serde(with = "serde_rat")]
    pub h: Rat,
    #[serde(with = "serde_rat")]
    pub cap: Rat,
    #[serde(default = "one")]
    pub weight: i64,
}

fn one() -> i64 {
    1
}

impl TubeSpec {
    pub fn load(&self) -> Result<(Loaded, TubeModel)> {
        let base = self.base.load()?;
        let tube = build_tube(base.complex.clone(), self.q, self.h.clone(), self.cap.clone(), self.weight)?;
        Ok((base, tube))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintSpec {
    #[serde(with = "serde_rat_vec")]
    pub a: RatVector,
    #[serde(with = "serde_rat")]
    pub c: Rat,
}

/// Open sets `{x : a·x < c for every constraint}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverSpec {
    pub sets: Vec<Vec<ConstraintSpec>>,
}

impl CoverSpec {
    pub fn load(&self) -> Vec<OpenSet> {
        self.sets
            .iter()
            .map(|s| OpenSet::new(s.iter().map(|c| (c.a.clone(), c.c.clone())).collect()))
            .collect()
    }
}

/// A cycle class is stored by its inputs and recomputed on use.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub tube: TubeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSpec>,
}
