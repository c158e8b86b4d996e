//! Exact calculus of real superforms on rational polyhedral complexes.
//!
//! The crate is organised bottom-up: exact arithmetic ([`rat`], [`linalg`]),
//! polyhedral geometry ([`polyhedron`], [`complex`]), tropical cycles
//! ([`cycles`]), superforms and piecewise data ([`poly`], [`superform`],
//! [`piecewise`]), integration and Stokes formulas ([`integrate`]), Milnor
//! symbols and the τ map ([`milnor`]), and the Dolbeault side: cellular
//! cohomology, Čech zig-zags and the cycle-class pairing ([`dolbeault`]).

pub mod complex;
pub mod cycles;
pub mod dolbeault;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod milnor;
pub mod piecewise;
pub mod poly;
pub mod polyhedron;
pub mod rat;
pub mod superform;

pub use complex::{Cell, Incidence, Mode, PolyComplex};
pub use cycles::{build_tube, TubeModel, WeightedCycle};
pub use dolbeault::{Cochain, CochainComplex, CycleClass, PairingReport};
pub use error::{Error, Result};
pub use integrate::IntegralResult;
pub use milnor::{Symbol, SymbolTerm, TropChart};
pub use piecewise::{Affine, OpenSet, PLFunction, PiecewiseForm};
pub use poly::Polynomial;
pub use polyhedron::{HRep, Polyhedron};
pub use rat::{IntVector, Rat, RatVector};
pub use superform::{Kind, Superform};
