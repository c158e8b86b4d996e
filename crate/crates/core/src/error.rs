use thiserror::Error;

/// Errors raised by the geometry, form and cohomology routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cells do not form a polyhedral complex: {0}")]
    NonComplex(String),
    #[error("cell {tau} is not a facet of cell {sigma}")]
    NotAFacet { tau: usize, sigma: usize },
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("form does not vanish on unbounded cell {0}")]
    UnboundedSupport(usize),
    #[error("bidegree mismatch: expected ({expected_p},{expected_q}), found ({found_p},{found_q})")]
    BidegreeMismatch {
        expected_p: usize,
        expected_q: usize,
        found_p: usize,
        found_q: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("contraction slot {slot} out of range (degree {degree})")]
    SlotOutOfRange { slot: usize, degree: usize },
    #[error("sets do not cover the complex")]
    NotACover,
    #[error("cycle has dimension {found}, expected {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("bad range: {0}")]
    BadRange(String),
    #[error("form is not pulled back from the base on tube cell {0}")]
    NotPulledBack(usize),
    #[error("PL functions live on different carriers")]
    CarrierMismatch,
    #[error("image is not a polyhedral complex: {0}")]
    NotPolyhedral(String),
    #[error("no partition of unity subordinate to the cover")]
    NoPartition,
    #[error("pairing routes disagree: {0}")]
    Mismatch(String),
    #[error("slope is not integral on cell {0}")]
    NonIntegralSlope(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
