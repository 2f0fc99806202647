//! Discrete abelian BF theory on finite cochain complexes with marked boundary.

mod complex;
mod contraction;
mod field;
mod state;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::bv::BvError;
use crate::cartan::CartanError;
use crate::supermatrix::SuperMatrixError;

pub use complex::{
    annulus, circle, collar, disk, disk_dual, dual_interval, free_interval, interval, lasso, Cell, ChainComplexModel,
    Incidence,
};
pub use contraction::{chain_contraction, residual_fields, ChainContraction, ResidualDims};
pub use field::{
    build_bf, build_bf_in, dressed_operator, mqme_prefactor, BoundaryBfv, BoundaryComplex, BoundaryOperator, DiscreteBF,
    LocalityReport, MqmeReport,
};
pub use state::{
    contraction_change, effective_action, effective_action_with, glue, interface_incidences, pair_interface,
    residual_ghosts, states_equivalent, ContractionChange, DiscreteState, Equivalence,
    Match, ResidualPair,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Bv(#[from] BvError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    SuperMatrix(#[from] SuperMatrixError),
    #[error("cell `{0}` has degree {1} above the complex dimension")]
    CellDegree(String, u32),
    #[error("duplicate cell `{0}`")]
    DuplicateCell(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("incidence ({0}, {1}) does not raise degree by one")]
    IncidenceDegree(String, String),
    #[error("coboundary does not square to zero")]
    NotDifferential,
    #[error("cell `{0}` is marked in both boundary pieces")]
    OverlappingBoundary(String),
    #[error("A-fixed cell `{0}` has face `{1}` outside the A-fixed boundary")]
    NotFaceClosed(String, String),
    #[error("B-fixed cell `{0}` has coface `{1}` outside the B-fixed boundary")]
    NotCofaceClosed(String, String),
    #[error("no sign choice makes the boundary-extended Q cohomological")]
    NoCohomologicalQ,
    #[error("degenerate quadratic form: {0}")]
    Degenerate(String),
    #[error("polarization clash on interface: {0}")]
    PolarizationClash(String),
    #[error("bad interface: {0}")]
    Interface(String),
    #[error("action is not of the form ⟨B, dA⟩: {0}")]
    NotBilinear(String),
    #[error("chain contraction fails a side condition: {0}")]
    SideCondition(&'static str),
}

/// Coefficient of the A-type terms in the boundary action.
pub(crate) const BOUNDARY_SIGN_A: i64 = -1;
/// Coefficient of the B-type terms in the boundary action.
pub(crate) const BOUNDARY_SIGN_B: i64 = -1;

pub(crate) fn a_name(cell: &str) -> String {
    format!("A.{cell}")
}

pub(crate) fn b_name(cell: &str) -> String {
    format!("B.{cell}")
}
