//! Exact residue-field computations around moment maps of reductive dual
//! pairs over p-adic fields: finite fields with involution, formed spaces,
//! lattice-function jump sets, moment maps, cyclic gradings, the finite
//! correspondence check, and the rank classification of admissible pairs.

pub mod classify;
pub mod corresp;
pub mod grading;
pub mod lattice;
pub mod linalg;
pub mod moment;
pub mod numeric;
pub mod sample;
pub mod spaces;

pub use classify::{
    classification_table, rs_pair_exists, upsilon_check, witness, ClassificationTable, PairType,
    Verdict,
};
pub use corresp::{
    verify_theorem, Character, CorrespondenceInstance, FiniteAbelianGroup, Picture, TheoremReport,
    TildeModel,
};
pub use grading::{build_grading, Ambient, GradedGroup, GradedVector, Twist};
pub use lattice::{ApartmentPoint, Dichotomy, GradedPiece, JumpSet};
pub use linalg::Mat;
pub use moment::{LieAlgebra, LieType, MomentSetting};
pub use numeric::{
    make_field, root_of_unity, DualNumber, Fe, Field, FieldElem, Involution, NumericError, Rational,
};
pub use spaces::{star, witt_basis, DivisionKind, EpsHermSpace, Sign, WittLabels};
