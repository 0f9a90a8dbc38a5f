//! Prescribed Ricci curvature `Ric g = cT` for invariant metrics on compact
//! homogeneous spaces `G/H`, described purely by the numbers of an
//! `Ad(H)`-irreducible decomposition `m = m_1 ⊕ … ⊕ m_s`.

pub mod catalog;
pub mod chains;
pub mod curvature;
pub mod form;
pub mod index_set;
pub mod io;
pub mod iteration;
pub mod model;
pub mod scalar;
pub mod solver;

pub use chains::{Analysis, ConditionReport, SimpleChain};
pub use form::DiagonalForm;
pub use index_set::IndexSet;
pub use model::{ModelInput, SpaceModel, SubalgebraLattice, Triple};
pub use scalar::Scalar;
