//! Finite groups extended by the commutator and by
//! `w(x,y1,y2,y3) = x⁸[[[x,y1],y2],y3]`: structural constructions, term
//! evaluation, exhaustive equation/identity deciders, and the compilers that
//! turn graph coloring and 3-SAT into equations over those algebras.

pub mod group;
pub mod reductions;
pub mod solver;
pub mod structure;
pub mod term;

pub use group::{Builtin, Elem, FiniteGroup, GroupError, GroupSpec, Permutation};
pub use reductions::{CnfInstance, ColoringInstance, ReductionError, ReductionOutput, Variant};
pub use solver::{EquationInstance, SolverConfig, SolverError};
pub use structure::{CaseKind, Classification, HConstruction, QuotientMap, StructureError, Subgroup};
pub use term::{Assignment, Signature, Term, TermError};
