//! Symbolic-numeric verification of Lie symmetries for steady and
//! time-dependent plasma equilibria.

pub mod error;
pub mod expr;
pub mod jet;
pub mod lie;
pub mod liouville;
pub mod numerics;
pub mod report;
pub mod sampling;
pub mod solution;
pub mod suites;
pub mod grid;
pub mod gss;
pub mod vortex;

pub use error::{Error, Result};
pub use expr::{parse, Expr, EvalPoint, Func, Node, Symbol, VarKind, VarRegistry};
pub use sampling::{Exclusion, SamplingBox};
