//! Exact-rational decision procedures for the existential theories of the
//! pointed real l-group and of the standard MV-algebra, together with the
//! polynomial-size translations between them.

pub mod decide;
pub mod formula;
pub mod generate;
pub mod lemmas;
pub mod linear;
pub mod parser;
pub mod rat;
pub mod reduction;
pub mod semantics;
pub mod transform;

pub use formula::{Atom, BinOp, Constant, OpenFormula, Rel, Signature, Term, UnaryOp};
pub use rat::Rational;
pub use semantics::{Algebra, Assignment};
