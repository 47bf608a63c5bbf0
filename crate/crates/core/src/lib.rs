//! A small dependent type theory with rewrite rules, and a checker for
//! lexicons of boundedness, telicity and event semantics written against it.

pub mod corpus;
pub mod driver;
pub mod kernel;
pub mod prelude;
pub mod print;
pub mod surface;
pub mod term;
