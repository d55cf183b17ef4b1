//! Reference interpreters, random program generation, and differential
//! testing of passes.

pub mod diff;
pub mod gen;
pub mod interp;
