//! Source-to-source transformations written once over shared generic
//! syntax fragments and applied to several small imperative languages.

pub mod flow;
pub mod fragments;
pub mod harness;
pub mod injections;
pub mod lang;
pub mod modularizer;
pub mod term;
pub mod transforms;
pub mod traversal;
