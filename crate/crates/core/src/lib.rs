//! Header-validity checking for a P4-style packet-processing calculus.

#![allow(clippy::result_large_err)]

pub mod algebra;
pub mod diagnostics;
pub mod syntax;
pub mod check;
pub mod control;
pub mod interp;
pub mod gen;
