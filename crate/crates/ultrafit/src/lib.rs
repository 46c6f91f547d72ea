//! File formats, evaluation and the `ultrafit` command-line tool, on top of
//! [`ultrafit_core`].

pub mod cli;
pub mod eval;
pub mod formats;

pub use ultrafit_core as core;
