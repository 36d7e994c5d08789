//! Analysis of finite-dimensional quantum Markov semigroups in GKSL form.

pub mod acceptance;
pub mod catalog;
pub mod error;
pub mod fleet;
pub mod generic;
pub mod gksl;
pub mod io;
pub mod matkit;
pub mod report;
pub mod sse;
pub mod structure;

pub use error::{Error, Result};
