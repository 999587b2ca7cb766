//! Complex Chern–Simons invariants of branched ideal triangulations.

pub mod triangulation;
pub mod crossratio;
pub mod flattening;
pub mod dilog;
pub mod holonomy;
