//! Exact HeLP (Luthar–Passi) analysis of torsion units in integral group rings.
//!
//! The crate turns ordinary and Brauer character tables into integer
//! constraint systems on partial augmentations, enumerates their integer
//! solutions, and aggregates per-order results into a unit-order spectrum
//! and a prime-graph comparison. The Mathieu group M22 ships as a bundled
//! dataset together with reference solution lists.

pub mod analysis;
pub mod arith;
pub mod chartab;
pub mod cli;
pub mod cyclotomic;
pub mod expected;
pub mod help_core;
pub mod report;
pub mod solver;

pub use cyclotomic::{CycNum, Rational};
