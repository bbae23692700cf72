//! Tilings of the integers as symbolic dynamical systems.

pub mod analysis;
pub mod automaton;
pub mod compiler;
pub mod exec;
pub mod factorial;
pub mod format;
pub mod graph;
pub mod matrix;
pub mod prototile;
pub mod report;
pub mod sofic;
pub mod spectral;
pub mod suites;
pub mod tiling;
