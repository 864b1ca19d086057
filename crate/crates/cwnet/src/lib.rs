//! Analysis of networks whose edges carry Hermitian complex weights.
//!
//! An edge weight is a complex number `r·e^{iφ}` stored as a magnitude and a
//! phase; the weight matrix is Hermitian, so the reverse direction of an edge
//! carries the conjugate weight. On top of that model the crate provides:
//!
//! - [`balance`]: classification of graphs as balanced / antibalanced /
//!   strictly unbalanced, with partition extraction and spectral cross-checks;
//! - [`randwalk`]: discrete-time random walks with phases, closed-form steady
//!   states per balance class, and the lifted phase-class dynamics;
//! - [`clustering`]: general cuts, the trace identity, and two-level spectral
//!   clustering with k-means and NMI scoring;
//! - [`csbm`]: a stochastic block model generator with planted two-level
//!   communities and phase mixing;
//! - [`magnetic`]: magnetic Laplacians of directed graphs, effective cycle
//!   lengths, eigenvalue sweeps over `θ = 2π/r`, and role extraction;
//! - [`linalg`]: the dense Hermitian eigensolver everything above relies on.
//!
//! Graphs are immutable after construction and all derived-matrix operations
//! are pure, so values can be shared freely across threads.

pub mod angle;
pub mod balance;
pub mod clustering;
pub mod csbm;
mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod magnetic;
pub mod randwalk;

pub use error::{Error, Result};
pub use graph::{ComplexGraph, ComplexWeight, DegreeVector, DirectedGraph};
pub use linalg::{CMatrix, CVector, EigenDecomposition};
