//! Teacher-student simulations of the binary (Ising) perceptron.
//!
//! A hidden teacher vector `T ∈ {-1,+1}^N` labels patterns by
//! `sign(ξ · T)`; a student tries to recover `T` from as few labelled
//! patterns as possible. The crate implements five students:
//!
//! - [`deductive`]: exact recovery with at most `N + ceil(log2 N)` queries;
//! - [`version_space`]: explicit enumeration for `N <= 25`, with an exact
//!   bisecting pattern designer and a passive baseline;
//! - [`meanfield`] + [`designer`]: online mean-field beliefs fed either by
//!   random patterns or by annealed patterns with zero mean overlap, with or
//!   without an orthogonality penalty against recent patterns.
//!
//! [`harness`] runs ensembles of trajectories and writes CSV tables and SVG
//! figures.

pub mod deductive;
pub mod designer;
pub mod error;
pub mod harness;
pub mod meanfield;
pub mod special;
pub mod spin;
pub mod version_space;

pub use error::{Error, Result};
pub use spin::{classify, hamming_error, overlap, prefix_flip, Spin, SpinVector, TeacherOracle};
