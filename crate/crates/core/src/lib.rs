//! Exact tools for dissecting an `n x n` square into as few integer squares
//! as possible.
//!
//! * [`geometry`]: tilings, validation, symmetry, the tiling file format.
//! * [`model`]: the 0-1 integer program over corner placements and its
//!   variants, LP/MPS export, solution decoding.
//! * [`solver`]: exact minimization (specialized and generic
//!   branch-and-bound) plus an exhaustive oracle for tiny frames.
//! * [`network`]: the dissector network of a tiling and exact Kirchhoff
//!   size recovery.
//! * [`bounds`]: closed-form bounds and explicit constructions.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod model;
pub mod network;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Placement, SizeMultiset, Tiling};
