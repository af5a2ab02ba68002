//! Persistent homology of finite metric spaces, computed through finite
//! topologies: a density-aware link criterion thresholds the space into a
//! nested family of preorders, whose T0 quotients are reduced to their cores
//! and turned into simplicial complexes.

pub mod bits;
pub mod complexes;
pub mod criteria;
pub mod error;
pub mod field;
pub mod finite_space;
pub mod homology;
pub mod metric;
pub mod persistence;
pub mod pipeline;
pub mod poset;

pub use error::{Error, Result};
