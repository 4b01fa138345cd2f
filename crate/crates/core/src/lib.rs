//! Transversal (rainbow) Hamilton cycles in families of Dirac graphs.
//!
//! Exact search and counting, half-set extremality analysis, randomized
//! constructions (rotation-extension, rainbow matchings, vortices and absorbers,
//! cover-down, extremal cleanups) and a reproducible experiment harness.

pub mod cover;
pub mod error;
pub mod exact;
pub mod extremal;
pub mod family;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod pipeline;
pub mod posa;
pub mod rainbow;
pub mod rng;
pub mod spread;
pub mod stats;
pub mod transversal;
pub mod vortex;

pub use error::{Error, Result};
pub use family::ColoredFamily;
pub use graph::{Graph, VertexSet};
pub use transversal::{validate_transversal, Transversal};
