//! Multi-scale polygon layouts for hypergraphs.

pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod hypergraph;
pub mod io;
pub mod layout;
pub mod lbfgs;
pub mod metrics;
pub mod pipeline;
pub mod planarity;
pub mod render;
pub mod simplify;
pub mod stats;

pub use error::{Error, Result};
pub use hypergraph::{ElementId, Footprint, Hypergraph, KonigGraph, Kind};
