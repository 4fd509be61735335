//! Discrepancy of Hamilton-cycle powers in 2-edge-coloured graphs.
//!
//! Graphs carry a `+1`/`-1` label on every edge. The crate computes the
//! discrepancy of cycle powers and clique tilings, classifies cliques, checks
//! the template-swap identities, builds the extremal colourings, runs exact
//! searches on small graphs and assembles Hamilton powers from clustered
//! models.

pub mod clique;
pub mod constructions;
pub mod cycle_power;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod search;
pub mod template;

pub use error::{Error, Result};
pub use graph::{ColoredGraph, GraphBuilder};
