//! Streaming estimation of the Caro-Wei bound of a graph.

pub mod coin;
pub mod degree_classes;
pub mod edge_arrival;
pub mod error;
pub mod graph;
pub mod vertex_arrival;
pub mod stream_gen;
pub mod harness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/graphs-and-streams.md")]
    pub mod graphs_and_streams {}
    #[doc = include_str!("../../../book/src/degree-classes.md")]
    pub mod degree_classes {}
    #[doc = include_str!("../../../book/src/edge-arrival.md")]
    pub mod edge_arrival {}
    #[doc = include_str!("../../../book/src/vertex-arrival.md")]
    pub mod vertex_arrival {}
    #[doc = include_str!("../../../book/src/generators.md")]
    pub mod generators {}
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
}
