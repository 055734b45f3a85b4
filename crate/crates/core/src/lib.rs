//! Solver library for augmenting a Steiner tree to 2-edge-connectivity.
//!
//! The edge-weighted solver starts from an exactly-once up-link cover and
//! improves it with minimum-ratio k-thin sets of hyper-links; the
//! node-weighted solver grows greedy pseudo-spiders. Exact brute-force
//! oracles back every approximation claim at desk scale.

pub mod complete;
pub mod cost;
pub mod edgeset;
pub mod error;
pub mod gen;
pub mod greedy;
pub mod hyperlink;
pub mod nw;
pub mod oracle;
pub mod instance;
pub mod rooted;
pub mod steiner;
pub mod uplink;
#[cfg(test)]
pub(crate) mod testutil;

pub use cost::Rat;
pub use error::{Result, StapError};
pub use instance::{
    parse_instance, subdivide_links, validate, write_instance, LinkId, StapInstance,
    ValidationReport, Variant, VertexId,
};
pub use rooted::{root_tree, RootedTree};
