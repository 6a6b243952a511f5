//! Node-scanwidth tree-extensions of rooted phylogenetic networks and
//! phylogenetic-diversity optimization over them.
//!
//! * [`model`]: weighted DAGs, networks, taxon sets, direct PD evaluation.
//! * [`io`]: extended Newick, cost CSV, JSON result records.
//! * [`extension`]: tree-extensions, bags and widths.
//! * [`reduce`] and [`exact`]: reduction rules and the exact solver.
//! * [`ilp`]: LP-format model for node scanwidth and a solver-free checker.
//! * [`pd`]: budgeted all-paths PD, budgeted max-tree PD and min-tree PD.
//! * [`oracles`]: brute-force references for testing.
//! * [`gen`]: seeded instance generation.
//! * [`fixtures`]: small example networks.

pub mod bitset;
pub mod exact;
pub mod extension;
pub mod fixtures;
pub mod gen;
pub mod ilp;
pub mod io;
pub mod model;
pub mod oracles;
pub mod pd;
pub mod reduce;

pub use bitset::VertexSet;
pub use extension::TreeExtension;
pub use model::{CostTable, Dag, Network, TaxonSet, VertexId, Weight};
