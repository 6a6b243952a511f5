//! Text formats: extended Newick, cost tables, result records.

pub mod costs;
pub mod newick;
pub mod record;

pub use costs::{parse_costs, write_costs, CostError};
pub use newick::{parse_enewick, serialize_enewick, NewickError};
pub use record::{digest, weight_value, ResultRecord};
