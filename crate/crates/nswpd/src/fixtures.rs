//! Small hand-checked inputs.

use crate::io::parse_enewick;
use crate::model::{validate_network, Dag, Network};

/// Fish-heritage example network with taxa A..F and three reticulations.
/// For {A, B, D}: all-paths diversity 41, best switching tree 30, worst
/// switching tree 28.
pub const FISH_ENEWICK: &str =
    "((A:1,(B:6)#H1:4):3,((#H1:3,(C:2,(D:4)#H2:5):2):1,(#H2:5,(E:3)#H3:1):4):3,(F:1,#H3:4):3);";

/// DAG with a chain vertex `u` above the reticulation `v`; its node
/// scanwidth is 3. Bypassing `u` would lower it to 2.
pub const CHAIN_ENEWICK: &str = "((x1,((x2)#H2)#H1)b,(#H1)u,#H2)a;";

pub fn fish_network() -> Network {
    validate_network(parse_enewick(FISH_ENEWICK).expect("fixture parses")).expect("fixture is a network")
}

pub fn chain_dag() -> Dag {
    parse_enewick(CHAIN_ENEWICK).expect("fixture parses")
}
