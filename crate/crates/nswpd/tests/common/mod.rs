#![allow(dead_code)]

use nswpd::gen::{contract_shortest, gen_network};
use nswpd::{CostTable, Network, TaxonSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small network for oracle comparisons: 2..=max_leaves leaves,
/// 0..=max_ret reticulations, every third one non-binary.
pub fn small_network(seed: u64, max_leaves: usize, max_ret: usize) -> Network {
    let mut r = rng(seed ^ 0x5eed);
    let leaves = r.gen_range(2..=max_leaves);
    let ret = r.gen_range(0..=max_ret);
    let net = gen_network(leaves, ret, seed).expect("generator accepts these sizes");
    if seed % 3 == 0 {
        contract_shortest(&net, 0.10)
    } else {
        net
    }
}

/// Integer costs in 0..=max.
pub fn random_costs(net: &Network, seed: u64, max: u64) -> CostTable {
    let mut r = rng(seed ^ 0xc057);
    CostTable((0..net.num_taxa()).map(|_| r.gen_range(0..=max)).collect())
}

/// Nonempty random taxon set.
pub fn random_taxa(net: &Network, seed: u64) -> TaxonSet {
    let mut r = rng(seed ^ 0x7a7a);
    let n = net.num_taxa();
    loop {
        let a = TaxonSet::from_ids((0..n).filter(|_| r.gen_bool(0.5)));
        if !a.is_empty() {
            return a;
        }
    }
}
