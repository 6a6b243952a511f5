//! Brute-force references. Nothing here touches the DP solvers.

use thiserror::Error;

use crate::extension::TreeExtension;
use crate::model::{pd_map_value, CostTable, Dag, EdgeId, Network, TaxonSet, VertexId, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} switchings exceed the cap {1}")]
    TooManySwitchings(u128, u128),
    #[error("{0} taxa exceed the cap of 20")]
    TooManyTaxa(usize),
    #[error("{0} vertices exceed the cap of 7")]
    TooManyVertices(usize),
    #[error("taxon set is empty")]
    EmptyTaxonSet,
}

pub const DEFAULT_SWITCHING_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Map,
    MaxTree,
}

/// Calls `f` with the edge mask of every switching tree.
fn for_each_switching(net: &Network, cap: u128, mut f: impl FnMut(&[bool])) -> Result<(), OracleError> {
    let g = net.dag();
    let retics = net.reticulations();
    let count: u128 = retics.iter().map(|&r| g.in_degree(r) as u128).try_fold(1u128, |a, d| a.checked_mul(d)).unwrap_or(u128::MAX);
    if count > cap {
        return Err(OracleError::TooManySwitchings(count, cap));
    }
    let mut keep = vec![true; g.num_edges()];
    for &r in &retics {
        for &e in &g.in_edges(r)[1..] {
            keep[e] = false;
        }
    }
    let mut choice = vec![0usize; retics.len()];
    loop {
        f(&keep);
        // Odometer step.
        let mut i = 0;
        loop {
            if i == retics.len() {
                return Ok(());
            }
            let ins = g.in_edges(retics[i]);
            keep[ins[choice[i]]] = false;
            choice[i] += 1;
            if choice[i] < ins.len() {
                keep[ins[choice[i]]] = true;
                break;
            }
            choice[i] = 0;
            keep[ins[0]] = true;
            i += 1;
        }
    }
}

/// Diversity of `leaves` in the switching tree given by `keep`.
fn tree_pd(g: &Dag, keep: &[bool], leaves: &[VertexId]) -> Weight {
    let mut mark = vec![false; g.num_vertices()];
    let mut total = Weight::from_integer(0);
    let mut stack: Vec<VertexId> = Vec::new();
    for &l in leaves {
        if !mark[l] {
            mark[l] = true;
            stack.push(l);
        }
    }
    while let Some(v) = stack.pop() {
        for &e in g.in_edges(v) {
            if keep[e] {
                total += g.edge(e).weight;
                let p = g.edge(e).tail;
                if !mark[p] {
                    mark[p] = true;
                    stack.push(p);
                }
            }
        }
    }
    total
}

fn leaves_of(net: &Network, a: &TaxonSet) -> Vec<VertexId> {
    a.iter().map(|t| net.leaf_of(t)).collect()
}

pub fn brute_pd_max(net: &Network, a: &TaxonSet, cap: u128) -> Result<Weight, OracleError> {
    let leaves = leaves_of(net, a);
    let mut best: Option<Weight> = None;
    for_each_switching(net, cap, |keep| {
        let v = tree_pd(net.dag(), keep, &leaves);
        best = Some(best.map_or(v, |b| b.max(v)));
    })?;
    Ok(best.expect("at least one switching"))
}

pub fn brute_pd_min(net: &Network, a: &TaxonSet, cap: u128) -> Result<Weight, OracleError> {
    let leaves = leaves_of(net, a);
    let mut best: Option<Weight> = None;
    for_each_switching(net, cap, |keep| {
        let v = tree_pd(net.dag(), keep, &leaves);
        best = Some(best.map_or(v, |b| b.min(v)));
    })?;
    Ok(best.expect("at least one switching"))
}

/// Best value and the first optimal set in mask order.
pub fn brute_budgeted(net: &Network, costs: &CostTable, budget: u64, variant: Variant) -> Result<(Weight, TaxonSet), OracleError> {
    let nt = net.num_taxa();
    if nt > 20 {
        return Err(OracleError::TooManyTaxa(nt));
    }
    let mut best = (Weight::from_integer(0), TaxonSet::new());
    let mut values: Vec<Option<Weight>> = vec![None; 1 << nt];
    if variant == Variant::MaxTree {
        // For every switching tree, PD of every subset; keep the maximum.
        let g = net.dag();
        for_each_switching(net, DEFAULT_SWITCHING_CAP, |keep| {
            for (mask, slot) in values.iter_mut().enumerate() {
                let a = TaxonSet::from_mask(mask as u64, nt);
                let v = tree_pd(g, keep, &leaves_of(net, &a));
                if slot.is_none_or(|s| v > s) {
                    *slot = Some(v);
                }
            }
        })?;
    }
    for mask in 0..(1u64 << nt) {
        let a = TaxonSet::from_mask(mask, nt);
        if costs.cost_of(&a) > budget {
            continue;
        }
        let v = match variant {
            Variant::Map => pd_map_value(net, &a),
            Variant::MaxTree => values[mask as usize].expect("filled above"),
        };
        if v > best.0 {
            best = (v, a);
        }
    }
    Ok(best)
}

/// Tries every parent map on at most 7 vertices.
pub fn exhaustive_nsw(g: &Dag) -> Result<(TreeExtension, usize), OracleError> {
    let n = g.num_vertices();
    if n > 7 {
        return Err(OracleError::TooManyVertices(n));
    }
    if n == 0 {
        return Ok((TreeExtension::new(g, Vec::new()).expect("empty"), 0));
    }
    let mut best: Option<(TreeExtension, usize)> = None;
    for root in 0..n {
        // Each non-root vertex picks one of the n - 1 other vertices.
        let others = n - 1;
        let total = (others as u64).pow(others as u32).max(1);
        for code in 0..total {
            let mut c = code;
            let mut parent = vec![None; n];
            for (v, slot) in parent.iter_mut().enumerate() {
                if v == root {
                    continue;
                }
                let mut p = (c % others as u64) as usize;
                c /= others as u64;
                if p >= v {
                    p += 1;
                }
                *slot = Some(p);
            }
            if let Ok(ext) = TreeExtension::new(g, parent) {
                let w = ext.width();
                if best.as_ref().is_none_or(|b| w < b.1) {
                    best = Some((ext, w));
                }
            }
        }
    }
    Ok(best.expect("a topological path is always an extension"))
}

/// Union of root-to-leaf paths in the whole network, by explicit path walk.
pub fn naive_offspring_edges(net: &Network, a: &TaxonSet) -> Vec<EdgeId> {
    let g = net.dag();
    let targets: Vec<VertexId> = leaves_of(net, a);
    let mut out = Vec::new();
    for e in 0..g.num_edges() {
        let head = g.edge(e).head;
        if targets.iter().any(|&t| g.descendants(head).contains(t)) {
            out.push(e);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_enewick;
    use crate::model::validate_network;

    #[test]
    fn switching_counts() {
        let net = validate_network(parse_enewick("((a:1,(h:1)#H1:2):3,(#H1:4,b:5):6);").unwrap()).unwrap();
        let mut k = 0;
        for_each_switching(&net, 100, |_| k += 1).unwrap();
        assert_eq!(k, 2);
        assert!(matches!(for_each_switching(&net, 1, |_| ()), Err(OracleError::TooManySwitchings(2, 1))));
        let a = net.taxon_set(&["h"]).unwrap();
        assert_eq!(brute_pd_max(&net, &a, 100).unwrap(), Weight::from_integer(11));
        assert_eq!(brute_pd_min(&net, &a, 100).unwrap(), Weight::from_integer(6));
    }

    #[test]
    fn budgeted_extremes() {
        let net = validate_network(parse_enewick("((a:1,(h:1)#H1:2):3,(#H1:4,b:5):6);").unwrap()).unwrap();
        let costs = CostTable(vec![1, 1, 1]);
        for variant in [Variant::Map, Variant::MaxTree] {
            assert_eq!(brute_budgeted(&net, &costs, 0, variant).unwrap(), (Weight::from_integer(0), TaxonSet::new()));
        }
        let (v, a) = brute_budgeted(&net, &costs, 3, Variant::Map).unwrap();
        assert_eq!(v, net.dag().total_weight());
        assert_eq!(a, net.all_taxa());
    }

    #[test]
    fn exhaustive_small() {
        let diamond = Dag::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(exhaustive_nsw(&diamond).unwrap().1, 2);
        let tree = Dag::from_pairs(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        assert_eq!(exhaustive_nsw(&tree).unwrap().1, 1);
        let big = Dag::from_pairs(8, &[]).unwrap();
        assert!(exhaustive_nsw(&big).is_err());
    }
}
