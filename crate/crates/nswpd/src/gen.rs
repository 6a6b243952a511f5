//! Seeded random networks, costs and edge contraction.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use thiserror::Error;

use crate::model::{validate_network, CostTable, Dag, Edge, Network, VertexId, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("cannot build a network with these parameters: {0}")]
    InfeasibleParameters(String),
}

const MAX_ATTEMPTS: usize = 10_000;

fn weight(rng: &mut ChaCha8Rng) -> Weight {
    Weight::from_integer(rng.gen_range(1..=10))
}

/// Random binary tree on `n_leaves` leaves grown by splitting a random leaf,
/// then `n_reticulations` extra edges, each joining the subdivision points
/// of two random edges when that keeps the graph acyclic. Leaves are named
/// `t1`, `t2`, ... in creation order and weights are integers in 1..=10.
pub fn gen_network(n_leaves: usize, n_reticulations: usize, seed: u64) -> Result<Network, GenError> {
    if n_leaves < 2 {
        return Err(GenError::InfeasibleParameters("need at least two leaves".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 3;
    let mut edges: Vec<(VertexId, VertexId, Weight)> = vec![(0, 1, weight(&mut rng)), (0, 2, weight(&mut rng))];
    let mut leaves = vec![1, 2];
    while leaves.len() < n_leaves {
        let i = rng.gen_range(0..leaves.len());
        let l = leaves.swap_remove(i);
        let (a, b) = (n, n + 1);
        n += 2;
        edges.push((l, a, weight(&mut rng)));
        edges.push((l, b, weight(&mut rng)));
        leaves.push(a);
        leaves.push(b);
    }
    for _ in 0..n_reticulations {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let i = rng.gen_range(0..edges.len());
            let j = rng.gen_range(0..edges.len());
            if i == j {
                continue;
            }
            let (u1, v1, _) = edges[i];
            let (u2, v2, _) = edges[j];
            // a sits on u1->v1, r on u2->v2; a->r closes a cycle iff r reaches a.
            if reaches(n, &edges, v2, u1) {
                continue;
            }
            let (a, r) = (n, n + 1);
            n += 2;
            edges[i] = (u1, a, weight(&mut rng));
            edges.push((a, v1, weight(&mut rng)));
            edges[j] = (u2, r, weight(&mut rng));
            edges.push((r, v2, weight(&mut rng)));
            edges.push((a, r, weight(&mut rng)));
            placed = true;
            break;
        }
        if !placed {
            return Err(GenError::InfeasibleParameters("no acyclic place for a reticulation".into()));
        }
    }
    // Label leaves by creation order.
    let mut leaf_ids: Vec<VertexId> = {
        let mut out = vec![0usize; n];
        for &(u, _, _) in &edges {
            out[u] += 1;
        }
        (1..n).filter(|&v| out[v] == 0).collect()
    };
    leaf_ids.sort_unstable();
    let mut labels = vec![None; n];
    for (k, &v) in leaf_ids.iter().enumerate() {
        labels[v] = Some(format!("t{}", k + 1));
    }
    edges.sort_by_key(|e| (e.0, e.1));
    let dag = Dag::new(n, edges.into_iter().map(|(u, v, w)| Edge::new(u, v, w)).collect(), labels)
        .map_err(|e| GenError::InfeasibleParameters(e.to_string()))?;
    validate_network(dag).map_err(|e| GenError::InfeasibleParameters(e.to_string()))
}

fn reaches(n: usize, edges: &[(VertexId, VertexId, Weight)], from: VertexId, to: VertexId) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u].push(v);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        if !std::mem::replace(&mut seen[x], true) {
            stack.extend(adj[x].iter().copied());
        }
    }
    false
}

/// Random DAG on `n` vertices: a random vertex order and each forward pair
/// joined with probability `p`.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                pairs.push((order[i], order[j]));
            }
        }
    }
    Dag::from_pairs(n, &pairs).expect("forward edges in a fixed order form a DAG")
}

/// Per-taxon cost: a log-normal draw with log-mean 2 and log-sd 0.8,
/// rounded and raised to at least 1.
pub fn sample_costs(net: &Network, seed: u64) -> CostTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist: LogNormal<f64> = LogNormal::new(2.0, 0.8).expect("valid parameters");
    CostTable((0..net.num_taxa()).map(|_| (dist.sample(&mut rng).round() as u64).max(1)).collect())
}

/// Contracts the shortest contractible edges, `ceil(fraction * |E|)` of
/// them or until none is left. An edge u->v is contractible when v is an
/// internal tree vertex, u is the root or a tree vertex, and u and v have no
/// common child. Ties go to the smaller edge id.
pub fn contract_shortest(net: &Network, fraction: f64) -> Network {
    let g = net.dag();
    let target = (fraction * g.num_edges() as f64).ceil() as usize;
    // (tail, head, weight) with the original id as position; None once gone.
    let mut edges: Vec<Option<(VertexId, VertexId, Weight)>> =
        g.edges().iter().map(|e| Some((e.tail, e.head, e.weight))).collect();
    let n = g.num_vertices();
    let mut alive = vec![true; n];
    for _ in 0..target {
        let mut indeg = vec![0usize; n];
        let mut children: Vec<HashSet<VertexId>> = vec![HashSet::new(); n];
        for &(u, v, _) in edges.iter().flatten() {
            indeg[v] += 1;
            children[u].insert(v);
        }
        let mut best: Option<(Weight, usize)> = None;
        for (id, e) in edges.iter().enumerate() {
            let Some((u, v, w)) = *e else { continue };
            let v_tree = indeg[v] == 1 && children[v].len() >= 2;
            let u_ok = indeg[u] <= 1 && children[u].len() >= 2;
            if !v_tree || !u_ok || !children[u].is_disjoint(&children[v]) {
                continue;
            }
            if best.is_none_or(|(bw, bid)| (w, id) < (bw, bid)) {
                best = Some((w, id));
            }
        }
        let Some((_, id)) = best else { break };
        let (u, v, _) = edges[id].take().expect("live edge");
        for (u2, _, _) in edges.iter_mut().flatten() {
            if *u2 == v {
                *u2 = u;
            }
        }
        alive[v] = false;
    }
    let mut local = vec![usize::MAX; n];
    let mut labels = Vec::new();
    for v in 0..n {
        if alive[v] {
            local[v] = labels.len();
            labels.push(g.labels()[v].clone());
        }
    }
    let out: Vec<Edge> = edges.into_iter().flatten().map(|(u, v, w)| Edge::new(local[u], local[v], w)).collect();
    let dag = Dag::new(labels.len(), out, labels).expect("contraction keeps a simple DAG");
    validate_network(dag).expect("contraction keeps the network conditions")
}
