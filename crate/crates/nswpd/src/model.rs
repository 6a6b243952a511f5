//! Weighted DAGs and rooted phylogenetic networks.
//!
//! A [`Dag`] is any acyclic digraph with dense vertex ids `0..n`. A
//! [`Network`] wraps a `Dag` that has a single root, labeled leaves and
//! tree/reticulation internal vertices.

use std::collections::{BTreeSet, HashMap};

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::bitset::VertexSet;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type TaxonId = usize;
/// Exact non-negative edge weight.
pub type Weight = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("edge {0} refers to a vertex outside 0..{1}")]
    BadVertex(EdgeId, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("parallel edges {0}->{1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("input contains a directed cycle")]
    CyclicInput,
    #[error("graph has several roots: {0:?}")]
    MultipleRoots(Vec<VertexId>),
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is not weakly connected")]
    Disconnected,
    #[error("leaf {0} has no label")]
    UnlabeledLeaf(VertexId),
    #[error("label {0:?} is used by more than one leaf")]
    DuplicateLabel(String),
    #[error("vertex {0} has an illegal in/out degree")]
    BadDegree(VertexId),
    #[error("edge {0} has a negative weight")]
    NegativeWeight(EdgeId),
    #[error("vertex {0} is a reticulation with in-degree {1}, strict mode requires 2")]
    NotStrict(VertexId, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: Weight,
}

impl Edge {
    pub fn new(tail: VertexId, head: VertexId, weight: Weight) -> Self {
        Edge { tail, head, weight }
    }
}

/// Immutable acyclic digraph. Adjacency lists keep input edge order.
#[derive(Debug, Clone)]
pub struct Dag {
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    labels: Vec<Option<String>>,
    topo: Vec<VertexId>,
}

impl Dag {
    pub fn new(n: usize, edges: Vec<Edge>, labels: Vec<Option<String>>) -> Result<Dag, ModelError> {
        let mut labels = labels;
        labels.resize(n, None);
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(ModelError::BadVertex(i, n));
            }
            if e.tail == e.head {
                return Err(ModelError::SelfLoop(e.tail));
            }
            if !seen.insert((e.tail, e.head)) {
                return Err(ModelError::ParallelEdge(e.tail, e.head));
            }
            out_edges[e.tail].push(i);
            in_edges[e.head].push(i);
        }
        // Kahn's algorithm; ties broken by smallest id for determinism.
        let mut indeg: Vec<usize> = in_edges.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &e in &out_edges[v] {
                let h = edges[e].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        if topo.len() != n {
            return Err(ModelError::CyclicInput);
        }
        Ok(Dag { edges, out_edges, in_edges, labels, topo })
    }

    /// Unweighted DAG from `(tail, head)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(VertexId, VertexId)]) -> Result<Dag, ModelError> {
        let edges = pairs.iter().map(|&(u, v)| Edge::new(u, v, Weight::zero())).collect();
        Dag::new(n, edges, vec![None; n])
    }

    pub fn num_vertices(&self) -> usize {
        self.topo.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_edges[v].iter().map(move |&e| self.edges[e].head)
    }

    pub fn parents(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.in_edges[v].iter().map(move |&e| self.edges[e].tail)
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_edges[v].len()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges[v].len()
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.out_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Topological order, parents before children.
    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    pub fn sources(&self) -> Vec<VertexId> {
        (0..self.num_vertices()).filter(|&v| self.in_degree(v) == 0).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        (0..self.num_vertices()).filter(|&v| self.out_degree(v) == 0).collect()
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// A chain vertex has in-degree 1 and out-degree 1.
    pub fn is_chain(&self, v: VertexId) -> bool {
        self.in_degree(v) == 1 && self.out_degree(v) == 1
    }

    /// Weakly connected components, each sorted, ordered by smallest member.
    pub fn weak_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.num_vertices();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for u in self.children(v).chain(self.parents(v)) {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weak_components().len() <= 1
    }

    /// All vertices reachable from `v`, including `v`.
    pub fn descendants(&self, v: VertexId) -> VertexSet {
        let mut seen = VertexSet::new(self.num_vertices());
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(u) = stack.pop() {
            for w in self.children(u) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// All vertices that reach some member of `targets`, including the targets.
    pub fn ancestors_of_set(&self, targets: &[VertexId]) -> VertexSet {
        let mut seen = VertexSet::new(self.num_vertices());
        let mut stack = Vec::new();
        for &t in targets {
            if seen.insert(t) {
                stack.push(t);
            }
        }
        while let Some(u) = stack.pop() {
            for w in self.parents(u) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Induced subgraph on `vertices` (in the given order). Returns the
    /// subgraph and the map from new ids to old ids.
    pub fn induced(&self, vertices: &[VertexId]) -> (Dag, Vec<VertexId>) {
        let mut local = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        for &v in vertices {
            for &e in &self.out_edges[v] {
                let ed = &self.edges[e];
                if let Some(&h) = local.get(&ed.head) {
                    edges.push(Edge::new(local[&v], h, ed.weight));
                }
            }
        }
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        let g = Dag::new(vertices.len(), edges, labels).expect("induced subgraph of a DAG is a DAG");
        (g, vertices.to_vec())
    }

    /// Copy without edge `e`.
    pub fn without_edge(&self, e: EdgeId) -> Dag {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != e)
            .map(|(_, ed)| ed.clone())
            .collect();
        Dag::new(self.num_vertices(), edges, self.labels.clone()).expect("edge removal keeps a DAG")
    }
}

/// A validated rooted phylogenetic network.
#[derive(Debug, Clone)]
pub struct Network {
    dag: Dag,
    root: VertexId,
    taxa: Vec<String>,
    leaf_of_taxon: Vec<VertexId>,
    taxon_of_vertex: Vec<Option<TaxonId>>,
    strict: bool,
}

/// Checks the network conditions on `dag`. Taxa are numbered by leaf
/// vertex id order.
pub fn validate_network(dag: Dag) -> Result<Network, ModelError> {
    let n = dag.num_vertices();
    if n == 0 {
        return Err(ModelError::Empty);
    }
    for (i, e) in dag.edges().iter().enumerate() {
        if e.weight < Weight::zero() {
            return Err(ModelError::NegativeWeight(i));
        }
    }
    let sources = dag.sources();
    if sources.len() > 1 {
        return Err(ModelError::MultipleRoots(sources));
    }
    let root = sources[0];
    if !dag.is_weakly_connected() {
        return Err(ModelError::Disconnected);
    }
    if dag.out_degree(root) < 2 {
        return Err(ModelError::BadDegree(root));
    }
    let mut strict = true;
    let mut taxa = Vec::new();
    let mut leaf_of_taxon = Vec::new();
    let mut taxon_of_vertex = vec![None; n];
    let mut used = HashMap::new();
    for v in 0..n {
        if v == root {
            continue;
        }
        let (din, dout) = (dag.in_degree(v), dag.out_degree(v));
        if dout == 0 {
            if din != 1 {
                return Err(ModelError::BadDegree(v));
            }
            let label = dag.label(v).ok_or(ModelError::UnlabeledLeaf(v))?;
            if used.insert(label.to_string(), v).is_some() {
                return Err(ModelError::DuplicateLabel(label.to_string()));
            }
            taxon_of_vertex[v] = Some(taxa.len());
            taxa.push(label.to_string());
            leaf_of_taxon.push(v);
        } else if din == 1 {
            if dout < 2 {
                return Err(ModelError::BadDegree(v));
            }
        } else if dout != 1 {
            return Err(ModelError::BadDegree(v));
        } else if din != 2 {
            strict = false;
        }
    }
    Ok(Network { dag, root, taxa, leaf_of_taxon, taxon_of_vertex, strict })
}

impl Network {
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// True when every reticulation has in-degree exactly 2.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn require_strict(&self) -> Result<(), ModelError> {
        for v in 0..self.dag.num_vertices() {
            let d = self.dag.in_degree(v);
            if d > 2 {
                return Err(ModelError::NotStrict(v, d));
            }
        }
        Ok(())
    }

    pub fn num_taxa(&self) -> usize {
        self.taxa.len()
    }

    pub fn taxa(&self) -> &[String] {
        &self.taxa
    }

    pub fn taxon_name(&self, t: TaxonId) -> &str {
        &self.taxa[t]
    }

    pub fn taxon_id(&self, name: &str) -> Option<TaxonId> {
        self.taxa.iter().position(|t| t == name)
    }

    pub fn leaf_of(&self, t: TaxonId) -> VertexId {
        self.leaf_of_taxon[t]
    }

    pub fn taxon_of(&self, v: VertexId) -> Option<TaxonId> {
        self.taxon_of_vertex[v]
    }

    pub fn reticulations(&self) -> Vec<VertexId> {
        (0..self.dag.num_vertices()).filter(|&v| self.dag.in_degree(v) >= 2).collect()
    }

    pub fn is_tree(&self) -> bool {
        self.reticulations().is_empty()
    }

    pub fn all_taxa(&self) -> TaxonSet {
        TaxonSet::from_ids(0..self.num_taxa())
    }

    pub fn taxon_set<S: AsRef<str>>(&self, names: &[S]) -> Result<TaxonSet, String> {
        let mut ids = Vec::new();
        for n in names {
            ids.push(self.taxon_id(n.as_ref()).ok_or_else(|| n.as_ref().to_string())?);
        }
        Ok(TaxonSet::from_ids(ids))
    }

    pub fn taxon_names(&self, a: &TaxonSet) -> Vec<String> {
        a.iter().map(|t| self.taxa[t].clone()).collect()
    }

    /// Level: the largest, over biconnected blocks, of the number of
    /// reticulation edges minus reticulation vertices inside the block.
    pub fn level(&self) -> usize {
        let g = &self.dag;
        let mut best = 0;
        for block in crate::reduce::blocks(g) {
            let members = VertexSet::from_iter_in(g.num_vertices(), block.iter().copied());
            let mut lvl = 0;
            for &v in &block {
                let inside = g.parents(v).filter(|&p| members.contains(p)).count();
                if g.in_degree(v) >= 2 && inside >= 2 {
                    lvl += inside - 1;
                }
            }
            best = best.max(lvl);
        }
        best
    }
}

/// A subset of taxa, by taxon id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct TaxonSet(BTreeSet<TaxonId>);

impl TaxonSet {
    pub fn new() -> Self {
        TaxonSet(BTreeSet::new())
    }

    pub fn from_ids(ids: impl IntoIterator<Item = TaxonId>) -> Self {
        TaxonSet(ids.into_iter().collect())
    }

    /// Taxa whose bit is set in `mask`.
    pub fn from_mask(mask: u64, n_taxa: usize) -> Self {
        TaxonSet((0..n_taxa).filter(|&t| mask >> t & 1 == 1).collect())
    }

    pub fn insert(&mut self, t: TaxonId) {
        self.0.insert(t);
    }

    pub fn contains(&self, t: TaxonId) -> bool {
        self.0.contains(&t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = TaxonId> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &TaxonSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// Integer conservation cost per taxon, indexed by taxon id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable(pub Vec<u64>);

impl CostTable {
    pub fn unit(net: &Network) -> Self {
        CostTable(vec![1; net.num_taxa()])
    }

    pub fn cost(&self, t: TaxonId) -> u64 {
        self.0[t]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn cost_of(&self, a: &TaxonSet) -> u64 {
        a.iter().map(|t| self.0[t]).sum()
    }
}

/// Edges whose head is an ancestor of (or equal to) a leaf in `a`.
pub fn offspring_edges(net: &Network, a: &TaxonSet) -> Vec<EdgeId> {
    let leaves: Vec<VertexId> = a.iter().map(|t| net.leaf_of(t)).collect();
    let anc = net.dag().ancestors_of_set(&leaves);
    (0..net.dag().num_edges()).filter(|&e| anc.contains(net.dag().edge(e).head)).collect()
}

/// All-paths diversity of `a`: total weight of the offspring edges.
pub fn pd_map_value(net: &Network, a: &TaxonSet) -> Weight {
    offspring_edges(net, a).into_iter().map(|e| net.dag().edge(e).weight).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: i64) -> Weight {
        Weight::from_integer(x)
    }

    fn labeled(n: usize, pairs: &[(usize, usize, i64)], labels: &[(usize, &str)]) -> Dag {
        let mut l = vec![None; n];
        for &(v, s) in labels {
            l[v] = Some(s.to_string());
        }
        let edges = pairs.iter().map(|&(a, b, c)| Edge::new(a, b, w(c))).collect();
        Dag::new(n, edges, l).unwrap()
    }

    #[test]
    fn rejects_cycle_and_loops() {
        assert_eq!(Dag::from_pairs(2, &[(0, 1), (1, 0)]).unwrap_err(), ModelError::CyclicInput);
        assert_eq!(Dag::from_pairs(1, &[(0, 0)]).unwrap_err(), ModelError::SelfLoop(0));
        assert_eq!(Dag::from_pairs(2, &[(0, 1), (0, 1)]).unwrap_err(), ModelError::ParallelEdge(0, 1));
    }

    #[test]
    fn root_needs_two_children() {
        let g = labeled(2, &[(0, 1, 1)], &[(1, "a")]);
        assert_eq!(validate_network(g).unwrap_err(), ModelError::BadDegree(0));
    }

    #[test]
    fn two_sources() {
        let g = labeled(3, &[(0, 2, 1), (1, 2, 1)], &[(2, "a")]);
        assert!(matches!(validate_network(g), Err(ModelError::MultipleRoots(_))));
    }

    #[test]
    fn unlabeled_and_duplicate_leaves() {
        let g = labeled(3, &[(0, 1, 1), (0, 2, 1)], &[(1, "a")]);
        assert_eq!(validate_network(g).unwrap_err(), ModelError::UnlabeledLeaf(2));
        let g = labeled(3, &[(0, 1, 1), (0, 2, 1)], &[(1, "a"), (2, "a")]);
        assert_eq!(validate_network(g).unwrap_err(), ModelError::DuplicateLabel("a".into()));
    }

    #[test]
    fn negative_weight() {
        let g = labeled(3, &[(0, 1, -1), (0, 2, 1)], &[(1, "a"), (2, "b")]);
        assert_eq!(validate_network(g).unwrap_err(), ModelError::NegativeWeight(0));
    }

    #[test]
    fn strictness_flag() {
        // root -> p1,p2,p3 ; each p -> r and a leaf ; r -> x
        let pairs = [
            (0, 1, 1), (0, 2, 1), (0, 3, 1),
            (1, 4, 1), (2, 4, 1), (3, 4, 1),
            (4, 5, 1), (1, 6, 1), (2, 7, 1), (3, 8, 1),
        ];
        let g = labeled(9, &pairs, &[(5, "x"), (6, "a"), (7, "b"), (8, "c")]);
        let net = validate_network(g).unwrap();
        assert!(!net.is_strict());
        assert!(net.require_strict().is_err());
        assert_eq!(net.level(), 2);
    }

    #[test]
    fn offspring_basics() {
        let g = labeled(5, &[(0, 1, 2), (0, 2, 3), (1, 3, 4), (1, 4, 5)], &[(2, "c"), (3, "a"), (4, "b")]);
        let net = validate_network(g).unwrap();
        assert!(offspring_edges(&net, &TaxonSet::new()).is_empty());
        assert_eq!(offspring_edges(&net, &net.all_taxa()).len(), 4);
        let a = net.taxon_set(&["a"]).unwrap();
        assert_eq!(pd_map_value(&net, &a), w(6));
        assert_eq!(pd_map_value(&net, &net.all_taxa()), net.dag().total_weight());
    }
}
