//! Reduction rules for node scanwidth and the matching undo steps.
//!
//! * Chain suppression: a chain vertex (in- and out-degree 1) whose child is
//!   also a chain vertex is bypassed by an edge from its parent to its
//!   child. Undo puts it back directly above the child.
//! * Cut split: a weakly connected single-source DAG is cut into its
//!   biconnected blocks; the union of block extensions is an extension of
//!   the whole graph whose width is the largest block width.
//! * Component split: weakly connected components are solved apart and the
//!   extra roots are hung below the first one.
//!
//! [`solve_base_case`] handles edgeless graphs, directed trees and
//! biconnected graphs with a single reticulation.

use thiserror::Error;

use crate::extension::{star, topological_path, ExtensionError, TreeExtension};
use crate::model::{Dag, Edge, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("cut-vertex rule needs a weakly connected graph with exactly one source")]
    NotSingleSource,
    #[error("trace does not match the supplied extensions: {0}")]
    InconsistentTrace(String),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

/// One suppressed chain vertex, in ids of the graph before suppression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub vertex: VertexId,
    pub parent: VertexId,
    pub child: VertexId,
}

#[derive(Debug, Clone)]
pub struct ChainTrace {
    /// Reduced-graph id to input-graph id.
    pub origin: Vec<VertexId>,
    /// Steps in the order they were applied.
    pub steps: Vec<ChainStep>,
}

/// A piece of a split, with the map from piece ids to input ids.
#[derive(Debug, Clone)]
pub struct Piece {
    pub dag: Dag,
    pub origin: Vec<VertexId>,
}

#[derive(Debug, Clone)]
pub struct CutSplit {
    pub pieces: Vec<Piece>,
    /// Input id of the articulation vertex each piece hangs from, if any.
    pub shared: Vec<Option<VertexId>>,
}

#[derive(Debug, Clone)]
pub enum ReductionTrace {
    Chain(ChainTrace),
    Cut(CutSplit),
    Components(Vec<Piece>),
}

/// Suppresses every chain vertex whose child is a chain vertex.
pub fn suppress_chain_pairs(g: &Dag) -> (Dag, ChainTrace) {
    let n = g.num_vertices();
    let child_of = |v: VertexId| g.children(v).next().expect("chain vertex has a child");
    let parent_of = |v: VertexId| g.parents(v).next().expect("chain vertex has a parent");
    let suppressed: Vec<bool> = (0..n).map(|v| g.is_chain(v) && g.is_chain(child_of(v))).collect();
    let mut current_parent: Vec<VertexId> = (0..n).collect();
    let mut steps = Vec::new();
    for &v in g.topological_order() {
        if suppressed[v] {
            let p = parent_of(v);
            let u = if suppressed[p] { current_parent[p] } else { p };
            current_parent[v] = u;
            steps.push(ChainStep { vertex: v, parent: u, child: child_of(v) });
        }
    }
    let origin: Vec<VertexId> = (0..n).filter(|&v| !suppressed[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in origin.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for &v in &origin {
        for &e in g.out_edges(v) {
            let ed = g.edge(e);
            let mut head = ed.head;
            let mut w = ed.weight;
            while suppressed[head] {
                let e2 = g.out_edges(head)[0];
                w += g.edge(e2).weight;
                head = g.edge(e2).head;
            }
            edges.push(Edge::new(local[v], local[head], w));
        }
    }
    let labels = origin.iter().map(|&v| g.labels()[v].clone()).collect();
    let reduced = Dag::new(origin.len(), edges, labels).expect("suppression keeps a simple DAG");
    (reduced, ChainTrace { origin, steps })
}

impl ChainTrace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Lifts an extension of the reduced graph to the input graph `g`.
    pub fn lift(&self, g: &Dag, reduced: &TreeExtension) -> Result<TreeExtension, ReduceError> {
        let n = g.num_vertices();
        if reduced.num_vertices() != self.origin.len() {
            return Err(ReduceError::InconsistentTrace("reduced extension has the wrong size".into()));
        }
        let mut parent: Vec<Option<VertexId>> = vec![None; n];
        for (i, &v) in self.origin.iter().enumerate() {
            parent[v] = reduced.parent(i).map(|p| self.origin[p]);
        }
        for step in self.steps.iter().rev() {
            let (v, w) = (step.vertex, step.child);
            let pw = parent[w].ok_or_else(|| ReduceError::InconsistentTrace(format!("vertex {w} is a root")))?;
            // Move w directly above its only child x.
            for p in parent.iter_mut() {
                if *p == Some(w) {
                    *p = Some(pw);
                }
            }
            let x = g.children(w).next().expect("chain vertex has a child");
            parent[w] = parent[x];
            parent[x] = Some(w);
            // Then v directly above w.
            parent[v] = parent[w];
            parent[w] = Some(v);
        }
        Ok(TreeExtension::new(g, parent)?)
    }
}

/// Biconnected blocks of the underlying undirected graph, each sorted.
/// Isolated vertices form singleton blocks.
pub fn blocks(g: &Dag) -> Vec<Vec<VertexId>> {
    let n = g.num_vertices();
    let mut adj: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        adj[e.tail].push((e.head, i));
        adj[e.head].push((e.tail, i));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        if adj[s].is_empty() {
            disc[s] = time;
            time += 1;
            out.push(vec![s]);
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        // (vertex, edge used to enter, next adjacency index)
        let mut stack: Vec<(VertexId, usize, usize)> = vec![(s, usize::MAX, 0)];
        while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let (w, e) = adj[v][*i];
                *i += 1;
                if e == pe {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, e, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut members = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            let ed = g.edge(e);
                            members.push(ed.tail);
                            members.push(ed.head);
                            if e == pe {
                                break;
                            }
                        }
                        members.sort_unstable();
                        members.dedup();
                        out.push(members);
                    }
                }
            }
        }
    }
    out
}

/// Splits a weakly connected single-source DAG into its biconnected blocks.
/// A graph without cut vertices comes back as a single piece.
pub fn split_at_cut_vertices(g: &Dag) -> Result<CutSplit, ReduceError> {
    let sources = g.sources();
    if sources.len() != 1 || !g.is_weakly_connected() {
        return Err(ReduceError::NotSingleSource);
    }
    let mut pieces = Vec::new();
    let mut shared = Vec::new();
    for block in blocks(g) {
        let (dag, origin) = g.induced(&block);
        let src = dag.sources();
        let attach = (src.len() == 1 && origin[src[0]] != sources[0]).then(|| origin[src[0]]);
        pieces.push(Piece { dag, origin });
        shared.push(attach);
    }
    Ok(CutSplit { pieces, shared })
}

impl CutSplit {
    /// Union of the block extensions. Every vertex except the global source
    /// must be a non-root in exactly one block.
    pub fn lift(&self, g: &Dag, exts: &[TreeExtension]) -> Result<TreeExtension, ReduceError> {
        if exts.len() != self.pieces.len() {
            return Err(ReduceError::InconsistentTrace("wrong number of block extensions".into()));
        }
        let n = g.num_vertices();
        let mut parent: Vec<Option<VertexId>> = vec![None; n];
        for (piece, ext) in self.pieces.iter().zip(exts) {
            if ext.num_vertices() != piece.origin.len() {
                return Err(ReduceError::InconsistentTrace("block extension has the wrong size".into()));
            }
            for (i, &v) in piece.origin.iter().enumerate() {
                if let Some(p) = ext.parent(i) {
                    if parent[v].replace(piece.origin[p]).is_some() {
                        return Err(ReduceError::InconsistentTrace(format!("vertex {v} placed twice")));
                    }
                }
            }
        }
        Ok(TreeExtension::new(g, parent)?)
    }
}

/// Weakly connected components as induced pieces.
pub fn split_components(g: &Dag) -> Vec<Piece> {
    g.weak_components()
        .into_iter()
        .map(|c| {
            let (dag, origin) = g.induced(&c);
            Piece { dag, origin }
        })
        .collect()
}

/// Union of component extensions; later roots hang below the first root.
pub fn lift_components(g: &Dag, pieces: &[Piece], exts: &[TreeExtension]) -> Result<TreeExtension, ReduceError> {
    if exts.len() != pieces.len() || pieces.is_empty() {
        return Err(ReduceError::InconsistentTrace("wrong number of component extensions".into()));
    }
    let mut parent: Vec<Option<VertexId>> = vec![None; g.num_vertices()];
    let top = pieces[0].origin[exts[0].root()];
    for (k, (piece, ext)) in pieces.iter().zip(exts).enumerate() {
        for (i, &v) in piece.origin.iter().enumerate() {
            parent[v] = match ext.parent(i) {
                Some(p) => Some(piece.origin[p]),
                None if k == 0 => None,
                None => Some(top),
            };
        }
    }
    Ok(TreeExtension::new(g, parent)?)
}

/// Undoes one reduction given extensions of its pieces.
pub fn stitch(g: &Dag, trace: &ReductionTrace, partial: &[TreeExtension]) -> Result<TreeExtension, ReduceError> {
    match trace {
        ReductionTrace::Chain(t) => match partial {
            [one] => t.lift(g, one),
            _ => Err(ReduceError::InconsistentTrace("chain undo takes one extension".into())),
        },
        ReductionTrace::Cut(s) => s.lift(g, partial),
        ReductionTrace::Components(p) => lift_components(g, p, partial),
    }
}

pub fn is_directed_tree(g: &Dag) -> bool {
    let n = g.num_vertices();
    n > 0 && g.num_edges() == n - 1 && g.max_in_degree() <= 1 && g.is_weakly_connected()
}

/// Solves the easy cases directly; `None` when no base case applies.
pub fn solve_base_case(g: &Dag) -> Option<TreeExtension> {
    let n = g.num_vertices();
    if n == 0 {
        return None;
    }
    let parent = if g.num_edges() == 0 {
        star(n, 0)
    } else if is_directed_tree(g) {
        (0..n).map(|v| g.parents(v).next()).collect()
    } else {
        let retics = (0..n).filter(|&v| g.in_degree(v) >= 2).count();
        if retics != 1 || n < 3 || !g.is_weakly_connected() || blocks(g).len() != 1 {
            return None;
        }
        topological_path(g)
    };
    TreeExtension::new(g, parent).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_keeps_last_chain_vertex() {
        // a -> b -> c -> d -> leaf, plus a -> x so a is not a chain vertex
        let g = Dag::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 5)]).unwrap();
        let (r, t) = suppress_chain_pairs(&g);
        assert_eq!(r.num_vertices(), 4);
        let gone: Vec<_> = t.steps.iter().map(|s| s.vertex).collect();
        assert_eq!(gone, vec![1, 2]);
        assert!(t.origin.contains(&3));
        let ext = solve_base_case(&r).unwrap();
        let lifted = t.lift(&g, &ext).unwrap();
        assert_eq!(lifted.width(), ext.width());
    }

    #[test]
    fn chain_above_reticulation_is_kept() {
        // a -> b, a -> u, a -> e, b -> v, u -> v, v -> e, b -> x1, e -> x2
        let g = Dag::from_pairs(7, &[(0, 1), (0, 2), (0, 4), (1, 3), (2, 3), (3, 4), (1, 5), (4, 6)]).unwrap();
        let (r, t) = suppress_chain_pairs(&g);
        assert!(t.is_empty());
        assert_eq!(r.num_vertices(), 7);
    }

    #[test]
    fn two_triangles() {
        // 0 -> 1 -> 2, 0 -> 2 ; 2 -> 3 -> 4, 2 -> 4
        let g = Dag::from_pairs(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let s = split_at_cut_vertices(&g).unwrap();
        assert_eq!(s.pieces.len(), 2);
        assert!(s.shared.contains(&Some(2)));
        let exts: Vec<_> = s.pieces.iter().map(|p| solve_base_case(&p.dag).unwrap()).collect();
        let whole = s.lift(&g, &exts).unwrap();
        assert_eq!(whole.width(), 2);
    }

    #[test]
    fn tree_splits_into_edges() {
        let g = Dag::from_pairs(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let s = split_at_cut_vertices(&g).unwrap();
        assert_eq!(s.pieces.len(), 6);
        assert!(s.pieces.iter().all(|p| p.dag.num_vertices() == 2));
    }

    #[test]
    fn multi_source_is_rejected() {
        let g = Dag::from_pairs(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(split_at_cut_vertices(&g).unwrap_err(), ReduceError::NotSingleSource);
    }

    #[test]
    fn base_cases() {
        let g = Dag::from_pairs(5, &[]).unwrap();
        assert_eq!(solve_base_case(&g).unwrap().width(), 0);
        let g = Dag::from_pairs(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        assert_eq!(solve_base_case(&g).unwrap().width(), 1);
        let g = Dag::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(solve_base_case(&g).unwrap().width(), 2);
        // two reticulations: not a base case
        let g = Dag::from_pairs(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4)]).unwrap();
        assert!(solve_base_case(&g).is_none());
    }

    #[test]
    fn components() {
        let g = Dag::from_pairs(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let pieces = split_components(&g);
        assert_eq!(pieces.len(), 2);
        let exts: Vec<_> = pieces.iter().map(|p| solve_base_case(&p.dag).unwrap()).collect();
        let ext = stitch(&g, &ReductionTrace::Components(pieces), &exts).unwrap();
        assert_eq!(ext.width(), 1);
    }
}
