//! Tree-extensions of a DAG and their node-scanwidth bags.
//!
//! A tree-extension Γ is a rooted tree on the vertices of G such that the
//! tail of every edge of G is a Γ-ancestor of its head. The bag of `v` is
//! the set of G-parents of the Γ-subtree below `v` that lie outside it.

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::model::{Dag, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("parent map has {got} entries, graph has {expected} vertices")]
    WrongSize { expected: usize, got: usize },
    #[error("parent map has no root")]
    NoRoot,
    #[error("parent map has several roots: {0:?}")]
    MultipleRoots(Vec<VertexId>),
    #[error("parent map is not a tree (cycle or bad id at vertex {0})")]
    NotATree(VertexId),
    #[error("edge {0}->{1} is not ancestor-respecting")]
    AncestorViolation(VertexId, VertexId),
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

#[derive(Debug, Clone)]
pub struct TreeExtension {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    root: VertexId,
    preorder: Vec<VertexId>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    bags: Vec<VertexSet>,
    width: usize,
}

impl TreeExtension {
    /// Validates `parent` as a tree-extension of `g` and caches the bags.
    pub fn new(g: &Dag, parent: Vec<Option<VertexId>>) -> Result<Self, ExtensionError> {
        let n = g.num_vertices();
        if parent.len() != n {
            return Err(ExtensionError::WrongSize { expected: n, got: parent.len() });
        }
        if n == 0 {
            return Ok(TreeExtension {
                parent,
                children: Vec::new(),
                root: 0,
                preorder: Vec::new(),
                tin: Vec::new(),
                tout: Vec::new(),
                bags: Vec::new(),
                width: 0,
            });
        }
        let roots: Vec<_> = (0..n).filter(|&v| parent[v].is_none()).collect();
        let root = match roots.len() {
            0 => return Err(ExtensionError::NoRoot),
            1 => roots[0],
            _ => return Err(ExtensionError::MultipleRoots(roots)),
        };
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n || p == v {
                    return Err(ExtensionError::NotATree(v));
                }
                children[p].push(v);
            }
        }
        let mut tin = vec![usize::MAX; n];
        let mut tout = vec![0; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![(root, 0usize)];
        tin[root] = 0;
        preorder.push(root);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < children[v].len() {
                let c = children[v][*i];
                *i += 1;
                tin[c] = preorder.len();
                preorder.push(c);
                stack.push((c, 0));
            } else {
                tout[v] = preorder.len();
                stack.pop();
            }
        }
        if preorder.len() != n {
            let v = (0..n).find(|&v| tin[v] == usize::MAX).unwrap_or(0);
            return Err(ExtensionError::NotATree(v));
        }
        for e in g.edges() {
            let (u, v) = (e.tail, e.head);
            if !(tin[u] < tin[v] && tout[v] <= tout[u]) {
                return Err(ExtensionError::AncestorViolation(u, v));
            }
        }
        let mut bags = vec![VertexSet::new(n); n];
        for &v in preorder.iter().rev() {
            let mut b = VertexSet::from_iter_in(n, g.parents(v));
            for &c in &children[v] {
                b.union_with(&bags[c]);
            }
            b.remove(v);
            bags[v] = b;
        }
        let width = bags.iter().map(VertexSet::len).max().unwrap_or(0);
        Ok(TreeExtension { parent, children, root, preorder, tin, tout, bags, width })
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn parent_map(&self) -> &[Option<VertexId>] {
        &self.parent
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    /// Γ-preorder; parents come before children.
    pub fn preorder(&self) -> &[VertexId] {
        &self.preorder
    }

    /// Γ-postorder; children come before parents.
    pub fn postorder(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.preorder.iter().rev().copied()
    }

    /// True if `u` is an ancestor of `v` in Γ (a vertex is its own ancestor).
    pub fn is_ancestor(&self, u: VertexId, v: VertexId) -> bool {
        self.tin[u] <= self.tin[v] && self.tout[v] <= self.tout[u]
    }

    pub fn bag(&self, v: VertexId) -> &VertexSet {
        &self.bags[v]
    }

    /// Node scanwidth of this extension.
    pub fn width(&self) -> usize {
        self.width
    }

    /// `child<TAB>parent` lines sorted by child, `-` for the root.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, p) in self.parent.iter().enumerate() {
            match p {
                Some(p) => out.push_str(&format!("{v}\t{p}\n")),
                None => out.push_str(&format!("{v}\t-\n")),
            }
        }
        out
    }

    /// Parses the text form and validates it against `g`.
    pub fn from_text(g: &Dag, text: &str) -> Result<Self, ExtensionError> {
        let n = g.num_vertices();
        let mut parent: Vec<Option<Option<VertexId>>> = vec![None; n];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| ExtensionError::Parse(i + 1, m.to_string());
            let mut it = line.split_whitespace();
            let (Some(c), Some(p), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad("expected `child parent`"));
            };
            let c: usize = c.parse().map_err(|_| bad("bad child id"))?;
            let p = match p {
                "-" => None,
                s => Some(s.parse::<usize>().map_err(|_| bad("bad parent id"))?),
            };
            if c >= n {
                return Err(bad("child id out of range"));
            }
            if parent[c].replace(p).is_some() {
                return Err(bad("child listed twice"));
            }
        }
        let parent: Option<Vec<_>> = parent.into_iter().collect();
        let parent = parent.ok_or(ExtensionError::Parse(0, "not every vertex has a line".into()))?;
        TreeExtension::new(g, parent)
    }
}

pub fn is_tree_extension(g: &Dag, parent: &[Option<VertexId>]) -> bool {
    TreeExtension::new(g, parent.to_vec()).is_ok()
}

pub fn bag(ext: &TreeExtension, v: VertexId) -> &VertexSet {
    ext.bag(v)
}

pub fn nsw_of(ext: &TreeExtension) -> usize {
    ext.width()
}

/// Star rooted at `root`: every other vertex hangs directly below it.
pub fn star(n: usize, root: VertexId) -> Vec<Option<VertexId>> {
    (0..n).map(|v| if v == root { None } else { Some(root) }).collect()
}

/// Path following the topological order of `g`.
pub fn topological_path(g: &Dag) -> Vec<Option<VertexId>> {
    let order = g.topological_order();
    let mut parent = vec![None; g.num_vertices()];
    for w in order.windows(2) {
        parent[w[1]] = Some(w[0]);
    }
    parent
}
