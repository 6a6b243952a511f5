//! Optimal node-scanwidth tree-extensions.
//!
//! For a weakly connected set W that is closed under taking children, let
//! f(W) be the smallest width of an extension of G[W] placed below the rest
//! of the graph. Then
//!
//! ```text
//! f(W) = min over sources v of G[W] of
//!        max(|parents(W) \ W|, max over components C of W - v of f(C))
//! ```
//!
//! and the node scanwidth of G is the largest f over its weak components.
//! The solver decides `f(W) <= k` for increasing k starting at the largest
//! in-degree, memoizing known bounds per set, and stops at the width of a
//! greedy extension.

use std::collections::HashMap;

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::extension::TreeExtension;
use crate::model::{Dag, VertexId};
use crate::reduce::{self, ReductionTrace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("node scanwidth exceeds the upper bound {0}")]
    Exceeded(usize),
    #[error("subset table grew past {0} entries")]
    TableLimit(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub upper_bound: Option<usize>,
    pub max_entries: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { upper_bound: None, max_entries: 20_000_000 }
    }
}

#[derive(Clone, Copy, Default)]
struct Entry {
    /// Best width found so far and the root achieving it.
    feasible: Option<(usize, VertexId)>,
    /// f(W) >= lower.
    lower: usize,
}

struct Solver<'g> {
    g: &'g Dag,
    n: usize,
    memo: HashMap<VertexSet, Entry>,
    max_entries: usize,
}

impl<'g> Solver<'g> {
    fn bag_size(&self, w: &VertexSet) -> usize {
        let mut outside = VertexSet::new(self.n);
        for x in w.iter() {
            for p in self.g.parents(x) {
                if !w.contains(p) {
                    outside.insert(p);
                }
            }
        }
        outside.len()
    }

    /// Weak components of G[w], ordered by smallest member.
    fn components(&self, w: &VertexSet) -> Vec<VertexSet> {
        let mut left = w.clone();
        let mut out = Vec::new();
        while let Some(s) = left.first() {
            let mut comp = VertexSet::new(self.n);
            comp.insert(s);
            left.remove(s);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for y in self.g.children(x).chain(self.g.parents(x)) {
                    if left.remove(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    fn sources(&self, w: &VertexSet) -> Vec<VertexId> {
        w.iter().filter(|&v| self.g.parents(v).all(|p| !w.contains(p))).collect()
    }

    /// Decides f(w) <= k.
    fn decide(&mut self, w: &VertexSet, k: usize) -> Result<bool, ExactError> {
        let e = self.memo.get(w).copied().unwrap_or_default();
        if let Some((best, _)) = e.feasible {
            if best <= k {
                return Ok(true);
            }
        }
        if k < e.lower {
            return Ok(false);
        }
        let bag = self.bag_size(w);
        let mut found = None;
        if bag <= k {
            for v in self.sources(w) {
                let mut rest = w.clone();
                rest.remove(v);
                let comps = self.components(&rest);
                if comps.iter().any(|c| self.bag_size(c) > k) {
                    continue;
                }
                let mut ok = true;
                let mut width = bag;
                for c in &comps {
                    if !self.decide(c, k)? {
                        ok = false;
                        break;
                    }
                    width = width.max(self.memo[c].feasible.expect("decided feasible").0);
                }
                if ok {
                    found = Some((width, v));
                    break;
                }
            }
        }
        if self.memo.len() >= self.max_entries && !self.memo.contains_key(w) {
            return Err(ExactError::TableLimit(self.max_entries));
        }
        let entry = self.memo.entry(w.clone()).or_default();
        match found {
            Some(f) => {
                if entry.feasible.is_none_or(|(b, _)| f.0 < b) {
                    entry.feasible = Some(f);
                }
                entry.lower = entry.lower.max(bag);
                Ok(true)
            }
            None => {
                entry.lower = entry.lower.max(k + 1);
                Ok(false)
            }
        }
    }

    fn build(&self, w: &VertexSet, above: Option<VertexId>, parent: &mut [Option<VertexId>]) {
        let (_, v) = self.memo[w].feasible.expect("set solved");
        parent[v] = above;
        let mut rest = w.clone();
        rest.remove(v);
        for c in self.components(&rest) {
            self.build(&c, Some(v), parent);
        }
    }
}

/// Exact optimum without any reduction rule.
pub fn optimal_extension_exact(g: &Dag, opts: ExactOptions) -> Result<(TreeExtension, usize), ExactError> {
    let n = g.num_vertices();
    let (heur, hw) = heuristic_extension(g);
    let lb = g.max_in_degree();
    if let Some(ub) = opts.upper_bound {
        if lb > ub {
            return Err(ExactError::Exceeded(ub));
        }
    }
    if hw <= lb {
        return Ok((heur, hw));
    }
    let mut solver = Solver { g, n, memo: HashMap::new(), max_entries: opts.max_entries };
    let comps: Vec<VertexSet> = g.weak_components().into_iter().map(|c| VertexSet::from_iter_in(n, c)).collect();
    let limit = opts.upper_bound.map_or(hw - 1, |ub| ub.min(hw - 1));
    let mut k = lb;
    while k <= limit {
        let mut all = true;
        for c in &comps {
            if !solver.decide(c, k)? {
                all = false;
                break;
            }
        }
        if all {
            let mut parent = vec![None; n];
            let mut top = None;
            for c in &comps {
                solver.build(c, top, &mut parent);
                if top.is_none() {
                    top = parent.iter().position(Option::is_none);
                }
            }
            let ext = TreeExtension::new(g, parent).expect("reconstructed extension is valid");
            let w = ext.width();
            return Ok((ext, w));
        }
        k += 1;
    }
    match opts.upper_bound {
        Some(ub) if hw > ub => Err(ExactError::Exceeded(ub)),
        _ => Ok((heur, hw)),
    }
}

/// Greedy bottom-up extension. Repeatedly takes a vertex whose children are
/// all placed, preferring the one whose new subtree has the smallest bag,
/// and hangs the subtrees holding its children below it.
pub fn heuristic_extension(g: &Dag) -> (TreeExtension, usize) {
    let n = g.num_vertices();
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    let mut placed = vec![false; n];
    let mut pending_children: Vec<usize> = (0..n).map(|v| g.out_degree(v)).collect();
    // Root of the current subtree containing each placed vertex.
    let mut top: Vec<VertexId> = (0..n).collect();
    let mut bags: Vec<Option<VertexSet>> = vec![None; n];
    let find = |top: &mut Vec<VertexId>, mut v: VertexId| {
        while top[v] != v {
            let t = top[top[v]];
            top[v] = t;
            v = t;
        }
        v
    };
    let mut ready: Vec<VertexId> = (0..n).filter(|&v| pending_children[v] == 0).collect();
    for _ in 0..n {
        let mut best: Option<(usize, VertexId, VertexSet, Vec<VertexId>)> = None;
        for &v in &ready {
            let mut roots: Vec<VertexId> = g.children(v).map(|c| find(&mut top, c)).collect();
            roots.sort_unstable();
            roots.dedup();
            let mut bag = VertexSet::from_iter_in(n, g.parents(v));
            for &r in &roots {
                bag.union_with(bags[r].as_ref().expect("placed subtree"));
            }
            bag.remove(v);
            let size = bag.len();
            if best.as_ref().is_none_or(|b| (size, v) < (b.0, b.1)) {
                best = Some((size, v, bag, roots));
            }
        }
        let (_, v, bag, roots) = best.expect("acyclic graph always has a ready vertex");
        ready.retain(|&x| x != v);
        placed[v] = true;
        for r in roots {
            parent[r] = Some(v);
            top[r] = v;
        }
        bags[v] = Some(bag);
        for p in g.parents(v) {
            pending_children[p] -= 1;
            if pending_children[p] == 0 {
                ready.push(p);
            }
        }
    }
    debug_assert!(placed.iter().all(|&p| p));
    let roots: Vec<VertexId> = (0..n).filter(|&v| parent[v].is_none()).collect();
    if let Some((&first, rest)) = roots.split_first() {
        for &r in rest {
            parent[r] = Some(first);
        }
    }
    let ext = TreeExtension::new(g, parent).expect("greedy extension is valid");
    let w = ext.width();
    (ext, w)
}

/// Reduce, solve every piece exactly, stitch back.
pub fn nsw_pipeline(g: &Dag) -> Result<(TreeExtension, usize), ExactError> {
    nsw_pipeline_with(g, ExactOptions::default())
}

pub fn nsw_pipeline_with(g: &Dag, opts: ExactOptions) -> Result<(TreeExtension, usize), ExactError> {
    let ext = solve_reduced(g, opts)?;
    let w = ext.width();
    if let Some(ub) = opts.upper_bound {
        if w > ub {
            return Err(ExactError::Exceeded(ub));
        }
    }
    Ok((ext, w))
}

fn solve_reduced(g: &Dag, opts: ExactOptions) -> Result<TreeExtension, ExactError> {
    if g.num_vertices() == 0 {
        return Ok(TreeExtension::new(g, Vec::new()).expect("empty graph"));
    }
    if !g.is_weakly_connected() {
        let pieces = reduce::split_components(g);
        let exts = pieces.iter().map(|p| solve_reduced(&p.dag, opts)).collect::<Result<Vec<_>, _>>()?;
        return Ok(reduce::stitch(g, &ReductionTrace::Components(pieces), &exts).expect("component stitch"));
    }
    let (reduced, chain) = reduce::suppress_chain_pairs(g);
    if !chain.is_empty() {
        let inner = solve_reduced(&reduced, opts)?;
        return Ok(chain.lift(g, &inner).expect("chain undo"));
    }
    if g.sources().len() == 1 {
        let split = reduce::split_at_cut_vertices(g).expect("single-source connected graph");
        if split.pieces.len() > 1 {
            let exts = split.pieces.iter().map(|p| solve_reduced(&p.dag, opts)).collect::<Result<Vec<_>, _>>()?;
            return Ok(split.lift(g, &exts).expect("cut stitch"));
        }
    }
    if let Some(ext) = reduce::solve_base_case(g) {
        return Ok(ext);
    }
    let piece_opts = ExactOptions { upper_bound: None, ..opts };
    Ok(optimal_extension_exact(g, piece_opts)?.0)
}
