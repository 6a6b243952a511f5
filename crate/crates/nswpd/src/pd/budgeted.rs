//! Budgeted all-paths and max-switching-tree diversity.
//!
//! For a Γ-vertex v, a bag subset Y and a budget b, the primal table holds
//! the largest weight of a vertex set (all-paths) or edge set (max-tree)
//! below v that
//!
//! * gives every member of Y a child (resp. an outgoing edge) in the set,
//! * gives every selected non-leaf vertex below v a child in the set,
//! * costs at most b in taxa.
//!
//! The complement table replaces the last condition by "leaves out taxa of
//! cost at least b". Since `cost(A) <= B` iff `cost(X \ A) >= total - B`,
//! either table answers the problem; the one with the smaller budget range
//! is used unless a route is forced.

use num_traits::Zero;

use super::table::{fold_child, Budget, Objective, SubsetTable, NEG_INF};
use super::{check_extension, lower_mask, scaled_weights, BagLayout, PdError};
use crate::extension::TreeExtension;
use crate::model::{CostTable, EdgeId, Network, TaxonSet, VertexId, Weight};

/// Which budget table to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Primal when `B <= total - B`, complement otherwise.
    Auto,
    /// Budget `B`, "at most" semantics.
    Primal,
    /// Budget `total - B`, "at least" semantics.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetedSolution {
    pub value: Weight,
    pub taxa: TaxonSet,
    pub cost: u64,
    /// Budget after clamping to the total taxon cost.
    pub budget: u64,
    /// Route actually taken (never `Auto`).
    pub route: Route,
    /// Edges of the witness forest (max-tree only).
    pub witness: Option<Vec<EdgeId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Problem {
    Map,
    MaxTree,
}

/// Most all-paths diversity within `budget`.
pub fn solve_b_map_pd(net: &Network, costs: &CostTable, budget: u64, ext: &TreeExtension) -> Result<BudgetedSolution, PdError> {
    solve(net, costs, budget, ext, Route::Auto, Problem::Map)
}

pub fn solve_b_map_pd_with(
    net: &Network,
    costs: &CostTable,
    budget: u64,
    ext: &TreeExtension,
    route: Route,
) -> Result<BudgetedSolution, PdError> {
    solve(net, costs, budget, ext, route, Problem::Map)
}

/// Most best-switching-tree diversity within `budget`.
pub fn solve_b_maxtree_pd(net: &Network, costs: &CostTable, budget: u64, ext: &TreeExtension) -> Result<BudgetedSolution, PdError> {
    solve(net, costs, budget, ext, Route::Auto, Problem::MaxTree)
}

pub fn solve_b_maxtree_pd_with(
    net: &Network,
    costs: &CostTable,
    budget: u64,
    ext: &TreeExtension,
    route: Route,
) -> Result<BudgetedSolution, PdError> {
    solve(net, costs, budget, ext, route, Problem::MaxTree)
}

struct Ctx<'a> {
    net: &'a Network,
    ext: &'a TreeExtension,
    layout: BagLayout,
    weights: Vec<i64>,
    cost: Vec<usize>,
    k: usize,
    sem: Budget,
    problem: Problem,
    /// Final table of every vertex, over its bag.
    tables: Vec<Option<SubsetTable>>,
    /// Largest useful budget index below each vertex.
    caps: Vec<usize>,
}

/// Result of choosing at one vertex.
enum Choice {
    Skip,
    /// Select the vertex; for max-tree, through this in-edge.
    Take(Option<EdgeId>),
}

impl<'a> Ctx<'a> {
    fn folds(&self, v: VertexId) -> Vec<SubsetTable> {
        let bits = self.layout.bits(v) + 1;
        let mut folds = vec![SubsetTable::unit(bits, Objective::Max)];
        for &c in self.ext.children(v) {
            let pos = self.layout.child_positions(v, c);
            let child = self.tables[c].as_ref().expect("children are solved first");
            let next = fold_child(folds.last().expect("nonempty"), child, &pos, self.k, self.sem);
            folds.push(next);
        }
        folds
    }

    fn parent_mask(&self, v: VertexId) -> usize {
        let g = self.net.dag();
        g.parents(v).fold(0, |m, p| m | 1 << self.layout.pos(v, p).expect("parents lie in the bag"))
    }

    /// Options at v for bag subset `y` and budget `b`: (choice, value,
    /// mask over bag(v) ∪ {v}, budget) for the combined children.
    fn options(&self, v: VertexId, y: usize, b: usize) -> Vec<(Choice, usize, usize)> {
        let g = self.net.dag();
        let vbit = 1usize << self.layout.bits(v);
        let mut out = Vec::new();
        if g.out_degree(v) == 0 {
            let c = self.cost[v];
            let rest = y & !self.parent_mask(v);
            match self.sem {
                Budget::AtMost => {
                    out.push((Choice::Skip, y, b));
                    if b >= c {
                        out.push((Choice::Take(g.in_edges(v).first().copied()), rest, b - c));
                    }
                }
                Budget::AtLeast => {
                    out.push((Choice::Skip, y, b.saturating_sub(c)));
                    out.push((Choice::Take(g.in_edges(v).first().copied()), rest, b));
                }
            }
            return out;
        }
        out.push((Choice::Skip, y, b));
        if g.in_degree(v) == 0 {
            return out;
        }
        match self.problem {
            Problem::Map => out.push((Choice::Take(None), (y & !self.parent_mask(v)) | vbit, b)),
            Problem::MaxTree => {
                for &e in g.in_edges(v) {
                    let p = g.edge(e).tail;
                    let pb = 1usize << self.layout.pos(v, p).expect("parent in bag");
                    out.push((Choice::Take(Some(e)), (y & !pb) | vbit, b));
                }
            }
        }
        out
    }

    fn gain(&self, v: VertexId, choice: &Choice) -> i64 {
        let g = self.net.dag();
        match choice {
            Choice::Skip => 0,
            Choice::Take(Some(e)) => self.weights[*e],
            Choice::Take(None) => g.in_edges(v).iter().map(|&e| self.weights[e]).sum(),
        }
    }

    fn value_of(&self, v: VertexId, dpp: &SubsetTable, choice: &Choice, mask: usize, b: usize) -> i64 {
        let x = dpp.read(mask, b, self.sem);
        if x == NEG_INF {
            NEG_INF
        } else {
            x + self.gain(v, choice)
        }
    }

    fn fill(&mut self, v: VertexId) {
        let folds = self.folds(v);
        let dpp = folds.last().expect("nonempty");
        let bits = self.layout.bits(v);
        let cap = self.caps[v];
        let mut t = SubsetTable::filled(bits, cap, Objective::Max);
        for y in 0..1usize << bits {
            for b in 0..=cap {
                let mut best = NEG_INF;
                for (choice, mask, bb) in self.options(v, y, b) {
                    best = best.max(self.value_of(v, dpp, &choice, mask, bb));
                }
                t.set(y, b, best);
            }
        }
        self.tables[v] = Some(t);
    }
}

fn solve(
    net: &Network,
    costs: &CostTable,
    budget: u64,
    ext: &TreeExtension,
    route: Route,
    problem: Problem,
) -> Result<BudgetedSolution, PdError> {
    let g = net.dag();
    check_extension(g, ext)?;
    if costs.0.len() != net.num_taxa() {
        return Err(PdError::CostMismatch { expected: net.num_taxa(), got: costs.0.len() });
    }
    let (weights, scale) = scaled_weights(g)?;
    let total = costs.total();
    let budget = budget.min(total);
    let complement = total - budget;
    let route = match route {
        Route::Auto if budget <= complement => Route::Primal,
        Route::Auto => Route::Complement,
        r => r,
    };
    let (k, sem) = match route {
        Route::Complement => (complement, Budget::AtLeast),
        _ => (budget, Budget::AtMost),
    };
    let k = usize::try_from(k).map_err(|_| PdError::BudgetTooLarge(k))?;
    let n = g.num_vertices();
    let cost: Vec<usize> = (0..n).map(|v| net.taxon_of(v).map_or(0, |t| costs.cost(t) as usize)).collect();
    let mut caps = vec![0usize; n];
    let mut below = vec![0usize; n];
    for v in ext.postorder() {
        let s = cost[v] + ext.children(v).iter().map(|&c| below[c]).sum::<usize>();
        below[v] = s;
        caps[v] = s.min(k);
    }
    let mut ctx = Ctx {
        net,
        ext,
        layout: BagLayout::new(ext),
        weights,
        cost,
        k,
        sem,
        problem,
        tables: vec![None; n],
        caps,
    };
    for v in ext.postorder() {
        ctx.fill(v);
    }
    let root = ext.root();
    let best = ctx.tables[root].as_ref().expect("root solved").read(0, k, sem);
    debug_assert!(best != NEG_INF, "empty selection is always feasible");

    // Backtrack from (root, ∅, k).
    let mut selected_vertices = Vec::new();
    let mut witness = Vec::new();
    let mut stack = vec![(root, 0usize, k)];
    while let Some((v, y, b)) = stack.pop() {
        let folds = ctx.folds(v);
        let dpp = folds.last().expect("nonempty");
        let target = ctx.tables[v].as_ref().expect("solved").read(y, b, sem);
        let (choice, mut mask, mut bb) = ctx
            .options(v, y, b)
            .into_iter()
            .find(|(c, m, bb)| ctx.value_of(v, dpp, c, *m, *bb) == target)
            .expect("some option attains the table value");
        let mut rest = target - ctx.gain(v, &choice);
        if let Choice::Take(e) = choice {
            selected_vertices.push(v);
            if let Some(e) = e {
                witness.push(e);
            }
        }
        if sem == Budget::AtMost {
            bb = bb.min(dpp.cap);
        }
        let kids = ext.children(v);
        for j in (0..kids.len()).rev() {
            let c = kids[j];
            let child = ctx.tables[c].as_ref().expect("solved");
            let pos = ctx.layout.child_positions(v, c);
            let prev = &folds[j];
            let mut found = None;
            'search: for k2 in 0..=child.cap {
                let k1 = match sem {
                    Budget::AtMost if k2 > bb => break,
                    Budget::AtMost => bb - k2,
                    Budget::AtLeast => bb.saturating_sub(k2),
                };
                for cm in 0..1usize << child.bits {
                    let lm = super::lift_mask(cm, &pos);
                    if lm & !mask != 0 {
                        continue;
                    }
                    let cv = child.at(cm, k2);
                    let pv = prev.read(mask & !lm, k1, sem);
                    if cv != NEG_INF && pv != NEG_INF && cv + pv == rest {
                        found = Some((cm, lm, k1, k2, cv));
                        break 'search;
                    }
                }
            }
            let (cm, lm, k1, k2, cv) = found.expect("fold value decomposes");
            debug_assert_eq!(lower_mask(lm, &pos), cm);
            stack.push((c, cm, k2));
            mask &= !lm;
            bb = k1;
            rest -= cv;
        }
        debug_assert_eq!(mask, 0);
        debug_assert_eq!(rest, 0);
    }

    let mut taxa = TaxonSet::new();
    for &v in &selected_vertices {
        if let Some(t) = net.taxon_of(v) {
            taxa.insert(t);
        }
    }
    witness.sort_unstable();
    let value = if scale == 1 { Weight::from_integer(best) } else { Weight::new(best, scale) };
    let value = if value.is_zero() { Weight::zero() } else { value };
    Ok(BudgetedSolution {
        value,
        cost: costs.cost_of(&taxa),
        taxa,
        budget,
        route,
        witness: (problem == Problem::MaxTree).then_some(witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::nsw_pipeline;
    use crate::fixtures;
    use crate::model::pd_map_value;

    fn forced_costs(net: &Network, chosen: &[&str], budget: u64) -> CostTable {
        CostTable(
            (0..net.num_taxa())
                .map(|t| if chosen.contains(&net.taxon_name(t)) { 1 } else { budget + 1 })
                .collect(),
        )
    }

    #[test]
    fn fish_example_values() {
        let net = fixtures::fish_network();
        let (ext, _) = nsw_pipeline(net.dag()).unwrap();
        let costs = forced_costs(&net, &["A", "B", "D"], 3);
        for route in [Route::Auto, Route::Primal, Route::Complement] {
            let s = solve_b_map_pd_with(&net, &costs, 3, &ext, route).unwrap();
            assert_eq!(s.value, Weight::from_integer(41));
            assert_eq!(net.taxon_names(&s.taxa), vec!["A", "B", "D"]);
            let s = solve_b_maxtree_pd_with(&net, &costs, 3, &ext, route).unwrap();
            assert_eq!(s.value, Weight::from_integer(30));
            let w: Weight = s.witness.unwrap().iter().map(|&e| net.dag().edge(e).weight).sum();
            assert_eq!(w, Weight::from_integer(30));
        }
    }

    #[test]
    fn zero_and_full_budget() {
        let net = fixtures::fish_network();
        let (ext, _) = nsw_pipeline(net.dag()).unwrap();
        let unit = CostTable::unit(&net);
        let s = solve_b_map_pd(&net, &unit, 0, &ext).unwrap();
        assert_eq!(s.value, Weight::zero());
        assert!(s.taxa.is_empty());
        let s = solve_b_map_pd(&net, &unit, 100, &ext).unwrap();
        assert_eq!(s.value, net.dag().total_weight());
        assert_eq!(s.taxa, net.all_taxa());
        assert_eq!(s.budget, 6);
        assert_eq!(pd_map_value(&net, &s.taxa), s.value);
    }
}
