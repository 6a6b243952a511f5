//! Diversity optimization over a tree-extension.
//!
//! * [`solve_b_map_pd`]: most all-paths diversity within a budget.
//! * [`solve_b_maxtree_pd`]: most best-switching-tree diversity within a
//!   budget.
//! * [`compute_min_tree_pd`]: worst-switching-tree diversity of a fixed set.
//!
//! Tables are indexed by subsets of a bag (bitmasks over the sorted bag)
//! and, for the budgeted problems, by a budget in `0..=min(B, total - B)`.
//! Children of a Γ-vertex are folded in one at a time; see
//! [`combine_children`].

mod budgeted;
mod mintree;
mod table;

pub use budgeted::{solve_b_map_pd, solve_b_map_pd_with, solve_b_maxtree_pd, solve_b_maxtree_pd_with, BudgetedSolution, Route};
pub use mintree::{compute_min_tree_pd, restrict_to_ancestors, Restriction};
pub use table::{combine_children, fold_child, Budget, Objective, SubsetTable, NEG_INF, POS_INF};

use num_integer::Integer;
use thiserror::Error;

use crate::extension::TreeExtension;
use crate::model::Dag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdError {
    #[error("taxon set is empty")]
    EmptyTaxonSet,
    #[error("extension does not belong to this network")]
    ExtensionMismatch,
    #[error("cost table has {got} entries, network has {expected} taxa")]
    CostMismatch { expected: usize, got: usize },
    #[error("edge weights do not fit a common 64-bit scale")]
    WeightOverflow,
    #[error("budget index {0} is too large for the tables")]
    BudgetTooLarge(u64),
}

/// Checks that `ext` is a tree-extension of `g`.
pub(crate) fn check_extension(g: &Dag, ext: &TreeExtension) -> Result<(), PdError> {
    if ext.num_vertices() != g.num_vertices() {
        return Err(PdError::ExtensionMismatch);
    }
    for e in g.edges() {
        if e.tail == e.head || !ext.is_ancestor(e.tail, e.head) {
            return Err(PdError::ExtensionMismatch);
        }
    }
    Ok(())
}

/// Edge weights as integers over a common denominator.
pub(crate) fn scaled_weights(g: &Dag) -> Result<(Vec<i64>, i64), PdError> {
    let mut scale: i64 = 1;
    for e in g.edges() {
        let d = *e.weight.denom();
        scale = scale.checked_div(scale.gcd(&d)).and_then(|s| s.checked_mul(d)).ok_or(PdError::WeightOverflow)?;
    }
    let mut out = Vec::with_capacity(g.num_edges());
    let mut total: i64 = 0;
    for e in g.edges() {
        let w = e.weight;
        let v = w.numer().checked_mul(scale / w.denom()).ok_or(PdError::WeightOverflow)?;
        total = total.checked_add(v).ok_or(PdError::WeightOverflow)?;
        out.push(v);
    }
    // Sentinels sit at the ends of the i64 range; keep sums clear of them.
    if total >= i64::MAX / 4 {
        return Err(PdError::WeightOverflow);
    }
    Ok((out, scale))
}

/// Sorted bag of every vertex and, for each vertex, the position of every
/// member of each Γ-child's bag inside `bag(v) ∪ {v}` (with `v` last).
pub(crate) struct BagLayout {
    pub bags: Vec<Vec<usize>>,
}

impl BagLayout {
    pub fn new(ext: &TreeExtension) -> Self {
        BagLayout { bags: (0..ext.num_vertices()).map(|v| ext.bag(v).to_vec()).collect() }
    }

    pub fn bits(&self, v: usize) -> u32 {
        self.bags[v].len() as u32
    }

    /// Bit of `u` in the bag of `v`, or `bits(v)` when `u == v`.
    pub fn pos(&self, v: usize, u: usize) -> Option<u32> {
        if u == v {
            return Some(self.bits(v));
        }
        self.bags[v].binary_search(&u).ok().map(|i| i as u32)
    }

    /// Positions of `child`'s bag inside `bag(v) ∪ {v}`.
    pub fn child_positions(&self, v: usize, child: usize) -> Vec<u32> {
        self.bags[child].iter().map(|&u| self.pos(v, u).expect("child bag lies in parent bag plus parent")).collect()
    }
}

/// Maps a mask over positions `0..positions.len()` through `positions`.
#[inline]
pub(crate) fn lift_mask(mask: usize, positions: &[u32]) -> usize {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << positions[i];
        m &= m - 1;
    }
    out
}

/// Inverse of [`lift_mask`] for masks inside the image.
#[inline]
pub(crate) fn lower_mask(mask: usize, positions: &[u32]) -> usize {
    let mut out = 0;
    for (i, &p) in positions.iter().enumerate() {
        if mask >> p & 1 == 1 {
            out |= 1 << i;
        }
    }
    out
}
