//! Worst-switching-tree diversity of a fixed taxon set.
//!
//! The network is first cut down to the ancestors of the chosen leaves, so
//! that every switching tree restricted to them is a tree whose leaves are
//! exactly the chosen taxa. For a Γ-vertex v and bag subsets Y ⊆ Z, the
//! table holds the lightest edge set F below v such that every selected
//! vertex has one in-edge in F, every leaf below v is selected, every
//! member of Y has an out-edge in F, and F leaves the subtree only towards
//! members of Z.

use num_traits::Zero;

use super::table::{fold_child, Budget, Objective, SubsetTable, POS_INF};
use super::{check_extension, scaled_weights, BagLayout, PdError};
use crate::extension::TreeExtension;
use crate::model::{Dag, Network, TaxonSet, VertexId, Weight};

/// Sub-network on the ancestors of a taxon set and the projected extension.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub dag: Dag,
    /// Restricted id to network id.
    pub origin: Vec<VertexId>,
    pub ext: TreeExtension,
}

/// Keeps the vertices with a descendant leaf in `a`; each kept vertex hangs
/// below its nearest kept Γ-ancestor.
pub fn restrict_to_ancestors(net: &Network, a: &TaxonSet, ext: &TreeExtension) -> Result<Restriction, PdError> {
    let g = net.dag();
    check_extension(g, ext)?;
    if a.is_empty() {
        return Err(PdError::EmptyTaxonSet);
    }
    let leaves: Vec<VertexId> = a.iter().map(|t| net.leaf_of(t)).collect();
    let keep = g.ancestors_of_set(&leaves);
    let origin: Vec<VertexId> = keep.to_vec();
    let (dag, origin) = g.induced(&origin);
    let mut local = vec![usize::MAX; g.num_vertices()];
    for (i, &v) in origin.iter().enumerate() {
        local[v] = i;
    }
    let mut parent = vec![None; origin.len()];
    for (i, &v) in origin.iter().enumerate() {
        let mut p = ext.parent(v);
        while let Some(q) = p {
            if keep.contains(q) {
                break;
            }
            p = ext.parent(q);
        }
        parent[i] = p.map(|q| local[q]);
    }
    let ext = TreeExtension::new(&dag, parent).map_err(|_| PdError::ExtensionMismatch)?;
    Ok(Restriction { dag, origin, ext })
}

/// Smallest diversity of `a` over all switching trees.
pub fn compute_min_tree_pd(net: &Network, a: &TaxonSet, ext: &TreeExtension) -> Result<Weight, PdError> {
    let r = restrict_to_ancestors(net, a, ext)?;
    let (g, ext) = (&r.dag, &r.ext);
    let (weights, scale) = scaled_weights(g)?;
    let layout = BagLayout::new(ext);
    let n = g.num_vertices();
    // tables[v][z] is the Y-indexed row for bag subset Z.
    let mut tables: Vec<Option<Vec<SubsetTable>>> = vec![None; n];
    let mut answer = POS_INF;
    for v in ext.postorder() {
        let bits = layout.bits(v);
        let full = bits + 1;
        let vbit = 1usize << bits;
        let kids = ext.children(v);
        let positions: Vec<Vec<u32>> = kids.iter().map(|&c| layout.child_positions(v, c)).collect();
        // dpp[z] for every Z over bag(v) ∪ {v}.
        let mut dpp = Vec::with_capacity(1 << full);
        for z in 0..1usize << full {
            let mut acc = SubsetTable::unit(full, Objective::Min);
            for (j, &c) in kids.iter().enumerate() {
                let child_rows = tables[c].as_ref().expect("children first");
                let zc = super::lower_mask(z, &positions[j]);
                acc = fold_child(&acc, &child_rows[zc], &positions[j], 0, Budget::AtMost);
            }
            // Only Y ⊆ Z is meaningful.
            for y in 0..1usize << full {
                if y & !z != 0 {
                    acc.set(y, 0, POS_INF);
                }
            }
            dpp.push(acc);
        }
        for &c in kids {
            tables[c] = None;
        }
        if g.in_degree(v) == 0 {
            answer = dpp[vbit].at(0, 0);
            break;
        }
        let leaf = g.out_degree(v) == 0;
        let mut rows = Vec::with_capacity(1 << bits);
        for z in 0..1usize << bits {
            let mut row = SubsetTable::filled(bits, 0, Objective::Min);
            for y in 0..1usize << bits {
                if y & !z != 0 {
                    continue;
                }
                let mut best = if leaf { POS_INF } else { dpp[z].at(y, 0) };
                for &e in g.in_edges(v) {
                    let p = g.edge(e).tail;
                    let pb = 1usize << layout.pos(v, p).expect("parent in bag");
                    if z & pb == 0 {
                        continue;
                    }
                    let inner = if leaf { dpp[z].at(y & !pb, 0) } else { dpp[z | vbit].at((y & !pb) | vbit, 0) };
                    if inner != POS_INF {
                        best = best.min(inner + weights[e]);
                    }
                }
                row.set(y, 0, best);
            }
            rows.push(row);
        }
        tables[v] = Some(rows);
    }
    debug_assert!(answer != POS_INF, "a switching tree always exists");
    let value = if scale == 1 { Weight::from_integer(answer) } else { Weight::new(answer, scale) };
    Ok(if value.is_zero() { Weight::zero() } else { value })
}
