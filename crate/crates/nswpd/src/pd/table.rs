//! Subset-by-budget tables and the child fold.

use super::lift_mask;

/// Marks an infeasible cell of a maximizing table.
pub const NEG_INF: i64 = i64::MIN;
/// Marks an infeasible cell of a minimizing table.
pub const POS_INF: i64 = i64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Max,
    Min,
}

/// How a budget index is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Cell `k` holds the best value using at most `k`.
    AtMost,
    /// Cell `k` holds the best value leaving out at least `k`.
    AtLeast,
}

/// Values indexed by a subset mask over `bits` positions and a budget
/// `0..=cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetTable {
    pub bits: u32,
    pub cap: usize,
    pub objective: Objective,
    pub cells: Vec<i64>,
}

impl SubsetTable {
    pub fn filled(bits: u32, cap: usize, objective: Objective) -> Self {
        let none = match objective {
            Objective::Max => NEG_INF,
            Objective::Min => POS_INF,
        };
        SubsetTable { bits, cap, objective, cells: vec![none; (1usize << bits) * (cap + 1)] }
    }

    /// The fold of zero children: value 0 at the empty set, budget 0.
    pub fn unit(bits: u32, objective: Objective) -> Self {
        let mut t = Self::filled(bits, 0, objective);
        t.cells[0] = 0;
        t
    }

    pub fn none(&self) -> i64 {
        match self.objective {
            Objective::Max => NEG_INF,
            Objective::Min => POS_INF,
        }
    }

    #[inline]
    pub fn better(&self, a: i64, b: i64) -> bool {
        match self.objective {
            Objective::Max => a > b,
            Objective::Min => a < b,
        }
    }

    #[inline]
    pub fn at(&self, mask: usize, k: usize) -> i64 {
        self.cells[mask * (self.cap + 1) + k]
    }

    #[inline]
    pub fn set(&mut self, mask: usize, k: usize, v: i64) {
        let c = self.cap + 1;
        self.cells[mask * c + k] = v;
    }

    /// Reads budget `k`, which may exceed `cap`.
    #[inline]
    pub fn read(&self, mask: usize, k: usize, budget: Budget) -> i64 {
        if k <= self.cap {
            self.at(mask, k)
        } else {
            match budget {
                Budget::AtMost => self.at(mask, self.cap),
                Budget::AtLeast => self.none(),
            }
        }
    }

    fn row_live(&self, mask: usize) -> bool {
        let c = self.cap + 1;
        self.cells[mask * c..(mask + 1) * c].iter().any(|&x| x != self.none())
    }

    /// Makes every row monotone in the budget direction.
    pub fn close(&mut self, budget: Budget) {
        let c = self.cap + 1;
        let none = self.none();
        for row in self.cells.chunks_mut(c) {
            let pick = |a: i64, b: i64| -> i64 {
                if a == none {
                    b
                } else if b == none {
                    a
                } else {
                    match self.objective {
                        Objective::Max => a.max(b),
                        Objective::Min => a.min(b),
                    }
                }
            };
            match budget {
                Budget::AtMost => {
                    for k in 1..c {
                        row[k] = pick(row[k], row[k - 1]);
                    }
                }
                Budget::AtLeast => {
                    for k in (0..c - 1).rev() {
                        row[k] = pick(row[k], row[k + 1]);
                    }
                }
            }
        }
    }
}

/// Folds one child into an accumulated table. `positions[i]` is the bit of
/// the accumulated table that the child's bit `i` stands for. Budgets add;
/// sums above `k_max` are dropped (`AtMost`) or credited to `k_max`
/// (`AtLeast`). Subsets combine as disjoint unions.
pub fn fold_child(acc: &SubsetTable, child: &SubsetTable, positions: &[u32], k_max: usize, budget: Budget) -> SubsetTable {
    debug_assert_eq!(acc.objective, child.objective);
    let cap = k_max.min(acc.cap + child.cap);
    let mut out = SubsetTable::filled(acc.bits, cap, acc.objective);
    let none = acc.none();
    let acc_rows: Vec<usize> = (0..1usize << acc.bits).filter(|&m| acc.row_live(m)).collect();
    let child_rows: Vec<(usize, usize)> =
        (0..1usize << child.bits).filter(|&m| child.row_live(m)).map(|m| (m, lift_mask(m, positions))).collect();
    let (ac, cc, oc) = (acc.cap + 1, child.cap + 1, cap + 1);
    for &(cm, lm) in &child_rows {
        let crow = &child.cells[cm * cc..(cm + 1) * cc];
        for &am in &acc_rows {
            if am & lm != 0 {
                continue;
            }
            let om = am | lm;
            let arow = &acc.cells[am * ac..(am + 1) * ac];
            let orow = &mut out.cells[om * oc..(om + 1) * oc];
            for (k1, &a) in arow.iter().enumerate() {
                if a == none {
                    continue;
                }
                for (k2, &c) in crow.iter().enumerate() {
                    if c == none {
                        continue;
                    }
                    let mut k = k1 + k2;
                    if k > cap {
                        match budget {
                            Budget::AtMost => break,
                            Budget::AtLeast => k = cap,
                        }
                    }
                    let v = a + c;
                    let cur = orow[k];
                    let take = cur == none
                        || match acc.objective {
                            Objective::Max => v > cur,
                            Objective::Min => v < cur,
                        };
                    if take {
                        orow[k] = v;
                    }
                }
            }
        }
    }
    out.close(budget);
    out
}

/// Folds all children in order, starting from [`SubsetTable::unit`].
/// Returns every intermediate table; the last one is the combination.
pub fn combine_children(
    children: &[(&SubsetTable, Vec<u32>)],
    target_bits: u32,
    k_max: usize,
    objective: Objective,
    budget: Budget,
) -> Vec<SubsetTable> {
    let mut folds = vec![SubsetTable::unit(target_bits, objective)];
    for (child, pos) in children {
        let next = fold_child(folds.last().expect("nonempty"), child, pos, k_max, budget);
        folds.push(next);
    }
    folds
}
