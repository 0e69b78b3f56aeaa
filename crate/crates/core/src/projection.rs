//! Projected databases as offset views over an [`OrderedDatabase`].
//!
//! A view for prefix `α` keeps, for every transaction containing `α`, the
//! position just past the last item of `α` and the prefix utility `u(α, T)`.
//! Nothing is copied; extending a view only scans each row's suffix.

use crate::dataset::Money;
use crate::preprocess::{OrderedDatabase, Rank};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Row {
    /// Index into the ordered database.
    pub tx: u32,
    /// First suffix position within the transaction.
    pub offset: u32,
    pub prefix_utility: Money,
}

#[derive(Debug, Clone)]
pub struct ProjectedView<'a> {
    base: &'a OrderedDatabase,
    rows: Vec<Row>,
    depth: usize,
}

/// Result of extending a view by one item.
#[derive(Debug, Clone)]
pub struct Extension<'a> {
    pub view: ProjectedView<'a>,
    /// `u(β)`
    pub utility: Money,
    /// `sup(β)`
    pub support: usize,
}

/// Callbacks for [`ProjectedView::suffix_scan`].
pub trait SuffixVisitor {
    fn row(&mut self, row: &Row);
    fn entry(&mut self, rank: Rank, utility: Money);
}

/// The view of the empty prefix: every transaction, offset 0, prefix 0.
pub fn root_view(odb: &OrderedDatabase) -> ProjectedView<'_> {
    let rows = (0..odb.num_transactions())
        .map(|tx| Row {
            tx: tx as u32,
            offset: 0,
            prefix_utility: 0,
        })
        .collect();
    ProjectedView {
        base: odb,
        rows,
        depth: 0,
    }
}

impl<'a> ProjectedView<'a> {
    pub fn base(&self) -> &'a OrderedDatabase {
        self.base
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// `|α|`
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn suffix(&self, row: &Row) -> (&'a [Rank], &'a [Money]) {
        let (ranks, utils) = self.base.transaction(row.tx as usize);
        let at = row.offset as usize;
        (&ranks[at..], &utils[at..])
    }

    /// Rows paired with their suffix ranks and utilities.
    pub fn suffixes(&self) -> impl Iterator<Item = (&Row, &'a [Rank], &'a [Money])> + '_ {
        self.rows.iter().map(move |row| {
            let (r, u) = self.suffix(row);
            (row, r, u)
        })
    }

    /// Visits each row, then each of its suffix entries in rank order.
    pub fn suffix_scan<V: SuffixVisitor>(&self, visitor: &mut V) {
        for (row, ranks, utils) in self.suffixes() {
            visitor.row(row);
            for (&r, &u) in ranks.iter().zip(utils) {
                visitor.entry(r, u);
            }
        }
    }

    /// Projects on `α ∪ {z}`. Rows whose suffix lacks `z` are dropped; the
    /// others move their offset past `z` and add `u(z, T)` to the prefix.
    pub fn extend(&self, z: Rank) -> Extension<'a> {
        let mut rows = Vec::new();
        let mut utility = 0;
        for row in &self.rows {
            let (ranks, utils) = self.suffix(row);
            for (pos, &r) in ranks.iter().enumerate() {
                if r >= z {
                    if r == z {
                        let prefix_utility = row.prefix_utility + utils[pos];
                        utility += prefix_utility;
                        rows.push(Row {
                            tx: row.tx,
                            offset: row.offset + pos as u32 + 1,
                            prefix_utility,
                        });
                    }
                    break;
                }
            }
        }
        let support = rows.len();
        Extension {
            view: ProjectedView {
                base: self.base,
                rows,
                depth: self.depth + 1,
            },
            utility,
            support,
        }
    }
}
