//! Local-utility and subtree-utility upper bounds computed with reusable
//! utility-bin arrays, and the primary/secondary split of a search node.
//!
//! For a prefix `α` and a candidate `z` ranked after every item of `α`:
//!
//! * `lu(α, z)` sums `u(α, T) + re(α, T)` over the transactions holding `α ∪ {z}`;
//! * `su(α, z)` sums `u(α, T) + u(z, T) + re(α ∪ {z}, T)` over the same transactions.
//!
//! Remaining utilities only count items enabled in an [`ItemMask`] (the
//! parent's secondary items); the others can never join an extension of `α`.

use thiserror::Error;

use crate::dataset::Money;
use crate::preprocess::Rank;
use crate::projection::ProjectedView;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("subtree utility {su} exceeds local utility {lu} for rank {rank}")]
    SubtreeExceedsLocal { rank: Rank, su: Money, lu: Money },
}

/// Dense money accumulator indexed by rank.
///
/// Resetting only zeroes the bins written since the previous reset, so one
/// array can serve every node of a search.
#[derive(Debug, Clone)]
pub struct UtilityBinArray {
    bins: Vec<Money>,
    touched: Vec<Rank>,
}

impl UtilityBinArray {
    pub fn new(len: usize) -> Self {
        UtilityBinArray {
            bins: vec![0; len],
            touched: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn reset(&mut self) {
        for &r in &self.touched {
            self.bins[r as usize] = 0;
        }
        self.touched.clear();
    }

    #[inline]
    pub fn add(&mut self, rank: Rank, value: Money) {
        let bin = &mut self.bins[rank as usize];
        if *bin == 0 && value > 0 {
            self.touched.push(rank);
        }
        *bin += value;
    }

    #[inline]
    pub fn get(&self, rank: Rank) -> Money {
        self.bins[rank as usize]
    }

    pub fn as_slice(&self) -> &[Money] {
        &self.bins
    }

    /// Ranks written since the last reset, in first-write order.
    pub fn touched(&self) -> &[Rank] {
        &self.touched
    }
}

/// Membership flags over ranks.
#[derive(Debug, Clone)]
pub struct ItemMask {
    flags: Vec<bool>,
    enabled: Vec<Rank>,
}

impl ItemMask {
    pub fn new(len: usize) -> Self {
        ItemMask {
            flags: vec![false; len],
            enabled: Vec::new(),
        }
    }

    /// Replaces the enabled set with `ranks`.
    pub fn set(&mut self, ranks: &[Rank]) {
        for &r in &self.enabled {
            self.flags[r as usize] = false;
        }
        for &r in ranks {
            self.flags[r as usize] = true;
        }
        self.enabled.clear();
        self.enabled.extend_from_slice(ranks);
    }

    #[inline]
    pub fn contains(&self, rank: Rank) -> bool {
        self.flags[rank as usize]
    }
}

/// Fills `ua` with `lu(α, i)` for every enabled rank occurring in `view`.
pub fn compute_lu(view: &ProjectedView<'_>, mask: &ItemMask, ua: &mut UtilityBinArray) {
    ua.reset();
    for (row, ranks, utils) in view.suffixes() {
        let remaining: Money = ranks
            .iter()
            .zip(utils)
            .filter(|(&r, _)| mask.contains(r))
            .map(|(_, &u)| u)
            .sum();
        let contribution = row.prefix_utility + remaining;
        for &r in ranks {
            if mask.contains(r) {
                ua.add(r, contribution);
            }
        }
    }
}

/// Fills `ua` with `su(α, i)` using one back-to-front pass per row.
pub fn compute_su(view: &ProjectedView<'_>, mask: &ItemMask, ua: &mut UtilityBinArray) {
    ua.reset();
    for (row, ranks, utils) in view.suffixes() {
        let mut after: Money = 0;
        for (&r, &u) in ranks.iter().zip(utils).rev() {
            if mask.contains(r) {
                ua.add(r, row.prefix_utility + u + after);
                after += u;
            }
        }
    }
}

/// Fills `ua` with `TWU(α ∪ {i})`, using the rewritten transaction utilities.
/// Only the TWU-only baseline uses this.
pub fn compute_twu(view: &ProjectedView<'_>, mask: &ItemMask, ua: &mut UtilityBinArray) {
    ua.reset();
    let base = view.base();
    for (row, ranks, _) in view.suffixes() {
        let tu = base.tu(row.tx as usize);
        for &r in ranks {
            if mask.contains(r) {
                ua.add(r, tu);
            }
        }
    }
}

/// Items of a node split by their bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodePartition {
    /// Ranks with `lu >= threshold`; may appear anywhere below the node.
    pub secondary: Vec<Rank>,
    /// Ranks with `su >= threshold`; expanded as children of the node.
    pub primary: Vec<Rank>,
}

/// Splits `candidates` (rank-ascending) by the two bin arrays.
pub fn partition(
    lu: &UtilityBinArray,
    su: &UtilityBinArray,
    candidates: &[Rank],
    threshold: f64,
) -> Result<NodePartition, BoundsError> {
    let mut out = NodePartition::default();
    for &r in candidates {
        let (l, s) = (lu.get(r), su.get(r));
        if s > l {
            return Err(BoundsError::SubtreeExceedsLocal { rank: r, su: s, lu: l });
        }
        if l as f64 >= threshold {
            out.secondary.push(r);
            if s as f64 >= threshold {
                out.primary.push(r);
            }
        }
    }
    Ok(out)
}
