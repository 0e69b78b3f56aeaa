//! The two root-level database scans: per-item TWU and support, the root
//! secondary set, TWU-ascending renaming and the rewritten, sorted database.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::dataset::{Database, ItemId, Money};

/// Dense item rank under the TWU-ascending total order.
pub type Rank = u32;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ItemStat {
    pub twu: Money,
    pub support: u32,
    /// `u({i})`
    pub utility: Money,
}

/// First-scan statistics of every item in a database.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemStats {
    stats: BTreeMap<ItemId, ItemStat>,
}

impl ItemStats {
    pub fn get(&self, item: ItemId) -> Option<&ItemStat> {
        self.stats.get(&item)
    }

    pub fn twu(&self, item: ItemId) -> Money {
        self.stats.get(&item).map_or(0, |s| s.twu)
    }

    pub fn support(&self, item: ItemId) -> u32 {
        self.stats.get(&item).map_or(0, |s| s.support)
    }

    /// Items in ascending id order with their stats.
    pub fn iter(&self) -> impl Iterator<Item = (ItemId, &ItemStat)> {
        self.stats.iter().map(|(&i, s)| (i, s))
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }
}

pub fn compute_item_stats(db: &Database) -> ItemStats {
    let mut stats: BTreeMap<ItemId, ItemStat> = BTreeMap::new();
    for t in db.transactions() {
        for &(item, u) in &t.entries {
            let s = stats.entry(item).or_default();
            s.twu += t.tu;
            s.support += 1;
            s.utility += u;
        }
    }
    ItemStats { stats }
}

/// Items whose TWU reaches `threshold`, ascending by id.
pub fn build_secondary_root(stats: &ItemStats, threshold: f64) -> Vec<ItemId> {
    stats
        .iter()
        .filter(|(_, s)| s.twu as f64 >= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Bijection between retained items and dense ranks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemOrder {
    rank: HashMap<ItemId, Rank>,
    items: Vec<ItemId>,
}

impl ItemOrder {
    pub fn rank_of(&self, item: ItemId) -> Option<Rank> {
        self.rank.get(&item).copied()
    }

    pub fn item_at(&self, rank: Rank) -> ItemId {
        self.items[rank as usize]
    }

    /// Items listed from lowest to highest rank.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Ranks `secondary` by TWU ascending, breaking ties by the smaller id.
pub fn build_order(secondary: &[ItemId], stats: &ItemStats) -> ItemOrder {
    let mut items = secondary.to_vec();
    items.sort_by_key(|&i| (stats.twu(i), i));
    items.dedup();
    let rank = items
        .iter()
        .enumerate()
        .map(|(r, &i)| (i, r as Rank))
        .collect();
    ItemOrder { rank, items }
}

/// The ≻_T comparator on rank-sorted transactions.
///
/// Items are compared from the last position backwards; the first unequal
/// rank decides (smaller first). When one transaction is a back-suffix of the
/// other the shorter one comes first, and identical item lists fall back to
/// ascending tid.
pub fn cmp_transactions(a: &[Rank], a_tid: u32, b: &[Rank], b_tid: u32) -> Ordering {
    a.iter()
        .rev()
        .cmp(b.iter().rev())
        .then_with(|| a_tid.cmp(&b_tid))
}

/// The database after root pruning: only retained items, renamed to ranks,
/// stored in flat arrays and sorted by ≻_T.
#[derive(Debug, Clone, Default)]
pub struct OrderedDatabase {
    order: ItemOrder,
    ranks: Vec<Rank>,
    utils: Vec<Money>,
    starts: Vec<usize>,
    tids: Vec<u32>,
    tus: Vec<Money>,
    singleton_supports: Vec<u32>,
    singleton_utilities: Vec<Money>,
    twu: Vec<Money>,
    total_utility: Money,
    threshold: f64,
}

impl OrderedDatabase {
    pub fn order(&self) -> &ItemOrder {
        &self.order
    }

    pub fn num_transactions(&self) -> usize {
        self.tids.len()
    }

    pub fn num_items(&self) -> usize {
        self.order.len()
    }

    /// Ranks and utilities of transaction `idx`, both rank-ascending.
    pub fn transaction(&self, idx: usize) -> (&[Rank], &[Money]) {
        let (lo, hi) = (self.starts[idx], self.starts[idx + 1]);
        (&self.ranks[lo..hi], &self.utils[lo..hi])
    }

    pub fn tid(&self, idx: usize) -> u32 {
        self.tids[idx]
    }

    /// Utility of transaction `idx` after non-retained items were removed.
    pub fn tu(&self, idx: usize) -> Money {
        self.tus[idx]
    }

    /// First-scan support of each rank.
    pub fn singleton_supports(&self) -> &[u32] {
        &self.singleton_supports
    }

    /// `u({i})` of each rank.
    pub fn singleton_utilities(&self) -> &[Money] {
        &self.singleton_utilities
    }

    pub fn twu(&self) -> &[Money] {
        &self.twu
    }

    /// TU of the original database.
    pub fn total_utility(&self) -> Money {
        self.total_utility
    }

    pub fn absolute_threshold(&self) -> f64 {
        self.threshold
    }

    /// Total number of stored (rank, utility) entries.
    pub fn num_entries(&self) -> usize {
        self.ranks.len()
    }
}

/// Drops items missing from `order`, renames the rest, drops empty
/// transactions and sorts by [`cmp_transactions`].
pub fn rewrite_database(
    db: &Database,
    stats: &ItemStats,
    order: &ItemOrder,
    threshold: f64,
) -> OrderedDatabase {
    let mut rows: Vec<(u32, Vec<(Rank, Money)>)> = db
        .transactions()
        .iter()
        .filter_map(|t| {
            let mut row: Vec<(Rank, Money)> = t
                .entries
                .iter()
                .filter_map(|&(i, u)| order.rank_of(i).map(|r| (r, u)))
                .collect();
            if row.is_empty() {
                return None;
            }
            row.sort_unstable_by_key(|&(r, _)| r);
            Some((t.tid, row))
        })
        .collect();

    let keys: Vec<Vec<Rank>> = rows
        .iter()
        .map(|(_, row)| row.iter().map(|&(r, _)| r).collect())
        .collect();
    let mut perm: Vec<usize> = (0..rows.len()).collect();
    perm.sort_by(|&x, &y| cmp_transactions(&keys[x], rows[x].0, &keys[y], rows[y].0));

    let mut out = OrderedDatabase {
        order: order.clone(),
        starts: vec![0],
        total_utility: db.total_utility(),
        threshold,
        ..Default::default()
    };
    for idx in perm {
        let (tid, row) = std::mem::take(&mut rows[idx]);
        out.tids.push(tid);
        out.tus.push(row.iter().map(|&(_, u)| u).sum());
        for (r, u) in row {
            out.ranks.push(r);
            out.utils.push(u);
        }
        out.starts.push(out.ranks.len());
    }
    for &item in order.items() {
        let s = stats.get(item).copied().unwrap_or_default();
        out.singleton_supports.push(s.support);
        out.singleton_utilities.push(s.utility);
        out.twu.push(s.twu);
    }
    out
}

/// Runs both root scans: stats, secondary set, order and rewrite.
pub fn prepare(db: &Database, threshold: f64) -> (ItemStats, OrderedDatabase) {
    let stats = compute_item_stats(db);
    let secondary = build_secondary_root(&stats, threshold);
    let order = build_order(&secondary, &stats);
    let odb = rewrite_database(db, &stats, &order, threshold);
    (stats, odb)
}

/// Root primary items: ranks whose subtree utility over the whole database
/// reaches `threshold`.
pub fn compute_primary_root(odb: &OrderedDatabase, threshold: f64) -> Vec<Rank> {
    use crate::bounds::{compute_su, ItemMask, UtilityBinArray};
    use crate::projection::root_view;

    let all: Vec<Rank> = (0..odb.num_items() as Rank).collect();
    let mut mask = ItemMask::new(odb.num_items());
    mask.set(&all);
    let mut su = UtilityBinArray::new(odb.num_items());
    compute_su(&root_view(odb), &mask, &mut su);
    all.into_iter()
        .filter(|&r| su.get(r) as f64 >= threshold)
        .collect()
}
