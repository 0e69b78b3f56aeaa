//! Brute-force reference miner and the tools to compare against it.
//!
//! Every itemset over the items of the database is evaluated with a full
//! scan. Nothing here goes through the projection or utility-bin code.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use thiserror::Error;

use crate::dataset::{Database, ItemId, Itemset, Money};
use crate::miner::{sort_records, CohuiRecord, MiningParams};

/// Verification tolerance on Kulc values.
pub const KULC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("lattice of {itemsets} itemsets over {items} items exceeds the cap of {cap}")]
    TooLarge { items: usize, itemsets: u128, cap: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_items: usize,
    pub max_length: Option<usize>,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_items: 20,
            max_length: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OracleResult {
    pub records: Vec<CohuiRecord>,
    /// Itemsets evaluated.
    pub enumerated: u64,
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Full scan: utility and support of `items` (sorted ids).
struct Scanner {
    rows: Vec<BTreeMap<ItemId, Money>>,
    singles: HashMap<ItemId, usize>,
}

impl Scanner {
    fn new(db: &Database) -> Self {
        let rows: Vec<BTreeMap<ItemId, Money>> = db
            .transactions()
            .iter()
            .map(|t| t.entries.iter().copied().collect())
            .collect();
        let mut singles = HashMap::new();
        for row in &rows {
            for &i in row.keys() {
                *singles.entry(i).or_insert(0) += 1;
            }
        }
        Scanner { rows, singles }
    }

    fn evaluate(&self, items: &[ItemId]) -> (Money, usize) {
        let mut utility = 0;
        let mut support = 0;
        for row in &self.rows {
            let mut u = 0;
            let mut all = true;
            for i in items {
                match row.get(i) {
                    Some(v) => u += v,
                    None => {
                        all = false;
                        break;
                    }
                }
            }
            if all {
                utility += u;
                support += 1;
            }
        }
        (utility, support)
    }

    fn kulc(&self, items: &[ItemId], support: usize) -> f64 {
        let mut members: Vec<usize> = items.iter().map(|i| self.singles[i]).collect();
        members.sort_unstable();
        members.iter().map(|&m| support as f64 / m as f64).sum::<f64>() / members.len() as f64
    }
}

/// Evaluates every itemset (up to `caps.max_length` items) and keeps those
/// meeting both thresholds. Refuses lattices larger than `2^max_items - 1`.
pub fn enumerate_all(
    db: &Database,
    params: &MiningParams,
    caps: OracleCaps,
) -> Result<OracleResult, OracleError> {
    let items = db.items();
    let m = items.len();
    let top = caps.max_length.unwrap_or(m).min(m);
    let itemsets: u128 = (1..=top).map(|k| binomial(m, k)).sum();
    let cap = (1u128 << caps.max_items.min(100)) - 1;
    if itemsets > cap {
        return Err(OracleError::TooLarge { items: m, itemsets, cap });
    }

    let threshold = params.min_util.threshold(db.total_utility());
    let scanner = Scanner::new(db);
    let mut out = OracleResult::default();
    for k in 1..=top {
        for combo in items.iter().copied().combinations(k) {
            out.enumerated += 1;
            let (utility, support) = scanner.evaluate(&combo);
            if support == 0 || (utility as f64) < threshold {
                continue;
            }
            let kulc = scanner.kulc(&combo, support);
            if kulc >= params.min_cor {
                out.records.push(CohuiRecord {
                    itemset: Itemset::new(combo),
                    utility,
                    support,
                    kulc,
                });
            }
        }
    }
    sort_records(&mut out.records);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub itemset: Itemset,
    pub mined: (Money, usize, f64),
    pub reference: (Money, usize, f64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiffReport {
    /// In the reference, not mined.
    pub missing: Vec<Itemset>,
    /// Mined, not in the reference.
    pub spurious: Vec<Itemset>,
    pub mismatches: Vec<Mismatch>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty() && self.mismatches.is_empty()
    }

    /// One line per difference.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.missing.iter().map(|x| format!("missing: {x}")));
        out.extend(self.spurious.iter().map(|x| format!("spurious: {x}")));
        out.extend(self.mismatches.iter().map(|m| {
            format!(
                "mismatch: {} mined (u {}, sup {}, kulc {:.12}) reference (u {}, sup {}, kulc {:.12})",
                m.itemset, m.mined.0, m.mined.1, m.mined.2, m.reference.0, m.reference.1, m.reference.2
            )
        }));
        out
    }
}

/// Utilities and supports must match exactly, Kulc within [`KULC_TOLERANCE`].
pub fn compare(mined: &[CohuiRecord], reference: &[CohuiRecord]) -> DiffReport {
    let index: BTreeMap<&Itemset, &CohuiRecord> =
        reference.iter().map(|r| (&r.itemset, r)).collect();
    let mined_index: BTreeMap<&Itemset, &CohuiRecord> =
        mined.iter().map(|r| (&r.itemset, r)).collect();
    let mut report = DiffReport::default();
    for (x, m) in &mined_index {
        match index.get(x) {
            None => report.spurious.push((*x).clone()),
            Some(r) => {
                if m.utility != r.utility
                    || m.support != r.support
                    || (m.kulc - r.kulc).abs() > KULC_TOLERANCE
                {
                    report.mismatches.push(Mismatch {
                        itemset: (*x).clone(),
                        mined: (m.utility, m.support, m.kulc),
                        reference: (r.utility, r.support, r.kulc),
                    });
                }
            }
        }
    }
    for x in index.keys() {
        if !mined_index.contains_key(x) {
            report.missing.push((*x).clone());
        }
    }
    report
}

/// Items in search order: TWU ascending, ties by id.
pub fn search_order(db: &Database) -> Vec<ItemId> {
    let mut twu: BTreeMap<ItemId, Money> = BTreeMap::new();
    for t in db.transactions() {
        for &(i, _) in &t.entries {
            *twu.entry(i).or_default() += t.tu;
        }
    }
    let mut items: Vec<ItemId> = twu.keys().copied().collect();
    items.sort_by_key(|i| (twu[i], *i));
    items
}

/// A prefix (in search order) whose Kulc is lower than that of a longer pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct KulcInversion {
    pub pattern: Itemset,
    pub pattern_kulc: f64,
    /// Items in search order.
    pub prefix: Vec<ItemId>,
    pub prefix_kulc: f64,
}

fn prefixes_in_order(x: &Itemset, order: &[ItemId]) -> Vec<ItemId> {
    let mut items = x.items().to_vec();
    items.sort_by_key(|i| order.iter().position(|o| o == i));
    items
}

/// For each record, every search-order prefix with `Kulc(prefix) < Kulc(record)`.
pub fn kulc_inversions(db: &Database, records: &[CohuiRecord]) -> Vec<KulcInversion> {
    let order = search_order(db);
    let scanner = Scanner::new(db);
    let mut out = Vec::new();
    for rec in records {
        let items = prefixes_in_order(&rec.itemset, &order);
        for len in 2..items.len() {
            let mut prefix = items[..len].to_vec();
            prefix.sort_unstable();
            let (_, sup) = scanner.evaluate(&prefix);
            let k = scanner.kulc(&prefix, sup);
            if k < rec.kulc {
                out.push(KulcInversion {
                    pattern: rec.itemset.clone(),
                    pattern_kulc: rec.kulc,
                    prefix: items[..len].to_vec(),
                    prefix_kulc: k,
                });
            }
        }
    }
    out
}

/// A pattern found without Kulc pruning but not with it.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneLoss {
    pub itemset: Itemset,
    pub kulc: f64,
    /// The shortest search-order prefix with Kulc below `min_cor`, if any.
    pub blocking_prefix: Option<(Vec<ItemId>, f64)>,
}

impl PruneLoss {
    pub fn is_explained(&self) -> bool {
        self.blocking_prefix.is_some()
    }
}

/// Patterns of `postfilter` missing from `prune`, each traced to the prefix
/// whose low Kulc cut the branch.
pub fn audit_prune_losses(
    db: &Database,
    min_cor: f64,
    prune: &[CohuiRecord],
    postfilter: &[CohuiRecord],
) -> Vec<PruneLoss> {
    let order = search_order(db);
    let scanner = Scanner::new(db);
    let kept: std::collections::HashSet<&Itemset> = prune.iter().map(|r| &r.itemset).collect();
    postfilter
        .iter()
        .filter(|r| !kept.contains(&r.itemset))
        .map(|r| {
            let items = prefixes_in_order(&r.itemset, &order);
            let blocking_prefix = (2..items.len()).find_map(|len| {
                let mut prefix = items[..len].to_vec();
                prefix.sort_unstable();
                let (_, sup) = scanner.evaluate(&prefix);
                let k = scanner.kulc(&prefix, sup);
                (k < min_cor).then(|| (items[..len].to_vec(), k))
            });
            PruneLoss {
                itemset: r.itemset.clone(),
                kulc: r.kulc,
                blocking_prefix,
            }
        })
        .collect()
}
