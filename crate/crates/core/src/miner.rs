//! The CoIUM driver and its depth-first search.
//!
//! [`mine`] runs the two root scans, emits the high-utility singletons once,
//! and then grows prefixes in TWU-ascending order. Each child `β = α ∪ {i}`
//! is obtained by projecting `α`'s view on `i`, which yields `u(β)` and
//! `sup(β)` directly; `lu`/`su` over `β`'s view then decide which items are
//! expanded below it. With [`KulcMode::Prune`] a child whose Kulc value falls
//! under `min_cor` is not expanded.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bounds::{
    compute_lu, compute_su, compute_twu, partition, BoundsError, ItemMask, UtilityBinArray,
};
use crate::dataset::{Database, ItemId, Itemset, Money};
use crate::preprocess::{compute_primary_root, prepare, OrderedDatabase, Rank};
use crate::projection::{root_view, Extension, ProjectedView};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MiningError {
    #[error("relative min-util must be within [0, 1], got {0}")]
    MinUtilOutOfRange(f64),
    #[error("min-cor must be within [0, 1], got {0}")]
    MinCorOutOfRange(f64),
    #[error("max pattern length must be at least 1")]
    ZeroMaxLength,
    #[error("item support is zero")]
    ZeroSupport,
    #[error("itemset support {support} exceeds member support {member}")]
    SupportExceedsMember { support: usize, member: usize },
    #[error("Kulc needs at least one member")]
    NoMembers,
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Utility threshold, relative to TU or in absolute money.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinUtil {
    Relative(f64),
    Absolute(Money),
}

impl MinUtil {
    /// The money threshold compared (with `>=`) against utilities.
    pub fn threshold(&self, total_utility: Money) -> f64 {
        match *self {
            MinUtil::Relative(r) => r * total_utility as f64,
            MinUtil::Absolute(a) => a as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum KulcMode {
    /// Skip the subtree of any itemset whose Kulc is below `min_cor`.
    #[default]
    Prune,
    /// Only filter emitted itemsets by Kulc; the search is complete.
    Postfilter,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum BoundsMode {
    #[default]
    LuSu,
    /// Baseline: expand every item whose projected TWU reaches the threshold.
    TwuOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mode {0:?}")]
pub struct UnknownMode(pub String);

impl FromStr for KulcMode {
    type Err = UnknownMode;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prune" => Ok(KulcMode::Prune),
            "postfilter" => Ok(KulcMode::Postfilter),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

impl fmt::Display for KulcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KulcMode::Prune => "prune",
            KulcMode::Postfilter => "postfilter",
        })
    }
}

impl FromStr for BoundsMode {
    type Err = UnknownMode;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lu-su" => Ok(BoundsMode::LuSu),
            "twu-only" => Ok(BoundsMode::TwuOnly),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

impl fmt::Display for BoundsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundsMode::LuSu => "lu-su",
            BoundsMode::TwuOnly => "twu-only",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningParams {
    pub min_util: MinUtil,
    pub min_cor: f64,
    pub kulc_mode: KulcMode,
    pub bounds_mode: BoundsMode,
    pub max_pattern_length: Option<usize>,
}

impl MiningParams {
    /// Relative `min_util`, default modes, no length cap.
    pub fn new(min_util: f64, min_cor: f64) -> Self {
        MiningParams {
            min_util: MinUtil::Relative(min_util),
            min_cor,
            kulc_mode: KulcMode::default(),
            bounds_mode: BoundsMode::default(),
            max_pattern_length: None,
        }
    }

    pub fn with_kulc_mode(mut self, mode: KulcMode) -> Self {
        self.kulc_mode = mode;
        self
    }

    pub fn with_bounds_mode(mut self, mode: BoundsMode) -> Self {
        self.bounds_mode = mode;
        self
    }

    pub fn with_max_length(mut self, len: Option<usize>) -> Self {
        self.max_pattern_length = len;
        self
    }

    pub fn validate(&self) -> Result<(), MiningError> {
        if let MinUtil::Relative(r) = self.min_util {
            if !(0.0..=1.0).contains(&r) {
                return Err(MiningError::MinUtilOutOfRange(r));
            }
        }
        if !(0.0..=1.0).contains(&self.min_cor) {
            return Err(MiningError::MinCorOutOfRange(self.min_cor));
        }
        if self.max_pattern_length == Some(0) {
            return Err(MiningError::ZeroMaxLength);
        }
        Ok(())
    }
}

/// A correlated high-utility itemset.
#[derive(Debug, Clone, PartialEq)]
pub struct CohuiRecord {
    pub itemset: Itemset,
    pub utility: Money,
    pub support: usize,
    pub kulc: f64,
}

impl CohuiRecord {
    /// `<items> #UTIL: <u> #SUP: <s> #KULC: <k>` with four decimals.
    pub fn to_output_line(&self) -> String {
        format!(
            "{} #UTIL: {} #SUP: {} #KULC: {:.4}",
            self.itemset, self.utility, self.support, self.kulc
        )
    }
}

/// Sorts records by length, then lexicographically.
pub fn sort_records(records: &mut [CohuiRecord]) {
    records.sort_by(|a, b| a.itemset.canonical_cmp(&b.itemset));
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakMemory {
    pub bytes: u64,
    /// Where the figure came from, e.g. `rss-vmhwm` or `alloc-hwm`.
    pub source: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MiningStats {
    /// Number of projections made from the search, one per child itemset.
    pub candidates: u64,
    pub patterns: u64,
    pub nodes_pruned_by_kulc: u64,
    pub wall_time: Duration,
    /// Absolute utility threshold used.
    pub threshold: f64,
    /// Left empty by the library; front ends fill it when they can measure.
    pub peak_memory: Option<PeakMemory>,
}

#[derive(Debug, Clone, Default)]
pub struct MiningOutcome {
    pub records: Vec<CohuiRecord>,
    pub stats: MiningStats,
}

/// One child itemset examined by the search.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEvent<'a> {
    /// Original ids in search order.
    pub itemset: &'a [ItemId],
    pub utility: Money,
    pub support: usize,
    /// `None` when the itemset never occurs.
    pub kulc: Option<f64>,
    pub emitted: bool,
    pub pruned_by_kulc: bool,
}

pub trait SearchObserver {
    fn candidate(&mut self, event: &CandidateEvent<'_>);
}

impl SearchObserver for () {
    fn candidate(&mut self, _: &CandidateEvent<'_>) {}
}

/// Mean of `support / s` over the member supports `s`.
pub fn kulc(support: usize, member_supports: &[usize]) -> Result<f64, MiningError> {
    if member_supports.is_empty() {
        return Err(MiningError::NoMembers);
    }
    let mut members = member_supports.to_vec();
    // a fixed summation order keeps the value independent of item order
    members.sort_unstable();
    let mut sum = 0.0;
    for &m in &members {
        if m == 0 {
            return Err(MiningError::ZeroSupport);
        }
        if support > m {
            return Err(MiningError::SupportExceedsMember { support, member: m });
        }
        sum += support as f64 / m as f64;
    }
    Ok(sum / members.len() as f64)
}

/// Pushes every `secondary` singleton with `u({i}) >= threshold`, Kulc 1.
pub fn emit_singletons(
    odb: &OrderedDatabase,
    secondary: &[Rank],
    threshold: f64,
    sink: &mut Vec<CohuiRecord>,
) {
    for &r in secondary {
        let utility = odb.singleton_utilities()[r as usize];
        if utility as f64 >= threshold {
            sink.push(CohuiRecord {
                itemset: Itemset::new(vec![odb.order().item_at(r)]),
                utility,
                support: odb.singleton_supports()[r as usize] as usize,
                kulc: 1.0,
            });
        }
    }
}

pub fn mine(db: &Database, params: &MiningParams) -> Result<MiningOutcome, MiningError> {
    mine_observed(db, params, &mut ())
}

/// [`mine`], reporting every examined child itemset to `observer`.
pub fn mine_observed(
    db: &Database,
    params: &MiningParams,
    observer: &mut dyn SearchObserver,
) -> Result<MiningOutcome, MiningError> {
    params.validate()?;
    let start = Instant::now();
    let threshold = params.min_util.threshold(db.total_utility());
    let (_, odb) = prepare(db, threshold);

    let secondary: Vec<Rank> = (0..odb.num_items() as Rank).collect();
    let mut records = Vec::new();
    emit_singletons(&odb, &secondary, threshold, &mut records);

    let primary = match params.bounds_mode {
        BoundsMode::LuSu => compute_primary_root(&odb, threshold),
        BoundsMode::TwuOnly => secondary.clone(),
    };

    let mut searcher = Searcher {
        odb: &odb,
        params,
        threshold,
        lu: UtilityBinArray::new(odb.num_items()),
        su: UtilityBinArray::new(odb.num_items()),
        mask: ItemMask::new(odb.num_items()),
        prefix: Vec::new(),
        prefix_items: Vec::new(),
        records,
        stats: MiningStats::default(),
        observer,
    };
    searcher.search(&root_view(&odb), &primary, &secondary)?;

    let Searcher {
        mut records,
        mut stats,
        ..
    } = searcher;
    sort_records(&mut records);
    stats.patterns = records.len() as u64;
    stats.threshold = threshold;
    stats.wall_time = start.elapsed();
    Ok(MiningOutcome { records, stats })
}

struct Searcher<'a, 'o> {
    odb: &'a OrderedDatabase,
    params: &'a MiningParams,
    threshold: f64,
    lu: UtilityBinArray,
    su: UtilityBinArray,
    mask: ItemMask,
    prefix: Vec<Rank>,
    prefix_items: Vec<ItemId>,
    records: Vec<CohuiRecord>,
    stats: MiningStats,
    observer: &'o mut dyn SearchObserver,
}

impl<'a> Searcher<'a, '_> {
    /// Expands every primary item of the prefix whose view is `view`.
    fn search(
        &mut self,
        view: &ProjectedView<'a>,
        primary: &[Rank],
        secondary: &[Rank],
    ) -> Result<(), MiningError> {
        for &item in primary {
            let ext = view.extend(item);
            self.stats.candidates += 1;
            self.prefix.push(item);
            self.prefix_items.push(self.odb.order().item_at(item));
            let res = self.visit(item, ext, secondary);
            self.prefix.pop();
            self.prefix_items.pop();
            res?;
        }
        Ok(())
    }

    fn visit(
        &mut self,
        item: Rank,
        ext: Extension<'a>,
        secondary: &[Rank],
    ) -> Result<(), MiningError> {
        if ext.support == 0 {
            self.observer.candidate(&CandidateEvent {
                itemset: &self.prefix_items,
                utility: 0,
                support: 0,
                kulc: None,
                emitted: false,
                pruned_by_kulc: false,
            });
            return Ok(());
        }

        let supports: Vec<usize> = self
            .prefix
            .iter()
            .map(|&r| self.odb.singleton_supports()[r as usize] as usize)
            .collect();
        let k = kulc(ext.support, &supports)?;
        // singletons were already emitted at the root
        let emitted = self.prefix.len() > 1
            && ext.utility as f64 >= self.threshold
            && k >= self.params.min_cor;
        let pruned = self.params.kulc_mode == KulcMode::Prune && k < self.params.min_cor;
        self.observer.candidate(&CandidateEvent {
            itemset: &self.prefix_items,
            utility: ext.utility,
            support: ext.support,
            kulc: Some(k),
            emitted,
            pruned_by_kulc: pruned,
        });
        if emitted {
            self.records.push(CohuiRecord {
                itemset: Itemset::new(self.prefix_items.clone()),
                utility: ext.utility,
                support: ext.support,
                kulc: k,
            });
        }
        if pruned {
            self.stats.nodes_pruned_by_kulc += 1;
            return Ok(());
        }
        if self
            .params
            .max_pattern_length
            .is_some_and(|max| self.prefix.len() >= max)
        {
            return Ok(());
        }

        let candidates: Vec<Rank> = secondary.iter().copied().filter(|&r| r > item).collect();
        if candidates.is_empty() {
            return Ok(());
        }
        self.mask.set(&candidates);
        let part = match self.params.bounds_mode {
            BoundsMode::LuSu => {
                compute_lu(&ext.view, &self.mask, &mut self.lu);
                compute_su(&ext.view, &self.mask, &mut self.su);
                partition(&self.lu, &self.su, &candidates, self.threshold)?
            }
            BoundsMode::TwuOnly => {
                compute_twu(&ext.view, &self.mask, &mut self.lu);
                partition(&self.lu, &self.lu, &candidates, self.threshold)?
            }
        };
        if part.primary.is_empty() {
            return Ok(());
        }
        self.search(&ext.view, &part.primary, &part.secondary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixtures::*;
    use crate::dataset::Transaction;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn kulc_values() {
        assert!(close(kulc(3, &[5, 5]).unwrap(), 0.6));
        assert_eq!(kulc(4, &[4]).unwrap(), 1.0);
        let v = kulc(4, &[5, 7, 5]).unwrap();
        assert!(close(v, (0.8 + 4.0 / 7.0 + 0.8) / 3.0));
        assert!(close(v, 0.723_809_523_809_523_8));
        assert_eq!(kulc(1, &[0, 3]), Err(MiningError::ZeroSupport));
        assert_eq!(kulc(1, &[]), Err(MiningError::NoMembers));
        assert_eq!(
            kulc(4, &[3]),
            Err(MiningError::SupportExceedsMember { support: 4, member: 3 })
        );
        // member order does not change the bits
        assert_eq!(kulc(2, &[7, 3, 5]).unwrap(), kulc(2, &[5, 7, 3]).unwrap());
    }

    #[test]
    fn params_validation() {
        assert!(MiningParams::new(0.2, 0.3).validate().is_ok());
        assert_eq!(
            MiningParams::new(1.5, 0.3).validate(),
            Err(MiningError::MinUtilOutOfRange(1.5))
        );
        assert_eq!(
            MiningParams::new(0.2, 1.1).validate(),
            Err(MiningError::MinCorOutOfRange(1.1))
        );
        assert!(MiningParams::new(-0.1, 0.3).validate().is_err());
        assert!(MiningParams::new(0.1, 0.3).with_max_length(Some(0)).validate().is_err());
        let abs = MiningParams {
            min_util: MinUtil::Absolute(500),
            ..MiningParams::new(0.0, 0.0)
        };
        assert!(abs.validate().is_ok());
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [KulcMode::Prune, KulcMode::Postfilter] {
            assert_eq!(m.to_string().parse::<KulcMode>().unwrap(), m);
        }
        for m in [BoundsMode::LuSu, BoundsMode::TwuOnly] {
            assert_eq!(m.to_string().parse::<BoundsMode>().unwrap(), m);
        }
        assert!("fast".parse::<BoundsMode>().is_err());
    }

    #[test]
    fn singletons_at_the_root() {
        let db = running_db();
        let (_, odb) = prepare(&db, 0.0);
        let all: Vec<Rank> = (0..6).collect();
        let mut sink = Vec::new();
        emit_singletons(&odb, &all, 33.4, &mut sink);
        let got: Vec<String> = sink.iter().map(|r| r.itemset.to_string()).collect();
        let mut got = got;
        got.sort();
        assert_eq!(got, vec!["1", "4"]);

        sink.clear();
        emit_singletons(&odb, &all, 52.0, &mut sink);
        assert!(sink.is_empty());
        emit_singletons(&odb, &all, 0.0, &mut sink);
        assert_eq!(sink.len(), 6);
        assert!(sink.iter().all(|r| r.kulc == 1.0));
    }

    fn lines(outcome: &MiningOutcome) -> Vec<(String, Money)> {
        outcome
            .records
            .iter()
            .map(|r| (r.itemset.to_string(), r.utility))
            .collect()
    }

    #[test]
    fn running_db_end_to_end() {
        let db = running_db();
        let out = mine(&db, &MiningParams::new(0.2, 0.5)).unwrap();
        let expect: Vec<(String, Money)> = [
            ("1", 44),
            ("4", 51),
            ("1 3", 45),
            ("1 5", 48),
            ("2 4", 60),
            ("3 4", 64),
            ("2 3 4", 71),
        ]
        .iter()
        .map(|&(s, u)| (s.to_string(), u))
        .collect();
        assert_eq!(lines(&out), expect);
        assert_eq!(out.stats.patterns, 7);

        let out = mine(&db, &MiningParams::new(0.2, 0.3)).unwrap();
        assert_eq!(out.records.len(), 14);
        assert_eq!(
            out.records[0].to_output_line(),
            "1 #UTIL: 44 #SUP: 5 #KULC: 1.0000"
        );
        let bcd = out
            .records
            .iter()
            .find(|r| r.itemset == Itemset::from([B, C, D]))
            .unwrap();
        assert_eq!(bcd.to_output_line(), "2 3 4 #UTIL: 71 #SUP: 4 #KULC: 0.7238");

        assert!(mine(&db, &MiningParams::new(1.0, 0.0)).unwrap().records.is_empty());
    }

    #[test]
    fn empty_and_unreachable() {
        let out = mine(&Database::default(), &MiningParams::new(0.2, 0.3)).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.stats.candidates, 0);
        let abs = MiningParams {
            min_util: MinUtil::Absolute(168),
            ..MiningParams::new(0.0, 0.0)
        };
        assert!(mine(&running_db(), &abs).unwrap().records.is_empty());
    }

    #[derive(Default)]
    struct Trace(Vec<(Vec<ItemId>, Money, bool, bool)>);

    impl SearchObserver for Trace {
        fn candidate(&mut self, e: &CandidateEvent<'_>) {
            self.0
                .push((e.itemset.to_vec(), e.utility, e.emitted, e.pruned_by_kulc));
        }
    }

    #[test]
    fn children_of_a() {
        let mut trace = Trace::default();
        let params = MiningParams::new(0.2, 0.3).with_kulc_mode(KulcMode::Postfilter);
        mine_observed(&running_db(), &params, &mut trace).unwrap();
        let under_a: Vec<_> = trace
            .0
            .iter()
            .filter(|(x, ..)| x.len() == 2 && x[0] == A)
            .cloned()
            .collect();
        assert_eq!(
            under_a,
            vec![(vec![A, D], 26, false, false), (vec![A, C], 45, true, false)]
        );
    }

    #[test]
    fn kulc_pruning_cuts_subtrees() {
        // {1,2} co-occur once, each appears 4 times: Kulc = 0.25; item 4 is
        // everywhere and ranks last, so {1,2} has a child
        let mut rows = vec![Transaction::new(1, vec![(1, 10), (2, 10), (3, 10), (4, 50)])];
        for t in 0..3 {
            rows.push(Transaction::new(2 + t, vec![(1, 10), (4, 50)]));
            rows.push(Transaction::new(5 + t, vec![(2, 10), (4, 50)]));
        }
        let db = Database::new(rows);
        let base = MiningParams {
            min_util: MinUtil::Absolute(1),
            ..MiningParams::new(0.0, 0.3)
        };
        let mut pruned = Trace::default();
        let p = mine_observed(&db, &base.clone().with_kulc_mode(KulcMode::Prune), &mut pruned)
            .unwrap();
        let mut full = Trace::default();
        let f = mine_observed(&db, &base.with_kulc_mode(KulcMode::Postfilter), &mut full)
            .unwrap();
        assert!(p.stats.nodes_pruned_by_kulc > 0);
        assert!(p.stats.candidates < f.stats.candidates);
        for (x, _, _, was_pruned) in &pruned.0 {
            if *was_pruned {
                assert!(!pruned.0.iter().any(|(y, ..)| y.len() > x.len() && y.starts_with(x)));
            }
        }
    }

    #[test]
    fn max_length_caps_depth() {
        let params = MiningParams::new(0.0, 0.0).with_max_length(Some(2));
        let out = mine(&running_db(), &params).unwrap();
        assert!(out.records.iter().all(|r| r.itemset.len() <= 2));
        assert!(out.records.iter().any(|r| r.itemset.len() == 2));
    }

    #[test]
    fn twu_only_never_expands_less() {
        let db = running_db();
        for (u, c) in [(0.05, 0.0), (0.1, 0.3), (0.2, 0.3), (0.3, 0.5)] {
            let a = mine(&db, &MiningParams::new(u, c)).unwrap();
            let b = mine(&db, &MiningParams::new(u, c).with_bounds_mode(BoundsMode::TwuOnly))
                .unwrap();
            assert!(a.stats.candidates <= b.stats.candidates);
            assert_eq!(a.records, b.records);
        }
    }
}
