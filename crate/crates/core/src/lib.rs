//! Mining of correlated high-utility itemsets (CoHUIs).
//!
//! An itemset is a CoHUI when its utility reaches `min_util × TU` and its
//! Kulczynski correlation reaches `min_cor`. The miner explores itemsets
//! depth-first in TWU-ascending order over projected databases, bounding
//! each branch with local and subtree utilities kept in utility-bin arrays.
//!
//! ```
//! use coium::{load_database, mine, LoadOptions, MiningParams};
//!
//! let text = "1 2:10:4 6\n1 3:9:5 4\n2 3:6:2 4\n";
//! let db = load_database(text.as_bytes(), &LoadOptions::default()).unwrap();
//! let out = mine(&db, &MiningParams::new(0.3, 0.5)).unwrap();
//! for rec in &out.records {
//!     println!("{}", rec.to_output_line());
//! }
//! assert_eq!(out.records[0].to_output_line(), "1 #UTIL: 9 #SUP: 2 #KULC: 1.0000");
//! ```
//!
//! The guide under `book/` walks through each stage; its code samples are
//! compiled as doc tests of this crate.

pub mod bounds;
pub mod dataset;
pub mod miner;
pub mod oracle;
pub mod preprocess;
pub mod projection;
pub mod synth;

pub use dataset::{
    itemset_support, itemset_utility, load_database, parse_spmf_line, Database, ItemId, Itemset,
    LoadError, LoadOptions, Money, ParseError, Transaction,
};
pub use miner::{
    kulc, mine, mine_observed, BoundsMode, CohuiRecord, KulcMode, MinUtil, MiningError,
    MiningOutcome, MiningParams, MiningStats, PeakMemory,
};
pub use oracle::{compare, enumerate_all, DiffReport, OracleCaps, OracleError, OracleResult};
pub use preprocess::{OrderedDatabase, Rank};
pub use synth::{generate, DensityProfile, SynthSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/data.md")]
    pub struct Data;
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub struct Bounds;
    #[doc = include_str!("../../../book/src/projection.md")]
    pub struct Projection;
    #[doc = include_str!("../../../book/src/correlation.md")]
    pub struct Correlation;
    #[doc = include_str!("../../../book/src/verification.md")]
    pub struct Verification;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
