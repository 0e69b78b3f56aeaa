#![allow(dead_code)]

use coium::{load_database, Database, ItemId, LoadOptions, Transaction};
use rand::Rng;

pub const A: ItemId = 1;
pub const B: ItemId = 2;
pub const C: ItemId = 3;
pub const D: ItemId = 4;
pub const E: ItemId = 5;
pub const F: ItemId = 6;

/// The running example: quantities times unit profits (A 4, B 2, C 1, D 3, E 2, F 1).
pub const RUNNING: &str = "\
1 2 3 4:19:4 4 2 9
1 2 5 6:18:8 2 6 2
1 3 5:23:16 3 4
1 3 6:17:12 2 3
2 3 4:25:6 4 15
2 3 4 6:21:4 3 9 5
1 2 3 4 5 6:31:4 4 2 9 10 2
3 4 5:13:2 9 2
";

pub fn running_db() -> Database {
    load_database(RUNNING.as_bytes(), &LoadOptions::default()).unwrap()
}

/// Up to `max_items` items, up to `max_tx` transactions, utilities in 1..=`max_util`.
pub fn random_db<R: Rng>(rng: &mut R, max_items: u32, max_tx: usize, max_util: u64) -> Database {
    let n_items = rng.gen_range(1..=max_items);
    let n_tx = rng.gen_range(1..=max_tx);
    let transactions = (0..n_tx)
        .map(|t| {
            let mut entries: Vec<(ItemId, u64)> = Vec::new();
            for i in 1..=n_items {
                if rng.gen_bool(0.45) {
                    entries.push((i, rng.gen_range(1..=max_util)));
                }
            }
            if entries.is_empty() {
                entries.push((rng.gen_range(1..=n_items), rng.gen_range(1..=max_util)));
            }
            Transaction::new(t as u32 + 1, entries)
        })
        .collect();
    Database::new(transactions)
}
