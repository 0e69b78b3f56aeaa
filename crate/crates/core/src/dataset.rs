//! Quantitative transaction databases and the SPMF transaction-utility text format.
//!
//! The unit of record is the per-item utility `u(i, T)`: a line such as
//! `1 2 3:19:4 4 11` stores the utilities 4, 4 and 11 directly, exactly like
//! the files distributed with SPMF. Databases described by quantities and a
//! profit table can be built with [`Database::from_quantities`], which
//! pre-multiplies.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Integer currency units.
pub type Money = u64;

/// Original (external) item identifier.
pub type ItemId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("expected 3 colon-separated fields, found {0}")]
    FieldCount(usize),
    #[error("not a non-negative integer: {0:?}")]
    BadInteger(String),
    #[error("{items} items but {utilities} utilities")]
    CountMismatch { items: usize, utilities: usize },
    #[error("declared transaction utility {declared} but item utilities sum to {computed}")]
    TuMismatch { declared: Money, computed: Money },
    #[error("item {0} appears more than once")]
    DuplicateItem(ItemId),
    #[error("transaction has no items")]
    Empty,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {source}")]
    Line { line: usize, source: ParseError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Knobs for [`load_database`] and [`parse_spmf_line`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Sum the utilities of an item repeated within a line instead of rejecting it.
    pub merge_duplicates: bool,
    /// Ignore the declared transaction utility and use the sum of item utilities.
    pub trust_sum: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tid: u32,
    /// `(item, u(item, T))` in the order they were loaded.
    pub entries: Vec<(ItemId, Money)>,
    pub tu: Money,
}

impl Transaction {
    /// Builds a transaction, computing `tu` from the entries.
    pub fn new(tid: u32, entries: Vec<(ItemId, Money)>) -> Self {
        let tu = entries.iter().map(|&(_, u)| u).sum();
        Transaction { tid, entries, tu }
    }

    pub fn utility_of(&self, item: ItemId) -> Option<Money> {
        self.entries.iter().find(|&&(i, _)| i == item).map(|&(_, u)| u)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.entries.iter().any(|&(i, _)| i == item)
    }

    /// Renders the transaction as one SPMF line (no trailing newline).
    pub fn to_spmf_line(&self) -> String {
        let items = self.entries.iter().map(|(i, _)| i.to_string()).collect::<Vec<_>>();
        let utils = self.entries.iter().map(|(_, u)| u.to_string()).collect::<Vec<_>>();
        format!("{}:{}:{}", items.join(" "), self.tu, utils.join(" "))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Database {
    transactions: Vec<Transaction>,
    total_utility: Money,
}

impl Database {
    /// Takes ownership of `transactions`; tids are kept as given.
    pub fn new(transactions: Vec<Transaction>) -> Self {
        let total_utility = transactions.iter().map(|t| t.tu).sum();
        Database {
            transactions,
            total_utility,
        }
    }

    /// Builds a database from `(item, quantity)` rows and an external-utility
    /// table, numbering transactions from 1.
    ///
    /// Panics if an item has no profit entry.
    pub fn from_quantities(rows: &[&[(ItemId, u64)]], profits: &BTreeMap<ItemId, Money>) -> Self {
        let transactions = rows
            .iter()
            .enumerate()
            .map(|(idx, row)| {
                let entries = row
                    .iter()
                    .map(|&(item, qty)| {
                        let pr = profits
                            .get(&item)
                            .unwrap_or_else(|| panic!("no profit for item {item}"));
                        (item, qty * pr)
                    })
                    .collect();
                Transaction::new(idx as u32 + 1, entries)
            })
            .collect();
        Database::new(transactions)
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// TU, the sum of all transaction utilities.
    pub fn total_utility(&self) -> Money {
        self.total_utility
    }

    /// Distinct items, ascending.
    pub fn items(&self) -> Vec<ItemId> {
        let mut items: Vec<ItemId> = self
            .transactions
            .iter()
            .flat_map(|t| t.entries.iter().map(|&(i, _)| i))
            .collect();
        items.sort_unstable();
        items.dedup();
        items
    }

    /// Keeps the first `n` transactions.
    pub fn truncated(&self, n: usize) -> Database {
        Database::new(self.transactions.iter().take(n).cloned().collect())
    }

    /// Writes every transaction as one SPMF line.
    pub fn write_spmf<W: Write>(&self, mut out: W) -> io::Result<()> {
        for t in &self.transactions {
            writeln!(out, "{}", t.to_spmf_line())?;
        }
        Ok(())
    }
}

/// A set of items in ascending original-id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    pub fn new(mut items: Vec<ItemId>) -> Self {
        items.sort_unstable();
        items.dedup();
        Itemset(items)
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|i| other.0.binary_search(i).is_ok())
    }

    /// Canonical output order: shorter first, then lexicographic.
    pub fn canonical_cmp(&self, other: &Itemset) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl From<&[ItemId]> for Itemset {
    fn from(items: &[ItemId]) -> Self {
        Itemset::new(items.to_vec())
    }
}

impl<const N: usize> From<[ItemId; N]> for Itemset {
    fn from(items: [ItemId; N]) -> Self {
        Itemset::new(items.to_vec())
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

fn parse_int(token: &str) -> Result<u64, ParseError> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::BadInteger(token.to_string()));
    }
    token
        .parse()
        .map_err(|_| ParseError::BadInteger(token.to_string()))
}

fn parse_list(field: &str) -> Result<Vec<u64>, ParseError> {
    field.split(' ').map(parse_int).collect()
}

/// Parses one `<items>:<tu>:<utilities>` line.
pub fn parse_spmf_line(line: &str, tid: u32, opts: &LoadOptions) -> Result<Transaction, ParseError> {
    let fields: Vec<&str> = line.split(':').collect();
    if fields.len() != 3 {
        return Err(ParseError::FieldCount(fields.len()));
    }
    if fields[0].is_empty() {
        return Err(ParseError::Empty);
    }
    let items = parse_list(fields[0])?;
    let declared = parse_int(fields[1])?;
    let utils = parse_list(fields[2])?;
    if items.len() != utils.len() {
        return Err(ParseError::CountMismatch {
            items: items.len(),
            utilities: utils.len(),
        });
    }

    let mut entries: Vec<(ItemId, Money)> = Vec::with_capacity(items.len());
    for (&item, &u) in items.iter().zip(&utils) {
        let item = ItemId::try_from(item).map_err(|_| ParseError::BadInteger(item.to_string()))?;
        match entries.iter_mut().find(|(i, _)| *i == item) {
            Some(entry) if opts.merge_duplicates => entry.1 += u,
            Some(_) => return Err(ParseError::DuplicateItem(item)),
            None => entries.push((item, u)),
        }
    }

    let t = Transaction::new(tid, entries);
    if !opts.trust_sum && t.tu != declared {
        return Err(ParseError::TuMismatch {
            declared,
            computed: t.tu,
        });
    }
    Ok(t)
}

/// Reads a whole SPMF file. Blank lines are skipped; tids count non-blank
/// lines from 1 and errors carry the physical line number.
pub fn load_database<R: BufRead>(source: R, opts: &LoadOptions) -> Result<Database, LoadError> {
    let mut transactions = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let tid = transactions.len() as u32 + 1;
        let t = parse_spmf_line(line, tid, opts).map_err(|source| LoadError::Line {
            line: idx + 1,
            source,
        })?;
        transactions.push(t);
    }
    Ok(Database::new(transactions))
}

/// `u(X)`: summed utility of `x` over the transactions containing all of it.
pub fn itemset_utility(x: &Itemset, db: &Database) -> Money {
    db.transactions()
        .iter()
        .filter_map(|t| {
            x.items()
                .iter()
                .map(|&i| t.utility_of(i))
                .sum::<Option<Money>>()
        })
        .sum()
}

/// `sup(X)`: number of transactions containing every item of `x`.
pub fn itemset_support(x: &Itemset, db: &Database) -> usize {
    db.transactions()
        .iter()
        .filter(|t| x.items().iter().all(|&i| t.contains(i)))
        .count()
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn parses_a_plain_line() {
        let t = parse_spmf_line("1 2 3:19:4 4 11", 1, &LoadOptions::default()).unwrap();
        assert_eq!(t.tid, 1);
        assert_eq!(t.entries, vec![(1, 4), (2, 4), (3, 11)]);
        assert_eq!(t.tu, 19);
    }

    #[test]
    fn running_db_first_transaction() {
        let t = parse_spmf_line("1 2 3 4:19:4 4 2 9", 1, &LoadOptions::default()).unwrap();
        assert_eq!(t.tu, 19);
        assert_eq!(t.utility_of(A), Some(4));
        assert_eq!(t.utility_of(D), Some(9));
    }

    #[test]
    fn quantities_times_profits_match_the_spmf_encoding() {
        let profits: BTreeMap<ItemId, Money> =
            [(A, 4), (B, 2), (C, 1), (D, 3), (E, 2), (F, 1)].into_iter().collect();
        let rows: [&[(ItemId, u64)]; 8] = [
            &[(A, 1), (B, 2), (C, 2), (D, 3)],
            &[(A, 2), (B, 1), (E, 3), (F, 2)],
            &[(A, 4), (C, 3), (E, 2)],
            &[(A, 3), (C, 2), (F, 3)],
            &[(B, 3), (C, 4), (D, 5)],
            &[(B, 2), (C, 3), (D, 3), (F, 5)],
            &[(A, 1), (B, 2), (C, 2), (D, 3), (E, 5), (F, 2)],
            &[(C, 2), (D, 3), (E, 1)],
        ];
        assert_eq!(Database::from_quantities(&rows, &profits), running_db());
    }

    #[test]
    fn parse_errors() {
        let o = LoadOptions::default();
        assert_eq!(
            parse_spmf_line("1 2:10:4", 1, &o),
            Err(ParseError::CountMismatch { items: 2, utilities: 1 })
        );
        assert_eq!(parse_spmf_line("1 2:10", 1, &o), Err(ParseError::FieldCount(2)));
        assert_eq!(
            parse_spmf_line("1 x:10:4 6", 1, &o),
            Err(ParseError::BadInteger("x".into()))
        );
        assert_eq!(
            parse_spmf_line("1 2:10:4 -6", 1, &o),
            Err(ParseError::BadInteger("-6".into()))
        );
        // double space yields an empty token
        assert!(matches!(
            parse_spmf_line("1  2:10:4 6", 1, &o),
            Err(ParseError::BadInteger(_))
        ));
        assert_eq!(
            parse_spmf_line("1 2:11:4 6", 1, &o),
            Err(ParseError::TuMismatch { declared: 11, computed: 10 })
        );
        assert_eq!(parse_spmf_line("1 1:10:4 6", 1, &o), Err(ParseError::DuplicateItem(1)));
    }

    #[test]
    fn lenient_flags() {
        let o = LoadOptions { merge_duplicates: true, trust_sum: true };
        let t = parse_spmf_line("1 1 2:99:4 6 1", 3, &o).unwrap();
        assert_eq!(t.entries, vec![(1, 10), (2, 1)]);
        assert_eq!(t.tu, 11);
    }

    #[test]
    fn load_running_db() {
        let db = running_db();
        assert_eq!(db.len(), 8);
        assert_eq!(db.total_utility(), 167);
        let tids: Vec<u32> = db.transactions().iter().map(|t| t.tid).collect();
        assert_eq!(tids, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn load_without_t7() {
        let text: String = RUNNING_SPMF
            .lines()
            .enumerate()
            .filter(|&(i, _)| i != 6)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        let db = load_database(text.as_bytes(), &LoadOptions::default()).unwrap();
        let oracle: Money = db
            .transactions()
            .iter()
            .flat_map(|t| t.entries.iter().map(|e| e.1))
            .sum();
        assert_eq!(oracle, 136);
        assert_eq!(db.total_utility(), 136);
    }

    #[test]
    fn empty_and_blank_input() {
        let db = load_database("".as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(db.len(), 0);
        assert_eq!(db.total_utility(), 0);
        let db = load_database("\n1:3:3\n\n2:4:4\n".as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.transactions()[1].tid, 2);
    }

    #[test]
    fn load_error_reports_physical_line() {
        let err = load_database("1:3:3\n\n1 2:10:4\n".as_bytes(), &LoadOptions::default())
            .unwrap_err();
        match err {
            LoadError::Line { line, source } => {
                assert_eq!(line, 3);
                assert!(matches!(source, ParseError::CountMismatch { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn utility_and_support() {
        let db = running_db();
        assert_eq!(itemset_utility(&Itemset::from([A, B]), &db), 26);
        assert_eq!(itemset_utility(&Itemset::from([A]), &db), 44);
        assert_eq!(itemset_utility(&Itemset::from([B, C, D]), &db), 71);
        assert_eq!(itemset_support(&Itemset::from([C]), &db), 7);
        assert_eq!(itemset_support(&Itemset::from([A, B]), &db), 3);
        assert_eq!(itemset_support(&Itemset::from([A, B, C, D, E, F]), &db), 1);
        assert_eq!(itemset_utility(&Itemset::from([A, 99]), &db), 0);
    }

    #[test]
    fn serialize_reproduces_input() {
        let mut out = Vec::new();
        running_db().write_spmf(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), RUNNING_SPMF);
    }

    #[test]
    fn itemset_display_and_order() {
        let x = Itemset::new(vec![3, 1, 2, 1]);
        assert_eq!(x.to_string(), "1 2 3");
        assert!(Itemset::from([9]).canonical_cmp(&x).is_lt());
        assert!(Itemset::from([1, 2]).is_subset_of(&x));
    }
}
