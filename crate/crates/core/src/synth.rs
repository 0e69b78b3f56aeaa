//! Seeded synthetic transaction databases.
//!
//! `Dense` draws items uniformly with lengths tightly spread around the
//! average; `Sparse` uses a skewed item popularity and Poisson lengths.
//! Output depends only on the [`SynthSpec`], and the ChaCha stream keeps it
//! identical across platforms.

use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Poisson};
use thiserror::Error;

use crate::dataset::{Database, ItemId, Money, Transaction};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DensityProfile {
    Sparse,
    #[default]
    Dense,
}

impl FromStr for DensityProfile {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sparse" => Ok(DensityProfile::Sparse),
            "dense" => Ok(DensityProfile::Dense),
            _ => Err(SynthError::UnknownProfile(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("average length {avg_length} exceeds the number of items {n_items}")]
    AvgLengthTooLarge { avg_length: f64, n_items: usize },
    #[error("average length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("need at least one item")]
    NoItems,
    #[error("unknown density profile {0:?}")]
    UnknownProfile(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_transactions: usize,
    pub n_items: usize,
    pub avg_length: f64,
    pub max_per_item_utility: Money,
    pub seed: u64,
    pub profile: DensityProfile,
}

impl SynthSpec {
    pub fn new(n_transactions: usize, n_items: usize, avg_length: f64, seed: u64) -> Self {
        SynthSpec {
            n_transactions,
            n_items,
            avg_length,
            max_per_item_utility: 50,
            seed,
            profile: DensityProfile::Dense,
        }
    }

    pub fn with_profile(mut self, profile: DensityProfile) -> Self {
        self.profile = profile;
        self
    }
}

const MAX_QUANTITY: u64 = 5;

pub fn generate(spec: &SynthSpec) -> Result<Database, SynthError> {
    if spec.n_items == 0 {
        return Err(SynthError::NoItems);
    }
    if spec.avg_length.is_nan() || spec.avg_length <= 0.0 {
        return Err(SynthError::NonPositiveLength(spec.avg_length));
    }
    if spec.avg_length > spec.n_items as f64 {
        return Err(SynthError::AvgLengthTooLarge {
            avg_length: spec.avg_length,
            n_items: spec.n_items,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let max_profit = (spec.max_per_item_utility / MAX_QUANTITY).max(1);
    let profits: Vec<Money> = (0..spec.n_items)
        .map(|_| rng.gen_range(1..=max_profit))
        .collect();
    let weights: Vec<f64> = (0..spec.n_items)
        .map(|i| match spec.profile {
            DensityProfile::Dense => 1.0,
            DensityProfile::Sparse => 1.0 / (i as f64 + 1.0).powf(0.8),
        })
        .collect();
    let popularity = WeightedIndex::new(&weights).expect("positive weights");

    let n = spec.n_items;
    let mut transactions = Vec::with_capacity(spec.n_transactions);
    for tid in 1..=spec.n_transactions {
        let len = match spec.profile {
            DensityProfile::Dense => {
                let p = spec.avg_length / n as f64;
                Binomial::new(n as u64, p).expect("p in [0, 1]").sample(&mut rng) as usize
            }
            DensityProfile::Sparse => {
                Poisson::new(spec.avg_length).expect("positive mean").sample(&mut rng) as usize
            }
        }
        .clamp(1, n);

        let mut items: Vec<usize> = match spec.profile {
            DensityProfile::Dense => sample(&mut rng, n, len).into_vec(),
            DensityProfile::Sparse => {
                let mut picked = vec![false; n];
                let mut out = Vec::with_capacity(len);
                while out.len() < len {
                    let i = popularity.sample(&mut rng);
                    if !picked[i] {
                        picked[i] = true;
                        out.push(i);
                    }
                }
                out
            }
        };
        items.sort_unstable();
        let entries = items
            .into_iter()
            .map(|i| {
                let q = rng.gen_range(1..=MAX_QUANTITY);
                ((i + 1) as ItemId, profits[i] * q)
            })
            .collect();
        transactions.push(Transaction::new(tid as u32, entries));
    }
    Ok(Database::new(transactions))
}
