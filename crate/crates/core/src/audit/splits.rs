use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One train/test partition of item indices, each side sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_fraction: f64,
    pub n_items: usize,
    pub splits: Vec<Split>,
}

/// Independent uniform shuffles of `0..n_items`, iteration `k` drawn from
/// ChaCha8 stream `k` under `seed`. The first `round(fraction·n)` shuffled
/// indices train, the rest test.
pub fn make_splits(
    n_items: usize,
    fraction: f64,
    n_iterations: usize,
    seed: u64,
) -> Result<SplitPlan> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction {fraction} must lie strictly between 0 and 1"
        )));
    }
    if n_items < 2 {
        return Err(Error::invalid("splitting needs at least two items"));
    }
    let n_train = (fraction * n_items as f64).round() as usize;
    if n_train == 0 || n_train == n_items {
        return Err(Error::invalid(format!(
            "train fraction {fraction} of {n_items} items leaves an empty train or test set"
        )));
    }
    let splits = (0..n_iterations)
        .map(|k| split_for(n_items, n_train, seed, k as u64))
        .collect();
    Ok(SplitPlan {
        seed,
        train_fraction: fraction,
        n_items,
        splits,
    })
}

fn split_for(n: usize, n_train: usize, seed: u64, iteration: u64) -> Split {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Split { train, test }
}
