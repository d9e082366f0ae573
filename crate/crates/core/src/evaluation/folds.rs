//! Per-user k-fold partitioning of rating data.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::profiles::Rating;

/// A deterministic per-user partition of ratings into `n_folds` folds.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    pub seed: u64,
    pub n_folds: usize,
    /// Per user, `n_folds` disjoint groups of that user's ratings.
    folds: BTreeMap<String, Vec<Vec<Rating>>>,
    /// Users dropped because they have fewer ratings than folds.
    pub excluded: Vec<String>,
}

impl FoldPlan {
    /// Users that survived the minimum-ratings precondition.
    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.folds.keys().map(String::as_str)
    }

    /// One user's training and test ratings for the given fold index.
    pub fn split(&self, user_id: &str, fold: usize) -> Option<(Vec<&Rating>, Vec<&Rating>)> {
        let folds = self.folds.get(user_id)?;
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, group) in folds.iter().enumerate() {
            if i == fold {
                test.extend(group.iter());
            } else {
                train.extend(group.iter());
            }
        }
        Some((train, test))
    }

    /// All folds of one user (test sets, in fold order).
    pub fn user_folds(&self, user_id: &str) -> Option<&[Vec<Rating>]> {
        self.folds.get(user_id).map(Vec::as_slice)
    }
}

/// FNV-1a, pinned here so fold assignment never depends on the standard
/// library's hasher.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Shuffles each user's ratings with a seed derived from the global seed
/// and the user id, then deals them into `n_folds` near-equal folds (the
/// first `n mod n_folds` folds receive one extra rating).
///
/// Users with fewer than `n_folds` ratings cannot populate every fold;
/// they are excluded and reported in [`FoldPlan::excluded`].
pub fn make_folds(ratings: &[Rating], n_folds: usize, seed: u64) -> Result<FoldPlan> {
    if n_folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {n_folds}")));
    }
    let mut by_user: BTreeMap<String, Vec<Rating>> = BTreeMap::new();
    for r in ratings {
        by_user.entry(r.user_id.clone()).or_default().push(r.clone());
    }
    let mut folds = BTreeMap::new();
    let mut excluded = Vec::new();
    for (user_id, mut user_ratings) in by_user {
        if user_ratings.len() < n_folds {
            excluded.push(user_id);
            continue;
        }
        // Canonical order before shuffling makes the plan independent of
        // the input ordering of the ratings file.
        user_ratings.sort_by(|a, b| a.item_id.cmp(&b.item_id));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(user_id.as_bytes()));
        user_ratings.shuffle(&mut rng);

        let n = user_ratings.len();
        let base = n / n_folds;
        let extra = n % n_folds;
        let mut groups = Vec::with_capacity(n_folds);
        let mut it = user_ratings.into_iter();
        for i in 0..n_folds {
            let size = base + usize::from(i < extra);
            groups.push(it.by_ref().take(size).collect());
        }
        folds.insert(user_id, groups);
    }
    Ok(FoldPlan {
        seed,
        n_folds,
        folds,
        excluded,
    })
}
