//! Accuracy, ranking and error metrics over recommendation lists.
//!
//! All metrics are computed per user and macro-averaged. Relevance is
//! judged on the true test ratings: an item is relevant when its rating
//! exceeds the threshold, whether or not the algorithm could predict it
//! (an unpredictable relevant item therefore costs recall). Error
//! metrics run over every predicted test pair; a user with no
//! predictable pair contributes no error sample at all rather than a
//! fake zero.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::Rating;
use crate::recommender::{recommend_top_k, Prediction};
use crate::util;

/// One user's metrics on one test set.
#[derive(Debug, Clone, PartialEq)]
pub struct UserMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub ap: f64,
    pub rr: f64,
    /// `None` when the user had no predictable test pair.
    pub mae: Option<f64>,
    pub rmse: Option<f64>,
    /// Whether the recommendation list was non-empty.
    pub covered: bool,
}

/// Macro-averaged metrics for one algorithm configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub map: f64,
    pub mrr: f64,
    pub mae: f64,
    pub rmse: f64,
    pub coverage: f64,
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Metrics for a single user: `test` holds the user's true test ratings,
/// `predictions` the predicted values for that user's predictable test
/// items.
pub fn user_metrics(
    test: &[&Rating],
    predictions: &[Prediction],
    k: usize,
    threshold: f64,
) -> UserMetrics {
    let relevant: BTreeSet<&str> = test
        .iter()
        .filter(|r| f64::from(r.value) > threshold)
        .map(|r| r.item_id.as_str())
        .collect();
    let recomm = recommend_top_k(predictions, k, threshold);
    let hits = recomm.iter().filter(|id| relevant.contains(id.as_str())).count();

    let precision = if recomm.is_empty() {
        0.0
    } else {
        hits as f64 / recomm.len() as f64
    };
    let recall = if relevant.is_empty() {
        0.0
    } else {
        hits as f64 / relevant.len() as f64
    };

    // Truncated average precision: precision-at-hit summed over the
    // relevant ranks, over the number of relevant *predictable* items
    // capped at the list length.
    let predictable: BTreeSet<&str> = predictions.iter().map(|p| p.item_id.as_str()).collect();
    let reachable = relevant.iter().filter(|id| predictable.contains(**id)).count();
    let denom = reachable.min(k);
    let mut ap = 0.0;
    let mut rr = 0.0;
    let mut hits_so_far = 0usize;
    for (idx, id) in recomm.iter().enumerate() {
        if relevant.contains(id.as_str()) {
            hits_so_far += 1;
            ap += hits_so_far as f64 / (idx + 1) as f64;
            if rr == 0.0 {
                rr = 1.0 / (idx + 1) as f64;
            }
        }
    }
    ap = if denom == 0 { 0.0 } else { ap / denom as f64 };

    let truth: BTreeMap<&str, f64> = test
        .iter()
        .map(|r| (r.item_id.as_str(), f64::from(r.value)))
        .collect();
    let errors: Vec<f64> = predictions
        .iter()
        .filter_map(|p| truth.get(p.item_id.as_str()).map(|t| p.r_hat - t))
        .collect();
    let (mae, rmse) = if errors.is_empty() {
        (None, None)
    } else {
        let abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
        let sq = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
        (Some(util::mean(&abs)), Some(sq.sqrt()))
    };

    UserMetrics {
        precision,
        recall,
        f1: harmonic(precision, recall),
        ap,
        rr,
        mae,
        rmse,
        covered: !recomm.is_empty(),
    }
}

/// Macro-averages user samples into one row. Error metrics average over
/// the users that have them; everything else averages over all samples.
pub fn mean_row(samples: &[UserMetrics]) -> MetricsRow {
    let col = |f: fn(&UserMetrics) -> f64| -> Vec<f64> { samples.iter().map(f).collect() };
    let maes: Vec<f64> = samples.iter().filter_map(|s| s.mae).collect();
    let rmses: Vec<f64> = samples.iter().filter_map(|s| s.rmse).collect();
    MetricsRow {
        precision: util::mean(&col(|s| s.precision)),
        recall: util::mean(&col(|s| s.recall)),
        f1: util::mean(&col(|s| s.f1)),
        map: util::mean(&col(|s| s.ap)),
        mrr: util::mean(&col(|s| s.rr)),
        mae: util::mean(&maes),
        rmse: util::mean(&rmses),
        coverage: util::mean(&col(|s| if s.covered { 1.0 } else { 0.0 })),
    }
}

/// Computes the macro-averaged metrics row for one algorithm's
/// predictions against a test set (grouping both by user).
pub fn compute_metrics(
    test: &[Rating],
    predictions: &[Prediction],
    k: usize,
    threshold: f64,
) -> Result<MetricsRow> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let mut test_by_user: BTreeMap<&str, Vec<&Rating>> = BTreeMap::new();
    for r in test {
        test_by_user.entry(r.user_id.as_str()).or_default().push(r);
    }
    let mut preds_by_user: BTreeMap<&str, Vec<Prediction>> = BTreeMap::new();
    for p in predictions {
        preds_by_user
            .entry(p.user_id.as_str())
            .or_default()
            .push(p.clone());
    }
    let empty = Vec::new();
    let samples: Vec<UserMetrics> = test_by_user
        .iter()
        .map(|(user, ratings)| {
            let preds = preds_by_user.get(user).unwrap_or(&empty);
            user_metrics(ratings, preds, k, threshold)
        })
        .collect();
    Ok(mean_row(&samples))
}
