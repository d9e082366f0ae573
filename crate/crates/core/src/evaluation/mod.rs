//! Offline evaluation: cross-validation, per-user grid search, metric
//! reports, α summaries and significance tests.
//!
//! The protocol: ratings are split per user into folds; on each fold the
//! Ind configurations fit their blend weight α per user by exhaustive
//! grid search maximizing MAP on the training portion, then every
//! algorithm is scored on the identical test portion. Metrics are
//! macro-averaged per user first (mean over folds), then across users.
//! The best configuration per metric is compared against the others with
//! a paired t-test over the per-user values.

mod folds;
mod metrics;
mod stats;

pub use folds::{make_folds, FoldPlan};
pub use metrics::{compute_metrics, mean_row, user_metrics, MetricsRow, UserMetrics};
pub use stats::{paired_t_test, TTest};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aggregation::Measure;
use crate::error::{Error, Result};
use crate::profiles::{load_items, load_ratings, load_users, ItemProfile, Rating, UserProfile};
use crate::recommender::{battery, predict, AlgorithmSpec, Family, Prediction};
use crate::util;

/// Experiment description, usually read from a TOML file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub items: PathBuf,
    pub features: PathBuf,
    pub users: PathBuf,
    pub ratings: PathBuf,
    pub algorithms: Vec<AlgorithmSpec>,
    pub grid_step: f64,
    pub seed: u64,
    pub k: usize,
    pub threshold: f64,
    pub n_folds: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    items: String,
    features: String,
    users: String,
    ratings: String,
    algorithms: Option<Vec<String>>,
    grid_step: Option<f64>,
    seed: Option<u64>,
    k: Option<usize>,
    threshold: Option<f64>,
    folds: Option<usize>,
}

impl ExperimentConfig {
    /// Parses TOML text; relative paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        let algorithms = match raw.algorithms {
            None => battery(),
            Some(keys) if keys.is_empty() => {
                return Err(Error::invalid("config: empty algorithm list"));
            }
            Some(keys) => keys
                .iter()
                .map(|k| AlgorithmSpec::parse_key(k))
                .collect::<Result<Vec<_>>>()?,
        };
        let config = ExperimentConfig {
            items: base_dir.join(raw.items),
            features: base_dir.join(raw.features),
            users: base_dir.join(raw.users),
            ratings: base_dir.join(raw.ratings),
            algorithms,
            grid_step: raw.grid_step.unwrap_or(0.05),
            seed: raw.seed.unwrap_or(7),
            k: raw.k.unwrap_or(5),
            threshold: raw.threshold.unwrap_or(3.0),
            n_folds: raw.folds.unwrap_or(5),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::invalid("config: empty algorithm list"));
        }
        if self.k == 0 {
            return Err(Error::invalid("config: k must be positive"));
        }
        if self.n_folds < 2 {
            return Err(Error::invalid("config: need at least 2 folds"));
        }
        build_grid(self.grid_step)?;
        Ok(())
    }

    /// The α grid induced by `grid_step`.
    pub fn grid(&self) -> Vec<f64> {
        build_grid(self.grid_step).expect("validated at construction")
    }
}

/// Builds the α grid {0, step, 2·step, …, 1}; the step must divide 1.
pub fn build_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::invalid(format!("grid step must lie in (0, 1], got {step}")));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("grid step {step} does not divide 1")));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Result of fitting α for one user on one training set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearchOutcome {
    pub alpha: f64,
    /// Training MAP achieved at `alpha` (0 when defaulted).
    pub train_map: f64,
    /// True when no training pair was predictable and α fell back to 0.5.
    pub defaulted: bool,
}

/// Exhaustively evaluates Ind over the α grid on the user's training
/// ratings and returns the MAP-maximizing value, ties resolved toward
/// the smallest α. A training set with no predictable pair cannot rank
/// anything; α then defaults to 0.5 and the outcome is flagged.
pub fn grid_search_alpha(
    user: &UserProfile,
    items: &BTreeMap<&str, &ItemProfile>,
    train: &[&Rating],
    measure: Measure,
    grid: &[f64],
    k: usize,
    threshold: f64,
) -> Result<GridSearchOutcome> {
    if grid.is_empty() || grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::invalid("alpha grid must be non-empty within [0,1]"));
    }
    let predictable: Vec<&ItemProfile> = train
        .iter()
        .filter_map(|r| items.get(r.item_id.as_str()).copied())
        .filter(|item| user.has_preference(item.category))
        .collect();
    if predictable.is_empty() {
        return Ok(GridSearchOutcome {
            alpha: 0.5,
            train_map: 0.0,
            defaulted: true,
        });
    }
    let mut best: Option<(f64, f64)> = None;
    for &alpha in grid {
        let spec = AlgorithmSpec::ind(measure, alpha)?;
        let preds: Vec<Prediction> = predictable
            .iter()
            .filter_map(|item| predict(&spec, user, item))
            .collect();
        let ap = user_metrics(train, &preds, k, threshold).ap;
        match best {
            Some((_, best_ap)) if ap <= best_ap => {}
            _ => best = Some((alpha, ap)),
        }
    }
    let (alpha, train_map) = best.expect("grid is non-empty");
    Ok(GridSearchOutcome {
        alpha,
        train_map,
        defaulted: false,
    })
}

/// One α fitted for one (algorithm, user, fold).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSelection {
    pub algorithm: String,
    pub user_id: String,
    pub fold: usize,
    pub alpha: f64,
    pub defaulted: bool,
}

/// Mean(sd) of the per-user α for one Ind configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub algorithm: String,
    pub mean: f64,
    pub sd: f64,
}

/// Per-user α selections collapsed per configuration: each user
/// contributes the mean of their per-fold α values, and the row reports
/// mean and population sd across users.
pub fn alpha_summary(selections: &[AlphaSelection]) -> Vec<AlphaRow> {
    let mut per_config: BTreeMap<&str, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for s in selections {
        per_config
            .entry(&s.algorithm)
            .or_default()
            .entry(&s.user_id)
            .or_default()
            .push(s.alpha);
    }
    per_config
        .into_iter()
        .map(|(algorithm, users)| {
            let per_user: Vec<f64> = users.values().map(|a| util::mean(a)).collect();
            AlphaRow {
                algorithm: algorithm.to_string(),
                mean: util::mean(&per_user),
                sd: util::population_sd(&per_user),
            }
        })
        .collect()
}

/// Metrics row labelled with its algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub algorithm: String,
    #[serde(flatten)]
    pub metrics: MetricsRow,
}

/// A best-vs-other comparison for one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub other: String,
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// Significance annotations for one metric column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceBlock {
    pub metric: String,
    pub best: String,
    pub comparisons: Vec<Comparison>,
}

/// Complete outcome of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub n_folds: usize,
    pub k: usize,
    pub threshold: f64,
    pub grid_points: usize,
    pub excluded_users: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub alpha: Vec<AlphaRow>,
    pub alpha_selections: Vec<AlphaSelection>,
    pub significance: Vec<SignificanceBlock>,
}

/// Per-user values after averaging over folds.
struct PerUser {
    precision: f64,
    recall: f64,
    f1: f64,
    map: f64,
    mrr: f64,
    mae: Option<f64>,
    rmse: Option<f64>,
    coverage: f64,
}

fn fold_mean(samples: &[UserMetrics]) -> PerUser {
    let col = |f: fn(&UserMetrics) -> f64| -> f64 {
        util::mean(&samples.iter().map(f).collect::<Vec<_>>())
    };
    let maes: Vec<f64> = samples.iter().filter_map(|s| s.mae).collect();
    let rmses: Vec<f64> = samples.iter().filter_map(|s| s.rmse).collect();
    PerUser {
        precision: col(|s| s.precision),
        recall: col(|s| s.recall),
        f1: col(|s| s.f1),
        map: col(|s| s.ap),
        mrr: col(|s| s.rr),
        mae: (!maes.is_empty()).then(|| util::mean(&maes)),
        rmse: (!rmses.is_empty()).then(|| util::mean(&rmses)),
        coverage: col(|s| if s.covered { 1.0 } else { 0.0 }),
    }
}

fn user_means_to_row(users: &BTreeMap<String, PerUser>) -> MetricsRow {
    let col = |f: fn(&PerUser) -> f64| -> Vec<f64> { users.values().map(f).collect() };
    let maes: Vec<f64> = users.values().filter_map(|u| u.mae).collect();
    let rmses: Vec<f64> = users.values().filter_map(|u| u.rmse).collect();
    MetricsRow {
        precision: util::mean(&col(|u| u.precision)),
        recall: util::mean(&col(|u| u.recall)),
        f1: util::mean(&col(|u| u.f1)),
        map: util::mean(&col(|u| u.map)),
        mrr: util::mean(&col(|u| u.mrr)),
        mae: util::mean(&maes),
        rmse: util::mean(&rmses),
        coverage: util::mean(&col(|u| u.coverage)),
    }
}

/// Runs the full experiment from data files named in the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EvalReport> {
    let items = load_items(&config.items, Some(config.features.as_path()))?;
    let users = load_users(&config.users)?;
    let ratings = load_ratings(&config.ratings, &users, &items)?;
    run_prepared(config, &items, &users, &ratings)
}

/// Runs the experiment on already-loaded data.
pub fn run_prepared(
    config: &ExperimentConfig,
    items: &[ItemProfile],
    users: &[UserProfile],
    ratings: &[Rating],
) -> Result<EvalReport> {
    config.validate()?;
    let grid = config.grid();
    let plan = make_folds(ratings, config.n_folds, config.seed)?;
    let item_by_id: BTreeMap<&str, &ItemProfile> =
        items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    let user_by_id: BTreeMap<&str, &UserProfile> =
        users.iter().map(|u| (u.user_id.as_str(), u)).collect();

    // algorithm name -> user -> one UserMetrics per fold.
    let mut per_fold: BTreeMap<String, BTreeMap<String, Vec<UserMetrics>>> = BTreeMap::new();
    let mut selections: Vec<AlphaSelection> = Vec::new();

    for fold in 0..config.n_folds {
        for user_id in plan.users() {
            let user = user_by_id
                .get(user_id)
                .ok_or_else(|| Error::invalid(format!("rated user `{user_id}` has no profile")))?;
            let (train, test) = plan.split(user_id, fold).expect("user comes from the plan");

            // Fit α once per measure used by an Ind configuration.
            let mut fitted: BTreeMap<Measure, GridSearchOutcome> = BTreeMap::new();
            for spec in &config.algorithms {
                if spec.family == Family::Ind && !fitted.contains_key(&spec.measure) {
                    let outcome = grid_search_alpha(
                        user,
                        &item_by_id,
                        &train,
                        spec.measure,
                        &grid,
                        config.k,
                        config.threshold,
                    )?;
                    fitted.insert(spec.measure, outcome);
                    selections.push(AlphaSelection {
                        algorithm: spec.name(),
                        user_id: user_id.to_string(),
                        fold,
                        alpha: outcome.alpha,
                        defaulted: outcome.defaulted,
                    });
                }
            }

            for spec in &config.algorithms {
                let effective = match spec.family {
                    Family::Ind => spec.with_alpha(fitted[&spec.measure].alpha),
                    _ => *spec,
                };
                let preds: Vec<Prediction> = test
                    .iter()
                    .filter_map(|r| {
                        item_by_id
                            .get(r.item_id.as_str())
                            .and_then(|item| predict(&effective, user, item))
                    })
                    .collect();
                let um = user_metrics(&test, &preds, config.k, config.threshold);
                per_fold
                    .entry(spec.name())
                    .or_default()
                    .entry(user_id.to_string())
                    .or_default()
                    .push(um);
            }
        }
    }

    // Collapse folds per user, then users per algorithm (config order).
    let mut per_user: BTreeMap<String, BTreeMap<String, PerUser>> = BTreeMap::new();
    let mut rows = Vec::new();
    for spec in &config.algorithms {
        let name = spec.name();
        let users_map = per_fold.get(&name).cloned().unwrap_or_default();
        let collapsed: BTreeMap<String, PerUser> = users_map
            .into_iter()
            .map(|(u, samples)| (u, fold_mean(&samples)))
            .collect();
        rows.push(ReportRow {
            algorithm: name.clone(),
            metrics: user_means_to_row(&collapsed),
        });
        per_user.insert(name, collapsed);
    }

    selections.sort_by(|a, b| {
        (&a.algorithm, &a.user_id, a.fold).cmp(&(&b.algorithm, &b.user_id, b.fold))
    });
    let alpha = alpha_summary(&selections);
    let significance = significance_blocks(&rows, &per_user);

    Ok(EvalReport {
        seed: config.seed,
        n_folds: config.n_folds,
        k: config.k,
        threshold: config.threshold,
        grid_points: grid.len(),
        excluded_users: plan.excluded.clone(),
        rows,
        alpha,
        alpha_selections: selections,
        significance,
    })
}

const METRIC_COLUMNS: [(&str, bool); 8] = [
    // (name, higher-is-better)
    ("precision", true),
    ("recall", true),
    ("f1", true),
    ("map", true),
    ("mrr", true),
    ("mae", false),
    ("rmse", false),
    ("coverage", true),
];

fn metric_of_row(row: &MetricsRow, name: &str) -> f64 {
    match name {
        "precision" => row.precision,
        "recall" => row.recall,
        "f1" => row.f1,
        "map" => row.map,
        "mrr" => row.mrr,
        "mae" => row.mae,
        "rmse" => row.rmse,
        "coverage" => row.coverage,
        _ => unreachable!("unknown metric column"),
    }
}

fn metric_of_user(u: &PerUser, name: &str) -> Option<f64> {
    match name {
        "precision" => Some(u.precision),
        "recall" => Some(u.recall),
        "f1" => Some(u.f1),
        "map" => Some(u.map),
        "mrr" => Some(u.mrr),
        "mae" => u.mae,
        "rmse" => u.rmse,
        "coverage" => Some(u.coverage),
        _ => unreachable!("unknown metric column"),
    }
}

/// For every metric, pits the best algorithm against each other one with
/// a paired t-test over per-user values.
fn significance_blocks(
    rows: &[ReportRow],
    per_user: &BTreeMap<String, BTreeMap<String, PerUser>>,
) -> Vec<SignificanceBlock> {
    if rows.len() < 2 {
        return Vec::new();
    }
    let mut blocks = Vec::new();
    for (metric, higher_is_better) in METRIC_COLUMNS {
        let best_row = rows
            .iter()
            .max_by(|a, b| {
                let (va, vb) = (metric_of_row(&a.metrics, metric), metric_of_row(&b.metrics, metric));
                let ord = va.partial_cmp(&vb).expect("metrics are never NaN");
                if higher_is_better { ord } else { ord.reverse() }
            })
            .expect("at least two rows");
        let best = &best_row.algorithm;
        let mut comparisons = Vec::new();
        for row in rows {
            if &row.algorithm == best {
                continue;
            }
            // Paired samples over the users both algorithms scored.
            let users_best = &per_user[best];
            let users_other = &per_user[&row.algorithm];
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (user, pu) in users_best {
                if let (Some(va), Some(vb)) = (
                    metric_of_user(pu, metric),
                    users_other.get(user).and_then(|o| metric_of_user(o, metric)),
                ) {
                    a.push(va);
                    b.push(vb);
                }
            }
            if a.len() < 2 {
                continue;
            }
            let test = paired_t_test(&a, &b).expect("equal lengths by construction");
            comparisons.push(Comparison {
                other: row.algorithm.clone(),
                t: test.t,
                p: test.p,
                significant: test.significant,
            });
        }
        blocks.push(SignificanceBlock {
            metric: metric.to_string(),
            best: best.clone(),
            comparisons,
        });
    }
    blocks
}

impl EvalReport {
    /// Human-readable aligned table (metrics, α summary, significance).
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out += &format!(
            "seed {}  folds {}  k {}  threshold {}  grid points {}\n",
            self.seed, self.n_folds, self.k, self.threshold, self.grid_points
        );
        if self.excluded_users.is_empty() {
            out += "excluded users: none\n";
        } else {
            out += &format!(
                "excluded users ({}): {}\n",
                self.excluded_users.len(),
                self.excluded_users.join(", ")
            );
        }
        let defaulted = self.alpha_selections.iter().filter(|s| s.defaulted).count();
        if defaulted > 0 {
            out += &format!("alpha defaulted to 0.5 on {defaulted} (user, fold) fits\n");
        }
        out.push('\n');

        let name_w = self
            .rows
            .iter()
            .map(|r| r.algorithm.len())
            .chain(["algorithm".len()])
            .max()
            .unwrap_or(9);
        out += &format!("{:<name_w$}", "algorithm");
        for (metric, _) in METRIC_COLUMNS {
            out += &format!("  {metric:>9}");
        }
        out.push('\n');
        for row in &self.rows {
            out += &format!("{:<name_w$}", row.algorithm);
            for (metric, _) in METRIC_COLUMNS {
                out += &format!("  {:>9.4}", metric_of_row(&row.metrics, metric));
            }
            out.push('\n');
        }

        if !self.alpha.is_empty() {
            out += "\nalpha weights, mean(sd) over users\n";
            for row in &self.alpha {
                out += &format!("{:<name_w$}  {:.4}({:.4})\n", row.algorithm, row.mean, row.sd);
            }
        }

        if !self.significance.is_empty() {
            out += "\nsignificance: paired t-test on per-user values, p < 0.05\n";
            for block in &self.significance {
                out += &format!("{:<9} best {}\n", block.metric, block.best);
                for c in &block.comparisons {
                    let star = if c.significant { " *" } else { "" };
                    out += &format!("  vs {:<name_w$}  p={:.4}{star}\n", c.other, c.p);
                }
            }
        }
        out
    }

    /// Machine-readable JSON.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{Aversions, Category, FeatureEvidence};

    fn user(id: &str, prefs: [f64; 13]) -> UserProfile {
        UserProfile {
            user_id: id.into(),
            preferences: prefs,
            aversions: Aversions {
                brightness_low: 1.0,
                brightness_high: 2.0,
                crowding_high: 3.0,
                noise_high: 2.0,
                smell_high: 2.0,
                openness_low: 1.0,
                openness_high: 2.0,
            },
        }
    }

    fn item(id: &str, category: Category, values: [f64; 5]) -> ItemProfile {
        ItemProfile {
            item_id: id.into(),
            category,
            features: values.map(|v| {
                if v == 0.0 {
                    FeatureEvidence::unknown()
                } else {
                    FeatureEvidence::known(v, 1)
                }
            }),
        }
    }

    #[test]
    fn grid_is_inclusive_and_validated() {
        let grid = build_grid(0.05).unwrap();
        assert_eq!(grid.len(), 21);
        assert_eq!(grid[0], 0.0);
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert!(build_grid(0.0).is_err());
        assert!(build_grid(0.3).is_err());
        assert_eq!(build_grid(0.5).unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_search_prefers_smallest_alpha_on_ties() {
        // One rated item, rating below threshold: every α yields AP 0.
        let u = user("u1", [3.0; 13]);
        let it = item("p1", Category::Squares, [3.0; 5]);
        let items: BTreeMap<&str, &ItemProfile> = [("p1", &it)].into();
        let train_rating = Rating {
            user_id: "u1".into(),
            item_id: "p1".into(),
            value: 2,
        };
        let train = vec![&train_rating];
        let grid = build_grid(0.5).unwrap();
        let got = grid_search_alpha(&u, &items, &train, Measure::Ave, &grid, 5, 3.0).unwrap();
        assert_eq!(got.alpha, 0.0);
        assert!(!got.defaulted);
    }

    #[test]
    fn grid_search_maximizes_training_map() {
        // Preference says 2 (below threshold), compatibility is perfect;
        // the relevant item is only recommended when α is high, so the
        // search must land on a high α.
        let mut prefs = [0.0; 13];
        prefs[Category::Squares.index()] = 2.0;
        let mut u = user("u1", prefs);
        u.aversions = Aversions {
            brightness_low: 1.0,
            brightness_high: 1.0,
            crowding_high: 1.0,
            noise_high: 1.0,
            smell_high: 1.0,
            openness_low: 1.0,
            openness_high: 1.0,
        };
        let it = item("p1", Category::Squares, [3.0; 5]);
        let items: BTreeMap<&str, &ItemProfile> = [("p1", &it)].into();
        let rated = Rating {
            user_id: "u1".into(),
            item_id: "p1".into(),
            value: 5,
        };
        let train = vec![&rated];
        let grid = build_grid(0.05).unwrap();
        let got = grid_search_alpha(&u, &items, &train, Measure::Ave, &grid, 5, 3.0).unwrap();
        // r̂ = α·5 + (1−α)·2 > 3 ⇔ α > 1/3; smallest such grid point.
        assert_eq!(got.alpha, 0.35);
        assert_eq!(got.train_map, 1.0);
    }

    #[test]
    fn grid_search_defaults_when_nothing_is_predictable() {
        let u = user("u1", [0.0; 13]);
        let it = item("p1", Category::Squares, [3.0; 5]);
        let items: BTreeMap<&str, &ItemProfile> = [("p1", &it)].into();
        let rated = Rating {
            user_id: "u1".into(),
            item_id: "p1".into(),
            value: 5,
        };
        let train = vec![&rated];
        let got =
            grid_search_alpha(&u, &items, &train, Measure::Ave, &build_grid(0.5).unwrap(), 5, 3.0)
                .unwrap();
        assert!(got.defaulted);
        assert_eq!(got.alpha, 0.5);
    }

    #[test]
    fn alpha_summary_hand_values() {
        let make = |user: &str, fold: usize, alpha: f64| AlphaSelection {
            algorithm: "Ind_Ave".into(),
            user_id: user.into(),
            fold,
            alpha,
            defaulted: false,
        };
        // Constant selections: sd 0.
        let rows = alpha_summary(&[make("a", 0, 0.5), make("a", 1, 0.5), make("b", 0, 0.5)]);
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].mean, rows[0].sd), (0.5, 0.0));

        // Users at 0 and 1: mean 0.5, population sd 0.5.
        let rows = alpha_summary(&[make("a", 0, 0.0), make("b", 0, 1.0)]);
        assert_eq!((rows[0].mean, rows[0].sd), (0.5, 0.5));
    }

    fn tiny_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            items: dir.join("items.csv"),
            features: dir.join("features.csv"),
            users: dir.join("users.csv"),
            ratings: dir.join("ratings.csv"),
            algorithms: battery(),
            grid_step: 0.25,
            seed: 7,
            k: 5,
            threshold: 3.0,
            n_folds: 2,
        }
    }

    #[test]
    fn toml_round_trip_and_defaults() {
        let text = r#"
items = "items.csv"
features = "features.csv"
users = "users.csv"
ratings = "ratings.csv"
seed = 9
"#;
        let cfg = ExperimentConfig::from_toml_str(text, Path::new("/data")).unwrap();
        assert_eq!(cfg.items, Path::new("/data/items.csv"));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.threshold, 3.0);
        assert_eq!(cfg.n_folds, 5);
        assert_eq!(cfg.algorithms.len(), 13);
        assert_eq!(cfg.grid().len(), 21);

        let with_algos = r#"
items = "i.csv"
features = "f.csv"
users = "u.csv"
ratings = "r.csv"
algorithms = ["ind_ave", "pref_only"]
grid_step = 0.5
"#;
        let cfg = ExperimentConfig::from_toml_str(with_algos, Path::new(".")).unwrap();
        assert_eq!(cfg.algorithms.len(), 2);

        let empty = r#"
items = "i.csv"
features = "f.csv"
users = "u.csv"
ratings = "r.csv"
algorithms = []
"#;
        assert!(ExperimentConfig::from_toml_str(empty, Path::new(".")).is_err());

        let typo = r#"
items = "i.csv"
features = "f.csv"
users = "u.csv"
ratings = "r.csv"
gird_step = 0.1
"#;
        assert!(ExperimentConfig::from_toml_str(typo, Path::new(".")).is_err());
    }

    #[test]
    fn small_experiment_runs_and_is_deterministic() {
        let mut prefs = [3.0; 13];
        prefs[Category::Squares.index()] = 5.0;
        let users = vec![user("u1", prefs), user("u2", [4.0; 13])];
        let items: Vec<ItemProfile> = (0..8)
            .map(|i| {
                let cat = if i % 2 == 0 { Category::Squares } else { Category::Libraries };
                item(&format!("p{i}"), cat, [2.0 + (i % 3) as f64; 5])
            })
            .collect();
        let mut ratings = Vec::new();
        for u in ["u1", "u2"] {
            for (i, it) in items.iter().enumerate() {
                ratings.push(Rating {
                    user_id: u.into(),
                    item_id: it.item_id.clone(),
                    value: 1 + ((i + u.len()) % 5) as u8,
                });
            }
        }
        let cfg = tiny_config(Path::new("."));
        let a = run_prepared(&cfg, &items, &users, &ratings).unwrap();
        let b = run_prepared(&cfg, &items, &users, &ratings).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_table(), b.to_table());
        assert_eq!(a.rows.len(), 13);
        // Four Ind configurations fitted per fold and user.
        assert_eq!(a.alpha.len(), 4);
        assert_eq!(a.alpha_selections.len(), 4 * 2 * 2);
        for row in &a.rows {
            let m = &row.metrics;
            for v in [m.precision, m.recall, m.f1, m.map, m.mrr, m.coverage] {
                assert!((0.0..=1.0).contains(&v), "{} out of range: {v}", row.algorithm);
            }
            assert!(m.mae <= m.rmse + 1e-12);
        }
    }
}
