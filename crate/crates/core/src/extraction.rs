//! Mining sensory-feature evaluations out of parsed reviews.
//!
//! Step 1 walks every dependency tree looking for nodes whose lowercase
//! lemma is in the sensory dictionary. An unmodified word contributes its
//! base value `f_w`. When the word's proper subtree contains grade
//! modifiers, the nearest one (ties broken by surface position) shifts
//! the value by `impact · d_w`, and the result is clamped back onto the
//! `[1, 5]` scale: "scuro" (base 2, direction −1) alone yields 2, while
//! "tanto scuro" (impact +1) yields 1 — very dark maps to the bottom of
//! the scale.
//!
//! Step 2 pools all mentions of a feature across an item's reviews into
//! the per-item mean, keeping the mention count as evidence weight.
//! Features never mentioned stay at the unknown marker (0, 0).

use std::collections::BTreeMap;

use crate::conllu::{DepTree, ReviewDoc};
use crate::error::Result;
use crate::lexicon::{Feature, ModifierEntry, ModifierLexicon, SensoryLexicon};
use crate::profiles::{FeatureEvidence, FeatureTable};
use crate::util;
use crate::{SCALE_MAX, SCALE_MIN};

/// One sensory evaluation found in one review.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMention {
    pub feature: Feature,
    /// Final value in [1,5] after any modifier shift and clamping.
    pub value: f64,
    pub item_id: String,
    pub review_id: String,
    /// The matched sensory word (lowercase lemma).
    pub word: String,
    /// The applied modifier word, if any.
    pub modifier: Option<String>,
}

/// Among modifier words in `node`'s proper subtree, picks the one at
/// minimum tree distance, breaking ties by smallest surface position.
pub fn select_modifier<'a>(
    tree: &DepTree,
    node: usize,
    mlex: &'a ModifierLexicon,
) -> Result<Option<&'a ModifierEntry>> {
    let distances = tree.descendant_distances(node)?;
    let best = distances
        .into_iter()
        .filter(|&(id, _)| id != node)
        .filter_map(|(id, dist)| {
            let token = tree.token(id).expect("descendant ids come from the tree");
            mlex.get(&token.lemma.to_lowercase()).map(|entry| (dist, id, entry))
        })
        .min_by_key(|&(dist, id, _)| (dist, id));
    Ok(best.map(|(_, _, entry)| entry))
}

/// Computes a mention value: base `f_w`, shifted by `impact · d_w` when a
/// modifier applies, clamped to the scale.
fn mention_value(base: f64, direction: i8, modifier: Option<&ModifierEntry>) -> f64 {
    match modifier {
        None => base,
        Some(m) => {
            let delta = f64::from(m.impact) * f64::from(direction);
            (base + delta).clamp(SCALE_MIN, SCALE_MAX)
        }
    }
}

/// Extracts every sensory mention from one review document.
pub fn extract_mentions(
    doc: &ReviewDoc,
    slex: &SensoryLexicon,
    mlex: &ModifierLexicon,
) -> Result<Vec<FeatureMention>> {
    let mut mentions = Vec::new();
    for tree in &doc.sentences {
        for token in tree.tokens() {
            let Some(entry) = slex.get(&token.lemma.to_lowercase()) else {
                continue;
            };
            let modifier = select_modifier(tree, token.id, mlex)?;
            mentions.push(FeatureMention {
                feature: entry.feature,
                value: mention_value(entry.base, entry.direction, modifier),
                item_id: doc.item_id.clone(),
                review_id: doc.review_id.clone(),
                word: entry.word.clone(),
                modifier: modifier.map(|m| m.word.clone()),
            });
        }
    }
    Ok(mentions)
}

/// Extracts mentions from a whole corpus, in document order.
pub fn extract_corpus(
    docs: &[ReviewDoc],
    slex: &SensoryLexicon,
    mlex: &ModifierLexicon,
) -> Result<Vec<FeatureMention>> {
    let mut all = Vec::new();
    for doc in docs {
        all.extend(extract_mentions(doc, slex, mlex)?);
    }
    Ok(all)
}

/// Pools mentions into per-item feature evidence: value = mean over the
/// item's mentions of that feature, count = number of mentions. Items
/// appear in the table iff they have at least one mention.
pub fn aggregate_item_features(mentions: &[FeatureMention]) -> FeatureTable {
    let mut grouped: BTreeMap<&str, [Vec<f64>; 5]> = BTreeMap::new();
    for m in mentions {
        grouped.entry(&m.item_id).or_default()[m.feature.index()].push(m.value);
    }
    grouped
        .into_iter()
        .map(|(item_id, values)| {
            let evidence = values.map(|vals| {
                if vals.is_empty() {
                    FeatureEvidence::unknown()
                } else {
                    FeatureEvidence {
                        value: util::mean(&vals),
                        count: vals.len() as u32,
                    }
                }
            });
            (item_id.to_string(), evidence)
        })
        .collect()
}

/// Descriptive statistics of one feature's evidence counts across items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureCountStats {
    pub min: u32,
    pub max: u32,
    pub mean: f64,
    pub sd: f64,
    /// Items with at least one evaluation of this feature.
    pub coverage: usize,
}

/// Per-feature count statistics over a feature table (canonical order).
pub fn corpus_stats(table: &FeatureTable) -> [FeatureCountStats; 5] {
    Feature::ALL.map(|f| {
        let counts: Vec<u32> = table.values().map(|v| v[f.index()].count).collect();
        if counts.is_empty() {
            return FeatureCountStats {
                min: 0,
                max: 0,
                mean: 0.0,
                sd: 0.0,
                coverage: 0,
            };
        }
        let as_f64: Vec<f64> = counts.iter().map(|&c| f64::from(c)).collect();
        FeatureCountStats {
            min: *counts.iter().min().unwrap(),
            max: *counts.iter().max().unwrap(),
            mean: util::mean(&as_f64),
            sd: util::population_sd(&as_f64),
            coverage: counts.iter().filter(|&&c| c > 0).count(),
        }
    })
}
