//! Rating prediction and top-k list construction.
//!
//! Four algorithm families share one scale:
//!
//! * **Ind** blends overall sensory compatibility with the category
//!   preference: `r̂ = α·comp + (1−α)·p`.
//! * **C-only** is Ind at α = 1 (compatibility alone).
//! * **Pref-only** is Ind at α = 0 (preference alone).
//! * **MC** aggregates the preference and the five feature
//!   compatibilities as one multi-criteria component set.
//!
//! A user who never stated a preference for an item's category makes the
//! pair unpredictable: prediction returns `None` and callers skip the
//! pair rather than defaulting it.

use std::fmt;

use crate::aggregation::{aggregate, Measure};
use crate::compatibility::{feature_compatibilities, ideal_item};
use crate::error::{Error, Result};
use crate::profiles::{ItemProfile, UserProfile};
use crate::{SCALE_MAX, SCALE_MIN};

/// Algorithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Ind,
    COnly,
    PrefOnly,
    Mc,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ind => "Ind",
            Family::COnly => "C-only",
            Family::PrefOnly => "Pref-only",
            Family::Mc => "MC",
        }
    }
}

/// A fully instantiated algorithm configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmSpec {
    pub family: Family,
    /// Ignored by Pref-only (every measure degenerates to p there).
    pub measure: Measure,
    /// Blend weight for Ind; pinned to 1 for C-only and 0 for Pref-only;
    /// unused by MC.
    pub alpha: f64,
}

impl AlgorithmSpec {
    pub fn ind(measure: Measure, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0,1], got {alpha}")));
        }
        Ok(AlgorithmSpec { family: Family::Ind, measure, alpha })
    }

    pub fn c_only(measure: Measure) -> Self {
        AlgorithmSpec { family: Family::COnly, measure, alpha: 1.0 }
    }

    pub fn pref_only() -> Self {
        AlgorithmSpec { family: Family::PrefOnly, measure: Measure::Ave, alpha: 0.0 }
    }

    pub fn mc(measure: Measure) -> Self {
        AlgorithmSpec { family: Family::Mc, measure, alpha: 0.0 }
    }

    /// Same configuration with a different blend weight (Ind only).
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        debug_assert!(self.family == Family::Ind && (0.0..=1.0).contains(&alpha));
        self.alpha = alpha;
        self
    }

    /// Display name, e.g. `Ind_Ave`, `C-only_Cos`, `MC_RMSD`, `Pref-only`.
    pub fn name(&self) -> String {
        match self.family {
            Family::PrefOnly => self.family.name().to_string(),
            _ => format!("{}_{}", self.family.name(), self.measure),
        }
    }

    /// Parses a configuration key such as `ind_ave`, `c_only_cos`,
    /// `mc_rmsd` or `pref_only` (display names are accepted too).
    pub fn parse_key(key: &str) -> Result<Self> {
        let norm = key.trim().to_lowercase().replace('-', "_");
        if norm == "pref_only" {
            return Ok(AlgorithmSpec::pref_only());
        }
        let (family, measure) = norm
            .rsplit_once('_')
            .ok_or_else(|| Error::invalid(format!("unknown algorithm `{key}`")))?;
        let measure: Measure = measure.parse()?;
        match family {
            "ind" => AlgorithmSpec::ind(measure, 0.5),
            "c_only" => Ok(AlgorithmSpec::c_only(measure)),
            "mc" => Ok(AlgorithmSpec::mc(measure)),
            other => Err(Error::invalid(format!("unknown algorithm family `{other}`"))),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The 13 standard configurations in report order: C-only, Ind and MC
/// under each measure, then Pref-only.
pub fn battery() -> Vec<AlgorithmSpec> {
    const TABLE_ORDER: [Measure; 4] = [Measure::Ave, Measure::Cos, Measure::Min, Measure::Rmsd];
    let mut specs = Vec::new();
    specs.extend(TABLE_ORDER.map(AlgorithmSpec::c_only));
    specs.extend(TABLE_ORDER.map(|m| AlgorithmSpec::ind(m, 0.5).unwrap()));
    specs.extend(TABLE_ORDER.map(AlgorithmSpec::mc));
    specs.push(AlgorithmSpec::pref_only());
    specs
}

/// One predicted rating.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub user_id: String,
    pub item_id: String,
    pub r_hat: f64,
}

/// Overall sensory compatibility of an item with a user.
///
/// Min and Ave aggregate the five feature compatibilities. Cos and RMSD
/// compare the raw item feature vector (unknown values kept at 0) with
/// the user's ideal item. An item with no known feature at all has a
/// zero vector, for which cosine similarity is undefined; consistent
/// with the pessimistic stance on missing data this scores the minimum
/// compatibility 1.
pub fn overall_compatibility(user: &UserProfile, item: &ItemProfile, measure: Measure) -> f64 {
    match measure {
        Measure::Min | Measure::Ave => {
            let comps = feature_compatibilities(user, &item.features);
            aggregate(measure, &comps, &[]).expect("five components are never empty")
        }
        Measure::Cos | Measure::Rmsd => {
            let omega = item.features.map(|e| e.value);
            let ideal = ideal_item(user);
            match aggregate(measure, &omega, &ideal) {
                Ok(score) => score,
                Err(_) => SCALE_MIN,
            }
        }
    }
}

/// Eq.-style blend of compatibility and preference, kept on the scale.
fn blend(alpha: f64, comp: f64, pref: f64) -> f64 {
    (alpha * comp + (1.0 - alpha) * pref).clamp(SCALE_MIN, SCALE_MAX)
}

/// Predicted rating for one (user, item) pair, or `None` when the user
/// stated no preference for the item's category.
pub fn predict_value(spec: &AlgorithmSpec, user: &UserProfile, item: &ItemProfile) -> Option<f64> {
    if !user.has_preference(item.category) {
        return None;
    }
    let pref = user.preference(item.category);
    let r_hat = match spec.family {
        Family::Ind | Family::COnly | Family::PrefOnly => {
            // Pref-only never touches sensory data: α = 0 zeroes the
            // compatibility term, so skip computing it entirely.
            let comp = if spec.alpha == 0.0 {
                0.0
            } else {
                overall_compatibility(user, item, spec.measure)
            };
            blend(spec.alpha, comp, pref)
        }
        Family::Mc => {
            let comps = feature_compatibilities(user, &item.features);
            let mut omega = [pref; 6];
            omega[1..].copy_from_slice(&comps);
            let ideal = [SCALE_MAX; 6];
            aggregate(spec.measure, &omega, &ideal)
                .expect("MC components are bounded below by 1")
        }
    };
    Some(r_hat)
}

/// Like [`predict_value`], carrying the pair's identifiers.
pub fn predict(spec: &AlgorithmSpec, user: &UserProfile, item: &ItemProfile) -> Option<Prediction> {
    predict_value(spec, user, item).map(|r_hat| Prediction {
        user_id: user.user_id.clone(),
        item_id: item.item_id.clone(),
        r_hat,
    })
}

/// Items predicted above `threshold`, best first (ties by item id),
/// truncated to `k`.
pub fn recommend_top_k(predictions: &[Prediction], k: usize, threshold: f64) -> Vec<String> {
    let mut above: Vec<&Prediction> = predictions.iter().filter(|p| p.r_hat > threshold).collect();
    above.sort_by(|a, b| {
        b.r_hat
            .partial_cmp(&a.r_hat)
            .expect("predictions are never NaN")
            .then_with(|| a.item_id.cmp(&b.item_id))
    });
    above.into_iter().take(k).map(|p| p.item_id.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Feature;
    use crate::profiles::{Aversions, Category, FeatureEvidence};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn user(prefs: [f64; 13], aversions: [f64; 7]) -> UserProfile {
        UserProfile {
            user_id: "u".into(),
            preferences: prefs,
            aversions: Aversions {
                brightness_low: aversions[0],
                brightness_high: aversions[1],
                crowding_high: aversions[2],
                noise_high: aversions[3],
                smell_high: aversions[4],
                openness_low: aversions[5],
                openness_high: aversions[6],
            },
        }
    }

    fn item(values: [f64; 5]) -> ItemProfile {
        ItemProfile {
            item_id: "p".into(),
            category: Category::Squares,
            features: values.map(|v| {
                if v == 0.0 {
                    FeatureEvidence::unknown()
                } else {
                    FeatureEvidence::known(v, 1)
                }
            }),
        }
    }

    fn random_user(rng: &mut ChaCha8Rng) -> UserProfile {
        let prefs = std::array::from_fn(|_| {
            if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(1..=5) as f64 }
        });
        let avs = std::array::from_fn(|_| rng.gen_range(1..=5) as f64);
        user(prefs, avs)
    }

    fn random_item(rng: &mut ChaCha8Rng) -> ItemProfile {
        let mut it = item(std::array::from_fn(|_| {
            if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(1.0..=5.0) }
        }));
        it.category = Category::ALL[rng.gen_range(0..13)];
        it
    }

    #[test]
    fn blend_hand_value() {
        assert_eq!(blend(0.5, 4.0, 2.0), 3.0);
    }

    #[test]
    fn ind_blends_compatibility_and_preference() {
        // All aversions at 1 make every known feature fully compatible,
        // so overall compatibility is 5 under Ave.
        let mut prefs = [0.0; 13];
        prefs[Category::Squares.index()] = 2.0;
        let u = user(prefs, [1.0; 7]);
        let it = item([3.0; 5]);
        assert_eq!(overall_compatibility(&u, &it, Measure::Ave), 5.0);
        let spec = AlgorithmSpec::ind(Measure::Ave, 0.5).unwrap();
        assert_eq!(predict_value(&spec, &u, &it).unwrap(), 3.5);
    }

    #[test]
    fn c_only_ignores_preference_and_pref_only_ignores_items() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut u = random_user(&mut rng);
            let it = random_item(&mut rng);
            u.preferences[it.category.index()] = rng.gen_range(1..=5) as f64;
            for measure in Measure::ALL {
                let c_only = AlgorithmSpec::c_only(measure);
                let got = predict_value(&c_only, &u, &it).unwrap();
                let mut u2 = u.clone();
                u2.preferences[it.category.index()] = 1.0 + (u.preference(it.category) % 5.0);
                assert_eq!(predict_value(&c_only, &u2, &it).unwrap(), got);
            }
            let pref_only = AlgorithmSpec::pref_only();
            let got = predict_value(&pref_only, &u, &it).unwrap();
            assert_eq!(got, u.preference(it.category));
            let other = random_item(&mut rng);
            let mut same_cat = other.clone();
            same_cat.category = it.category;
            same_cat.item_id = it.item_id.clone();
            assert_eq!(predict_value(&pref_only, &u, &same_cat).unwrap(), got);
        }
    }

    #[test]
    fn family_identities_hold_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let u = random_user(&mut rng);
            let it = random_item(&mut rng);
            for measure in Measure::ALL {
                let at_one = predict_value(&AlgorithmSpec::ind(measure, 1.0).unwrap(), &u, &it);
                let c_only = predict_value(&AlgorithmSpec::c_only(measure), &u, &it);
                assert_eq!(at_one, c_only);
                let at_zero = predict_value(&AlgorithmSpec::ind(measure, 0.0).unwrap(), &u, &it);
                let pref = predict_value(&AlgorithmSpec::pref_only(), &u, &it);
                assert_eq!(at_zero, pref);
            }
        }
    }

    #[test]
    fn unstated_preference_skips_the_pair() {
        let u = user([0.0; 13], [1.0; 7]);
        let it = item([3.0; 5]);
        for spec in battery() {
            assert_eq!(predict_value(&spec, &u, &it), None);
        }
    }

    #[test]
    fn mc_min_propagates_unknown_features() {
        let mut prefs = [0.0; 13];
        prefs[Category::Squares.index()] = 5.0;
        let u = user(prefs, [3.0; 7]);
        let mut it = item([4.0; 5]);
        it.features[Feature::Smell.index()] = FeatureEvidence::unknown();
        let got = predict_value(&AlgorithmSpec::mc(Measure::Min), &u, &it).unwrap();
        assert_eq!(got, 1.0);
        let c_only = predict_value(&AlgorithmSpec::c_only(Measure::Min), &u, &it).unwrap();
        assert_eq!(c_only, 1.0);
    }

    #[test]
    fn mc_min_is_bounded_by_mc_ave() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let u = random_user(&mut rng);
            let it = random_item(&mut rng);
            let min = predict_value(&AlgorithmSpec::mc(Measure::Min), &u, &it);
            let ave = predict_value(&AlgorithmSpec::mc(Measure::Ave), &u, &it);
            match (min, ave) {
                (Some(lo), Some(hi)) => assert!(lo <= hi + 1e-12),
                (None, None) => {}
                other => panic!("families disagreed on predictability: {other:?}"),
            }
        }
    }

    #[test]
    fn blend_is_monotone_in_both_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..300 {
            let alpha: f64 = rng.gen_range(0.0..=1.0);
            let comp: f64 = rng.gen_range(1.0..=5.0);
            let pref: f64 = rng.gen_range(1.0..=5.0);
            let bump: f64 = rng.gen_range(0.0..=1.0);
            assert!(blend(alpha, (comp + bump).min(5.0), pref) >= blend(alpha, comp, pref) - 1e-12);
            assert!(blend(alpha, comp, (pref + bump).min(5.0)) >= blend(alpha, comp, pref) - 1e-12);
        }
    }

    #[test]
    fn featureless_item_under_cos_scores_minimum() {
        let mut prefs = [0.0; 13];
        prefs[Category::Squares.index()] = 4.0;
        let u = user(prefs, [2.0; 7]);
        let it = item([0.0; 5]);
        assert_eq!(overall_compatibility(&u, &it, Measure::Cos), 1.0);
        let spec = AlgorithmSpec::c_only(Measure::Cos);
        assert_eq!(predict_value(&spec, &u, &it).unwrap(), 1.0);
    }

    #[test]
    fn predictions_stay_on_the_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let u = random_user(&mut rng);
            let it = random_item(&mut rng);
            for spec in battery() {
                if let Some(r) = predict_value(&spec, &u, &it) {
                    assert!((1.0..=5.0).contains(&r), "{spec} produced {r}");
                }
            }
        }
    }

    fn preds(entries: &[(&str, f64)]) -> Vec<Prediction> {
        entries
            .iter()
            .map(|(id, r_hat)| Prediction {
                user_id: "u".into(),
                item_id: id.to_string(),
                r_hat: *r_hat,
            })
            .collect()
    }

    #[test]
    fn top_k_filters_sorts_and_truncates() {
        let p = preds(&[("p1", 4.2), ("p2", 2.9), ("p3", 4.2)]);
        assert_eq!(recommend_top_k(&p, 5, 3.0), vec!["p1", "p3"]);

        let low = preds(&[("p1", 3.0), ("p2", 1.0)]);
        assert!(recommend_top_k(&low, 5, 3.0).is_empty());

        let many = preds(&[
            ("a", 4.0),
            ("b", 4.5),
            ("c", 3.5),
            ("d", 5.0),
            ("e", 4.1),
            ("f", 3.2),
            ("g", 4.9),
        ]);
        let top = recommend_top_k(&many, 5, 3.0);
        assert_eq!(top.len(), 5);
        assert_eq!(top[0], "d");
        assert_eq!(top[1], "g");
    }

    #[test]
    fn top_k_is_deterministic() {
        let p = preds(&[("x", 4.0), ("a", 4.0), ("m", 4.0)]);
        let once = recommend_top_k(&p, 3, 3.0);
        assert_eq!(once, vec!["a", "m", "x"]);
        assert_eq!(recommend_top_k(&p, 3, 3.0), once);
    }

    #[test]
    fn names_and_keys_round_trip() {
        let expected = [
            "C-only_Ave",
            "C-only_Cos",
            "C-only_Min",
            "C-only_RMSD",
            "Ind_Ave",
            "Ind_Cos",
            "Ind_Min",
            "Ind_RMSD",
            "MC_Ave",
            "MC_Cos",
            "MC_Min",
            "MC_RMSD",
            "Pref-only",
        ];
        let specs = battery();
        assert_eq!(specs.len(), 13);
        for (spec, want) in specs.iter().zip(expected) {
            assert_eq!(spec.name(), want);
            let parsed = AlgorithmSpec::parse_key(want).unwrap();
            assert_eq!(parsed.family, spec.family);
            if spec.family != Family::PrefOnly {
                assert_eq!(parsed.measure, spec.measure);
            }
        }
        assert_eq!(AlgorithmSpec::parse_key("c_only_rmsd").unwrap().family, Family::COnly);
        assert!(AlgorithmSpec::parse_key("hybrid_max").is_err());
        assert!(AlgorithmSpec::ind(Measure::Ave, 1.5).is_err());
    }
}
