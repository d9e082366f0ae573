//! Item catalogs, crowdsourced feature tables, user profiles, ratings,
//! and multi-source feature fusion.
//!
//! All collections are plain CSV with a header row. Feature tables use
//! the long format `item_id,feature,value,count`; a missing (item,
//! feature) row means "unknown", stored as value 0 with count 0. Fusion
//! combines two tables by count-weighted mean, so a feature known to a
//! single source passes through unchanged.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lexicon::Feature;
use crate::util;

/// The closed set of place categories users state preferences for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Restaurants,
    PubsAndCoffeeShops,
    IceCreamShops,
    MuseumsAndExhibitions,
    CinemasAndTheaters,
    Squares,
    RailwayStations,
    MallsAndMarkets,
    ComicShops,
    TechShops,
    ClothingStores,
    Libraries,
    Bookshops,
}

impl Category {
    pub const ALL: [Category; 13] = [
        Category::Restaurants,
        Category::PubsAndCoffeeShops,
        Category::IceCreamShops,
        Category::MuseumsAndExhibitions,
        Category::CinemasAndTheaters,
        Category::Squares,
        Category::RailwayStations,
        Category::MallsAndMarkets,
        Category::ComicShops,
        Category::TechShops,
        Category::ClothingStores,
        Category::Libraries,
        Category::Bookshops,
    ];

    /// Snake-case identifier used in CSV files and column names.
    pub fn slug(self) -> &'static str {
        match self {
            Category::Restaurants => "restaurants",
            Category::PubsAndCoffeeShops => "pubs_and_coffee_shops",
            Category::IceCreamShops => "ice_cream_shops",
            Category::MuseumsAndExhibitions => "museums_and_exhibitions",
            Category::CinemasAndTheaters => "cinemas_and_theaters",
            Category::Squares => "squares",
            Category::RailwayStations => "railway_stations",
            Category::MallsAndMarkets => "malls_and_markets",
            Category::ComicShops => "comic_shops",
            Category::TechShops => "tech_shops",
            Category::ClothingStores => "clothing_stores",
            Category::Libraries => "libraries",
            Category::Bookshops => "bookshops",
        }
    }

    pub fn index(self) -> usize {
        Category::ALL.iter().position(|c| *c == self).unwrap()
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

impl std::str::FromStr for Category {
    type Err = Error;

    /// Accepts the snake_case slug or the spaced form ("pubs and coffee
    /// shops"), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_lowercase().replace(' ', "_");
        Category::ALL
            .into_iter()
            .find(|c| c.slug() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown category `{s}`")))
    }
}

/// One feature's evidence for one item: mean value and how many
/// observations back it. `value == 0.0 ⇔ count == 0` (unknown).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureEvidence {
    pub value: f64,
    pub count: u32,
}

impl FeatureEvidence {
    pub fn known(value: f64, count: u32) -> Self {
        debug_assert!(count > 0 && (1.0..=5.0).contains(&value));
        FeatureEvidence { value, count }
    }

    pub fn unknown() -> Self {
        FeatureEvidence { value: 0.0, count: 0 }
    }

    pub fn is_known(self) -> bool {
        self.count > 0
    }
}

/// Feature evidence in canonical feature order (see [`Feature::ALL`]).
pub type FeatureVector = [FeatureEvidence; 5];

/// Per-item feature evidence keyed by item id.
pub type FeatureTable = BTreeMap<String, FeatureVector>;

/// A place: id, category, and its five sensory feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemProfile {
    pub item_id: String,
    pub category: Category,
    pub features: FeatureVector,
}

impl ItemProfile {
    pub fn feature(&self, f: Feature) -> FeatureEvidence {
        self.features[f.index()]
    }
}

/// The seven stated aversions to sensory extremes, each in [1,5].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aversions {
    pub brightness_low: f64,
    pub brightness_high: f64,
    pub crowding_high: f64,
    pub noise_high: f64,
    pub smell_high: f64,
    pub openness_low: f64,
    pub openness_high: f64,
}

/// A user: category preferences (0 = unstated) and sensory aversions.
#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    pub user_id: String,
    /// Indexed by [`Category::index`]; each value in {0} ∪ [1,5].
    pub preferences: [f64; 13],
    pub aversions: Aversions,
}

impl UserProfile {
    pub fn preference(&self, category: Category) -> f64 {
        self.preferences[category.index()]
    }

    /// Whether the user stated a preference for this category.
    pub fn has_preference(&self, category: Category) -> bool {
        self.preference(category) > 0.0
    }
}

/// One observed rating on the 1–5 Likert scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rating {
    pub user_id: String,
    pub item_id: String,
    pub value: u8,
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::invalid(format!("{}: {other:?}", path.display())),
        })
}

fn record_line(record: &csv::StringRecord) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_value(file: &str, line: usize, field: &str, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::format(file, line, format!("invalid {what} `{field}`")))
}

/// Loads a long-format feature table (`item_id,feature,value,count`).
///
/// A legacy three-column table without `count` is accepted; each known
/// feature then defaults to count 1 so fusion stays well-defined.
pub fn load_feature_table(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let mut rdr = csv_reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::invalid(format!("{file}: {e}")))?
        .clone();
    let has_count = headers.iter().any(|h| h == "count");
    for expected in ["item_id", "feature", "value"] {
        if !headers.iter().any(|h| h == expected) {
            return Err(Error::format(&file, 1, format!("missing column `{expected}`")));
        }
    }
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (c_item, c_feat, c_val) = (col("item_id"), col("feature"), col("value"));
    let c_count = has_count.then(|| col("count"));

    let mut table = FeatureTable::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::invalid(format!("{file}: {e}")))?;
        let line = record_line(&record);
        let item_id = record.get(c_item).unwrap_or_default().to_string();
        if item_id.is_empty() {
            return Err(Error::format(&file, line, "empty item_id"));
        }
        let feature: Feature = record
            .get(c_feat)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| Error::format(&file, line, e.to_string()))?;
        let value = parse_value(&file, line, record.get(c_val).unwrap_or_default(), "value")?;
        if !(1.0..=5.0).contains(&value) {
            return Err(Error::format(&file, line, format!("value out of range: {value}")));
        }
        let count: u32 = match c_count {
            Some(c) => {
                let raw = record.get(c).unwrap_or_default();
                raw.parse().map_err(|_| {
                    Error::format(&file, line, format!("invalid count `{raw}`"))
                })?
            }
            None => 1,
        };
        if count < 1 {
            return Err(Error::format(&file, line, "count must be ≥ 1 on a present row"));
        }
        let slot = &mut table.entry(item_id.clone()).or_insert_with(|| [FeatureEvidence::unknown(); 5])
            [feature.index()];
        if slot.is_known() {
            return Err(Error::format(
                &file,
                line,
                format!("duplicate row for item `{item_id}` feature `{feature}`"),
            ));
        }
        *slot = FeatureEvidence { value, count };
    }
    Ok(table)
}

/// Serializes a feature table; values keep 4 decimals, unknown features
/// are omitted and reconstructed as (0, 0) on load.
pub fn feature_table_to_csv(table: &FeatureTable) -> String {
    let mut out = String::from("item_id,feature,value,count\n");
    for (item_id, features) in table {
        for f in Feature::ALL {
            let ev = features[f.index()];
            if ev.is_known() {
                out += &format!("{item_id},{f},{:.4},{}\n", ev.value, ev.count);
            }
        }
    }
    out
}

pub fn write_feature_table(path: impl AsRef<Path>, table: &FeatureTable) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, feature_table_to_csv(table)).map_err(|e| Error::io(path, e))
}

/// Loads the item catalog, attaching feature evidence from an optional
/// feature table. Items absent from the table get all-unknown features.
pub fn load_items(
    catalog: impl AsRef<Path>,
    features: Option<&Path>,
) -> Result<Vec<ItemProfile>> {
    let catalog = catalog.as_ref();
    let file = catalog.display().to_string();
    let mut rdr = csv_reader(catalog)?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::invalid(format!("{file}: {e}")))?
        .clone();
    for expected in ["item_id", "category"] {
        if !headers.iter().any(|h| h == expected) {
            return Err(Error::format(&file, 1, format!("missing column `{expected}`")));
        }
    }
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (c_item, c_cat) = (col("item_id"), col("category"));

    let table = match features {
        Some(path) => load_feature_table(path)?,
        None => FeatureTable::new(),
    };

    let mut seen = BTreeSet::new();
    let mut items = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::invalid(format!("{file}: {e}")))?;
        let line = record_line(&record);
        let item_id = record.get(c_item).unwrap_or_default().to_string();
        if item_id.is_empty() {
            return Err(Error::format(&file, line, "empty item_id"));
        }
        if !seen.insert(item_id.clone()) {
            return Err(Error::format(&file, line, format!("duplicate item `{item_id}`")));
        }
        let category: Category = record
            .get(c_cat)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| Error::format(&file, line, e.to_string()))?;
        let features = table
            .get(&item_id)
            .copied()
            .unwrap_or([FeatureEvidence::unknown(); 5]);
        items.push(ItemProfile {
            item_id,
            category,
            features,
        });
    }
    for item_id in table.keys() {
        if !seen.contains(item_id) {
            return Err(Error::invalid(format!(
                "feature table references item `{item_id}` missing from the catalog"
            )));
        }
    }
    items.sort_by(|a, b| a.item_id.cmp(&b.item_id));
    Ok(items)
}

pub fn items_to_csv(items: &[ItemProfile]) -> String {
    let mut out = String::from("item_id,category\n");
    for item in items {
        out += &format!("{},{}\n", item.item_id, item.category);
    }
    out
}

/// users.csv column names, in file order after `user_id`.
pub const PREF_COLUMNS: [&str; 13] = [
    "pref_restaurants",
    "pref_pubs_and_coffee_shops",
    "pref_ice_cream_shops",
    "pref_museums_and_exhibitions",
    "pref_cinemas_and_theaters",
    "pref_squares",
    "pref_railway_stations",
    "pref_malls_and_markets",
    "pref_comic_shops",
    "pref_tech_shops",
    "pref_clothing_stores",
    "pref_libraries",
    "pref_bookshops",
];

pub const AVERSION_COLUMNS: [&str; 7] = [
    "av_brightness_low",
    "av_brightness_high",
    "av_crowding_high",
    "av_noise_high",
    "av_smell_high",
    "av_openness_low",
    "av_openness_high",
];

pub fn load_users(path: impl AsRef<Path>) -> Result<Vec<UserProfile>> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let mut rdr = csv_reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::invalid(format!("{file}: {e}")))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format(&file, 1, format!("missing column `{name}`")))
    };
    let c_user = col("user_id")?;
    let mut c_pref = [0usize; 13];
    for (i, name) in PREF_COLUMNS.iter().enumerate() {
        c_pref[i] = col(name)?;
    }
    let mut c_av = [0usize; 7];
    for (i, name) in AVERSION_COLUMNS.iter().enumerate() {
        c_av[i] = col(name)?;
    }

    let mut seen = BTreeSet::new();
    let mut users = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::invalid(format!("{file}: {e}")))?;
        let line = record_line(&record);
        let user_id = record.get(c_user).unwrap_or_default().to_string();
        if user_id.is_empty() {
            return Err(Error::format(&file, line, "empty user_id"));
        }
        if !seen.insert(user_id.clone()) {
            return Err(Error::format(&file, line, format!("duplicate user `{user_id}`")));
        }
        let mut preferences = [0.0; 13];
        for (i, &c) in c_pref.iter().enumerate() {
            let v = parse_value(&file, line, record.get(c).unwrap_or_default(), "preference")?;
            if v != 0.0 && !(1.0..=5.0).contains(&v) {
                return Err(Error::format(
                    &file,
                    line,
                    format!("preference must be 0 (unstated) or in [1,5], got {v}"),
                ));
            }
            preferences[i] = v;
        }
        let mut av = [0.0; 7];
        for (i, &c) in c_av.iter().enumerate() {
            let v = parse_value(&file, line, record.get(c).unwrap_or_default(), "aversion")?;
            if !(1.0..=5.0).contains(&v) {
                return Err(Error::format(&file, line, format!("aversion out of [1,5]: {v}")));
            }
            av[i] = v;
        }
        users.push(UserProfile {
            user_id,
            preferences,
            aversions: Aversions {
                brightness_low: av[0],
                brightness_high: av[1],
                crowding_high: av[2],
                noise_high: av[3],
                smell_high: av[4],
                openness_low: av[5],
                openness_high: av[6],
            },
        });
    }
    users.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    Ok(users)
}

fn fmt_num(v: f64) -> String {
    // f64 Display already prints the shortest round-trippable form.
    format!("{v}")
}

pub fn users_to_csv(users: &[UserProfile]) -> String {
    let mut out = String::from("user_id");
    for c in PREF_COLUMNS.iter().chain(AVERSION_COLUMNS.iter()) {
        out += &format!(",{c}");
    }
    out.push('\n');
    for u in users {
        out += &u.user_id;
        for p in u.preferences {
            out += &format!(",{}", fmt_num(p));
        }
        let a = u.aversions;
        for v in [
            a.brightness_low,
            a.brightness_high,
            a.crowding_high,
            a.noise_high,
            a.smell_high,
            a.openness_low,
            a.openness_high,
        ] {
            out += &format!(",{}", fmt_num(v));
        }
        out.push('\n');
    }
    out
}

/// Loads ratings and validates every reference against the known users
/// and items.
pub fn load_ratings(
    path: impl AsRef<Path>,
    users: &[UserProfile],
    items: &[ItemProfile],
) -> Result<Vec<Rating>> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let user_ids: BTreeSet<&str> = users.iter().map(|u| u.user_id.as_str()).collect();
    let item_ids: BTreeSet<&str> = items.iter().map(|i| i.item_id.as_str()).collect();
    let mut rdr = csv_reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::invalid(format!("{file}: {e}")))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format(&file, 1, format!("missing column `{name}`")))
    };
    let (c_user, c_item, c_rating) = (col("user_id")?, col("item_id")?, col("rating")?);

    let mut seen = BTreeSet::new();
    let mut ratings = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::invalid(format!("{file}: {e}")))?;
        let line = record_line(&record);
        let user_id = record.get(c_user).unwrap_or_default().to_string();
        let item_id = record.get(c_item).unwrap_or_default().to_string();
        let raw = record.get(c_rating).unwrap_or_default();
        let value: u8 = raw
            .parse()
            .map_err(|_| Error::format(&file, line, format!("invalid rating `{raw}`")))?;
        if !(1..=5).contains(&value) {
            return Err(Error::format(&file, line, format!("rating out of [1,5]: {value}")));
        }
        if !user_ids.contains(user_id.as_str()) {
            return Err(Error::format(&file, line, format!("unknown user `{user_id}`")));
        }
        if !item_ids.contains(item_id.as_str()) {
            return Err(Error::format(&file, line, format!("unknown item `{item_id}`")));
        }
        if !seen.insert((user_id.clone(), item_id.clone())) {
            return Err(Error::format(
                &file,
                line,
                format!("duplicate rating for ({user_id}, {item_id})"),
            ));
        }
        ratings.push(Rating {
            user_id,
            item_id,
            value,
        });
    }
    ratings.sort_by(|a, b| (&a.user_id, &a.item_id).cmp(&(&b.user_id, &b.item_id)));
    Ok(ratings)
}

pub fn ratings_to_csv(ratings: &[Rating]) -> String {
    let mut out = String::from("user_id,item_id,rating\n");
    for r in ratings {
        out += &format!("{},{},{}\n", r.user_id, r.item_id, r.value);
    }
    out
}

/// Count-weighted mean of two evidence values; a missing source passes
/// the other through, and two missing sources stay unknown.
pub fn fuse_feature(a: FeatureEvidence, b: FeatureEvidence) -> FeatureEvidence {
    debug_assert!(a.is_known() == (a.value != 0.0));
    debug_assert!(b.is_known() == (b.value != 0.0));
    match (a.is_known(), b.is_known()) {
        (false, false) => FeatureEvidence::unknown(),
        (true, false) => a,
        (false, true) => b,
        (true, true) => {
            let n = a.count + b.count;
            let value = (a.count as f64 * a.value + b.count as f64 * b.value) / n as f64;
            FeatureEvidence { value, count: n }
        }
    }
}

/// Fuses two feature tables item by item (union of the keys).
pub fn fuse_tables(a: &FeatureTable, b: &FeatureTable) -> FeatureTable {
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let empty = [FeatureEvidence::unknown(); 5];
    keys.into_iter()
        .map(|k| {
            let va = a.get(k).unwrap_or(&empty);
            let vb = b.get(k).unwrap_or(&empty);
            let mut fused = empty;
            for i in 0..5 {
                fused[i] = fuse_feature(va[i], vb[i]);
            }
            (k.clone(), fused)
        })
        .collect()
}

/// Fuses two profile collections. Items present in only one source pass
/// through unchanged; shared items must agree on the category.
pub fn fuse_profiles(a: &[ItemProfile], b: &[ItemProfile]) -> Result<Vec<ItemProfile>> {
    let index_b: BTreeMap<&str, &ItemProfile> =
        b.iter().map(|i| (i.item_id.as_str(), i)).collect();
    let ids_a: BTreeSet<&str> = a.iter().map(|i| i.item_id.as_str()).collect();
    let mut fused = Vec::new();
    for ia in a {
        match index_b.get(ia.item_id.as_str()) {
            Some(ib) => {
                if ia.category != ib.category {
                    return Err(Error::invalid(format!(
                        "item `{}` has category {} in one source and {} in the other",
                        ia.item_id, ia.category, ib.category
                    )));
                }
                let mut features = [FeatureEvidence::unknown(); 5];
                for (i, slot) in features.iter_mut().enumerate() {
                    *slot = fuse_feature(ia.features[i], ib.features[i]);
                }
                fused.push(ItemProfile {
                    item_id: ia.item_id.clone(),
                    category: ia.category,
                    features,
                });
            }
            None => fused.push(ia.clone()),
        }
    }
    for ib in b {
        if !ids_a.contains(ib.item_id.as_str()) {
            fused.push(ib.clone());
        }
    }
    fused.sort_by(|x, y| x.item_id.cmp(&y.item_id));
    Ok(fused)
}

/// Agreement statistics between two sources for one feature, computed
/// over the items where both values are known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureComparison {
    /// Number of items with the feature known in both sources.
    pub common: usize,
    /// Statistics of the absolute difference |v_a − v_b|.
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
    /// Pearson correlation; `None` when fewer than 2 common items or a
    /// source has zero variance.
    pub pearson: Option<f64>,
    /// Mean of the signed difference v_a − v_b.
    pub mean_diff: f64,
}

/// Compares two feature tables per feature (canonical order).
pub fn compare_sources(a: &FeatureTable, b: &FeatureTable) -> [FeatureComparison; 5] {
    Feature::ALL.map(|f| {
        let mut va = Vec::new();
        let mut vb = Vec::new();
        for (item, fa) in a {
            if let Some(fb) = b.get(item) {
                let (ea, eb) = (fa[f.index()], fb[f.index()]);
                if ea.is_known() && eb.is_known() {
                    va.push(ea.value);
                    vb.push(eb.value);
                }
            }
        }
        let dist: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).collect();
        let signed: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x - y).collect();
        FeatureComparison {
            common: va.len(),
            min: dist.iter().copied().fold(f64::INFINITY, f64::min),
            max: dist.iter().copied().fold(0.0, f64::max),
            mean: util::mean(&dist),
            sd: util::population_sd(&dist),
            pearson: pearson(&va, &vb),
            mean_diff: util::mean(&signed),
        }
    })
    .map(|mut c| {
        if c.common == 0 {
            c.min = 0.0;
        }
        c
    })
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() < 2 {
        return None;
    }
    let (ma, mb) = (util::mean(a), util::mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let (sa, sb) = (
        a.iter().map(|x| (x - ma).powi(2)).sum::<f64>().sqrt(),
        b.iter().map(|y| (y - mb).powi(2)).sum::<f64>().sqrt(),
    );
    if sa == 0.0 || sb == 0.0 {
        return None;
    }
    Some(cov / (sa * sb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;

    fn tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn catalog_item_without_features_is_all_unknown() {
        let cat = tmp("item_id,category\np1,squares\n");
        let items = load_items(cat.path(), None).unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].category, Category::Squares);
        assert!(items[0].features.iter().all(|e| !e.is_known()));
    }

    #[test]
    fn feature_rows_attach_to_items() {
        let cat = tmp("item_id,category\np1,squares\n");
        let feats = tmp("item_id,feature,value,count\np1,crowding,4.2,9\n");
        let items = load_items(cat.path(), Some(feats.path())).unwrap();
        let ev = items[0].feature(Feature::Crowding);
        assert_eq!((ev.value, ev.count), (4.2, 9));
        assert!(!items[0].feature(Feature::Noise).is_known());
    }

    #[test]
    fn bad_feature_rows_are_rejected() {
        let cat = tmp("item_id,category\np1,squares\n");
        let too_big = tmp("item_id,feature,value,count\np1,crowding,5.5,1\n");
        let err = load_items(cat.path(), Some(too_big.path())).unwrap_err();
        assert!(err.to_string().contains("value out of range"), "{err}");

        let zero_count = tmp("item_id,feature,value,count\np1,crowding,4,0\n");
        assert!(load_items(cat.path(), Some(zero_count.path())).is_err());

        let dangling = tmp("item_id,feature,value,count\nghost,crowding,4,1\n");
        let err = load_items(cat.path(), Some(dangling.path())).unwrap_err();
        assert!(err.to_string().contains("ghost"), "{err}");
    }

    #[test]
    fn unknown_category_is_rejected() {
        let cat = tmp("item_id,category\np1,arcades\n");
        assert!(load_items(cat.path(), None).is_err());
    }

    #[test]
    fn category_parsing_accepts_spaced_names() {
        assert_eq!(
            "pubs and coffee shops".parse::<Category>().unwrap(),
            Category::PubsAndCoffeeShops
        );
        assert_eq!("Squares".parse::<Category>().unwrap(), Category::Squares);
    }

    #[test]
    fn legacy_table_without_counts_defaults_to_one() {
        let feats = tmp("item_id,feature,value\np1,noise,3.5\n");
        let table = load_feature_table(feats.path()).unwrap();
        assert_eq!(table["p1"][Feature::Noise.index()].count, 1);
    }

    fn users_csv(rows: &[&str]) -> String {
        let mut s = String::from("user_id");
        for c in PREF_COLUMNS.iter().chain(AVERSION_COLUMNS.iter()) {
            s += &format!(",{c}");
        }
        s.push('\n');
        for r in rows {
            s += r;
            s.push('\n');
        }
        s
    }

    const NEUTRAL: &str = "u1,3,3,3,3,3,3,3,3,3,3,3,3,3,1,1,1,1,1,1,1";

    #[test]
    fn neutral_user_loads() {
        let f = tmp(&users_csv(&[NEUTRAL]));
        let users = load_users(f.path()).unwrap();
        assert_eq!(users[0].preference(Category::Bookshops), 3.0);
        assert_eq!(users[0].aversions.openness_high, 1.0);
        assert!(users[0].has_preference(Category::Squares));
    }

    #[test]
    fn missing_aversion_column_is_an_error() {
        let mut s = String::from("user_id");
        for c in PREF_COLUMNS {
            s += &format!(",{c}");
        }
        for c in &AVERSION_COLUMNS[..6] {
            s += &format!(",{c}");
        }
        s += "\nu1,3,3,3,3,3,3,3,3,3,3,3,3,3,1,1,1,1,1,1\n";
        let f = tmp(&s);
        let err = load_users(f.path()).unwrap_err();
        assert!(err.to_string().contains("av_openness_high"), "{err}");
    }

    #[test]
    fn out_of_range_profile_values_are_rejected() {
        let f = tmp(&users_csv(&["u1,6,3,3,3,3,3,3,3,3,3,3,3,3,1,1,1,1,1,1,1"]));
        assert!(load_users(f.path()).is_err());
        let f = tmp(&users_csv(&["u1,3,3,3,3,3,3,3,3,3,3,3,3,3,0,1,1,1,1,1,1"]));
        assert!(load_users(f.path()).is_err());
    }

    fn one_user_one_item() -> (Vec<UserProfile>, Vec<ItemProfile>) {
        let uf = tmp(&users_csv(&[NEUTRAL]));
        let cf = tmp("item_id,category\np1,squares\n");
        (load_users(uf.path()).unwrap(), load_items(cf.path(), None).unwrap())
    }

    #[test]
    fn ratings_validate_range_and_references() {
        let (users, items) = one_user_one_item();
        let ok = tmp("user_id,item_id,rating\nu1,p1,4\n");
        let ratings = load_ratings(ok.path(), &users, &items).unwrap();
        assert_eq!(ratings[0].value, 4);

        let bad = tmp("user_id,item_id,rating\nu1,p1,6\n");
        assert!(load_ratings(bad.path(), &users, &items).is_err());
        let dangling = tmp("user_id,item_id,rating\nu9,p1,4\n");
        assert!(load_ratings(dangling.path(), &users, &items).is_err());
        let dup = tmp("user_id,item_id,rating\nu1,p1,4\nu1,p1,5\n");
        assert!(load_ratings(dup.path(), &users, &items).is_err());
    }

    #[test]
    fn fuse_feature_matches_the_weighted_mean() {
        let fused = fuse_feature(FeatureEvidence::known(4.0, 3), FeatureEvidence::known(2.0, 1));
        assert_eq!((fused.value, fused.count), (3.5, 4));

        let pass = fuse_feature(FeatureEvidence::unknown(), FeatureEvidence::known(2.56, 42));
        assert_eq!((pass.value, pass.count), (2.56, 42));

        let none = fuse_feature(FeatureEvidence::unknown(), FeatureEvidence::unknown());
        assert_eq!((none.value, none.count), (0.0, 0));
    }

    #[test]
    fn fusion_is_symmetric_convex_and_identity_on_unknown() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let a = FeatureEvidence::known(rng.gen_range(1.0..=5.0), rng.gen_range(1..20));
            let b = FeatureEvidence::known(rng.gen_range(1.0..=5.0), rng.gen_range(1..20));
            let ab = fuse_feature(a, b);
            let ba = fuse_feature(b, a);
            assert_eq!(ab, ba);
            assert!(ab.value >= a.value.min(b.value) - 1e-12);
            assert!(ab.value <= a.value.max(b.value) + 1e-12);
            assert_eq!(fuse_feature(a, FeatureEvidence::unknown()), a);
        }
    }

    fn item(id: &str, cat: Category, values: [(f64, u32); 5]) -> ItemProfile {
        ItemProfile {
            item_id: id.into(),
            category: cat,
            features: values.map(|(value, count)| FeatureEvidence { value, count }),
        }
    }

    #[test]
    fn profile_fusion_unions_and_checks_categories() {
        let a = vec![
            item("p1", Category::Squares, [(4.0, 2); 5]),
            item("p2", Category::Libraries, [(3.0, 1); 5]),
        ];
        let b = vec![
            item("p1", Category::Squares, [(2.0, 2); 5]),
            item("p3", Category::Bookshops, [(5.0, 1); 5]),
        ];
        let fused = fuse_profiles(&a, &b).unwrap();
        assert_eq!(fused.len(), 3);
        assert_eq!(fused[0].features[0].value, 3.0);
        assert_eq!(fused[0].features[0].count, 4);
        // Single-source items pass through untouched.
        assert_eq!(fused[1], a[1]);
        assert_eq!(fused[2], b[1]);

        let clash = vec![item("p1", Category::Libraries, [(2.0, 2); 5])];
        assert!(fuse_profiles(&a, &clash).is_err());
    }

    #[test]
    fn self_fusion_keeps_values_and_doubles_counts() {
        let a = vec![item("p1", Category::Squares, [(4.2, 3); 5])];
        let fused = fuse_profiles(&a, &a).unwrap();
        for ev in fused[0].features {
            assert!((ev.value - 4.2).abs() < 1e-12);
            assert_eq!(ev.count, 6);
        }
    }

    fn table(rows: &[(&str, [(f64, u32); 5])]) -> FeatureTable {
        rows.iter()
            .map(|(id, vals)| {
                (
                    id.to_string(),
                    vals.map(|(value, count)| FeatureEvidence { value, count }),
                )
            })
            .collect()
    }

    #[test]
    fn identical_sources_compare_as_equal() {
        let a = table(&[("p1", [(1.0, 1); 5]), ("p2", [(3.0, 1); 5])]);
        let cmp = compare_sources(&a, &a);
        for c in cmp {
            assert_eq!(c.common, 2);
            assert_eq!((c.min, c.max, c.mean, c.sd), (0.0, 0.0, 0.0, 0.0));
            assert!((c.pearson.unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(c.mean_diff, 0.0);
        }
    }

    #[test]
    fn two_point_comparison_hand_oracle() {
        let a = table(&[("p1", [(1.0, 1); 5]), ("p2", [(3.0, 1); 5])]);
        let b = table(&[("p1", [(3.0, 1); 5]), ("p2", [(1.0, 1); 5])]);
        let cmp = compare_sources(&a, &b);
        for c in cmp {
            assert_eq!(c.mean, 2.0);
            assert!((c.pearson.unwrap() + 1.0).abs() < 1e-12);
            assert!(c.mean_diff.abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_with_too_few_points_has_no_correlation() {
        let a = table(&[("p1", [(2.0, 1); 5])]);
        let cmp = compare_sources(&a, &a);
        assert_eq!(cmp[0].common, 1);
        assert_eq!(cmp[0].pearson, None);
    }

    #[test]
    fn feature_table_round_trips_through_csv() {
        let t = table(&[("p1", [(4.25, 3), (0.0, 0), (3.0, 1), (0.0, 0), (1.5, 9)])]);
        let f = tmp(&feature_table_to_csv(&t));
        let back = load_feature_table(f.path()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn users_and_ratings_round_trip_through_csv() {
        let (users, items) = one_user_one_item();
        let f = tmp(&users_to_csv(&users));
        assert_eq!(load_users(f.path()).unwrap(), users);

        let ratings = vec![Rating {
            user_id: "u1".into(),
            item_id: "p1".into(),
            value: 5,
        }];
        let f = tmp(&ratings_to_csv(&ratings));
        assert_eq!(load_ratings(f.path(), &users, &items).unwrap(), ratings);

        let f = tmp(&items_to_csv(&items));
        assert_eq!(load_items(f.path(), None).unwrap(), items);
    }
}
