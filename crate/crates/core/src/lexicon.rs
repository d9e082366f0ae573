//! Sensory-feature and grade-modifier dictionaries.
//!
//! The extraction stage matches review lemmas against two hand-curated
//! dictionaries. The sensory dictionary maps a word to a feature, a base
//! position on the rating scale, and a direction of change under grade
//! modifiers. The modifier dictionary maps adverbs such as "tanto" or
//! "poco" to an impact in {-2, -1, 1, 2}.
//!
//! Both dictionaries are plain TSV files with `#` comment lines, so
//! linguists can edit them without tooling. Lookup is exact on the
//! lowercase lemma. A word may appear in at most one of the two
//! dictionaries because the extractor treats sensory words and modifiers
//! as disjoint node roles.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a feature's discomfort grows along the rating scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonotoneClass {
    /// Higher values are more bothersome (crowding, noise, smell).
    Increasing,
    /// Both extremes are bothersome while middle values are not
    /// (brightness, openness).
    VShaped,
}

/// The five sensory features of a place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Brightness,
    Crowding,
    Noise,
    Smell,
    Openness,
}

impl Feature {
    /// All features, in canonical vector order.
    pub const ALL: [Feature; 5] = [
        Feature::Brightness,
        Feature::Crowding,
        Feature::Noise,
        Feature::Smell,
        Feature::Openness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Brightness => "brightness",
            Feature::Crowding => "crowding",
            Feature::Noise => "noise",
            Feature::Smell => "smell",
            Feature::Openness => "openness",
        }
    }

    /// Index of this feature in [`Feature::ALL`].
    pub fn index(self) -> usize {
        match self {
            Feature::Brightness => 0,
            Feature::Crowding => 1,
            Feature::Noise => 2,
            Feature::Smell => 3,
            Feature::Openness => 4,
        }
    }

    /// Brightness and openness bother at both extremes; crowding, noise
    /// and smell only at the high end.
    pub fn monotone_class(self) -> MonotoneClass {
        match self {
            Feature::Brightness | Feature::Openness => MonotoneClass::VShaped,
            Feature::Crowding | Feature::Noise | Feature::Smell => MonotoneClass::Increasing,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brightness" => Ok(Feature::Brightness),
            "crowding" => Ok(Feature::Crowding),
            "noise" => Ok(Feature::Noise),
            "smell" => Ok(Feature::Smell),
            "openness" => Ok(Feature::Openness),
            other => Err(Error::invalid(format!("unknown feature name `{other}`"))),
        }
    }
}

/// One row of the sensory dictionary: word, feature, base value, direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensoryEntry {
    /// Lowercase lemma.
    pub word: String,
    pub feature: Feature,
    /// Basic positioning of the word on the `[1, 5]` scale.
    pub base: f64,
    /// Direction of change (+1 or -1) when a grade modifier applies.
    pub direction: i8,
}

/// One row of the modifier dictionary: word and impact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifierEntry {
    /// Lowercase lemma.
    pub word: String,
    /// Impact in {-2, -1, 1, 2}; the sign follows the modified word's
    /// direction, the magnitude its strength.
    pub impact: i8,
}

/// Sensory dictionary indexed by lowercase lemma.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SensoryLexicon {
    entries: BTreeMap<String, SensoryEntry>,
}

/// Modifier dictionary indexed by lowercase lemma.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModifierLexicon {
    entries: BTreeMap<String, ModifierEntry>,
}

impl SensoryLexicon {
    /// Loads a `word<TAB>feature<TAB>base<TAB>direction` file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses TSV text; `file` is only used in error messages.
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (line, word, fields) in tsv_rows(text, file, 4)? {
            let feature: Feature = fields[1]
                .parse()
                .map_err(|e: Error| Error::format(file, line, e.to_string()))?;
            let base: f64 = fields[2]
                .parse()
                .map_err(|_| Error::format(file, line, format!("invalid base `{}`", fields[2])))?;
            if !(1.0..=5.0).contains(&base) {
                return Err(Error::format(file, line, format!("base out of range: {base}")));
            }
            let direction: i8 = fields[3].parse().map_err(|_| {
                Error::format(file, line, format!("invalid direction `{}`", fields[3]))
            })?;
            if direction != 1 && direction != -1 {
                return Err(Error::format(
                    file,
                    line,
                    format!("direction must be +1 or -1, got {direction}"),
                ));
            }
            let entry = SensoryEntry {
                word: word.clone(),
                feature,
                base,
                direction,
            };
            if entries.insert(word.clone(), entry).is_some() {
                return Err(Error::format(file, line, format!("duplicate word `{word}`")));
            }
        }
        Ok(SensoryLexicon { entries })
    }

    /// Exact lookup on the lowercase lemma.
    pub fn get(&self, lemma: &str) -> Option<&SensoryEntry> {
        self.entries.get(lemma)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SensoryEntry> {
        self.entries.values()
    }

    /// Serializes back to the TSV format accepted by [`SensoryLexicon::parse`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            out += &format!("{}\t{}\t{}\t{}\n", e.word, e.feature, e.base, e.direction);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

impl ModifierLexicon {
    /// Loads a `word<TAB>impact` file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (line, word, fields) in tsv_rows(text, file, 2)? {
            let impact: i8 = fields[1]
                .parse()
                .map_err(|_| Error::format(file, line, format!("invalid impact `{}`", fields[1])))?;
            if !matches!(impact, -2 | -1 | 1 | 2) {
                return Err(Error::format(
                    file,
                    line,
                    format!("impact out of range: {impact} (admissible: -2, -1, 1, 2)"),
                ));
            }
            let entry = ModifierEntry {
                word: word.clone(),
                impact,
            };
            if entries.insert(word.clone(), entry).is_some() {
                return Err(Error::format(file, line, format!("duplicate word `{word}`")));
            }
        }
        Ok(ModifierLexicon { entries })
    }

    pub fn get(&self, lemma: &str) -> Option<&ModifierEntry> {
        self.entries.get(lemma)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ModifierEntry> {
        self.entries.values()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            out += &format!("{}\t{}\n", e.word, e.impact);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Verifies that no word belongs to both dictionaries.
pub fn check_disjoint(sensory: &SensoryLexicon, modifiers: &ModifierLexicon) -> Result<()> {
    for entry in modifiers.iter() {
        if sensory.get(&entry.word).is_some() {
            return Err(Error::invalid(format!(
                "word `{}` appears in both the sensory and the modifier dictionary",
                entry.word
            )));
        }
    }
    Ok(())
}

/// Splits TSV text into validated rows, lowercasing the word column.
/// Returns (1-based line, lowercased word, all fields).
fn tsv_rows<'a>(
    text: &'a str,
    file: &str,
    arity: usize,
) -> Result<Vec<(usize, String, Vec<&'a str>)>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != arity {
            return Err(Error::format(
                file,
                line,
                format!("expected {arity} tab-separated columns, found {}", fields.len()),
            ));
        }
        let word = fields[0].trim().to_lowercase();
        if word.is_empty() {
            return Err(Error::format(file, line, "empty word"));
        }
        rows.push((line, word, fields));
    }
    Ok(rows)
}
