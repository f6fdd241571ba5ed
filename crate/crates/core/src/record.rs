//! Domain types shared by every stage of the pipeline.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("self-link: record {0:?} cannot be linked to itself")]
    SelfPair(String),
}

/// One listing: an opaque identifier plus raw attribute values.
///
/// An empty value list means the attribute is missing. Values are kept as
/// loaded; cleaning produces a new record rather than mutating this one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub values: HashMap<String, Vec<String>>,
}

impl Record {
    pub fn new(id: impl Into<String>) -> Self {
        Record {
            id: id.into(),
            values: HashMap::new(),
        }
    }

    /// Builder-style helper, mostly for tests and fixtures.
    pub fn with(mut self, attribute: &str, values: &[&str]) -> Self {
        self.values.insert(
            attribute.to_string(),
            values.iter().map(|v| v.to_string()).collect(),
        );
        self
    }

    /// Values for `attribute`, or an empty slice when missing.
    pub fn get(&self, attribute: &str) -> &[String] {
        self.values.get(attribute).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparatorKind {
    Levenshtein,
    JaroWinkler,
    Exact,
    Numeric,
    Geoposition,
}

impl ComparatorKind {
    /// Comparators that operate on cleaned free text.
    pub fn is_string(self) -> bool {
        matches!(
            self,
            ComparatorKind::Levenshtein | ComparatorKind::JaroWinkler | ComparatorKind::Exact
        )
    }

    /// Whether attributes using this comparator are indexed for blocking
    /// when the config does not say.
    pub fn searchable_by_default(self) -> bool {
        self.is_string()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ComparatorKind::Levenshtein => "levenshtein",
            ComparatorKind::JaroWinkler => "jaro_winkler",
            ComparatorKind::Exact => "exact",
            ComparatorKind::Numeric => "numeric",
            ComparatorKind::Geoposition => "geoposition",
        }
    }
}

impl fmt::Display for ComparatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Matching rule for one attribute.
///
/// `low` is the probability that two records are duplicates when the
/// attribute values are completely different, `high` when they are exactly
/// the same.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub comparator: ComparatorKind,
    pub low: f64,
    pub high: f64,
    pub searchable: bool,
}

impl AttributeSpec {
    pub fn new(name: &str, comparator: ComparatorKind, low: f64, high: f64) -> Self {
        AttributeSpec {
            name: name.to_string(),
            comparator,
            low,
            high,
            searchable: comparator.searchable_by_default(),
        }
    }
}

pub const DEFAULT_PRIOR: f64 = 0.5;
pub const DEFAULT_THRESHOLD: f64 = 0.75;
pub const DEFAULT_MAX_CANDIDATES: usize = 100;
pub const DEFAULT_MIN_SHARED_TOKENS: usize = 1;

/// Full engine configuration.
///
/// Constructed through [`crate::ingest::parse_config`] or
/// [`MatchConfig::new`], both of which validate the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub id_attribute: String,
    pub attributes: Vec<AttributeSpec>,
    pub threshold: f64,
    pub prior: f64,
    pub max_candidates: usize,
    pub min_shared_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("schema violation in field `{0}`")]
    SchemaViolation(String),
    #[error("attribute `{0}` has low probability above high probability")]
    ProbabilityOrder(String),
}

impl MatchConfig {
    pub fn new(
        id_attribute: &str,
        attributes: Vec<AttributeSpec>,
        threshold: f64,
    ) -> Result<Self, ConfigError> {
        let config = MatchConfig {
            id_attribute: id_attribute.to_string(),
            attributes,
            threshold,
            prior: DEFAULT_PRIOR,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            min_shared_tokens: DEFAULT_MIN_SHARED_TOKENS,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let violation = |field: &str| Err(ConfigError::SchemaViolation(field.to_string()));

        if self.id_attribute.is_empty() {
            return violation("id_attribute");
        }
        if !(0.5..=1.0).contains(&self.threshold) {
            return violation("threshold");
        }
        if !(self.prior > 0.0 && self.prior < 1.0) {
            return violation("prior");
        }
        if self.max_candidates == 0 {
            return violation("max_candidates");
        }
        if self.min_shared_tokens == 0 {
            return violation("min_shared_tokens");
        }
        let mut seen = std::collections::HashSet::new();
        for spec in &self.attributes {
            if spec.name.is_empty() {
                return violation("attributes.name");
            }
            if spec.name == self.id_attribute || !seen.insert(spec.name.as_str()) {
                return Err(ConfigError::SchemaViolation(format!(
                    "attributes.{}",
                    spec.name
                )));
            }
            for (field, p) in [("low", spec.low), ("high", spec.high)] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(ConfigError::SchemaViolation(format!(
                        "attributes.{}.{field}",
                        spec.name
                    )));
                }
            }
            if spec.low > spec.high {
                return Err(ConfigError::ProbabilityOrder(spec.name.clone()));
            }
        }
        Ok(())
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeSpec> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self, ConfigError> {
        self.threshold = threshold;
        self.validate()?;
        Ok(self)
    }
}

/// Canonical unordered pair of record ids: `a < b` byte-wise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    a: String,
    b: String,
}

impl PairKey {
    pub fn new(x: &str, y: &str) -> Result<Self, RecordError> {
        let (a, b) = canonical_pair(x, y)?;
        Ok(PairKey {
            a: a.to_string(),
            b: b.to_string(),
        })
    }

    pub fn a(&self) -> &str {
        &self.a
    }

    pub fn b(&self) -> &str {
        &self.b
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Orders two distinct ids byte-wise.
pub fn canonical_pair<'a>(x: &'a str, y: &'a str) -> Result<(&'a str, &'a str), RecordError> {
    match x.as_bytes().cmp(y.as_bytes()) {
        std::cmp::Ordering::Less => Ok((x, y)),
        std::cmp::Ordering::Greater => Ok((y, x)),
        std::cmp::Ordering::Equal => Err(RecordError::SelfPair(x.to_string())),
    }
}

/// An asserted identity link between two records.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub a: String,
    pub b: String,
    pub probability: f64,
}

/// Set of identity links keyed by canonical pair. Iteration is sorted by
/// `(a, b)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkSet {
    links: BTreeMap<PairKey, f64>,
}

impl LinkSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a link in either orientation. Re-inserting an existing pair
    /// keeps the first probability and returns `false`.
    pub fn insert(&mut self, x: &str, y: &str, probability: f64) -> Result<bool, RecordError> {
        let key = PairKey::new(x, y)?;
        Ok(self.insert_key(key, probability))
    }

    pub fn insert_key(&mut self, key: PairKey, probability: f64) -> bool {
        match self.links.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(probability);
                true
            }
            btree_map::Entry::Occupied(_) => false,
        }
    }

    pub fn contains(&self, x: &str, y: &str) -> bool {
        PairKey::new(x, y)
            .map(|k| self.links.contains_key(&k))
            .unwrap_or(false)
    }

    pub fn contains_key(&self, key: &PairKey) -> bool {
        self.links.contains_key(key)
    }

    pub fn probability(&self, x: &str, y: &str) -> Option<f64> {
        PairKey::new(x, y)
            .ok()
            .and_then(|k| self.links.get(&k).copied())
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &PairKey> {
        self.links.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = Link> + '_ {
        self.links.iter().map(|(k, &p)| Link {
            a: k.a.clone(),
            b: k.b.clone(),
            probability: p,
        })
    }

    /// Union with another set; pairs already present keep their probability.
    pub fn merge(&mut self, other: LinkSet) {
        for (k, p) in other.links {
            self.links.entry(k).or_insert(p);
        }
    }
}

impl FromIterator<(PairKey, f64)> for LinkSet {
    fn from_iter<T: IntoIterator<Item = (PairKey, f64)>>(iter: T) -> Self {
        let mut set = LinkSet::new();
        for (k, p) in iter {
            set.insert_key(k, p);
        }
        set
    }
}
