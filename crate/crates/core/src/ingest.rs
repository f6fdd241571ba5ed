//! Loading and writing knowledge bases, link files and match configurations.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::Deserialize;
use thiserror::Error;

use crate::record::{
    AttributeSpec, ComparatorKind, ConfigError, LinkSet, MatchConfig, PairKey, Record,
    DEFAULT_MAX_CANDIDATES, DEFAULT_MIN_SHARED_TOKENS, DEFAULT_PRIOR,
};

/// Separator for multiple values inside one CSV cell.
pub const MULTI_VALUE_SEPARATOR: char = '|';

/// Default configuration reproducing the real-estate listing setup.
pub const DEFAULT_CONFIG_JSON: &str = include_str!("../config/default.json");

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("missing id column `{0}` in header")]
    MissingIdColumn(String),
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("malformed row at line {0}")]
    MalformedRow(u64),
    #[error("self-link at line {0}")]
    SelfPair(u64),
    #[error("malformed link at line {0}")]
    MalformedLine(u64),
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Records keyed by id in file order, plus the header columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    pub records: IndexMap<String, Record>,
    /// Column names in file order, id column included.
    pub schema: Vec<String>,
}

impl KnowledgeBase {
    pub fn new(schema: Vec<String>) -> Self {
        KnowledgeBase {
            records: IndexMap::new(),
            schema,
        }
    }

    pub fn insert(&mut self, record: Record) -> Result<(), IngestError> {
        if self.records.contains_key(&record.id) {
            return Err(IngestError::DuplicateId(record.id));
        }
        self.records.insert(record.id.clone(), record);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Record> {
        self.records.get(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Record> {
        self.records.values()
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|e| IngestError::io(path, e))
}

pub fn load_kb(path: impl AsRef<Path>, config: &MatchConfig) -> Result<KnowledgeBase, IngestError> {
    let path = path.as_ref();
    read_kb(open(path)?, config)
}

/// Parses a knowledge base from CSV. Empty cells are missing values; a cell
/// may hold several values separated by `|`.
pub fn read_kb<R: Read>(reader: R, config: &MatchConfig) -> Result<KnowledgeBase, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();

    let id_col = header
        .iter()
        .position(|h| *h == config.id_attribute)
        .ok_or_else(|| IngestError::MissingIdColumn(config.id_attribute.clone()))?;
    let mut seen = HashSet::new();
    for name in &header {
        if (name != &config.id_attribute && config.attribute(name).is_none())
            || !seen.insert(name.as_str())
        {
            return Err(IngestError::UnknownColumn(name.clone()));
        }
    }

    let mut kb = KnowledgeBase::new(header.clone());
    let mut row = csv::StringRecord::new();
    loop {
        let line = csv.position().line();
        if !csv.read_record(&mut row)? {
            break;
        }
        if row.len() != header.len() {
            return Err(IngestError::MalformedRow(line));
        }
        let id = &row[id_col];
        if id.is_empty() {
            return Err(IngestError::MalformedRow(line));
        }
        let mut record = Record::new(id);
        for (i, (name, cell)) in header.iter().zip(row.iter()).enumerate() {
            if i == id_col {
                continue;
            }
            let values = cell
                .split(MULTI_VALUE_SEPARATOR)
                .filter(|v| !v.is_empty())
                .map(str::to_string)
                .collect();
            record.values.insert(name.clone(), values);
        }
        kb.insert(record)?;
    }
    Ok(kb)
}

/// Writes a knowledge base as CSV with `kb.schema` as header.
pub fn write_kb<W: Write>(
    kb: &KnowledgeBase,
    id_attribute: &str,
    writer: W,
) -> Result<(), IngestError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(&kb.schema)?;
    let sep = MULTI_VALUE_SEPARATOR.to_string();
    for record in kb.iter() {
        let row: Vec<String> = kb
            .schema
            .iter()
            .map(|col| {
                if col == id_attribute {
                    record.id.clone()
                } else {
                    record.get(col).join(&sep)
                }
            })
            .collect();
        csv.write_record(&row)?;
    }
    csv.flush().map_err(|e| IngestError::Csv(e.into()))?;
    Ok(())
}

pub fn save_kb(
    kb: &KnowledgeBase,
    id_attribute: &str,
    path: impl AsRef<Path>,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_kb(kb, id_attribute, BufWriter::new(file))
}

pub fn load_links(path: impl AsRef<Path>) -> Result<LinkSet, IngestError> {
    let path = path.as_ref();
    read_links(BufReader::new(open(path)?)).map_err(|e| match e {
        IngestError::Io { source, .. } => IngestError::io(path, source),
        other => other,
    })
}

/// Parses a TSV links file: `id_a<TAB>id_b[<TAB>probability]`, no header.
/// Blank lines are skipped.
pub fn read_links<R: BufRead>(reader: R) -> Result<LinkSet, IngestError> {
    let mut links = LinkSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n as u64 + 1;
        let line = line.map_err(|e| IngestError::io(Path::new("<links>"), e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (a, b, p) = match fields.as_slice() {
            [a, b] => (*a, *b, 1.0),
            [a, b, p] => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| IngestError::MalformedLine(line_no))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(IngestError::MalformedLine(line_no));
                }
                (*a, *b, p)
            }
            _ => return Err(IngestError::MalformedLine(line_no)),
        };
        if a.is_empty() || b.is_empty() {
            return Err(IngestError::MalformedLine(line_no));
        }
        let key = PairKey::new(a, b).map_err(|_| IngestError::SelfPair(line_no))?;
        links.insert_key(key, p);
    }
    Ok(links)
}

/// One line per link sorted by `(a, b)`, probability with six decimals.
pub fn write_links_to<W: Write>(links: &LinkSet, mut writer: W) -> io::Result<()> {
    for link in links.iter() {
        writeln!(writer, "{}\t{}\t{:.6}", link.a, link.b, link.probability)?;
    }
    writer.flush()
}

pub fn write_links(links: &LinkSet, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_links_to(links, BufWriter::new(file)).map_err(|e| IngestError::io(path, e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    threshold: f64,
    #[serde(default = "default_prior")]
    prior: f64,
    #[serde(default = "default_max_candidates")]
    max_candidates: usize,
    #[serde(default = "default_min_shared_tokens")]
    min_shared_tokens: usize,
    id_attribute: String,
    attributes: Vec<RawAttribute>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttribute {
    name: String,
    comparator: ComparatorKind,
    low: f64,
    high: f64,
    searchable: Option<bool>,
}

fn default_prior() -> f64 {
    DEFAULT_PRIOR
}

fn default_max_candidates() -> usize {
    DEFAULT_MAX_CANDIDATES
}

fn default_min_shared_tokens() -> usize {
    DEFAULT_MIN_SHARED_TOKENS
}

/// Parses and validates a JSON match configuration.
pub fn parse_config(json: &str) -> Result<MatchConfig, IngestError> {
    let raw: RawConfig = serde_json::from_str(json).map_err(|e| {
        // serde's message carries the offending field for most schema errors
        ConfigError::SchemaViolation(e.to_string())
    })?;
    let config = MatchConfig {
        id_attribute: raw.id_attribute,
        attributes: raw
            .attributes
            .into_iter()
            .map(|a| AttributeSpec {
                searchable: a.searchable.unwrap_or(a.comparator.searchable_by_default()),
                name: a.name,
                comparator: a.comparator,
                low: a.low,
                high: a.high,
            })
            .collect(),
        threshold: raw.threshold,
        prior: raw.prior,
        max_candidates: raw.max_candidates,
        min_shared_tokens: raw.min_shared_tokens,
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<MatchConfig, IngestError> {
    let path = path.as_ref();
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| IngestError::io(path, e))?;
    parse_config(&text)
}

/// The bundled default configuration.
pub fn default_config() -> MatchConfig {
    parse_config(DEFAULT_CONFIG_JSON).expect("bundled config is valid")
}

/// Serializes a config back to the JSON file format.
pub fn config_to_json(config: &MatchConfig) -> String {
    let attributes: Vec<serde_json::Value> = config
        .attributes
        .iter()
        .map(|a| {
            serde_json::json!({
                "name": a.name,
                "comparator": a.comparator,
                "low": a.low,
                "high": a.high,
                "searchable": a.searchable,
            })
        })
        .collect();
    let value = serde_json::json!({
        "threshold": config.threshold,
        "prior": config.prior,
        "max_candidates": config.max_candidates,
        "min_shared_tokens": config.min_shared_tokens,
        "id_attribute": config.id_attribute,
        "attributes": attributes,
    });
    serde_json::to_string_pretty(&value).expect("config serializes")
}
