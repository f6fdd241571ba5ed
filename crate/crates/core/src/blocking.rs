//! Candidate generation through an inverted token index over the searchable
//! string attributes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ingest::KnowledgeBase;
use crate::record::{MatchConfig, Record};

const MIN_TOKEN_CHARS: usize = 2;

/// Splits on whitespace and punctuation, dropping tokens shorter than two
/// characters. Order and repeats are preserved.
pub fn tokenize(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS)
        .map(str::to_string)
        .collect()
}

fn record_tokens(record: &Record, searchable: &[String]) -> Vec<String> {
    searchable
        .iter()
        .flat_map(|attr| record.get(attr))
        .flat_map(|v| tokenize(v))
        .collect()
}

/// Token → record ids, plus the token multiset of every indexed record.
#[derive(Debug, Clone, Default)]
pub struct InvertedIndex {
    postings: BTreeMap<String, BTreeSet<String>>,
    doc_tokens: BTreeMap<String, Vec<String>>,
    searchable: Vec<String>,
}

impl InvertedIndex {
    pub fn postings(&self, token: &str) -> Option<&BTreeSet<String>> {
        self.postings.get(token)
    }

    pub fn tokens(&self, id: &str) -> Option<&[String]> {
        self.doc_tokens.get(id).map(Vec::as_slice)
    }

    pub fn searchable(&self) -> &[String] {
        &self.searchable
    }

    pub fn len(&self) -> usize {
        self.doc_tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_tokens.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.postings.len()
    }
}

/// Attributes indexed for blocking: searchable and compared as strings.
pub fn searchable_attributes(config: &MatchConfig) -> Vec<String> {
    config
        .attributes
        .iter()
        .filter(|a| a.searchable && a.comparator.is_string())
        .map(|a| a.name.clone())
        .collect()
}

/// Indexes every record of an already-cleaned knowledge base.
pub fn build_index(kb: &KnowledgeBase, config: &MatchConfig) -> InvertedIndex {
    let searchable = searchable_attributes(config);
    let mut index = InvertedIndex {
        searchable,
        ..Default::default()
    };
    for record in kb.iter() {
        let tokens = record_tokens(record, &index.searchable);
        for token in &tokens {
            index
                .postings
                .entry(token.clone())
                .or_default()
                .insert(record.id.clone());
        }
        index.doc_tokens.insert(record.id.clone(), tokens);
    }
    index
}

/// Records sharing at least `min_shared_tokens` distinct tokens with `record`.
///
/// Ranked by shared-token count, descending, then id ascending, and cut at
/// `max_candidates`. The query record itself is never returned.
pub fn find_candidates(
    index: &InvertedIndex,
    record: &Record,
    config: &MatchConfig,
) -> Vec<String> {
    let query: BTreeSet<String> = record_tokens(record, &index.searchable)
        .into_iter()
        .collect();
    let mut shared: HashMap<&str, usize> = HashMap::new();
    for token in &query {
        if let Some(ids) = index.postings.get(token) {
            for id in ids {
                if id != &record.id {
                    *shared.entry(id.as_str()).or_default() += 1;
                }
            }
        }
    }
    let mut ranked: Vec<(&str, usize)> = shared
        .into_iter()
        .filter(|&(_, n)| n >= config.min_shared_tokens)
        .collect();
    ranked.sort_unstable_by(|(ia, na), (ib, nb)| nb.cmp(na).then_with(|| ia.cmp(ib)));
    ranked.truncate(config.max_candidates);
    ranked.into_iter().map(|(id, _)| id.to_string()).collect()
}
