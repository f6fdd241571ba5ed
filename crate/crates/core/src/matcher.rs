//! Per-attribute evidence, naive-Bayes fusion and the deduplication driver.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::blocking::{build_index, find_candidates};
use crate::cleaning::clean_record;
use crate::comparators::{compare_values, Similarity};
use crate::ingest::KnowledgeBase;
use crate::record::{AttributeSpec, LinkSet, MatchConfig, PairKey, Record, RecordError};

/// Inputs to the fold are clamped to `[EPSILON, 1 - EPSILON]`.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("contradictory certainty: cannot combine probabilities 0 and 1")]
    ContradictoryCertainty,
    #[error("record {id:?} carries unknown attribute `{attribute}`")]
    SchemaMismatch { id: String, attribute: String },
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Maps a similarity linearly onto `[spec.low, spec.high]`; the endpoints
/// are reproduced exactly.
pub fn attribute_probability(sim: Similarity, spec: &AttributeSpec) -> f64 {
    let s = sim.value();
    spec.low * (1.0 - s) + spec.high * s
}

/// Bayes' rule for two independent pieces of evidence:
/// `pq / (pq + (1-p)(1-q))`.
pub fn combine_bayes(p: f64, q: f64) -> Result<f64, MatchError> {
    let yes = p * q;
    let no = (1.0 - p) * (1.0 - q);
    let total = yes + no;
    if total == 0.0 {
        return Err(MatchError::ContradictoryCertainty);
    }
    Ok(yes / total)
}

fn clamp(p: f64) -> f64 {
    p.clamp(EPSILON, 1.0 - EPSILON)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeEvidence {
    pub attribute: String,
    /// `None` when either side is missing or unparseable.
    pub similarity: Option<Similarity>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    pub pair: PairKey,
    pub probability: f64,
    pub evidence: Vec<AttributeEvidence>,
    pub is_match: bool,
}

fn check_schema(record: &Record, config: &MatchConfig) -> Result<(), MatchError> {
    match record.values.keys().find(|k| config.attribute(k).is_none()) {
        Some(attribute) => Err(MatchError::SchemaMismatch {
            id: record.id.clone(),
            attribute: attribute.clone(),
        }),
        None => Ok(()),
    }
}

/// Scores one pair of cleaned records.
///
/// Every configured attribute contributes a probability (the prior when the
/// evidence is missing); the contributions are folded with [`combine_bayes`]
/// starting from the prior.
pub fn compare_records(
    a: &Record,
    b: &Record,
    config: &MatchConfig,
) -> Result<PairVerdict, MatchError> {
    let pair = PairKey::new(&a.id, &b.id)?;
    check_schema(a, config)?;
    check_schema(b, config)?;

    let mut probability = config.prior;
    let mut evidence = Vec::with_capacity(config.attributes.len());
    for spec in &config.attributes {
        let similarity = compare_values(spec.comparator, a.get(&spec.name), b.get(&spec.name));
        let p = match similarity {
            Some(sim) => attribute_probability(sim, spec),
            None => config.prior,
        };
        probability = combine_bayes(probability, clamp(p))?;
        evidence.push(AttributeEvidence {
            attribute: spec.name.clone(),
            similarity,
            probability: p,
        });
    }
    Ok(PairVerdict {
        pair,
        probability,
        evidence,
        is_match: probability >= config.threshold,
    })
}

/// Summary of one deduplication run.
#[derive(Debug, Clone, PartialEq)]
pub struct DedupRun {
    pub links: LinkSet,
    pub records: usize,
    /// Distinct unordered pairs produced by blocking and scored.
    pub candidate_pairs: usize,
}

/// Finds duplicate links within `kb`, single-threaded.
pub fn deduplicate(kb: &KnowledgeBase, config: &MatchConfig) -> Result<LinkSet, MatchError> {
    Ok(deduplicate_with(kb, config, 1)?.links)
}

/// Cleans, blocks and scores `kb` with `jobs` worker threads. The output is
/// identical for every value of `jobs`.
pub fn deduplicate_with(
    kb: &KnowledgeBase,
    config: &MatchConfig,
    jobs: usize,
) -> Result<DedupRun, MatchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| MatchError::Pool(e.to_string()))?;
    pool.install(|| run(kb, config))
}

fn run(kb: &KnowledgeBase, config: &MatchConfig) -> Result<DedupRun, MatchError> {
    for record in kb.iter() {
        check_schema(record, config)?;
    }

    let records: Vec<&Record> = kb.iter().collect();
    let cleaned: Vec<Record> = records
        .par_iter()
        .map(|r| clean_record(r, config))
        .collect();
    let mut cleaned_kb = KnowledgeBase::new(kb.schema.clone());
    for record in cleaned {
        cleaned_kb.records.insert(record.id.clone(), record);
    }
    let index = build_index(&cleaned_kb, config);

    let pairs: BTreeSet<(usize, usize)> = (0..cleaned_kb.len())
        .into_par_iter()
        .map(|i| {
            find_candidates(&index, &cleaned_kb.records[i], config)
                .into_iter()
                .filter_map(|id| cleaned_kb.records.get_index_of(&id))
                .map(|j| {
                    let (x, y) = (&cleaned_kb.records[i].id, &cleaned_kb.records[j].id);
                    if x < y {
                        (i, j)
                    } else {
                        (j, i)
                    }
                })
                .collect::<Vec<_>>()
        })
        .flatten_iter()
        .collect();
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();

    let verdicts: Vec<(PairKey, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| compare_records(&cleaned_kb.records[i], &cleaned_kb.records[j], config))
        .filter_map(|v| match v {
            Ok(v) if v.is_match => Some(Ok((v.pair, v.probability))),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()?;

    Ok(DedupRun {
        links: verdicts.into_iter().collect(),
        records: kb.len(),
        candidate_pairs: pairs.len(),
    })
}
