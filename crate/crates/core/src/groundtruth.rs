//! Ground-truth construction from expert duplicate groups.
//!
//! The groups are shuffled with a seeded generator and split in half. Every
//! member of a group in the first half is kept and linked to every other
//! member; from each group in the second half one random member is kept and
//! no links are recorded. Records outside every group are dropped.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ingest::KnowledgeBase;
use crate::record::LinkSet;

#[derive(Debug, Error)]
pub enum GroundTruthError {
    #[error("group references unknown record id {0:?}")]
    UnknownId(String),
    #[error("group {0} has fewer than two distinct members")]
    GroupTooSmall(usize),
    #[error("record id {0:?} appears in more than one group")]
    RepeatedId(String),
    #[error("need at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Ids of listings that describe the same property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateGroup {
    pub member_ids: Vec<String>,
}

impl DuplicateGroup {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Self {
        DuplicateGroup {
            member_ids: ids.into_iter().map(Into::into).collect(),
        }
    }
}

/// Reads a groups file: one group per line, ids separated by tabs.
pub fn read_groups<R: BufRead>(reader: R) -> Result<Vec<DuplicateGroup>, GroundTruthError> {
    let mut groups = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let ids: Vec<&str> = line
            .trim_end_matches('\r')
            .split('\t')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if !ids.is_empty() {
            groups.push(DuplicateGroup::new(ids));
        }
    }
    Ok(groups)
}

pub fn load_groups(path: impl AsRef<Path>) -> Result<Vec<DuplicateGroup>, GroundTruthError> {
    read_groups(BufReader::new(File::open(path)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub kb: KnowledgeBase,
    pub links: LinkSet,
    /// Groups kept whole, in shuffled order.
    pub duplicate_groups: Vec<DuplicateGroup>,
    /// Groups reduced to one member, in shuffled order.
    pub unique_groups: Vec<DuplicateGroup>,
}

fn validate(groups: &[DuplicateGroup], kb: &KnowledgeBase) -> Result<(), GroundTruthError> {
    if groups.len() < 2 {
        return Err(GroundTruthError::TooFewGroups(groups.len()));
    }
    let mut seen = HashSet::new();
    for (i, group) in groups.iter().enumerate() {
        if group.member_ids.len() < 2 {
            return Err(GroundTruthError::GroupTooSmall(i));
        }
        let mut within = HashSet::new();
        for id in &group.member_ids {
            if kb.get(id).is_none() {
                return Err(GroundTruthError::UnknownId(id.clone()));
            }
            if !within.insert(id.as_str()) {
                return Err(GroundTruthError::GroupTooSmall(i));
            }
            if !seen.insert(id.as_str()) {
                return Err(GroundTruthError::RepeatedId(id.clone()));
            }
        }
    }
    Ok(())
}

/// Builds the evaluation knowledge base and truth links. The first
/// `ceil(n / 2)` shuffled groups form the duplicates half.
pub fn generate_ground_truth(
    groups: &[DuplicateGroup],
    kb: &KnowledgeBase,
    seed: u64,
) -> Result<GroundTruth, GroundTruthError> {
    validate(groups, kb)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = groups.to_vec();
    shuffled.shuffle(&mut rng);
    let unique_groups = shuffled.split_off(shuffled.len().div_ceil(2));
    let duplicate_groups = shuffled;

    let mut keep: HashSet<&str> = HashSet::new();
    let mut links = LinkSet::new();
    for group in &duplicate_groups {
        let ids = &group.member_ids;
        keep.extend(ids.iter().map(String::as_str));
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                links.insert(a, b, 1.0).expect("group members are distinct");
            }
        }
    }
    for group in &unique_groups {
        let pick = rng.random_range(0..group.member_ids.len());
        keep.insert(&group.member_ids[pick]);
    }

    let mut out = KnowledgeBase::new(kb.schema.clone());
    for record in kb.iter().filter(|r| keep.contains(r.id.as_str())) {
        out.records.insert(record.id.clone(), record.clone());
    }

    Ok(GroundTruth {
        kb: out,
        links,
        duplicate_groups,
        unique_groups,
    })
}
