//! Majority voting over per-character predictions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::OffsetSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnsembleError {
    #[error("ensemble needs at least one member")]
    NoMembers,
    #[error("expected {expected} member predictions, got {got}")]
    MemberCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteConfig {
    members: usize,
}

impl VoteConfig {
    pub fn new(members: usize) -> Result<Self, EnsembleError> {
        if members == 0 {
            return Err(EnsembleError::NoMembers);
        }
        Ok(VoteConfig { members })
    }

    pub fn members(&self) -> usize {
        self.members
    }

    /// Strict majority: `floor(k / 2) + 1`.
    pub fn threshold(&self) -> usize {
        self.members / 2 + 1
    }
}

/// Keeps the offsets predicted by at least `config.threshold()` members.
pub fn majority_vote(predictions: &[OffsetSet], config: &VoteConfig) -> Result<OffsetSet, EnsembleError> {
    if predictions.len() != config.members {
        return Err(EnsembleError::MemberCount { expected: config.members, got: predictions.len() });
    }
    let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
    for member in predictions {
        for o in member.iter() {
            *votes.entry(o).or_default() += 1;
        }
    }
    let threshold = config.threshold();
    Ok(votes.into_iter().filter(|&(_, n)| n >= threshold).map(|(o, _)| o).collect())
}
