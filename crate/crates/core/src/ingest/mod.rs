//! Loading the project/developer/commit metadata dataset.
//!
//! A dataset is a directory of strict-schema CSV files. Loading resolves
//! developer aliases first, then strips commit bots, then checks that every
//! commit row points at a known developer and project.

mod csvfile;
mod dataset;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trustcore::ContributionMatrix;
use crate::{DeveloperId, ProjectId};

pub use dataset::{load_dataset, load_dataset_reporting, write_dataset, DatasetBundle};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing required file {0}")]
    MissingFile(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: bad header, expected `{expected}`, found `{found}`")]
    BadHeader {
        file: String,
        expected: String,
        found: String,
    },
    #[error("{file}:{line}: malformed row: {reason}")]
    MalformedRow { file: String, line: u64, reason: String },
    #[error("{file}:{line}: duplicate key `{key}`")]
    DuplicateKey { file: String, line: u64, key: String },
    #[error("alias `{alias}` maps to `{canonical}`, which is itself an alias")]
    AliasChain { alias: DeveloperId, canonical: DeveloperId },
    #[error("alias `{0}` maps to itself")]
    SelfAlias(DeveloperId),
    #[error("{file}:{line}: unknown {kind} `{id}`")]
    DanglingReference {
        file: String,
        line: u64,
        kind: &'static str,
        id: String,
    },
}

/// Project metadata as shown next to search results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectMetadata {
    pub id: ProjectId,
    pub name: String,
    pub homepage: String,
    pub license: String,
    /// User votes; this is `v_p` in the karma computation.
    pub votes: u64,
    pub user_count: u64,
    /// Distinct contributors left in the matrix after alias merging and bot removal.
    pub developer_count: u64,
}

/// Secondary developer identities mapped onto their canonical id.
///
/// Resolution is single-step: a canonical id may not itself be an alias.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasMap {
    pairs: BTreeMap<DeveloperId, DeveloperId>,
}

impl AliasMap {
    pub fn new<I, A, C>(pairs: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (A, C)>,
        A: Into<DeveloperId>,
        C: Into<DeveloperId>,
    {
        let map = Self {
            pairs: pairs.into_iter().map(|(a, c)| (a.into(), c.into())).collect(),
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<(), IngestError> {
        for (alias, canonical) in &self.pairs {
            if alias == canonical {
                return Err(IngestError::SelfAlias(alias.clone()));
            }
            if self.pairs.contains_key(canonical) {
                return Err(IngestError::AliasChain {
                    alias: alias.clone(),
                    canonical: canonical.clone(),
                });
            }
        }
        Ok(())
    }

    /// The canonical id for `id` (itself when it is not an alias).
    pub fn resolve<'a>(&'a self, id: &'a DeveloperId) -> &'a DeveloperId {
        self.pairs.get(id).unwrap_or(id)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

/// Folds every alias row into its canonical row, summing counts of pairs
/// that collide.
pub fn resolve_aliases(matrix: &ContributionMatrix, aliases: &AliasMap) -> Result<ContributionMatrix, IngestError> {
    aliases.validate()?;
    let mut out = ContributionMatrix::new();
    for (d, p, c) in matrix.entries() {
        out.add(aliases.resolve(d).clone(), p.clone(), c);
    }
    Ok(out)
}

/// Result of removing bot rows from a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlacklistOutcome {
    pub matrix: ContributionMatrix,
    /// Projects that had contributors before and have none afterwards.
    pub orphaned: Vec<ProjectId>,
}

pub fn apply_blacklist(matrix: &ContributionMatrix, bots: &BTreeSet<DeveloperId>) -> BlacklistOutcome {
    let mut out = matrix.clone();
    for bot in bots {
        out.remove_developer(bot.as_str());
    }
    let orphaned = matrix
        .projects()
        .filter(|p| out.column(p.as_str()).is_none())
        .cloned()
        .collect();
    BlacklistOutcome { matrix: out, orphaned }
}

/// Non-fatal findings reported while loading a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    /// All contributors of the project were blacklisted bots.
    LostAllContributors(ProjectId),
    /// The project has metadata but no commit rows at all.
    NoContributors(ProjectId),
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::LostAllContributors(p) => {
                write!(
                    f,
                    "project `{p}` lost all contributors to the bot blacklist; trust is n/a"
                )
            }
            Self::NoContributors(p) => write!(f, "project `{p}` has no contributors; trust is n/a"),
        }
    }
}
