//! Developer karma and project trustability.
//!
//! Karma rewards developers who commit substantially to projects many users
//! vote for; trustability is the commit-weighted average karma of a project's
//! contributors. Both are pure functions of a [`ContributionMatrix`] and a
//! [`VoteVector`].
//!
//! Every logarithm is smoothed as `ln(1 + x)`, which keeps single-project
//! developers and zero-vote projects finite and all scores non-negative.

mod matrix;
mod metric;
mod powerlaw;
mod scale;

use thiserror::Error;

use crate::{DeveloperId, ProjectId};

pub use matrix::{ContributionMatrix, VoteVector};
pub use metric::{
    compute_all, compute_all_with, contributor_karma, contributor_karma_with, developer_project_frequency,
    project_trustability, KarmaTable, Smoothing, TrustTable,
};
pub use powerlaw::{fit_power_law, PowerLawFit};
pub use scale::map_to_trust_scale;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrustError {
    #[error("unknown developer `{0}`")]
    UnknownDeveloper(DeveloperId),
    #[error("unknown project `{0}`")]
    UnknownProject(ProjectId),
    #[error("project `{0}` has zero total contribution weight")]
    DegenerateProject(ProjectId),
    #[error("project `{0}` has no vote entry")]
    MissingVotes(ProjectId),
    #[error("zero commit count for ({developer}, {project})")]
    ZeroCommits { developer: DeveloperId, project: ProjectId },
    #[error("duplicate matrix entry ({developer}, {project})")]
    DuplicateEntry { developer: DeveloperId, project: ProjectId },
    #[error("power-law fit needs at least 2 positive samples, got {0}")]
    InsufficientData(usize),
    #[error("power-law fit is undefined when all samples are equal")]
    DegenerateData,
}
