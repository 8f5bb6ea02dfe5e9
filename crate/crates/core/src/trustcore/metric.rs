use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::{DeveloperId, ProjectId};

use super::{ContributionMatrix, TrustError, VoteVector};

/// The smoothed logarithm `L(x) = log_b(1 + x)` used by both equations.
///
/// Rankings do not depend on the base; only natural log is used outside of
/// tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothing {
    inv_ln_base: f64,
}

impl Smoothing {
    pub const NATURAL: Smoothing = Smoothing { inv_ln_base: 1.0 };

    /// Smoothing with logarithm base `base` (must be > 1).
    pub fn with_base(base: f64) -> Self {
        assert!(base > 1.0, "logarithm base must exceed 1, got {base}");
        Self {
            inv_ln_base: 1.0 / base.ln(),
        }
    }

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        x.ln_1p() * self.inv_ln_base
    }
}

impl Default for Smoothing {
    fn default() -> Self {
        Self::NATURAL
    }
}

macro_rules! score_table {
    ($(#[$meta:meta])* $name:ident, $id:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct $name {
            scores: BTreeMap<$id, f64>,
        }

        impl $name {
            pub fn new() -> Self {
                Self::default()
            }

            pub fn insert(&mut self, id: $id, score: f64) {
                self.scores.insert(id, score);
            }

            pub fn get(&self, id: &str) -> Option<f64> {
                self.scores.get(id).copied()
            }

            pub fn contains(&self, id: &str) -> bool {
                self.scores.contains_key(id)
            }

            pub fn iter(&self) -> impl Iterator<Item = (&$id, f64)> {
                self.scores.iter().map(|(k, &v)| (k, v))
            }

            pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
                self.scores.values().copied()
            }

            pub fn len(&self) -> usize {
                self.scores.len()
            }

            pub fn is_empty(&self) -> bool {
                self.scores.is_empty()
            }

            /// Entries by descending score, ties broken by ascending id.
            pub fn ranked(&self) -> Vec<(&$id, f64)> {
                let mut out: Vec<_> = self.iter().collect();
                out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
                out
            }
        }

        impl FromIterator<($id, f64)> for $name {
            fn from_iter<I: IntoIterator<Item = ($id, f64)>>(iter: I) -> Self {
                Self {
                    scores: iter.into_iter().collect(),
                }
            }
        }
    };
}

score_table!(
    /// Karma `K_d` per developer.
    KarmaTable,
    DeveloperId
);
score_table!(
    /// Trustability `T_p` per project.
    TrustTable,
    ProjectId
);

/// Number of projects the developer committed to at least once.
pub fn developer_project_frequency(matrix: &ContributionMatrix, developer: &str) -> usize {
    matrix.row(developer).map_or(0, |row| row.len())
}

/// Karma of one developer with natural-log smoothing.
pub fn contributor_karma(matrix: &ContributionMatrix, votes: &VoteVector, developer: &str) -> Result<f64, TrustError> {
    contributor_karma_with(matrix, votes, developer, Smoothing::NATURAL)
}

/// `K_d = Σ_p L(c_dp) / L(df(d)) · L(v_p)` over the developer's projects.
pub fn contributor_karma_with(
    matrix: &ContributionMatrix,
    votes: &VoteVector,
    developer: &str,
    log: Smoothing,
) -> Result<f64, TrustError> {
    let row = matrix
        .row(developer)
        .ok_or_else(|| TrustError::UnknownDeveloper(developer.into()))?;
    let idf = log.apply(row.len() as f64);
    let mut karma = 0.0;
    for (project, &commits) in row {
        let v = votes
            .get(project.as_str())
            .ok_or_else(|| TrustError::MissingVotes(project.clone()))?;
        karma += log.apply(commits as f64) / idf * log.apply(v as f64);
    }
    Ok(karma)
}

/// `T_p = Σ_d w_dp K_d` with `w_dp = L(c_dp) / Σ_d' L(c_d'p)`.
pub fn project_trustability(matrix: &ContributionMatrix, karma: &KarmaTable, project: &str) -> Result<f64, TrustError> {
    trustability_with(matrix, karma, project, Smoothing::NATURAL)
}

fn trustability_with(
    matrix: &ContributionMatrix,
    karma: &KarmaTable,
    project: &str,
    log: Smoothing,
) -> Result<f64, TrustError> {
    let column = matrix
        .column(project)
        .filter(|col| !col.is_empty())
        .ok_or_else(|| TrustError::UnknownProject(project.into()))?;
    let total: f64 = column.values().map(|&c| log.apply(c as f64)).sum();
    if total.partial_cmp(&0.0) != Some(Ordering::Greater) {
        return Err(TrustError::DegenerateProject(project.into()));
    }
    let mut trust = 0.0;
    for (developer, &commits) in column {
        let k = karma
            .get(developer.as_str())
            .ok_or_else(|| TrustError::UnknownDeveloper(developer.clone()))?;
        trust += log.apply(commits as f64) / total * k;
    }
    Ok(trust)
}

/// Karma for every developer and trustability for every project.
pub fn compute_all(matrix: &ContributionMatrix, votes: &VoteVector) -> Result<(KarmaTable, TrustTable), TrustError> {
    compute_all_with(matrix, votes, Smoothing::NATURAL)
}

pub fn compute_all_with(
    matrix: &ContributionMatrix,
    votes: &VoteVector,
    log: Smoothing,
) -> Result<(KarmaTable, TrustTable), TrustError> {
    if let Some(missing) = matrix.projects().find(|p| !votes.contains(p.as_str())) {
        return Err(TrustError::MissingVotes(missing.clone()));
    }
    let karma = matrix
        .developers()
        .map(|d| Ok((d.clone(), contributor_karma_with(matrix, votes, d.as_str(), log)?)))
        .collect::<Result<KarmaTable, TrustError>>()?;
    let trust = matrix
        .projects()
        .map(|p| Ok((p.clone(), trustability_with(matrix, &karma, p.as_str(), log)?)))
        .collect::<Result<TrustTable, TrustError>>()?;
    Ok((karma, trust))
}
