use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use crate::{DeveloperId, ProjectId};

use super::TrustError;

/// Sparse developer × project table of commit counts.
///
/// Zero counts are never stored. Rows and columns are kept as two mirrored
/// ordered maps so both per-developer and per-project sums walk entries in
/// sorted id order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContributionMatrix {
    by_developer: BTreeMap<DeveloperId, BTreeMap<ProjectId, u64>>,
    by_project: BTreeMap<ProjectId, BTreeMap<DeveloperId, u64>>,
}

impl ContributionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matrix from `(developer, project, commits)` triples, rejecting
    /// zero counts and repeated pairs.
    pub fn from_entries<I, D, P>(entries: I) -> Result<Self, TrustError>
    where
        I: IntoIterator<Item = (D, P, u64)>,
        D: Into<DeveloperId>,
        P: Into<ProjectId>,
    {
        let mut matrix = Self::new();
        for (d, p, c) in entries {
            matrix.insert(d.into(), p.into(), c)?;
        }
        Ok(matrix)
    }

    /// Stores a new entry. The pair must not already be present.
    pub fn insert(&mut self, developer: DeveloperId, project: ProjectId, commits: u64) -> Result<(), TrustError> {
        if commits == 0 {
            return Err(TrustError::ZeroCommits { developer, project });
        }
        match self
            .by_developer
            .entry(developer.clone())
            .or_default()
            .entry(project.clone())
        {
            Entry::Occupied(_) => return Err(TrustError::DuplicateEntry { developer, project }),
            Entry::Vacant(slot) => {
                slot.insert(commits);
            }
        }
        self.by_project.entry(project).or_default().insert(developer, commits);
        Ok(())
    }

    /// Adds `commits` to the pair, creating it if absent. Adding zero is a no-op.
    pub fn add(&mut self, developer: DeveloperId, project: ProjectId, commits: u64) {
        if commits == 0 {
            return;
        }
        *self
            .by_developer
            .entry(developer.clone())
            .or_default()
            .entry(project.clone())
            .or_insert(0) += commits;
        *self
            .by_project
            .entry(project)
            .or_default()
            .entry(developer)
            .or_insert(0) += commits;
    }

    /// Removes every entry of `developer`, returning the removed row.
    pub fn remove_developer(&mut self, developer: &str) -> BTreeMap<ProjectId, u64> {
        let row = self.by_developer.remove(developer).unwrap_or_default();
        for project in row.keys() {
            if let Some(col) = self.by_project.get_mut(project) {
                col.remove(developer);
                if col.is_empty() {
                    self.by_project.remove(project);
                }
            }
        }
        row
    }

    pub fn get(&self, developer: &str, project: &str) -> Option<u64> {
        self.by_developer.get(developer)?.get(project).copied()
    }

    /// Projects of one developer with their commit counts, sorted by project id.
    pub fn row(&self, developer: &str) -> Option<&BTreeMap<ProjectId, u64>> {
        self.by_developer.get(developer)
    }

    /// Contributors of one project with their commit counts, sorted by developer id.
    pub fn column(&self, project: &str) -> Option<&BTreeMap<DeveloperId, u64>> {
        self.by_project.get(project)
    }

    pub fn developers(&self) -> impl Iterator<Item = &DeveloperId> {
        self.by_developer.keys()
    }

    pub fn projects(&self) -> impl Iterator<Item = &ProjectId> {
        self.by_project.keys()
    }

    pub fn project_set(&self) -> BTreeSet<ProjectId> {
        self.by_project.keys().cloned().collect()
    }

    /// All entries in (developer, project) order.
    pub fn entries(&self) -> impl Iterator<Item = (&DeveloperId, &ProjectId, u64)> {
        self.by_developer
            .iter()
            .flat_map(|(d, row)| row.iter().map(move |(p, &c)| (d, p, c)))
    }

    pub fn developer_count(&self) -> usize {
        self.by_developer.len()
    }

    pub fn project_count(&self) -> usize {
        self.by_project.len()
    }

    pub fn len(&self) -> usize {
        self.by_developer.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_developer.is_empty()
    }

    pub fn total_commits(&self) -> u64 {
        self.entries().map(|(_, _, c)| c).sum()
    }
}

/// User votes per project. Projects without an entry read as zero votes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VoteVector {
    votes: BTreeMap<ProjectId, u64>,
}

impl VoteVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, project: impl Into<ProjectId>, votes: u64) {
        self.votes.insert(project.into(), votes);
    }

    pub fn get(&self, project: &str) -> Option<u64> {
        self.votes.get(project).copied()
    }

    pub fn contains(&self, project: &str) -> bool {
        self.votes.contains_key(project)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProjectId, u64)> {
        self.votes.iter().map(|(p, &v)| (p, v))
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }
}

impl<P: Into<ProjectId>> FromIterator<(P, u64)> for VoteVector {
    fn from_iter<I: IntoIterator<Item = (P, u64)>>(iter: I) -> Self {
        Self {
            votes: iter.into_iter().map(|(p, v)| (p.into(), v)).collect(),
        }
    }
}
