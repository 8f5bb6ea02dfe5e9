use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::trustcore::{ContributionMatrix, VoteVector};
use crate::{DeveloperId, ProjectId};

use super::csvfile::{read_id_list, read_table, Row};
use super::{apply_blacklist, resolve_aliases, AliasMap, IngestError, IngestWarning, ProjectMetadata};

const PROJECTS: &str = "projects.csv";
const DEVELOPERS: &str = "developers.csv";
const COMMITS: &str = "commits.csv";
const ALIASES: &str = "aliases.csv";
const BOTS: &str = "bots.txt";

const PROJECTS_HEADER: &[&str] = &["project_id", "name", "homepage", "license", "votes", "user_count"];
const DEVELOPERS_HEADER: &[&str] = &["developer_id", "display_name"];
const COMMITS_HEADER: &[&str] = &["developer_id", "project_id", "commits"];
const ALIASES_HEADER: &[&str] = &["alias_id", "canonical_id"];

/// A validated dataset ready for the trust computation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetBundle {
    /// Commit counts with aliases folded and bots removed.
    pub matrix: ContributionMatrix,
    /// Votes for every project in the metadata, including contributor-less ones.
    pub votes: VoteVector,
    pub metadata: BTreeMap<ProjectId, ProjectMetadata>,
    /// Display names keyed by developer id.
    pub developers: BTreeMap<DeveloperId, String>,
    pub bots: BTreeSet<DeveloperId>,
}

pub fn load_dataset(dir: &Path) -> Result<DatasetBundle, IngestError> {
    load_dataset_reporting(dir).map(|(bundle, _)| bundle)
}

/// Loads a dataset and also returns the non-fatal warnings found on the way.
pub fn load_dataset_reporting(dir: &Path) -> Result<(DatasetBundle, Vec<IngestWarning>), IngestError> {
    let required =
        |name: &str, header| read_table(dir, name, header)?.ok_or_else(|| IngestError::MissingFile(dir.join(name)));
    let project_rows = required(PROJECTS, PROJECTS_HEADER)?;
    let developer_rows = required(DEVELOPERS, DEVELOPERS_HEADER)?;
    let commit_rows = required(COMMITS, COMMITS_HEADER)?;
    let alias_rows = read_table(dir, ALIASES, ALIASES_HEADER)?.unwrap_or_default();
    let bot_lines = read_id_list(dir, BOTS)?.unwrap_or_default();

    let mut projects = BTreeMap::new();
    for row in &project_rows {
        let id = ProjectId::new(non_empty(row, PROJECTS, 0, "project_id")?);
        let meta = ProjectMetadata {
            id: id.clone(),
            name: row.get(1).to_owned(),
            homepage: row.get(2).to_owned(),
            license: row.get(3).to_owned(),
            votes: row.count(PROJECTS, 4, "votes")?,
            user_count: row.count(PROJECTS, 5, "user_count")?,
            developer_count: 0,
        };
        if projects.insert(id.clone(), meta).is_some() {
            return Err(duplicate(PROJECTS, row, id.as_str()));
        }
    }

    let mut developers = BTreeMap::new();
    for row in &developer_rows {
        let id = DeveloperId::new(non_empty(row, DEVELOPERS, 0, "developer_id")?);
        if developers.insert(id.clone(), row.get(1).to_owned()).is_some() {
            return Err(duplicate(DEVELOPERS, row, id.as_str()));
        }
    }

    let mut alias_pairs = BTreeMap::new();
    for row in &alias_rows {
        let alias = DeveloperId::new(non_empty(row, ALIASES, 0, "alias_id")?);
        let canonical = DeveloperId::new(non_empty(row, ALIASES, 1, "canonical_id")?);
        if alias_pairs.insert(alias.clone(), canonical).is_some() {
            return Err(duplicate(ALIASES, row, alias.as_str()));
        }
    }
    let aliases = AliasMap::new(alias_pairs)?;
    let bots: BTreeSet<DeveloperId> = bot_lines.into_iter().map(|(_, id)| id.into()).collect();

    let mut raw = ContributionMatrix::new();
    let mut sources = Vec::with_capacity(commit_rows.len());
    for row in &commit_rows {
        let developer = DeveloperId::new(non_empty(row, COMMITS, 0, "developer_id")?);
        let project = ProjectId::new(non_empty(row, COMMITS, 1, "project_id")?);
        let commits = row.count(COMMITS, 2, "commits")?;
        if commits == 0 {
            return Err(IngestError::MalformedRow {
                file: COMMITS.to_owned(),
                line: row.line,
                reason: "commits must be a positive integer".to_owned(),
            });
        }
        if raw.get(developer.as_str(), project.as_str()).is_some() {
            return Err(duplicate(COMMITS, row, &format!("{developer},{project}")));
        }
        raw.add(developer.clone(), project.clone(), commits);
        sources.push((row.line, developer, project));
    }

    let merged = resolve_aliases(&raw, &aliases)?;
    let stripped = apply_blacklist(&merged, &bots);

    for (line, developer, project) in &sources {
        let canonical = aliases.resolve(developer);
        if bots.contains(canonical) {
            continue;
        }
        if !developers.contains_key(canonical) {
            return Err(dangling(*line, "developer", canonical.as_str()));
        }
        if !projects.contains_key(project) {
            return Err(dangling(*line, "project", project.as_str()));
        }
    }

    let mut warnings: Vec<IngestWarning> = stripped
        .orphaned
        .iter()
        .cloned()
        .map(IngestWarning::LostAllContributors)
        .collect();
    let matrix = stripped.matrix;
    for (id, meta) in &mut projects {
        meta.developer_count = matrix.column(id.as_str()).map_or(0, |c| c.len() as u64);
        if meta.developer_count == 0 && !stripped.orphaned.contains(id) {
            warnings.push(IngestWarning::NoContributors(id.clone()));
        }
    }
    let votes = projects.values().map(|m| (m.id.clone(), m.votes)).collect();

    Ok((
        DatasetBundle {
            matrix,
            votes,
            metadata: projects,
            developers,
            bots,
        },
        warnings,
    ))
}

/// Writes a bundle back as a dataset directory (aliases already folded).
pub fn write_dataset(bundle: &DatasetBundle, dir: &Path) -> Result<(), IngestError> {
    let io = |source: std::io::Error| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;

    let write = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<(), IngestError> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| IngestError::Io {
            path: path.clone(),
            source: e.into(),
        })?;
        let wrap = |e: csv::Error| IngestError::Io {
            path: path.clone(),
            source: e.into(),
        };
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            w.write_record(&row).map_err(wrap)?;
        }
        w.flush().map_err(|e| IngestError::Io {
            path: path.clone(),
            source: e,
        })
    };

    write(
        PROJECTS,
        PROJECTS_HEADER,
        bundle
            .metadata
            .values()
            .map(|m| {
                vec![
                    m.id.to_string(),
                    m.name.clone(),
                    m.homepage.clone(),
                    m.license.clone(),
                    m.votes.to_string(),
                    m.user_count.to_string(),
                ]
            })
            .collect(),
    )?;
    write(
        DEVELOPERS,
        DEVELOPERS_HEADER,
        bundle
            .developers
            .iter()
            .map(|(id, name)| vec![id.to_string(), name.clone()])
            .collect(),
    )?;
    write(
        COMMITS,
        COMMITS_HEADER,
        bundle
            .matrix
            .entries()
            .map(|(d, p, c)| vec![d.to_string(), p.to_string(), c.to_string()])
            .collect(),
    )?;
    let bots: String = bundle.bots.iter().map(|b| format!("{b}\n")).collect();
    fs::write(dir.join(BOTS), bots).map_err(io)
}

fn non_empty<'r>(row: &'r Row, file: &str, i: usize, column: &str) -> Result<&'r str, IngestError> {
    let value = row.get(i);
    if value.trim().is_empty() {
        return Err(IngestError::MalformedRow {
            file: file.to_owned(),
            line: row.line,
            reason: format!("empty {column}"),
        });
    }
    Ok(value)
}

fn duplicate(file: &str, row: &Row, key: &str) -> IngestError {
    IngestError::DuplicateKey {
        file: file.to_owned(),
        line: row.line,
        key: key.to_owned(),
    }
}

fn dangling(line: u64, kind: &'static str, id: &str) -> IngestError {
    IngestError::DanglingReference {
        file: COMMITS.to_owned(),
        line,
        kind,
        id: id.to_owned(),
    }
}
