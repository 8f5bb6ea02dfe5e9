//! Read-only views over an index snapshot, shared by the CLI and the HTTP API.

use std::cmp::Ordering;

use jbender_core::codeindex::{EntityKind, IndexSnapshot};
use jbender_core::ingest::ProjectMetadata;
use jbender_core::search::{parse_query, search, QueryError, SearchResult, SortMode};
use jbender_core::trustcore::{fit_power_law, map_to_trust_scale, TrustError};
use jbender_core::{DeveloperId, ProjectId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RequestError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("bad value `{value}` for `{name}`: {reason}")]
    BadParam {
        name: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("unknown project `{0}`")]
    UnknownProject(String),
    #[error("unknown developer `{0}`")]
    UnknownDeveloper(String),
    #[error("unknown series `{0}` (expected votes, commits_per_dev_project or projects_per_dev)")]
    UnknownSeries(String),
    #[error("cannot fit series `{series}`: {source}")]
    Fit {
        series: String,
        #[source]
        source: TrustError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiProject {
    pub id: ProjectId,
    pub name: String,
    pub license: String,
    pub homepage: String,
    pub user_count: u64,
    pub developer_count: u64,
}

impl From<&ProjectMetadata> for ApiProject {
    fn from(m: &ProjectMetadata) -> Self {
        Self {
            id: m.id.clone(),
            name: m.name.clone(),
            license: m.license.clone(),
            homepage: m.homepage.clone(),
            user_count: m.user_count,
            developer_count: m.developer_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiResult {
    pub qualified_name: String,
    pub kind: EntityKind,
    pub snippet: String,
    pub file_path: String,
    pub project: ApiProject,
    pub trust: Option<f64>,
    pub trust_scale: Option<u8>,
    pub relevance: f64,
}

impl From<&SearchResult> for ApiResult {
    fn from(r: &SearchResult) -> Self {
        Self {
            qualified_name: r.entity.qualified_name.clone(),
            kind: r.entity.kind,
            snippet: r.entity.snippet.clone(),
            file_path: r.entity.file_path.clone(),
            project: ApiProject::from(&r.project),
            trust: r.trust,
            trust_scale: r.trust_scale,
            relevance: r.relevance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiResultPage {
    pub query_echo: String,
    pub sort: String,
    pub alpha: f64,
    pub total_matches: usize,
    pub results: Vec<ApiResult>,
}

pub fn parse_sort(value: &str) -> Result<SortMode, RequestError> {
    SortMode::parse(value).ok_or_else(|| RequestError::BadParam {
        name: "sort",
        value: value.into(),
        reason: "expected relevance, trust or blend",
    })
}

pub fn check_alpha(alpha: f64) -> Result<f64, RequestError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(RequestError::BadParam {
            name: "alpha",
            value: alpha.to_string(),
            reason: "must be between 0 and 1",
        })
    }
}

pub fn search_page(
    snapshot: &IndexSnapshot,
    text: &str,
    sort: SortMode,
    alpha: f64,
    limit: usize,
) -> Result<ApiResultPage, RequestError> {
    let alpha = check_alpha(alpha)?;
    let query = parse_query(text)?.with_sort(sort, alpha).with_limit(limit);
    let outcome = search(snapshot, &query);
    Ok(ApiResultPage {
        query_echo: text.to_owned(),
        sort: sort.as_str().to_owned(),
        alpha,
        total_matches: outcome.total_matches,
        results: outcome.results.iter().map(ApiResult::from).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectOrder {
    #[default]
    Trust,
    Votes,
}

impl ProjectOrder {
    pub fn parse(value: &str) -> Result<Self, RequestError> {
        match value {
            "trust" => Ok(Self::Trust),
            "votes" => Ok(Self::Votes),
            _ => Err(RequestError::BadParam {
                name: "by",
                value: value.into(),
                reason: "expected trust or votes",
            }),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Trust => "trust",
            Self::Votes => "votes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRankRow {
    pub rank: usize,
    pub id: ProjectId,
    pub name: String,
    pub trust: Option<f64>,
    pub trust_scale: Option<u8>,
    pub votes: u64,
    pub user_count: u64,
    pub developer_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeveloperRankRow {
    pub rank: usize,
    pub id: DeveloperId,
    pub name: String,
    pub karma: f64,
    pub projects: usize,
    pub commits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking<T> {
    pub by: String,
    pub rows: Vec<T>,
}

fn trust_of(snapshot: &IndexSnapshot, project: &str) -> (Option<f64>, Option<u8>) {
    let trust = snapshot.trust().get(project);
    let scale = trust.and_then(|_| map_to_trust_scale(snapshot.trust(), project).ok());
    (trust, scale)
}

/// Every project with metadata, best first. Projects without trust sort last;
/// remaining ties go to the smaller id.
pub fn project_ranking(snapshot: &IndexSnapshot, top: usize, by: ProjectOrder) -> Ranking<ProjectRankRow> {
    let mut rows: Vec<ProjectRankRow> = snapshot
        .data
        .metadata
        .values()
        .map(|m| {
            let (trust, trust_scale) = trust_of(snapshot, m.id.as_str());
            ProjectRankRow {
                rank: 0,
                id: m.id.clone(),
                name: m.name.clone(),
                trust,
                trust_scale,
                votes: m.votes,
                user_count: m.user_count,
                developer_count: m.developer_count,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        let primary = match by {
            ProjectOrder::Trust => match (a.trust, b.trust) {
                (Some(x), Some(y)) => y.total_cmp(&x),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            },
            ProjectOrder::Votes => b.votes.cmp(&a.votes),
        };
        primary.then_with(|| a.id.cmp(&b.id))
    });
    rows.truncate(top);
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    Ranking {
        by: by.as_str().into(),
        rows,
    }
}

pub fn developer_ranking(snapshot: &IndexSnapshot, top: usize) -> Ranking<DeveloperRankRow> {
    let matrix = &snapshot.data.contributions;
    let rows = snapshot
        .karma()
        .ranked()
        .into_iter()
        .take(top)
        .enumerate()
        .map(|(i, (id, karma))| {
            let row = matrix.row(id.as_str());
            DeveloperRankRow {
                rank: i + 1,
                id: id.clone(),
                name: snapshot.data.developers.get(id).cloned().unwrap_or_default(),
                karma,
                projects: row.map_or(0, |r| r.len()),
                commits: row.map_or(0, |r| r.values().sum()),
            }
        })
        .collect();
    Ranking {
        by: "karma".into(),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contributor {
    pub id: DeveloperId,
    pub name: String,
    pub commits: u64,
    pub karma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectDetail {
    #[serde(flatten)]
    pub project: ApiProject,
    pub votes: u64,
    pub trust: Option<f64>,
    pub trust_scale: Option<u8>,
    pub entity_count: usize,
    /// Most commits first.
    pub contributors: Vec<Contributor>,
}

pub fn project_detail(snapshot: &IndexSnapshot, id: &str) -> Result<ProjectDetail, RequestError> {
    let meta = snapshot
        .metadata(id)
        .ok_or_else(|| RequestError::UnknownProject(id.into()))?;
    let (trust, trust_scale) = trust_of(snapshot, id);
    let mut contributors: Vec<Contributor> = snapshot
        .data
        .contributions
        .column(id)
        .into_iter()
        .flatten()
        .map(|(d, &commits)| Contributor {
            id: d.clone(),
            name: snapshot.data.developers.get(d).cloned().unwrap_or_default(),
            commits,
            karma: snapshot.karma().get(d.as_str()),
        })
        .collect();
    contributors.sort_by(|a, b| b.commits.cmp(&a.commits).then_with(|| a.id.cmp(&b.id)));
    Ok(ProjectDetail {
        project: ApiProject::from(meta),
        votes: meta.votes,
        trust,
        trust_scale,
        entity_count: snapshot.entities.iter().filter(|e| e.project.as_str() == id).count(),
        contributors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: ProjectId,
    pub name: String,
    pub commits: u64,
    pub trust: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeveloperDetail {
    pub id: DeveloperId,
    pub name: String,
    /// `None` for a listed developer with no commits.
    pub karma: Option<f64>,
    /// Most commits first.
    pub projects: Vec<Contribution>,
}

pub fn developer_detail(snapshot: &IndexSnapshot, id: &str) -> Result<DeveloperDetail, RequestError> {
    let row = snapshot.data.contributions.row(id);
    let (dev_id, name) = match (snapshot.data.developers.get_key_value(id), row) {
        (Some((d, name)), _) => (d.clone(), name.clone()),
        (None, Some(_)) => (DeveloperId::from(id), String::new()),
        (None, None) => return Err(RequestError::UnknownDeveloper(id.into())),
    };
    let mut projects: Vec<Contribution> = row
        .into_iter()
        .flatten()
        .map(|(p, &commits)| Contribution {
            id: p.clone(),
            name: snapshot
                .metadata(p.as_str())
                .map(|m| m.name.clone())
                .unwrap_or_default(),
            commits,
            trust: snapshot.trust().get(p.as_str()),
        })
        .collect();
    projects.sort_by(|a, b| b.commits.cmp(&a.commits).then_with(|| a.id.cmp(&b.id)));
    Ok(DeveloperDetail {
        id: dev_id,
        name,
        karma: snapshot.karma().get(id),
        projects,
    })
}

pub const SERIES: [&str; 3] = ["votes", "commits_per_dev_project", "projects_per_dev"];

/// Raw samples of a named distribution in the snapshot.
pub fn series_samples(snapshot: &IndexSnapshot, series: &str) -> Result<Vec<f64>, RequestError> {
    let matrix = &snapshot.data.contributions;
    Ok(match series {
        "votes" => snapshot.data.metadata.values().map(|m| m.votes as f64).collect(),
        "commits_per_dev_project" => matrix.entries().map(|(_, _, c)| c as f64).collect(),
        "projects_per_dev" => matrix
            .developers()
            .map(|d| matrix.row(d.as_str()).map_or(0, |r| r.len()) as f64)
            .collect(),
        other => return Err(RequestError::UnknownSeries(other.into())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawReport {
    pub series: String,
    pub slope: f64,
    pub intercept: f64,
    pub abs_r: f64,
    pub n_points: usize,
}

pub fn power_law_report(snapshot: &IndexSnapshot, series: &str) -> Result<PowerLawReport, RequestError> {
    let samples = series_samples(snapshot, series)?;
    let fit = fit_power_law(&samples).map_err(|source| RequestError::Fit {
        series: series.into(),
        source,
    })?;
    Ok(PowerLawReport {
        series: series.into(),
        slope: fit.slope,
        intercept: fit.intercept,
        abs_r: fit.abs_r,
        n_points: fit.n_points,
    })
}
