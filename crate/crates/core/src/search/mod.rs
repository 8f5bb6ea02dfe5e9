//! Query execution over an [`IndexSnapshot`], joined with project trust.

mod query;

use std::cmp::Ordering;

use crate::codeindex::{CodeEntity, Field, IndexSnapshot};
use crate::ingest::ProjectMetadata;
use crate::trustcore::map_to_trust_scale;

pub use query::{parse_query, Clause, Query, QueryError, QueryField, SortMode, DEFAULT_ALPHA, DEFAULT_LIMIT};

/// Relevance weight of a match in each field.
pub fn field_weight(field: Field) -> f64 {
    match field {
        Field::Name => 3.0,
        Field::Interfaces => 2.0,
        Field::Comments | Field::Body => 1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub entity: CodeEntity,
    pub relevance: f64,
    /// Trustability of the entity's project; `None` for contributor-less projects.
    pub trust: Option<f64>,
    pub trust_scale: Option<u8>,
    pub project: ProjectMetadata,
}

/// Results after ordering and truncation, plus the number of matches before
/// truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub total_matches: usize,
    pub results: Vec<SearchResult>,
}

fn clause_field_score(snapshot: &IndexSnapshot, field: Field, term: &str, id: u32) -> f64 {
    let df = snapshot.postings(field, term).len();
    if df == 0 {
        return 0.0;
    }
    let tf = snapshot.term_frequency(field, term, id);
    let idf = (snapshot.doc_count as f64 / df as f64).ln();
    field_weight(field) * (tf as f64).ln_1p() * idf
}

/// `Σ_clauses weight · ln(1 + tf) · ln(N / df)`; an `any` clause takes its
/// best-scoring field.
pub fn score_relevance(snapshot: &IndexSnapshot, id: u32, query: &Query) -> f64 {
    query
        .clauses
        .iter()
        .map(|c| {
            c.field
                .fields()
                .iter()
                .map(|&f| clause_field_score(snapshot, f, &c.term, id))
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Sorted ids of entities that contain the clause term in any of its fields.
fn clause_candidates(snapshot: &IndexSnapshot, clause: &Clause) -> Vec<u32> {
    let mut ids: Vec<u32> = clause
        .field
        .fields()
        .iter()
        .flat_map(|&f| snapshot.postings(f, &clause.term).iter().map(|p| p.0))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn passes_filters(entity: &CodeEntity, query: &Query) -> bool {
    query.visibility.iter().all(|&v| entity.visibility == v) && query.projects.iter().all(|p| entity.project == *p)
}

/// Joins an entity with its project's trust and metadata.
pub fn annotate(snapshot: &IndexSnapshot, entity: &CodeEntity, relevance: f64) -> SearchResult {
    let project = entity.project.as_str();
    let trust = snapshot.trust().get(project);
    let trust_scale = trust.and_then(|_| map_to_trust_scale(snapshot.trust(), project).ok());
    let metadata = snapshot.metadata(project).cloned().unwrap_or_else(|| ProjectMetadata {
        id: entity.project.clone(),
        name: project.to_owned(),
        homepage: String::new(),
        license: String::new(),
        votes: 0,
        user_count: 0,
        developer_count: 0,
    });
    SearchResult {
        entity: entity.clone(),
        relevance,
        trust,
        trust_scale,
        project: metadata,
    }
}

pub fn execute_search(snapshot: &IndexSnapshot, query: &Query) -> Vec<SearchResult> {
    search(snapshot, query).results
}

pub fn search(snapshot: &IndexSnapshot, query: &Query) -> SearchOutcome {
    let mut candidates: Option<Vec<u32>> = None;
    for clause in &query.clauses {
        let ids = clause_candidates(snapshot, clause);
        candidates = Some(match candidates {
            None => ids,
            Some(prev) => intersect(&prev, &ids),
        });
    }
    let ids = candidates.unwrap_or_else(|| (0..snapshot.doc_count as u32).collect());

    let mut results: Vec<SearchResult> = ids
        .into_iter()
        .filter_map(|id| snapshot.entity(id))
        .filter(|e| passes_filters(e, query))
        .map(|e| annotate(snapshot, e, score_relevance(snapshot, e.id, query)))
        .collect();
    let total_matches = results.len();
    order_results(&mut results, query.sort, query.alpha);
    results.truncate(query.limit);
    SearchOutcome { total_matches, results }
}

/// Min-max normalization onto [0, 1]; a constant set maps to 0.
#[derive(Clone, Copy)]
struct MinMax {
    lo: f64,
    hi: f64,
}

impl MinMax {
    fn over(values: impl Iterator<Item = f64>) -> Self {
        values.fold(
            MinMax {
                lo: f64::INFINITY,
                hi: f64::NEG_INFINITY,
            },
            |m, v| MinMax {
                lo: m.lo.min(v),
                hi: m.hi.max(v),
            },
        )
    }

    fn apply(self, v: f64) -> f64 {
        if self.hi > self.lo {
            (v - self.lo) / (self.hi - self.lo)
        } else {
            0.0
        }
    }
}

/// Higher-is-better comparison on `Option<f64>` with `None` below everything.
fn desc_trust(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Sorts results in place. Every mode ends with an ascending entity-id
/// tiebreak, so the order is total.
///
/// Blend scores are `(1 - alpha) · rel + alpha · trust` with both terms
/// min-max normalized over the candidates; unknown trust normalizes to 0.
pub fn order_results(results: &mut [SearchResult], sort: SortMode, alpha: f64) {
    let by_relevance =
        |a: &SearchResult, b: &SearchResult| b.relevance.total_cmp(&a.relevance).then(a.entity.id.cmp(&b.entity.id));
    match sort {
        SortMode::Relevance => results.sort_by(by_relevance),
        SortMode::Trust => results.sort_by(|a, b| desc_trust(a.trust, b.trust).then_with(|| by_relevance(a, b))),
        SortMode::Blend => {
            let nrel = MinMax::over(results.iter().map(|r| r.relevance));
            let ntrust = MinMax::over(results.iter().filter_map(|r| r.trust));
            let score = |r: &SearchResult| {
                (1.0 - alpha) * nrel.apply(r.relevance) + alpha * r.trust.map_or(0.0, |t| ntrust.apply(t))
            };
            results.sort_by(|a, b| score(b).total_cmp(&score(a)).then_with(|| by_relevance(a, b)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codeindex::{build_index, EntityKind, ProjectData, Visibility};

    fn entity(id: u32, name: &str, project: &str) -> CodeEntity {
        CodeEntity {
            id,
            project: project.into(),
            file_path: format!("{name}.java"),
            kind: EntityKind::Class,
            name: name.into(),
            qualified_name: name.into(),
            visibility: Visibility::Public,
            interfaces: Vec::new(),
            body: String::new(),
            comments: String::new(),
            snippet: String::new(),
        }
    }

    fn result(id: u32, relevance: f64, trust: Option<f64>) -> SearchResult {
        let e = entity(id, "X", "p");
        SearchResult {
            project: ProjectMetadata {
                id: "p".into(),
                name: "p".into(),
                homepage: String::new(),
                license: String::new(),
                votes: 0,
                user_count: 0,
                developer_count: 0,
            },
            entity: e,
            relevance,
            trust,
            trust_scale: None,
        }
    }

    fn ids(results: &[SearchResult]) -> Vec<u32> {
        results.iter().map(|r| r.entity.id).collect()
    }

    #[test]
    fn single_entity_matches_with_zero_score() {
        let s = build_index(vec![entity(0, "Foo", "p")], ProjectData::default()).unwrap();
        let q = parse_query("name:foo").unwrap();
        let results = execute_search(&s, &q);
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].relevance, 0.0);
    }

    #[test]
    fn two_documents_idf() {
        let s = build_index(
            vec![entity(0, "Foo", "p"), entity(1, "Bar", "p")],
            ProjectData::default(),
        )
        .unwrap();
        let q = parse_query("name:foo").unwrap();
        let expected = 3.0 * 2f64.ln() * 2f64.ln();
        assert!((score_relevance(&s, 0, &q) - expected).abs() < 1e-12);
        assert!((expected - 1.441).abs() < 1e-3);
        assert_eq!(score_relevance(&s, 0, &parse_query("name:nothing").unwrap()), 0.0);
    }

    #[test]
    fn empty_snapshot_returns_nothing() {
        let s = build_index(Vec::new(), ProjectData::default()).unwrap();
        assert!(execute_search(&s, &parse_query("anything").unwrap()).is_empty());
        assert!(execute_search(&s, &parse_query("visibility:public").unwrap()).is_empty());
    }

    #[test]
    fn blend_extremes_and_ties() {
        let base = vec![
            result(0, 1.0, Some(3.0)),
            result(1, 4.0, Some(1.0)),
            result(2, 2.0, Some(3.0)),
            result(3, 2.0, Some(9.0)),
        ];
        let sorted = |mode, alpha| {
            let mut r = base.clone();
            order_results(&mut r, mode, alpha);
            ids(&r)
        };
        assert_eq!(sorted(SortMode::Relevance, 0.0), [1, 2, 3, 0]);
        assert_eq!(sorted(SortMode::Blend, 0.0), sorted(SortMode::Relevance, 0.0));
        assert_eq!(sorted(SortMode::Trust, 0.0), [3, 2, 0, 1]);
        assert_eq!(sorted(SortMode::Blend, 1.0), sorted(SortMode::Trust, 0.0));

        let mut pair = vec![result(1, 1.0, Some(9.0)), result(0, 2.0, Some(1.0))];
        order_results(&mut pair, SortMode::Blend, 0.5);
        assert_eq!(ids(&pair), [0, 1]);
    }

    #[test]
    fn missing_trust_sorts_last() {
        let mut r = vec![
            result(0, 5.0, None),
            result(1, 0.0, Some(0.0)),
            result(2, 1.0, Some(2.0)),
        ];
        order_results(&mut r, SortMode::Trust, 0.5);
        assert_eq!(ids(&r), [2, 1, 0]);
    }
}
