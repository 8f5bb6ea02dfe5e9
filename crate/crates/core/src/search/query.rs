use thiserror::Error;

use crate::codeindex::{Field, Visibility};
use crate::ProjectId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("empty query")]
    Empty,
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{0}` needs a term")]
    EmptyTerm(String),
    #[error("bad value `{value}` for filter `{filter}`")]
    BadFilter { filter: String, value: String },
}

/// Which entity fields a clause searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryField {
    Name,
    Body,
    Comment,
    Implements,
    /// Matches if any field matches; scores as the best field.
    Any,
}

impl QueryField {
    pub fn fields(self) -> &'static [Field] {
        match self {
            Self::Name => &[Field::Name],
            Self::Body => &[Field::Body],
            Self::Comment => &[Field::Comments],
            Self::Implements => &[Field::Interfaces],
            Self::Any => &Field::ALL,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Name => "name",
            Self::Body => "body",
            Self::Comment => "comment",
            Self::Implements => "implements",
            Self::Any => "any",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub field: QueryField,
    /// Lowercase alphanumeric term.
    pub term: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortMode {
    #[default]
    Relevance,
    Trust,
    Blend,
}

impl SortMode {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "relevance" => Self::Relevance,
            "trust" => Self::Trust,
            "blend" => Self::Blend,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Relevance => "relevance",
            Self::Trust => "trust",
            Self::Blend => "blend",
        }
    }
}

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_LIMIT: usize = 20;

/// A structured query. Clauses and filters are AND-combined.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub clauses: Vec<Clause>,
    pub visibility: Vec<Visibility>,
    pub projects: Vec<ProjectId>,
    pub sort: SortMode,
    /// Weight of trust in blend mode, in `[0, 1]`.
    pub alpha: f64,
    pub limit: usize,
}

impl Query {
    pub fn with_sort(mut self, sort: SortMode, alpha: f64) -> Self {
        self.sort = sort;
        self.alpha = alpha;
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }
}

/// Parses whitespace-separated atoms: `field:term` clauses, bare terms
/// (field `any`), and the `visibility:` and `project:` filters.
///
/// A term is lowercased and split on non-alphanumeric characters; each
/// piece becomes its own clause on the same field.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut query = Query {
        clauses: Vec::new(),
        visibility: Vec::new(),
        projects: Vec::new(),
        sort: SortMode::default(),
        alpha: DEFAULT_ALPHA,
        limit: DEFAULT_LIMIT,
    };
    for atom in text.split_whitespace() {
        let (prefix, term) = match atom.split_once(':') {
            Some((prefix, term)) => (Some(prefix), term),
            None => (None, atom),
        };
        let field = match prefix {
            None => QueryField::Any,
            Some("name") => QueryField::Name,
            Some("body") => QueryField::Body,
            Some("comment") => QueryField::Comment,
            Some("implements") => QueryField::Implements,
            Some("any") => QueryField::Any,
            Some("visibility") => {
                let v = Visibility::parse(term).ok_or_else(|| QueryError::BadFilter {
                    filter: "visibility".into(),
                    value: term.into(),
                })?;
                query.visibility.push(v);
                continue;
            }
            Some("project") => {
                if term.is_empty() {
                    return Err(QueryError::EmptyTerm("project".into()));
                }
                query.projects.push(term.into());
                continue;
            }
            Some(other) => return Err(QueryError::UnknownField(other.into())),
        };
        let pieces: Vec<String> = term
            .split(|c: char| !c.is_alphanumeric())
            .filter(|p| !p.is_empty())
            .map(str::to_lowercase)
            .collect();
        if pieces.is_empty() {
            if prefix.is_some() {
                return Err(QueryError::EmptyTerm(field.as_str().into()));
            }
            continue;
        }
        query
            .clauses
            .extend(pieces.into_iter().map(|term| Clause { field, term }));
    }
    if query.clauses.is_empty() && query.visibility.is_empty() && query.projects.is_empty() {
        return Err(QueryError::Empty);
    }
    Ok(query)
}
