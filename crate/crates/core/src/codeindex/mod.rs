//! Structural code index: entity extraction, inverted postings, and the
//! on-disk snapshot that also carries the trust tables.

mod extract;
mod persist;
mod sources;
mod tokenize;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DatasetBundle, ProjectMetadata};
use crate::trustcore::{compute_all, ContributionMatrix, KarmaTable, TrustError, TrustTable};
use crate::{DeveloperId, ProjectId};

pub use extract::{extract_entities, Extraction, SNIPPET_LINES};
pub use persist::{load_index, persist_index, FORMAT_VERSION};
pub use sources::{extract_directory, replace_project};
pub use tokenize::tokenize;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate entity id {0}")]
    DuplicateEntityId(u32),
    #[error("entity ids must be dense from 0; missing id {0}")]
    SparseEntityIds(u32),
    #[error("unsupported index format version {found} (supported: {supported})")]
    VersionMismatch { found: u64, supported: u64 },
    #[error("corrupt index file {file}: {reason}")]
    CorruptFile { file: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Class,
    Interface,
    Enum,
    Method,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Class => "class",
            Self::Interface => "interface",
            Self::Enum => "enum",
            Self::Method => "method",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Protected,
    Private,
    Default,
}

impl Visibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Public => "public",
            Self::Protected => "protected",
            Self::Private => "private",
            Self::Default => "default",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "public" => Self::Public,
            "protected" => Self::Protected,
            "private" => Self::Private,
            "default" => Self::Default,
            _ => return None,
        })
    }
}

/// A class, interface, enum, or method found in a source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeEntity {
    pub id: u32,
    pub project: ProjectId,
    pub file_path: String,
    pub kind: EntityKind,
    pub name: String,
    /// Package, enclosing types, and name joined with `.`.
    pub qualified_name: String,
    pub visibility: Visibility,
    /// `extends`/`implements` names of a type; always empty for methods.
    pub interfaces: Vec<String>,
    pub body: String,
    /// Doc and adjacent comments, delimiters stripped.
    pub comments: String,
    /// First lines of comments followed by body, for display.
    pub snippet: String,
}

/// Indexed text fields of an entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Body,
    Comments,
    Interfaces,
    Name,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Body, Field::Comments, Field::Interfaces, Field::Name];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Body => "body",
            Self::Comments => "comments",
            Self::Interfaces => "interfaces",
            Self::Name => "name",
        }
    }

    /// The raw text of this field for `entity`.
    pub fn text(self, entity: &CodeEntity) -> String {
        match self {
            Self::Body => entity.body.clone(),
            Self::Comments => entity.comments.clone(),
            Self::Interfaces => entity.interfaces.join(" "),
            Self::Name => entity.name.clone(),
        }
    }
}

/// A posting: entity id and term frequency within one field.
pub type Posting = (u32, u32);

/// Metric inputs and outputs carried alongside the code index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProjectData {
    pub metadata: BTreeMap<ProjectId, ProjectMetadata>,
    pub developers: BTreeMap<DeveloperId, String>,
    pub contributions: ContributionMatrix,
    pub karma: KarmaTable,
    pub trust: TrustTable,
}

impl ProjectData {
    /// Runs the trust computation over a loaded dataset.
    pub fn from_bundle(bundle: &DatasetBundle) -> Result<Self, TrustError> {
        let (karma, trust) = compute_all(&bundle.matrix, &bundle.votes)?;
        Ok(Self {
            metadata: bundle.metadata.clone(),
            developers: bundle.developers.clone(),
            contributions: bundle.matrix.clone(),
            karma,
            trust,
        })
    }
}

/// A searchable index plus the project data it is joined with at query time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndexSnapshot {
    pub format_version: u64,
    /// Sorted by id; `entities[i].id == i`.
    pub entities: Vec<CodeEntity>,
    /// Postings per (field, term), each list sorted by entity id.
    pub postings: BTreeMap<(Field, String), Vec<Posting>>,
    pub doc_count: usize,
    pub data: ProjectData,
}

impl IndexSnapshot {
    pub fn entity(&self, id: u32) -> Option<&CodeEntity> {
        self.entities.get(id as usize)
    }

    pub fn postings(&self, field: Field, term: &str) -> &[Posting] {
        // BTreeMap lookups need an owned key of the tuple type.
        self.postings.get(&(field, term.to_owned())).map_or(&[], Vec::as_slice)
    }

    /// Term frequency of `term` in `field` of entity `id`.
    pub fn term_frequency(&self, field: Field, term: &str, id: u32) -> u32 {
        let list = self.postings(field, term);
        list.binary_search_by_key(&id, |p| p.0).map_or(0, |i| list[i].1)
    }

    pub fn trust(&self) -> &TrustTable {
        &self.data.trust
    }

    pub fn karma(&self) -> &KarmaTable {
        &self.data.karma
    }

    pub fn metadata(&self, project: &str) -> Option<&ProjectMetadata> {
        self.data.metadata.get(project)
    }
}

/// Renumbers entities densely from 0 in their current order.
pub fn assign_ids(entities: &mut [CodeEntity]) {
    for (i, e) in entities.iter_mut().enumerate() {
        e.id = i as u32;
    }
}

/// Builds postings for every field of every entity.
pub fn build_index(mut entities: Vec<CodeEntity>, data: ProjectData) -> Result<IndexSnapshot, IndexError> {
    entities.sort_by_key(|e| e.id);
    if let Some(pair) = entities.windows(2).find(|p| p[0].id == p[1].id) {
        return Err(IndexError::DuplicateEntityId(pair[0].id));
    }
    if let Some(gap) = entities
        .iter()
        .enumerate()
        .find(|(i, e)| e.id != *i as u32)
        .map(|(i, _)| i as u32)
    {
        return Err(IndexError::SparseEntityIds(gap));
    }

    let mut postings: BTreeMap<(Field, String), Vec<Posting>> = BTreeMap::new();
    for entity in &entities {
        for field in Field::ALL {
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for token in tokenize(&field.text(entity)) {
                *counts.entry(token).or_insert(0) += 1;
            }
            for (term, tf) in counts {
                postings.entry((field, term)).or_default().push((entity.id, tf));
            }
        }
    }

    Ok(IndexSnapshot {
        format_version: FORMAT_VERSION,
        doc_count: entities.len(),
        entities,
        postings,
        data,
    })
}
