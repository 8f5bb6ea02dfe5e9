//! Directory layout (format version 1):
//!
//! - `meta.json`: format version, doc count, project metadata, developer
//!   names, contribution triples, and the karma/trust tables. Scores are
//!   strings holding the shortest decimal that round-trips the `f64`.
//! - `entities.jsonl`: one entity per line, by ascending id.
//! - `postings.jsonl`: one `{"field","term","list"}` line per key, sorted by
//!   (field, term).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ingest::ProjectMetadata;
use crate::trustcore::{ContributionMatrix, KarmaTable, TrustTable};
use crate::{DeveloperId, ProjectId};

use super::{CodeEntity, Field, IndexError, IndexSnapshot, Posting, ProjectData};

pub const FORMAT_VERSION: u64 = 1;

const META: &str = "meta.json";
const ENTITIES: &str = "entities.jsonl";
const POSTINGS: &str = "postings.jsonl";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaFile {
    format_version: u64,
    doc_count: usize,
    projects: Vec<ProjectMetadata>,
    developers: BTreeMap<DeveloperId, String>,
    contributions: Vec<(DeveloperId, ProjectId, u64)>,
    karma: BTreeMap<DeveloperId, String>,
    trust: BTreeMap<ProjectId, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PostingLine {
    field: Field,
    term: String,
    list: Vec<Posting>,
}

fn encode_score(x: f64) -> String {
    // `Display` for f64 prints the shortest decimal that parses back exactly.
    format!("{x}")
}

pub fn persist_index(snapshot: &IndexSnapshot, dir: &Path) -> Result<(), IndexError> {
    fs::create_dir_all(dir).map_err(|source| IndexError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let data = &snapshot.data;
    let meta = MetaFile {
        format_version: snapshot.format_version,
        doc_count: snapshot.doc_count,
        projects: data.metadata.values().cloned().collect(),
        developers: data.developers.clone(),
        contributions: data
            .contributions
            .entries()
            .map(|(d, p, c)| (d.clone(), p.clone(), c))
            .collect(),
        karma: data.karma.iter().map(|(d, k)| (d.clone(), encode_score(k))).collect(),
        trust: data.trust.iter().map(|(p, t)| (p.clone(), encode_score(t))).collect(),
    };
    let mut meta_text = serde_json::to_string_pretty(&meta).expect("meta serializes");
    meta_text.push('\n');
    write(dir, META, meta_text)?;

    let mut entities = String::new();
    for e in &snapshot.entities {
        entities.push_str(&serde_json::to_string(e).expect("entity serializes"));
        entities.push('\n');
    }
    write(dir, ENTITIES, entities)?;

    let mut postings = String::new();
    for ((field, term), list) in &snapshot.postings {
        let line = PostingLine {
            field: *field,
            term: term.clone(),
            list: list.clone(),
        };
        postings.push_str(&serde_json::to_string(&line).expect("posting serializes"));
        postings.push('\n');
    }
    write(dir, POSTINGS, postings)
}

fn write(dir: &Path, name: &str, contents: String) -> Result<(), IndexError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| IndexError::Io { path, source })
}

pub fn load_index(dir: &Path) -> Result<IndexSnapshot, IndexError> {
    let meta_text = read(dir, META)?;
    let corrupt = |file: &str, reason: String| IndexError::CorruptFile {
        file: dir.join(file),
        reason,
    };

    let version: serde_json::Value = serde_json::from_str(&meta_text).map_err(|e| corrupt(META, e.to_string()))?;
    match version.get("format_version").and_then(|v| v.as_u64()) {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(IndexError::VersionMismatch {
                found,
                supported: FORMAT_VERSION,
            })
        }
        None => return Err(corrupt(META, "missing format_version".into())),
    }
    let meta: MetaFile = serde_json::from_value(version).map_err(|e| corrupt(META, e.to_string()))?;

    let mut contributions = ContributionMatrix::new();
    for (d, p, c) in meta.contributions {
        contributions
            .insert(d, p, c)
            .map_err(|e| corrupt(META, e.to_string()))?;
    }
    let decode = |id: &str, raw: &str| {
        raw.parse::<f64>()
            .map_err(|_| corrupt(META, format!("bad score `{raw}` for `{id}`")))
    };
    let karma = meta
        .karma
        .iter()
        .map(|(d, raw)| Ok((d.clone(), decode(d.as_str(), raw)?)))
        .collect::<Result<KarmaTable, IndexError>>()?;
    let trust = meta
        .trust
        .iter()
        .map(|(p, raw)| Ok((p.clone(), decode(p.as_str(), raw)?)))
        .collect::<Result<TrustTable, IndexError>>()?;
    let metadata = meta.projects.into_iter().map(|m| (m.id.clone(), m)).collect();

    let mut entities = Vec::new();
    for (i, line) in read(dir, ENTITIES)?.lines().enumerate() {
        let entity: CodeEntity =
            serde_json::from_str(line).map_err(|e| corrupt(ENTITIES, format!("line {}: {e}", i + 1)))?;
        if entity.id as usize != i {
            return Err(corrupt(
                ENTITIES,
                format!("line {}: expected id {i}, found {}", i + 1, entity.id),
            ));
        }
        entities.push(entity);
    }
    if entities.len() != meta.doc_count {
        return Err(corrupt(
            META,
            format!("doc_count {} but {} entities", meta.doc_count, entities.len()),
        ));
    }

    let mut postings = BTreeMap::new();
    for (i, line) in read(dir, POSTINGS)?.lines().enumerate() {
        let p: PostingLine =
            serde_json::from_str(line).map_err(|e| corrupt(POSTINGS, format!("line {}: {e}", i + 1)))?;
        let sorted = p.list.windows(2).all(|w| w[0].0 < w[1].0);
        let in_range = p.list.iter().all(|&(id, _)| (id as usize) < entities.len());
        if !sorted || !in_range {
            return Err(corrupt(POSTINGS, format!("line {}: invalid posting list", i + 1)));
        }
        postings.insert((p.field, p.term), p.list);
    }

    Ok(IndexSnapshot {
        format_version: meta.format_version,
        doc_count: meta.doc_count,
        entities,
        postings,
        data: ProjectData {
            metadata,
            developers: meta.developers,
            contributions,
            karma,
            trust,
        },
    })
}

fn read(dir: &Path, name: &str) -> Result<String, IndexError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|source| match source.kind() {
        std::io::ErrorKind::InvalidData => IndexError::CorruptFile {
            file: path,
            reason: source.to_string(),
        },
        _ => IndexError::Io { path, source },
    })
}
