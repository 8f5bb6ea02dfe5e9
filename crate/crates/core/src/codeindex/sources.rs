use std::fs;
use std::path::{Path, PathBuf};

use crate::ProjectId;

use super::{assign_ids, build_index, extract_entities, CodeEntity, Extraction, IndexError, IndexSnapshot};

const SOURCE_EXTENSION: &str = "java";

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), IndexError> {
    let io = |source| IndexError::Io {
        path: dir.to_path_buf(),
        source,
    };
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path.extension().is_some_and(|e| e == SOURCE_EXTENSION) {
            out.push(path.strip_prefix(root).unwrap_or(&path).to_path_buf());
        }
    }
    Ok(())
}

/// Extracts every `.java` file under `root`, in sorted relative-path order.
/// File paths on the entities are relative to `root` with `/` separators.
/// Invalid UTF-8 is decoded lossily.
pub fn extract_directory(project: &ProjectId, root: &Path) -> Result<Extraction, IndexError> {
    let mut files = Vec::new();
    collect_files(root, root, &mut files)?;
    let mut rel: Vec<(String, PathBuf)> = files
        .into_iter()
        .map(|p| {
            let key = p
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            (key, p)
        })
        .collect();
    rel.sort();

    let mut out = Extraction::default();
    for (file_path, path) in rel {
        let full = root.join(&path);
        let bytes = fs::read(&full).map_err(|source| IndexError::Io { path: full, source })?;
        let source = String::from_utf8_lossy(&bytes);
        let mut file = extract_entities(project, &file_path, &source);
        out.entities.append(&mut file.entities);
        out.warnings.append(&mut file.warnings);
    }
    assign_ids(&mut out.entities);
    Ok(out)
}

/// Rebuilds `snapshot` with `project`'s entities replaced by `entities`.
///
/// Entities are ordered by (project, file path, declaration order) and
/// renumbered from 0 before postings are rebuilt.
pub fn replace_project(
    snapshot: IndexSnapshot,
    project: &ProjectId,
    entities: Vec<CodeEntity>,
) -> Result<IndexSnapshot, IndexError> {
    let mut all: Vec<CodeEntity> = snapshot
        .entities
        .into_iter()
        .filter(|e| e.project != *project)
        .chain(entities)
        .collect();
    // Stable sort keeps declaration order within a file.
    all.sort_by(|a, b| (&a.project, &a.file_path).cmp(&(&b.project, &b.file_path)));
    assign_ids(&mut all);
    build_index(all, snapshot.data)
}
