#![allow(dead_code)]

use std::path::{Path, PathBuf};

use jbender_core::codeindex::{extract_directory, replace_project, IndexSnapshot, ProjectData};
use jbender_core::ingest::load_dataset;
use jbender_core::ProjectId;

/// Fixture root; also resolves when this module is included from a sibling crate.
pub fn fixtures() -> PathBuf {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let own = manifest.join("tests/fixtures");
    if own.join("meta").is_dir() {
        own
    } else {
        manifest.join("../core/tests/fixtures")
    }
}

pub const FIXTURE_PROJECTS: [&str; 4] = ["commons-lang", "hamcrest", "junit", "tinyutil"];

/// Ingests the fixture dataset and indexes every fixture source project.
pub fn fixture_snapshot() -> IndexSnapshot {
    let bundle = load_dataset(&fixtures().join("meta")).unwrap();
    let data = ProjectData::from_bundle(&bundle).unwrap();
    let mut snapshot = jbender_core::codeindex::build_index(Vec::new(), data).unwrap();
    for project in FIXTURE_PROJECTS {
        let id = ProjectId::from(project);
        let extraction = extract_directory(&id, &fixtures().join("src").join(project)).unwrap();
        assert!(extraction.warnings.is_empty(), "{:?}", extraction.warnings);
        snapshot = replace_project(snapshot, &id, extraction.entities).unwrap();
    }
    snapshot
}
