use std::path::{Path, PathBuf};

use jbender_core::codeindex::{build_index, extract_directory, replace_project, IndexSnapshot, ProjectData};
use jbender_core::ingest::load_dataset;
use jbender_core::ProjectId;

pub const FIXTURE_PROJECTS: [&str; 4] = ["commons-lang", "hamcrest", "junit", "tinyutil"];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

pub fn fixture_snapshot() -> IndexSnapshot {
    let bundle = load_dataset(&fixtures().join("meta")).unwrap();
    let mut snapshot = build_index(Vec::new(), ProjectData::from_bundle(&bundle).unwrap()).unwrap();
    for project in FIXTURE_PROJECTS {
        let id = ProjectId::from(project);
        let extraction = extract_directory(&id, &fixtures().join("src").join(project)).unwrap();
        snapshot = replace_project(snapshot, &id, extraction.entities).unwrap();
    }
    snapshot
}
