use std::io::Write;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use jbender_core::codeindex::{
    assign_ids, build_index, extract_directory, load_index, persist_index, replace_project, IndexSnapshot, ProjectData,
};
use jbender_core::ingest::load_dataset_reporting;
use jbender_core::search::{DEFAULT_ALPHA, DEFAULT_LIMIT};
use jbender_core::ProjectId;

use crate::report::{developer_ranking, parse_sort, power_law_report, project_ranking, search_page, ProjectOrder};
use crate::table::{render, scale, score};

#[derive(Debug, Parser)]
#[command(name = "jbender", version, about = "Trust-ranked Java code search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankKind {
    Projects,
    Developers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankBy {
    Trust,
    Votes,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a metadata directory, compute karma and trust, and write an index.
    Ingest {
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract Java sources of one project into an existing index.
    Index {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        project: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the project or developer ranking.
    Rank {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, value_enum)]
        kind: RankKind,
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Project ordering; ignored for developers.
        #[arg(long, value_enum, default_value = "trust")]
        by: RankBy,
    },
    /// Run a structured query.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value = "relevance")]
        sort: String,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        /// Print the result page as JSON, as served by the HTTP API.
        #[arg(long)]
        json: bool,
        query: String,
    },
    /// Fit a power law to one of the dataset distributions.
    Fit {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        series: String,
    },
    /// Serve the HTTP API and, optionally, static web UI files.
    Serve {
        #[arg(long, env = "JBENDER_INDEX")]
        index: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn open(index: &Path) -> Result<IndexSnapshot> {
    load_index(index).with_context(|| format!("cannot load index {}", index.display()))
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Ingest { meta, out: dir } => ingest(&meta, &dir, out, err),
        Command::Index { src, project, out: dir } => index(&src, &project, &dir, out, err),
        Command::Rank { index, kind, top, by } => rank(&open(&index)?, kind, top, by, out),
        Command::Search {
            index,
            sort,
            alpha,
            limit,
            json,
            query,
        } => {
            let snapshot = open(&index)?;
            let page = search_page(&snapshot, &query, parse_sort(&sort)?, alpha, limit)?;
            if json {
                serde_json::to_writer_pretty(&mut *out, &page)?;
                writeln!(out)?;
            } else {
                write_search(&page, out)?;
            }
            Ok(())
        }
        Command::Fit { index, series } => {
            let report = power_law_report(&open(&index)?, &series)?;
            let rows = vec![
                vec!["series".into(), report.series],
                vec!["n_points".into(), report.n_points.to_string()],
                vec!["slope".into(), report.slope.to_string()],
                vec!["intercept".into(), report.intercept.to_string()],
                vec!["abs_r".into(), report.abs_r.to_string()],
            ];
            write!(out, "{}", render(&["field", "value"], &rows))?;
            Ok(())
        }
        Command::Serve {
            index,
            port,
            bind,
            static_dir,
        } => {
            let snapshot = open(&index)?;
            if let Some(dir) = &static_dir {
                if !dir.is_dir() {
                    bail!("static directory {} does not exist", dir.display());
                }
            }
            crate::http::serve(snapshot, (bind, port).into(), static_dir, err)
        }
    }
}

fn ingest(meta: &Path, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (bundle, warnings) = load_dataset_reporting(meta)?;
    for w in &warnings {
        writeln!(err, "warning: {w}")?;
    }
    let data = ProjectData::from_bundle(&bundle)?;

    // Re-ingesting keeps already extracted code for projects that still exist.
    let mut entities = Vec::new();
    if dir.join("meta.json").exists() {
        let previous = open(dir)?;
        let (keep, dropped): (Vec<_>, Vec<_>) = previous
            .entities
            .into_iter()
            .partition(|e| data.metadata.contains_key(&e.project));
        let mut gone: Vec<&ProjectId> = dropped.iter().map(|e| &e.project).collect();
        gone.dedup();
        for p in gone {
            writeln!(
                err,
                "warning: dropping indexed code of project `{p}`, which is no longer in the metadata"
            )?;
        }
        entities = keep;
        assign_ids(&mut entities);
    }

    let snapshot = build_index(entities, data)?;
    persist_index(&snapshot, dir)?;
    writeln!(
        out,
        "ingested {} projects, {} developers, {} contributions into {}",
        snapshot.data.metadata.len(),
        snapshot.data.contributions.developer_count(),
        snapshot.data.contributions.len(),
        dir.display()
    )?;
    Ok(())
}

fn index(src: &Path, project: &str, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let snapshot = open(dir)?;
    let id = ProjectId::from(project);
    if snapshot.metadata(project).is_none() {
        bail!("unknown project `{project}`: not in the ingested metadata");
    }
    if !src.is_dir() {
        bail!("source directory {} does not exist", src.display());
    }
    let extraction = extract_directory(&id, src)?;
    for w in &extraction.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let count = extraction.entities.len();
    let files = {
        let mut f: Vec<&str> = extraction.entities.iter().map(|e| e.file_path.as_str()).collect();
        f.dedup();
        f.len()
    };
    let snapshot = replace_project(snapshot, &id, extraction.entities)?;
    persist_index(&snapshot, dir)?;
    writeln!(
        out,
        "indexed {count} entities from {files} files for project {project}; index holds {} entities",
        snapshot.doc_count
    )?;
    Ok(())
}

fn rank(snapshot: &IndexSnapshot, kind: RankKind, top: usize, by: RankBy, out: &mut dyn Write) -> Result<()> {
    let text = match kind {
        RankKind::Projects => {
            let by = match by {
                RankBy::Trust => ProjectOrder::Trust,
                RankBy::Votes => ProjectOrder::Votes,
            };
            let rows: Vec<Vec<String>> = project_ranking(snapshot, top, by)
                .rows
                .into_iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.id.to_string(),
                        score(r.trust),
                        scale(r.trust_scale),
                        r.votes.to_string(),
                        r.developer_count.to_string(),
                        r.name,
                    ]
                })
                .collect();
            render(
                &["rank", "project", "trust", "scale", "votes", "developers", "name"],
                &rows,
            )
        }
        RankKind::Developers => {
            let rows: Vec<Vec<String>> = developer_ranking(snapshot, top)
                .rows
                .into_iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.id.to_string(),
                        score(Some(r.karma)),
                        r.projects.to_string(),
                        r.commits.to_string(),
                        r.name,
                    ]
                })
                .collect();
            render(&["rank", "developer", "karma", "projects", "commits", "name"], &rows)
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn write_search(page: &crate::report::ApiResultPage, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "{} matches for `{}` (sort: {}, alpha: {}), showing {}",
        page.total_matches,
        page.query_echo,
        page.sort,
        page.alpha,
        page.results.len()
    )?;
    let rows: Vec<Vec<String>> = page
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                format!("{:.4}", r.relevance),
                score(r.trust),
                scale(r.trust_scale),
                r.kind.to_string(),
                r.qualified_name.clone(),
                r.project.id.to_string(),
            ]
        })
        .collect();
    let text = render(
        &["#", "relevance", "trust", "scale", "kind", "qualified_name", "project"],
        &rows,
    );
    out.write_all(text.as_bytes())?;
    Ok(())
}
