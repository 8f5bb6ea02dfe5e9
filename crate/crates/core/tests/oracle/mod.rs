//! Independent reference implementations used to check the library.
//!
//! Nothing here calls into the code under test except to read plain data
//! (entity fields, table values); every computation is redone from scratch
//! with the simplest possible algorithm.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use jbender_core::codeindex::{CodeEntity, IndexSnapshot};
use rand::rngs::StdRng;
use rand::RngExt;

/// A dense random instance: `commits[d][p]` (0 = no entry) and `votes[p]`.
#[derive(Debug, Clone)]
pub struct DenseInstance {
    pub commits: Vec<Vec<u64>>,
    pub votes: Vec<u64>,
}

pub fn dev_id(d: usize) -> String {
    format!("d{d:03}")
}

pub fn project_id(p: usize) -> String {
    format!("p{p:03}")
}

impl DenseInstance {
    /// Up to `max_devs × max_projects`, commits in [1, 1000], votes in [0, 10000].
    pub fn random(rng: &mut StdRng, max_devs: usize, max_projects: usize) -> Self {
        let devs = rng.random_range(1..=max_devs);
        let projects = rng.random_range(1..=max_projects);
        let density = rng.random_range(0.05..0.5);
        let mut commits = vec![vec![0u64; projects]; devs];
        for row in commits.iter_mut() {
            for c in row.iter_mut() {
                if rng.random_bool(density) {
                    *c = rng.random_range(1..=1000);
                }
            }
            // every developer has at least one entry
            if row.iter().all(|&c| c == 0) {
                let p = rng.random_range(0..projects);
                row[p] = rng.random_range(1..=1000);
            }
        }
        let votes = (0..projects).map(|_| rng.random_range(0..=10_000)).collect();
        Self { commits, votes }
    }

    pub fn entries(&self) -> Vec<(String, String, u64)> {
        let mut out = Vec::new();
        for (d, row) in self.commits.iter().enumerate() {
            for (p, &c) in row.iter().enumerate() {
                if c > 0 {
                    out.push((dev_id(d), project_id(p), c));
                }
            }
        }
        out
    }

    pub fn vote_pairs(&self) -> Vec<(String, u64)> {
        self.votes
            .iter()
            .enumerate()
            .map(|(p, &v)| (project_id(p), v))
            .collect()
    }

    /// Direct double-loop evaluation of karma and trust, natural log with
    /// `ln(1 + x)` smoothing.
    #[allow(clippy::needless_range_loop)]
    pub fn naive_scores(&self) -> (BTreeMap<String, f64>, BTreeMap<String, f64>) {
        let l = |x: u64| (1.0 + x as f64).ln();
        let projects = self.votes.len();
        let mut karma = vec![0.0; self.commits.len()];
        for (d, row) in self.commits.iter().enumerate() {
            let df = row.iter().filter(|&&c| c > 0).count() as u64;
            for p in 0..projects {
                if row[p] > 0 {
                    karma[d] += l(row[p]) / l(df) * l(self.votes[p]);
                }
            }
        }
        let mut trust = BTreeMap::new();
        for p in 0..projects {
            let total: f64 = self.commits.iter().filter(|r| r[p] > 0).map(|r| l(r[p])).sum();
            if total == 0.0 {
                continue;
            }
            let mut t = 0.0;
            for (d, row) in self.commits.iter().enumerate() {
                if row[p] > 0 {
                    t += l(row[p]) / total * karma[d];
                }
            }
            trust.insert(project_id(p), t);
        }
        let karma = karma.into_iter().enumerate().map(|(d, k)| (dev_id(d), k)).collect();
        (karma, trust)
    }

    /// Count of non-zero cells in a developer's row.
    pub fn row_nonzeros(&self, d: usize) -> usize {
        self.commits[d].iter().filter(|&&c| c > 0).count()
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) || (a == 0.0 && b == 0.0)
}

/// Ordinary least squares of (ln rank, ln value) from raw normal-equation
/// sums; returns (slope, |r|).
pub fn loglog_regression(samples: &[f64]) -> (f64, f64) {
    let mut ys: Vec<f64> = samples.iter().copied().filter(|&y| y > 0.0).collect();
    ys.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = ys.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let x = ((i + 1) as f64).ln();
        let y = y.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let cov = n * sxy - sx * sy;
    let slope = cov / (n * sxx - sx * sx);
    let r = cov / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
    (slope, r.abs())
}

/// Preferential attachment over projects: starts with two projects; each
/// contribution opens a new project with probability `p_new`, otherwise
/// joins an existing one with probability proportional to its count + 1.
pub fn preferential_attachment(rng: &mut StdRng, contributions: usize, p_new: f64) -> Vec<u64> {
    let mut counts: Vec<u64> = vec![1, 1];
    let mut total_weight: u64 = counts.iter().map(|c| c + 1).sum();
    for _ in 2..contributions {
        if rng.random_bool(p_new) {
            counts.push(1);
            total_weight += 2;
            continue;
        }
        let mut pick = rng.random_range(0..total_weight);
        for c in counts.iter_mut() {
            if pick < *c + 1 {
                *c += 1;
                total_weight += 1;
                break;
            }
            pick -= *c + 1;
        }
    }
    counts
}

// ---- text search ----

/// Reference tokenizer: lowercase alphanumeric words, plus camel-case humps
/// when a word has more than one.
pub fn brute_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            word.push(c);
            continue;
        }
        if word.is_empty() {
            continue;
        }
        out.push(word.to_lowercase());
        let chars: Vec<char> = word.chars().collect();
        let mut humps: Vec<String> = vec![String::new()];
        for (i, &ch) in chars.iter().enumerate() {
            let boundary = i > 0
                && ((chars[i - 1].is_lowercase() && ch.is_uppercase())
                    || (chars[i - 1].is_uppercase()
                        && ch.is_uppercase()
                        && i + 1 < chars.len()
                        && chars[i + 1].is_lowercase()));
            if boundary {
                humps.push(String::new());
            }
            humps.last_mut().unwrap().push(ch);
        }
        if humps.len() > 1 {
            out.extend(humps.iter().map(|h| h.to_lowercase()));
        }
        word.clear();
    }
    out
}

pub const FIELDS: [&str; 4] = ["body", "comments", "interfaces", "name"];

pub fn field_text(e: &CodeEntity, field: &str) -> String {
    match field {
        "body" => e.body.clone(),
        "comments" => e.comments.clone(),
        "interfaces" => e.interfaces.join(" "),
        "name" => e.name.clone(),
        _ => unreachable!(),
    }
}

/// Postings recomputed by tokenizing every field of every entity.
pub fn brute_postings(entities: &[CodeEntity]) -> BTreeMap<(String, String), Vec<(u32, u32)>> {
    let mut out: BTreeMap<(String, String), Vec<(u32, u32)>> = BTreeMap::new();
    for e in entities {
        for field in FIELDS {
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for t in brute_tokens(&field_text(e, field)) {
                *counts.entry(t).or_default() += 1;
            }
            for (term, tf) in counts {
                out.entry((field.to_owned(), term)).or_default().push((e.id, tf));
            }
        }
    }
    for list in out.values_mut() {
        list.sort();
    }
    out
}

/// A query in oracle form: (query-field, term) clauses plus filters.
#[derive(Debug, Clone)]
pub struct OracleQuery {
    pub clauses: Vec<(String, String)>,
    pub visibility: Option<String>,
    pub project: Option<String>,
    pub sort: String,
    pub alpha: f64,
    pub limit: usize,
}

impl OracleQuery {
    pub fn text(&self) -> String {
        let mut atoms: Vec<String> = self
            .clauses
            .iter()
            .map(|(f, t)| if f == "any" { t.clone() } else { format!("{f}:{t}") })
            .collect();
        if let Some(v) = &self.visibility {
            atoms.push(format!("visibility:{v}"));
        }
        if let Some(p) = &self.project {
            atoms.push(format!("project:{p}"));
        }
        atoms.join(" ")
    }
}

fn query_fields(f: &str) -> Vec<&'static str> {
    match f {
        "name" => vec!["name"],
        "body" => vec!["body"],
        "comment" => vec!["comments"],
        "implements" => vec!["interfaces"],
        "any" => FIELDS.to_vec(),
        _ => unreachable!(),
    }
}

fn weight(field: &str) -> f64 {
    match field {
        "name" => 3.0,
        "interfaces" => 2.0,
        _ => 1.0,
    }
}

/// Linear scan over all entities without the index. Returns
/// (entity id, relevance) in final order, after truncation.
pub fn linear_scan(snapshot: &IndexSnapshot, q: &OracleQuery) -> Vec<(u32, f64)> {
    let entities = &snapshot.entities;
    let n = entities.len() as f64;
    let tf = |e: &CodeEntity, field: &str, term: &str| {
        brute_tokens(&field_text(e, field))
            .iter()
            .filter(|t| *t == term)
            .count() as f64
    };
    let df = |field: &str, term: &str| entities.iter().filter(|e| tf(e, field, term) > 0.0).count() as f64;

    let mut hits: Vec<(u32, f64, Option<f64>)> = Vec::new();
    for e in entities {
        if q.visibility.as_deref().is_some_and(|v| e.visibility.as_str() != v)
            || q.project.as_deref().is_some_and(|p| e.project.as_str() != p)
        {
            continue;
        }
        let mut matched = true;
        let mut score = 0.0;
        for (qf, term) in &q.clauses {
            let mut best: f64 = 0.0;
            let mut any = false;
            for field in query_fields(qf) {
                let f = tf(e, field, term);
                if f > 0.0 {
                    any = true;
                    best = best.max(weight(field) * (1.0 + f).ln() * (n / df(field, term)).ln());
                }
            }
            matched &= any;
            score += best;
        }
        if matched {
            hits.push((e.id, score, snapshot.trust().get(e.project.as_str())));
        }
    }

    let trust_key = |t: Option<f64>| t.map_or(f64::NEG_INFINITY, |x| x);
    match q.sort.as_str() {
        "relevance" => hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0))),
        "trust" => hits.sort_by(|a, b| {
            trust_key(b.2)
                .partial_cmp(&trust_key(a.2))
                .unwrap()
                .then(b.1.partial_cmp(&a.1).unwrap())
                .then(a.0.cmp(&b.0))
        }),
        "blend" => {
            let rels: Vec<f64> = hits.iter().map(|h| h.1).collect();
            let trusts: Vec<f64> = hits.iter().filter_map(|h| h.2).collect();
            let norm = |xs: &[f64], x: f64| {
                let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if hi > lo {
                    (x - lo) / (hi - lo)
                } else {
                    0.0
                }
            };
            let score = |h: &(u32, f64, Option<f64>)| {
                (1.0 - q.alpha) * norm(&rels, h.1) + q.alpha * h.2.map_or(0.0, |t| norm(&trusts, t))
            };
            hits.sort_by(|a, b| {
                score(b)
                    .partial_cmp(&score(a))
                    .unwrap()
                    .then(b.1.partial_cmp(&a.1).unwrap())
                    .then(a.0.cmp(&b.0))
            });
        }
        other => panic!("unknown sort {other}"),
    }
    hits.truncate(q.limit);
    hits.into_iter().map(|(id, s, _)| (id, s)).collect()
}

/// A deterministic query set over the vocabulary of the snapshot.
pub fn generate_queries(snapshot: &IndexSnapshot, rng: &mut StdRng, count: usize) -> Vec<OracleQuery> {
    let mut vocab: BTreeSet<String> = BTreeSet::new();
    for e in &snapshot.entities {
        for field in FIELDS {
            vocab.extend(brute_tokens(&field_text(e, field)));
        }
    }
    let vocab: Vec<String> = vocab.into_iter().collect();
    let qfields = ["name", "body", "comment", "implements", "any"];
    let sorts = ["relevance", "trust", "blend"];
    let visibilities = ["public", "protected", "private", "default"];
    let projects: Vec<String> = snapshot.data.metadata.keys().map(|p| p.to_string()).collect();

    (0..count)
        .map(|i| {
            let n_clauses = if i % 10 == 9 { 0 } else { rng.random_range(1..=3) };
            // Most clauses draw from one anchor entity so conjunctions can match.
            let anchor = &snapshot.entities[rng.random_range(0..snapshot.entities.len())];
            let clauses = (0..n_clauses)
                .map(|_| {
                    let own_tokens = |f: &str| -> Vec<String> {
                        query_fields(f)
                            .iter()
                            .flat_map(|field| brute_tokens(&field_text(anchor, field)))
                            .collect()
                    };
                    let usable: Vec<&str> = qfields.iter().copied().filter(|f| !own_tokens(f).is_empty()).collect();
                    let f = usable[rng.random_range(0..usable.len())];
                    let own = own_tokens(f);
                    let t = if rng.random_bool(0.85) {
                        own[rng.random_range(0..own.len())].clone()
                    } else {
                        vocab[rng.random_range(0..vocab.len())].clone()
                    };
                    (f.to_owned(), t)
                })
                .collect();
            let visibility = (n_clauses == 0 || rng.random_bool(0.2)).then(|| {
                if rng.random_bool(0.7) {
                    anchor.visibility.as_str().to_owned()
                } else {
                    visibilities[rng.random_range(0..4)].to_owned()
                }
            });
            let project = rng.random_bool(0.15).then(|| {
                if rng.random_bool(0.7) {
                    anchor.project.to_string()
                } else {
                    projects[rng.random_range(0..projects.len())].clone()
                }
            });
            OracleQuery {
                clauses,
                visibility,
                project,
                sort: sorts[i % 3].to_owned(),
                alpha: [0.0, 0.25, 0.5, 1.0][rng.random_range(0..4)],
                limit: rng.random_range(1..=25),
            }
        })
        .collect()
}
