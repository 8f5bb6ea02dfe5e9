//! Metric invariants as seed-driven checks, shared by the property tests and
//! the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;

use jbender_core::ingest::apply_blacklist;
use jbender_core::trustcore::{
    compute_all, compute_all_with, ContributionMatrix, KarmaTable, Smoothing, TrustTable, VoteVector,
};
use jbender_core::DeveloperId;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};

use crate::oracle::{dev_id, rel_close, DenseInstance};

pub type Check = fn(u64) -> Result<(), String>;

pub const ALL: [(&str, Check); 7] = [
    ("vote monotonicity", vote_monotonicity),
    ("same-project commit monotonicity", commit_monotonicity),
    ("convexity", convexity),
    ("permutation invariance", permutation_invariance),
    ("blacklist equivalence", blacklist_equivalence),
    ("all-zero votes", zero_votes),
    ("log-base ranking invariance", log_base_invariance),
];

fn setup(seed: u64) -> (DenseInstance, StdRng) {
    let mut rng = StdRng::seed_from_u64(seed);
    let inst = DenseInstance::random(&mut rng, 50, 30);
    (inst, rng)
}

pub fn build(inst: &DenseInstance) -> (ContributionMatrix, VoteVector) {
    let m = ContributionMatrix::from_entries(inst.entries()).unwrap();
    let v = inst.vote_pairs().into_iter().collect();
    (m, v)
}

pub fn scores(inst: &DenseInstance) -> (KarmaTable, TrustTable) {
    let (m, v) = build(inst);
    compute_all(&m, &v).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn vote_monotonicity(seed: u64) -> Result<(), String> {
    let (inst, mut rng) = setup(seed);
    let (k0, t0) = scores(&inst);
    let mut bumped = inst.clone();
    let q = rng.random_range(0..bumped.votes.len());
    bumped.votes[q] += 1;
    let (k1, t1) = scores(&bumped);
    for (d, before) in k0.iter() {
        let after = k1.get(d.as_str()).unwrap();
        ensure(after >= before, || format!("K[{d}] fell from {before} to {after}"))?;
    }
    for (p, before) in t0.iter() {
        let after = t1.get(p.as_str()).unwrap();
        ensure(after >= before, || format!("T[{p}] fell from {before} to {after}"))?;
    }
    Ok(())
}

pub fn commit_monotonicity(seed: u64) -> Result<(), String> {
    let (inst, mut rng) = setup(seed);
    let cells: Vec<(usize, usize)> = inst
        .commits
        .iter()
        .enumerate()
        .flat_map(|(d, row)| row.iter().enumerate().filter(|c| *c.1 > 0).map(move |(p, _)| (d, p)))
        .collect();
    let (d, p) = cells[rng.random_range(0..cells.len())];
    let (k0, _) = scores(&inst);
    let mut bumped = inst.clone();
    bumped.commits[d][p] += rng.random_range(1..=100);
    let (k1, _) = scores(&bumped);
    let (before, after) = (k0.get(&dev_id(d)).unwrap(), k1.get(&dev_id(d)).unwrap());
    ensure(after >= before, || {
        format!("K[{}] fell from {before} to {after}", dev_id(d))
    })
}

pub fn convexity(seed: u64) -> Result<(), String> {
    let (inst, _) = setup(seed);
    let (m, _) = build(&inst);
    let (k, t) = scores(&inst);
    for (p, tp) in t.iter() {
        let ks: Vec<f64> = m
            .column(p.as_str())
            .unwrap()
            .keys()
            .map(|d| k.get(d.as_str()).unwrap())
            .collect();
        let lo = ks.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-12 * hi.abs().max(1.0);
        ensure(lo - slack <= tp && tp <= hi + slack, || {
            format!("T[{p}]={tp} outside [{lo}, {hi}]")
        })?;
    }
    Ok(())
}

pub fn permutation_invariance(seed: u64) -> Result<(), String> {
    let (inst, mut rng) = setup(seed);
    let (k, t) = scores(&inst);
    let mut dperm: Vec<usize> = (0..inst.commits.len()).collect();
    let mut pperm: Vec<usize> = (0..inst.votes.len()).collect();
    dperm.shuffle(&mut rng);
    pperm.shuffle(&mut rng);
    let mut entries = Vec::new();
    for (d, row) in inst.commits.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            if c > 0 {
                entries.push((format!("x{}", dperm[d]), format!("y{}", pperm[p]), c));
            }
        }
    }
    let m = ContributionMatrix::from_entries(entries).unwrap();
    let v: VoteVector = inst
        .votes
        .iter()
        .enumerate()
        .map(|(p, &n)| (format!("y{}", pperm[p]), n))
        .collect();
    let (k2, t2) = compute_all(&m, &v).unwrap();
    for (d, kd) in k.iter() {
        let i: usize = d.as_str()[1..].parse().unwrap();
        let moved = k2.get(&format!("x{}", dperm[i])).unwrap();
        ensure(rel_close(moved, kd, 1e-12), || format!("K[{d}] {kd} became {moved}"))?;
    }
    for (p, tp) in t.iter() {
        let i: usize = p.as_str()[1..].parse().unwrap();
        let moved = t2.get(&format!("y{}", pperm[i])).unwrap();
        ensure(rel_close(moved, tp, 1e-12), || format!("T[{p}] {tp} became {moved}"))?;
    }
    Ok(())
}

pub fn blacklist_equivalence(seed: u64) -> Result<(), String> {
    let (inst, mut rng) = setup(seed);
    let (m, v) = build(&inst);
    let bot = rng.random_range(0..inst.commits.len());
    let bots: BTreeSet<DeveloperId> = [DeveloperId::from(dev_id(bot))].into();
    let outcome = apply_blacklist(&m, &bots);
    let without: Vec<_> = inst.entries().into_iter().filter(|e| e.0 != dev_id(bot)).collect();
    let direct = ContributionMatrix::from_entries(without).unwrap();
    ensure(outcome.matrix == direct, || "blacklisted matrix differs".into())?;
    ensure(
        compute_all(&outcome.matrix, &v).unwrap() == compute_all(&direct, &v).unwrap(),
        || "scores differ".into(),
    )
}

pub fn zero_votes(seed: u64) -> Result<(), String> {
    let (mut inst, _) = setup(seed);
    inst.votes.iter_mut().for_each(|v| *v = 0);
    let (k, t) = scores(&inst);
    let all_zero = k.values().chain(t.values()).all(|x| x == 0.0);
    ensure(all_zero, || "non-zero score".into())
}

fn has_near_tie<T>(ranked: &[(T, f64)]) -> bool {
    ranked.windows(2).any(|w| rel_close(w[0].1, w[1].1, 1e-12))
}

pub fn log_base_invariance(seed: u64) -> Result<(), String> {
    let (inst, _) = setup(seed);
    let (m, v) = build(&inst);
    let (ke, te) = compute_all_with(&m, &v, Smoothing::NATURAL).unwrap();
    let karma_order = |k: &KarmaTable| k.ranked().into_iter().map(|(d, _)| d.clone()).collect::<Vec<_>>();
    let trust_order = |t: &TrustTable| t.ranked().into_iter().map(|(p, _)| p.clone()).collect::<Vec<_>>();
    for base in [2.0, std::f64::consts::E, 10.0] {
        let (kb, tb) = compute_all_with(&m, &v, Smoothing::with_base(base)).unwrap();
        let factor = 1.0 / base.ln();
        for (d, x) in ke.iter() {
            let y = kb.get(d.as_str()).unwrap();
            ensure(rel_close(y, x * factor, 1e-12), || {
                format!("base {base}: K[{d}] {y} vs {}", x * factor)
            })?;
        }
        for (p, x) in te.iter() {
            let y = tb.get(p.as_str()).unwrap();
            ensure(rel_close(y, x * factor, 1e-12), || {
                format!("base {base}: T[{p}] {y} vs {}", x * factor)
            })?;
        }
        ensure(
            karma_order(&ke) == karma_order(&kb) || has_near_tie(&ke.ranked()),
            || format!("base {base}: developer order changed"),
        )?;
        ensure(
            trust_order(&te) == trust_order(&tb) || has_near_tie(&te.ranked()),
            || format!("base {base}: project order changed"),
        )?;
    }
    Ok(())
}
