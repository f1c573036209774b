//! Spectral concentration of the contextual embeddings of a subword.
//!
//! All document-side occurrences of a subword are stacked into an `m x d`
//! matrix (no mean-centering). The ratio `λ₁ / Σₖ λₖ` of its singular
//! values is 1 when every occurrence points in the same direction and
//! approaches `1 / min(m, d)` when occurrences spread isotropically.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::model::{CandidateSet, CorpusStats, EmbeddingStore, Granularity};

/// Upper bound on occurrence rows kept per term.
pub const DEFAULT_SPECTRAL_CAP: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRow {
    pub term: String,
    pub n_occurrences: usize,
    pub singular_values: Vec<f64>,
    pub ratio: f64,
    pub idf_subword: Option<f64>,
}

pub fn spectral_ratio(term: &str, rows: &[&[f32]]) -> Result<SpectralRow> {
    if rows.is_empty() {
        return Err(Error::NoOccurrences(term.to_string()));
    }
    let sv = singular_values(rows);
    let total: f64 = sv.iter().sum();
    Ok(SpectralRow {
        term: term.to_string(),
        n_occurrences: rows.len(),
        ratio: sv[0] / total,
        singular_values: sv,
        idf_subword: None,
    })
}

fn term_seed(seed: u64, term: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in term.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

struct Reservoir<'s> {
    rows: Vec<&'s [f32]>,
    seen: usize,
    rng: ChaCha8Rng,
}

/// Collects, per requested subword, its occurrence rows in every document
/// of any candidate set. Each (document, position) is visited once, in
/// store order. Terms with more than `cap` occurrences keep a uniform
/// sample chosen by reservoir sampling seeded from `seed` and the term.
pub fn gather_occurrences<'s>(
    docs: &'s EmbeddingStore,
    candidates: &[CandidateSet],
    terms: &BTreeSet<&str>,
    cap: usize,
    seed: u64,
) -> Result<BTreeMap<String, Vec<&'s [f32]>>> {
    let mut pool = BTreeSet::new();
    for c in candidates {
        pool.extend(c.resolve(docs)?);
    }
    let mut reservoirs: BTreeMap<&str, Reservoir<'s>> = terms
        .iter()
        .map(|&t| {
            (
                t,
                Reservoir {
                    rows: Vec::new(),
                    seen: 0,
                    rng: ChaCha8Rng::seed_from_u64(term_seed(seed, t)),
                },
            )
        })
        .collect();
    for idx in pool {
        let doc = docs.by_index(idx);
        for (pos, tok) in doc.tokens().iter().enumerate() {
            let Some(r) = reservoirs.get_mut(tok.text.as_str()) else {
                continue;
            };
            r.seen += 1;
            if r.rows.len() < cap {
                r.rows.push(doc.row(pos));
            } else {
                let j = r.rng.random_range(0..r.seen);
                if j < cap {
                    r.rows[j] = doc.row(pos);
                }
            }
        }
    }
    Ok(reservoirs
        .into_iter()
        .map(|(t, r)| (t.to_string(), r.rows))
        .collect())
}

/// Spectral rows for every subword occurring in the queries. Subwords that
/// never occur in a candidate document are left out.
pub fn spectral_table(
    queries: &EmbeddingStore,
    docs: &EmbeddingStore,
    candidates: &[CandidateSet],
    stats: Option<&CorpusStats>,
    cap: usize,
    seed: u64,
) -> Result<Vec<SpectralRow>> {
    let mut terms = BTreeSet::new();
    for c in candidates {
        let q = queries
            .get(&c.query_id)
            .ok_or_else(|| Error::UnknownQuery(c.query_id.clone()))?;
        terms.extend(q.tokens().iter().map(|t| t.text.as_str()));
    }
    let pools = gather_occurrences(docs, candidates, &terms, cap, seed)?;
    let jobs: Vec<(&String, &Vec<&[f32]>)> =
        pools.iter().filter(|(_, rows)| !rows.is_empty()).collect();
    jobs.par_iter()
        .map(|(term, rows)| {
            let mut row = spectral_ratio(term, rows)?;
            row.idf_subword = stats.and_then(|s| s.idf(term, Granularity::Subword));
            Ok(row)
        })
        .collect()
}
