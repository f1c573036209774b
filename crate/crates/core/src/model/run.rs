//! TREC run files: `qid Q0 docid rank score tag`, whitespace separated.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::EmbeddingStore;
use crate::error::{Error, Result};
use crate::scoring::Ranking;

/// Largest candidate set accepted per query.
pub const MAX_CANDIDATES: usize = 1000;

/// Run tag written on re-ranked output.
pub const RUN_TAG: &str = "lilens";

/// The passages a first-stage ranker retrieved for one query, in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub query_id: String,
    pub doc_ids: Vec<String>,
    pub first_stage_scores: Option<Vec<f64>>,
}

impl CandidateSet {
    pub fn new(query_id: impl Into<String>, doc_ids: Vec<String>) -> Result<Self> {
        let set = Self {
            query_id: query_id.into(),
            doc_ids,
            first_stage_scores: None,
        };
        set.check_shape()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    fn check_shape(&self) -> Result<()> {
        if self.doc_ids.is_empty() {
            return Err(Error::Malformed(format!(
                "candidate set for {} is empty",
                self.query_id
            )));
        }
        if self.doc_ids.len() > MAX_CANDIDATES {
            return Err(Error::CandidateSetTooLarge {
                query_id: self.query_id.clone(),
                n_docs: self.doc_ids.len(),
            });
        }
        let mut seen = HashSet::with_capacity(self.doc_ids.len());
        for d in &self.doc_ids {
            if !seen.insert(d.as_str()) {
                return Err(Error::Malformed(format!(
                    "duplicate document {d} for query {}",
                    self.query_id
                )));
            }
        }
        Ok(())
    }

    /// Resolves every document id against the store.
    pub fn resolve(&self, docs: &EmbeddingStore) -> Result<Vec<usize>> {
        self.doc_ids
            .iter()
            .map(|d| {
                docs.index_of(d)
                    .ok_or_else(|| Error::UnknownDocument(d.clone()))
            })
            .collect()
    }
}

pub fn load_run(path: impl AsRef<Path>) -> Result<Vec<CandidateSet>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_run(BufReader::new(file)).map_err(|e| e.in_file(path))
}

/// Parses run lines into one candidate set per query, queries in order of
/// first appearance and documents in ascending rank.
pub fn parse_run(reader: impl BufRead) -> Result<Vec<CandidateSet>> {
    struct Entry {
        rank: i64,
        doc: String,
        score: f64,
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<Entry>> = HashMap::new();
    let mut pairs: HashSet<(String, String)> = HashSet::new();

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let (qid, doc) = (fields[0], fields[2]);
        let rank: i64 = fields[3].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("non-numeric rank {:?}", fields[3]),
        })?;
        let score: f64 = fields[4]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("non-numeric score {:?}", fields[4]),
            })?;
        if !pairs.insert((qid.to_string(), doc.to_string())) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate pair ({qid}, {doc})"),
            });
        }
        let group = groups.entry(qid.to_string()).or_insert_with(|| {
            order.push(qid.to_string());
            Vec::new()
        });
        group.push(Entry {
            rank,
            doc: doc.to_string(),
            score,
        });
        if group.len() > MAX_CANDIDATES {
            return Err(Error::CandidateSetTooLarge {
                query_id: qid.to_string(),
                n_docs: group.len(),
            });
        }
    }

    Ok(order
        .into_iter()
        .map(|qid| {
            let mut entries = groups.remove(&qid).unwrap_or_default();
            // stable: equal ranks keep file order
            entries.sort_by_key(|e| e.rank);
            let (doc_ids, scores) = entries.into_iter().map(|e| (e.doc, e.score)).unzip();
            CandidateSet {
                query_id: qid,
                doc_ids,
                first_stage_scores: Some(scores),
            }
        })
        .collect())
}

/// Formats `x` with nine significant digits, without an exponent.
pub(crate) fn format_score(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_run(mut w: impl Write, rankings: &[Ranking], tag: &str) -> Result<()> {
    for ranking in rankings {
        for (rank, (doc, score)) in ranking.entries.iter().enumerate() {
            writeln!(
                w,
                "{} Q0 {} {} {} {}",
                ranking.query_id,
                doc,
                rank + 1,
                format_score(*score),
                tag
            )?;
        }
    }
    w.flush()?;
    Ok(())
}
