//! Δ_ES: how much higher a query token's MaxSim is when it matches its own
//! subword than when it matches something else.
//!
//! ```text
//! Δ_ES(t) = mean over (q, i) with qᵢ = t of
//!           [ mean_{d ∈ S_q, a*ᵢ = t} C*ᵢ  −  mean_{d ∈ S_q, a*ᵢ ≠ t} C*ᵢ ]
//! ```
//!
//! A `(q, i)` pair whose exact or soft side is empty over `S_q` is skipped.
//! Word-level values sum the subword values of the word's pieces.

use std::collections::{BTreeMap, BTreeSet};

use super::QueryMatches;
use crate::error::{Error, Result};
use crate::model::{word_text, CorpusStats, Granularity};

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEsRow {
    pub term: String,
    pub granularity: Granularity,
    pub delta_es: Option<f64>,
    /// Word rows only: some but not all constituent subwords were undefined.
    pub partial: bool,
    pub n_pairs_used: usize,
    pub n_pairs_skipped: usize,
    pub idf: Option<f64>,
}

/// Mean exact-match `C*` minus mean soft-match `C*` for one `(q, i)` pair,
/// or `None` when either side is empty.
pub fn pair_difference(observations: impl IntoIterator<Item = (f64, bool)>) -> Option<f64> {
    let (mut exact_sum, mut exact_n) = (0.0, 0usize);
    let (mut soft_sum, mut soft_n) = (0.0, 0usize);
    for (c_max, exact) in observations {
        if exact {
            exact_sum += c_max;
            exact_n += 1;
        } else {
            soft_sum += c_max;
            soft_n += 1;
        }
    }
    (exact_n > 0 && soft_n > 0).then(|| exact_sum / exact_n as f64 - soft_sum / soft_n as f64)
}

fn pair_observations<'q>(
    qm: &'q QueryMatches<'_>,
    i: usize,
) -> impl Iterator<Item = (f64, bool)> + 'q {
    let own = qm.query.tokens()[i].text.as_str();
    (0..qm.docs.len()).map(move |k| (qm.docs[k].1[i].c_max, qm.matched_text(k, i) == own))
}

/// Δ_ES of one subword over every query position carrying it.
pub fn delta_es_subword(term: &str, queries: &[QueryMatches<'_>]) -> Result<DeltaEsRow> {
    let mut diffs = Vec::new();
    let mut skipped = 0;
    for qm in queries {
        for (i, tok) in qm.query.tokens().iter().enumerate() {
            if tok.text != term {
                continue;
            }
            match pair_difference(pair_observations(qm, i)) {
                Some(d) => diffs.push(d),
                None => skipped += 1,
            }
        }
    }
    if diffs.is_empty() && skipped == 0 {
        return Err(Error::UnknownTerm(term.to_string()));
    }
    Ok(DeltaEsRow {
        term: term.to_string(),
        granularity: Granularity::Subword,
        delta_es: (!diffs.is_empty()).then(|| diffs.iter().sum::<f64>() / diffs.len() as f64),
        partial: false,
        n_pairs_used: diffs.len(),
        n_pairs_skipped: skipped,
        idf: None,
    })
}

/// Word-level value from the rows of its constituent subwords.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordDeltaEs {
    pub value: Option<f64>,
    pub partial: bool,
}

/// Sums the defined subword values; undefined only if none is defined.
pub fn delta_es_word(subwords: &[&DeltaEsRow]) -> WordDeltaEs {
    let defined: Vec<f64> = subwords.iter().filter_map(|r| r.delta_es).collect();
    WordDeltaEs {
        value: (!defined.is_empty()).then(|| defined.iter().sum()),
        partial: !defined.is_empty() && defined.len() < subwords.len(),
    }
}

/// Subword rows for every query subword, followed by word rows for every
/// query word, each sorted by term.
pub fn delta_es_table(
    queries: &[QueryMatches<'_>],
    stats: Option<&CorpusStats>,
) -> Vec<DeltaEsRow> {
    let mut subword_terms = BTreeSet::new();
    // word -> its subword pieces, taken from the first occurrence
    let mut words: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for qm in queries {
        let tokens = qm.query.tokens();
        for t in tokens {
            subword_terms.insert(t.text.as_str());
        }
        for span in qm.query.word_spans() {
            let pieces = &tokens[span];
            words
                .entry(word_text(pieces))
                .or_insert_with(|| pieces.iter().map(|t| t.text.clone()).collect());
        }
    }

    let mut subword_rows: BTreeMap<&str, DeltaEsRow> = BTreeMap::new();
    for term in subword_terms {
        let mut row = delta_es_subword(term, queries).expect("term taken from the queries");
        row.idf = stats.and_then(|s| s.idf(term, Granularity::Subword));
        subword_rows.insert(term, row);
    }

    let word_rows: Vec<DeltaEsRow> = words
        .into_iter()
        .map(|(word, pieces)| {
            let parts: Vec<&DeltaEsRow> =
                pieces.iter().map(|p| &subword_rows[p.as_str()]).collect();
            let value = delta_es_word(&parts);
            DeltaEsRow {
                idf: stats.and_then(|s| s.idf(&word, Granularity::Word)),
                term: word,
                granularity: Granularity::Word,
                delta_es: value.value,
                partial: value.partial,
                n_pairs_used: parts.iter().map(|r| r.n_pairs_used).sum(),
                n_pairs_skipped: parts.iter().map(|r| r.n_pairs_skipped).sum(),
            }
        })
        .collect();

    subword_rows.into_values().chain(word_rows).collect()
}
