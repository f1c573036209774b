use std::collections::{BTreeMap, BTreeSet};

use super::QueryMatches;
use crate::correlation::{tau_ap_with_mode, RankPair, TauApMode};
use crate::error::{Error, Result};
use crate::model::{
    word_text, CandidateSet, CorpusStats, EmbeddingSequence, EmbeddingStore, Granularity,
};
use crate::scoring::{masked_sum, Ranking};

/// τ_AP between the full ranking and the ranking with one word masked.
#[derive(Debug, Clone, PartialEq)]
pub struct WordImportance {
    pub query_id: String,
    pub word_index: u32,
    pub word: String,
    pub tau_ap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermImportanceRow {
    pub word: String,
    pub per_query_tau_ap: Vec<(String, f64)>,
    pub mean_tau_ap: f64,
    pub idf_word: Option<f64>,
    pub n_queries: usize,
}

fn ranking_with_mask(qm: &QueryMatches<'_>, masked: &BTreeSet<usize>) -> Ranking {
    let scored = qm
        .docs
        .iter()
        .map(|(doc, m)| (doc.id().to_string(), masked_sum(m, masked)))
        .collect();
    Ranking::from_scores(qm.candidates.query_id.clone(), scored)
}

fn masked_importance(
    qm: &QueryMatches<'_>,
    original: &Ranking,
    word_index: u32,
    mode: TauApMode,
) -> Result<(Ranking, f64)> {
    let masked: BTreeSet<usize> = qm.query.word_positions(word_index).into_iter().collect();
    if masked.is_empty() {
        return Err(Error::UnknownWord(word_index as usize));
    }
    let ranking = ranking_with_mask(qm, &masked);
    let reference: Vec<&str> = original.doc_ids().collect();
    let candidate: Vec<&str> = ranking.doc_ids().collect();
    let tau = tau_ap_with_mode(&RankPair::new(&reference, &candidate)?, mode);
    Ok((ranking, tau))
}

/// Masks every subword of one query word, re-ranks the candidates, and
/// returns the masked ranking with its τ_AP against the unmasked one.
pub fn term_importance(
    query: &EmbeddingSequence,
    docs: &EmbeddingStore,
    candidates: &CandidateSet,
    word_index: u32,
    mode: TauApMode,
) -> Result<(Ranking, f64)> {
    if candidates.len() < 2 {
        return Err(Error::TooFewItems(candidates.len()));
    }
    let qm = QueryMatches::compute(query, docs, candidates)?;
    let original = ranking_with_mask(&qm, &BTreeSet::new());
    masked_importance(&qm, &original, word_index, mode)
}

/// Importance of every word of a query, in word order.
pub fn query_importance(qm: &QueryMatches<'_>, mode: TauApMode) -> Result<Vec<WordImportance>> {
    if qm.docs.len() < 2 {
        return Err(Error::TooFewItems(qm.docs.len()));
    }
    let original = ranking_with_mask(qm, &BTreeSet::new());
    let tokens = qm.query.tokens();
    qm.query
        .word_spans()
        .into_iter()
        .map(|span| {
            let word_index = tokens[span.start].word_index;
            let (_, tau_ap) = masked_importance(qm, &original, word_index, mode)?;
            Ok(WordImportance {
                query_id: qm.candidates.query_id.clone(),
                word_index,
                word: word_text(&tokens[span]),
                tau_ap,
            })
        })
        .collect()
}

/// Groups per-query values by word surface form, in lexicographic order.
pub fn aggregate_importance(
    results: &[WordImportance],
    stats: Option<&CorpusStats>,
) -> Vec<TermImportanceRow> {
    let mut groups: BTreeMap<&str, Vec<(String, f64)>> = BTreeMap::new();
    for r in results {
        groups
            .entry(&r.word)
            .or_default()
            .push((r.query_id.clone(), r.tau_ap));
    }
    groups
        .into_iter()
        .map(|(word, per_query)| {
            let mean = per_query.iter().map(|(_, t)| t).sum::<f64>() / per_query.len() as f64;
            TermImportanceRow {
                word: word.to_string(),
                mean_tau_ap: mean,
                idf_word: stats.and_then(|s| s.idf(word, Granularity::Word)),
                n_queries: per_query.len(),
                per_query_tau_ap: per_query,
            }
        })
        .collect()
}
