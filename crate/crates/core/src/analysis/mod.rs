//! Diagnostics over a scored query set: masking-based term importance,
//! the exact-vs-soft match statistic (Δ_ES), match overlap statistics, and
//! spectral concentration of contextual embeddings.

mod delta_es;
mod importance;
mod match_stats;
mod spectral;

pub use delta_es::{
    delta_es_subword, delta_es_table, delta_es_word, pair_difference, DeltaEsRow, WordDeltaEs,
};
pub use importance::{
    aggregate_importance, query_importance, term_importance, TermImportanceRow, WordImportance,
};
pub use match_stats::{match_stats, MatchStatsRow, TOP_MATCHES};
pub use spectral::{
    gather_occurrences, spectral_ratio, spectral_table, SpectralRow, DEFAULT_SPECTRAL_CAP,
};

use crate::error::{Error, Result};
use crate::model::{CandidateSet, EmbeddingSequence, EmbeddingStore};
use crate::scoring::{candidate_matches, Match};

/// A query scored against its whole candidate set, with the best match of
/// every query token in every candidate.
#[derive(Debug, Clone)]
pub struct QueryMatches<'a> {
    pub query: &'a EmbeddingSequence,
    pub candidates: &'a CandidateSet,
    pub docs: Vec<(&'a EmbeddingSequence, Vec<Match>)>,
}

impl<'a> QueryMatches<'a> {
    pub fn compute(
        query: &'a EmbeddingSequence,
        docs: &'a EmbeddingStore,
        candidates: &'a CandidateSet,
    ) -> Result<Self> {
        Ok(Self {
            query,
            candidates,
            docs: candidate_matches(query, docs, candidates)?,
        })
    }

    /// Scores every candidate set whose query exists in `queries`.
    pub fn compute_all(
        queries: &'a EmbeddingStore,
        docs: &'a EmbeddingStore,
        candidates: &'a [CandidateSet],
    ) -> Result<Vec<Self>> {
        use rayon::prelude::*;
        candidates
            .par_iter()
            .map(|c| {
                let q = queries
                    .get(&c.query_id)
                    .ok_or_else(|| Error::UnknownQuery(c.query_id.clone()))?;
                Self::compute(q, docs, c)
            })
            .collect()
    }

    /// Text of the document token matched by query position `i` in the
    /// `k`-th candidate.
    pub fn matched_text(&self, k: usize, i: usize) -> &'a str {
        let (doc, m) = &self.docs[k];
        &doc.tokens()[m[i].j_star].text
    }
}
