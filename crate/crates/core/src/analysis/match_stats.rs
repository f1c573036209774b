use std::collections::{BTreeMap, BTreeSet};

use super::QueryMatches;

/// Number of most frequent matched document tokens reported per position.
pub const TOP_MATCHES: usize = 10;

/// What one query position matches across the candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchStatsRow {
    pub query_id: String,
    pub position: usize,
    pub token: String,
    /// Fraction of candidates whose argmax token is the same subword.
    pub exact_match_freq: f64,
    /// Fraction whose argmax token is a subword of another query word (and
    /// not the position's own subword).
    pub other_query_term_freq: f64,
    /// Most frequent matched tokens with their frequency; ties by text.
    pub top_matched_tokens: Vec<(String, f64)>,
    /// Denominator of every frequency: |S_q|.
    pub n_docs: usize,
}

pub fn match_stats(qm: &QueryMatches<'_>) -> Vec<MatchStatsRow> {
    let tokens = qm.query.tokens();
    let n_docs = qm.docs.len();
    let denom = n_docs.max(1) as f64;
    (0..tokens.len())
        .map(|i| {
            let own = &tokens[i];
            let others: BTreeSet<&str> = tokens
                .iter()
                .filter(|t| t.word_index != own.word_index)
                .map(|t| t.text.as_str())
                .collect();
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            let (mut exact, mut other) = (0usize, 0usize);
            for k in 0..n_docs {
                let text = qm.matched_text(k, i);
                *counts.entry(text).or_default() += 1;
                if text == own.text {
                    exact += 1;
                } else if others.contains(text) {
                    other += 1;
                }
            }
            let mut top: Vec<(&str, usize)> = counts.into_iter().collect();
            // BTreeMap order is lexicographic, stable sort keeps it on ties
            top.sort_by_key(|&(_, n)| std::cmp::Reverse(n));
            top.truncate(TOP_MATCHES);
            MatchStatsRow {
                query_id: qm.candidates.query_id.clone(),
                position: i,
                token: own.text.clone(),
                exact_match_freq: exact as f64 / denom,
                other_query_term_freq: other as f64 / denom,
                top_matched_tokens: top
                    .into_iter()
                    .map(|(t, c)| (t.to_string(), c as f64 / denom))
                    .collect(),
                n_docs,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CandidateSet, EmbeddingSequence, EmbeddingStore, Token};

    fn seq(id: &str, toks: &[&str], rows: &[[f32; 3]]) -> EmbeddingSequence {
        let tokens = toks
            .iter()
            .enumerate()
            .map(|(w, t)| Token::new(*t, w as u32))
            .collect();
        EmbeddingSequence::new(id, tokens, 3, rows.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn stopword_matching_other_query_term() {
        // "of" sits close to "shingles" and far from any other direction
        let e_the = [1.0, 0.0, 0.0];
        let e_shingles = [0.0, 1.0, 0.0];
        let e_of = [0.0, 0.9, 0.1];
        let e_other = [0.0, 0.0, 1.0];
        let q = seq(
            "q",
            &["the", "symptoms", "of", "shingles"],
            &[e_the, e_other, e_of, e_shingles],
        );
        let docs = EmbeddingStore::new(
            3,
            vec![
                seq(
                    "d1",
                    &["the", "shingles", "rash"],
                    &[e_the, e_shingles, e_other],
                ),
                seq("d2", &["shingles", "the"], &[e_shingles, e_the]),
                seq("d3", &["shingles", "virus"], &[e_shingles, e_other]),
            ],
        )
        .unwrap();
        let cands = CandidateSet::new("q", vec!["d1".into(), "d2".into(), "d3".into()]).unwrap();
        let qm = QueryMatches::compute(&q, &docs, &cands).unwrap();
        let rows = match_stats(&qm);
        assert_eq!(rows.len(), 4);

        let of = &rows[2];
        assert_eq!(of.token, "of");
        assert_eq!(of.exact_match_freq, 0.0);
        assert_eq!(of.other_query_term_freq, 1.0);
        assert_eq!(of.top_matched_tokens, vec![("shingles".to_string(), 1.0)]);
        assert_eq!(of.n_docs, 3);

        let shingles = &rows[3];
        assert_eq!(shingles.exact_match_freq, 1.0);
        assert_eq!(shingles.other_query_term_freq, 0.0);

        let the = &rows[0];
        // d3 has no "the": it matches the first token, "shingles"
        assert!((the.exact_match_freq - 2.0 / 3.0).abs() < 1e-15);
        assert!((the.other_query_term_freq - 1.0 / 3.0).abs() < 1e-15);
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.exact_match_freq));
            assert!((0.0..=1.0).contains(&r.other_query_term_freq));
            assert!(r.top_matched_tokens.len() <= TOP_MATCHES);
        }
    }
}
