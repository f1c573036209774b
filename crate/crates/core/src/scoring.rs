//! MaxSim scoring with argmax tracing, masked scores, and re-ranking.
//!
//! ```text
//! s(q, d) = Σᵢ maxⱼ cos(qᵢ, dⱼ)
//! ```
//!
//! Rows are unit-normalized at load, so the cosine is a plain dot product.
//! Dot products and the outer sum are carried out in `f64` with a fixed
//! summation order, which makes every score independent of scheduling.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CandidateSet, EmbeddingSequence, EmbeddingStore};

#[inline]
pub(crate) fn dot(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += f64::from(x[k]) * f64::from(y[k]);
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += f64::from(*x) * f64::from(*y);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Cosine between a unit query vector and every row of `doc`.
pub fn cosine_row(q_tok: &[f32], doc: &EmbeddingSequence) -> Result<Vec<f64>> {
    if q_tok.len() != doc.dim() {
        return Err(Error::DimensionMismatch {
            expected: doc.dim(),
            got: q_tok.len(),
        });
    }
    Ok(doc.rows().map(|row| dot(q_tok, row)).collect())
}

/// Best match of one query token.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub c_max: f64,
    pub j_star: usize,
}

fn check_dims(query: &EmbeddingSequence, doc: &EmbeddingSequence) -> Result<()> {
    if query.dim() != doc.dim() {
        return Err(Error::DimensionMismatch {
            expected: query.dim(),
            got: doc.dim(),
        });
    }
    Ok(())
}

/// For every query token, the maximum cosine and the first document index
/// attaining it.
pub fn best_matches(query: &EmbeddingSequence, doc: &EmbeddingSequence) -> Result<Vec<Match>> {
    check_dims(query, doc)?;
    let mut best = vec![
        Match {
            c_max: f64::NEG_INFINITY,
            j_star: 0,
        };
        query.len()
    ];
    for (j, d_row) in doc.rows().enumerate() {
        for (m, q_row) in best.iter_mut().zip(query.rows()) {
            let c = dot(q_row, d_row);
            // strict: the earliest index keeps ties
            if c > m.c_max {
                *m = Match {
                    c_max: c,
                    j_star: j,
                };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub c_max: f64,
    pub j_star: usize,
    pub matched_token_text: String,
}

/// Per query token: `C*ᵢ`, the matched document token index, and its text.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgmaxTrace {
    pub entries: Vec<TraceEntry>,
}

impl ArgmaxTrace {
    pub fn score(&self) -> f64 {
        self.entries.iter().map(|e| e.c_max).sum()
    }
}

pub fn max_sim(query: &EmbeddingSequence, doc: &EmbeddingSequence) -> Result<ArgmaxTrace> {
    let entries = best_matches(query, doc)?
        .into_iter()
        .map(|m| TraceEntry {
            c_max: m.c_max,
            j_star: m.j_star,
            matched_token_text: doc.tokens()[m.j_star].text.clone(),
        })
        .collect();
    Ok(ArgmaxTrace { entries })
}

pub fn score(query: &EmbeddingSequence, doc: &EmbeddingSequence) -> Result<f64> {
    Ok(best_matches(query, doc)?.iter().map(|m| m.c_max).sum())
}

/// Sum of `c_max` over the positions not in `masked`, in position order.
pub fn masked_sum(matches: &[Match], masked: &BTreeSet<usize>) -> f64 {
    matches
        .iter()
        .enumerate()
        .filter(|(i, _)| !masked.contains(i))
        .map(|(_, m)| m.c_max)
        .sum()
}

fn check_mask(masked: &BTreeSet<usize>, n_tokens: usize) -> Result<()> {
    match masked.last() {
        Some(&p) if p >= n_tokens => Err(Error::PositionOutOfRange {
            position: p,
            n_tokens,
        }),
        _ => Ok(()),
    }
}

/// Relevance score with the summands of the masked query positions removed.
/// The remaining argmaxes are not recomputed.
pub fn masked_score(
    query: &EmbeddingSequence,
    doc: &EmbeddingSequence,
    masked: &BTreeSet<usize>,
) -> Result<f64> {
    check_mask(masked, query.len())?;
    Ok(masked_sum(&best_matches(query, doc)?, masked))
}

/// Candidates of one query ordered by score, descending; ties by doc id.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub query_id: String,
    pub entries: Vec<(String, f64)>,
}

impl Ranking {
    /// Sorts `(doc_id, score)` pairs into ranking order.
    pub fn from_scores(query_id: impl Into<String>, mut entries: Vec<(String, f64)>) -> Self {
        entries.sort_by(|a, b| rank_order((&a.0, a.1), (&b.0, b.1)));
        Self {
            query_id: query_id.into(),
            entries,
        }
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(d, _)| d.as_str())
    }
}

/// Score descending, then doc id ascending.
pub(crate) fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

/// Resolves and scores the candidates of a query, returning the best
/// matches per document in candidate order. Parallel over documents.
pub fn candidate_matches<'s>(
    query: &EmbeddingSequence,
    docs: &'s EmbeddingStore,
    candidates: &CandidateSet,
) -> Result<Vec<(&'s EmbeddingSequence, Vec<Match>)>> {
    let resolved = candidates.resolve(docs)?;
    resolved
        .par_iter()
        .map(|&i| {
            let doc = docs.by_index(i);
            best_matches(query, doc).map(|m| (doc, m))
        })
        .collect()
}

pub fn rerank(
    query: &EmbeddingSequence,
    docs: &EmbeddingStore,
    candidates: &CandidateSet,
    masked: &BTreeSet<usize>,
) -> Result<Ranking> {
    check_mask(masked, query.len())?;
    let matches = candidate_matches(query, docs, candidates)?;
    let scored = matches
        .iter()
        .map(|(doc, m)| (doc.id().to_string(), masked_sum(m, masked)))
        .collect();
    Ok(Ranking::from_scores(candidates.query_id.clone(), scored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Token;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(id: &str, dim: usize, rows: &[&[f32]]) -> EmbeddingSequence {
        let tokens = (0..rows.len())
            .map(|i| Token::new(format!("t{i}"), i as u32))
            .collect();
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingSequence::new(id, tokens, dim, data).unwrap()
    }

    fn random_seq(rng: &mut ChaCha8Rng, id: &str, n: usize, dim: usize) -> EmbeddingSequence {
        let tokens = (0..n)
            .map(|i| Token::new(format!("t{}", rng.random_range(0..5)), i as u32))
            .collect();
        let data = (0..n * dim)
            .map(|_| rng.random_range(-1.0f32..1.0))
            .collect();
        EmbeddingSequence::new(id, tokens, dim, data).unwrap()
    }

    fn oracle(query: &EmbeddingSequence, doc: &EmbeddingSequence) -> Vec<(f64, usize)> {
        (0..query.len())
            .map(|i| {
                let mut best = (f64::NEG_INFINITY, 0);
                for j in 0..doc.len() {
                    let mut c = 0.0;
                    for k in 0..query.dim() {
                        c += f64::from(query.row(i)[k]) * f64::from(doc.row(j)[k]);
                    }
                    if c > best.0 {
                        best = (c, j);
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn cosine_row_analytic() {
        let doc = seq("d", 2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(cosine_row(&[1.0, 0.0], &doc).unwrap(), vec![1.0, 0.0]);
        let diag = seq("d", 2, &[&[3.0, 3.0]]);
        let c = cosine_row(&[1.0, 0.0], &diag).unwrap()[0];
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        assert!(matches!(
            cosine_row(&[1.0, 0.0, 0.0], &doc),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cosine_row_matches_scalar_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let doc = random_seq(&mut rng, "d", 7, 4);
            let q = random_seq(&mut rng, "q", 1, 4);
            let got = cosine_row(q.row(0), &doc).unwrap();
            for (j, c) in got.iter().enumerate() {
                let mut expect = 0.0f64;
                for k in 0..4 {
                    expect += f64::from(q.row(0)[k]) * f64::from(doc.row(j)[k]);
                }
                assert!((c - expect).abs() < 1e-6);
                assert!(c.abs() <= 1.0 + 1e-6);
            }
        }
    }

    #[test]
    fn max_sim_analytic() {
        let q = seq("q", 2, &[&[1.0, 0.0]]);
        let d = seq("d", 2, &[&[0.0, 1.0], &[0.6, 0.8]]);
        let t = max_sim(&q, &d).unwrap();
        assert!((t.entries[0].c_max - 0.6).abs() < 1e-7);
        assert_eq!(t.entries[0].j_star, 1);
        assert_eq!(t.entries[0].matched_token_text, "t1");
    }

    #[test]
    fn exact_copy_wins_with_first_index() {
        let q = seq("q", 3, &[&[0.2, 0.5, -0.1]]);
        let d = seq(
            "d",
            3,
            &[&[1.0, 0.0, 0.0], &[0.2, 0.5, -0.1], &[0.2, 0.5, -0.1]],
        );
        let t = max_sim(&q, &d).unwrap();
        assert!((t.entries[0].c_max - 1.0).abs() < 1e-6);
        assert_eq!(t.entries[0].j_star, 1);
    }

    #[test]
    fn score_analytic() {
        let rows: &[&[f32]] = &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]];
        let q = seq("q", 3, rows);
        assert!((score(&q, &q).unwrap() - 3.0).abs() < 1e-12);

        let q = seq("q", 2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let d = seq("d", 2, &[&[1.0, 0.0]]);
        assert!((score(&q, &d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_instances_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = random_seq(&mut rng, "q", 8, 4);
            let d = random_seq(&mut rng, "d", 20, 4);
            let trace = max_sim(&q, &d).unwrap();
            let expect = oracle(&q, &d);
            for (e, (c, j)) in trace.entries.iter().zip(&expect) {
                assert!((e.c_max - c).abs() < 1e-12);
                assert_eq!(e.j_star, *j);
            }
            let s: f64 = expect.iter().map(|x| x.0).sum();
            assert!((score(&q, &d).unwrap() - s).abs() < 1e-5 * 8.0);
            assert_eq!(score(&q, &d).unwrap(), trace.score());
        }
    }

    #[test]
    fn masking() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_seq(&mut rng, "q", 6, 4);
        let d = random_seq(&mut rng, "d", 9, 4);
        let full = score(&q, &d).unwrap();
        assert_eq!(masked_score(&q, &d, &BTreeSet::new()).unwrap(), full);
        let all: BTreeSet<usize> = (0..6).collect();
        assert_eq!(masked_score(&q, &d, &all).unwrap(), 0.0);
        assert!(matches!(
            masked_score(&q, &d, &[6].into_iter().collect()),
            Err(Error::PositionOutOfRange {
                position: 6,
                n_tokens: 6
            })
        ));
        let expect = oracle(&q, &d);
        for _ in 0..20 {
            let mask: BTreeSet<usize> = (0..6).filter(|_| rng.random_bool(0.4)).collect();
            let dropped: f64 = mask.iter().map(|&i| expect[i].0).sum();
            let got = masked_score(&q, &d, &mask).unwrap();
            assert!((got - (full - dropped)).abs() < 1e-9);
        }
    }

    fn store(seqs: Vec<EmbeddingSequence>) -> EmbeddingStore {
        let dim = seqs[0].dim();
        EmbeddingStore::new(dim, seqs).unwrap()
    }

    #[test]
    fn rerank_orders_by_score_then_id() {
        let q = seq("q", 2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let docs = store(vec![
            seq("lo", 2, &[&[1.0, 0.0]]),
            seq("hi", 2, &[&[1.0, 0.0], &[0.0, 1.0]]),
        ]);
        let cands = CandidateSet::new("q", vec!["lo".into(), "hi".into()]).unwrap();
        let r = rerank(&q, &docs, &cands, &BTreeSet::new()).unwrap();
        assert_eq!(r.doc_ids().collect::<Vec<_>>(), vec!["hi", "lo"]);
        assert!((r.entries[0].1 - 2.0).abs() < 1e-12);

        let docs = store(vec![
            seq("b", 2, &[&[1.0, 0.0]]),
            seq("a", 2, &[&[1.0, 0.0]]),
        ]);
        let cands = CandidateSet::new("q", vec!["b".into(), "a".into()]).unwrap();
        let r = rerank(&q, &docs, &cands, &BTreeSet::new()).unwrap();
        assert_eq!(r.doc_ids().collect::<Vec<_>>(), vec!["a", "b"]);
    }

    #[test]
    fn rerank_unknown_doc() {
        let q = seq("q", 2, &[&[1.0, 0.0]]);
        let docs = store(vec![seq("a", 2, &[&[1.0, 0.0]])]);
        let cands = CandidateSet::new("q", vec!["zz".into()]).unwrap();
        assert!(matches!(
            rerank(&q, &docs, &cands, &BTreeSet::new()),
            Err(Error::UnknownDocument(_))
        ));
    }

    #[test]
    fn rerank_matches_full_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let q = random_seq(&mut rng, "q", 5, 4);
        let seqs: Vec<_> = (0..50)
            .map(|i| {
                let n = rng.random_range(1..15);
                random_seq(&mut rng, &format!("d{i:02}"), n, 4)
            })
            .collect();
        let mut expect: Vec<(String, f64)> = seqs
            .iter()
            .map(|d| (d.id().to_string(), oracle(&q, d).iter().map(|x| x.0).sum()))
            .collect();
        expect.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let cands =
            CandidateSet::new("q", seqs.iter().map(|d| d.id().to_string()).collect()).unwrap();
        let docs = store(seqs);
        let got = rerank(&q, &docs, &cands, &BTreeSet::new()).unwrap();
        let got_ids: Vec<_> = got.doc_ids().collect();
        let expect_ids: Vec<_> = expect.iter().map(|e| e.0.as_str()).collect();
        assert_eq!(got_ids, expect_ids);
    }
}
