//! Brute-force oracles written independently of the library code paths.
#![allow(dead_code)]

use lilens::model::{CandidateSet, EmbeddingSequence, EmbeddingStore, Token};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A sequence of 1..=`max_tokens` random rows over a small token alphabet.
pub fn random_sequence(
    rng: &mut ChaCha8Rng,
    id: &str,
    max_tokens: usize,
    dim: usize,
    alphabet: &[&str],
) -> EmbeddingSequence {
    let n_tokens = rng.random_range(1..=max_tokens);
    let mut word = 0u32;
    let tokens = (0..n_tokens)
        .map(|i| {
            if i > 0 && rng.random_bool(0.7) {
                word += 1;
            }
            Token::new(alphabet[rng.random_range(0..alphabet.len())], word)
        })
        .collect();
    let data = (0..n_tokens * dim)
        .map(|_| rng.random_range(-1.0f32..1.0))
        .collect();
    EmbeddingSequence::new(id, tokens, dim, data).unwrap()
}

/// `(max cosine, first argmax)` per query token, by a plain double loop.
pub fn naive_maxsim(query: &EmbeddingSequence, doc: &EmbeddingSequence) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for i in 0..query.len() {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for j in 0..doc.len() {
            let mut c = 0.0f64;
            for k in 0..query.dim() {
                c += query.row(i)[k] as f64 * doc.row(j)[k] as f64;
            }
            if c > best {
                best = c;
                arg = j;
            }
        }
        out.push((best, arg));
    }
    out
}

/// τ_AP straight from its definition, O(N²).
pub fn literal_tau_ap<T: PartialEq>(reference: &[T], candidate: &[T]) -> f64 {
    let n = candidate.len();
    let ref_rank = |x: &T| reference.iter().position(|r| r == x).unwrap();
    let mut sum = 0.0;
    for i in 1..n {
        let here = ref_rank(&candidate[i]);
        let c = (0..i).filter(|&k| ref_rank(&candidate[k]) < here).count();
        sum += c as f64 / i as f64;
    }
    2.0 * sum / (n - 1) as f64 - 1.0
}

/// Δ_ES of subword `t`: per (query, position) pair, exact-side mean minus
/// soft-side mean of C*, skipping pairs with an empty side; then the mean.
/// Returns `(value, used, skipped)`.
pub fn literal_delta_es(
    t: &str,
    queries: &EmbeddingStore,
    docs: &EmbeddingStore,
    candidates: &[CandidateSet],
) -> (Option<f64>, usize, usize) {
    let mut inner = Vec::new();
    let mut skipped = 0;
    for cand in candidates {
        let q = queries.get(&cand.query_id).unwrap();
        for i in 0..q.len() {
            if q.tokens()[i].text != t {
                continue;
            }
            let mut exact = Vec::new();
            let mut soft = Vec::new();
            for d in &cand.doc_ids {
                let doc = docs.get(d).unwrap();
                let (c, j) = naive_maxsim(q, doc)[i];
                if doc.tokens()[j].text == t {
                    exact.push(c);
                } else {
                    soft.push(c);
                }
            }
            if exact.is_empty() || soft.is_empty() {
                skipped += 1;
                continue;
            }
            let me = exact.iter().sum::<f64>() / exact.len() as f64;
            let ms = soft.iter().sum::<f64>() / soft.len() as f64;
            inner.push(me - ms);
        }
    }
    let used = inner.len();
    let value = if used == 0 {
        None
    } else {
        Some(inner.iter().sum::<f64>() / used as f64)
    };
    (value, used, skipped)
}
