mod common;

use std::collections::BTreeSet;

use lilens::analysis::{spectral_ratio, term_importance};
use lilens::correlation::{tau_ap, tau_ap_with_mode, RankPair, TauApMode};
use lilens::model::{CandidateSet, EmbeddingSequence, EmbeddingStore};
use lilens::scoring::{best_matches, masked_score, rerank, score};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{literal_tau_ap, naive_maxsim, random_sequence};

const ALPHABET: [&str; 4] = ["a", "b", "##c", "d"];

/// Random orthogonal matrix from Gram–Schmidt on Gaussian-ish columns.
fn random_rotation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
    }
    basis
}

fn rotate(seq: &EmbeddingSequence, rot: &[Vec<f64>]) -> EmbeddingSequence {
    let data = seq
        .rows()
        .flat_map(|row| {
            rot.iter()
                .map(|r| {
                    r.iter()
                        .zip(row)
                        .map(|(a, &b)| a * f64::from(b))
                        .sum::<f64>() as f32
                })
                .collect::<Vec<_>>()
        })
        .collect();
    EmbeddingSequence::new(seq.id(), seq.tokens().to_vec(), seq.dim(), data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_are_rotation_invariant(seed in any::<u64>(), dim in 2usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_sequence(&mut rng, "q", 8, dim, &ALPHABET);
        let d = random_sequence(&mut rng, "d", 20, dim, &ALPHABET);
        let rot = random_rotation(&mut rng, dim);
        let before = score(&q, &d).unwrap();
        let after = score(&rotate(&q, &rot), &rotate(&d, &rot)).unwrap();
        prop_assert!((before - after).abs() < 1e-5, "{} vs {}", before, after);
    }

    #[test]
    fn score_is_bounded_by_query_length(seed in any::<u64>(), dim in 2usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_sequence(&mut rng, "q", 8, dim, &ALPHABET);
        let d = random_sequence(&mut rng, "d", 20, dim, &ALPHABET);
        let s = score(&q, &d).unwrap();
        prop_assert!(s.abs() <= q.len() as f64 + 1e-6);
        // a document containing the query itself scores (nearly) |q|
        let own = score(&q, &q).unwrap();
        prop_assert!((own - q.len() as f64).abs() < 1e-5);
        prop_assert!(s <= own + 1e-6);
    }

    #[test]
    fn best_matches_agree_with_double_loop(seed in any::<u64>(), dim in 1usize..=32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_sequence(&mut rng, "q", 8, dim, &ALPHABET);
        let d = random_sequence(&mut rng, "d", 20, dim, &ALPHABET);
        for (m, (c, j)) in best_matches(&q, &d).unwrap().iter().zip(naive_maxsim(&q, &d)) {
            prop_assert!((m.c_max - c).abs() < 1e-9);
            prop_assert_eq!(m.j_star, j);
        }
    }

    #[test]
    fn masked_score_drops_only_masked_summands(seed in any::<u64>(), mask in prop::collection::btree_set(0usize..8, 0..8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_sequence(&mut rng, "q", 8, 8, &ALPHABET);
        let d = random_sequence(&mut rng, "d", 20, 8, &ALPHABET);
        let mask: BTreeSet<usize> = mask.into_iter().filter(|&p| p < q.len()).collect();
        let oracle: f64 = naive_maxsim(&q, &d)
            .iter()
            .enumerate()
            .filter(|(i, _)| !mask.contains(i))
            .map(|(_, (c, _))| c)
            .sum();
        prop_assert!((masked_score(&q, &d, &mask).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn ranking_ignores_candidate_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_sequence(&mut rng, "q", 6, 8, &ALPHABET);
        let docs: Vec<EmbeddingSequence> =
            (0..15).map(|k| random_sequence(&mut rng, &format!("d{k}"), 12, 8, &ALPHABET)).collect();
        let mut ids: Vec<String> = docs.iter().map(|d| d.id().to_string()).collect();
        let store = EmbeddingStore::new(8, docs).unwrap();
        let forward = rerank(&q, &store, &CandidateSet::new("q", ids.clone()).unwrap(), &BTreeSet::new()).unwrap();
        ids.reverse();
        let backward = rerank(&q, &store, &CandidateSet::new("q", ids).unwrap(), &BTreeSet::new()).unwrap();
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn term_importance_is_a_valid_correlation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_sequence(&mut rng, "q", 6, 8, &ALPHABET);
        let docs: Vec<EmbeddingSequence> =
            (0..10).map(|k| random_sequence(&mut rng, &format!("d{k}"), 12, 8, &ALPHABET)).collect();
        let ids: Vec<String> = docs.iter().map(|d| d.id().to_string()).collect();
        let store = EmbeddingStore::new(8, docs).unwrap();
        let cands = CandidateSet::new("q", ids).unwrap();
        let original = rerank(&q, &store, &cands, &BTreeSet::new()).unwrap();
        let word = q.tokens()[0].word_index;
        let (masked, tau) = term_importance(&q, &store, &cands, word, TauApMode::Asymmetric).unwrap();
        let reference: Vec<&str> = original.doc_ids().collect();
        let candidate: Vec<&str> = masked.doc_ids().collect();
        prop_assert!((-1.0..=1.0).contains(&tau));
        prop_assert!((tau - literal_tau_ap(&reference, &candidate)).abs() < 1e-12);
    }

    #[test]
    fn tau_ap_matches_literal_definition(perm in (2usize..=60).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
        let reference: Vec<usize> = (0..perm.len()).collect();
        let pair = RankPair::new(&reference, &perm).unwrap();
        prop_assert!((tau_ap(&pair) - literal_tau_ap(&reference, &perm)).abs() < 1e-12);
        let sym = tau_ap_with_mode(&pair, TauApMode::Symmetric);
        let both = 0.5 * (literal_tau_ap(&reference, &perm) + literal_tau_ap(&perm, &reference));
        prop_assert!((sym - both).abs() < 1e-12);
    }

    #[test]
    fn spectral_ratio_is_bounded(seed in any::<u64>(), m in 1usize..60, dim in 1usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_sequence(&mut rng, "s", m.max(1), dim, &ALPHABET);
        let rows: Vec<&[f32]> = seq.rows().collect();
        let row = spectral_ratio("t", &rows).unwrap();
        let k = rows.len().min(dim) as f64;
        prop_assert!(row.ratio <= 1.0 + 1e-12);
        prop_assert!(row.ratio >= 1.0 / k - 1e-9);
        prop_assert!(row.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}
