//! Synthetic corpora with a known relation between term rarity and how the
//! contextual embeddings of a term behave.
//!
//! Every subword `s` owns a random base direction `u_s`. An occurrence of
//! `s` in a sequence with context vector `c` is embedded as
//!
//! ```text
//! normalize(w_s · u_s + (1 − w_s) · c + noise)
//! ```
//!
//! where the concentration `w_s` grows linearly with the subword's IDF in
//! the generated document collection. Rare subwords therefore keep a fixed
//! direction (exact matches, rank-1 occurrence pools) while frequent ones
//! follow their context. Word frequencies follow a Zipf law; some words are
//! split into a stem and a shared suffix subword. Candidate sets come from
//! an IDF-weighted word-overlap ranker standing in for a first stage.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{
    compute_corpus_stats, word_spans, word_text, write_embeddings, write_stats, CandidateSet,
    CorpusStats, EmbeddingSequence, EmbeddingStore, Granularity, Token,
};
use crate::scoring::Ranking;

const SUFFIXES: [&str; 4] = ["##s", "##ed", "##ing", "##er"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub dim: usize,
    pub vocab_size: usize,
    pub n_docs: usize,
    pub doc_words: (usize, usize),
    pub n_queries: usize,
    pub query_words: (usize, usize),
    /// Number of most frequent words treated as stopwords in queries.
    pub n_stopwords: usize,
    pub candidates_per_query: usize,
    /// Fraction of non-stopword vocabulary split into stem + suffix.
    pub split_fraction: f64,
    pub zipf_exponent: f64,
    /// Range the concentration `w_s` is mapped onto, from IDF 0 to ln N.
    pub concentration: (f64, f64),
    pub noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dim: 32,
            vocab_size: 400,
            n_docs: 1500,
            doc_words: (30, 80),
            n_queries: 60,
            query_words: (3, 6),
            n_stopwords: 15,
            candidates_per_query: 100,
            split_fraction: 0.2,
            zipf_exponent: 1.0,
            concentration: (0.15, 0.95),
            noise: 0.3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub queries: EmbeddingStore,
    pub docs: EmbeddingStore,
    pub candidates: Vec<CandidateSet>,
    pub stats: CorpusStats,
}

/// File locations written by [`SynthCorpus::write_to_dir`].
#[derive(Debug, Clone)]
pub struct SynthPaths {
    pub queries: PathBuf,
    pub docs: PathBuf,
    pub run: PathBuf,
    pub stats: PathBuf,
}

fn unit_gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

struct Vocabulary {
    /// Subword pieces of each word, by frequency rank.
    words: Vec<Vec<String>>,
}

impl Vocabulary {
    fn new(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Self {
        let words = (0..cfg.vocab_size)
            .map(|r| {
                let stem = format!("w{r}");
                if r >= cfg.n_stopwords && rng.random_bool(cfg.split_fraction) {
                    let suffix = SUFFIXES[rng.random_range(0..SUFFIXES.len())];
                    vec![stem, suffix.to_string()]
                } else {
                    vec![stem]
                }
            })
            .collect();
        Self { words }
    }

    fn tokens(&self, word_ids: &[usize]) -> Vec<Token> {
        word_ids
            .iter()
            .enumerate()
            .flat_map(|(w, &id)| {
                self.words[id]
                    .iter()
                    .map(move |piece| Token::new(piece.clone(), w as u32))
            })
            .collect()
    }
}

struct Embedder<'a> {
    cfg: &'a SynthConfig,
    stats: &'a CorpusStats,
    bases: std::collections::BTreeMap<String, Vec<f64>>,
}

impl Embedder<'_> {
    fn concentration(&self, subword: &str) -> f64 {
        let max_idf = (self.stats.n_docs as f64).ln().max(1e-9);
        let idf = self
            .stats
            .idf(subword, Granularity::Subword)
            .unwrap_or(max_idf);
        let (lo, hi) = self.cfg.concentration;
        lo + (hi - lo) * (idf / max_idf).clamp(0.0, 1.0)
    }

    fn embed(
        &self,
        id: String,
        tokens: Vec<Token>,
        rng: &mut ChaCha8Rng,
    ) -> Result<EmbeddingSequence> {
        let dim = self.cfg.dim;
        let context = unit_gaussian(rng, dim);
        let sigma = self.cfg.noise / (dim as f64).sqrt();
        let mut data = Vec::with_capacity(tokens.len() * dim);
        for tok in &tokens {
            let w = self.concentration(&tok.text);
            let base = &self.bases[&tok.text];
            for k in 0..dim {
                let noise: f64 = rng.sample(StandardNormal);
                data.push((w * base[k] + (1.0 - w) * context[k] + sigma * noise) as f32);
            }
        }
        EmbeddingSequence::new(id, tokens, dim, data)
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.n_docs == 0 || cfg.vocab_size <= cfg.n_stopwords || cfg.dim == 0 {
        return Err(Error::Config(
            "synthetic corpus needs docs, a vocabulary beyond the stopwords, and dim > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = Vocabulary::new(cfg, &mut rng);

    let zipf: Vec<f64> = (0..cfg.vocab_size)
        .map(|r| 1.0 / ((r + 1) as f64).powf(cfg.zipf_exponent))
        .collect();
    let sampler = WeightedIndex::new(&zipf).map_err(|e| Error::Config(e.to_string()))?;

    let doc_words: Vec<Vec<usize>> = (0..cfg.n_docs)
        .map(|_| {
            let len = rng.random_range(cfg.doc_words.0..=cfg.doc_words.1);
            (0..len).map(|_| sampler.sample(&mut rng)).collect()
        })
        .collect();
    let doc_tokens: Vec<Vec<Token>> = doc_words.iter().map(|w| vocab.tokens(w)).collect();
    let stats = compute_corpus_stats(doc_tokens.iter().map(Vec::as_slice))?;

    let mut bases = std::collections::BTreeMap::new();
    for pieces in &vocab.words {
        for p in pieces {
            if !bases.contains_key(p) {
                bases.insert(p.clone(), unit_gaussian(&mut rng, cfg.dim));
            }
        }
    }
    let embedder = Embedder {
        cfg,
        stats: &stats,
        bases,
    };

    let docs = doc_tokens
        .into_iter()
        .enumerate()
        .map(|(i, toks)| embedder.embed(format!("d{i:05}"), toks, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    // content words must occur in the collection so they carry an IDF
    let content: Vec<usize> = (cfg.n_stopwords..cfg.vocab_size)
        .filter(|&id| stats.df_word.contains_key(&word_text(&vocab.tokens(&[id]))))
        .collect();
    let mut queries = Vec::with_capacity(cfg.n_queries);
    let mut query_words = Vec::with_capacity(cfg.n_queries);
    for q in 0..cfg.n_queries {
        let len = rng.random_range(cfg.query_words.0..=cfg.query_words.1);
        let n_stop = rng.random_range(1..=2.min(len - 1).max(1));
        let mut ids: Vec<usize> = (0..n_stop)
            .map(|_| rng.random_range(0..cfg.n_stopwords))
            .collect();
        let mut picked: Vec<usize> = content
            .choose_multiple(&mut rng, len - n_stop)
            .copied()
            .collect();
        ids.append(&mut picked);
        ids.shuffle(&mut rng);
        let toks = vocab.tokens(&ids);
        queries.push(embedder.embed(format!("q{q:03}"), toks, &mut rng)?);
        query_words.push(ids);
    }

    let candidates = first_stage(cfg, &vocab, &stats, &doc_words, &query_words, &docs)?;
    Ok(SynthCorpus {
        queries: EmbeddingStore::new(cfg.dim, queries)?,
        docs: EmbeddingStore::new(cfg.dim, docs)?,
        candidates,
        stats,
    })
}

/// Top documents by summed IDF of the distinct query words they contain.
fn first_stage(
    cfg: &SynthConfig,
    vocab: &Vocabulary,
    stats: &CorpusStats,
    doc_words: &[Vec<usize>],
    query_words: &[Vec<usize>],
    docs: &[EmbeddingSequence],
) -> Result<Vec<CandidateSet>> {
    let doc_sets: Vec<BTreeSet<usize>> = doc_words
        .iter()
        .map(|w| w.iter().copied().collect())
        .collect();
    query_words
        .iter()
        .enumerate()
        .map(|(q, ids)| {
            let weights: Vec<(usize, f64)> = ids
                .iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(|id| {
                    let idf = stats
                        .idf(&word_text(&vocab.tokens(&[id])), Granularity::Word)
                        .unwrap_or(0.0);
                    (id, idf)
                })
                .collect();
            let scored = doc_sets
                .iter()
                .zip(docs)
                .map(|(set, doc)| {
                    let s: f64 = weights
                        .iter()
                        .filter(|(id, _)| set.contains(id))
                        .map(|(_, w)| w)
                        .sum();
                    (doc.id().to_string(), s)
                })
                .collect();
            let mut ranking = Ranking::from_scores(format!("q{q:03}"), scored);
            ranking.entries.truncate(
                cfg.candidates_per_query
                    .clamp(1, crate::model::MAX_CANDIDATES),
            );
            let (doc_ids, scores) = ranking.entries.into_iter().unzip();
            Ok(CandidateSet {
                query_id: ranking.query_id,
                doc_ids,
                first_stage_scores: Some(scores),
            })
        })
        .collect()
}

impl SynthCorpus {
    /// Writes `queries.lieb`, `docs.lieb`, `run.txt` and `stats.tsv`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<SynthPaths> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
        let paths = SynthPaths {
            queries: dir.join("queries.lieb"),
            docs: dir.join("docs.lieb"),
            run: dir.join("run.txt"),
            stats: dir.join("stats.tsv"),
        };
        let create = |p: &Path| {
            File::create(p)
                .map(BufWriter::new)
                .map_err(|e| Error::from(e).in_file(p))
        };
        write_embeddings(
            create(&paths.queries)?,
            self.queries.dim(),
            self.queries.sequences(),
        )?;
        write_embeddings(create(&paths.docs)?, self.docs.dim(), self.docs.sequences())?;
        write_stats(create(&paths.stats)?, &self.stats)?;

        let rankings: Vec<Ranking> = self
            .candidates
            .iter()
            .map(|c| Ranking {
                query_id: c.query_id.clone(),
                entries: c
                    .doc_ids
                    .iter()
                    .cloned()
                    .zip(c.first_stage_scores.clone().unwrap_or_default())
                    .collect(),
            })
            .collect();
        crate::model::write_run(create(&paths.run)?, &rankings, "synth")?;
        Ok(paths)
    }

    /// Surface words of every query, in query order.
    pub fn query_words(&self) -> Vec<Vec<String>> {
        self.queries
            .sequences()
            .iter()
            .map(|q| {
                word_spans(q.tokens())
                    .into_iter()
                    .map(|s| word_text(&q.tokens()[s]))
                    .collect()
            })
            .collect()
    }
}
