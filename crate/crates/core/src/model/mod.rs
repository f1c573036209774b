//! Domain types shared by every analysis: token sequences with their
//! unit-normalized embeddings, first-stage candidate sets, and corpus
//! statistics.

mod lieb;
mod run;
mod stats;

use std::collections::HashMap;
use std::ops::Range;

pub use lieb::{load_embeddings, read_embeddings, write_embeddings, LoadOptions, MAX_DOC_TOKENS};
pub use run::{load_run, parse_run, write_run, CandidateSet, MAX_CANDIDATES, RUN_TAG};
pub use stats::{
    compute_corpus_stats, idf, load_stats, read_stats, write_stats, CorpusStats, Granularity,
};

use crate::error::{Error, Result};

/// Prefix marking a subword that continues the previous one.
pub const CONTINUATION_MARKER: &str = "##";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub word_index: u32,
}

impl Token {
    pub fn new(text: impl Into<String>, word_index: u32) -> Self {
        Self {
            text: text.into(),
            word_index,
        }
    }

    /// The subword text with any continuation marker removed.
    pub fn stem(&self) -> &str {
        self.text
            .strip_prefix(CONTINUATION_MARKER)
            .unwrap_or(&self.text)
    }
}

/// Checks that word indices start at 0 and advance by 0 or 1.
pub fn validate_word_indices(tokens: &[Token]) -> Result<()> {
    let mut prev: Option<u32> = None;
    for (pos, tok) in tokens.iter().enumerate() {
        let ok = match prev {
            None => tok.word_index == 0,
            Some(p) => tok.word_index == p || tok.word_index == p + 1,
        };
        if !ok {
            return Err(Error::Malformed(format!(
                "token {pos} has word_index {} after {:?}",
                tok.word_index, prev
            )));
        }
        prev = Some(tok.word_index);
    }
    Ok(())
}

/// Groups consecutive tokens into words, returning the token range of each.
pub fn word_spans(tokens: &[Token]) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start = 0;
    for pos in 1..=tokens.len() {
        if pos == tokens.len() || tokens[pos].word_index != tokens[start].word_index {
            spans.push(start..pos);
            start = pos;
        }
    }
    spans
}

/// Surface form of a word: its subwords concatenated, continuation markers
/// stripped.
pub fn word_text(tokens: &[Token]) -> String {
    tokens.iter().map(Token::stem).collect()
}

/// One query or passage: tokens plus a row-major `n_tokens x dim` matrix of
/// unit-norm rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSequence {
    id: String,
    tokens: Vec<Token>,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingSequence {
    /// Builds a sequence from raw rows, normalizing every row to unit length.
    pub fn new(
        id: impl Into<String>,
        tokens: Vec<Token>,
        dim: usize,
        mut data: Vec<f32>,
    ) -> Result<Self> {
        let id = id.into();
        if tokens.is_empty() {
            return Err(Error::Malformed(format!("sequence {id} has no tokens")));
        }
        if dim == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        if data.len() != tokens.len() * dim {
            return Err(Error::Malformed(format!(
                "sequence {id}: expected {} values, got {}",
                tokens.len() * dim,
                data.len()
            )));
        }
        validate_word_indices(&tokens)
            .map_err(|e| Error::Malformed(format!("sequence {id}: {e}")))?;
        for (row, chunk) in data.chunks_exact_mut(dim).enumerate() {
            let norm = chunk
                .iter()
                .map(|&x| f64::from(x) * f64::from(x))
                .sum::<f64>()
                .sqrt();
            if norm.is_nan() || norm < 1e-12 {
                return Err(Error::ZeroNorm { id, row });
            }
            for x in chunk.iter_mut() {
                *x = (f64::from(*x) / norm) as f32;
            }
        }
        Ok(Self {
            id,
            tokens,
            dim,
            data,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn word_spans(&self) -> Vec<Range<usize>> {
        word_spans(&self.tokens)
    }

    /// Token positions belonging to the word with the given index.
    pub fn word_positions(&self, word_index: u32) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.word_index == word_index)
            .map(|(i, _)| i)
            .collect()
    }
}

/// An immutable collection of sequences sharing one embedding dimension.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dim: usize,
    sequences: Vec<EmbeddingSequence>,
    by_id: HashMap<String, usize>,
}

impl EmbeddingStore {
    pub fn new(dim: usize, sequences: Vec<EmbeddingSequence>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(sequences.len());
        for (i, seq) in sequences.iter().enumerate() {
            if seq.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: seq.dim,
                });
            }
            if by_id.insert(seq.id.clone(), i).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate sequence id {}",
                    seq.id
                )));
            }
        }
        Ok(Self {
            dim,
            sequences,
            by_id,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn sequences(&self) -> &[EmbeddingSequence] {
        &self.sequences
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&EmbeddingSequence> {
        self.index_of(id).map(|i| &self.sequences[i])
    }

    pub fn by_index(&self, i: usize) -> &EmbeddingSequence {
        &self.sequences[i]
    }
}
