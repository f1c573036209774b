//! Document frequencies and IDF at subword and word granularity.
//!
//! The on-disk form is a TSV file: a `#N <count>` header followed by
//! `term<TAB>df<TAB>granularity` lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use super::{word_spans, word_text, Token};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Granularity {
    Subword,
    Word,
}

impl Granularity {
    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Subword => "subword",
            Granularity::Word => "word",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subword" => Ok(Granularity::Subword),
            "word" => Ok(Granularity::Word),
            other => Err(Error::Malformed(format!("unknown granularity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    pub n_docs: u64,
    pub df_subword: BTreeMap<String, u64>,
    pub df_word: BTreeMap<String, u64>,
}

impl CorpusStats {
    pub fn df(&self, term: &str, granularity: Granularity) -> Option<u64> {
        match granularity {
            Granularity::Subword => self.df_subword.get(term).copied(),
            Granularity::Word => self.df_word.get(term).copied(),
        }
    }

    /// `ln(N / df)`, or `None` for unknown terms.
    pub fn idf(&self, term: &str, granularity: Granularity) -> Option<f64> {
        self.df(term, granularity)
            .map(|df| (self.n_docs as f64 / df.max(1) as f64).ln())
    }
}

/// Counts, for every subword and every word, the number of documents that
/// contain it at least once.
pub fn compute_corpus_stats<'a, I>(docs: I) -> Result<CorpusStats>
where
    I: IntoIterator<Item = &'a [Token]>,
{
    let mut n_docs = 0u64;
    let mut df_subword = BTreeMap::new();
    let mut df_word = BTreeMap::new();
    for tokens in docs {
        n_docs += 1;
        let subwords: BTreeSet<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
        for s in subwords {
            *df_subword.entry(s.to_string()).or_insert(0) += 1;
        }
        let words: BTreeSet<String> = word_spans(tokens)
            .into_iter()
            .map(|span| word_text(&tokens[span]))
            .collect();
        for w in words {
            *df_word.entry(w).or_insert(0) += 1;
        }
    }
    if n_docs == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(CorpusStats {
        n_docs,
        df_subword,
        df_word,
    })
}

pub fn idf(stats: &CorpusStats, term: &str, granularity: Granularity) -> Result<f64> {
    stats
        .idf(term, granularity)
        .ok_or_else(|| Error::UnknownTerm(term.to_string()))
}

pub fn load_stats(path: impl AsRef<Path>) -> Result<CorpusStats> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    read_stats(BufReader::new(file)).map_err(|e| e.in_file(path))
}

pub fn read_stats(reader: impl BufRead) -> Result<CorpusStats> {
    let mut lines = reader.lines().enumerate();
    let n_docs: u64 = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            line.strip_prefix("#N ")
                .and_then(|n| n.trim().parse().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: "expected header \"#N <count>\"".into(),
                })?
        }
        None => return Err(Error::EmptyCorpus),
    };
    let mut stats = CorpusStats {
        n_docs,
        df_subword: BTreeMap::new(),
        df_word: BTreeMap::new(),
    };
    for (n, line) in lines {
        let line_no = n + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let df: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("non-numeric df {:?}", fields[1])))?;
        if df < 1 || df > n_docs {
            return Err(parse_err(format!("df {df} outside [1, {n_docs}]")));
        }
        let granularity: Granularity = fields[2]
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let map = match granularity {
            Granularity::Subword => &mut stats.df_subword,
            Granularity::Word => &mut stats.df_word,
        };
        if map.insert(fields[0].to_string(), df).is_some() {
            return Err(parse_err(format!(
                "duplicate {granularity} term {:?}",
                fields[0]
            )));
        }
    }
    Ok(stats)
}

pub fn write_stats(mut w: impl Write, stats: &CorpusStats) -> Result<()> {
    writeln!(w, "#N {}", stats.n_docs)?;
    for (granularity, map) in [
        (Granularity::Subword, &stats.df_subword),
        (Granularity::Word, &stats.df_word),
    ] {
        for (term, df) in map {
            if term.contains(['\t', '\n', '\r']) {
                return Err(Error::Malformed(format!(
                    "term {term:?} contains a tab or newline"
                )));
            }
            writeln!(w, "{term}\t{df}\t{granularity}")?;
        }
    }
    w.flush()?;
    Ok(())
}
