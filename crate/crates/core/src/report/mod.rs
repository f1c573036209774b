//! End-to-end pipelines behind the command-line tool: ingestion, scoring,
//! analyses, and the files they emit.

mod tables;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use tables::{
    write_delta_es_csv, write_importance_csv, write_importance_words_csv, write_matches_csv,
    write_singular_values_csv, write_spectral_csv,
};

use crate::analysis::{
    aggregate_importance, delta_es_table, match_stats, query_importance, spectral_table,
    DeltaEsRow, MatchStatsRow, QueryMatches, SpectralRow, TermImportanceRow, WordImportance,
    DEFAULT_SPECTRAL_CAP,
};
use crate::correlation::{pearson, TauApMode};
use crate::error::{Error, Result};
use crate::model::{
    load_embeddings, load_run, load_stats, write_run, CandidateSet, CorpusStats, EmbeddingStore,
    Granularity, LoadOptions, RUN_TAG,
};
use crate::scoring::{rerank, Ranking};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub queries: Option<PathBuf>,
    pub docs: Option<PathBuf>,
    pub run: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_mode")]
    pub tau_ap_mode: TauApMode,
    pub spectral_cap: usize,
}

fn ser_mode<S: serde::Serializer>(mode: &TauApMode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match mode {
        TauApMode::Asymmetric => "asym",
        TauApMode::Symmetric => "sym",
    })
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            queries: None,
            docs: None,
            run: None,
            stats: None,
            out_dir: PathBuf::from("."),
            threads: 0,
            seed: 0,
            tau_ap_mode: TauApMode::Asymmetric,
            spectral_cap: DEFAULT_SPECTRAL_CAP,
        }
    }
}

/// Everything a pipeline reads, loaded and cross-validated up front.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub queries: EmbeddingStore,
    pub docs: EmbeddingStore,
    pub candidates: Vec<CandidateSet>,
    pub stats: Option<CorpusStats>,
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::Config(format!("missing required input {flag}")))
}

impl Inputs {
    pub fn load(config: &RunConfig, need_stats: bool) -> Result<Self> {
        let queries = load_embeddings(
            required(&config.queries, "--queries")?,
            LoadOptions::default(),
        )?;
        let docs_path = required(&config.docs, "--docs")?;
        let docs = load_embeddings(docs_path, LoadOptions::documents())?;
        let run_path = required(&config.run, "--run")?;
        let candidates = load_run(run_path)?;
        let stats = match (&config.stats, need_stats) {
            (Some(p), _) => Some(load_stats(p)?),
            (None, true) => return Err(Error::Config("missing required input --stats".into())),
            (None, false) => None,
        };
        if queries.dim() != docs.dim() && !queries.is_empty() && !docs.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: queries.dim(),
                got: docs.dim(),
            }
            .in_file(docs_path));
        }
        let inputs = Self {
            queries,
            docs,
            candidates,
            stats,
        };
        inputs.validate().map_err(|e| e.in_file(run_path))?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.candidates {
            if self.queries.get(&c.query_id).is_none() {
                return Err(Error::UnknownQuery(c.query_id.clone()));
            }
            c.resolve(&self.docs)?;
        }
        Ok(())
    }

    fn rankable(&self) -> impl Iterator<Item = &CandidateSet> {
        self.candidates.iter().filter(|c| c.len() >= 2)
    }

    fn query_matches<'a>(&'a self, sets: &[&'a CandidateSet]) -> Result<Vec<QueryMatches<'a>>> {
        sets.par_iter()
            .map(|c| {
                let q = self.queries.get(&c.query_id).expect("validated");
                QueryMatches::compute(q, &self.docs, c)
            })
            .collect()
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Output(format!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Output(format!("{}: {e}", path.display())))
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Output(format!("{}: {e}", dir.display())))
}

/// A Pearson coefficient against IDF, or the reason it is missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CorrelationEntry {
    /// Pearson over the points where both coordinates are defined.
    pub fn from_points(points: impl IntoIterator<Item = (Option<f64>, Option<f64>)>) -> Self {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points
            .into_iter()
            .filter_map(|(x, y)| Some((x?, y?)))
            .unzip();
        let n_points = xs.len();
        if n_points < 2 {
            return Self {
                r: None,
                n_points,
                reason: Some("insufficient points".into()),
            };
        }
        match pearson(&xs, &ys) {
            Ok(r) => Self {
                r: Some((r * 1e4).round() / 1e4),
                n_points,
                reason: None,
            },
            Err(e) => Self {
                r: None,
                n_points,
                reason: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub pearson_idf_tauap: CorrelationEntry,
    pub pearson_idf_deltaes: CorrelationEntry,
    pub pearson_idf_spectral: CorrelationEntry,
}

// ---- computations -------------------------------------------------------

pub fn compute_rankings(inputs: &Inputs) -> Result<Vec<Ranking>> {
    let none = Default::default();
    inputs
        .candidates
        .par_iter()
        .map(|c| {
            let q = inputs.queries.get(&c.query_id).expect("validated");
            rerank(q, &inputs.docs, c, &none)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ImportanceResult {
    pub per_query: Vec<WordImportance>,
    pub rows: Vec<TermImportanceRow>,
    /// Queries left out because they have fewer than two candidates.
    pub skipped: Vec<String>,
    pub correlation: CorrelationEntry,
}

pub fn compute_importance(inputs: &Inputs, mode: TauApMode) -> Result<ImportanceResult> {
    let rankable: Vec<&CandidateSet> = inputs.rankable().collect();
    if rankable.is_empty() {
        return Err(Error::NoRankableQueries);
    }
    let skipped = inputs
        .candidates
        .iter()
        .filter(|c| c.len() < 2)
        .map(|c| c.query_id.clone())
        .collect();
    let matches = inputs.query_matches(&rankable)?;
    let per_query: Vec<WordImportance> = matches
        .par_iter()
        .map(|qm| query_importance(qm, mode))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let rows = aggregate_importance(&per_query, inputs.stats.as_ref());
    let correlation =
        CorrelationEntry::from_points(rows.iter().map(|r| (r.idf_word, Some(r.mean_tau_ap))));
    Ok(ImportanceResult {
        per_query,
        rows,
        skipped,
        correlation,
    })
}

#[derive(Debug, Clone)]
pub struct DeltaEsResult {
    pub rows: Vec<DeltaEsRow>,
    /// Word-level Δ_ES against word IDF.
    pub correlation: CorrelationEntry,
}

pub fn compute_delta_es(inputs: &Inputs) -> Result<DeltaEsResult> {
    let sets: Vec<&CandidateSet> = inputs.candidates.iter().collect();
    let matches = inputs.query_matches(&sets)?;
    let rows = delta_es_table(&matches, inputs.stats.as_ref());
    let correlation = CorrelationEntry::from_points(
        rows.iter()
            .filter(|r| r.granularity == Granularity::Word)
            .map(|r| (r.idf, r.delta_es)),
    );
    Ok(DeltaEsResult { rows, correlation })
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub rows: Vec<SpectralRow>,
    pub correlation: CorrelationEntry,
}

pub fn compute_spectral(inputs: &Inputs, cap: usize, seed: u64) -> Result<SpectralResult> {
    let rows = spectral_table(
        &inputs.queries,
        &inputs.docs,
        &inputs.candidates,
        inputs.stats.as_ref(),
        cap,
        seed,
    )?;
    let correlation =
        CorrelationEntry::from_points(rows.iter().map(|r| (r.idf_subword, Some(r.ratio))));
    Ok(SpectralResult { rows, correlation })
}

pub fn compute_match_stats(inputs: &Inputs) -> Result<Vec<MatchStatsRow>> {
    let sets: Vec<&CandidateSet> = inputs.candidates.iter().collect();
    let matches = inputs.query_matches(&sets)?;
    Ok(matches.iter().flat_map(match_stats).collect())
}

// ---- commands -----------------------------------------------------------

/// Re-ranks every candidate set and writes `rerank.run`.
pub fn cmd_rerank(config: &RunConfig) -> Result<PathBuf> {
    let inputs = Inputs::load(config, false)?;
    let rankings = with_pool(config.threads, || compute_rankings(&inputs))?;
    prepare_out_dir(&config.out_dir)?;
    let path = config.out_dir.join("rerank.run");
    write_run(create(&path)?, &rankings, RUN_TAG)?;
    Ok(path)
}

/// Writes `importance.csv` (one row per word occurrence in a query) and
/// `importance_words.csv` (one row per word).
pub fn cmd_importance(config: &RunConfig) -> Result<ImportanceResult> {
    let inputs = Inputs::load(config, true)?;
    let result = with_pool(config.threads, || {
        compute_importance(&inputs, config.tau_ap_mode)
    })?;
    prepare_out_dir(&config.out_dir)?;
    write_importance_csv(
        create(&config.out_dir.join("importance.csv"))?,
        &result.rows,
    )?;
    write_importance_words_csv(
        create(&config.out_dir.join("importance_words.csv"))?,
        &result.rows,
    )?;
    Ok(result)
}

pub fn cmd_delta_es(config: &RunConfig) -> Result<DeltaEsResult> {
    let inputs = Inputs::load(config, true)?;
    let result = with_pool(config.threads, || compute_delta_es(&inputs))?;
    prepare_out_dir(&config.out_dir)?;
    write_delta_es_csv(create(&config.out_dir.join("delta_es.csv"))?, &result.rows)?;
    Ok(result)
}

/// Writes `spectral.csv` and the raw singular values to
/// `spectral_singular_values.csv`.
pub fn cmd_spectral(config: &RunConfig) -> Result<SpectralResult> {
    let inputs = Inputs::load(config, true)?;
    let result = with_pool(config.threads, || {
        compute_spectral(&inputs, config.spectral_cap, config.seed)
    })?;
    prepare_out_dir(&config.out_dir)?;
    write_spectral_csv(create(&config.out_dir.join("spectral.csv"))?, &result.rows)?;
    write_singular_values_csv(
        create(&config.out_dir.join("spectral_singular_values.csv"))?,
        &result.rows,
    )?;
    Ok(result)
}

pub fn cmd_match_stats(config: &RunConfig) -> Result<Vec<MatchStatsRow>> {
    let inputs = Inputs::load(config, false)?;
    let rows = with_pool(config.threads, || compute_match_stats(&inputs))?;
    prepare_out_dir(&config.out_dir)?;
    write_matches_csv(create(&config.out_dir.join("matches.csv"))?, &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub queries: usize,
    pub rankable_queries: usize,
    pub documents: usize,
    pub candidates: usize,
    pub words: usize,
    pub subwords: usize,
    pub spectral_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub counts: Counts,
    pub correlations: CorrelationReport,
}

pub fn build_report(inputs: &Inputs, config: &RunConfig) -> Result<Report> {
    let importance = match compute_importance(inputs, config.tau_ap_mode) {
        Ok(r) => Some(r),
        Err(Error::NoRankableQueries) => None,
        Err(e) => return Err(e),
    };
    let delta = compute_delta_es(inputs)?;
    let spectral = compute_spectral(inputs, config.spectral_cap, config.seed)?;
    let counts = Counts {
        queries: inputs.candidates.len(),
        rankable_queries: inputs.rankable().count(),
        documents: inputs.docs.len(),
        candidates: inputs.candidates.iter().map(CandidateSet::len).sum(),
        words: delta
            .rows
            .iter()
            .filter(|r| r.granularity == Granularity::Word)
            .count(),
        subwords: delta
            .rows
            .iter()
            .filter(|r| r.granularity == Granularity::Subword)
            .count(),
        spectral_terms: spectral.rows.len(),
    };
    let tauap = importance
        .map(|r| r.correlation)
        .unwrap_or(CorrelationEntry {
            r: None,
            n_points: 0,
            reason: Some("insufficient points".into()),
        });
    Ok(Report {
        toolkit: "lilens",
        version: VERSION,
        config: config.clone(),
        counts,
        correlations: CorrelationReport {
            pearson_idf_tauap: tauap,
            pearson_idf_deltaes: delta.correlation,
            pearson_idf_spectral: spectral.correlation,
        },
    })
}

/// Computes all three analyses and writes `report.json`.
pub fn cmd_report(config: &RunConfig) -> Result<Report> {
    let inputs = Inputs::load(config, true)?;
    let report = with_pool(config.threads, || build_report(&inputs, config))?;
    prepare_out_dir(&config.out_dir)?;
    let mut w = create(&config.out_dir.join("report.json"))?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    std::io::Write::flush(&mut w)?;
    Ok(report)
}
