//! CSV writers. Floats use shortest round-trip formatting; undefined
//! values are written as empty fields.

use std::io::Write;

use crate::analysis::{DeltaEsRow, MatchStatsRow, SpectralRow, TermImportanceRow};
use crate::error::Result;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_importance_csv(w: impl Write, rows: &[TermImportanceRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "word",
        "query_id",
        "tau_ap",
        "mean_tau_ap",
        "idf_word",
        "n_queries",
    ])?;
    for row in rows {
        for (query_id, tau) in &row.per_query_tau_ap {
            out.write_record([
                row.word.clone(),
                query_id.clone(),
                tau.to_string(),
                row.mean_tau_ap.to_string(),
                opt(row.idf_word),
                row.n_queries.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_importance_words_csv(w: impl Write, rows: &[TermImportanceRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["word", "mean_tau_ap", "idf_word", "n_queries"])?;
    for row in rows {
        out.write_record([
            row.word.clone(),
            row.mean_tau_ap.to_string(),
            opt(row.idf_word),
            row.n_queries.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_delta_es_csv(w: impl Write, rows: &[DeltaEsRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "term",
        "granularity",
        "delta_es",
        "partial",
        "n_pairs_used",
        "n_pairs_skipped",
        "idf",
    ])?;
    for row in rows {
        out.write_record([
            row.term.clone(),
            row.granularity.to_string(),
            opt(row.delta_es),
            row.partial.to_string(),
            row.n_pairs_used.to_string(),
            row.n_pairs_skipped.to_string(),
            opt(row.idf),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_spectral_csv(w: impl Write, rows: &[SpectralRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["term", "m", "ratio", "idf_subword"])?;
    for row in rows {
        out.write_record([
            row.term.clone(),
            row.n_occurrences.to_string(),
            row.ratio.to_string(),
            opt(row.idf_subword),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per term; singular values joined with `;`, largest first.
pub fn write_singular_values_csv(w: impl Write, rows: &[SpectralRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["term", "singular_values"])?;
    for row in rows {
        let values: Vec<String> = row.singular_values.iter().map(f64::to_string).collect();
        out.write_record([row.term.clone(), values.join(";")])?;
    }
    out.flush()?;
    Ok(())
}

/// `top_matches` holds `token:frequency` pairs joined with `;`.
pub fn write_matches_csv(w: impl Write, rows: &[MatchStatsRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "query_id",
        "position",
        "token",
        "exact_match_freq",
        "other_query_term_freq",
        "top_matches",
    ])?;
    for row in rows {
        let top: Vec<String> = row
            .top_matched_tokens
            .iter()
            .map(|(t, f)| format!("{t}:{f}"))
            .collect();
        out.write_record([
            row.query_id.clone(),
            row.position.to_string(),
            row.token.clone(),
            row.exact_match_freq.to_string(),
            row.other_query_term_freq.to_string(),
            top.join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}
