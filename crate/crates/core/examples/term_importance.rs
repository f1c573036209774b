//! Masking-based term importance: drop one query word from the score,
//! re-rank, and measure with τ_AP how far the ranking moved. Low τ_AP means
//! the word mattered.
//!
//! ```sh
//! cargo run --example term_importance
//! ```

use lilens::analysis::{aggregate_importance, query_importance, QueryMatches};
use lilens::correlation::TauApMode;
use lilens::model::Granularity;
use lilens::synth::{generate, SynthConfig};

fn main() -> lilens::Result<()> {
    let corpus = generate(&SynthConfig::default())?;
    let matches = QueryMatches::compute_all(&corpus.queries, &corpus.docs, &corpus.candidates)?;

    let first = query_importance(&matches[0], TauApMode::Asymmetric)?;
    println!("query {}", matches[0].query.id());
    for w in &first {
        let idf = corpus
            .stats
            .idf(&w.word, Granularity::Word)
            .unwrap_or(f64::NAN);
        println!("  {:<12} tau_ap {:>7.4}   idf {idf:.2}", w.word, w.tau_ap);
    }

    let mut all = Vec::new();
    for qm in &matches {
        all.extend(query_importance(qm, TauApMode::Asymmetric)?);
    }
    let mut rows = aggregate_importance(&all, Some(&corpus.stats));
    rows.sort_by(|a, b| a.mean_tau_ap.total_cmp(&b.mean_tau_ap));
    println!("\nmost important words across {} queries", matches.len());
    for r in rows.iter().take(8) {
        println!(
            "  {:<12} mean tau_ap {:>7.4}  idf {:.2}  ({} occurrences)",
            r.word,
            r.mean_tau_ap,
            r.idf_word.unwrap_or(f64::NAN),
            r.n_queries
        );
    }
    Ok(())
}
