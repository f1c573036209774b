//! What does each query token match? Fraction of exact matches, of matches
//! on another query word, and the most frequent matched tokens.
//!
//! ```sh
//! cargo run --example match_stats
//! ```

use lilens::analysis::{match_stats, QueryMatches};
use lilens::synth::{generate, SynthConfig};

fn main() -> lilens::Result<()> {
    let corpus = generate(&SynthConfig::default())?;
    let matches = QueryMatches::compute_all(&corpus.queries, &corpus.docs, &corpus.candidates)?;
    for qm in matches.iter().take(3) {
        println!("query {} ({} candidates)", qm.query.id(), qm.docs.len());
        for row in match_stats(qm) {
            let top: Vec<String> = row
                .top_matched_tokens
                .iter()
                .take(3)
                .map(|(t, f)| format!("{t} {f:.2}"))
                .collect();
            println!(
                "  {:>2} {:<10} exact {:.2}  other-query-term {:.2}  top: {}",
                row.position,
                row.token,
                row.exact_match_freq,
                row.other_query_term_freq,
                top.join(", ")
            );
        }
    }
    Ok(())
}
