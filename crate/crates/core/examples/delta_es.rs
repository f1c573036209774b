//! Exact vs soft matching: for each query term, how much higher its MaxSim
//! is when it lands on the identical token than when it lands elsewhere.
//!
//! ```sh
//! cargo run --example delta_es
//! ```

use lilens::analysis::{delta_es_table, QueryMatches};
use lilens::model::Granularity;
use lilens::synth::{generate, SynthConfig};

fn main() -> lilens::Result<()> {
    let corpus = generate(&SynthConfig::default())?;
    let matches = QueryMatches::compute_all(&corpus.queries, &corpus.docs, &corpus.candidates)?;
    let rows = delta_es_table(&matches, Some(&corpus.stats));

    let mut words: Vec<_> = rows
        .iter()
        .filter(|r| r.granularity == Granularity::Word && r.delta_es.is_some())
        .collect();
    words.sort_by(|a, b| a.idf.unwrap_or(0.0).total_cmp(&b.idf.unwrap_or(0.0)));

    println!(
        "{:<12} {:>6} {:>9} {:>6} {:>8}",
        "word", "idf", "delta_es", "used", "skipped"
    );
    let step = (words.len() / 15).max(1);
    for r in words.iter().step_by(step) {
        println!(
            "{:<12} {:>6.2} {:>9.4} {:>6} {:>8}{}",
            r.term,
            r.idf.unwrap_or(f64::NAN),
            r.delta_es.unwrap(),
            r.n_pairs_used,
            r.n_pairs_skipped,
            if r.partial { "  (partial)" } else { "" }
        );
    }
    let undefined = rows.iter().filter(|r| r.delta_es.is_none()).count();
    println!(
        "\n{} rows, {undefined} undefined (a term never matched exactly or never softly)",
        rows.len()
    );
    Ok(())
}
