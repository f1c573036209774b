//! Spectral concentration of contextual embeddings: λ₁/Σλ over all
//! occurrences of a subword. Rare terms keep one direction (ratio near 1);
//! frequent ones spread with context.
//!
//! ```sh
//! cargo run --example spectral
//! ```

use lilens::analysis::{spectral_table, DEFAULT_SPECTRAL_CAP};
use lilens::synth::{generate, SynthConfig};

fn main() -> lilens::Result<()> {
    let corpus = generate(&SynthConfig::default())?;
    let mut rows = spectral_table(
        &corpus.queries,
        &corpus.docs,
        &corpus.candidates,
        Some(&corpus.stats),
        DEFAULT_SPECTRAL_CAP,
        0,
    )?;
    rows.sort_by(|a, b| {
        a.idf_subword
            .unwrap_or(0.0)
            .total_cmp(&b.idf_subword.unwrap_or(0.0))
    });

    println!(
        "{:<10} {:>6} {:>6} {:>7}  leading singular values",
        "subword", "idf", "m", "ratio"
    );
    let step = (rows.len() / 15).max(1);
    for r in rows.iter().step_by(step) {
        let lead: Vec<String> = r
            .singular_values
            .iter()
            .take(3)
            .map(|s| format!("{s:.2}"))
            .collect();
        println!(
            "{:<10} {:>6.2} {:>6} {:>7.4}  {}",
            r.term,
            r.idf_subword.unwrap_or(f64::NAN),
            r.n_occurrences,
            r.ratio,
            lead.join(" ")
        );
    }
    Ok(())
}
