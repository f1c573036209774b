//! Re-rank a first-stage candidate list with MaxSim and show which document
//! token every query token matched in the winning passage.
//!
//! ```sh
//! cargo run --example rerank
//! ```

use std::collections::BTreeSet;

use lilens::model::word_text;
use lilens::scoring::{max_sim, rerank};
use lilens::synth::{generate, SynthConfig};

fn main() -> lilens::Result<()> {
    let corpus = generate(&SynthConfig::default())?;
    let cands = &corpus.candidates[0];
    let query = corpus
        .queries
        .get(&cands.query_id)
        .expect("synthetic query");
    let words: Vec<String> = query
        .word_spans()
        .into_iter()
        .map(|s| word_text(&query.tokens()[s]))
        .collect();
    println!("query {}: {}", query.id(), words.join(" "));

    let ranking = rerank(query, &corpus.docs, cands, &BTreeSet::new())?;
    println!("\ntop 5 of {} candidates", ranking.entries.len());
    for (rank, (doc, score)) in ranking.entries.iter().take(5).enumerate() {
        println!("{:>3}  {doc:<8} {score:.4}", rank + 1);
    }

    let best = corpus.docs.get(&ranking.entries[0].0).expect("ranked doc");
    let trace = max_sim(query, best)?;
    println!("\nargmax trace against {}", best.id());
    for (tok, e) in query.tokens().iter().zip(&trace.entries) {
        println!(
            "  {:<10} -> {:<10} (position {:>3}, cos {:.4})",
            tok.text, e.matched_token_text, e.j_star, e.c_max
        );
    }
    println!("  total {:.4}", trace.score());
    Ok(())
}
