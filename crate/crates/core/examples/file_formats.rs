//! Reading and writing the on-disk formats: LIEB embeddings, TREC runs and
//! corpus statistics.
//!
//! ```sh
//! cargo run --example file_formats
//! ```

use std::collections::BTreeSet;
use std::io::Cursor;

use lilens::model::{
    compute_corpus_stats, parse_run, read_embeddings, read_stats, write_embeddings, write_run,
    write_stats, CandidateSet, EmbeddingSequence, EmbeddingStore, Granularity, LoadOptions, Token,
    RUN_TAG,
};
use lilens::scoring::rerank;

fn main() -> lilens::Result<()> {
    // rows need not be unit length on disk; they are normalized on load
    let tokens = |words: &[(&str, u32)]| {
        words
            .iter()
            .map(|&(t, w)| Token::new(t, w))
            .collect::<Vec<_>>()
    };
    let docs = vec![
        EmbeddingSequence::new(
            "d1",
            tokens(&[("play", 0), ("##ing", 0), ("chess", 1)]),
            2,
            vec![3.0, 4.0, 1.0, 1.0, 0.0, 2.0],
        )?,
        EmbeddingSequence::new(
            "d2",
            tokens(&[("chess", 0), ("club", 1)]),
            2,
            vec![1.0, 1.0, 1.0, 0.0],
        )?,
    ];
    let query = EmbeddingSequence::new("q1", tokens(&[("chess", 0)]), 2, vec![0.1, 1.0])?;

    let mut lieb = Vec::new();
    write_embeddings(&mut lieb, 2, &docs)?;
    let store = read_embeddings(Cursor::new(&lieb), LoadOptions::documents())?;
    println!(
        "LIEB: {} bytes, {} docs, first row of d1 = {:?}",
        lieb.len(),
        store.len(),
        store.get("d1").unwrap().row(0)
    );

    let run = parse_run(Cursor::new("q1 Q0 d1 1 12.5 bm25\nq1 Q0 d2 2 11.0 bm25\n"))?;
    let store = EmbeddingStore::new(2, store.sequences().to_vec())?;
    let ranking = rerank(&query, &store, &run[0], &BTreeSet::new())?;
    let mut out = Vec::new();
    write_run(&mut out, &[ranking], RUN_TAG)?;
    print!("re-ranked run:\n{}", String::from_utf8_lossy(&out));

    let stats = compute_corpus_stats(docs.iter().map(EmbeddingSequence::tokens))?;
    let mut tsv = Vec::new();
    write_stats(&mut tsv, &stats)?;
    print!("stats:\n{}", String::from_utf8_lossy(&tsv));
    let reloaded = read_stats(Cursor::new(&tsv))?;
    println!(
        "idf(chess) = {:.4}, idf(playing) = {:.4}",
        reloaded.idf("chess", Granularity::Word).unwrap(),
        reloaded.idf("playing", Granularity::Word).unwrap()
    );

    let single = CandidateSet::new("q1", vec!["d2".into()])?;
    println!(
        "a candidate set of {} doc(s) can be re-ranked but not masked for importance",
        single.len()
    );
    Ok(())
}
