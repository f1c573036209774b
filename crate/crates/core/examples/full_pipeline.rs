//! End to end: generate a synthetic corpus on disk, run every analysis the
//! way the CLI does, and print the three correlations with IDF.
//!
//! ```sh
//! cargo run --release --example full_pipeline -- /tmp/lilens-demo
//! ```

use std::path::PathBuf;

use lilens::report::{
    cmd_delta_es, cmd_importance, cmd_match_stats, cmd_report, cmd_rerank, cmd_spectral, RunConfig,
};
use lilens::synth::{generate, SynthConfig};

fn main() -> lilens::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lilens-demo"));
    let paths = generate(&SynthConfig::default())?.write_to_dir(&dir)?;
    println!("corpus written to {}", dir.display());

    let config = RunConfig {
        queries: Some(paths.queries),
        docs: Some(paths.docs),
        run: Some(paths.run),
        stats: Some(paths.stats),
        out_dir: dir.join("out"),
        ..RunConfig::default()
    };
    println!("{}", cmd_rerank(&config)?.display());
    cmd_importance(&config)?;
    cmd_delta_es(&config)?;
    cmd_spectral(&config)?;
    cmd_match_stats(&config)?;
    let report = cmd_report(&config)?;

    let c = &report.correlations;
    for (name, entry) in [
        ("idf vs mean tau_ap", &c.pearson_idf_tauap),
        ("idf vs delta_es", &c.pearson_idf_deltaes),
        ("idf vs spectral ratio", &c.pearson_idf_spectral),
    ] {
        match entry.r {
            Some(r) => println!("{name:<22} r = {r:>7.4}  (n = {})", entry.n_points),
            None => println!(
                "{name:<22} omitted: {}",
                entry.reason.as_deref().unwrap_or("")
            ),
        }
    }
    println!("outputs in {}", config.out_dir.display());
    Ok(())
}
