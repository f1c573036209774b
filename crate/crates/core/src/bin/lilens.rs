use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lilens::analysis::DEFAULT_SPECTRAL_CAP;
use lilens::correlation::TauApMode;
use lilens::report::{self, CorrelationEntry, RunConfig};
use lilens::synth::{self, SynthConfig};
use lilens::Error;

#[derive(Parser)]
#[command(
    name = "lilens",
    version,
    about = "Late-interaction retrieval analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-rank every candidate set with MaxSim scores
    Rerank(Common),
    /// Masking-based term importance (tau_AP) per word
    Importance(Common),
    /// Exact vs soft match statistic per subword and word
    DeltaEs(Common),
    /// Spectral concentration of contextual subword embeddings
    Spectral(Common),
    /// What each query token matches across its candidates
    MatchStats(Common),
    /// All correlations against IDF, as report.json
    Report(Common),
    /// Generate a synthetic corpus (queries, docs, run, stats)
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Asym,
    Sym,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long)]
    docs: Option<PathBuf>,
    #[arg(long)]
    run: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "asym")]
    tau_ap_mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SPECTRAL_CAP)]
    spectral_cap: usize,
}

impl From<Common> for RunConfig {
    fn from(c: Common) -> Self {
        RunConfig {
            queries: c.queries,
            docs: c.docs,
            run: c.run,
            stats: c.stats,
            out_dir: c.out_dir,
            threads: c.threads,
            seed: c.seed,
            tau_ap_mode: match c.tau_ap_mode {
                Mode::Asym => TauApMode::Asymmetric,
                Mode::Sym => TauApMode::Symmetric,
            },
            spectral_cap: c.spectral_cap,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    n_docs: Option<usize>,
    #[arg(long)]
    n_queries: Option<usize>,
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long)]
    candidates: Option<usize>,
}

fn summary(name: &str, c: &CorrelationEntry) {
    match c.r {
        Some(r) => println!("{name}: r = {r:.4} (n = {})", c.n_points),
        None => println!(
            "{name}: omitted ({}, n = {})",
            c.reason.as_deref().unwrap_or("unknown"),
            c.n_points
        ),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Rerank(c) => {
            let path = report::cmd_rerank(&c.into())?;
            println!("wrote {}", path.display());
        }
        Command::Importance(c) => {
            let result = report::cmd_importance(&c.into())?;
            for q in &result.skipped {
                eprintln!("warning: query {q} has fewer than 2 candidates, skipped");
            }
            summary("pearson(idf, mean tau_ap)", &result.correlation);
        }
        Command::DeltaEs(c) => summary(
            "pearson(idf, delta_es)",
            &report::cmd_delta_es(&c.into())?.correlation,
        ),
        Command::Spectral(c) => summary(
            "pearson(idf, spectral ratio)",
            &report::cmd_spectral(&c.into())?.correlation,
        ),
        Command::MatchStats(c) => {
            let rows = report::cmd_match_stats(&c.into())?;
            println!("{} query positions", rows.len());
        }
        Command::Report(c) => {
            let r = report::cmd_report(&c.into())?;
            summary(
                "pearson(idf, mean tau_ap)",
                &r.correlations.pearson_idf_tauap,
            );
            summary(
                "pearson(idf, delta_es)",
                &r.correlations.pearson_idf_deltaes,
            );
            summary(
                "pearson(idf, spectral ratio)",
                &r.correlations.pearson_idf_spectral,
            );
        }
        Command::Synth(a) => {
            let defaults = SynthConfig::default();
            let cfg = SynthConfig {
                seed: a.seed,
                dim: a.dim.unwrap_or(defaults.dim),
                n_docs: a.n_docs.unwrap_or(defaults.n_docs),
                n_queries: a.n_queries.unwrap_or(defaults.n_queries),
                vocab_size: a.vocab_size.unwrap_or(defaults.vocab_size),
                candidates_per_query: a.candidates.unwrap_or(defaults.candidates_per_query),
                ..defaults
            };
            let paths = synth::generate(&cfg)?.write_to_dir(&a.out_dir)?;
            for p in [&paths.queries, &paths.docs, &paths.run, &paths.stats] {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
