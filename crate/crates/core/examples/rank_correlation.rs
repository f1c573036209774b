//! AP correlation against Kendall's τ: both agree on identity and reversal,
//! but τ_AP punishes a swap at the top far more than one at the bottom.
//!
//! ```sh
//! cargo run --example rank_correlation
//! ```

use lilens::correlation::{kendall_tau, pearson, tau_ap, tau_ap_with_mode, RankPair, TauApMode};

fn main() -> lilens::Result<()> {
    let reference: Vec<u32> = (1..=10).collect();
    let mut top = reference.clone();
    top.swap(0, 1);
    let mut bottom = reference.clone();
    bottom.swap(8, 9);
    let reversed: Vec<u32> = reference.iter().rev().copied().collect();

    println!(
        "{:<14} {:>8} {:>8} {:>8}",
        "candidate", "tau_ap", "sym", "kendall"
    );
    for (name, cand) in [
        ("identity", &reference),
        ("swap top", &top),
        ("swap bottom", &bottom),
        ("reversed", &reversed),
    ] {
        let pair = RankPair::new(&reference, cand)?;
        println!(
            "{name:<14} {:>8.4} {:>8.4} {:>8.4}",
            tau_ap(&pair),
            tau_ap_with_mode(&pair, TauApMode::Symmetric),
            kendall_tau(&pair)
        );
    }

    let idf = [0.4, 1.1, 2.3, 3.0, 4.7];
    let importance = [0.95, 0.9, 0.6, 0.55, 0.2];
    println!(
        "\npearson(idf, tau_ap) = {:.4}",
        pearson(&idf, &importance)?
    );
    Ok(())
}
