mod commands;
mod output;
mod source;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::*;

pub const VERSION: &str = env!("STABLAB_VERSION");

#[derive(Parser, Debug, Serialize)]
#[command(name = "stab-lab", version = VERSION, about = "Stabilizer complexity experiments on small statevectors")]
pub struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, env = "STABLAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 uses all cores).
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Characteristic function table as CSV.
    Charfn(CharfnArgs),
    /// Gowers norms by the table route and by direct summation.
    Gowers(GowersArgs),
    /// All stabilizer complexity measures available at this size.
    Measures(MeasuresArgs),
    /// Approximate stabilizer rank by subset search.
    Rank(RankArgs),
    /// Stabilizer fidelity by exhaustive enumeration.
    Fidelity(FidelityArgs),
    /// Minimum Gram eigenvalues over stabilizer subsets.
    GramScan(GramScanArgs),
    /// Find a stabilizer state with large overlap and record every stage.
    ExtractStabilizer(ExtractArgs),
    /// Simulated Bell difference sampling shots as CSV.
    BellSim(BellSimArgs),
    /// Tolerant stabilizer-fidelity test.
    TolerantTest(TolerantArgs),
    /// Low stabilizer rank versus Haar distinguisher.
    RankVsHaar(RankVsHaarArgs),
    /// Calibrate a rank-vs-Haar threshold.
    Calibrate(CalibrateArgs),
    /// Relations between rank, fidelity and the Gowers norm.
    Relations(RelationsArgs),
    /// Additive energy and doubling ratio of a point set.
    Doubling(DoublingArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 3 for a violated mathematical identity, 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    let invariant = e.chain().any(|c| {
        c.downcast_ref::<stablab::Error>().is_some_and(|s| s.is_invariant())
            || c.downcast_ref::<commands::FailedChecks>().is_some()
    });
    if invariant {
        3
    } else {
        2
    }
}
