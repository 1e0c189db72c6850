use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use stablab::charfn::{char_function, exact_r};
use stablab::gf2::{doubling_stats, format_bits, SympVec};
use stablab::measures::{
    gowers3, gowers_norm_direct, lambda_star_scan, measure_report, relations_experiment, stabilizer_fidelity,
    stabilizer_rank, RelationsConfig, ScanMode,
};
use stablab::tester::{
    calibrate, rank_vs_haar_test, tolerant_test, BellSampler, Thresholds, THRESHOLDS_VERSION,
};
use stablab::witness::extract_stabilizer;

use crate::output::{emit_csv, emit_json, write_atomic};
use crate::source::StateArgs;
use crate::{Cli, Command, VERSION};

/// Raised when an experiment's self-checks do not all pass.
#[derive(Debug)]
pub struct FailedChecks(pub Vec<String>);

impl std::fmt::Display for FailedChecks {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "checks failed: {}", self.0.join(", "))
    }
}

impl std::error::Error for FailedChecks {}

#[derive(Args, Debug, Serialize)]
pub struct CharfnArgs {
    #[command(flatten)]
    pub source: StateArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GowersArgs {
    #[command(flatten)]
    pub source: StateArgs,
    /// Order of the directly summed norm (1, 2 or 3).
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Skip the direct summation.
    #[arg(long)]
    pub table_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MeasuresArgs {
    #[command(flatten)]
    pub source: StateArgs,
    /// Approximation slack for the rank search.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub source: StateArgs,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub source: StateArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
pub struct GramScanArgs {
    /// Largest subset size.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub nmax: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Random subsets per (k, n) in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: StateArgs,
    /// Full pipeline trace destination.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BellSimArgs {
    #[command(flatten)]
    pub source: StateArgs,
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TolerantArgs {
    #[command(flatten)]
    pub source: StateArgs,
    #[arg(long)]
    pub eps1: f64,
    #[arg(long)]
    pub eps2: f64,
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
    /// Override the default threshold eps1⁸/2.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RankVsHaarArgs {
    #[command(flatten)]
    pub source: StateArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
    /// Threshold table (defaults to the one built into the binary).
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// States per class.
    #[arg(long, default_value_t = 100)]
    pub corpus_size: usize,
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
    /// Threshold table to create or update in place.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct RelationsArgs {
    /// Grid points per interpolation path.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long, default_value_t = 5)]
    pub haar: usize,
    #[arg(long, default_value_t = 5)]
    pub combos: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DoublingArgs {
    /// Points as y:alpha bit strings separated by commas, e.g. "0:0,0:1,1:0".
    #[arg(long, conflicts_with = "file")]
    pub points: Option<String>,
    /// File with one y:alpha point per line.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::Charfn(a) => {
            let state = a.source.load()?;
            let t = char_function(&state)?;
            let n = t.n();
            let rows = t.values().iter().enumerate().map(|(i, f)| {
                let z = SympVec::from_index(n, i);
                vec![format_bits(n, z.y.bits()), format_bits(n, z.alpha.bits()), format!("{f:.17e}")]
            });
            emit_csv(cli, &["y_bits", "alpha_bits", "f_value"], rows, a.out.as_deref())
        }
        Command::Gowers(a) => {
            let state = a.source.load()?;
            #[derive(Serialize)]
            struct Out {
                n: usize,
                gowers3: f64,
                exact_r: f64,
                d: usize,
                direct: Option<f64>,
            }
            let direct = if a.table_only { None } else { Some(gowers_norm_direct(&state, a.d)?) };
            let out = Out { n: state.n(), gowers3: gowers3(&state)?, exact_r: exact_r(&state)?, d: a.d, direct };
            emit_json(cli, &out, a.out.as_deref())
        }
        Command::Measures(a) => {
            let state = a.source.load()?;
            emit_json(cli, &measure_report(&state, a.delta)?, a.out.as_deref())
        }
        Command::Rank(a) => {
            let state = a.source.load()?;
            emit_json(cli, &stabilizer_rank(&state, a.delta)?, a.out.as_deref())
        }
        Command::Fidelity(a) => {
            let state = a.source.load()?;
            emit_json(cli, &stabilizer_fidelity(&state)?, a.out.as_deref())
        }
        Command::GramScan(a) => {
            let mode = match a.mode {
                Mode::Exhaustive => ScanMode::Exhaustive,
                Mode::Sampled => ScanMode::Sampled { trials: a.trials, seed },
            };
            let rows = lambda_star_scan(a.k, a.nmax, mode)?;
            let rows = rows.into_iter().map(|r| {
                let witness: Vec<String> = r.witness.iter().map(|i| i.to_string()).collect();
                vec![
                    r.k.to_string(),
                    r.n.to_string(),
                    r.min_lambda.map(|l| format!("{l:.17e}")).unwrap_or_else(|| "NA".into()),
                    witness.join(";"),
                ]
            });
            emit_csv(cli, &["k", "n", "min_lambda", "witness"], rows, a.out.as_deref())
        }
        Command::ExtractStabilizer(a) => {
            let state = a.source.load()?;
            let ex = extract_stabilizer(&state, seed)?;
            if let Some(path) = &a.trace {
                let doc = crate::output::json_document(cli, &ex.trace)?;
                write_atomic(path, &doc)?;
            }
            #[derive(Serialize)]
            struct Out<'a> {
                overlap: f64,
                witness: &'a stablab::clifford::StabilizerState,
            }
            emit_json(cli, &Out { overlap: ex.overlap, witness: &ex.witness }, a.out.as_deref())
        }
        Command::BellSim(a) => {
            let state = a.source.load()?;
            let shots = BellSampler::new(&state)?.sample(a.shots, seed);
            let rows = shots.iter().map(|s| {
                let (y, al, b) = s.csv_row();
                vec![y, al, b.to_string()]
            });
            emit_csv(cli, &["y_bits", "alpha_bits", "same_bit"], rows, a.out.as_deref())
        }
        Command::TolerantTest(a) => {
            let state = a.source.load()?;
            emit_json(cli, &tolerant_test(&state, a.eps1, a.eps2, a.shots, seed, a.threshold)?, a.out.as_deref())
        }
        Command::RankVsHaar(a) => {
            let state = a.source.load()?;
            let table = match &a.thresholds {
                Some(p) => Thresholds::from_json(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
                None => Thresholds::shipped(),
            };
            emit_json(cli, &rank_vs_haar_test(&state, a.k, a.shots, seed, &table)?, a.out.as_deref())
        }
        Command::Calibrate(a) => {
            let entry = calibrate(a.n, a.k, a.corpus_size, a.shots, seed)?;
            let mut table = match std::fs::read_to_string(&a.out) {
                Ok(text) => Thresholds::from_json(&text)?,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    Thresholds { version: THRESHOLDS_VERSION, generated_by: String::new(), entries: Vec::new() }
                }
                Err(e) => return Err(e).with_context(|| format!("reading {}", a.out.display())),
            };
            table.generated_by = format!("stab-lab {VERSION}");
            table.upsert(entry);
            let mut text = table.to_json();
            text.push('\n');
            write_atomic(&a.out, text.as_bytes())
        }
        Command::Relations(a) => {
            let cfg = RelationsConfig { grid: a.grid, haar: a.haar, combos: a.combos, seed };
            let report = relations_experiment(&cfg)?;
            emit_json(cli, &report, a.out.as_deref())?;
            if !report.all_passed {
                let failed = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
                bail!(FailedChecks(failed));
            }
            Ok(())
        }
        Command::Doubling(a) => {
            let text = match (&a.points, &a.file) {
                (Some(p), _) => p.replace(',', "\n"),
                (None, Some(f)) => std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?,
                (None, None) => bail!(stablab::Error::InvalidParameter("give --points or --file".into())),
            };
            let points = parse_points(&text)?;
            emit_json(cli, &doubling_stats(&points)?, a.out.as_deref())
        }
    }
}

fn parse_points(text: &str) -> Result<Vec<SympVec>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (y, a) = l
                .split_once(':')
                .ok_or_else(|| stablab::Error::InvalidParameter(format!("point {l:?} is not y:alpha")))?;
            Ok(SympVec::new(y.parse()?, a.parse()?)?)
        })
        .collect()
}
