use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use ucw::bounds::{reference_bound, resolve_bound, Provenance, StoredBound};
use ucw::commands::{
    self, certify, critvis, evaluate, exit, reproduce, scan, subspace, table, Format,
};
use ucw::quantum::Which;

#[derive(Parser)]
#[command(name = "ucw", version, about = "Witnesses and classical bounds for the unrelated-confounders network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output format: text, json or csv.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a witness on a behavior.
    Evaluate {
        /// Built-in name, witness file, or inline expression.
        #[arg(long, default_value = "I")]
        witness: String,
        /// JSON file, `family:THETA[:V]`, `fixture:NAME` or `uniform`.
        #[arg(long, default_value = "family:pi/8:1")]
        input: String,
        /// Compare against this value instead of the stored bound.
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Bracket the classical maximum by branch-and-bound.
    Certify {
        #[arg(long, default_value = "I")]
        witness: String,
        #[arg(long, default_value_t = 1e-3)]
        gap: f64,
        #[arg(long, default_value_t = 1_000_000)]
        node_cap: usize,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<u64>,
    },
    /// Family values over a (theta, v) grid.
    Scan {
        /// `N` or `NTxNV`.
        #[arg(long, default_value = "33x11")]
        grid: String,
        /// Explicit angles (e.g. `pi/8,atan(1/3)`), overriding the grid.
        #[arg(long, value_delimiter = ',')]
        theta: Vec<String>,
        /// Explicit visibilities, overriding the grid.
        #[arg(long, value_delimiter = ',')]
        visibility: Vec<f64>,
    },
    /// Critical visibilities against the stored bounds.
    Critvis {
        /// Restrict to one built-in witness.
        #[arg(long)]
        witness: Option<Which>,
        /// Override the bound (applies to every reported witness).
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Grid over the (r, s) slice plus quantum-circle samples.
    Subspace {
        #[arg(long, default_value = "41")]
        grid: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Recompute every published number and report pass/fail.
    ReproduceAll {
        /// Directory holding I.witness and F.witness to use instead of the shipped ones.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Groups to skip: certify, local, random.
        #[arg(long, value_delimiter = ',')]
        skip: Vec<String>,
        #[arg(long, default_value_t = 1e-3)]
        gap: f64,
        /// Wall-clock limit per certification in seconds.
        #[arg(long, default_value_t = 1800)]
        time_limit: u64,
    },
}

fn emit(common: &Common, text: &str) -> ucw::Result<()> {
    match &common.out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bound_for(name: &str, value: Option<f64>) -> ucw::Result<Option<StoredBound>> {
    Ok(match value {
        Some(value) => Some(StoredBound {
            witness: name.to_string(),
            value,
            provenance: Provenance::Override,
        }),
        None => resolve_bound(name)?,
    })
}

fn stored(which: Which) -> ucw::Result<StoredBound> {
    Ok(resolve_bound(which.name())?.unwrap_or(reference_bound(which.name())?))
}

fn run(cli: Cli) -> ucw::Result<i32> {
    let common = &cli.common;
    match cli.command {
        Command::Evaluate { witness, input, bound } => {
            let spec = commands::load_witness(&witness)?;
            let data = input.parse::<evaluate::InputSource>()?.load()?;
            let report = evaluate::evaluate(&spec, &data, bound_for(&spec.name, bound)?)?;
            let text = match common.format {
                Format::Text => report.to_text(),
                Format::Json => table::json(&report)?,
                Format::Csv => table::render(&report.terms, Format::Csv)?,
            };
            emit(common, &text)?;
            Ok(exit::OK)
        }
        Command::Certify { witness, gap, node_cap, time_limit } => {
            let spec = commands::load_witness(&witness)?;
            let opts = certify::CertifyOptions {
                gap,
                node_cap,
                workers: common.workers,
                seed: common.seed,
                time_limit: time_limit.map(Duration::from_secs),
            };
            let outcome = certify::certify(&spec, &opts)?;
            emit(common, &table::json(&outcome.certificate)?)?;
            eprintln!("{}", outcome.summary());
            if let Some(path) = &outcome.cached {
                eprintln!("cached certified bound in {}", path.display());
            }
            Ok(outcome.exit_code())
        }
        Command::Scan { grid, theta, visibility } => {
            let mut g = scan::ScanGrid::parse(&grid)?;
            if !theta.is_empty() {
                g.thetas = theta.iter().map(|t| commands::parse_angle(t)).collect::<ucw::Result<_>>()?;
            }
            if !visibility.is_empty() {
                g.visibilities = visibility;
            }
            let (bi, bf) = (stored(Which::I)?, stored(Which::F)?);
            let (wi, wf) = (ucw::builtin("I")?, ucw::builtin("F")?);
            let rows = commands::with_workers(common.workers, || scan::scan(&g, &wi, &wf, bi.value, bf.value))?;
            eprintln!("compared against {bi}; {bf}");
            emit(common, &table::render(&rows, common.format)?)?;
            Ok(exit::OK)
        }
        Command::Critvis { witness, bound } => {
            let targets = match witness {
                Some(w) => vec![w],
                None => vec![Which::I, Which::F],
            };
            let mut rows = Vec::new();
            for w in targets {
                let b = bound_for(w.name(), bound)?.unwrap_or(reference_bound(w.name())?);
                rows.extend(critvis::critvis(w, &b)?);
            }
            let text = match common.format {
                Format::Text => {
                    let lines: Vec<String> = rows.iter().map(|r| r.describe()).collect();
                    table::render(&rows, Format::Text)? + &lines.join("\n") + "\n"
                }
                f => table::render(&rows, f)?,
            };
            emit(common, &text)?;
            Ok(exit::OK)
        }
        Command::Subspace { grid, samples } => {
            let (bi, bf) = (stored(Which::I)?, stored(Which::F)?);
            let (wi, wf) = (ucw::builtin("I")?, ucw::builtin("F")?);
            let w = subspace::SubspaceWitnesses {
                i: &wi,
                f: &wf,
                bound_i: bi.value,
                bound_f: bf.value,
            };
            let rows = commands::with_workers(common.workers, || subspace::subspace(&w, grid, samples))?;
            eprintln!("compared against {bi}; {bf}");
            emit(common, &table::render(&rows, common.format)?)?;
            Ok(exit::OK)
        }
        Command::ReproduceAll { witness, skip, gap, time_limit } => {
            let mut opts = reproduce::ReproduceOptions {
                skip,
                ..Default::default()
            };
            if let Some(dir) = witness {
                opts.witness_i = ucw::witness::parse(&std::fs::read_to_string(dir.join("I.witness"))?)?;
                opts.witness_f = ucw::witness::parse(&std::fs::read_to_string(dir.join("F.witness"))?)?;
            }
            opts.bnb.abs_gap = gap;
            opts.bnb.seed = common.seed;
            opts.bnb.workers = common.workers;
            opts.bnb.time_limit = Some(Duration::from_secs(time_limit));
            let report = reproduce::reproduce_all(&opts)?;
            emit(common, &table::render(&report.checks, common.format)?)?;
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CHECK_FAILED as u8)
        }
    }
}
