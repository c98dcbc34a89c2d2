//! `nuctrace <kind> --config PATH --out DIR [--seed INT] [--tolerance-scale FLOAT]`
//!
//! Exit status: 0 when every assertion passes, 1 on a tolerance failure (the
//! report names the violated assertions), 2 on usage or config errors (no
//! report is written).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nuclear_trace::experiment::{self, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "nuctrace", version, about = "Run a verification experiment from a JSON config")]
struct Cli {
    #[command(subcommand)]
    kind: Kind,
}

#[derive(Subcommand)]
enum Kind {
    /// Weighted mixed Lebesgue norm of a sampled function.
    Norm(RunArgs),
    /// Luxemburg norm in a variable exponent space.
    Luxemburg(RunArgs),
    /// Fourier-swap and Moyal identities of the short-time Fourier transform.
    StftCheck(RunArgs),
    /// Conditional expectations on box partitions as contractions.
    MapDemo(RunArgs),
    /// Trace of finite nuclear representations by pairing and by eigenvalues.
    NuclearTrace(RunArgs),
    /// Trace formula for α(x)σ(D) on the torus.
    TorusVerify(RunArgs),
    /// Trace formula and nuclearity sums for the harmonic oscillator.
    HermiteVerify(RunArgs),
    /// Quasinorm ledger of Bessel potentials across cutoffs.
    NuclearityLedger(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let (kind, args) = match &cli.kind {
        Kind::Norm(a) => ("norm", a),
        Kind::Luxemburg(a) => ("luxemburg", a),
        Kind::StftCheck(a) => ("stft-check", a),
        Kind::MapDemo(a) => ("map-demo", a),
        Kind::NuclearTrace(a) => ("nuclear-trace", a),
        Kind::TorusVerify(a) => ("torus-verify", a),
        Kind::HermiteVerify(a) => ("hermite-verify", a),
        Kind::NuclearityLedger(a) => ("nuclearity-ledger", a),
    };
    match experiment::run_file(kind, &args.config, &args.out, args.seed, args.tolerance_scale) {
        Ok(code) => {
            if code != 0 {
                eprintln!("tolerance failure; see {}", args.out.join("report.json").display());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
