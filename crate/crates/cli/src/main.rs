//! `qr`: command-line access to necklace brackets, star products, trace maps
//! and the verification suite.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 invalid input or
//! usage, 3 dimension vector mismatch, 4 resource limit.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use quiver_quant::expr::{parse_height, parse_necklace};
use quiver_quant::necklace::{bracket_with, ClassicalIdeal};
use quiver_quant::schedler::{Schedler, SkeinConvention};
use quiver_quant::trace::TraceContext;
use quiver_quant::verify::{self, CalibrationOptions, Face, Verifier, VerifyConfig};
use quiver_quant::{DimVector, Error, Quiver};

#[derive(Parser)]
#[command(name = "qr", version, about = "Quantized necklace algebras and their trace maps")]
struct Cli {
    /// Built-in quiver (`jordan`, `a2`) or path to a quiver file.
    #[arg(long, global = true, default_value = "jordan")]
    quiver: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Necklace Lie bracket of two necklace sums.
    Bracket {
        x: String,
        y: String,
        /// Value of pair(a, a*); pair(a*, a) is its negative.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i64,
    },
    /// Star product of two height sums, in PBW normal form.
    Star { x: String, y: String },
    /// `x * y - y * x` for two height sums.
    Commutator { x: String, y: String },
    /// Classical trace of a necklace sum.
    Trace {
        #[command(flatten)]
        dim: DimArg,
        x: String,
    },
    /// Quantum trace of a height sum.
    Qtrace {
        #[command(flatten)]
        dim: DimArg,
        x: String,
    },
    /// Canonical representative modulo the preprojective ideal.
    ReduceClassical {
        #[arg(long, default_value_t = 4)]
        maxdeg: usize,
        x: String,
    },
    /// Test all eight skein conventions and report the admissible one.
    Calibrate {
        #[command(flatten)]
        dim: DimArg,
        /// Letter budget for enumerated skein relations.
        #[arg(long, default_value_t = 6)]
        max_letters: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check the faces of the compatibility diagram.
    Verify {
        #[command(flatten)]
        dim: DimArg,
        #[arg(long, default_value_t = 4)]
        maxdeg: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Restrict to these faces (repeatable).
        #[arg(long = "face")]
        faces: Vec<Face>,
    },
}

#[derive(Args)]
struct DimArg {
    /// Dimension vector, e.g. `2` or `1,1`.
    #[arg(long)]
    dim: DimVector,
}

fn load_quiver(name: &str) -> Result<Quiver> {
    let base = match Quiver::builtin(name) {
        Some(q) => q,
        None => {
            let text = std::fs::read_to_string(name).with_context(|| format!("reading quiver file `{name}`"))?;
            Quiver::from_definition(&text)?
        }
    };
    Ok(if base.is_doubled() { base } else { base.double()? })
}

/// Successful runs return whether every requested check passed.
fn run(cli: Cli) -> Result<bool> {
    let q = load_quiver(&cli.quiver)?;
    let conv = SkeinConvention::default();
    match cli.command {
        Command::Bracket { x, y, sign } => {
            let r = bracket_with(&q, &parse_necklace(&x, &q)?, &parse_necklace(&y, &q)?, sign)?;
            println!("{}", r.display(&q));
        }
        Command::Star { x, y } => {
            let alg = Schedler::new(&q, conv)?;
            let r = alg.star(&parse_height(&x, &q, Some(&alg))?, &parse_height(&y, &q, Some(&alg))?);
            println!("{}", r.display(&q));
        }
        Command::Commutator { x, y } => {
            let alg = Schedler::new(&q, conv)?;
            let r = alg.commutator(&parse_height(&x, &q, Some(&alg))?, &parse_height(&y, &q, Some(&alg))?);
            println!("{}", r.display(&q));
        }
        Command::Trace { dim, x } => {
            let ctx = TraceContext::new(&q, &dim.dim, conv.order)?;
            let p = ctx.classical_trace(&parse_necklace(&x, &q)?)?;
            println!("{}", ctx.space().display_poly(&p));
        }
        Command::Qtrace { dim, x } => {
            let alg = Schedler::new(&q, conv)?;
            let ctx = TraceContext::new(&q, &dim.dim, conv.order)?;
            let w = ctx.quantum_trace(&parse_height(&x, &q, Some(&alg))?)?;
            println!("{}", ctx.space().display_weyl(&w));
        }
        Command::ReduceClassical { maxdeg, x } => {
            let ideal = ClassicalIdeal::preprojective(&q, None, maxdeg)?;
            println!("{}", ideal.reduce(&parse_necklace(&x, &q)?)?.display(&q));
        }
        Command::Calibrate { dim, max_letters, json } => {
            let opts = CalibrationOptions { max_letters, ..CalibrationOptions::default() };
            let outcomes = verify::evaluate(&q, &dim.dim, opts)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&outcomes)?);
            } else {
                for o in &outcomes {
                    let verdict = if o.passed() { "pass" } else { "fail" };
                    println!("{verdict}  {}", o.convention);
                    if let Some(w) = &o.witness {
                        println!("      {w}");
                    }
                }
            }
            let passing = outcomes.iter().filter(|o| o.passed()).count();
            if passing != 1 {
                eprintln!("error: {passing} settings pass; expected exactly one");
                return Ok(false);
            }
        }
        Command::Verify { dim, maxdeg, seed, report, faces } => {
            let cfg = VerifyConfig { maxdeg, seed, convention: conv, ..VerifyConfig::default() };
            let (full, times) = if faces.is_empty() {
                verify::verify(&q, &dim.dim, cfg)?
            } else {
                let v = Verifier::new(&q, &dim.dim, cfg)?;
                let mut records = Vec::new();
                let mut times = Vec::new();
                for f in faces {
                    let start = std::time::Instant::now();
                    records.push(v.run(f)?);
                    times.push(start.elapsed());
                }
                let r = verify::VerificationReport {
                    schema_version: verify::SCHEMA_VERSION,
                    quiver: q.name().to_string(),
                    dim: dim.dim.0.clone(),
                    maxdeg,
                    seed,
                    convention: conv,
                    faces: records,
                };
                (r, times)
            };
            print!("{}", full.summary(Some(&times)));
            if let Some(path) = report {
                std::fs::write(&path, full.to_json()).with_context(|| format!("writing `{}`", path.display()))?;
            }
            return Ok(full.passed());
        }
    }
    Ok(true)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::DimensionMismatch { .. }) => 3,
        Some(Error::ResourceLimit(_) | Error::DegreeOverflow { .. }) => 4,
        Some(Error::Calibration(_)) => 1,
        _ => 2,
    }
}

/// Accept `quiver=NAME` as a positional spelling of `--quiver NAME`.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    for a in args {
        match a.strip_prefix("quiver=") {
            Some(v) => {
                out.push("--quiver".to_string());
                out.push(v.to_string());
            }
            None => out.push(a),
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize_args(std::env::args()));
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
