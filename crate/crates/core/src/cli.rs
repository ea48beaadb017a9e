//! `rlink` subcommands. Exit status: 0 success, 1 usage or parse error,
//! 2 inconclusive oracle, 3 internal invariant violation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::census::{build_census, census_expressions, open_pairs, records_csv, CensusError};
use crate::front::build_front;
use crate::gamma::{gamma_expr, orderedness, GammaPair};
use crate::morse::{oracle_run, pairs_csv, MorseError, OracleOptions, DEFAULT_GRID, DEFAULT_TOL};
use crate::notation::{parse_link_expr, parse_link_vector, rational_value, LinkExpr};
use crate::render::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rlink", version, about = "Homology polynomials of Legendrian rational links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form Γ⁻ and Γ⁺.
    Gamma {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Γ⁻ and Γ⁺ counted from the critical points of a front.
    Oracle {
        expr: String,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write the critical-pair table as CSV.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// ORDERED, UNORDERED or UNKNOWN with the reason.
    Ordered {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Rational value p/q of a single vector.
    Rational { vector: String },
    /// Census of vectors up to a weight.
    Census {
        #[arg(long)]
        max_weight: u32,
        #[arg(long)]
        flypes: bool,
        #[arg(long)]
        swaps: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Pairs with equal polynomials, rational value and orbit that no proven move identifies.
    OpenPairs {
        #[arg(long)]
        max_weight: u32,
    },
    /// SVG of the front.
    Render {
        expr: String,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value_t = 800)]
        width: u32,
        /// Also dump the diagram (arcs, cusps, blocks) as JSON.
        #[arg(long)]
        front_json: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

fn internal(message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INTERNAL, message: message.to_string() }
}

fn parse(text: &str) -> Result<LinkExpr, Failure> {
    parse_link_expr(text).map_err(|e| usage(format!("{text:?}: {e}")))
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn gamma_lines(g: &GammaPair) -> String {
    format!("Γ⁻ = {}\nΓ⁺ = {}\n", g.minus, g.plus)
}

fn gamma_json(e: &LinkExpr, g: &GammaPair) -> String {
    let v = json!({ "expr": e, "gamma_minus": g.minus, "gamma_plus": g.plus });
    format!("{}\n", serde_json::to_string(&v).unwrap())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| internal(format!("output: {e}"));
    match cmd {
        Command::Gamma { expr, json } => {
            let e = parse(&expr)?;
            let g = gamma_expr(&e).map_err(internal)?;
            let text = if json { gamma_json(&e, &g) } else { gamma_lines(&g) };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Oracle { expr, grid, tol, pairs, json } => {
            if grid < 16 {
                return Err(usage("--grid must be at least 16"));
            }
            if !(tol > 0.0 && tol < 1e-3) {
                return Err(usage("--tol must lie in (0, 1e-3)"));
            }
            let e = parse(&expr)?;
            let run = oracle_run(&e, &OracleOptions { grid, tol }).map_err(internal)?;
            if let Some(path) = pairs {
                write_file(&path, pairs_csv(&run.pairs).as_bytes())?;
            }
            let g = run.gamma().map_err(|err| match err {
                MorseError::Inconclusive(ladder) => {
                    Failure { code: EXIT_INCONCLUSIVE, message: format!("oracle inconclusive\n{ladder}") }
                }
                other => internal(other),
            })?;
            let text = if json { gamma_json(&e, &g) } else { gamma_lines(&g) };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Ordered { expr, json } => {
            let e = parse(&expr)?;
            let v = orderedness(&e).map_err(internal)?;
            let text = if json {
                format!("{}\n", serde_json::to_string(&json!({ "expr": e, "status": v.status, "reason": v.reason })).unwrap())
            } else {
                format!("{v}\n")
            };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Rational { vector } => {
            let v = parse_link_vector(&vector).map_err(|e| usage(format!("{vector:?}: {e}")))?;
            writeln!(out, "{}", rational_value(&v)).map_err(io)?;
        }
        Command::Census { max_weight, flypes, swaps, out: path, csv } => {
            if max_weight < 2 {
                return Err(usage("--max-weight must be at least 2"));
            }
            let records = build_census(&census_expressions(max_weight, flypes, swaps)).map_err(census_failure)?;
            let body = if csv {
                records_csv(&records)
            } else {
                format!("{}\n", serde_json::to_string_pretty(&records).unwrap())
            };
            write_file(&path, body.as_bytes())?;
            let classes = records.iter().map(|r| r.class + 1).max().unwrap_or(0);
            writeln!(out, "{} records, {} classes", records.len(), classes).map_err(io)?;
        }
        Command::OpenPairs { max_weight } => {
            if max_weight < 2 {
                return Err(usage("--max-weight must be at least 2"));
            }
            let records = build_census(&census_expressions(max_weight, true, true)).map_err(census_failure)?;
            for (a, b) in open_pairs(&records) {
                writeln!(out, "{a}\t{b}").map_err(io)?;
            }
        }
        Command::Render { expr, svg, width, front_json } => {
            let e = parse(&expr)?;
            let d = build_front(&e).map_err(internal)?;
            write_file(&svg, render_svg(&d, width, None).as_bytes())?;
            if let Some(path) = front_json {
                write_file(&path, format!("{}\n", serde_json::to_string_pretty(&d).unwrap()).as_bytes())?;
            }
        }
    }
    Ok(())
}

fn census_failure(e: CensusError) -> Failure {
    match e {
        CensusError::Size(_) | CensusError::NotStandard(_) => usage(e),
        CensusError::Gamma(_) => internal(e),
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "rlink: {}", f.message);
            f.code
        }
    }
}
