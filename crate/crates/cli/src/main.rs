use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mper_core::criterion::{theorem1_criterion, torus_corollary, VerdictReport};
use mper_core::fixpoint::{
    certified_fixed_point_count_with, curve_components, delta_level, direction_class,
    fixed_point_squares, refine_fixed_point, BoxStatus, CertifiedBox, GridCell, Refinement,
    DEFAULT_DELTA_LEVEL, DEFAULT_MAX_DEPTH,
};
use mper_core::scalar::{dyadic, parse_rational, rational_to_f64};
use mper_core::scan::{scan, to_csv};
use mper_core::toral::periods_up_to;
use mper_core::torus_loops::{intersect_all, LoopsFile};
use mper_core::{Axis, Error, HomologyMatrix, PolynomialMap2D, Rational, Semantics, Status};

#[derive(Parser)]
#[command(
    name = "mper",
    version,
    about = "Minimal-period criterion for surface map homotopy classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Spectral,
    Strict,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the pair criterion for a homology matrix. Exit 0 if satisfied, 1 if not.
    Analyze {
        /// Rows separated by `;`, entries by `,`, e.g. "2,1;1,1".
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, value_enum, default_value = "spectral")]
        semantics: SemanticsArg,
        #[arg(long)]
        json: bool,
    },
    /// Torus trace/determinant rule next to the pair criterion of the companion matrix.
    Torus {
        #[arg(short = 't', allow_hyphen_values = true)]
        trace: i64,
        #[arg(short = 'd', allow_hyphen_values = true)]
        det: i64,
        #[arg(long)]
        json: bool,
    },
    /// Periodic-point census of the toral map of a 2x2 integer matrix (JSON).
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 30)]
        max_period: u64,
    },
    /// Trace/determinant scan written as CSV.
    Scan {
        /// Inclusive trace range `a:b`.
        #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
        t_range: String,
        /// Inclusive determinant range `a:b`.
        #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
        d_range: String,
        /// Inclusive window `p:q` of primes checked against the census.
        #[arg(long)]
        oracle_primes: Option<String>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed-point squares, refined points and a certified count for a polynomial map (JSON).
    Fixedpoints {
        /// Map JSON file, or the JSON text itself.
        #[arg(long)]
        spec: String,
        /// Grid step, a power of two such as 1/64.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, default_value = "1e-9")]
        tol: String,
        /// Subdivision depth limit for the certified count.
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: u32,
    },
    /// Signed intersection numbers of PL loops on the torus (JSON).
    Intersect {
        /// Loops JSON file, or the JSON text itself.
        #[arg(long)]
        loops: String,
    },
}

type CliResult = std::result::Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Analyze {
            matrix,
            semantics,
            json,
        } => analyze(&matrix, semantics, json),
        Command::Torus { trace, det, json } => torus(trace, det, json),
        Command::Oracle { matrix, max_period } => oracle(&matrix, max_period),
        Command::Scan {
            t_range,
            d_range,
            oracle_primes,
            out,
        } => run_scan(&t_range, &d_range, oracle_primes.as_deref(), out),
        Command::Fixedpoints {
            spec,
            delta,
            tol,
            max_depth,
        } => fixedpoints(&spec, delta.as_deref(), &tol, max_depth),
        Command::Intersect { loops } => intersect(&loops),
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn status_code(s: Status) -> ExitCode {
    match s {
        Status::Satisfied => ExitCode::SUCCESS,
        Status::NotSatisfied => ExitCode::from(1),
    }
}

fn print_json(v: &impl serde::Serialize) -> std::result::Result<(), String> {
    println!("{}", serde_json::to_string(v).map_err(|e| e.to_string())?);
    Ok(())
}

fn analyze(matrix: &str, semantics: SemanticsArg, as_json: bool) -> CliResult {
    let m = HomologyMatrix::parse(matrix).map_err(err)?;
    let semantics = match semantics {
        SemanticsArg::Spectral => Semantics::Spectral,
        SemanticsArg::Strict => Semantics::StrictPairing,
    };
    let v = theorem1_criterion(&m, semantics);
    let report = VerdictReport::new(&m, &v);
    if as_json {
        print_json(&report)?;
    } else {
        let c = v.classification.counts;
        println!("matrix      {} (genus {})", m, report.genus);
        println!("char poly   {}", report.char_poly);
        println!(
            "counts      inside {}, on {}, outside {}",
            c.n_in, c.n_on, c.n_out
        );
        println!("repeated    {}", report.repeated_outside);
        println!("verdict     {} ({})", v.status, witness_name(&report));
    }
    Ok(status_code(v.status))
}

fn witness_name(report: &VerdictReport) -> String {
    serde_json::to_value(report.witness)
        .ok()
        .and_then(|w| w.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn torus(trace: i64, det: i64, as_json: bool) -> CliResult {
    let v = torus_corollary(trace, det);
    let c = v.theorem1.classification.counts;
    if as_json {
        print_json(&json!({
            "t": trace,
            "d": det,
            "corollary": v.status,
            "theorem1": VerdictReport::new(&HomologyMatrix::companion_2x2(trace, det), &v.theorem1),
            "divergence": v.diverges(),
        }))?;
    } else {
        println!("t = {trace}, d = {det}");
        println!("corollary   {}", v.status);
        println!(
            "theorem1    {} (inside {}, on {}, outside {})",
            v.theorem1.status, c.n_in, c.n_on, c.n_out
        );
        if v.diverges() {
            println!("divergence  the two rules disagree");
        }
    }
    Ok(status_code(v.status))
}

fn oracle(matrix: &str, max_period: u64) -> CliResult {
    let m = HomologyMatrix::parse(matrix).map_err(err)?;
    print_json(&periods_up_to(&m, max_period).map_err(err)?)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_range<T: std::str::FromStr>(
    text: &str,
    what: &str,
) -> std::result::Result<RangeInclusive<T>, String> {
    let bad = || format!("{what} must look like a:b, got {text:?}");
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

fn run_scan(t_range: &str, d_range: &str, primes: Option<&str>, out: Option<PathBuf>) -> CliResult {
    let t = parse_range::<i64>(t_range, "--t-range")?;
    let d = parse_range::<i64>(d_range, "--d-range")?;
    let p = primes
        .map(|p| parse_range::<u64>(p, "--oracle-primes"))
        .transpose()?;
    let rows = scan(t, d, p).map_err(err)?;
    let csv = to_csv(&rows);
    match out {
        Some(path) => {
            fs::write(&path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => print!("{csv}"),
    }
    let flagged = rows.iter().filter(|r| r.divergence_flag).count();
    eprintln!("{} rows, {} divergent", rows.len(), flagged);
    Ok(ExitCode::SUCCESS)
}

/// Inline JSON or the contents of a file.
fn json_input(arg: &str) -> std::result::Result<String, String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))
    }
}

fn refinement_json(r: &Refinement) -> std::result::Result<Value, String> {
    let mut v = serde_json::to_value(r).map_err(|e| e.to_string())?;
    v["approx"] = json!([rational_to_f64(&r.point.0), rational_to_f64(&r.point.1)]);
    v["levels"] = json!(r.trail.len() - 1);
    Ok(v)
}

fn fixedpoints(spec: &str, delta: Option<&str>, tol: &str, max_depth: u32) -> CliResult {
    let map: PolynomialMap2D =
        serde_json::from_str(&json_input(spec)?).map_err(|e| format!("bad map spec: {e}"))?;
    let delta = match delta {
        Some(text) => parse_rational(text).map_err(err)?,
        None => dyadic(1, DEFAULT_DELTA_LEVEL),
    };
    let level = delta_level(&delta).map_err(err)?;
    let tol: Rational = parse_rational(tol).map_err(err)?;
    let squares = fixed_point_squares(&map, &delta).map_err(err)?;

    // Refine once per connected cluster of squares, trying its squares in turn.
    let as_boxes: Vec<CertifiedBox> = squares
        .squares
        .iter()
        .map(|s| CertifiedBox {
            cell: s.cell(),
            status: BoxStatus::MayContainZero,
        })
        .collect();
    let mut points = Vec::new();
    if !squares.degenerate {
        for cluster in curve_components(&as_boxes) {
            let found = cluster.boxes.iter().find_map(|b| {
                let GridCell { ix, iy, .. } = b.cell;
                let start = squares.squares.iter().find(|s| s.grid_index == (ix, iy))?;
                refine_fixed_point(&map, start, &tol).ok()
            });
            if let Some(r) = found {
                points.push(refinement_json(&r)?);
            }
        }
    }
    let count = match certified_fixed_point_count_with::<f64>(&map, &tol, max_depth) {
        Ok(c) => serde_json::to_value(&c).map_err(|e| e.to_string())?,
        Err(e) => json!({ "error": e.to_string() }),
    };
    print_json(&json!({
        "delta_level": level,
        "squares": squares,
        "refined": points,
        "direction": {
            "1": direction_class(&map, Axis::X),
            "2": direction_class(&map, Axis::Y),
        },
        "count": count,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn intersect(loops: &str) -> CliResult {
    let file: LoopsFile =
        serde_json::from_str(&json_input(loops)?).map_err(|e| format!("bad loops file: {e}"))?;
    print_json(&intersect_all(&file).map_err(err)?)?;
    Ok(ExitCode::SUCCESS)
}
