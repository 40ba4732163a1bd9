//! `undertone`: batch front end for the sieve, the sub-sequence atlas and the zeta tools.
//!
//! Every run writes its CSV/SVG artifacts plus `summary.json` into the output
//! directory (`--out`, else `$UNDERTONE_OUT`, else `./undertone-out`).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use undertone::atlas::{build_derivation_graph, coverage_check, emit_table, TableKind, TableParams};
use undertone::emit;
use undertone::sieve::DEFAULT_SEGMENT_SIZE;
use undertone::xray::{render_strips, xray_report_with, XrayOptions};
use undertone::zeta::{argand_path, find_zeros, phase_trace};
use undertone::{Error, SeqId, Sieve};

const OUT_ENV: &str = "UNDERTONE_OUT";
const DEFAULT_OUT: &str = "undertone-out";

#[derive(Parser, Debug, Serialize)]
#[command(name = "undertone", version, about = "Wheel sieve, sub-sequence atlas and zeta level-curve reports")]
struct Cli {
    /// Output directory [default: $UNDERTONE_OUT or ./undertone-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Artifact formats to write besides summary.json
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,svg")]
    emit: Vec<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Svg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
enum Command {
    /// Primes (and composite marks up to 10^6) from the segmented wave sieve
    Sieve(SieveArgs),
    /// Derivation graph of a host sequence, optionally one of the periodic tables
    Atlas(AtlasArgs),
    /// Level-curve x-ray of ζ with line numbering and landmark comparison
    Xray(XrayArgs),
    /// Argand diagram of ζ(σ + it) with its passes by the origin
    Argand(TraceArgs),
    /// Unwrapped phase of ζ(σ + it) with π-jumps flagged
    Phase(TraceArgs),
    /// Zeros on the critical line from sign changes of Hardy's Z
    Zeros(ZerosArgs),
}

#[derive(Args, Debug, Serialize)]
struct SieveArgs {
    #[arg(long, value_parser = positive_u64)]
    limit: u64,
    /// Wheel positions per residue class in one segment
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SIZE, value_parser = positive_usize)]
    segment_size: usize,
}

#[derive(Args, Debug, Serialize)]
struct AtlasArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    host: u8,
    /// Largest member value in the graph; largest running entry in the table
    #[arg(long, value_parser = positive_u64)]
    limit: u64,
    #[arg(long, value_parser = ["1", "3", "4", "5", "7"])]
    table: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct XrayArgs {
    #[arg(long, value_parser = positive_f64)]
    t_max: f64,
    /// Reference line and escape threshold
    #[arg(long, default_value = "-1:2", allow_hyphen_values = true)]
    sigma: Span,
    /// Grid density multiplier over Δσ = 0.01, Δt = 0.005
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    resolution: f64,
}

#[derive(Args, Debug, Serialize)]
struct TraceArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = finite_f64)]
    sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    t: Span,
    #[arg(long, value_parser = positive_f64)]
    step: f64,
}

#[derive(Args, Debug, Serialize)]
struct ZerosArgs {
    #[arg(long, allow_hyphen_values = true)]
    t: Span,
}

/// A non-empty interval `A:B`.
#[derive(Clone, Copy, Debug, Serialize)]
struct Span {
    lo: f64,
    hi: f64,
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got {s:?}"))?;
        let lo = finite_f64(a)?;
        let hi = finite_f64(b)?;
        if lo >= hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Span { lo, hi })
    }
}

fn finite_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("not a finite number: {s:?}")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x = finite_f64(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive, got {s}"))
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    match s.trim().parse::<u64>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    positive_u64(s).map(|n| n as usize)
}

enum Failure {
    Domain(Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

struct Output {
    dir: PathBuf,
    formats: Vec<Format>,
    written: Vec<String>,
}

impl Output {
    fn write(&mut self, name: &str, format: Format, content: &str) -> Result<(), Failure> {
        if !self.formats.contains(&format) {
            return Ok(());
        }
        self.put(name, content)
    }

    fn put(&mut self, name: &str, content: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|e| Failure::Io(path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn run(cli: &Cli, out: &mut Output) -> Result<Value, Failure> {
    match &cli.command {
        Command::Sieve(a) => {
            let r = Sieve::new().segment_size(a.segment_size).run(a.limit)?;
            out.write("primes.csv", Format::Csv, &emit::primes_csv(&r.primes))?;
            if let Some(marks) = &r.marks {
                out.write("marks.csv", Format::Csv, &emit::marks_csv(marks.all()))?;
            }
            Ok(json!({
                "prime_count": r.primes.len(),
                "wheel_positions": r.stats.wheel_positions,
                "composites": r.stats.composites,
                "segments": r.stats.segments,
                "sieve_seconds": r.elapsed.as_secs_f64(),
            }))
        }
        Command::Atlas(a) => {
            let host = SeqId::from_number(a.host).expect("host validated by the parser");
            let graph = build_derivation_graph(host, a.limit)?;
            out.write("graph.csv", Format::Csv, &emit::graph_csv(&graph))?;
            let coverage = coverage_check(host, a.limit)?;
            let mut summary = json!({
                "nodes": graph.nodes.len(),
                "edges": graph.edges.len(),
                "coverage_holds": coverage.holds(),
                "composites": coverage.composites,
                "uncovered": coverage.uncovered.len(),
            });
            if let Some(t) = &a.table {
                let kind: TableKind = t.parse()?;
                let params = TableParams { max_entry: a.limit, host, ..TableParams::default() };
                let table = emit_table(kind, params)?;
                out.write(&format!("{kind}.csv"), Format::Csv, &emit::table_csv(&table))?;
                summary["table_rows"] = json!(table.rows.len());
            }
            Ok(summary)
        }
        Command::Xray(a) => {
            let mut options = XrayOptions::new(a.t_max).with_density(a.resolution);
            options.reference_sigma = a.sigma.lo;
            options.sigma_right = a.sigma.hi;
            let report = xray_report_with(options)?;
            out.write("lines.csv", Format::Csv, &emit::lines_csv(&report.numbering))?;
            out.write("xray.svg", Format::Svg, &render_strips(&report, a.sigma.lo, a.sigma.hi))?;
            let landmarks: Vec<Value> = report
                .landmarks
                .iter()
                .map(|l| json!({"id": l.id, "pass": l.pass, "description": l.description, "detail": l.detail}))
                .collect();
            Ok(json!({
                "lines": report.numbering.lines.len(),
                "escaping_labels": report.escaping_labels(),
                "parity_violations": report.numbering.parity_violations,
                "gaps": report.gaps.len(),
                "zeros": report.zeros.len(),
                "landmarks": landmarks,
                "note": report.note,
            }))
        }
        Command::Argand(a) => {
            let path = argand_path(a.sigma, a.t.lo, a.t.hi, a.step)?;
            out.write("argand.csv", Format::Csv, &emit::argand_csv(&path))?;
            out.write("argand.svg", Format::Svg, &emit::argand_svg(&path))?;
            let approaches: Vec<Value> =
                path.approaches.iter().map(|p| json!({"t": p.t, "modulus": p.modulus})).collect();
            Ok(json!({"samples": path.points.len(), "origin_approaches": approaches}))
        }
        Command::Phase(a) => {
            let trace = phase_trace(a.sigma, a.t.lo, a.t.hi, a.step)?;
            out.write("phase.csv", Format::Csv, &emit::phase_csv(&trace))?;
            out.write("phase.svg", Format::Svg, &emit::phase_svg(&trace))?;
            Ok(json!({"samples": trace.samples.len(), "jumps": trace.jumps}))
        }
        Command::Zeros(a) => {
            let zeros = find_zeros(a.t.lo, a.t.hi)?;
            out.write("zeros.csv", Format::Csv, &emit::zeros_csv(&zeros))?;
            Ok(json!({"count": zeros.len(), "step": zeros.step, "heights": zeros.heights()}))
        }
    }
}

fn output_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn prepare(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = Output { dir: output_dir(&cli), formats: cli.emit.clone(), written: Vec::new() };
    let start = Instant::now();
    let result = prepare(&out.dir).and_then(|()| run(&cli, &mut out));
    let elapsed = start.elapsed().as_secs_f64();
    let (status, results, code) = match result {
        Ok(v) => ("ok", v, 0),
        Err(e) => {
            eprintln!("undertone: {e}");
            ("error", json!({"error": e.to_string()}), 1)
        }
    };
    let mut outputs = out.written.clone();
    outputs.push("summary.json".into());
    let summary = json!({
        "status": status,
        "input": &cli,
        "output_dir": out.dir,
        "outputs": outputs,
        "versions": {
            "undertone-cli": env!("CARGO_PKG_VERSION"),
            "undertone-core": undertone::VERSION,
        },
        "timings": {"total_seconds": elapsed},
        "results": results,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    if out.dir.is_dir() {
        if let Err(e) = out.put("summary.json", &text) {
            eprintln!("undertone: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
