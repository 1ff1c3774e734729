//! Command-line front end: evaluates quantities, runs verification suites,
//! tabulates the three-dimensional counterexample and compares quantities.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gsek::{Error, QuadConfig};
use serde_json::{json, Map, Value};

pub mod commands;
pub mod family;
pub mod format;
pub mod report;
pub mod suites;

use commands::{EvalParams, Quantity, COMPARE_NAMES};
use format::fmt_num;
use report::{num, SuiteReport};
use suites::{run_suite, Ctx, Suite};

/// Exit status for malformed arguments or potentials.
pub const EXIT_USAGE: i32 = 64;
/// Exit status when a computation is refused (domain, divergence, ...).
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "gsek", version, about = "Heat-kernel functionals of Schrodinger potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long = "tol-abs", global = true, default_value_t = 1e-9)]
    pub tol_abs: f64,
    #[arg(long = "tol-rel", global = true, default_value_t = 1e-7)]
    pub tol_rel: f64,
    #[arg(long, global = true, env = "GSEK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for suite checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity; omitted points mean the supremum over them.
    Eval {
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[arg(long)]
        potential: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x: Option<Coords>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y: Option<Coords>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: Option<Coords>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        alpha: Option<Coords>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
    },
    /// Run a verification suite over the standard potential family.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Tabulate the d = 3 cylinder counterexample.
    #[command(name = "counterexample-d3")]
    CounterexampleD3 {
        #[arg(long, value_delimiter = ',', default_values_t = [10u32, 100, 1000])]
        n: Vec<u32>,
    },
    /// All six quantities of one potential with their pairwise ratios.
    Compare {
        #[arg(long)]
        potential: String,
        #[arg(long = "T", alias = "t", default_value_t = 1.0)]
        horizon: f64,
    },
}

/// Comma-separated coordinates of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

fn parse_point(s: &str) -> Result<Coords, String> {
    s.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate {c:?}: {e}"))).collect::<Result<_, _>>().map(Coords)
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Usage(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn emit(text: &str, report: Option<&Path>) -> io::Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if let Some(p) = report {
        File::create(p)?.write_all(text.as_bytes())?;
    }
    Ok(())
}

fn render_report(r: &SuiteReport, f: Format) -> String {
    match f {
        Format::Json => r.to_json() + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            r.write_csv(&mut buf).expect("in-memory csv");
            String::from_utf8(buf).expect("utf-8 csv")
        }
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}

fn value_str(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

fn render_map(m: &Map<String, Value>, f: Format) -> String {
    match f {
        Format::Json => serde_json::to_string_pretty(m).expect("json") + "\n",
        Format::Csv => {
            let keys: Vec<String> = m.keys().cloned().collect();
            let vals: Vec<String> = m.values().map(value_str).collect();
            csv_line(&keys) + &csv_line(&vals)
        }
    }
}

/// Parses arguments, runs the verb and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    if !(cli.tol_abs > 0.0 && cli.tol_rel > 0.0) {
        eprintln!("error: tolerances must be positive");
        return EXIT_USAGE;
    }
    let cfg = QuadConfig::with_tol(cli.tol_abs, cli.tol_rel);
    let report = cli.report.as_deref();
    let result = match &cli.command {
        Command::Eval { quantity, potential, t, x, y, z, alpha, lambda, paths, steps } => {
            let v = match potential.as_deref().map(|s| gsek::parse(s, cli.dim)).transpose() {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_for(&e);
                }
            };
            let p = EvalParams {
                t: *t,
                x: x.clone().map(|c| c.0),
                y: y.clone().map(|c| c.0),
                z: z.clone().map(|c| c.0),
                alpha: alpha.clone().map(|c| c.0),
                lambda: *lambda,
                paths: *paths,
                steps: *steps,
                seed: cli.seed,
            };
            commands::eval(*quantity, cli.dim, v.as_ref(), &p, &cfg).map(|mut m| {
                m.insert("quantity".into(), json!(quantity.to_possible_value().expect("named").get_name()));
                m.insert("dim".into(), json!(cli.dim));
                m.insert("potential".into(), json!(potential));
                m.insert("abs_tol".into(), num(cfg.abs_tol));
                m.insert("rel_tol".into(), num(cfg.rel_tol));
                m.insert("seed".into(), json!(cli.seed));
                (render_map(&m, cli.format), 0)
            })
        }
        Command::Verify { suite } => {
            let ctx = Ctx::new(cfg, cli.seed, cli.jobs);
            let r = run_suite(*suite, &ctx);
            Ok((render_report(&r, cli.format), r.exit_code()))
        }
        Command::CounterexampleD3 { n } => {
            if n.iter().any(|&k| k == 0) {
                eprintln!("error: every n must be at least 1");
                return EXIT_USAGE;
            }
            let r = commands::counterexample(n, cli.seed, &cfg);
            Ok((render_report(&r, cli.format), r.exit_code()))
        }
        Command::Compare { potential, horizon } => gsek::parse(potential, cli.dim)
            .and_then(|v| commands::compare(&v, *horizon, &cfg))
            .map(|(q, ratios)| (render_compare(potential, cli.dim, *horizon, &q, &ratios, cli.format), 0)),
    };
    match result {
        Ok((text, code)) => {
            if let Err(e) = emit(&text, report) {
                eprintln!("error: {e}");
                return EXIT_DATA;
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn render_compare(
    dsl: &str,
    dim: usize,
    t: f64,
    q: &[gsek::quantities::SupResult],
    ratios: &[Vec<f64>],
    f: Format,
) -> String {
    match f {
        Format::Json => {
            let mut qs = Map::new();
            for (name, r) in COMPARE_NAMES.iter().zip(q) {
                qs.insert(
                    (*name).into(),
                    json!({"value": num(r.value), "err_bound": num(r.err_bound), "converged": r.converged,
                        "argmax": r.argmax.iter().map(|&v| num(v)).collect::<Vec<_>>()}),
                );
            }
            let mut rs = Map::new();
            for (a, row) in COMPARE_NAMES.iter().zip(ratios) {
                let row: Map<String, Value> = COMPARE_NAMES.iter().zip(row).map(|(b, &v)| ((*b).into(), num(v))).collect();
                rs.insert((*a).into(), row.into());
            }
            let doc = json!({"potential": dsl, "dim": dim, "T": num(t), "e_star_lambda": num(1.0 / t), "quantities": qs, "ratios": rs});
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = csv_line(&["row".into(), "value".into(), "err_bound".into(), "converged".into()]);
            for (name, r) in COMPARE_NAMES.iter().zip(q) {
                out += &csv_line(&[(*name).into(), fmt_num(r.value), fmt_num(r.err_bound), r.converged.to_string()]);
            }
            for (a, row) in COMPARE_NAMES.iter().zip(ratios) {
                for (b, &v) in COMPARE_NAMES.iter().zip(row) {
                    out += &csv_line(&[format!("{a}/{b}"), fmt_num(v), String::new(), String::new()]);
                }
            }
            out
        }
    }
}
