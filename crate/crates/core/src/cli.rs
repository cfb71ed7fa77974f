//! Command dispatch behind the `holoprop` binary.
//!
//! Exit codes: 0 on success, 1 for malformed input or invalid models, 2 for
//! numerical failures (including BP that stops short of its tolerance).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bp::{run_bp, BpConfig, Schedule};
use crate::error::{Error, Result};
use crate::format::{parse_gauge_str, parse_model_file, to_json, ModelFile};
use crate::holographic::{apply_gauge, random_gauge};
use crate::loopcalc::{loop_series, LoopSeries};
use crate::model::{exact_value, from_factor_graph, BipartiteModel};
use crate::quantum::{build_mbqc_model, statevector_probability};

#[derive(Debug, Parser)]
#[command(name = "holoprop", about = "Partition functions of bipartite tensor models", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Synchronous,
    Sequential,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact value by tensor contraction.
    Exact { file: PathBuf },
    /// Belief propagation and the Bethe approximation.
    Bp {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0.0)]
        damping: f64,
        #[arg(long, value_enum, default_value = "synchronous")]
        schedule: ScheduleArg,
    },
    /// Loop series around the BP fixed point.
    Loop {
        file: PathBuf,
        /// Largest support size to enumerate; defaults to every edge.
        #[arg(long)]
        max_support: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Value before and after a gauge transformation.
    Holant {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gauge file overriding the random gauge.
        #[arg(long)]
        gauge: Option<PathBuf>,
    },
    /// Graph-state model value against the state-vector probability.
    Mbqc { file: PathBuf },
    /// Canonical bipartite JSON for any model file.
    Convert { file: PathBuf },
}

/// `%.15g`-style formatting.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn to_bipartite(file: ModelFile) -> Result<BipartiteModel> {
    match file {
        ModelFile::Bipartite(m) => Ok(m),
        ModelFile::FactorGraph(fg) => from_factor_graph(&fg),
        ModelFile::GraphState(g) => build_mbqc_model(&g),
    }
}

fn load(path: &Path) -> Result<BipartiteModel> {
    to_bipartite(parse_model_file(path)?)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Exact { file } => {
            let m = load(&file)?;
            writeln!(out, "{}", fmt_num(exact_value(&m)?)).map_err(io)?;
            Ok(0)
        }
        Command::Bp { file, max_iters, tol, damping, schedule } => {
            let m = load(&file)?;
            let cfg = BpConfig {
                max_iterations: max_iters,
                tolerance: tol,
                damping,
                schedule: match schedule {
                    ScheduleArg::Synchronous => Schedule::Synchronous,
                    ScheduleArg::Sequential => Schedule::Sequential,
                },
            };
            let r = run_bp(&m, &cfg)?;
            writeln!(out, "converged {}", r.converged).map_err(io)?;
            writeln!(out, "iterations {}", r.iterations).map_err(io)?;
            writeln!(out, "residual {}", fmt_num(r.residual)).map_err(io)?;
            writeln!(out, "bethe {}", fmt_num(r.bethe)).map_err(io)?;
            for e in 0..m.edges().len() {
                writeln!(out, "message {} v->w {}", m.edge_label(e), fmt_vec(&r.messages.to_right[e])).map_err(io)?;
                writeln!(out, "message {} w->v {}", m.edge_label(e), fmt_vec(&r.messages.to_left[e])).map_err(io)?;
            }
            if r.converged {
                Ok(0)
            } else {
                Err(Error::NotConverged { iterations: r.iterations, residual: r.residual })
            }
        }
        Command::Loop { file, max_support, json } => {
            let m = load(&file)?;
            let fp = run_bp(&m, &BpConfig::default())?;
            if !fp.converged {
                return Err(Error::NotConverged { iterations: fp.iterations, residual: fp.residual });
            }
            let k = max_support.unwrap_or(m.edges().len());
            let series = loop_series(&m, &fp, k)?;
            if json {
                writeln!(out, "{}", loop_json(&m, &series)).map_err(io)?;
            } else {
                writeln!(out, "bethe {}", fmt_num(series.bethe)).map_err(io)?;
                writeln!(out, "max_support {}", series.max_support).map_err(io)?;
                writeln!(out, "exhaustive {}", series.is_exhaustive).map_err(io)?;
                writeln!(out, "terms {}", series.terms.len()).map_err(io)?;
                for (support, weight, cumulative) in support_rows(&series) {
                    writeln!(
                        out,
                        "support {} weight {} cumulative {}",
                        support_label(&m, &support),
                        fmt_num(weight),
                        fmt_num(cumulative)
                    )
                    .map_err(io)?;
                }
                writeln!(out, "nonloop_terms {}", series.nonloop_terms).map_err(io)?;
                writeln!(out, "max_nonloop_weight {}", fmt_num(series.max_nonloop_weight)).map_err(io)?;
                writeln!(out, "partial_sum {}", fmt_num(series.partial_sum)).map_err(io)?;
            }
            Ok(0)
        }
        Command::Holant { file, seed, gauge } => {
            let m = load(&file)?;
            let g = match gauge {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| Error::Format(format!("cannot read {}: {e}", p.display())))?;
                    parse_gauge_str(&text, &m)?
                }
                None => random_gauge(&m, seed),
            };
            let original = exact_value(&m)?;
            let gauged = exact_value(&apply_gauge(&m, &g)?)?;
            writeln!(out, "original {}", fmt_num(original)).map_err(io)?;
            writeln!(out, "gauged {}", fmt_num(gauged)).map_err(io)?;
            writeln!(out, "relative_gap {}", fmt_num(relative_gap(original, gauged))).map_err(io)?;
            Ok(0)
        }
        Command::Mbqc { file } => {
            let ModelFile::GraphState(spec) = parse_model_file(&file)? else {
                return Err(Error::Format("mbqc expects a graph_state file".into()));
            };
            let model = exact_value(&build_mbqc_model(&spec)?)?;
            let oracle = statevector_probability(&spec)?;
            writeln!(out, "model {}", fmt_num(model)).map_err(io)?;
            writeln!(out, "statevector {}", fmt_num(oracle)).map_err(io)?;
            writeln!(out, "relative_gap {}", fmt_num(relative_gap(model, oracle))).map_err(io)?;
            Ok(0)
        }
        Command::Convert { file } => {
            let m = load(&file)?;
            writeln!(out, "{}", to_json(&ModelFile::Bipartite(m))).map_err(io)?;
            Ok(0)
        }
    }
}

/// Per-support weight sums with the running value `bethe · (1 + Σ)`.
fn support_rows(s: &LoopSeries) -> Vec<(Vec<usize>, f64, f64)> {
    let mut cumulative = s.bethe;
    s.support_weights()
        .into_iter()
        .map(|(support, w)| {
            cumulative += s.bethe * w;
            (support, w, cumulative)
        })
        .collect()
}

fn support_label(m: &BipartiteModel, support: &[usize]) -> String {
    let labels: Vec<String> = support.iter().map(|&e| m.edge_label(e)).collect();
    labels.join(",")
}

#[derive(Serialize)]
struct TermJson {
    support: Vec<String>,
    assignment: Vec<usize>,
    weight: f64,
    cumulative: f64,
}

#[derive(Serialize)]
struct SupportJson {
    support: Vec<String>,
    weight: f64,
    cumulative: f64,
}

#[derive(Serialize)]
struct LoopJson {
    bethe: f64,
    max_support: usize,
    exhaustive: bool,
    supports: Vec<SupportJson>,
    terms: Vec<TermJson>,
    nonloop_terms: usize,
    max_nonloop_weight: f64,
    partial_sum: f64,
}

fn loop_json(m: &BipartiteModel, s: &LoopSeries) -> String {
    let mut cumulative = s.bethe;
    let terms = s
        .terms
        .iter()
        .map(|t| {
            cumulative += s.bethe * t.weight;
            TermJson {
                support: t.support.iter().map(|&e| m.edge_label(e)).collect(),
                assignment: t.assignment.clone(),
                weight: t.weight,
                cumulative,
            }
        })
        .collect();
    let supports = support_rows(s)
        .into_iter()
        .map(|(support, weight, cumulative)| SupportJson {
            support: support.iter().map(|&e| m.edge_label(e)).collect(),
            weight,
            cumulative,
        })
        .collect();
    let doc = LoopJson {
        bethe: s.bethe,
        max_support: s.max_support,
        exhaustive: s.is_exhaustive,
        supports,
        terms,
        nonloop_terms: s.nonloop_terms,
        max_nonloop_weight: s.max_nonloop_weight,
        partial_sum: s.partial_sum,
    };
    serde_json::to_string_pretty(&doc).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(11.0), "11");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_num(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt_num(1.234e20), "1.234e+20");
        assert_eq!(fmt_num(123456789012345.0), "123456789012345");
        assert_eq!(fmt_num(1e15), "1e+15");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["holoprop", "frobnicate"], &mut o, &mut e), 1);
        assert_eq!(run(["holoprop", "--help"], &mut o, &mut e), 0);
        assert!(String::from_utf8(o).unwrap().contains("exact"));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["holoprop", "exact", "/nonexistent/model.json"], &mut o, &mut e), 1);
        assert!(String::from_utf8(e).unwrap().contains("cannot read"));
    }
}
