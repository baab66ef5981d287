//! `permfree`: exact counting, trace moments, and asymptotic
//! diagnostics for random permutation matrices with restricted cycle
//! lengths.
//!
//! Machine-readable output (JSON lines or CSV) goes to stdout;
//! diagnostics go to stderr. Exit codes: 0 success/PASS, 1
//! verification FAIL, 2 usage error, 3 budget or infeasibility error.

mod output;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use output::{verdict, Cell, Format, RowWriter};
use permfree::asympt::{
    counterexample_sequence, cycle_probability_trend, graph_probability_trend,
    hayman_ratio_check, hildebrand_limit, multiples_closed_form, AsymptoticReport,
};
use permfree::cyclecount::egf_crosscheck;
use permfree::numeric::rational_to_f64;
use permfree::trace::TraceMethod;
use permfree::words::{haar_moment, normal_form};
use permfree::{
    BigRational, ColoredGraph, CountTable, CycleSet, Engine, Error, Model, Signature, Word,
};

const USAGE_ERROR: u8 = 2;
const INFEASIBLE_ERROR: u8 = 3;

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            code: USAGE_ERROR,
        }
    }

    fn infeasible(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            code: INFEASIBLE_ERROR,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> CliError {
        let code = match err {
            Error::BudgetExceeded { .. }
            | Error::EmptyPermutationSet { .. }
            | Error::TableTooSmall { .. }
            | Error::VertexBoundExceeded { .. } => INFEASIBLE_ERROR,
            _ => USAGE_ERROR,
        };
        CliError {
            message: err.to_string(),
            code,
        }
    }
}

#[derive(Parser)]
#[command(name = "permfree", version, about)]
struct Cli {
    /// Output format for machine-readable rows.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (results are deterministic regardless).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Work budget for brute-force tuple spaces.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u128,
    /// Vertex cap for congruence enumeration.
    #[arg(long, global = true, default_value_t = 14)]
    max_vertices: usize,
    /// Points kept when expanding a `lo..hi` grid.
    #[arg(long, global = true, default_value_t = 10)]
    grid_points: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a_N = |S_N^(A)| and the densities t_N = a_N/N!.
    Count {
        /// Cycle set: `all`, `finite:1,3`, `cofinite:1`, `multiples:3`.
        #[arg(long)]
        set: String,
        /// Largest N.
        #[arg(long)]
        n: usize,
        /// Cross-check against the exponential generating function.
        #[arg(long)]
        egf_check: bool,
    },
    /// Normal form, identity test, and limiting moment of a word.
    Wordcheck {
        /// Generator orders, e.g. `2,inf,3`.
        #[arg(long)]
        sig: String,
        /// Word, e.g. `g1 g2* g1*`.
        #[arg(long)]
        word: String,
    },
    /// Strong congruences of the word-graph with unit loop-characteristic.
    Scon {
        #[arg(long)]
        sig: String,
        #[arg(long)]
        word: String,
        /// Cross-check the count against the limiting moment.
        #[arg(long)]
        verify: bool,
    },
    /// Expected products of normalized traces.
    Trace {
        /// Evaluation method.
        #[arg(value_enum)]
        method: MethodArg,
        /// Generator orders; inferred from the sets when omitted.
        #[arg(long)]
        sig: Option<String>,
        /// Cycle sets, one per generator, `;`-separated
        /// (plain `,` also works when no set contains `:`).
        #[arg(long)]
        sets: String,
        /// Words, `;`-separated.
        #[arg(long)]
        words: String,
        /// Single matrix size.
        #[arg(long, conflicts_with = "grid")]
        n: Option<u64>,
        /// Grid of sizes: `50,100,200` or `40..400`.
        #[arg(long)]
        grid: Option<String>,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Monte Carlo seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run all applicable methods and require agreement.
        #[arg(long)]
        compare: bool,
    },
    /// Compare exact expectations with the limiting *-free moments.
    Verify {
        #[arg(long)]
        sig: Option<String>,
        #[arg(long)]
        sets: String,
        /// Largest word length.
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        grid: String,
        /// Envelope constant C in |E - phi| <= C/N.
        #[arg(long, default_value_t = 2.0)]
        tolerance: f64,
    },
    /// Asymptotic-law diagnostics.
    #[command(subcommand)]
    Asympt(AsymptCommand),
}

#[derive(Subcommand)]
enum AsymptCommand {
    /// Cycle probability p_N(k) against N^(k/d - 1).
    Limpnk {
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Graph-compatibility probability against its power law.
    Limpng {
        #[arg(long)]
        set: String,
        /// Path to a graph file (`-` for stdin): a vertex-list line,
        /// then `from to color` lines.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Coefficient-ratio law for a finite set.
    Hayman {
        #[arg(long)]
        set: String,
        #[arg(long)]
        grid: String,
    },
    /// Limiting density for a cofinite set.
    Hildebrand {
        #[arg(long)]
        set: String,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Closed form for multiples-of-D sets, plus the DN*p trend.
    Multiples {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: usize,
    },
    /// Greedy construction of a set violating the 1/N law.
    Counterexample {
        #[arg(long, default_value_t = 2)]
        stages: usize,
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Brute,
    Mc,
}

enum GridSpec {
    Explicit(Vec<u64>),
    Range(u64, u64),
}

fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("invalid grid: {text}")))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("invalid grid: {text}")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::usage(format!("invalid grid: {text}")));
        }
        Ok(GridSpec::Range(lo, hi))
    } else {
        let values: Result<Vec<u64>, _> =
            text.split(',').map(|t| t.trim().parse::<u64>()).collect();
        let values = values.map_err(|_| CliError::usage(format!("invalid grid: {text}")))?;
        if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::usage(
                "grid must be non-empty and strictly increasing",
            ));
        }
        Ok(GridSpec::Explicit(values))
    }
}

fn thin(all: Vec<u64>, points: usize) -> Vec<u64> {
    if all.len() <= points || points == 0 {
        return all;
    }
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        out.push(all[i * (all.len() - 1) / (points - 1).max(1)]);
    }
    out.dedup();
    out
}

/// Expand a grid spec against a per-size feasibility test.
fn resolve_grid(
    spec: GridSpec,
    feasible: impl Fn(u64) -> bool,
    points: usize,
) -> Result<Vec<u64>, CliError> {
    let grid = match spec {
        GridSpec::Explicit(values) => {
            if let Some(&bad) = values.iter().find(|&&n| !feasible(n)) {
                return Err(CliError::infeasible(format!(
                    "grid point {bad} is infeasible for the given set(s)"
                )));
            }
            values
        }
        GridSpec::Range(lo, hi) => thin((lo..=hi).filter(|&n| feasible(n)).collect(), points),
    };
    if grid.is_empty() {
        return Err(CliError::infeasible("no feasible sizes in the grid"));
    }
    Ok(grid)
}

fn parse_sets(text: &str) -> Result<Vec<CycleSet>, CliError> {
    let parts: Vec<&str> = if text.contains(';') {
        text.split(';').collect()
    } else if text.contains(':') {
        vec![text]
    } else {
        text.split(',').collect()
    };
    parts
        .into_iter()
        .map(|p| CycleSet::parse(p).map_err(CliError::from))
        .collect()
}

fn parse_words(text: &str) -> Result<Vec<Word>, CliError> {
    text.split(';')
        .map(|p| Word::parse(p).map_err(CliError::from))
        .collect()
}

fn build_model(sig: &Option<String>, sets: Vec<CycleSet>) -> Result<Model, CliError> {
    match sig {
        Some(text) => Ok(Model::new(Signature::parse(text)?, sets)?),
        None => Ok(Model::from_sets(sets)?),
    }
}

fn rational_cells(value: &BigRational) -> (Cell, Cell) {
    (
        Cell::Big(value.numer().to_string()),
        Cell::Big(value.denom().to_string()),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Count { set, n, egf_check } => {
            let set = CycleSet::parse(&set)?;
            let table = CountTable::build(&set, n);
            let mut rows = RowWriter::new(
                format,
                vec!["N", "a_N", "t_N_numerator", "t_N_denominator"],
            );
            for i in 0..=n {
                let t = table.t(i)?;
                rows.row(vec![
                    Cell::Int(i as u64),
                    Cell::Big(table.a(i)?.to_string()),
                    Cell::Big(t.numer().to_string()),
                    Cell::Big(t.denom().to_string()),
                ]);
            }
            if egf_check {
                let ok = egf_crosscheck(&table);
                eprintln!("egf-check: {}", if ok { "PASS" } else { "FAIL" });
                if !ok {
                    return Ok(1);
                }
            }
            Ok(0)
        }

        Command::Wordcheck { sig, word } => {
            let sig = Signature::parse(&sig)?;
            let word = Word::parse(&word)?;
            let nf = normal_form(&word, &sig)?;
            let mut rows =
                RowWriter::new(format, vec!["word", "normal_form", "identity", "phi"]);
            rows.row(vec![
                Cell::Text(word.to_string()),
                Cell::Text(nf.to_string()),
                Cell::Bool(nf.is_empty()),
                Cell::Int(haar_moment(&word, &sig)? as u64),
            ]);
            Ok(0)
        }

        Command::Scon { sig, word, verify } => {
            let sig = Signature::parse(&sig)?;
            let word = Word::parse(&word)?;
            let gamma = ColoredGraph::word_graph(&word)?;
            let witness = gamma.chi1_strong_congruence(&sig, cli.max_vertices)?;
            let count = witness.is_some() as u64;
            let phi = haar_moment(&word, &sig)? as u64;
            let mut rows = RowWriter::new(
                format,
                vec!["word", "count", "partition", "phi", "consistent"],
            );
            rows.row(vec![
                Cell::Text(word.to_string()),
                Cell::Int(count),
                match &witness {
                    Some(p) => Cell::Text(p.display_with(gamma.vertices())),
                    None => Cell::Empty,
                },
                Cell::Int(phi),
                Cell::Bool(count == phi),
            ]);
            if verify && count != phi {
                return Ok(1);
            }
            Ok(0)
        }

        Command::Trace {
            method,
            sig,
            sets,
            words,
            n,
            grid,
            samples,
            seed,
            compare,
        } => {
            let model = build_model(&sig, parse_sets(&sets)?)?;
            let words = parse_words(&words)?;
            let grid = match (n, grid) {
                (Some(n), None) => vec![n],
                (None, Some(text)) => {
                    let spec = parse_grid(&text)?;
                    let max = match &spec {
                        GridSpec::Explicit(v) => *v.last().unwrap(),
                        GridSpec::Range(_, hi) => *hi,
                    };
                    let probe = Engine::new(model.clone(), max as usize);
                    resolve_grid(
                        spec,
                        |size| probe.is_feasible(size).unwrap_or(false),
                        cli.grid_points,
                    )?
                }
                _ => return Err(CliError::usage("exactly one of --n or --grid is required")),
            };
            let engine = Engine::new(model, *grid.last().unwrap() as usize)
                .with_budget(cli.budget)
                .with_vertex_bound(cli.max_vertices);

            let mut rows = RowWriter::new(
                format,
                vec![
                    "words", "N", "method", "value_num", "value_den", "estimate", "stderr",
                    "samples", "seed",
                ],
            );
            let words_text = words
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let emit_exact = |rows: &mut RowWriter, n: u64, method: TraceMethod, v: &BigRational| {
                let (num, den) = rational_cells(v);
                rows.row(vec![
                    Cell::Text(words_text.clone()),
                    Cell::Int(n),
                    Cell::Text(method.name().into()),
                    num,
                    den,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
            };

            let mut all_agree = true;
            for &size in &grid {
                if compare {
                    let exact = engine.exact_expected_trace(&words, size)?;
                    emit_exact(&mut rows, size, TraceMethod::Exact, &exact);
                    match engine.brute_expected_trace(&words, size) {
                        Ok(brute) => {
                            emit_exact(&mut rows, size, TraceMethod::Brute, &brute);
                            if brute != exact {
                                all_agree = false;
                            }
                        }
                        Err(Error::BudgetExceeded { estimate, budget }) => {
                            eprintln!(
                                "brute force skipped at N = {size}: {estimate} > budget {budget}"
                            );
                        }
                        Err(e) => return Err(e.into()),
                    }
                    if matches!(method, MethodArg::Mc) {
                        let mc = engine.mc_expected_trace(&words, size, samples, seed)?;
                        rows.row(vec![
                            Cell::Text(words_text.clone()),
                            Cell::Int(size),
                            Cell::Text("mc".into()),
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Float(mc.estimate),
                            Cell::Float(mc.stderr),
                            Cell::Int(mc.samples),
                            Cell::Int(mc.seed),
                        ]);
                        let exact_f = rational_to_f64(&exact);
                        if (mc.estimate - exact_f).abs() > 5.0 * mc.stderr.max(f64::EPSILON) {
                            all_agree = false;
                        }
                    }
                } else {
                    match method {
                        MethodArg::Exact => {
                            let v = engine.exact_expected_trace(&words, size)?;
                            emit_exact(&mut rows, size, TraceMethod::Exact, &v);
                        }
                        MethodArg::Brute => {
                            let v = engine.brute_expected_trace(&words, size)?;
                            emit_exact(&mut rows, size, TraceMethod::Brute, &v);
                        }
                        MethodArg::Mc => {
                            let mc = engine.mc_expected_trace(&words, size, samples, seed)?;
                            rows.row(vec![
                                Cell::Text(words_text.clone()),
                                Cell::Int(size),
                                Cell::Text("mc".into()),
                                Cell::Empty,
                                Cell::Empty,
                                Cell::Float(mc.estimate),
                                Cell::Float(mc.stderr),
                                Cell::Int(mc.samples),
                                Cell::Int(mc.seed),
                            ]);
                        }
                    }
                }
            }
            if compare && !all_agree {
                eprintln!("method comparison FAILED");
                return Ok(1);
            }
            Ok(0)
        }

        Command::Verify {
            sig,
            sets,
            max_len,
            grid,
            tolerance,
        } => {
            let model = build_model(&sig, parse_sets(&sets)?)?;
            let spec = parse_grid(&grid)?;
            let max = match &spec {
                GridSpec::Explicit(v) => *v.last().unwrap(),
                GridSpec::Range(_, hi) => *hi,
            };
            let engine = Engine::new(model, max as usize)
                .with_budget(cli.budget)
                .with_vertex_bound(cli.max_vertices);
            let grid = resolve_grid(
                spec,
                |size| engine.is_feasible(size).unwrap_or(false),
                cli.grid_points,
            )?;
            let report = engine.freeness_verdict(max_len, &grid, tolerance)?;
            let mut rows = RowWriter::new(
                format,
                vec!["word", "N", "phi", "value_num", "value_den", "abs_dev"],
            );
            for row in &report.rows {
                for ((size, value), dev) in row.values.iter().zip(&row.deviations) {
                    let (num, den) = rational_cells(value);
                    rows.row(vec![
                        Cell::Text(row.word.to_string()),
                        Cell::Int(*size),
                        Cell::Int(row.phi as u64),
                        num,
                        den,
                        Cell::Float(*dev),
                    ]);
                }
            }
            verdict(
                format,
                json!({
                    "command": "verify",
                    "pass": report.pass,
                    "tolerance": report.tolerance,
                    "max_deviation": report.max_deviation,
                }),
            );
            Ok(if report.pass { 0 } else { 1 })
        }

        Command::Asympt(command) => run_asympt(command, format, cli.grid_points),
    }
}

fn emit_report(format: Format, report: &AsymptoticReport) -> u8 {
    let mut rows = RowWriter::new(format, vec!["N", "observed", "predicted", "ratio"]);
    for (i, &n) in report.grid.iter().enumerate() {
        rows.row(vec![
            Cell::Int(n),
            Cell::Float(report.observed[i]),
            Cell::Float(report.predicted[i]),
            report
                .ratio
                .get(i)
                .map_or(Cell::Empty, |&r| Cell::Float(r)),
        ]);
    }
    verdict(
        format,
        json!({
            "law": report.law,
            "pass": report.pass,
            "tolerance": report.tolerance,
            "identically_zero": report.identically_zero,
            "fitted_exponent": report.fitted_exponent,
        }),
    );
    u8::from(!report.pass)
}

fn run_asympt(command: AsymptCommand, format: Format, points: usize) -> Result<u8, CliError> {
    match command {
        AsymptCommand::Limpnk { set, k, grid, tol } => {
            let set = CycleSet::parse(&set)?;
            let spec = parse_grid(&grid)?;
            let max = match &spec {
                GridSpec::Explicit(v) => *v.last().unwrap(),
                GridSpec::Range(_, hi) => *hi,
            };
            let table = CountTable::build(&set, max as usize);
            let grid = resolve_grid(
                spec,
                |n| n >= k && table.is_feasible(n as usize).unwrap_or(false),
                points,
            )?;
            let report = cycle_probability_trend(&table, k, &grid, tol)?;
            Ok(emit_report(format, &report))
        }
        AsymptCommand::Limpng {
            set,
            graph,
            grid,
            tol,
        } => {
            let set = CycleSet::parse(&set)?;
            let text = if graph == "-" {
                let mut buffer = String::new();
                std::io::stdin()
                    .read_to_string(&mut buffer)
                    .map_err(|e| CliError::usage(format!("cannot read graph: {e}")))?;
                buffer
            } else {
                std::fs::read_to_string(&graph)
                    .map_err(|e| CliError::usage(format!("cannot read {graph}: {e}")))?
            };
            let graph = ColoredGraph::parse_text(&text)?;
            let spec = parse_grid(&grid)?;
            let max = match &spec {
                GridSpec::Explicit(v) => *v.last().unwrap(),
                GridSpec::Range(_, hi) => *hi,
            };
            let table = CountTable::build(&set, max as usize);
            let vertices = graph.num_vertices() as u64;
            let grid = resolve_grid(
                spec,
                |n| n >= vertices && table.is_feasible(n as usize).unwrap_or(false),
                points,
            )?;
            let report = graph_probability_trend(&table, &graph, &grid, tol)?;
            Ok(emit_report(format, &report))
        }
        AsymptCommand::Hayman { set, grid } => {
            let set = CycleSet::parse(&set)?;
            let spec = parse_grid(&grid)?;
            let max = match &spec {
                GridSpec::Explicit(v) => *v.last().unwrap(),
                GridSpec::Range(_, hi) => *hi,
            };
            let table = CountTable::build(&set, max as usize);
            let gcd = set.gcd();
            let grid = resolve_grid(
                spec,
                |n| {
                    n % gcd == 0
                        && n >= gcd
                        && table.is_feasible(n as usize).unwrap_or(false)
                        && table.is_feasible((n - gcd) as usize).unwrap_or(false)
                },
                points,
            )?;
            let report = hayman_ratio_check(&table, &grid)?;
            Ok(emit_report(format, &report))
        }
        AsymptCommand::Hildebrand { set, grid, tol } => {
            let set = CycleSet::parse(&set)?;
            let spec = parse_grid(&grid)?;
            let max = match &spec {
                GridSpec::Explicit(v) => *v.last().unwrap(),
                GridSpec::Range(_, hi) => *hi,
            };
            let table = CountTable::build(&set, max as usize);
            let grid = resolve_grid(
                spec,
                |n| table.is_feasible(n as usize).unwrap_or(false),
                points,
            )?;
            let report = hildebrand_limit(&table, &grid, tol)?;
            Ok(emit_report(format, &report))
        }
        AsymptCommand::Multiples { d, n } => {
            let pass = multiples_closed_form(d, n)?;
            let set = CycleSet::multiples(d)?;
            let table = CountTable::build(&set, d as usize * n);
            let mut rows = RowWriter::new(format, vec!["N", "observed", "predicted", "ratio"]);
            for m in 1..=n {
                let size = d * m as u64;
                let scaled = table.cycle_probability(size as usize, d)?
                    * BigRational::from_integer(size.into());
                let value = rational_to_f64(&scaled);
                rows.row(vec![
                    Cell::Int(size),
                    Cell::Float(value),
                    Cell::Float(1.0),
                    Cell::Float(value),
                ]);
            }
            verdict(
                format,
                json!({
                    "law": format!("multiples-of-{d} closed form"),
                    "pass": pass,
                }),
            );
            Ok(u8::from(!pass))
        }
        AsymptCommand::Counterexample { stages, cap } => {
            let report = counterexample_sequence(stages, cap)?;
            let mut rows = RowWriter::new(format, vec!["stage", "N", "set", "product"]);
            for stage in &report.stages {
                rows.row(vec![
                    Cell::Int(stage.stage as u64),
                    Cell::Int(stage.n),
                    Cell::Text(
                        stage
                            .set
                            .iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(","),
                    ),
                    Cell::Float(stage.product),
                ]);
            }
            let pass = !report.hit_cap && report.stages.len() == stages;
            verdict(
                format,
                json!({
                    "law": "anomalous cycle-probability sequence",
                    "pass": pass,
                    "hit_cap": report.hit_cap,
                    "stages_found": report.stages.len(),
                }),
            );
            Ok(u8::from(!pass))
        }
    }
}
