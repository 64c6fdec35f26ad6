//! Command-line front end for the Façade-X BGP satisfiability analyzer.
//!
//! Exit codes: 0 satisfiable/agreement, 1 unsatisfiable/disagreement,
//! 2 timeout, 64 usage error, 65 input parse error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fxsat::oracle::{
    bgp_match, bgp_match_exists, build_witness, facadify_file, facadify_file_as, find_witness,
    materialize, parse_nquads, to_nquads, DataFormat, EntityMode, FxQuad,
};
use fxsat::{
    extract_bgps_from_query, is_satisfiable, parse_bgp_text, strip_config_triples, Algorithm,
    Annotation, Bgp, Mode, SatReport, Verdict,
};
use fxsat_cli::{curated_suite, render_csv, run_benchmark, CuratedCase};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;

#[derive(Parser)]
#[command(
    name = "fxsat",
    about = "Decides whether SPARQL basic graph patterns can match a Façade-X graph",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Topdown,
    Bottomup,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Topdown => Algorithm::TopDown,
            AlgoArg::Bottomup => Algorithm::BottomUp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    All,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::First => Mode::First,
            ModeArg::All => Mode::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Xml,
}

impl From<FormatArg> for DataFormat {
    fn from(f: FormatArg) -> DataFormat {
        match f {
            FormatArg::Csv => DataFormat::Csv,
            FormatArg::Json => DataFormat::Json,
            FormatArg::Xml => DataFormat::Xml,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EntitiesArg {
    Bnode,
    Iri,
}

#[derive(Args, Clone, Copy)]
struct SolveArgs {
    /// Annotation algorithm.
    #[arg(long, value_enum, default_value = "bottomup")]
    algo: AlgoArg,
    /// Stop at the first solution or generate all of them.
    #[arg(long, value_enum, default_value = "first")]
    mode: ModeArg,
    /// Per-BGP time budget in milliseconds.
    #[arg(long, default_value_t = 5000)]
    timeout_ms: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of every BGP in a .bgp/.rq/.sparql file.
    Check {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        /// Emit a machine-readable JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print every solution pattern of every BGP in the file.
    Annotate {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Convert a CSV/JSON/XML file to N-Quads.
    Materialize {
        file: PathBuf,
        /// Input format; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Container entity style.
        #[arg(long, value_enum, default_value = "bnode")]
        entities: EntitiesArg,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a BGP against materialized data files by brute force.
    Oracle {
        bgp_file: PathBuf,
        /// CSV/JSON/XML files (or .nq files) forming the dataset.
        data_files: Vec<PathBuf>,
    },
    /// Run the benchmark suite and emit a CSV report.
    Bench {
        /// "curated" or a directory of .bgp files.
        #[arg(long, default_value = "curated")]
        suite: String,
        #[arg(long, value_enum, default_value = "bottomup")]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "first")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Cross-check analyzer verdicts against the brute-force oracle.
    Verify {
        bgp_file: PathBuf,
        /// Optional data files; unsatisfiable verdicts must find no match in
        /// any of them.
        data_files: Vec<PathBuf>,
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

/// Loads the BGPs of a file: a single pattern from the canonical format, or
/// every extracted group pattern from a query file. Configuration triples
/// are stripped either way.
fn load_bgps(path: &Path) -> anyhow::Result<Vec<Bgp>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let extension = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let bgps = match extension.to_ascii_lowercase().as_str() {
        "rq" | "sparql" => extract_bgps_from_query(&text)?.bgps,
        _ => vec![strip_config_triples(&parse_bgp_text(&text)?)],
    };
    Ok(bgps
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.with_label(format!("{}#{}", path.display(), i)))
        .collect())
}

fn load_quads(paths: &[PathBuf]) -> anyhow::Result<Vec<FxQuad>> {
    let mut quads = Vec::new();
    for path in paths {
        if path.extension().and_then(|e| e.to_str()) == Some("nq") {
            let text = std::fs::read_to_string(path)?;
            quads.extend(parse_nquads(&text).map_err(|e| anyhow::anyhow!(e))?);
        } else {
            let instance = facadify_file(path)?;
            quads.extend(materialize(&instance, EntityMode::BlankNodes));
        }
    }
    Ok(quads)
}

fn solution_lines(annotation: &Annotation, bgp: &Bgp) -> String {
    bgp.nodes()
        .iter()
        .map(|n| format!("  {n} -> {}", annotation.get(n).expect("total annotation")))
        .collect::<Vec<_>>()
        .join("\n")
}

fn report_json(report: &SatReport, bgp: &Bgp) -> serde_json::Value {
    serde_json::json!({
        "verdict": report.verdict.to_string(),
        "solutions": report
            .solutions
            .iter()
            .map(|s| {
                s.iter()
                    .map(|(n, p)| (n.to_string(), p.to_string()))
                    .map(|(k, v)| (k, serde_json::Value::String(v)))
                    .collect::<serde_json::Map<String, serde_json::Value>>()
            })
            .collect::<Vec<_>>(),
        "tested": report.tested,
        "elapsed_ms": report.elapsed.as_secs_f64() * 1e3,
        "algorithm": report.algorithm.to_string(),
        "mode": report.mode.to_string(),
        "triples": bgp.len(),
    })
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Check { file, solve, json } => {
            let bgps = load_bgps(&file)?;
            let timeout = Duration::from_millis(solve.timeout_ms);
            let mut worst = EXIT_SAT;
            let mut results = Vec::new();
            for bgp in &bgps {
                let report = is_satisfiable(bgp, solve.algo.into(), solve.mode.into(), timeout);
                match report.verdict {
                    Verdict::Satisfiable => {}
                    Verdict::Unsatisfiable => worst = worst.max(EXIT_UNSAT),
                    Verdict::Timeout => worst = worst.max(EXIT_TIMEOUT),
                }
                if json {
                    results.push(report_json(&report, bgp));
                } else {
                    println!(
                        "{}: {} ({} solution(s), {} annotations tested, {:.1} ms)",
                        bgp.source_label.as_deref().unwrap_or("bgp"),
                        report.verdict,
                        report.solutions.len(),
                        report.tested,
                        report.elapsed.as_secs_f64() * 1e3
                    );
                    if report.verdict == Verdict::Unsatisfiable && !bgp.is_empty() {
                        if let Some(reason) = unsat_reason(bgp) {
                            println!("  {reason}");
                        }
                    }
                    for solution in &report.solutions {
                        println!("{}", solution_lines(solution, bgp));
                    }
                }
            }
            if json {
                let doc = serde_json::json!({
                    "schema": "fxsat-check/1",
                    "file": file.display().to_string(),
                    "results": results,
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            }
            Ok(worst)
        }
        Command::Annotate { file, solve } => {
            let bgps = load_bgps(&file)?;
            let timeout = Duration::from_millis(solve.timeout_ms);
            let mut worst = EXIT_SAT;
            for bgp in &bgps {
                let report = is_satisfiable(bgp, solve.algo.into(), Mode::All, timeout);
                println!(
                    "{}: {} with {} solution pattern(s)",
                    bgp.source_label.as_deref().unwrap_or("bgp"),
                    report.verdict,
                    report.solutions.len()
                );
                for (i, solution) in report.solutions.iter().enumerate() {
                    println!("solution {}:", i + 1);
                    println!("{}", solution_lines(solution, bgp));
                }
                match report.verdict {
                    Verdict::Satisfiable => {}
                    Verdict::Unsatisfiable => worst = worst.max(EXIT_UNSAT),
                    Verdict::Timeout => worst = worst.max(EXIT_TIMEOUT),
                }
            }
            Ok(worst)
        }
        Command::Materialize { file, format, entities, output } => {
            let instance = match format {
                Some(f) => facadify_file_as(&file, f.into())?,
                None => facadify_file(&file)?,
            };
            let mode = match entities {
                EntitiesArg::Bnode => EntityMode::BlankNodes,
                EntitiesArg::Iri => EntityMode::Iris,
            };
            let nquads = to_nquads(&materialize(&instance, mode));
            match output {
                Some(path) => std::fs::write(path, nquads)?,
                None => print!("{nquads}"),
            }
            Ok(EXIT_SAT)
        }
        Command::Oracle { bgp_file, data_files } => {
            let bgps = load_bgps(&bgp_file)?;
            let quads = load_quads(&data_files)?;
            for bgp in &bgps {
                let solutions = bgp_match(bgp, &quads);
                println!(
                    "{}: {} binding(s)",
                    bgp.source_label.as_deref().unwrap_or("bgp"),
                    solutions.len()
                );
                for solution in &solutions {
                    let row = solution
                        .iter()
                        .map(|(node, term)| format!("{node} = {term}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    println!("  {row}");
                }
            }
            Ok(EXIT_SAT)
        }
        Command::Bench { suite, algo, mode, repeats, timeout_ms, report } => {
            let cases = if suite == "curated" {
                curated_suite()
            } else {
                load_suite_dir(Path::new(&suite))?
            };
            let rows = run_benchmark(
                &cases,
                algo.into(),
                mode.into(),
                repeats,
                Duration::from_millis(timeout_ms),
            );
            let csv = render_csv(&rows);
            match report {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(EXIT_SAT)
        }
        Command::Verify { bgp_file, data_files, timeout_ms } => {
            let bgps = load_bgps(&bgp_file)?;
            let quads = load_quads(&data_files)?;
            let timeout = Duration::from_millis(timeout_ms);
            let mut agreement = true;
            for bgp in &bgps {
                let label = bgp.source_label.clone().unwrap_or_else(|| "bgp".to_string());
                let report = is_satisfiable(bgp, Algorithm::BottomUp, Mode::First, timeout);
                match report.verdict {
                    Verdict::Timeout => {
                        println!("{label}: timeout; nothing to verify");
                        return Ok(EXIT_TIMEOUT);
                    }
                    Verdict::Satisfiable => {
                        let witness = report
                            .solutions
                            .first()
                            .and_then(|s| build_witness(bgp, s).ok())
                            .or_else(|| find_witness(bgp, timeout).map(|(_, i)| i));
                        match witness {
                            Some(instance) => {
                                let graph = materialize(&instance, EntityMode::BlankNodes);
                                if bgp_match_exists(bgp, &graph) {
                                    println!("{label}: satisfiable, witness graph matches");
                                } else {
                                    println!("{label}: DISAGREEMENT: witness graph has no match");
                                    agreement = false;
                                }
                            }
                            None => {
                                println!(
                                    "{label}: DISAGREEMENT: satisfiable verdict but no witness instance"
                                );
                                agreement = false;
                            }
                        }
                    }
                    Verdict::Unsatisfiable => {
                        if quads.is_empty() {
                            println!("{label}: unsatisfiable (no data files to cross-check)");
                        } else if bgp_match_exists(bgp, &quads) {
                            println!("{label}: DISAGREEMENT: oracle found a match");
                            agreement = false;
                        } else {
                            println!("{label}: unsatisfiable, oracle found no match");
                        }
                    }
                }
            }
            Ok(if agreement { EXIT_SAT } else { EXIT_UNSAT })
        }
    }
}

/// Short explanation for an unsatisfiable verdict: the structural gate that
/// fired, or the rule conflict raised by the most constrained annotation.
fn unsat_reason(bgp: &Bgp) -> Option<String> {
    use fxsat::rules::check;
    use fxsat::structure::{has_cycle, has_unsupported_join};
    use fxsat::term::{classify_well_known, NodeKind, WellKnown};
    use fxsat::FxPredicate;

    if has_unsupported_join(bgp) {
        return Some("a node joins a property position with a subject or object".to_string());
    }
    if has_cycle(bgp) {
        return Some("the pattern contains a directed cycle".to_string());
    }

    // Probe annotation: every node gets the role its own shape forces, with
    // position defaults for free variables. The first conflict it raises is
    // the diagnostic.
    let subjects: std::collections::HashSet<_> =
        bgp.triples.iter().map(|t| &t.subject).collect();
    let predicates: std::collections::HashSet<_> =
        bgp.triples.iter().map(|t| &t.predicate).collect();
    let mut annotation = Annotation::new();
    for node in bgp.nodes() {
        let role = match classify_well_known(node) {
            WellKnown::RdfType => FxPredicate::TypeProperty,
            WellKnown::FxRoot => FxPredicate::FxRoot,
            WellKnown::ContainerMembershipProperty(_) => FxPredicate::SlotNumber,
            _ if node.kind == NodeKind::Literal => FxPredicate::Value,
            _ if subjects.contains(node) => FxPredicate::Container,
            _ if node.kind == NodeKind::Iri && predicates.contains(node) => {
                FxPredicate::SlotString
            }
            _ if predicates.contains(node) => FxPredicate::SlotString,
            _ if node.kind == NodeKind::Iri => FxPredicate::Container,
            _ => FxPredicate::Value,
        };
        annotation.insert(node.clone(), role);
    }
    check(&annotation, bgp).ok().and_then(|outcome| outcome.message())
}

fn load_suite_dir(dir: &Path) -> anyhow::Result<Vec<CuratedCase>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("bgp"))
        .collect();
    paths.sort();
    anyhow::ensure!(!paths.is_empty(), "no .bgp files in {}", dir.display());
    let mut cases = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let bgp = strip_config_triples(&parse_bgp_text(&text)?);
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("case").to_string();
        cases.push(CuratedCase {
            bgp: bgp.with_label(label.clone()),
            label,
            expected_satisfiable: true,
            expected_solution_count: None,
            expected_hypothesis_count: None,
        });
    }
    Ok(cases)
}
