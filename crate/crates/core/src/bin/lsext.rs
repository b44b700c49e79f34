use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lsext::code::LinearCode;
use lsext::extension::{build_d, CoverMatrix, CoverSystem};
use lsext::field::FieldSpec;
use lsext::geometry::incidence_matrix;
use lsext::limits::Limits;
use lsext::pipeline::{
    chain_search, extend_once, parse_code, serialize_code, special_puncture, ChainPolicy,
    StepOutcome, StepRecord, StopReason,
};
use lsext::solver::{solve, SolveStatus, SolverConfig, Strategy};

const EXIT_OK: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

/// Search for (l,s)-extensions of linear codes over small finite fields.
#[derive(Parser, Debug)]
#[command(name = "lsext", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print [n,k,d]_q, the weight distribution, A_d, t and the weight gap.
    Analyze { file: PathBuf },
    /// Append l columns raising the minimum distance by at least s.
    Extend {
        file: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: Option<usize>,
        /// Only use points not already in the code.
        #[arg(long)]
        projective: bool,
        #[arg(long, default_value = "bnb")]
        strategy: Strategy,
        #[arg(long, default_value_t = SolverConfig::default().max_solutions)]
        max_solutions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove l columns so each minimum-weight word is zero in at least s of them.
    Puncture {
        file: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat extensions until no step applies or a budget is reached.
    Chain {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_l: usize,
        #[arg(long, default_value_t = 8)]
        max_total: usize,
        #[arg(long)]
        target_d: Option<usize>,
        #[arg(long)]
        projective: bool,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Point-hyperplane incidence matrix of PG(k-1, q).
    Incidence {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the intersection matrix D of a code.
    DumpD {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a covering system read from a D-matrix dump.
    Solve {
        file: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Forbid choosing a column twice.
        #[arg(long)]
        distinct: bool,
        #[arg(long, default_value = "bnb")]
        strategy: Strategy,
        #[arg(long, default_value_t = SolverConfig::default().max_solutions)]
        max_solutions: usize,
    },
}

type CliResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let limits = Limits::from_env()?;
    match cli.cmd {
        Command::Analyze { file } => analyze(&load(&file, limits)?),
        Command::Extend {
            file,
            l,
            s,
            projective,
            strategy,
            max_solutions,
            out,
        } => {
            let code = load(&file, limits)?;
            let policy = ChainPolicy {
                projective,
                solver: SolverConfig {
                    strategy,
                    max_solutions: max_solutions.max(1),
                    ..SolverConfig::default()
                },
                ..ChainPolicy::default()
            };
            let outcome = extend_once(&code, l, s, &policy).map_err(|e| e.to_string())?;
            finish_step(outcome, out.as_deref())
        }
        Command::Puncture { file, l, s, out } => {
            let code = load(&file, limits)?;
            match special_puncture(&code, l, s, &SolverConfig::default()) {
                Ok(outcome) => finish_step(outcome, out.as_deref()),
                Err(lsext::pipeline::PipelineError::RankCollapse { k }) => {
                    println!("# every qualifying column set drops the rank below k = {k}");
                    Ok(EXIT_INFEASIBLE)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Chain {
            file,
            max_l,
            max_total,
            target_d,
            projective,
            report,
        } => {
            let code = load(&file, limits)?;
            let policy = ChainPolicy {
                max_l,
                max_total,
                target_d,
                projective,
                solver: SolverConfig::default(),
            };
            let rep = chain_search(&code, &policy).map_err(|e| e.to_string())?;
            println!("start: {}", rep.start);
            for (i, st) in rep.steps.iter().enumerate() {
                println!(
                    "step {}: ({},{})-extension {} -> {} A_d={}",
                    i + 1,
                    st.l,
                    st.s,
                    st.before,
                    st.after.expect("completed step"),
                    st.min_weight_count_after.unwrap_or(0)
                );
            }
            println!("end: {}", rep.end);
            println!(
                "stop: {}",
                serde_json::to_value(rep.stop_reason)
                    .unwrap()
                    .as_str()
                    .unwrap()
            );
            if let Some(path) = report {
                write(&path, &rep.to_json())?;
            }
            Ok(match rep.stop_reason {
                _ if !rep.steps.is_empty() => EXIT_OK,
                StopReason::TargetReached => EXIT_OK,
                StopReason::Inconclusive => EXIT_INCONCLUSIVE,
                _ => EXIT_INFEASIBLE,
            })
        }
        Command::Incidence { q, k, out } => {
            if k == 0 {
                return Err("k must be positive".into());
            }
            let spec = FieldSpec::new(q).map_err(|e| e.to_string())?;
            let m = incidence_matrix(&spec, k, &limits).map_err(|e| e.to_string())?;
            let rows: Vec<_> = (0..m.size()).map(|i| m.row(i).clone()).collect();
            emit(out.as_deref(), &CoverMatrix::new(m.size(), rows).to_text())?;
            Ok(EXIT_OK)
        }
        Command::DumpD { file, out } => {
            let code = load(&file, limits)?;
            let d = build_d(&code).map_err(|e| e.to_string())?;
            emit(out.as_deref(), &d.matrix().to_text())?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            file,
            l,
            s,
            distinct,
            strategy,
            max_solutions,
        } => {
            let text = read(&file)?;
            let m =
                CoverMatrix::from_text(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            let mut sys = CoverSystem::new(m, l, s).map_err(|e| e.to_string())?;
            if distinct {
                sys = sys.distinct();
            }
            let cfg = SolverConfig {
                strategy,
                max_solutions: max_solutions.max(1),
                ..SolverConfig::default()
            };
            let out = solve(&sys, &cfg);
            for sol in &out.solutions {
                let line: Vec<String> = sol.columns.iter().map(usize::to_string).collect();
                println!("{}", line.join(" "));
            }
            eprintln!("{} ({} nodes)", out.status, out.nodes_explored);
            Ok(status_code(out.status))
        }
    }
}

fn status_code(s: SolveStatus) -> u8 {
    match s {
        SolveStatus::Feasible => EXIT_OK,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::BudgetExhausted => EXIT_INCONCLUSIVE,
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path, limits: Limits) -> Result<LinearCode, String> {
    let text = read(path)?;
    parse_code(&text, limits).map_err(|e| format!("{}: {e}", path.display()))
}

fn analyze(code: &LinearCode) -> CliResult {
    let p = code.params();
    let dist = code.weight_distribution();
    let ad = dist.count(p.d);
    println!("code: {p}");
    let parts: Vec<String> = dist
        .counts()
        .iter()
        .map(|(w, c)| format!("{w}:{c}"))
        .collect();
    println!("weights: {}", parts.join(" "));
    println!("A_d: {ad}");
    println!("t: {}", code.min_weight_generator().t());
    match code.weight_gap() {
        Ok(g) => println!("gap: {g}"),
        Err(_) => println!("gap: undefined"),
    }
    println!("candidates: {}", code.rep_count());
    println!(
        "degenerate: {}",
        if code.is_degenerate() { "yes" } else { "no" }
    );
    Ok(EXIT_OK)
}

/// Prints the step summary as `#` comment lines, so that without `--out`
/// standard output is itself a valid code file.
fn finish_step(outcome: StepOutcome, out: Option<&Path>) -> CliResult {
    let rec = outcome.record();
    summarize(rec);
    match outcome {
        StepOutcome::Done(code, _) => {
            emit_code(&code, out)?;
            Ok(EXIT_OK)
        }
        StepOutcome::Infeasible(_) => Ok(EXIT_INFEASIBLE),
        StepOutcome::Inconclusive(_) => Ok(EXIT_INCONCLUSIVE),
    }
}

fn summarize(rec: &StepRecord) {
    let op = match rec.operation {
        lsext::pipeline::Operation::Extend => "extend",
        lsext::pipeline::Operation::Puncture => "puncture",
    };
    println!("# {op} ({},{}) of {}", rec.l, rec.s, rec.before);
    println!("# system: t={} h={} masked={}", rec.t, rec.h, rec.masked);
    println!(
        "# solver: {} {} nodes={} solutions={}",
        rec.solver.strategy,
        rec.solver.status,
        rec.solver.nodes_explored,
        rec.solver.solutions_found
    );
    if let Some(after) = rec.after {
        let cols: Vec<String> = rec.columns.iter().map(usize::to_string).collect();
        println!("# columns: {}", cols.join(" "));
        for v in &rec.appended {
            println!("# appended: {v}");
        }
        println!(
            "# result: {after} A_d={}",
            rec.min_weight_count_after.unwrap_or(0)
        );
        if let (Some(p), Some(m)) = (rec.slack_predicted_min_count, rec.slack_prediction_matches) {
            println!(
                "# slack-predicted A_d: {p} ({})",
                if m { "matches" } else { "differs" }
            );
        }
        if let Some(pd) = rec.predicted_d {
            println!("# predicted d: {pd}");
        }
    } else {
        println!("# result: none");
    }
}

fn emit_code(code: &LinearCode, out: Option<&Path>) -> Result<(), String> {
    emit(out, &serialize_code(code))
}
