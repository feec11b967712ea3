//! `ovsg` — build, play, verify, and solve online vertex subset games.

use clap::{Parser, Subcommand, ValueEnum};
use ovsg_cli::config::{OutputFormat, RunConfig};
use ovsg_cli::{dot, exit_code, instance, transcript, verify, FormatError};
use ovsg_core::formula::{normalize, parse_qbf};
use ovsg_core::gadgets::build_online_instance;
use ovsg_core::game::{replay_transcript, Outcome};
use ovsg_core::offline::{reduce_3sat, Problem};
use ovsg_core::solver::{
    enumerate_policies_bruteforce, solve_game_exact, Certificate, SolverError, SolverOptions,
};
use ovsg_core::strategies::{
    adversary_deviant, adversary_paper_policy, adversary_random_compliant, algorithm_leak_aware,
    algorithm_paper_policy, AdversaryPolicy, AlgorithmPolicy, Deviation, MatchRunner,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ovsg", version, about = "Online vertex subset games from quantified formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for the machine-readable lines on stdout.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Seed for the randomized pieces.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Vertex cap for the exact game solver.
    #[arg(long, global = true)]
    cap_vertices: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Vc,
    Is,
    Ds,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Vc => Problem::VertexCover,
            ProblemArg::Is => Problem::IndependentSet,
            ProblemArg::Ds => Problem::DominatingSet,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a quantified formula into a game instance.
    Reduce {
        /// QDIMACS formula file.
        formula: PathBuf,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Stop after the base reduction; skip the extension gadgets.
        #[arg(long)]
        offline: bool,
        /// Instance output path (default: formula path with .inst).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a DOT rendering.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Play one full match on an instance file.
    Play {
        instance: PathBuf,
        /// Algorithm: paper | leak-aware.
        #[arg(long, default_value = "paper")]
        algorithm: String,
        /// Adversary: paper | random | deviant:dr-first:<var> |
        /// deviant:fake-first:<l1>,<l2>,<l3>.
        #[arg(long, default_value = "paper")]
        adversary: String,
        /// Write the transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Replay a stored transcript instead of playing.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Run a verification suite: degrees | self-contained | correspondence |
    /// solver-oracle | all.
    Verify { suite: String },
    /// Exact game value of a small instance or graph file.
    Solve {
        /// Instance file or bare graph file.
        input: PathBuf,
        /// Budget; defaults to the instance budget.
        #[arg(short = 'k', long)]
        budget: Option<usize>,
        /// Use the policy-enumeration oracle instead of the class solver.
        #[arg(long)]
        bruteforce: bool,
        /// Write the winning certificate here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::new(exit_code::PARSE, format!("{e}"))
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let code = match e {
            SolverError::VertexCapExceeded { .. } | SolverError::BudgetExceeded => exit_code::CAP,
            _ => exit_code::FAILURE,
        };
        Failure::new(code, format!("{e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match RunConfig::from_env() {
        Ok(config) => config,
        Err(e) => {
            eprintln!("ovsg: {e}");
            return ExitCode::from(exit_code::PARSE as u8);
        }
    };
    if let Some(format) = cli.format {
        config.format = match format {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Structured => OutputFormat::Structured,
        };
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(cap) = cli.cap_vertices {
        config.vertex_cap = cap;
    }

    match run(cli.command, &config) {
        Ok(code) => ExitCode::from(code as u8),
        Err(failure) => {
            eprintln!("ovsg: {}", failure.message);
            ExitCode::from(failure.code as u8)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::new(exit_code::PARSE, format!("cannot read {}: {e}", path.display()))
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content).map_err(|e| {
        Failure::new(exit_code::FAILURE, format!("cannot write {}: {e}", path.display()))
    })
}

fn run(command: Command, config: &RunConfig) -> Result<i32, Failure> {
    match command {
        Command::Reduce { formula, problem, offline, out, dot } => {
            cmd_reduce(&formula, problem.into(), offline, out, dot, config)
        }
        Command::Play { instance, algorithm, adversary, transcript, replay } => {
            cmd_play(&instance, &algorithm, &adversary, transcript, replay, config)
        }
        Command::Verify { suite } => cmd_verify(&suite, config),
        Command::Solve { input, budget, bruteforce, certificate } => {
            cmd_solve(&input, budget, bruteforce, certificate, config)
        }
    }
}

fn cmd_reduce(
    formula_path: &Path,
    problem: Problem,
    offline: bool,
    out: Option<PathBuf>,
    dot_path: Option<PathBuf>,
    config: &RunConfig,
) -> Result<i32, Failure> {
    let text = read_file(formula_path)?;
    let parsed = parse_qbf(&text)
        .map_err(|e| Failure::new(exit_code::PARSE, format!("{}: {e}", formula_path.display())))?;
    let q = normalize(&parsed);

    let out_path = out.unwrap_or_else(|| {
        let mut path = match &config.out_dir {
            Some(dir) => dir.join(formula_path.file_name().unwrap_or_default()),
            None => formula_path.to_path_buf(),
        };
        path.set_extension(format!("{}.inst", problem.short_name()));
        path
    });

    let (n, m) = (q.n(), q.m());
    let (fake_count, k, body, dot_text) = if offline {
        let red = reduce_3sat(problem, &q)
            .map_err(|e| Failure::new(exit_code::FAILURE, format!("{e}")))?;
        (0, red.k, instance::write_offline(&red), dot::offline_to_dot(&red))
    } else {
        let inst = build_online_instance(&q, problem)
            .map_err(|e| Failure::new(exit_code::FAILURE, format!("{e}")))?;
        (inst.fake_clause_count(), inst.budget, instance::write_online(&inst), dot::online_to_dot(&inst))
    };
    write_file(&out_path, &body)?;
    if let Some(dot_path) = &dot_path {
        write_file(dot_path, &dot_text)?;
    }

    match config.format {
        OutputFormat::Structured => {
            println!("reduce problem {}", problem.short_name());
            println!("reduce n {n}");
            println!("reduce m {m}");
            println!("reduce fake-clauses {fake_count}");
            println!("reduce k {k}");
            println!("reduce out {}", out_path.display());
        }
        OutputFormat::Text => {
            println!("problem: {problem}");
            println!("n = {n}, m = {m}, fake clauses = {fake_count}");
            println!("k = {k}");
            println!("instance written to {}", out_path.display());
        }
    }
    eprintln!("reduced {} to {} (k = {k})", formula_path.display(), problem);
    Ok(exit_code::OK)
}

fn pick_algorithm(
    name: &str,
    inst: &ovsg_core::gadgets::OnlineInstance,
) -> Result<Box<dyn AlgorithmPolicy>, Failure> {
    match name {
        "paper" => Ok(algorithm_paper_policy(inst)),
        "leak-aware" => Ok(algorithm_leak_aware(inst)),
        other => Err(Failure::new(exit_code::USAGE, format!("unknown algorithm {other}"))),
    }
}

fn pick_adversary(
    name: &str,
    inst: &ovsg_core::gadgets::OnlineInstance,
    seed: u64,
) -> Result<Box<dyn AdversaryPolicy>, Failure> {
    if name == "paper" || name == "none" {
        return Ok(Box::new(adversary_paper_policy(inst)));
    }
    if name == "random" {
        return Ok(Box::new(adversary_random_compliant(inst, seed)));
    }
    if let Some(spec) = name.strip_prefix("deviant:") {
        if let Some(var) = spec.strip_prefix("dr-first:") {
            let var: u32 = var
                .parse()
                .map_err(|_| Failure::new(exit_code::USAGE, "bad variable in deviation"))?;
            return Ok(Box::new(adversary_deviant(inst, Deviation::DrCenterFirst { var })));
        }
        if let Some(lits) = spec.strip_prefix("fake-first:") {
            let codes: Vec<i64> = lits
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::new(exit_code::USAGE, "bad literals in deviation"))?;
            if codes.len() != 3 {
                return Err(Failure::new(exit_code::USAGE, "deviation needs three literals"));
            }
            let mut fake = [ovsg_core::formula::Literal::positive(1); 3];
            for (slot, code) in codes.iter().enumerate() {
                fake[slot] = ovsg_core::formula::Literal::from_dimacs(*code)
                    .ok_or_else(|| Failure::new(exit_code::USAGE, "bad literal in deviation"))?;
            }
            return Ok(Box::new(adversary_deviant(inst, Deviation::FakeClauseFirst { fake })));
        }
    }
    Err(Failure::new(exit_code::USAGE, format!("unknown adversary {name}")))
}

fn cmd_play(
    instance_path: &Path,
    algorithm: &str,
    adversary: &str,
    transcript_out: Option<PathBuf>,
    replay: Option<PathBuf>,
    config: &RunConfig,
) -> Result<i32, Failure> {
    let loaded = instance::parse_instance(&read_file(instance_path)?)?;
    let instance::LoadedInstance::Online(inst) = loaded else {
        return Err(Failure::new(
            exit_code::PARSE,
            "play needs an online instance (reduce without --offline)",
        ));
    };

    let result = if let Some(replay_path) = replay {
        let stored = transcript::parse_transcript(&read_file(&replay_path)?)?;
        let state = replay_transcript(&inst.graph, &stored)
            .map_err(|e| Failure::new(exit_code::FAILURE, format!("replay failed: {e}")))?;
        let recomputed = state
            .transcript()
            .map_err(|e| Failure::new(exit_code::FAILURE, format!("replay failed: {e}")))?;
        if recomputed != stored {
            return Err(Failure::new(
                exit_code::FAILURE,
                "replayed transcript differs from the stored one",
            ));
        }
        recomputed
    } else {
        let algorithm = pick_algorithm(algorithm, &inst)?;
        let mut adversary = pick_adversary(adversary, &inst, config.seed)?;
        let mut runner = MatchRunner::new(&inst, algorithm);
        runner
            .play(adversary.as_mut())
            .map_err(|e| Failure::new(exit_code::FAILURE, format!("{e}")))?
    };

    if let Some(path) = transcript_out {
        write_file(&path, &transcript::write_transcript(&result))?;
    }
    let winner = match result.outcome {
        Outcome::AlgorithmWins => "algorithm",
        Outcome::AdversaryWins => "adversary",
    };
    match config.format {
        OutputFormat::Structured => {
            println!("play outcome {winner}");
            println!("play solution-size {}", result.solution_size);
            println!("play budget {}", result.budget);
        }
        OutputFormat::Text => {
            println!("outcome: {winner} wins");
            println!("solution size {} against budget {}", result.solution_size, result.budget);
        }
    }
    eprintln!("{} turns, {} wins", result.turns.len(), winner);
    Ok(match result.outcome {
        Outcome::AlgorithmWins => exit_code::OK,
        Outcome::AdversaryWins => exit_code::ADVERSARY_WINS,
    })
}

fn cmd_verify(suite: &str, config: &RunConfig) -> Result<i32, Failure> {
    let Some(report) = verify::run_suite(suite, config.seed) else {
        return Err(Failure::new(
            exit_code::USAGE,
            format!("unknown suite {suite}; pick one of {}", verify::SUITES.join(", ")),
        ));
    };
    for check in &report.checks {
        let status = if check.passed { "pass" } else { "fail" };
        match config.format {
            OutputFormat::Structured => println!("check {} {status}", check.name),
            OutputFormat::Text => println!("check {} {status} ({})", check.name, check.detail),
        }
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    eprintln!("{} checks, {} failed", report.checks.len(), failed);
    Ok(if failed == 0 { exit_code::OK } else { exit_code::FAILURE })
}

fn cmd_solve(
    input: &Path,
    budget: Option<usize>,
    bruteforce: bool,
    certificate_out: Option<PathBuf>,
    config: &RunConfig,
) -> Result<i32, Failure> {
    let text = read_file(input)?;
    let (graph, problem, default_budget) = if text.starts_with(instance::GRAPH_HEADER) {
        (instance::parse_graph(&text)?, Problem::VertexCover, None)
    } else {
        let loaded = instance::parse_instance(&text)?;
        let problem = loaded.problem();
        let budget = loaded.budget();
        (loaded.graph().clone(), problem, Some(budget))
    };
    let k = budget
        .or(default_budget)
        .ok_or_else(|| Failure::new(exit_code::USAGE, "graph files need --budget"))?;

    let opts = SolverOptions {
        vertex_cap: config.vertex_cap,
        memo_cap: config.memo_cap,
        ..SolverOptions::default()
    };
    let value = if bruteforce {
        enumerate_policies_bruteforce(&graph, problem, k)?
    } else {
        solve_game_exact(&graph, problem, k, opts)?
    };
    let winner = match value.winner {
        Outcome::AlgorithmWins => "algorithm",
        Outcome::AdversaryWins => "adversary",
    };
    let cert_path = if let Some(path) = certificate_out {
        write_file(&path, &render_certificate(&value.certificate))?;
        Some(path)
    } else {
        None
    };
    match config.format {
        OutputFormat::Structured => {
            println!("solve winner {winner}");
            println!("solve k {k}");
            if let Some(path) = &cert_path {
                println!("solve certificate {}", path.display());
            }
        }
        OutputFormat::Text => {
            println!("winner: {winner} (problem {problem}, k = {k})");
            if let Some(path) = &cert_path {
                println!("certificate written to {}", path.display());
            }
        }
    }
    Ok(match value.winner {
        Outcome::AlgorithmWins => exit_code::OK,
        Outcome::AdversaryWins => exit_code::ADVERSARY_WINS,
    })
}

fn render_certificate(certificate: &Certificate) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    match certificate {
        Certificate::Policy(policy) => {
            let _ = writeln!(out, "ovsg-certificate policy");
            let _ = writeln!(out, "classes {}", policy.len());
            for (key, decision) in policy {
                let _ = writeln!(
                    out,
                    "decide {:?} -> {}",
                    key,
                    if decision.accepted() { "in" } else { "out" }
                );
            }
        }
        Certificate::RevealPlan(plan) => {
            let _ = writeln!(out, "ovsg-certificate reveal-plan");
            let _ = writeln!(out, "classes {}", plan.len());
            for (key, target) in plan {
                let _ = writeln!(out, "reveal {key:?} -> {target:?}");
            }
        }
    }
    out
}
