//! `rescue`: command line front end.
//!
//! Exit codes: 0 success, 1 unsolvable or invalid, 2 usage or input error,
//! 3 search budget exhausted. Diagnostics go to stderr; stdout is
//! deterministic apart from lines starting with `expanded=`.

mod simulate;

use std::fs::File;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rescue_core::kb::{format_program, parse_query, Literal};
use rescue_core::planner::{PlanOutcome, PlannerConfig, SearchStats};
use rescue_core::runtime::{parse_goal, Session};
use rescue_core::world::{ingest_site, parse_events, read_objects, read_regions, read_roads, EventRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_UNSOLVABLE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "rescue", version, about = "Rule-based planning for post-earthquake rescue")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert map tables (CSV) into a site.facts file.
    Ingest {
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        roads: PathBuf,
        #[arg(long)]
        objects: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a conjunctive query against the scenario's derived model.
    Query {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Find a shortest plan for a goal.
    Plan {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
        /// Event file applied before planning.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Interleave an event stream with plan execution.
    Simulate {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        events: PathBuf,
    },
    /// Serve the HTTP API for one session.
    Serve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: String,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    scenario: PathBuf,
    /// Goal conjunction; defaults to the scenario's goal.facts.
    #[arg(long)]
    goal: Option<String>,
}

#[derive(Args)]
struct Budget {
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    max_expansions: Option<u64>,
    /// Time budget in milliseconds.
    #[arg(long)]
    timeout: Option<u64>,
}

impl Budget {
    fn config(&self) -> PlannerConfig {
        let d = PlannerConfig::default();
        PlannerConfig {
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            max_expansions: self.max_expansions.unwrap_or(d.max_expansions),
            time_budget: self.timeout.map(Duration::from_millis).unwrap_or(d.time_budget),
        }
    }
}

/// A failure that ends the command with an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest {
            regions,
            roads,
            objects,
            out,
        } => ingest(&regions, &roads, &objects, &out),
        Command::Query { scenario, query } => run_query(&scenario, &query),
        Command::Plan { target, budget, events } => run_plan(&target, &budget, events.as_deref()),
        Command::Simulate { target, budget, events } => (|| {
            let (session, goal) = open(&target)?;
            let events = read_events(&events)?;
            simulate::run(session, goal, events, budget.config())
        })(),
        Command::Serve { scenario, listen } => serve(&scenario, &listen),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn open_table(flag: &str, path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::input(format!("--{flag} {}: {e}", path.display())))
}

fn ingest(regions: &Path, roads: &Path, objects: &Path, out: &Path) -> CmdResult {
    let r = read_regions(open_table("regions", regions)?).map_err(|e| Failure::input(format!("--regions: {e}")))?;
    let d = read_roads(open_table("roads", roads)?).map_err(|e| Failure::input(format!("--roads: {e}")))?;
    let o = read_objects(open_table("objects", objects)?).map_err(|e| Failure::input(format!("--objects: {e}")))?;
    let site = ingest_site(&r, &d, &o).map_err(|e| Failure::input(e.to_string()))?;
    for w in &site.warnings {
        eprintln!("warning: {w}");
    }
    std::fs::write(out, format_program(&site.program))
        .map_err(|e| Failure::input(format!("--out {}: {e}", out.display())))?;
    eprintln!(
        "wrote {} facts ({} nodes, {} links) to {}",
        site.program.facts.len(),
        site.graph.nodes.len(),
        site.graph.edges.len(),
        out.display()
    );
    Ok(EXIT_OK)
}

fn load(scenario: &Path) -> Result<Session, Failure> {
    Session::load_dir(scenario).map_err(|e| Failure::input(e.to_string()))
}

fn open(target: &Target) -> Result<(Session, Vec<Literal>), Failure> {
    let session = load(&target.scenario)?;
    let goal = match &target.goal {
        Some(text) => parse_goal(text).map_err(|e| Failure::input(format!("--goal: {e}")))?,
        None => session
            .default_goal()
            .map(<[Literal]>::to_vec)
            .ok_or_else(|| Failure::input("no --goal given and the scenario has no goal.facts"))?,
    };
    Ok((session, goal))
}

fn read_events(path: &Path) -> Result<Vec<EventRecord>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("--events {}: {e}", path.display())))?;
    let mut events = parse_events(&text).map_err(|e| Failure::input(format!("{}:{e}", path.display())))?;
    // Stable: same-time events keep file order.
    events.sort_by_key(|e| e.timestamp);
    Ok(events)
}

fn run_query(scenario: &Path, query: &str) -> CmdResult {
    let goal = parse_query(query).map_err(|e| Failure::input(format!("--query: {e}")))?;
    let session = load(scenario)?;
    let result = session.query(&goal).map_err(|e| Failure::input(format!("--query: {e}")))?;
    let mut lines: Vec<String> = result.answers.iter().map(ToString::to_string).collect();
    lines.sort();
    for l in &lines {
        println!("{l}");
    }
    println!("answers: {}", lines.len());
    Ok(EXIT_OK)
}

pub fn stats_line(s: &SearchStats) -> String {
    format!("expanded={} generated={} elapsed_ms={}", s.expanded, s.generated, s.elapsed_ms)
}

/// Prints the outcome and returns its exit code.
pub fn report(outcome: &PlanOutcome) -> u8 {
    let code = match outcome {
        PlanOutcome::Found(plan, _) => {
            for (i, a) in plan.steps.iter().enumerate() {
                println!("{}. {a}", i + 1);
            }
            println!("plan: {} steps", plan.len());
            EXIT_OK
        }
        PlanOutcome::Unsolvable(_) => {
            println!("unsolvable");
            EXIT_UNSOLVABLE
        }
        PlanOutcome::Exhausted(_) => {
            println!("exhausted");
            EXIT_EXHAUSTED
        }
    };
    println!("{}", stats_line(outcome.stats()));
    code
}

fn run_plan(target: &Target, budget: &Budget, events: Option<&Path>) -> CmdResult {
    let (mut session, goal) = open(target)?;
    if let Some(path) = events {
        for e in read_events(path)? {
            session.post_event(e).map_err(|e| Failure::input(e.to_string()))?;
        }
    }
    let outcome = session
        .plan_job(goal, budget.config())
        .run()
        .map_err(|e| Failure::input(e.to_string()))?;
    Ok(report(&outcome))
}

fn serve(scenario: &Path, listen: &str) -> CmdResult {
    let session = load(scenario)?;
    let addr: SocketAddr = listen
        .parse()
        .map_err(|e| Failure::input(format!("--listen {listen}: {e}")))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::input(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::input(format!("--listen {listen}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Failure::input(e.to_string()))?;
        eprintln!("listening on http://{local}");
        rescue_service::serve(listener, session, shutdown_signal())
            .await
            .map_err(|e| Failure::input(e.to_string()))?;
        eprintln!("shut down");
        Ok(EXIT_OK)
    })
}

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let mut term = signal(SignalKind::terminate()).expect("install SIGTERM handler");
        tokio::select! {
            _ = tokio::signal::ctrl_c() => {}
            _ = term.recv() => {}
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokio::signal::ctrl_c().await;
    }
}
