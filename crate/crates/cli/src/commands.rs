//! The `pkf` verbs. Exit status: 0 success (or conforms), 1 domain failure,
//! 2 unreadable or malformed input.

use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use pk_forge::cq::{catalog, run as run_query};
use pk_forge::exec::{overrun_report, start_execution_with, ExecError, Session, SessionOptions};
use pk_forge::io::{ntriples, parse_turtle, serialize, Format, ParseDiagnostic, SerializationOptions};
use pk_forge::mapper::lower_execution;
use pk_forge::model::{parse_timestamp, version_chain, OccurrenceKind, Timestamp};
use pk_forge::store::Graph;
use pk_forge::term::RdfTerm;
use pk_forge::validate::{builtin_rules, rules_from_list, validate};
use pk_forge::vocab::{default_prefixes, pko, Iri, PrefixMap};

use crate::args::{parse_binding, parse_iri};
use crate::elicitation::{self, ElicitationDoc};
use crate::now;
use crate::service::{router, AppState};
use crate::store::{CommitError, Store};

pub const DEFAULT_BASE: &str = "https://example.org/";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

#[derive(Debug, Parser)]
#[command(name = "pkf", version, about = "Procedural knowledge graphs: convert, validate, query, record executions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Re-serialize an RDF document
    Convert(ConvertArgs),
    /// Check a graph against the shape rules
    Validate(ValidateArgs),
    /// Run a competency query
    Query(QueryArgs),
    /// Add documents to a store snapshot, if the result conforms
    Ingest(IngestArgs),
    /// Record an execution from a script of events
    Exec(ExecArgs),
    /// List the versions of an abstract procedure, oldest first
    Versions(VersionsArgs),
    /// Serve the HTTP API
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InputFormat {
    Turtle,
    Ntriples,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Turtle,
    Ntriples,
    Jsonld,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Input file, or `-` for stdin
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Defaults to N-Triples for `.nt` files and Turtle otherwise
    #[arg(long)]
    pub from: Option<InputFormat>,
    #[arg(long)]
    pub to: OutputFormat,
    /// Defaults to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// File of rule ids, one per line; defaults to all rules
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub cq: String,
    /// `name=value`, repeatable
    #[arg(long = "bind", value_parser = parse_binding)]
    pub bindings: Vec<(String, RdfTerm)>,
    #[arg(long, conflicts_with = "json")]
    pub tsv: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Snapshot to update; created if missing
    #[arg(long, env = "PKF_STORE")]
    pub store: PathBuf,
    /// Turtle, N-Triples (`.nt`) or elicitation JSON (`.json`); repeatable
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Namespace for procedures minted from elicitation documents
    #[arg(long, env = "PKF_BASE", default_value = DEFAULT_BASE)]
    pub base: String,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "store"])))]
pub struct ExecArgs {
    /// Graph holding the procedure
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Snapshot holding the procedure; the finished trace is added to it
    #[arg(long, env = "PKF_STORE")]
    pub store: Option<PathBuf>,
    #[arg(long)]
    pub procedure: String,
    #[arg(long)]
    pub agent: String,
    /// Allow several steps to be open at once
    #[arg(long)]
    pub parallel_steps: bool,
    /// Event script, or `-` for stdin
    #[arg(long, default_value = "-")]
    pub events: PathBuf,
    /// Write the finished trace as Turtle
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the overrun report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VersionsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// The abstract procedure
    #[arg(long)]
    pub procedure: String,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Snapshot backing the service; in-memory if absent
    #[arg(long, env = "PKF_STORE")]
    pub store: Option<PathBuf>,
    #[arg(long, env = "PKF_LISTEN", default_value = DEFAULT_LISTEN)]
    pub listen: SocketAddr,
    #[arg(long, env = "PKF_BASE", default_value = DEFAULT_BASE)]
    pub base: String,
    /// Origin allowed by CORS; any origin if absent
    #[arg(long, env = "PKF_CORS_ORIGIN")]
    pub cors_origin: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    /// The command already reported why it failed.
    #[error("")]
    Failed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) | CliError::Failed => 1,
        }
    }
}

type CliResult = Result<(), CliError>;

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Convert(a) => convert(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Query(a) => query(a),
        Command::Ingest(a) => ingest(a),
        Command::Exec(a) => exec(a),
        Command::Versions(a) => versions(a),
        Command::Serve(a) => serve(a),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map(|_| ())
    };
    result.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn diagnostics(path: &Path, diags: &[ParseDiagnostic]) -> CliError {
    let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
    CliError::Input(lines.join("\n"))
}

fn is_ntriples(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("nt"))
}

/// Parses `path` as N-Triples or Turtle; warnings go to stderr.
fn read_graph_as(path: &Path, ntriples_input: bool) -> Result<(Graph, PrefixMap), CliError> {
    let text = read_text(path)?;
    if ntriples_input {
        let g = ntriples::parse(&text).map_err(|d| diagnostics(path, &[d]))?;
        return Ok((g, PrefixMap::new()));
    }
    let doc = parse_turtle(&text).map_err(|d| diagnostics(path, &d))?;
    for w in &doc.warnings {
        eprintln!("{}:{w}", path.display());
    }
    Ok((doc.graph, doc.prefixes))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    read_graph_as(path, is_ntriples(path)).map(|(g, _)| g)
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Domain(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Domain(format!("stdout: {e}")))
        }
    }
}

fn iri_arg(text: &str) -> Result<Iri, CliError> {
    parse_iri(text).map_err(|e| CliError::Input(e.to_string()))
}

fn convert(a: ConvertArgs) -> CliResult {
    let nt = match a.from {
        Some(InputFormat::Ntriples) => true,
        Some(InputFormat::Turtle) => false,
        None => is_ntriples(&a.input),
    };
    let (graph, mut prefixes) = read_graph_as(&a.input, nt)?;
    prefixes.extend_missing(&default_prefixes());
    let format = match a.to {
        OutputFormat::Turtle => Format::Turtle,
        OutputFormat::Ntriples => Format::NTriples,
        OutputFormat::Jsonld => Format::JsonLd,
    };
    write_output(a.out.as_deref(), &serialize(&graph, &SerializationOptions::new(format, prefixes)))
}

fn validate_cmd(a: ValidateArgs) -> CliResult {
    let graph = read_graph(&a.input)?;
    let rules = match &a.rules {
        Some(p) => rules_from_list(&read_text(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => builtin_rules(),
    };
    let report = validate(&graph, &rules);
    write_output(None, &if a.json { report.to_json() } else { report.to_text() })?;
    if report.conforms {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

fn query(a: QueryArgs) -> CliResult {
    let graph = read_graph(&a.input)?;
    let q = catalog().get(&a.cq).map_err(|e| CliError::Domain(e.to_string()))?;
    let bindings = a.bindings.into_iter().collect();
    let table = run_query(&graph, q, &bindings).map_err(|e| CliError::Domain(e.to_string()))?;
    write_output(None, &if a.json { table.to_json() } else { table.to_tsv() })
}

fn open_store(path: &Path) -> Result<Store, CliError> {
    Store::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn commit(store: &mut Store, candidate: Graph) -> CliResult {
    match store.commit(candidate) {
        Ok(report) => {
            if !report.findings.is_empty() {
                eprint!("{}", report.to_text());
            }
            Ok(())
        }
        Err(CommitError::Rejected(report)) => {
            eprint!("{}", report.to_text());
            eprintln!("store left unchanged");
            Err(CliError::Failed)
        }
        Err(e) => Err(CliError::Domain(e.to_string())),
    }
}

fn ingest(a: IngestArgs) -> CliResult {
    let mut store = open_store(&a.store)?;
    let base = iri_arg(&a.base)?;
    let mut candidate = store.graph().clone();
    let mut minted = Vec::new();
    for path in &a.inputs {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let doc: ElicitationDoc = serde_json::from_str(&read_text(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let sep = if base.as_str().ends_with(['/', '#']) { "" } else { "/" };
            let id = Iri::new(format!("{base}{sep}procedure/{}", uuid::Uuid::new_v4())).expect("minted IRI is valid");
            let previous = match &doc.procedure.version_of {
                Some(v) => version_chain(&candidate, &iri_arg(v)?).ok().and_then(|mut c| c.pop()),
                None => None,
            };
            let g = elicitation::lower(&doc, &id, previous)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            candidate.merge(&g);
            minted.push(id);
        } else {
            candidate.merge(&read_graph(path)?);
        }
    }
    commit(&mut store, candidate)?;
    write_output(None, &minted.iter().map(|i| format!("{i}\n")).collect::<String>())
}

/// One line of an exec script, after its optional `@timestamp`.
#[derive(Debug, Clone, PartialEq)]
enum Event {
    Start { step: Iri, agent: Option<Iri> },
    End { step: Iri },
    Question(String),
    Feedback(String),
    Issue { error: Iri, cause: Option<String> },
    Finish(Iri),
}

fn parse_event(line: &str) -> Result<(Option<Timestamp>, Event), String> {
    let mut rest = line.trim();
    let mut at = None;
    if let Some(r) = rest.strip_prefix('@') {
        let (ts, tail) = r.split_once(char::is_whitespace).unwrap_or((r, ""));
        at = Some(parse_timestamp(ts).ok_or_else(|| format!("`{ts}` is not a dateTime with offset"))?);
        rest = tail.trim_start();
    }
    let (verb, args) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let args = args.trim();
    let iri = |s: &str| parse_iri(s).map_err(|e| e.to_string());
    let mut words = args.split_whitespace();
    let text = |what: &str| {
        if args.is_empty() {
            Err(format!("`{verb}` needs {what}"))
        } else {
            Ok(args.to_string())
        }
    };
    let event = match verb {
        "start" => Event::Start {
            step: iri(words.next().ok_or("`start` needs a step")?)?,
            agent: words.next().map(iri).transpose()?,
        },
        "end" => Event::End {
            step: iri(words.next().ok_or("`end` needs a step")?)?,
        },
        "question" => Event::Question(text("a question")?),
        "feedback" => Event::Feedback(text("some text")?),
        "issue" => {
            let error = iri(words.next().ok_or("`issue` needs an error")?)?;
            let cause: Vec<&str> = words.by_ref().collect();
            Event::Issue {
                error,
                cause: (!cause.is_empty()).then(|| cause.join(" ")),
            }
        }
        "finish" => Event::Finish(match words.next() {
            Some(s) => iri(s)?,
            None => pko::COMPLETED.iri(),
        }),
        other => return Err(format!("unknown event `{other}`")),
    };
    if matches!(event, Event::End { .. } | Event::Finish(_)) && words.next().is_some() {
        return Err(format!("too many arguments to `{verb}`"));
    }
    Ok((at, event))
}

fn apply(session: &mut Session, event: Event, at: Timestamp) -> Result<Option<pk_forge::model::ExecutionTrace>, ExecError> {
    match event {
        Event::Start { step, agent: Some(a) } => session.start_step_as(&step, &a, at).map(|_| None),
        Event::Start { step, agent: None } => session.start_step(&step, at).map(|_| None),
        Event::End { step } => session.end_step(&step, at).map(|_| None),
        Event::Question(text) => session
            .record_occurrence(OccurrenceKind::Question { text, addressed_by: None }, None, at)
            .map(|_| None),
        Event::Feedback(text) => {
            let about = session.trace().procedure.clone();
            session
                .record_occurrence(OccurrenceKind::Feedback { text, about }, None, at)
                .map(|_| None)
        }
        Event::Issue { error, cause } => session
            .record_occurrence(OccurrenceKind::Issue { error, cause, solution: None }, None, at)
            .map(|_| None),
        Event::Finish(status) => session.finish(&status, at).map(Some),
    }
}

fn exec(a: ExecArgs) -> CliResult {
    let mut store = match &a.store {
        Some(p) => Some(open_store(p)?),
        None => None,
    };
    let graph = match (&store, &a.input) {
        (Some(s), _) => s.graph().clone(),
        (None, Some(p)) => read_graph(p)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let procedure = iri_arg(&a.procedure)?;
    let agent = iri_arg(&a.agent)?;
    let script = read_text(&a.events)?;
    let mut events = Vec::new();
    for (n, line) in script.lines().enumerate() {
        let line = line.split_once(" #").map_or(line, |(l, _)| l).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (at, event) = parse_event(line).map_err(|e| CliError::Input(format!("{}:{}: {e}", a.events.display(), n + 1)))?;
        events.push((n + 1, at, event));
    }

    let first = events.iter().find_map(|(_, at, _)| *at).unwrap_or_else(now);
    let options = SessionOptions {
        parallel_steps: a.parallel_steps,
    };
    let mut session = start_execution_with(&graph, &procedure, &agent, first, options)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    let mut trace = None;
    let mut last = first;
    for (line, at, event) in events {
        if trace.is_some() {
            return Err(CliError::Domain(format!("{}:{line}: the execution is already finished", a.events.display())));
        }
        let at = at.unwrap_or_else(now);
        last = at;
        trace = apply(&mut session, event, at).map_err(|e| CliError::Domain(format!("{}:{line}: {e}", a.events.display())))?;
    }
    let trace = match trace {
        Some(t) => t,
        None => session
            .finish(&pko::COMPLETED.iri(), last)
            .map_err(|e| CliError::Domain(e.to_string()))?,
    };

    let lowered = lower_execution(&trace);
    if let Some(out) = &a.out {
        let text = serialize(&lowered, &SerializationOptions::new(Format::Turtle, default_prefixes()));
        write_output(Some(out), &text)?;
    }
    if let Some(store) = &mut store {
        let mut candidate = store.graph().clone();
        candidate.merge(&lowered);
        commit(store, candidate)?;
    }
    let report = overrun_report(&trace, &graph);
    write_output(None, &if a.json { report.to_json() } else { report.to_text() })
}

fn versions(a: VersionsArgs) -> CliResult {
    let graph = read_graph(&a.input)?;
    let procedure = iri_arg(&a.procedure)?;
    let chain = version_chain(&graph, &procedure).map_err(|e| CliError::Domain(e.to_string()))?;
    if chain.is_empty() {
        return Err(CliError::Domain(format!("<{procedure}> has no versions")));
    }
    write_output(None, &chain.iter().map(|v| format!("{v}\n")).collect::<String>())
}

fn serve(a: ServeArgs) -> CliResult {
    let store = match &a.store {
        Some(p) => open_store(p)?,
        None => Store::in_memory(Graph::new()),
    };
    let base = iri_arg(&a.base)?;
    let origin = a
        .cors_origin
        .as_deref()
        .map(|o| o.parse().map_err(|_| CliError::Input(format!("bad CORS origin `{o}`"))))
        .transpose()?;
    let app = router(AppState::new(store, base), origin);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Domain(e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(a.listen)
            .await
            .map_err(|e| CliError::Domain(format!("cannot listen on {}: {e}", a.listen)))?;
        tracing::info!("listening on {}", a.listen);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Domain(e.to_string()))
    })
}
