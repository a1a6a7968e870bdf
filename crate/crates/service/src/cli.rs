//! The `factor-forge` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use factor_forge::analysis::{analyze, what_if, AnalysisError, AnalysisReport, Override, WhatIfDiff, WhatIfRequest};
use factor_forge::engine::{build_graph, explain, explain_contrast, Explanation};
use factor_forge::kb::{trade_secrets_source, KnowledgeBase};
use factor_forge::{parse_kb, serialize_kb, Literal};

use crate::api::{router, AppState};

/// Environment variable naming the default knowledge base file.
pub const KB_ENV: &str = "FACTOR_FORGE_KB";

#[derive(Debug, Parser)]
#[command(name = "factor-forge", version, about = "Case-based argumentation over a trade secrets knowledge base")]
struct Cli {
    /// Knowledge base file. Defaults to $FACTOR_FORGE_KB, then the bundled corpus.
    #[arg(long, global = true, value_name = "FILE")]
    kb: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ascribe factors, resolve issues and decide the outcome of a case.
    Analyze {
        case: String,
        #[arg(long)]
        json: bool,
    },
    /// Show why a literal holds, optionally against a contrasting literal.
    Explain {
        case: String,
        literal: String,
        #[arg(long, value_name = "LITERAL")]
        contrast: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Re-analyze a case with dimension values or factors overridden.
    Whatif {
        case: String,
        /// `dimension=value` or `factor=force-present|force-absent`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE", required = true)]
        set: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Knowledge base file tools.
    Kb(KbArgs),
}

#[derive(Debug, Args)]
struct KbArgs {
    #[command(subcommand)]
    command: KbCommand,
}

#[derive(Debug, Subcommand)]
enum KbCommand {
    /// Parse and check a knowledge base.
    Validate { file: Option<PathBuf> },
    /// Print a knowledge base in canonical form.
    Fmt {
        file: Option<PathBuf>,
        /// Fail if the file is not already canonical.
        #[arg(long, conflicts_with = "write")]
        check: bool,
        /// Rewrite the file in place.
        #[arg(long)]
        write: bool,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }

    fn usage(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match &e {
            AnalysisError::InvalidKb(vs) => {
                let lines: Vec<String> = vs.iter().map(|v| format!("  {v}")).collect();
                Failure::domain(format!("{e}\n{}", lines.join("\n")))
            }
            _ => Failure::domain(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::domain(e)
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 on a domain error, 2 on a usage error.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    // `-set` is accepted as a spelling of `--set`.
    let args = args.into_iter().map(Into::into).map(|a| if a == "-set" { "--set".to_string() } else { a });
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn kb_path(explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| std::env::var_os(KB_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

fn read_source(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::domain(format!("{}: {e}", p.display()))),
        None => Ok(trade_secrets_source().to_string()),
    }
}

fn load(path: Option<&Path>) -> Result<KnowledgeBase, Failure> {
    let text = read_source(path)?;
    parse_kb(&text).map_err(|e| Failure::domain(describe_kb_error(path, &e)))
}

fn describe_kb_error(path: Option<&Path>, e: &factor_forge::KbError) -> String {
    let name = path.map(|p| p.display().to_string()).unwrap_or_else(|| "bundled corpus".into());
    let mut s = format!("{name}: {e}");
    for v in e.violations() {
        s.push_str(&format!("\n  {v}"));
    }
    s
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Failure::domain)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn parse_literal(text: &str) -> Result<Literal, Failure> {
    text.parse().map_err(Failure::usage)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let path = kb_path(cli.kb);
    match cli.command {
        Command::Analyze { case, json } => {
            let report = analyze(&load(path.as_deref())?, &case)?;
            if json {
                print_json(out, &report)
            } else {
                render_report(out, &report)
            }
        }
        Command::Explain { case, literal, contrast, json } => {
            let kb = load(path.as_deref())?;
            let claim = parse_literal(&literal)?;
            let foil = contrast.as_deref().map(parse_literal).transpose()?;
            // analyze checks the knowledge base and the case id.
            analyze(&kb, &case)?;
            let graph = build_graph(&kb, kb.case(&case).expect("analysed case exists")).map_err(Failure::domain)?;
            match foil {
                None => {
                    let tree = explain(&graph, &claim).map_err(Failure::domain)?;
                    if json {
                        return print_json(out, &tree);
                    }
                    render_tree(out, &tree, 0)
                }
                Some(foil) => {
                    let c = explain_contrast(&graph, &claim, &foil).map_err(Failure::domain)?;
                    if json {
                        return print_json(out, &c);
                    }
                    writeln!(out, "why {claim}")?;
                    render_tree(out, &c.fact, 1)?;
                    writeln!(out, "rather than {foil}")?;
                    match (&c.foil, &c.why_not) {
                        (Some(t), _) => render_tree(out, t, 1)?,
                        (None, Some(why)) => writeln!(out, "  {why}")?,
                        (None, None) => {}
                    }
                    if let Some(issue) = &c.divergent_issue {
                        writeln!(out, "divergent issue: {issue}")?;
                    }
                    Ok(())
                }
            }
        }
        Command::Whatif { case, set, json } => {
            let kb = load(path.as_deref())?;
            let mut overrides = BTreeMap::new();
            for item in &set {
                let (key, value) = parse_setting(item)?;
                overrides.insert(key, value);
            }
            let diff = what_if(&kb, &WhatIfRequest { case: case.into(), overrides })?;
            if json {
                print_json(out, &diff)
            } else {
                render_diff(out, &diff)
            }
        }
        Command::Serve { port, host } => {
            let kb = load(path.as_deref())?;
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| Failure::usage(format!("bad listen address {host}:{port}: {e}")))?;
            serve(kb, path, addr, out)
        }
        Command::Kb(KbArgs { command }) => match command {
            KbCommand::Validate { file } => {
                let file = file.or(path);
                let kb = load(file.as_deref())?;
                writeln!(
                    out,
                    "ok: {} issues, {} factors, {} dimensions, {} cases",
                    kb.model.issues.len(),
                    kb.model.factors.len(),
                    kb.model.dimensions.len(),
                    kb.cases.len()
                )?;
                Ok(())
            }
            KbCommand::Fmt { file, check, write } => {
                let file = file.or(path);
                let text = read_source(file.as_deref())?;
                let kb = parse_kb(&text).map_err(|e| Failure::domain(describe_kb_error(file.as_deref(), &e)))?;
                let canonical = serialize_kb(&kb);
                if check {
                    if canonical != text {
                        return Err(Failure::domain("knowledge base is not in canonical form"));
                    }
                    return Ok(());
                }
                if write {
                    let Some(file) = file else {
                        return Err(Failure::usage("--write needs a file"));
                    };
                    std::fs::write(&file, canonical)?;
                    return Ok(());
                }
                write!(out, "{canonical}")?;
                Ok(())
            }
        },
    }
}

/// Splits `key=value`. The value is read as JSON when it parses, otherwise
/// as a bare string, so `3`, `true`, `[3, 14.5]`, `29/2` and
/// `force-absent` all work unquoted.
fn parse_setting(item: &str) -> Result<(String, Override), Failure> {
    let (key, raw) = item.split_once('=').ok_or_else(|| Failure::usage(format!("expected KEY=VALUE, got {item:?}")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Failure::usage(format!("empty key in {item:?}")));
    }
    let raw = raw.trim();
    let value = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let value = serde_json::from_value(value)
        .map_err(|_| Failure::usage(format!("cannot read {raw:?} as a dimension value or factor override")))?;
    Ok((key.to_string(), value))
}

fn render_report(out: &mut dyn Write, r: &AnalysisReport) -> Result<(), Failure> {
    writeln!(out, "case {}", r.case)?;
    writeln!(out, "factors:")?;
    for f in &r.factors {
        writeln!(out, "  {} ({}) {} [{}]", f.factor, f.polarity, f.label, f.sources.join(", "))?;
    }
    writeln!(out, "issues:")?;
    for i in &r.issues {
        writeln!(out, "  {}: {}", i.issue, i.resolution)?;
        for a in &i.arguments {
            writeln!(out, "    [{}] {} => {}", a.label, a.instance, a.conclusion)?;
        }
    }
    writeln!(out, "outcome: {}", r.outcome.conclusion)?;
    if !r.open_questions.is_empty() {
        writeln!(out, "open questions:")?;
        for q in &r.open_questions {
            writeln!(out, "  {} on {}: {}", q.question, q.instance, q.note)?;
        }
    }
    Ok(())
}

fn render_tree(out: &mut dyn Write, t: &Explanation, depth: usize) -> Result<(), Failure> {
    let pad = "  ".repeat(depth);
    let again = if t.repeated { " (see above)" } else { "" };
    writeln!(out, "{pad}[{}] {} ({}) => {}{again}", t.label, t.instance, t.scheme, t.conclusion)?;
    if t.repeated {
        return Ok(());
    }
    for p in &t.premises {
        writeln!(out, "{pad}    premise: {p}")?;
    }
    for s in &t.supports {
        render_tree(out, s, depth + 1)?;
    }
    for a in &t.attackers {
        writeln!(out, "{pad}  attacked via {}:", a.cq)?;
        render_tree(out, &a.by, depth + 2)?;
    }
    Ok(())
}

fn render_diff(out: &mut dyn Write, d: &WhatIfDiff) -> Result<(), Failure> {
    if d.is_empty() {
        writeln!(out, "no change for {}", d.case)?;
        return Ok(());
    }
    let held = |b: bool| if b { "present" } else { "absent" };
    for c in &d.changed_ascriptions {
        writeln!(out, "factor {}: {} -> {}", c.factor, held(c.before), held(c.after))?;
    }
    for c in &d.changed_issues {
        writeln!(out, "issue {}: {} -> {}", c.issue, c.before, c.after)?;
    }
    if let Some(c) = &d.changed_outcome {
        writeln!(out, "outcome: {} -> {}", c.before, c.after)?;
    }
    Ok(())
}

fn serve(kb: KnowledgeBase, path: Option<PathBuf>, addr: SocketAddr, out: &mut dyn Write) -> Result<(), Failure> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let state = AppState::new(kb);
        let listener = tokio::net::TcpListener::bind(addr).await?;
        writeln!(out, "listening on http://{}", listener.local_addr()?)?;
        out.flush()?;
        if let Some(path) = path {
            spawn_reloader(state.clone(), path);
        }
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

/// Reloads the knowledge base file on SIGHUP. A file that fails to parse
/// leaves the running knowledge base in place.
#[cfg(unix)]
fn spawn_reloader(state: Arc<AppState>, path: PathBuf) {
    use tokio::signal::unix::{signal, SignalKind};
    tokio::spawn(async move {
        let Ok(mut hup) = signal(SignalKind::hangup()) else { return };
        while hup.recv().await.is_some() {
            match load(Some(&path)) {
                Ok(kb) => {
                    state.swap_kb(kb);
                    eprintln!("reloaded {}", path.display());
                }
                Err(f) => eprintln!("reload failed: {}", f.message),
            }
        }
    });
}

#[cfg(not(unix))]
fn spawn_reloader(_state: Arc<AppState>, _path: PathBuf) {}
