use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hopfx::{hopf, models, suites, tables};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hopfx", version, about = "Exact checks for interacting Hopf algebras and spider diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite on a model.
    Verify {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Recompute a printed table and diff it against the stored values.
    Table {
        #[arg(long)]
        id: Option<String>,
        /// List the table ids instead.
        #[arg(long)]
        list: bool,
    },
    /// Compile the diagrams of a file against a bundle.
    Eval {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "red-green")]
        bundle: String,
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Check a rewrite-rule pack or rule file.
    Rules {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "std")]
        pack: String,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Write the Hopf algebra structure constants as JSON.
    Export {
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the model ids.
    Models,
}

enum Outcome {
    Done(Value, String, bool),
    Usage(String),
}

fn threads() -> usize {
    std::env::var("HOPFX_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn suite_outcome(r: Result<suites::SuiteReport, suites::SuiteError>) -> Outcome {
    match r {
        Ok(rep) => {
            let ok = rep.ok();
            let mut summary = rep.summary();
            for c in rep.checks.iter().filter(|c| c.status == hopfx::report::Status::Fail) {
                summary.push_str(&format!("\n  FAIL {}: {}", c.id, c.detail.as_deref().unwrap_or("")));
            }
            Outcome::Done(serde_json::to_value(&rep).expect("report serialises"), summary, ok)
        }
        Err(e) => Outcome::Usage(e.to_string()),
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Verify { model, suite } => suite_outcome(suites::run_suite(&model, &suite)),
        Command::Table { list: true, .. } => {
            let ids = tables::table_ids();
            Outcome::Done(json!({ "schema": 1, "tables": ids }), format!("{} tables", ids.len()), true)
        }
        Command::Table { id: None, .. } => Outcome::Usage("table needs --id or --list".into()),
        Command::Table { id: Some(id), .. } => match tables::run_table(&id) {
            Ok(t) => {
                let bad = t.failures().count();
                let mut summary = format!("{} ({}): {} rows, {} mismatches", t.id, t.title, t.rows.len(), bad);
                for row in t.failures() {
                    summary.push_str(&format!("\n  {} printed {} computed {}", row.lhs, row.expected, row.computed));
                }
                let mut v = serde_json::to_value(&t).expect("table serialises");
                v["schema"] = json!(1);
                Outcome::Done(v, summary, bad == 0)
            }
            Err(e @ tables::TableError::Unknown { .. }) => Outcome::Usage(e.to_string()),
            Err(e) => Outcome::Done(json!({ "schema": 1, "id": id, "error": e.to_string() }), e.to_string(), false),
        },
        Command::Eval { model, bundle, diagram } => match read(&diagram) {
            Err(e) => Outcome::Usage(e),
            Ok(text) => match suites::eval_diagrams(&model, &bundle, &text) {
                Ok(rep) => {
                    let summary = format!("{} diagrams on {} ({})", rep.diagrams.len(), rep.model, rep.bundle);
                    Outcome::Done(serde_json::to_value(&rep).expect("report serialises"), summary, true)
                }
                Err(e) => Outcome::Usage(e.to_string()),
            },
        },
        Command::Rules { model, pack, rules } => {
            let text = match rules.as_ref().map(read).transpose() {
                Ok(t) => t,
                Err(e) => return Outcome::Usage(e),
            };
            suite_outcome(suites::run_rules(&model, &pack, text.as_deref()))
        }
        Command::Export { model, out } => match models::build(&model) {
            Err(e) => Outcome::Usage(e.to_string()),
            Ok(m) => match fs::write(&out, hopf::to_json(&m.hopf)) {
                Ok(()) => Outcome::Done(
                    json!({ "schema": 1, "model": model, "out": out.display().to_string(), "dim": m.hopf.dim() }),
                    format!("wrote {}", out.display()),
                    true,
                ),
                Err(e) => Outcome::Usage(format!("{}: {e}", out.display())),
            },
        },
        Command::Models => Outcome::Done(json!({ "schema": 1, "models": models::REGISTRY }), format!("{} models", models::REGISTRY.len()), true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Outcome::Done(v, summary, ok) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            eprintln!("{summary} [threads {}]", threads());
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Outcome::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
