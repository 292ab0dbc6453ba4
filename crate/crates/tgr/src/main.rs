//! Command-line front end: batch queries over graphs, rules, precedences,
//! and sequences in the text format.
//!
//! Exit codes: 0 when the queried property holds (or the computation
//! succeeded), 1 when it does not hold, 2 on usage or validation errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tgr::embedding::{embeds, EmbeddingWitness, Variant};
use tgr::graph::TermGraph;
use tgr::morphism::{collapses, isomorphic, Morphism};
use tgr::orders::{
    certify_derivation, good_pair, lpo_compare, orient_grs, LpoOutcome, OrderKind, Orientation,
    ORIENTATION_CAVEAT,
};
use tgr::parse::{graph_text, parse_workspace, print_workspace, Workspace};
use tgr::rewriting::{derive, DerivationStatus, Strategy};

/// Built-in copy of the example file shipped under fixtures/.
const FIXTURES: &str = include_str!("../../../fixtures/examples.tg");

#[derive(Parser)]
#[command(name = "tgr", version, about = "Acyclic term-graph rewriting and termination orders")]
struct Cli {
    /// Emit machine-readable JSON instead of the human report.
    #[arg(long, global = true)]
    json: bool,
    /// Print the built-in example fixtures as a parseable file and exit.
    #[arg(long)]
    fixtures: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Final,
    Attempt1,
    Attempt2,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Final => Variant::Final,
            VariantArg::Attempt1 => Variant::Attempt1,
            VariantArg::Attempt2 => Variant::Attempt2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Lpo,
    Embedding,
}

impl From<OrderArg> for OrderKind {
    fn from(o: OrderArg) -> OrderKind {
        match o {
            OrderArg::Lpo => OrderKind::Lpo,
            OrderArg::Embedding => OrderKind::StrictEmbedding,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    LeftmostFirst,
    AllFirst,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::LeftmostFirst => Strategy::LeftmostFirst,
            StrategyArg::AllFirst => Strategy::AllFirst,
        }
    }
}

#[derive(Args)]
struct FileArg {
    /// Input file in the tgr text format; `-` reads standard input.
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and print its canonical form.
    Parse(FileArg),
    /// Does one graph collapse to another (have a more shared image)?
    Collapse {
        /// Source graph name.
        #[arg(long)]
        from: String,
        /// Target graph name.
        #[arg(long)]
        to: String,
        #[command(flatten)]
        file: FileArg,
    },
    /// Are two graphs isomorphic (mutually collapsing)?
    Iso {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[command(flatten)]
        file: FileArg,
    },
    /// Does the larger graph embed the smaller one?
    Embed {
        #[arg(long)]
        larger: String,
        #[arg(long)]
        smaller: String,
        /// Precedence name (file-defined, or built-in `minimal`/`sharing`).
        #[arg(long, default_value = "minimal")]
        prec: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Final)]
        variant: VariantArg,
        #[command(flatten)]
        file: FileArg,
    },
    /// Is the first graph strictly below the second in the path order?
    Lpo {
        #[arg(long)]
        smaller: String,
        #[arg(long)]
        larger: String,
        #[arg(long, default_value = "minimal")]
        prec: String,
        #[command(flatten)]
        file: FileArg,
    },
    /// Orient every rule of a file's rewrite system.
    Orient {
        /// File whose rules form the system.
        #[arg(long)]
        grs: PathBuf,
        #[arg(long, default_value = "minimal")]
        prec: String,
        /// Order to orient in; embedding is the strict (non-mutual) part of
        /// the final embedding relation.
        #[arg(long, value_enum, default_value_t = OrderArg::Embedding)]
        order: OrderArg,
        /// Treat each variable as a private constant related only to itself.
        #[arg(long)]
        vars_as_constants: bool,
    },
    /// Rewrite a graph with the file's rules.
    Rewrite {
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::LeftmostFirst)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        /// Print every intermediate graph.
        #[arg(long)]
        steps: bool,
        /// Print only the final graph.
        #[arg(long)]
        normal_form: bool,
        #[command(flatten)]
        file: FileArg,
    },
    /// Derive from a graph and check every step for strict descent.
    Certify {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "minimal")]
        prec: String,
        #[arg(long, value_enum, default_value_t = OrderArg::Lpo)]
        order: OrderArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::LeftmostFirst)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        #[command(flatten)]
        file: FileArg,
    },
    /// Find the least good pair of a declared sequence.
    GoodPair {
        #[arg(long)]
        sequence: String,
        #[arg(long, default_value = "minimal")]
        prec: String,
        #[command(flatten)]
        file: FileArg,
    },
}

/// Usage or validation failure: exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

fn load(file: &PathBuf) -> Result<Workspace, Usage> {
    let text = if file.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Usage(e.to_string()))?
    } else {
        std::fs::read_to_string(file)
            .map_err(|e| Usage(format!("{}: {e}", file.display())))?
    };
    Ok(parse_workspace(&text)?)
}

fn graph<'w>(ws: &'w Workspace, name: &str) -> Result<&'w TermGraph, Usage> {
    ws.graphs.get(name).ok_or_else(|| Usage(format!("graph {name} is not defined")))
}

fn witness_pairs(from: &TermGraph, to: &TermGraph, m: &Morphism) -> Vec<(String, String)> {
    m.map
        .iter()
        .map(|(a, b)| (from.name(*a).to_string(), to.name(*b).to_string()))
        .collect()
}

fn witness_json(pairs: &[(String, String)]) -> Value {
    Value::Array(pairs.iter().map(|(a, b)| json!([a, b])).collect())
}

fn print_witness(pairs: &[(String, String)]) {
    for (a, b) in pairs {
        println!("  {a} -> {b}");
    }
}

fn emit(json_mode: bool, value: Value, human: impl FnOnce()) {
    if json_mode {
        println!("{value}");
    } else {
        human();
    }
}

fn run(cli: Cli) -> Result<bool, Usage> {
    let json_mode = cli.json;
    if cli.fixtures {
        if json_mode {
            println!("{}", json!({ "command": "fixtures", "text": FIXTURES }));
        } else {
            print!("{FIXTURES}");
        }
        return Ok(true);
    }
    let Some(command) = cli.command else {
        return Err(Usage("a subcommand is required (try --help)".into()));
    };
    match command {
        Command::Parse(file) => {
            let ws = load(&file.file)?;
            let printed = print_workspace(&ws);
            emit(
                json_mode,
                json!({
                    "command": "parse",
                    "graphs": ws.graphs.keys().collect::<Vec<_>>(),
                    "rules": ws.rules.iter().map(|r| r.name()).collect::<Vec<_>>(),
                    "precedences": ws.precedences.keys().collect::<Vec<_>>(),
                    "sequences": ws.sequences.keys().collect::<Vec<_>>(),
                    "canonical": printed,
                }),
                || print!("{printed}"),
            );
            Ok(true)
        }
        Command::Collapse { from, to, file } => {
            let ws = load(&file.file)?;
            let (g, h) = (graph(&ws, &from)?, graph(&ws, &to)?);
            let witness = collapses(g, h);
            let pairs = witness.as_ref().map(|m| witness_pairs(g, h, m)).unwrap_or_default();
            emit(
                json_mode,
                json!({
                    "command": "collapse",
                    "from": from,
                    "to": to,
                    "collapses": witness.is_some(),
                    "witness": witness_json(&pairs),
                }),
                || {
                    if witness.is_some() {
                        println!("{from} collapses to {to}");
                        print_witness(&pairs);
                    } else {
                        println!("{from} does not collapse to {to}");
                    }
                },
            );
            Ok(witness.is_some())
        }
        Command::Iso { left, right, file } => {
            let ws = load(&file.file)?;
            let iso = isomorphic(graph(&ws, &left)?, graph(&ws, &right)?);
            emit(
                json_mode,
                json!({
                    "command": "iso",
                    "left": left,
                    "right": right,
                    "isomorphic": iso,
                }),
                || {
                    println!(
                        "{left} and {right} are {}isomorphic",
                        if iso { "" } else { "not " }
                    )
                },
            );
            Ok(iso)
        }
        Command::Embed { larger, smaller, prec, variant, file } => {
            let ws = load(&file.file)?;
            let p = ws.precedence(&prec)?;
            let (s, t) = (graph(&ws, &larger)?, graph(&ws, &smaller)?);
            let v: Variant = variant.into();
            let witness: Option<EmbeddingWitness> = embeds(s, t, &p, v)?;
            let (direction, pairs) = match (&witness, v) {
                (Some(w), Variant::Attempt1) => {
                    ("smaller-into-larger", witness_pairs(t, s, &w.morphism))
                }
                (Some(w), _) => ("larger-onto-smaller", witness_pairs(s, t, &w.morphism)),
                (None, Variant::Attempt1) => ("smaller-into-larger", Vec::new()),
                (None, _) => ("larger-onto-smaller", Vec::new()),
            };
            emit(
                json_mode,
                json!({
                    "command": "embed",
                    "larger": larger,
                    "smaller": smaller,
                    "variant": v.as_str(),
                    "precedence": prec,
                    "embedded": witness.is_some(),
                    "map_direction": direction,
                    "witness": witness_json(&pairs),
                }),
                || {
                    if witness.is_some() {
                        println!("{larger} embeds {smaller} ({} variant)", v.as_str());
                        print_witness(&pairs);
                    } else {
                        println!("no embedding of {smaller} in {larger} ({} variant)", v.as_str());
                    }
                },
            );
            Ok(witness.is_some())
        }
        Command::Lpo { smaller, larger, prec, file } => {
            let ws = load(&file.file)?;
            let p = ws.precedence(&prec)?;
            let outcome =
                lpo_compare(graph(&ws, &smaller)?.dag(), graph(&ws, &larger)?.dag(), &p)?;
            let (word, reason) = match &outcome {
                LpoOutcome::Holds => ("holds", None),
                LpoOutcome::Fails => ("fails", None),
                LpoOutcome::Inapplicable(r) => ("inapplicable", Some(r.clone())),
            };
            emit(
                json_mode,
                json!({
                    "command": "lpo",
                    "smaller": smaller,
                    "larger": larger,
                    "precedence": prec,
                    "outcome": word,
                    "reason": reason,
                    "toplist_comparison": "prefix-order",
                }),
                || {
                    println!("{smaller} <lpo {larger}: {word}");
                    if let Some(r) = &reason {
                        println!("  reason: {r}");
                    }
                    println!("  (top lists compare lexicographically, proper prefix smaller)");
                },
            );
            Ok(outcome.holds())
        }
        Command::Orient { grs, prec, order, vars_as_constants } => {
            let ws = load(&grs)?;
            let p = ws.precedence(&prec)?;
            let kind: OrderKind = order.into();
            let verdicts = orient_grs(&ws.grs(), &p, vars_as_constants, kind)?;
            let all_decreasing = verdicts
                .iter()
                .all(|v| matches!(v.verdict, Orientation::Decreasing));
            let rules_json: Vec<Value> = verdicts
                .iter()
                .map(|v| {
                    let (word, reason) = match &v.verdict {
                        Orientation::Decreasing => ("decreasing", None),
                        Orientation::Increasing => ("increasing", None),
                        Orientation::Incomparable => ("incomparable", None),
                        Orientation::Inapplicable(r) => ("inapplicable", Some(r.clone())),
                    };
                    json!({ "rule": v.rule, "verdict": word, "reason": reason })
                })
                .collect();
            emit(
                json_mode,
                json!({
                    "command": "orient",
                    "order": match kind {
                        OrderKind::Lpo => "lpo",
                        OrderKind::StrictEmbedding => "strict-embedding",
                    },
                    "precedence": prec,
                    "rules": rules_json,
                    "all_decreasing": all_decreasing,
                    "caveat": ORIENTATION_CAVEAT,
                }),
                || {
                    for v in &verdicts {
                        let word = match &v.verdict {
                            Orientation::Decreasing => "decreasing".to_string(),
                            Orientation::Increasing => "increasing".to_string(),
                            Orientation::Incomparable => "incomparable".to_string(),
                            Orientation::Inapplicable(r) => format!("inapplicable ({r})"),
                        };
                        println!("rule {}: {word}", v.rule);
                    }
                    if kind == OrderKind::StrictEmbedding {
                        println!("  (strict = non-mutual embedding)");
                    }
                    println!("caveat: {ORIENTATION_CAVEAT}");
                },
            );
            Ok(all_decreasing)
        }
        Command::Rewrite { graph: name, strategy, max_steps, steps, normal_form, file } => {
            let ws = load(&file.file)?;
            let start = graph(&ws, &name)?;
            let d = derive(start, &ws.grs(), strategy.into(), max_steps);
            let status = match d.status {
                DerivationStatus::NormalForm => json!({ "kind": "normal-form" }),
                DerivationStatus::BudgetExhausted => json!({ "kind": "budget-exhausted" }),
                DerivationStatus::CycleDetected(i, j) => {
                    json!({ "kind": "cycle-detected", "first": i, "second": j })
                }
            };
            let final_graph = d.graphs.last().unwrap();
            let steps_json: Vec<Value> = d
                .steps
                .iter()
                .enumerate()
                .map(|(k, (rule, node))| {
                    json!({
                        "index": k + 1,
                        "rule": rule,
                        "node": d.graphs[k].name(*node),
                    })
                })
                .collect();
            emit(
                json_mode,
                json!({
                    "command": "rewrite",
                    "start": name,
                    "strategy": match Strategy::from(strategy) {
                        Strategy::LeftmostFirst => "leftmost-first",
                        Strategy::AllFirst => "all-first",
                    },
                    "status": status,
                    "steps": steps_json,
                    "final": graph_text("result", final_graph),
                }),
                || {
                    if steps && !normal_form {
                        print!("{}", graph_text(&format!("{name}-0"), &d.graphs[0]));
                    }
                    for (k, (rule, node)) in d.steps.iter().enumerate() {
                        println!(
                            "step {}: rule {rule} at node {}",
                            k + 1,
                            d.graphs[k].name(*node)
                        );
                        if steps && !normal_form {
                            print!("{}", graph_text(&format!("{name}-{}", k + 1), &d.graphs[k + 1]));
                        }
                    }
                    match d.status {
                        DerivationStatus::NormalForm => {
                            println!("normal form after {} steps", d.steps.len())
                        }
                        DerivationStatus::BudgetExhausted => {
                            println!("budget of {max_steps} steps exhausted")
                        }
                        DerivationStatus::CycleDetected(i, j) => {
                            println!("cycle detected: graphs {i} and {j} are isomorphic")
                        }
                    }
                    print!("{}", graph_text("final", final_graph));
                },
            );
            Ok(true)
        }
        Command::Certify { graph: name, prec, order, strategy, max_steps, file } => {
            let ws = load(&file.file)?;
            let p = ws.precedence(&prec)?;
            let kind: OrderKind = order.into();
            let d = derive(graph(&ws, &name)?, &ws.grs(), strategy.into(), max_steps);
            let cert = certify_derivation(&d, &p, kind)?;
            let steps_json: Vec<Value> = cert
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "index": s.index,
                        "rule": s.rule,
                        "decreasing": s.decreasing,
                        "note": s.note,
                    })
                })
                .collect();
            emit(
                json_mode,
                json!({
                    "command": "certify",
                    "start": name,
                    "order": match kind {
                        OrderKind::Lpo => "lpo",
                        OrderKind::StrictEmbedding => "strict-embedding",
                    },
                    "precedence": prec,
                    "steps": steps_json,
                    "descending": cert.descending,
                }),
                || {
                    for s in &cert.steps {
                        println!(
                            "step {} ({}): {}{}",
                            s.index,
                            s.rule,
                            if s.decreasing { "decreasing" } else { "not decreasing" },
                            s.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
                        );
                    }
                    if kind == OrderKind::StrictEmbedding {
                        println!("  (strict = non-mutual embedding)");
                    }
                    println!(
                        "derivation is {}",
                        if cert.descending { "descending" } else { "not descending" }
                    );
                },
            );
            Ok(cert.descending)
        }
        Command::GoodPair { sequence, prec, file } => {
            let ws = load(&file.file)?;
            let p = ws.precedence(&prec)?;
            let names = ws
                .sequences
                .get(&sequence)
                .ok_or_else(|| Usage(format!("sequence {sequence} is not defined")))?;
            let graphs: Vec<TermGraph> = names
                .iter()
                .map(|n| graph(&ws, n).cloned())
                .collect::<Result<_, _>>()?;
            let result = good_pair(&graphs, &p)?;
            let mut payload: BTreeMap<&str, Value> = BTreeMap::new();
            payload.insert("command", json!("good-pair"));
            payload.insert("sequence", json!(sequence));
            payload.insert("precedence", json!(prec));
            payload.insert("good", json!(result.is_some()));
            if let Some(gp) = &result {
                let pairs =
                    witness_pairs(&graphs[gp.j - 1], &graphs[gp.i - 1], &gp.witness.morphism);
                payload.insert("i", json!(gp.i));
                payload.insert("j", json!(gp.j));
                payload.insert("witness", witness_json(&pairs));
            }
            let value = Value::Object(
                payload.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            );
            emit(json_mode, value, || match &result {
                Some(gp) => {
                    println!(
                        "good pair ({}, {}): {} embeds {}",
                        gp.i,
                        gp.j,
                        names[gp.j - 1],
                        names[gp.i - 1]
                    );
                    let pairs = witness_pairs(
                        &graphs[gp.j - 1],
                        &graphs[gp.i - 1],
                        &gp.witness.morphism,
                    );
                    print_witness(&pairs);
                }
                None => println!("the sequence is bad: no good pair"),
            });
            Ok(result.is_some())
        }
    }
}

fn main() -> ExitCode {
    // Writing into a closed pipe (e.g. `tgr ... | head`) should end the
    // process quietly, not panic mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
