//! Text format for graphs, rules, precedences, and sequences.
//!
//! ```text
//! graph T {
//!   1: f(2, 2)
//!   2: a
//!   root: 1
//! }
//!
//! rule share {
//!   1: f(2, 3)   2: a   3: a
//!   4: f(5, 5)   5: a
//!   lhs: 1
//!   rhs: 4
//! }
//!
//! precedence chain { f{1,1} < g{1}   g{1} < f{1,2} }
//! precedence share-aware { sharing }
//!
//! sequence run { T1 T2 T3 }
//! ```
//!
//! Node lines are `id: symbol(id, …)` or `id: ?var`; a graph closes with a
//! `root:` line (or `inlets:` for a multi-entry dag), a rule with `lhs:` and
//! `rhs:` over one shared node pool. Precedence entries are strict pairs of
//! tops, where a bare name is shorthand for an arity-0 top and the `sharing`
//! directive adds the coarsening generator. `#` starts a line comment.
//!
//! Parsed node ids are renamed to a dense range in declaration order;
//! original spellings are kept for display. Symbol arities are inferred from
//! use and must be consistent across the whole input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Label, NodeId, TermDag, TermGraph};
use crate::rewriting::{validate_rule, Grs, Rule, RuleError};
use crate::tops::{build_precedence, CanonicalTop, Precedence, Signature, TopsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, col, message: message.into() }
    }
}

/// Everything one input file defines.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub signature: Signature,
    pub graphs: BTreeMap<String, TermGraph>,
    /// Rules in file order; together they form the file's rewrite system.
    pub rules: Vec<Rule>,
    pub precedences: BTreeMap<String, Precedence>,
    pub sequences: BTreeMap<String, Vec<String>>,
}

impl Workspace {
    pub fn grs(&self) -> Grs {
        Grs::new(self.rules.clone())
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    /// Resolve a precedence name, with `minimal` and `sharing` as built-ins
    /// over the workspace signature.
    pub fn precedence(&self, name: &str) -> Result<Precedence, TopsError> {
        if let Some(p) = self.precedences.get(name) {
            return Ok(p.clone());
        }
        match name {
            "minimal" => build_precedence(&[], false, &self.signature),
            "sharing" => build_precedence(&[], true, &self.signature),
            other => Err(TopsError::UnknownSymbol(format!(
                "precedence {other} is not defined (built-ins: minimal, sharing)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Less,
    Question,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, co) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            '#' => {
                for c in chars.by_ref() {
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '{' | '}' | '(' | ')' | ':' | ',' | '<' | '?' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '<' => Tok::Less,
                    _ => Tok::Question,
                };
                toks.push((tok, l, co));
            }
            c if c.is_alphanumeric() || c == '_' || c == '-' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '-' {
                        word.push(c);
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(word), l, co));
            }
            other => {
                return Err(ParseError::new(l, co, format!("unexpected character {other:?}")))
            }
        }
    }
    toks.push((Tok::Eof, line, col));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let (l, c) = self.here();
        let got = self.next();
        if got == tok {
            Ok(())
        } else {
            Err(ParseError::new(l, c, format!("expected {what}, found {got:?}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        let (l, c) = self.here();
        match self.next() {
            Tok::Ident(s) => Ok(s),
            got => Err(ParseError::new(l, c, format!("expected {what}, found {got:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw items (resolved against the full signature afterwards)

#[derive(Debug, Clone)]
enum RawLabel {
    Sym(String, Vec<String>),
    Var(String),
}

#[derive(Debug, Clone)]
struct RawNode {
    id: String,
    label: RawLabel,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct RawTop {
    symbol: String,
    pattern: Option<Vec<u32>>,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
enum RawItem {
    Graph { name: String, nodes: Vec<RawNode>, inlets: Vec<String>, line: usize, col: usize },
    Rule { name: String, nodes: Vec<RawNode>, lhs: String, rhs: String, line: usize, col: usize },
    Precedence { name: String, sharing: bool, pairs: Vec<(RawTop, RawTop)>, line: usize, col: usize },
    Sequence { name: String, graphs: Vec<String>, line: usize, col: usize },
}

fn parse_nodes_until(
    lx: &mut Lexer,
    stops: &[&str],
) -> Result<(Vec<RawNode>, String), ParseError> {
    let mut nodes = Vec::new();
    loop {
        let (l, c) = lx.here();
        let word = lx.ident("a node id or section keyword")?;
        if stops.contains(&word.as_str()) {
            return Ok((nodes, word));
        }
        lx.expect(Tok::Colon, "':' after node id")?;
        let label = if *lx.peek() == Tok::Question {
            lx.next();
            RawLabel::Var(lx.ident("variable name")?)
        } else {
            let sym = lx.ident("symbol name")?;
            let mut args = Vec::new();
            if *lx.peek() == Tok::LParen {
                lx.next();
                if *lx.peek() != Tok::RParen {
                    loop {
                        args.push(lx.ident("successor id")?);
                        if *lx.peek() == Tok::Comma {
                            lx.next();
                        } else {
                            break;
                        }
                    }
                }
                lx.expect(Tok::RParen, "')'")?;
            }
            RawLabel::Sym(sym, args)
        };
        nodes.push(RawNode { id: word, label, line: l, col: c });
    }
}

fn parse_top(lx: &mut Lexer) -> Result<RawTop, ParseError> {
    let (l, c) = lx.here();
    let symbol = lx.ident("a symbol")?;
    let mut pattern = None;
    if *lx.peek() == Tok::LBrace {
        lx.next();
        let mut entries = Vec::new();
        if *lx.peek() != Tok::RBrace {
            loop {
                let (el, ec) = lx.here();
                let word = lx.ident("a pattern entry")?;
                let n: u32 = word
                    .parse()
                    .map_err(|_| ParseError::new(el, ec, "pattern entries are naturals"))?;
                entries.push(n);
                if *lx.peek() == Tok::Comma {
                    lx.next();
                } else {
                    break;
                }
            }
        }
        lx.expect(Tok::RBrace, "'}'")?;
        pattern = Some(entries);
    }
    Ok(RawTop { symbol, pattern, line: l, col: c })
}

fn parse_items(text: &str) -> Result<Vec<RawItem>, ParseError> {
    let mut lx = lex(text)?;
    let mut items = Vec::new();
    loop {
        if *lx.peek() == Tok::Eof {
            return Ok(items);
        }
        let (l, c) = lx.here();
        let kind = lx.ident("an item (graph, rule, precedence, sequence)")?;
        match kind.as_str() {
            "graph" => {
                let name = lx.ident("graph name")?;
                lx.expect(Tok::LBrace, "'{'")?;
                let (nodes, stop) = parse_nodes_until(&mut lx, &["root", "inlets"])?;
                lx.expect(Tok::Colon, "':'")?;
                let mut inlets = Vec::new();
                if stop == "root" {
                    inlets.push(lx.ident("root id")?);
                } else if *lx.peek() != Tok::RBrace {
                    loop {
                        inlets.push(lx.ident("inlet id")?);
                        if *lx.peek() == Tok::Comma {
                            lx.next();
                        } else {
                            break;
                        }
                    }
                }
                lx.expect(Tok::RBrace, "'}'")?;
                items.push(RawItem::Graph { name, nodes, inlets, line: l, col: c });
            }
            "rule" => {
                let name = lx.ident("rule name")?;
                lx.expect(Tok::LBrace, "'{'")?;
                let (nodes, stop) = parse_nodes_until(&mut lx, &["lhs"])?;
                debug_assert_eq!(stop, "lhs");
                lx.expect(Tok::Colon, "':'")?;
                let lhs = lx.ident("lhs root id")?;
                let (el, ec) = lx.here();
                let kw = lx.ident("rhs")?;
                if kw != "rhs" {
                    return Err(ParseError::new(el, ec, "expected rhs after lhs"));
                }
                lx.expect(Tok::Colon, "':'")?;
                let rhs = lx.ident("rhs root id")?;
                lx.expect(Tok::RBrace, "'}'")?;
                items.push(RawItem::Rule { name, nodes, lhs, rhs, line: l, col: c });
            }
            "precedence" => {
                let name = lx.ident("precedence name")?;
                lx.expect(Tok::LBrace, "'{'")?;
                let mut sharing = false;
                let mut pairs = Vec::new();
                while *lx.peek() != Tok::RBrace {
                    if *lx.peek() == Tok::Ident("sharing".into()) {
                        lx.next();
                        sharing = true;
                        continue;
                    }
                    let small = parse_top(&mut lx)?;
                    lx.expect(Tok::Less, "'<' between tops")?;
                    let large = parse_top(&mut lx)?;
                    pairs.push((small, large));
                }
                lx.expect(Tok::RBrace, "'}'")?;
                items.push(RawItem::Precedence { name, sharing, pairs, line: l, col: c });
            }
            "sequence" => {
                let name = lx.ident("sequence name")?;
                lx.expect(Tok::LBrace, "'{'")?;
                let mut graphs = Vec::new();
                while *lx.peek() != Tok::RBrace {
                    graphs.push(lx.ident("graph name")?);
                }
                lx.expect(Tok::RBrace, "'}'")?;
                items.push(RawItem::Sequence { name, graphs, line: l, col: c });
            }
            other => {
                return Err(ParseError::new(
                    l,
                    c,
                    format!("unknown item kind {other:?} (graph, rule, precedence, sequence)"),
                ))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Resolution

fn build_dag_from_nodes(
    nodes: &[RawNode],
    inlets: &[String],
    signature: &mut Signature,
    line: usize,
    col: usize,
) -> Result<TermDag, ParseError> {
    let mut index: BTreeMap<&str, u32> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        if index.insert(n.id.as_str(), i as u32).is_some() {
            return Err(ParseError::new(n.line, n.col, format!("node {} declared twice", n.id)));
        }
    }
    let resolve = |id: &str, l: usize, c: usize| -> Result<u32, ParseError> {
        index
            .get(id)
            .copied()
            .ok_or_else(|| ParseError::new(l, c, format!("unknown node {id}")))
    };
    let mut decls: Vec<(u32, Label, Vec<u32>)> = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        let (label, succ) = match &n.label {
            RawLabel::Var(v) => (Label::var(v.clone()), Vec::new()),
            RawLabel::Sym(s, args) => {
                let arity = args.len();
                if let Some(prev) = signature.arity(s) {
                    if prev != arity {
                        return Err(ParseError::new(
                            n.line,
                            n.col,
                            format!("symbol {s} used with arity {arity}, previously {prev}"),
                        ));
                    }
                }
                signature.insert(&crate::graph::FunSymbol::new(s.clone(), arity));
                let succ = args
                    .iter()
                    .map(|a| resolve(a, n.line, n.col))
                    .collect::<Result<Vec<_>, _>>()?;
                (Label::fun(s.clone(), arity), succ)
            }
        };
        decls.push((i as u32, label, succ));
    }
    let inlets = inlets
        .iter()
        .map(|id| resolve(id, line, col))
        .collect::<Result<Vec<_>, _>>()?;
    let mut dag = TermDag::build(&decls, &inlets)
        .map_err(|e| ParseError::new(line, col, e.to_string()))?;
    for (i, n) in nodes.iter().enumerate() {
        dag.set_name(NodeId(i as u32), n.id.clone());
    }
    Ok(dag)
}

fn resolve_top(raw: &RawTop, signature: &mut Signature) -> Result<CanonicalTop, ParseError> {
    let arity = match (&raw.pattern, signature.arity(&raw.symbol)) {
        (Some(p), Some(a)) if p.len() != a => {
            return Err(ParseError::new(
                raw.line,
                raw.col,
                format!("top pattern length {} but {} has arity {a}", p.len(), raw.symbol),
            ))
        }
        (Some(p), _) => p.len(),
        (None, Some(0)) | (None, None) => 0,
        (None, Some(a)) => {
            return Err(ParseError::new(
                raw.line,
                raw.col,
                format!("symbol {} has arity {a}; name a pattern like {}{{…}}", raw.symbol, raw.symbol),
            ))
        }
    };
    let symbol = crate::graph::FunSymbol::new(raw.symbol.clone(), arity);
    signature.insert(&symbol);
    let pattern = raw.pattern.clone().unwrap_or_default();
    CanonicalTop::new(symbol, pattern)
        .map_err(|e| ParseError::new(raw.line, raw.col, e.to_string()))
}

/// Parse one input text into a workspace.
pub fn parse_workspace(text: &str) -> Result<Workspace, ParseError> {
    let items = parse_items(text)?;
    let mut ws = Workspace::default();
    // Graphs and rules first: they fix the signature.
    for item in &items {
        match item {
            RawItem::Graph { name, nodes, inlets, line, col } => {
                if ws.graphs.contains_key(name) {
                    return Err(ParseError::new(*line, *col, format!("graph {name} declared twice")));
                }
                let dag = build_dag_from_nodes(nodes, inlets, &mut ws.signature, *line, *col)?;
                let graph = TermGraph::new(dag)
                    .map_err(|e| ParseError::new(*line, *col, e.to_string()))?;
                ws.graphs.insert(name.clone(), graph);
            }
            RawItem::Rule { name, nodes, lhs, rhs, line, col } => {
                if ws.rule(name).is_some() {
                    return Err(ParseError::new(*line, *col, format!("rule {name} declared twice")));
                }
                let dag =
                    build_dag_from_nodes(nodes, &[lhs.clone(), rhs.clone()], &mut ws.signature, *line, *col)?;
                let inlets = dag.inlets().to_vec();
                let rule = validate_rule(name.clone(), dag, inlets[0], inlets[1])
                    .map_err(|e: RuleError| ParseError::new(*line, *col, e.to_string()))?;
                ws.rules.push(rule);
            }
            _ => {}
        }
    }
    for item in &items {
        match item {
            RawItem::Precedence { name, sharing, pairs, line, col } => {
                if ws.precedences.contains_key(name) {
                    return Err(ParseError::new(
                        *line,
                        *col,
                        format!("precedence {name} declared twice"),
                    ));
                }
                let mut decls = Vec::new();
                for (small, large) in pairs {
                    decls.push((
                        resolve_top(small, &mut ws.signature)?,
                        resolve_top(large, &mut ws.signature)?,
                    ));
                }
                let prec = build_precedence(&decls, *sharing, &ws.signature)
                    .map_err(|e| ParseError::new(*line, *col, e.to_string()))?;
                ws.precedences.insert(name.clone(), prec);
            }
            RawItem::Sequence { name, graphs, line, col } => {
                if ws.sequences.contains_key(name) {
                    return Err(ParseError::new(
                        *line,
                        *col,
                        format!("sequence {name} declared twice"),
                    ));
                }
                for g in graphs {
                    if !ws.graphs.contains_key(g) {
                        return Err(ParseError::new(
                            *line,
                            *col,
                            format!("sequence {name} references unknown graph {g}"),
                        ));
                    }
                }
                ws.sequences.insert(name.clone(), graphs.clone());
            }
            _ => {}
        }
    }
    Ok(ws)
}

// ---------------------------------------------------------------------------
// Canonical printing

fn print_nodes(out: &mut String, dag: &TermDag) {
    for n in dag.nodes() {
        match dag.label(n) {
            Label::Var(v) => {
                let _ = writeln!(out, "  {}: ?{}", n.0, v);
            }
            Label::Fun(f) if f.arity == 0 => {
                let _ = writeln!(out, "  {}: {}", n.0, f.name);
            }
            Label::Fun(f) => {
                let args: Vec<String> = dag.succ(n).iter().map(|t| t.0.to_string()).collect();
                let _ = writeln!(out, "  {}: {}({})", n.0, f.name, args.join(", "));
            }
        }
    }
}

/// One graph in the canonical text form.
pub fn graph_text(name: &str, graph: &TermGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {name} {{");
    print_nodes(&mut out, graph.dag());
    let _ = writeln!(out, "  root: {}", graph.root().0);
    let _ = writeln!(out, "}}");
    out
}

/// Render a workspace in the canonical text form: dense node ids, sorted
/// names, rules in file order.
pub fn print_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (name, graph) in &ws.graphs {
        out.push_str(&graph_text(name, graph));
        let _ = writeln!(out);
    }
    for rule in &ws.rules {
        let _ = writeln!(out, "rule {} {{", rule.name());
        print_nodes(&mut out, rule.carrier());
        let _ = writeln!(out, "  lhs: {}", rule.lhs_root().0);
        let _ = writeln!(out, "  rhs: {}", rule.rhs_root().0);
        let _ = writeln!(out, "}}");
        let _ = writeln!(out);
    }
    for (name, prec) in &ws.precedences {
        let _ = write!(out, "precedence {name} {{");
        if prec.auto_sharing() {
            let _ = write!(out, " sharing");
        }
        for (small, large) in prec.decls() {
            let _ = write!(out, " {small} < {large}");
        }
        let _ = writeln!(out, " }}");
        let _ = writeln!(out);
    }
    for (name, graphs) in &ws.sequences {
        let _ = writeln!(out, "sequence {name} {{ {} }}", graphs.join(" "));
        let _ = writeln!(out);
    }
    out
}
