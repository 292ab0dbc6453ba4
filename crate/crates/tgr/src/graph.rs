//! Term dags and term graphs.
//!
//! A term dag is an acyclic graph whose nodes carry either a function symbol
//! (with an ordered successor list of the symbol's arity) or a variable (with
//! no successors), together with an ordered list of entry nodes called
//! `inlets`. A term graph is the rooted special case: its inlets list is the
//! single root.
//!
//! Node identifiers are dense indices into the node table, so every graph
//! owns its own id space. Operations that combine graphs (`union`,
//! `redirect`) therefore treat equal indices as the same node, matching the
//! shared-namespace reading of the underlying theory. Original node names
//! from parsed input are kept alongside for display.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Node identity inside one [`TermDag`], totally ordered for determinism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A function symbol with a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunSymbol {
    pub name: String,
    pub arity: usize,
}

impl FunSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        FunSymbol { name: name.into(), arity }
    }
}

impl fmt::Display for FunSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Node label: either a function symbol or a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Fun(FunSymbol),
    Var(String),
}

impl Label {
    pub fn fun(name: impl Into<String>, arity: usize) -> Self {
        Label::Fun(FunSymbol::new(name, arity))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Label::Var(name.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Label::Var(_))
    }

    pub fn arity(&self) -> usize {
        match self {
            Label::Fun(f) => f.arity,
            Label::Var(_) => 0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Fun(s) => write!(f, "{}", s.name),
            Label::Var(v) => write!(f, "?{v}"),
        }
    }
}

/// A sequence of positive naturals addressing a node; `ε` is the empty one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: u32) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// `p` is left of (or above) `q`: a proper prefix, or smaller at the first
/// differing index.
pub fn lex_less(p: &Position, q: &Position) -> bool {
    for (a, b) in p.0.iter().zip(q.0.iter()) {
        if a != b {
            return a < b;
        }
    }
    p.0.len() < q.0.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has a cycle through node {0}")]
    CyclicGraph(NodeId),
    #[error("node {node} labelled {symbol} has {found} successors, arity is {expected}")]
    ArityMismatch { node: NodeId, symbol: String, expected: usize, found: usize },
    #[error("variable node {0} has successors")]
    VarWithSuccessors(NodeId),
    #[error("node {0} is not reachable from the inlets")]
    UnreachableNode(NodeId),
    #[error("successor entry {target} of node {node} is not a declared node")]
    DanglingSuccessor { node: NodeId, target: NodeId },
    #[error("node {0} does not exist in this graph")]
    UnknownNode(NodeId),
    #[error("node id {0} declared twice")]
    DuplicateNodeId(NodeId),
    #[error("symbol {symbol} used with arities {first} and {second}")]
    ArityConflict { symbol: String, first: usize, second: usize },
}

/// Validation strictness. `Loose` skips the reachability invariant and is
/// meant for intermediate surgery results; public values are `Strict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Strict,
    Loose,
}

/// A term dag: dense node table plus an ordered inlets list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermDag {
    labels: Vec<Label>,
    succs: Vec<Vec<NodeId>>,
    inlets: Vec<NodeId>,
    names: Vec<String>,
}

impl TermDag {
    /// Build and validate a dag from explicit node declarations.
    ///
    /// Node ids are renamed to the dense range `0..n` in declaration order;
    /// the declared ids are kept as display names.
    pub fn build(
        decls: &[(u32, Label, Vec<u32>)],
        inlets: &[u32],
    ) -> Result<TermDag, GraphError> {
        let mut index: BTreeMap<u32, NodeId> = BTreeMap::new();
        for (i, (id, _, _)) in decls.iter().enumerate() {
            if index.insert(*id, NodeId(i as u32)).is_some() {
                return Err(GraphError::DuplicateNodeId(NodeId(*id)));
            }
        }
        let lookup = |raw: u32| -> Result<NodeId, GraphError> {
            index.get(&raw).copied().ok_or(GraphError::UnknownNode(NodeId(raw)))
        };
        let mut labels = Vec::with_capacity(decls.len());
        let mut succs = Vec::with_capacity(decls.len());
        let mut names = Vec::with_capacity(decls.len());
        let mut arities: BTreeMap<String, usize> = BTreeMap::new();
        for (id, label, succ_raw) in decls {
            if let Label::Fun(f) = label {
                if let Some(prev) = arities.insert(f.name.clone(), f.arity) {
                    if prev != f.arity {
                        return Err(GraphError::ArityConflict {
                            symbol: f.name.clone(),
                            first: prev,
                            second: f.arity,
                        });
                    }
                }
            }
            let mut succ = Vec::with_capacity(succ_raw.len());
            for raw in succ_raw {
                let target = index.get(raw).copied().ok_or(GraphError::DanglingSuccessor {
                    node: index[id],
                    target: NodeId(*raw),
                })?;
                succ.push(target);
            }
            labels.push(label.clone());
            succs.push(succ);
            names.push(id.to_string());
        }
        let inlets = inlets.iter().map(|raw| lookup(*raw)).collect::<Result<Vec<_>, _>>()?;
        let dag = TermDag { labels, succs, inlets, names };
        dag.validate(Validation::Strict)?;
        Ok(dag)
    }

    /// Assemble a dag from already-dense tables, validating per `mode`.
    pub fn from_tables(
        labels: Vec<Label>,
        succs: Vec<Vec<NodeId>>,
        inlets: Vec<NodeId>,
        names: Vec<String>,
        mode: Validation,
    ) -> Result<TermDag, GraphError> {
        let dag = TermDag { labels, succs, inlets, names };
        dag.validate(mode)?;
        Ok(dag)
    }

    pub fn empty() -> TermDag {
        TermDag { labels: Vec::new(), succs: Vec::new(), inlets: Vec::new(), names: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len() as u32).map(NodeId)
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.index() < self.labels.len()
    }

    pub fn label(&self, n: NodeId) -> &Label {
        &self.labels[n.index()]
    }

    pub fn succ(&self, n: NodeId) -> &[NodeId] {
        &self.succs[n.index()]
    }

    pub fn inlets(&self) -> &[NodeId] {
        &self.inlets
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn set_name(&mut self, n: NodeId, name: impl Into<String>) {
        self.names[n.index()] = name.into();
    }

    pub fn is_ground(&self) -> bool {
        self.labels.iter().all(|l| !l.is_var())
    }

    fn check_node(&self, n: NodeId) -> Result<(), GraphError> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(n))
        }
    }

    /// Check the dag invariants: arities, variable leaves, acyclicity, and
    /// (strict only) reachability of every node from the inlets.
    pub fn validate(&self, mode: Validation) -> Result<(), GraphError> {
        for n in self.nodes() {
            let succ = self.succ(n);
            for t in succ {
                self.check_node(*t)?;
            }
            match self.label(n) {
                Label::Fun(f) => {
                    if succ.len() != f.arity {
                        return Err(GraphError::ArityMismatch {
                            node: n,
                            symbol: f.name.clone(),
                            expected: f.arity,
                            found: succ.len(),
                        });
                    }
                }
                Label::Var(_) => {
                    if !succ.is_empty() {
                        return Err(GraphError::VarWithSuccessors(n));
                    }
                }
            }
        }
        for n in &self.inlets {
            self.check_node(*n)?;
        }
        if let Some(n) = self.find_cycle() {
            return Err(GraphError::CyclicGraph(n));
        }
        if mode == Validation::Strict {
            let reach = self.reachable_from(&self.inlets);
            for n in self.nodes() {
                if !reach[n.index()] {
                    return Err(GraphError::UnreachableNode(n));
                }
            }
        }
        Ok(())
    }

    fn find_cycle(&self) -> Option<NodeId> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.node_count()];
        for start in self.nodes() {
            if state[start.index()] != 0 {
                continue;
            }
            let mut stack: Vec<(NodeId, usize)> = vec![(start, 0)];
            state[start.index()] = 1;
            while let Some(&mut (n, ref mut i)) = stack.last_mut() {
                if *i < self.succ(n).len() {
                    let t = self.succ(n)[*i];
                    *i += 1;
                    match state[t.index()] {
                        0 => {
                            state[t.index()] = 1;
                            stack.push((t, 0));
                        }
                        1 => return Some(t),
                        _ => {}
                    }
                } else {
                    state[n.index()] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    fn reachable_from(&self, roots: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<NodeId> = Vec::new();
        for r in roots {
            if !seen[r.index()] {
                seen[r.index()] = true;
                stack.push(*r);
            }
        }
        while let Some(n) = stack.pop() {
            for t in self.succ(n) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    stack.push(*t);
                }
            }
        }
        seen
    }

    /// `n ⇀* m`: `m` is reachable from `n` (reflexively).
    pub fn reaches(&self, n: NodeId, m: NodeId) -> bool {
        self.reachable_from(&[n])[m.index()]
    }

    /// Per-node reachability matrix; `row[n][m]` iff `n ⇀* m`.
    pub fn reach_matrix(&self) -> Vec<Vec<bool>> {
        self.nodes().map(|n| self.reachable_from(&[n])).collect()
    }

    /// The sub-dag of everything reachable from `roots`, with `roots` (order
    /// and duplicates preserved) as the new inlets. Node ids are compacted;
    /// display names survive.
    pub fn restrict(&self, roots: &[NodeId]) -> Result<TermDag, GraphError> {
        for r in roots {
            self.check_node(*r)?;
        }
        let keep = self.reachable_from(roots);
        let mut remap: Vec<Option<NodeId>> = vec![None; self.node_count()];
        let mut labels = Vec::new();
        let mut names = Vec::new();
        for n in self.nodes() {
            if keep[n.index()] {
                remap[n.index()] = Some(NodeId(labels.len() as u32));
                labels.push(self.label(n).clone());
                names.push(self.name(n).to_string());
            }
        }
        let mut succs = Vec::with_capacity(labels.len());
        for n in self.nodes() {
            if keep[n.index()] {
                succs.push(self.succ(n).iter().map(|t| remap[t.index()].unwrap()).collect());
            }
        }
        let inlets = roots.iter().map(|r| remap[r.index()].unwrap()).collect();
        Ok(TermDag { labels, succs, inlets, names })
    }

    /// The argument graph: restrict to the concatenated successor lists of
    /// the inlets, preserving order and duplicates.
    pub fn argument_graph(&self) -> TermDag {
        let mut next: Vec<NodeId> = Vec::new();
        for t in &self.inlets {
            next.extend_from_slice(self.succ(*t));
        }
        self.restrict(&next).expect("inlets successors are valid nodes")
    }

    /// Left-biased union by node id: where both define a node, `self` wins.
    /// Inlets concatenate. The result may leave nodes unreachable and is
    /// validated loosely; callers restore reachability with `restrict`.
    pub fn union(&self, other: &TermDag) -> Result<TermDag, GraphError> {
        let n = self.node_count().max(other.node_count());
        let mut labels = Vec::with_capacity(n);
        let mut succs = Vec::with_capacity(n);
        let mut names = Vec::with_capacity(n);
        for i in 0..n as u32 {
            let id = NodeId(i);
            if self.contains(id) {
                labels.push(self.label(id).clone());
                succs.push(self.succ(id).to_vec());
                names.push(self.name(id).to_string());
            } else {
                labels.push(other.label(id).clone());
                succs.push(other.succ(id).to_vec());
                names.push(other.name(id).to_string());
            }
        }
        let mut inlets = self.inlets.clone();
        inlets.extend_from_slice(&other.inlets);
        TermDag::from_tables(labels, succs, inlets, names, Validation::Loose)
    }

    /// `G[v ← u]`: every successor entry equal to `u` is redirected to `v`.
    /// `u` stays in the node table (possibly unreachable afterwards).
    pub fn redirect(&self, v: NodeId, u: NodeId) -> Result<TermDag, GraphError> {
        self.check_node(v)?;
        self.check_node(u)?;
        let mut dag = self.clone();
        for succ in &mut dag.succs {
            for t in succ.iter_mut() {
                if *t == u {
                    *t = v;
                }
            }
        }
        if let Some(n) = dag.find_cycle() {
            return Err(GraphError::CyclicGraph(n));
        }
        Ok(dag)
    }

    /// Mutually unreachable distinct nodes.
    pub fn is_parallel(&self, n: NodeId, m: NodeId) -> Result<bool, GraphError> {
        self.check_node(n)?;
        self.check_node(m)?;
        Ok(n != m && !self.reaches(n, m) && !self.reaches(m, n))
    }

    /// Topological order, inlets-first tiebreak by id.
    fn topological(&self) -> Vec<NodeId> {
        let mut indeg = vec![0usize; self.node_count()];
        for n in self.nodes() {
            for t in self.succ(n) {
                indeg[t.index()] += 1;
            }
        }
        let mut ready: BTreeSet<NodeId> =
            self.nodes().filter(|n| indeg[n.index()] == 0).collect();
        let mut order = Vec::with_capacity(self.node_count());
        while let Some(&n) = ready.iter().next() {
            ready.remove(&n);
            order.push(n);
            for t in self.succ(n) {
                indeg[t.index()] -= 1;
                if indeg[t.index()] == 0 {
                    ready.insert(*t);
                }
            }
        }
        order
    }

    /// The `<`-least position of `n`, computed by dynamic programming over a
    /// topological order. Positions are rooted at `ε` when the dag has a
    /// single inlet (the term-graph view) and at the 1-based inlet index
    /// otherwise.
    pub fn min_position(&self, n: NodeId) -> Result<Position, GraphError> {
        self.check_node(n)?;
        self.min_positions()[n.index()]
            .clone()
            .ok_or(GraphError::UnreachableNode(n))
    }

    /// Minimal positions for every node at once; `None` for unreachable ones.
    pub fn min_positions(&self) -> Vec<Option<Position>> {
        let mut best: Vec<Option<Position>> = vec![None; self.node_count()];
        if self.inlets.len() == 1 {
            best[self.inlets[0].index()] = Some(Position::root());
        } else {
            for (i, n) in self.inlets.iter().enumerate() {
                let p = Position(vec![i as u32 + 1]);
                let slot = &mut best[n.index()];
                if slot.is_none() || lex_less(&p, slot.as_ref().unwrap()) {
                    *slot = Some(p);
                }
            }
        }
        for n in self.topological() {
            let Some(pos) = best[n.index()].clone() else { continue };
            for (i, t) in self.succ(n).iter().enumerate() {
                let p = pos.child(i as u32 + 1);
                let slot = &mut best[t.index()];
                if slot.is_none() || lex_less(&p, slot.as_ref().unwrap()) {
                    *slot = Some(p);
                }
            }
        }
        best
    }

    /// The `≪` order: `n` and `m` are parallel and `n`'s minimal position is
    /// lexicographically smaller.
    pub fn left_of(&self, n: NodeId, m: NodeId) -> Result<bool, GraphError> {
        if !self.is_parallel(n, m)? {
            return Ok(false);
        }
        Ok(lex_less(&self.min_position(n)?, &self.min_position(m)?))
    }

    /// Canonical form under inlet-order-respecting isomorphism: relabel by
    /// first visit of a depth-first pre-order traversal from the inlets.
    pub fn canonical_form(&self) -> CanonicalDag {
        let mut order: Vec<Option<u32>> = vec![None; self.node_count()];
        let mut next = 0u32;
        let mut number = |order: &mut Vec<Option<u32>>, n: NodeId| {
            order[n.index()] = Some(next);
            next += 1;
        };
        let mut stack: Vec<(NodeId, usize)> = Vec::new();
        for r in &self.inlets {
            if order[r.index()].is_none() {
                number(&mut order, *r);
                stack.push((*r, 0));
            }
            while let Some((n, i)) = stack.last_mut() {
                if *i < self.succ(*n).len() {
                    let t = self.succ(*n)[*i];
                    *i += 1;
                    if order[t.index()].is_none() {
                        number(&mut order, t);
                        stack.push((t, 0));
                    }
                } else {
                    stack.pop();
                }
            }
        }
        // Unreachable nodes (loose dags) come last in id order.
        for n in self.nodes() {
            if order[n.index()].is_none() {
                order[n.index()] = Some(next);
                next += 1;
            }
        }
        let perm: Vec<u32> = order.into_iter().map(|o| o.unwrap()).collect();
        let mut labels = vec![Label::Var(String::new()); self.node_count()];
        let mut succs = vec![Vec::new(); self.node_count()];
        for n in self.nodes() {
            let c = perm[n.index()] as usize;
            labels[c] = self.label(n).clone();
            succs[c] = self.succ(n).iter().map(|t| NodeId(perm[t.index()])).collect();
        }
        let inlets = self.inlets.iter().map(|n| NodeId(perm[n.index()])).collect();
        CanonicalDag { labels, succs, inlets }
    }

    /// Rebuild with dense canonical ids and names matching those ids.
    pub fn canonicalized(&self) -> TermDag {
        let canon = self.canonical_form();
        let names = (0..canon.labels.len()).map(|i| i.to_string()).collect();
        TermDag {
            labels: canon.labels,
            succs: canon.succs,
            inlets: canon.inlets,
            names,
        }
    }
}

/// Structural normal form; equal iff the dags are isomorphic respecting
/// inlet order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalDag {
    pub labels: Vec<Label>,
    pub succs: Vec<Vec<NodeId>>,
    pub inlets: Vec<NodeId>,
}

/// A rooted term dag: inlets is exactly `[root]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermGraph(TermDag);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermGraphError {
    #[error("a term graph needs exactly one inlet, found {0}")]
    NotRooted(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl TermGraph {
    pub fn new(dag: TermDag) -> Result<TermGraph, TermGraphError> {
        if dag.inlets().len() != 1 {
            return Err(TermGraphError::NotRooted(dag.inlets().len()));
        }
        dag.validate(Validation::Strict)?;
        Ok(TermGraph(dag))
    }

    pub fn root(&self) -> NodeId {
        self.0.inlets()[0]
    }

    pub fn dag(&self) -> &TermDag {
        &self.0
    }

    pub fn into_dag(self) -> TermDag {
        self.0
    }
}

impl std::ops::Deref for TermGraph {
    type Target = TermDag;

    fn deref(&self) -> &TermDag {
        &self.0
    }
}

/// Convenience builders for tests and fixtures.
pub mod build {
    use super::*;

    /// A tree or dag from `(id, label, succ)` triples rooted at `root`.
    pub fn graph(decls: &[(u32, Label, Vec<u32>)], root: u32) -> TermGraph {
        TermGraph::new(TermDag::build(decls, &[root]).expect("valid dag"))
            .expect("rooted graph")
    }

    pub fn fun(name: &str, arity: usize) -> Label {
        Label::fun(name, arity)
    }
}
