//! Graph rewrite rules, rewrite steps, and bounded derivations.
//!
//! A rule is a single term dag with two distinguished roots; the left- and
//! right-hand sides are its reachable parts. Applying a match builds the
//! union of the freshened right-hand side with the host graph, redirects
//! every variable node to its matched image, splices the result in at the
//! redex by another redirect, and restricts to the host root.
//!
//! Derivations apply one redex at a time under an explicit strategy and stop
//! at a normal form, at the step budget, or as soon as the current graph is
//! isomorphic to an earlier one (exact detection via canonical forms).

use std::fmt;

use thiserror::Error;

use crate::graph::{
    CanonicalDag, GraphError, Label, NodeId, TermDag, TermGraph, TermGraphError, Validation,
};
use crate::morphism::{match_rule_at, Morphism};
use crate::tops::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side root is labelled with a variable")]
    VariableLhsRoot,
    #[error("variable ?{0} occurs in the right-hand side but not in the left-hand side")]
    FreeRhsVariable(String),
    #[error("variable ?{0} labels two distinct nodes")]
    DuplicateVariableLabel(String),
    #[error("rewrite produced a cyclic graph")]
    CyclicResult,
    #[error("the morphism does not match this rule at node {0}")]
    BadMatch(NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    NotRooted(#[from] TermGraphError),
}

/// A graph rewrite rule over one carrier dag with lhs and rhs roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    name: String,
    carrier: TermDag,
    lhs_root: NodeId,
    rhs_root: NodeId,
    lhs: TermGraph,
    /// lhs view node id → carrier node id.
    lhs_to_carrier: Vec<NodeId>,
    rhs: Option<TermGraph>,
}

/// Check the three rule conditions and derive the side views.
pub fn validate_rule(
    name: impl Into<String>,
    carrier: TermDag,
    lhs_root: NodeId,
    rhs_root: NodeId,
) -> Result<Rule, RuleError> {
    if carrier.inlets() != [lhs_root, rhs_root] {
        // The carrier's inlets are the two roots by definition.
        let with_inlets = TermDag::from_tables(
            carrier.nodes().map(|n| carrier.label(n).clone()).collect(),
            carrier.nodes().map(|n| carrier.succ(n).to_vec()).collect(),
            vec![lhs_root, rhs_root],
            carrier.nodes().map(|n| carrier.name(n).to_string()).collect(),
            Validation::Strict,
        )?;
        return validate_rule(name, with_inlets, lhs_root, rhs_root);
    }
    carrier.validate(Validation::Strict)?;
    if carrier.label(lhs_root).is_var() {
        return Err(RuleError::VariableLhsRoot);
    }
    let lhs_dag = carrier.restrict(&[lhs_root])?;
    let in_lhs = reachable_set(&carrier, lhs_root);
    let in_rhs = reachable_set(&carrier, rhs_root);
    for n in carrier.nodes() {
        if let Label::Var(v) = carrier.label(n) {
            if in_rhs[n.index()] && !in_lhs[n.index()] {
                return Err(RuleError::FreeRhsVariable(v.clone()));
            }
        }
    }
    for n in carrier.nodes() {
        for m in carrier.nodes() {
            if n < m {
                if let (Label::Var(x), Label::Var(y)) = (carrier.label(n), carrier.label(m)) {
                    if x == y {
                        return Err(RuleError::DuplicateVariableLabel(x.clone()));
                    }
                }
            }
        }
    }
    // Track the compaction performed by restrict: node order is preserved.
    let mut lhs_to_carrier = Vec::new();
    for n in carrier.nodes() {
        if in_lhs[n.index()] {
            lhs_to_carrier.push(n);
        }
    }
    let lhs = TermGraph::new(lhs_dag)?;
    let rhs = if carrier.label(rhs_root).is_var() {
        None
    } else {
        Some(TermGraph::new(carrier.restrict(&[rhs_root])?)?)
    };
    Ok(Rule { name: name.into(), carrier, lhs_root, rhs_root, lhs, lhs_to_carrier, rhs })
}

fn reachable_set(dag: &TermDag, root: NodeId) -> Vec<bool> {
    let mut seen = vec![false; dag.node_count()];
    let mut stack = vec![root];
    seen[root.index()] = true;
    while let Some(n) = stack.pop() {
        for t in dag.succ(n) {
            if !seen[t.index()] {
                seen[t.index()] = true;
                stack.push(*t);
            }
        }
    }
    seen
}

impl Rule {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> &TermDag {
        &self.carrier
    }

    pub fn lhs_root(&self) -> NodeId {
        self.lhs_root
    }

    pub fn rhs_root(&self) -> NodeId {
        self.rhs_root
    }

    /// The left-hand side as a term graph (compacted view).
    pub fn lhs(&self) -> &TermGraph {
        &self.lhs
    }

    /// The right-hand side as a term graph; `None` when the rhs root is a
    /// bare variable (a collapsing rule).
    pub fn rhs(&self) -> Option<&TermGraph> {
        self.rhs.as_ref()
    }

    /// Lhs-view node id for a carrier node, if it is in the lhs.
    fn lhs_of_carrier(&self, n: NodeId) -> Option<NodeId> {
        self.lhs_to_carrier.iter().position(|c| *c == n).map(|i| NodeId(i as u32))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}", self.name)
    }
}

/// A graph rewrite system: an ordered list of rules.
#[derive(Debug, Clone, Default)]
pub struct Grs {
    pub rules: Vec<Rule>,
}

impl Grs {
    pub fn new(rules: Vec<Rule>) -> Grs {
        Grs { rules }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for r in &self.rules {
            sig.merge(&Signature::of_dag(r.carrier()));
        }
        sig
    }
}

/// Apply a previously found match of `rule` at node `at` of `host`.
///
/// `m` must be the morphism returned by [`match_rule_at`] for `rule.lhs()`
/// against `host` at `at`. The rule instance is freshened so its node set is
/// disjoint from the host's.
pub fn apply_match(
    rule: &Rule,
    host: &TermGraph,
    at: NodeId,
    m: &Morphism,
) -> Result<TermGraph, RuleError> {
    if m.apply(rule.lhs.root()) != Some(at) {
        return Err(RuleError::BadMatch(at));
    }
    let host_len = host.node_count() as u32;
    // Fresh ids for the carrier nodes reachable from the rhs root.
    let in_rhs = reachable_set(&rule.carrier, rule.rhs_root);
    let mut fresh: Vec<Option<NodeId>> = vec![None; rule.carrier.node_count()];
    let mut labels: Vec<Label> = host.nodes().map(|n| host.label(n).clone()).collect();
    let mut succs: Vec<Vec<NodeId>> = host.nodes().map(|n| host.succ(n).to_vec()).collect();
    let mut names: Vec<String> = host.nodes().map(|n| host.name(n).to_string()).collect();
    let mut next = host_len;
    for n in rule.carrier.nodes() {
        if in_rhs[n.index()] {
            fresh[n.index()] = Some(NodeId(next));
            next += 1;
        }
    }
    for n in rule.carrier.nodes() {
        if in_rhs[n.index()] {
            labels.push(rule.carrier.label(n).clone());
            succs.push(rule.carrier.succ(n).iter().map(|t| fresh[t.index()].unwrap()).collect());
            names.push(format!("r{}", rule.carrier.name(n)));
        }
    }
    // (R ⊕ S) with the host root as inlet; loose because the rhs instance is
    // not hooked in yet.
    let combined =
        TermDag::from_tables(labels, succs, vec![host.root()], names, Validation::Loose)?;
    // Redirect every variable node of R to its matched image.
    let mut current = combined;
    for n in rule.carrier.nodes() {
        if in_rhs[n.index()] && rule.carrier.label(n).is_var() {
            let lhs_id = rule.lhs_of_carrier(n).expect("rhs variables occur in the lhs");
            let image = m.apply(lhs_id).expect("match is total on the lhs");
            current = current.redirect(image, fresh[n.index()].unwrap()).map_err(cyclic)?;
        }
    }
    let root_of_instance = if rule.carrier.label(rule.rhs_root).is_var() {
        let lhs_id = rule.lhs_of_carrier(rule.rhs_root).expect("rhs variable is in lhs");
        m.apply(lhs_id).expect("match is total on the lhs")
    } else {
        fresh[rule.rhs_root.index()].unwrap()
    };
    let result = if at == host.root() {
        current.restrict(&[root_of_instance])?
    } else {
        let redirected = current.redirect(root_of_instance, at).map_err(cyclic)?;
        redirected.restrict(&[host.root()])?
    };
    result.validate(Validation::Strict)?;
    Ok(TermGraph::new(result)?)
}

fn cyclic(e: GraphError) -> RuleError {
    match e {
        GraphError::CyclicGraph(_) => RuleError::CyclicResult,
        other => RuleError::Graph(other),
    }
}

/// All redexes of `host` under `grs`, in rule order then canonical node
/// order, with the rewritten graph for each.
pub fn step(host: &TermGraph, grs: &Grs) -> Vec<(String, NodeId, TermGraph)> {
    let mut out = Vec::new();
    for rule in &grs.rules {
        for n in host.nodes() {
            if let Ok(Some(m)) = match_rule_at(rule.lhs(), host, n) {
                if let Ok(result) = apply_match(rule, host, n, &m) {
                    out.push((rule.name().to_string(), n, result));
                }
            }
        }
    }
    out
}

/// Redex selection strategy for derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// First rule in system order, then first redex node.
    LeftmostFirst,
    /// First redex node in canonical order, then first rule.
    AllFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationStatus {
    NormalForm,
    BudgetExhausted,
    /// Graphs at these indices (0-based, 0 = the start graph) are isomorphic.
    CycleDetected(usize, usize),
}

/// A finite rewrite derivation: `graphs[k]` steps to `graphs[k+1]` by
/// `steps[k]`.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub graphs: Vec<TermGraph>,
    pub steps: Vec<(String, NodeId)>,
    pub status: DerivationStatus,
}

/// Repeatedly apply the strategy's first redex, stopping at a normal form,
/// the step budget, or an isomorphism with an earlier graph in the sequence.
pub fn derive(start: &TermGraph, grs: &Grs, strategy: Strategy, max_steps: usize) -> Derivation {
    let mut graphs = vec![start.clone()];
    let mut canons: Vec<CanonicalDag> = vec![start.canonical_form()];
    let mut steps = Vec::new();
    loop {
        let current = graphs.last().unwrap();
        let mut redexes = step(current, grs);
        if redexes.is_empty() {
            return Derivation { graphs, steps, status: DerivationStatus::NormalForm };
        }
        if steps.len() == max_steps {
            return Derivation { graphs, steps, status: DerivationStatus::BudgetExhausted };
        }
        if strategy == Strategy::AllFirst {
            let rule_index: std::collections::BTreeMap<&str, usize> =
                grs.rules.iter().enumerate().map(|(i, r)| (r.name(), i)).collect();
            redexes.sort_by_key(|(rule, node, _)| (*node, rule_index[rule.as_str()]));
        }
        let (rule, node, next) = redexes.into_iter().next().unwrap();
        let canon = next.canonical_form();
        steps.push((rule, node));
        graphs.push(next);
        if let Some(i) = canons.iter().position(|c| *c == canon) {
            return Derivation {
                graphs,
                steps,
                status: DerivationStatus::CycleDetected(i, canons.len()),
            };
        }
        canons.push(canon);
    }
}
