//! The term-graph lexicographic path order, rule orientation, derivation
//! certification, and good-pair search.
//!
//! The path order compares term dags through their inlet lists: a dag is
//! smaller when it matches a projection of the other's arguments (case one),
//! when its inlet tops are lexicographically strictly below and its argument
//! graph stays below the whole (case two), or when the inlet tops agree and
//! the argument graphs compare (case three). Term graphs enter with inlets
//! `[root]`, so case one projects the root's successor list — there index
//! sequences may repeat entries, which lets a shared argument referenced
//! twice match two distinct argument occurrences. On top of the three cases,
//! a graph that properly collapses onto another under precedence-compatible
//! tops is larger; this mirrors the fact that the embedding relation
//! contains the collapse relation.
//!
//! The order is only defined where the distinct nodes of an inlet list are
//! pairwise parallel. A comparison that runs into a violated side condition
//! reports `Inapplicable` rather than a silent false; a positive answer from
//! another case still wins.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::embedding::{embeds, strict_embeds, EmbedError, EmbeddingWitness, Variant};
use crate::graph::{CanonicalDag, GraphError, Label, NodeId, TermDag, TermGraph};
use crate::rewriting::{Derivation, Grs, Rule};
use crate::tops::{top_of, CanonicalTop, Precedence, Signature, TopsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("the path order is defined on ground dags only")]
    NonGroundGraph,
    #[error("rule {0} contains variables; enable vars-as-constants to orient it")]
    NonGroundRule(String),
    #[error(transparent)]
    Tops(#[from] TopsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// Tri-state result of a path-order comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpoOutcome {
    Holds,
    Fails,
    /// The definition's parallel-inlets hypothesis failed somewhere the
    /// comparison needed it.
    Inapplicable(String),
}

impl LpoOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, LpoOutcome::Holds)
    }
}

/// `smaller <_lpo larger`, as a boolean; inapplicable counts as false.
pub fn lpo_less(
    smaller: &TermDag,
    larger: &TermDag,
    prec: &Precedence,
) -> Result<bool, OrderError> {
    Ok(lpo_compare(smaller, larger, prec)?.holds())
}

/// Full tri-state comparison `smaller <_lpo larger`.
pub fn lpo_compare(
    smaller: &TermDag,
    larger: &TermDag,
    prec: &Precedence,
) -> Result<LpoOutcome, OrderError> {
    if !smaller.is_ground() || !larger.is_ground() {
        return Err(OrderError::NonGroundGraph);
    }
    let mut ctx = Ctx { prec, memo: HashMap::new() };
    ctx.compare(smaller, larger)
}

struct Ctx<'a> {
    prec: &'a Precedence,
    /// `None` marks a comparison in progress: recursive re-entry resolves to
    /// the least fixed point, i.e. fails.
    memo: HashMap<(CanonicalDag, CanonicalDag), Option<LpoOutcome>>,
}

/// Distinct nodes of the inlet list must be mutually unreachable; repeated
/// occurrences of one node are ordered occurrences, not a violation.
fn inlets_parallel(dag: &TermDag) -> Result<bool, OrderError> {
    let distinct: Vec<NodeId> = {
        let set: BTreeSet<NodeId> = dag.inlets().iter().copied().collect();
        set.into_iter().collect()
    };
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[i + 1..] {
            if !dag.is_parallel(*a, *b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn inlet_tops(dag: &TermDag) -> Result<Vec<CanonicalTop>, OrderError> {
    dag.inlets()
        .iter()
        .map(|n| top_of(dag, *n).map_err(OrderError::from))
        .collect()
}

/// Strict lexicographic comparison over the precedence's strict part; a
/// proper prefix is smaller.
fn toplist_less(
    left: &[CanonicalTop],
    right: &[CanonicalTop],
    prec: &Precedence,
) -> Result<bool, OrderError> {
    for (x, y) in left.iter().zip(right.iter()) {
        if x != y {
            return Ok(prec.less(x, y)?);
        }
    }
    Ok(left.len() < right.len())
}

/// Total morphism `g → h` matching the inlet lists index-wise; witnesses
/// that `h` is a more shared version of `g`.
fn dag_collapse(g: &TermDag, h: &TermDag) -> Option<BTreeMap<NodeId, NodeId>> {
    if g.inlets().len() != h.inlets().len() {
        return None;
    }
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut work: Vec<NodeId> = Vec::new();
    for (a, b) in g.inlets().iter().zip(h.inlets().iter()) {
        match map.get(a) {
            Some(prev) if prev != b => return None,
            Some(_) => {}
            None => {
                map.insert(*a, *b);
                work.push(*a);
            }
        }
    }
    while let Some(n) = work.pop() {
        let m = map[&n];
        if g.label(n) != h.label(m) || g.succ(n).len() != h.succ(m).len() {
            return None;
        }
        for (x, y) in g.succ(n).iter().zip(h.succ(m).iter()) {
            match map.get(x) {
                Some(prev) if prev != y => return None,
                Some(_) => {}
                None => {
                    map.insert(*x, *y);
                    work.push(*x);
                }
            }
        }
    }
    Some(map)
}

/// All non-decreasing index sequences over `0..k` with length up to
/// `max_len`, shortest first.
fn nondecreasing_sequences(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &layer {
            let start = seq.last().map_or(0, |l| *l);
            for i in start..k {
                let mut ext = seq.clone();
                ext.push(i);
                next.push(ext);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// All strictly increasing proper subsequences of `0..k` (including empty,
/// excluding the full one).
fn proper_subsequences(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << k) {
        if mask.count_ones() as usize == k {
            continue;
        }
        let seq: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        out.push(seq);
    }
    out.sort_by_key(|s| s.len());
    out
}

impl Ctx<'_> {
    fn compare(&mut self, t: &TermDag, s: &TermDag) -> Result<LpoOutcome, OrderError> {
        if !inlets_parallel(t)? {
            return Ok(LpoOutcome::Inapplicable(
                "inlets of the smaller side are not pairwise parallel".into(),
            ));
        }
        if !inlets_parallel(s)? {
            return Ok(LpoOutcome::Inapplicable(
                "inlets of the larger side are not pairwise parallel".into(),
            ));
        }
        let key = (t.canonical_form(), s.canonical_form());
        match self.memo.get(&key) {
            Some(Some(outcome)) => return Ok(outcome.clone()),
            Some(None) => return Ok(LpoOutcome::Fails),
            None => {}
        }
        self.memo.insert(key.clone(), None);
        let outcome = self.cases(t, s)?;
        self.memo.insert(key, Some(outcome.clone()));
        Ok(outcome)
    }

    fn cases(&mut self, t: &TermDag, s: &TermDag) -> Result<LpoOutcome, OrderError> {
        let mut inapplicable: Option<String> = None;
        let note = |outcome: &LpoOutcome, inapplicable: &mut Option<String>| {
            if let LpoOutcome::Inapplicable(reason) = outcome {
                inapplicable.get_or_insert_with(|| reason.clone());
            }
        };

        // Sharing case: s properly collapses onto t and the precedence
        // relates every merged top.
        if let Some(m) = dag_collapse(s, t) {
            if dag_collapse(t, s).is_none() {
                let mut compatible = true;
                for n in s.nodes() {
                    let src = top_of(s, n)?;
                    let img = top_of(t, m[&n])?;
                    if !self.prec.leq(&img, &src)? {
                        compatible = false;
                        break;
                    }
                }
                if compatible {
                    return Ok(LpoOutcome::Holds);
                }
            }
        }

        let t_tops = inlet_tops(t)?;
        let s_tops = inlet_tops(s)?;

        // Case two: strictly smaller inlet tops, argument graph below the
        // whole of s.
        if toplist_less(&t_tops, &s_tops, self.prec)? {
            let arg_t = t.argument_graph();
            let sub = self.compare(&arg_t, s)?;
            if sub.holds() {
                return Ok(LpoOutcome::Holds);
            }
            note(&sub, &mut inapplicable);
        }

        // Case three: equal inlet tops, argument graphs compare.
        if t_tops == s_tops {
            let arg_t = t.argument_graph();
            let arg_s = s.argument_graph();
            let sub = self.compare(&arg_t, &arg_s)?;
            if sub.holds() {
                return Ok(LpoOutcome::Holds);
            }
            note(&sub, &mut inapplicable);
        }

        // Case one: t is below some projection of s's arguments. For a
        // rooted s the projection draws from the root's successor list and
        // may repeat entries; at argument level it draws proper
        // subsequences of the inlets.
        let rooted = s.inlets().len() == 1;
        let base: Vec<NodeId> = if rooted {
            s.succ(s.inlets()[0]).to_vec()
        } else {
            s.inlets().to_vec()
        };
        let sequences = if rooted {
            nondecreasing_sequences(base.len(), base.len().max(t.inlets().len()))
        } else {
            proper_subsequences(base.len())
        };
        let t_canon = t.canonical_form();
        for seq in sequences {
            let roots: Vec<NodeId> = seq.iter().map(|i| base[*i]).collect();
            let proj = s.restrict(&roots)?;
            if proj.canonical_form() == t_canon {
                return Ok(LpoOutcome::Holds);
            }
            let sub = self.compare(t, &proj)?;
            if sub.holds() {
                return Ok(LpoOutcome::Holds);
            }
            note(&sub, &mut inapplicable);
        }

        Ok(match inapplicable {
            Some(reason) => LpoOutcome::Inapplicable(reason),
            None => LpoOutcome::Fails,
        })
    }
}

/// Which order a verdict is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Lpo,
    StrictEmbedding,
}

/// Per-rule orientation verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Orientation {
    /// rhs strictly below lhs.
    Decreasing,
    /// lhs strictly below rhs.
    Increasing,
    Incomparable,
    Inapplicable(String),
}

#[derive(Debug, Clone)]
pub struct RuleOrientation {
    pub rule: String,
    pub verdict: Orientation,
}

/// Printed with every orientation report: orienting the rules does not
/// orient all rewrite steps, so no termination claim follows.
pub const ORIENTATION_CAVEAT: &str =
    "rule orientation does not imply termination of the rewrite relation";

fn vars_to_constants(dag: &TermDag) -> TermDag {
    let labels = dag
        .nodes()
        .map(|n| match dag.label(n) {
            Label::Var(v) => Label::fun(format!("?{v}"), 0),
            other => other.clone(),
        })
        .collect();
    TermDag::from_tables(
        labels,
        dag.nodes().map(|n| dag.succ(n).to_vec()).collect(),
        dag.inlets().to_vec(),
        dag.nodes().map(|n| dag.name(n).to_string()).collect(),
        crate::graph::Validation::Strict,
    )
    .expect("replacing variables by constants preserves validity")
}

/// Rebuild the precedence over a signature extended with the rule symbols
/// (and the private constants standing in for variables).
fn extend_precedence(prec: &Precedence, extra: &Signature) -> Result<Precedence, OrderError> {
    let mut sig = prec.signature().clone();
    sig.merge(extra);
    Ok(crate::tops::build_precedence(prec.decls(), prec.auto_sharing(), &sig)?)
}

/// Orient every rule of the system under the chosen order.
pub fn orient_grs(
    grs: &Grs,
    prec: &Precedence,
    vars_as_constants: bool,
    order: OrderKind,
) -> Result<Vec<RuleOrientation>, OrderError> {
    let mut out = Vec::new();
    for rule in &grs.rules {
        out.push(RuleOrientation {
            rule: rule.name().to_string(),
            verdict: orient_rule(rule, prec, vars_as_constants, order)?,
        });
    }
    Ok(out)
}

fn orient_rule(
    rule: &Rule,
    prec: &Precedence,
    vars_as_constants: bool,
    order: OrderKind,
) -> Result<Orientation, OrderError> {
    let ground = rule.carrier().is_ground();
    if !ground && !vars_as_constants {
        return Err(OrderError::NonGroundRule(rule.name().to_string()));
    }
    let carrier =
        if ground { rule.carrier().clone() } else { vars_to_constants(rule.carrier()) };
    let lhs = carrier.restrict(&[rule.lhs_root()])?;
    let rhs = carrier.restrict(&[rule.rhs_root()])?;
    let prec = extend_precedence(prec, &Signature::of_dag(&carrier))?;
    match order {
        OrderKind::Lpo => {
            let down = lpo_compare(&rhs, &lhs, &prec)?;
            let up = lpo_compare(&lhs, &rhs, &prec)?;
            Ok(match (down, up) {
                (LpoOutcome::Holds, LpoOutcome::Holds) => Orientation::Incomparable,
                (LpoOutcome::Holds, _) => Orientation::Decreasing,
                (_, LpoOutcome::Holds) => Orientation::Increasing,
                (LpoOutcome::Inapplicable(r), _) | (_, LpoOutcome::Inapplicable(r)) => {
                    Orientation::Inapplicable(r)
                }
                _ => Orientation::Incomparable,
            })
        }
        OrderKind::StrictEmbedding => {
            let l = TermGraph::new(lhs).map_err(|e| OrderError::Graph(match e {
                crate::graph::TermGraphError::Graph(g) => g,
                crate::graph::TermGraphError::NotRooted(_) => {
                    GraphError::UnknownNode(rule.lhs_root())
                }
            }))?;
            let r = TermGraph::new(rhs).map_err(|_| OrderError::NonGroundRule(
                rule.name().to_string(),
            ))?;
            if strict_embeds(&l, &r, &prec)? {
                Ok(Orientation::Decreasing)
            } else if strict_embeds(&r, &l, &prec)? {
                Ok(Orientation::Increasing)
            } else {
                Ok(Orientation::Incomparable)
            }
        }
    }
}

/// Verdict for one derivation step.
#[derive(Debug, Clone)]
pub struct StepVerdict {
    pub index: usize,
    pub rule: String,
    pub decreasing: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub steps: Vec<StepVerdict>,
    pub descending: bool,
}

/// Check every step of a derivation for strict descent in the chosen order.
pub fn certify_derivation(
    derivation: &Derivation,
    prec: &Precedence,
    order: OrderKind,
) -> Result<Certification, OrderError> {
    let mut steps = Vec::new();
    let mut descending = true;
    for (k, (rule, _)) in derivation.steps.iter().enumerate() {
        let before = &derivation.graphs[k];
        let after = &derivation.graphs[k + 1];
        let mut sig = Signature::of_dag(before.dag());
        sig.merge(&Signature::of_dag(after.dag()));
        let prec = extend_precedence(prec, &sig)?;
        let (decreasing, note) = match order {
            OrderKind::Lpo => match lpo_compare(after.dag(), before.dag(), &prec)? {
                LpoOutcome::Holds => (true, None),
                LpoOutcome::Fails => (false, None),
                LpoOutcome::Inapplicable(r) => (false, Some(r)),
            },
            OrderKind::StrictEmbedding => (strict_embeds(before, after, &prec)?, None),
        };
        descending &= decreasing;
        steps.push(StepVerdict { index: k + 1, rule: rule.clone(), decreasing, note });
    }
    Ok(Certification { steps, descending })
}

/// A good pair in a finite sequence: indices `i < j` (1-based) such that the
/// later graph embeds the earlier one.
#[derive(Debug, Clone)]
pub struct GoodPair {
    pub i: usize,
    pub j: usize,
    pub witness: EmbeddingWitness,
}

/// The least `(i, j)` in lexicographic order with `T_i ⊑ T_j`, or `None`
/// when the finite sequence is bad.
pub fn good_pair(
    sequence: &[TermGraph],
    prec: &Precedence,
) -> Result<Option<GoodPair>, OrderError> {
    for i in 0..sequence.len() {
        for j in i + 1..sequence.len() {
            if let Some(witness) = embeds(&sequence[j], &sequence[i], prec, Variant::Final)? {
                return Ok(Some(GoodPair { i: i + 1, j: j + 1, witness }));
            }
        }
    }
    Ok(None)
}
