//! Δ-morphisms between rooted term graphs.
//!
//! A Δ-morphism maps root to root and commutes with labels and ordered
//! successors at every node whose label is outside Δ. With Δ = ∅ it witnesses
//! the collapse relation (the target is a "more shared" version of the
//! source); mutual collapse is isomorphism. With Δ = the variables it is rule
//! matching: variable nodes of the left-hand side may map anywhere.
//!
//! Because the root image is fixed and successor commutation forces the image
//! of every child, a Δ-morphism is found by propagation from the root with a
//! consistency check; no search is involved.

use std::collections::BTreeMap;

use crate::graph::{GraphError, Label, NodeId, TermDag, TermGraph};

/// What a morphism is being used as.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismKind {
    /// Morphic away from the given labels.
    Delta(Vec<Label>),
    Collapse,
    Matching,
    EmbeddingWitness,
}

/// A node map between two graphs, total on its stated domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub map: BTreeMap<NodeId, NodeId>,
    pub kind: MorphismKind,
}

impl Morphism {
    pub fn apply(&self, n: NodeId) -> Option<NodeId> {
        self.map.get(&n).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.map.keys().copied()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.map.values().all(|v| seen.insert(*v))
    }
}

/// Does `label` belong to Δ? Variables are matched as a class, function
/// symbols verbatim.
fn in_delta(delta: &[Label], label: &Label, vars_wild: bool) -> bool {
    if vars_wild && label.is_var() {
        return true;
    }
    delta.iter().any(|d| d == label)
}

fn propagate(
    source: &TermDag,
    source_root: NodeId,
    target: &TermDag,
    target_root: NodeId,
    delta: &[Label],
    vars_wild: bool,
    kind: MorphismKind,
) -> Option<Morphism> {
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut work: Vec<NodeId> = vec![source_root];
    map.insert(source_root, target_root);
    while let Some(s) = work.pop() {
        let t = map[&s];
        if in_delta(delta, source.label(s), vars_wild) {
            continue;
        }
        if source.label(s) != target.label(t) {
            return None;
        }
        let s_succ = source.succ(s);
        let t_succ = target.succ(t);
        if s_succ.len() != t_succ.len() {
            return None;
        }
        for (si, ti) in s_succ.iter().zip(t_succ.iter()) {
            match map.get(si) {
                Some(prev) if prev != ti => return None,
                Some(_) => {}
                None => {
                    map.insert(*si, *ti);
                    work.push(*si);
                }
            }
        }
    }
    Some(Morphism { map, kind })
}

/// The unique Δ-morphism from `source` to `target` with the roots matched,
/// if one exists.
pub fn find_rooted_morphism(
    source: &TermGraph,
    target: &TermGraph,
    delta: &[Label],
) -> Option<Morphism> {
    propagate(
        source.dag(),
        source.root(),
        target.dag(),
        target.root(),
        delta,
        false,
        MorphismKind::Delta(delta.to_vec()),
    )
}

/// `source ⊵ target`: the ∅-morphism witnessing that `target` is a more
/// shared version of `source`.
pub fn collapses(source: &TermGraph, target: &TermGraph) -> Option<Morphism> {
    propagate(
        source.dag(),
        source.root(),
        target.dag(),
        target.root(),
        &[],
        false,
        MorphismKind::Collapse,
    )
}

/// Mutual collapse.
pub fn isomorphic(a: &TermGraph, b: &TermGraph) -> bool {
    collapses(a, b).is_some() && collapses(b, a).is_some()
}

/// Match a rule left-hand side against the subgraph of `host` at `at`:
/// a Δ-morphism with Δ = all variables, sending `lhs`'s root to `at`.
pub fn match_rule_at(
    lhs: &TermGraph,
    host: &TermGraph,
    at: NodeId,
) -> Result<Option<Morphism>, GraphError> {
    if !host.contains(at) {
        return Err(GraphError::UnknownNode(at));
    }
    Ok(propagate(
        lhs.dag(),
        lhs.root(),
        host.dag(),
        at,
        &[],
        true,
        MorphismKind::Matching,
    ))
}

/// Compose `first: A → B` then `second: B → C` on the domain where both are
/// defined.
pub fn compose(first: &Morphism, second: &Morphism, kind: MorphismKind) -> Morphism {
    let mut map = BTreeMap::new();
    for (a, b) in &first.map {
        if let Some(c) = second.map.get(b) {
            map.insert(*a, *c);
        }
    }
    Morphism { map, kind }
}
