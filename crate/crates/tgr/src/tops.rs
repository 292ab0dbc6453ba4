//! Tops — one-level sharing patterns — and precedences over them.
//!
//! The top of a node is its label together with the pattern of which
//! successor positions share a node. Patterns are kept canonical as
//! restricted-growth strings (first occurrence numbering), so the isomorphic
//! copy inside `Tops(f)` is literal equality and reflexivity of a precedence
//! on isomorphism classes becomes reflexivity on values.
//!
//! A precedence is a transitive relation on tops that is reflexive on
//! isomorphism classes and monotone in top size. The optional sharing
//! generator relates tops of one symbol by partition coarsening: the more
//! shared top is the smaller one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{FunSymbol, Label, NodeId, TermDag};

/// A function symbol plus the canonical sharing pattern of its argument
/// positions. `pattern[i]` is the 1-based block number of position `i`,
/// numbered by first occurrence, so `pattern[0] == 1` and each entry exceeds
/// the running maximum by at most one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalTop {
    pub symbol: FunSymbol,
    pub pattern: Vec<u32>,
}

impl CanonicalTop {
    pub fn new(symbol: FunSymbol, pattern: Vec<u32>) -> Result<CanonicalTop, TopsError> {
        if pattern.len() != symbol.arity {
            return Err(TopsError::MalformedPattern {
                top: format!("{}{{{}}}", symbol.name, join(&pattern)),
                reason: format!(
                    "pattern length {} does not match arity {}",
                    pattern.len(),
                    symbol.arity
                ),
            });
        }
        let mut max = 0;
        for &p in &pattern {
            if p == 0 || p > max + 1 {
                return Err(TopsError::MalformedPattern {
                    top: format!("{}{{{}}}", symbol.name, join(&pattern)),
                    reason: "not a restricted-growth string".into(),
                });
            }
            max = max.max(p);
        }
        Ok(CanonicalTop { symbol, pattern })
    }

    /// Number of nodes of the graph representative: the root plus one node
    /// per distinct successor.
    pub fn size(&self) -> usize {
        1 + self.pattern.iter().copied().max().unwrap_or(0) as usize
    }

    /// `self` shares at least as much as `other`: wherever `other` merges two
    /// positions, `self` merges them too.
    pub fn coarsens(&self, other: &CanonicalTop) -> bool {
        if self.symbol != other.symbol {
            return false;
        }
        let n = self.pattern.len();
        for i in 0..n {
            for j in i + 1..n {
                if other.pattern[i] == other.pattern[j] && self.pattern[i] != self.pattern[j] {
                    return false;
                }
            }
        }
        true
    }
}

fn join(pattern: &[u32]) -> String {
    pattern.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for CanonicalTop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pattern.is_empty() {
            write!(f, "{}", self.symbol.name)
        } else {
            write!(f, "{}{{{}}}", self.symbol.name, join(&self.pattern))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopsError {
    #[error("node {0} is labelled with a variable, tops are defined for function symbols")]
    VariableNode(NodeId),
    #[error("precedence pair {small} ⊑ {large} violates the size condition ({ssize} > {lsize})")]
    SizeConditionViolated { small: String, large: String, ssize: usize, lsize: usize },
    #[error("symbol {0} is not in the signature")]
    UnknownSymbol(String),
    #[error("top {0} is not in the precedence universe")]
    UnknownTop(String),
    #[error("malformed top {top}: {reason}")]
    MalformedPattern { top: String, reason: String },
}

/// The set of function symbols in play, with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn from_symbols<'a>(symbols: impl IntoIterator<Item = &'a FunSymbol>) -> Signature {
        let mut sig = Signature::new();
        for s in symbols {
            sig.arities.insert(s.name.clone(), s.arity);
        }
        sig
    }

    /// Every function symbol occurring in the dag.
    pub fn of_dag(dag: &TermDag) -> Signature {
        let mut sig = Signature::new();
        for n in dag.nodes() {
            if let Label::Fun(f) = dag.label(n) {
                sig.arities.insert(f.name.clone(), f.arity);
            }
        }
        sig
    }

    pub fn insert(&mut self, symbol: &FunSymbol) {
        self.arities.insert(symbol.name.clone(), symbol.arity);
    }

    pub fn merge(&mut self, other: &Signature) {
        for (name, arity) in &other.arities {
            self.arities.insert(name.clone(), *arity);
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = FunSymbol> + '_ {
        self.arities.iter().map(|(n, a)| FunSymbol::new(n.clone(), *a))
    }
}

/// The top of `n` in `G`: its symbol plus the sharing pattern of its
/// successor list.
pub fn top_of(dag: &TermDag, n: NodeId) -> Result<CanonicalTop, TopsError> {
    let symbol = match dag.label(n) {
        Label::Fun(f) => f.clone(),
        Label::Var(_) => return Err(TopsError::VariableNode(n)),
    };
    let mut blocks: BTreeMap<NodeId, u32> = BTreeMap::new();
    let mut pattern = Vec::with_capacity(symbol.arity);
    for t in dag.succ(n) {
        let next = blocks.len() as u32 + 1;
        pattern.push(*blocks.entry(*t).or_insert(next));
    }
    Ok(CanonicalTop { symbol, pattern })
}

/// All tops of a symbol: the restricted-growth strings of its arity, i.e.
/// all collapses of the tree `f(△,…,△)`.
pub fn tops_of_symbol(symbol: &FunSymbol) -> BTreeSet<CanonicalTop> {
    let mut out = BTreeSet::new();
    let mut pattern = Vec::with_capacity(symbol.arity);
    fn rec(
        symbol: &FunSymbol,
        pattern: &mut Vec<u32>,
        max: u32,
        out: &mut BTreeSet<CanonicalTop>,
    ) {
        if pattern.len() == symbol.arity {
            out.insert(CanonicalTop { symbol: symbol.clone(), pattern: pattern.clone() });
            return;
        }
        for next in 1..=max + 1 {
            pattern.push(next);
            rec(symbol, pattern, max.max(next), out);
            pattern.pop();
        }
    }
    rec(symbol, &mut pattern, 0, &mut out);
    out
}

/// A validated precedence: a transitive relation over the tops of a
/// signature, reflexive on canonical equality, size-monotone.
#[derive(Debug, Clone)]
pub struct Precedence {
    universe: Vec<CanonicalTop>,
    index: BTreeMap<CanonicalTop, usize>,
    leq: Vec<bool>,
    signature: Signature,
    decls: Vec<(CanonicalTop, CanonicalTop)>,
    auto_sharing: bool,
}

/// Build a precedence from declared strict pairs `small ⊑ large`, optionally
/// adding the sharing generator, then closing reflexively and transitively
/// and validating both definition conditions.
pub fn build_precedence(
    decls: &[(CanonicalTop, CanonicalTop)],
    auto_sharing: bool,
    signature: &Signature,
) -> Result<Precedence, TopsError> {
    let mut universe: Vec<CanonicalTop> = Vec::new();
    for symbol in signature.symbols() {
        universe.extend(tops_of_symbol(&symbol));
    }
    universe.sort();
    universe.dedup();
    let index: BTreeMap<CanonicalTop, usize> =
        universe.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let n = universe.len();
    let mut leq = vec![false; n * n];
    let resolve = |top: &CanonicalTop| -> Result<usize, TopsError> {
        match signature.arity(&top.symbol.name) {
            None => Err(TopsError::UnknownSymbol(top.symbol.name.clone())),
            Some(a) if a != top.symbol.arity => Err(TopsError::MalformedPattern {
                top: top.to_string(),
                reason: format!("symbol has arity {a}"),
            }),
            Some(_) => index
                .get(top)
                .copied()
                .ok_or_else(|| TopsError::UnknownTop(top.to_string())),
        }
    };
    for i in 0..n {
        leq[i * n + i] = true;
    }
    for (small, large) in decls {
        let s = resolve(small)?;
        let l = resolve(large)?;
        leq[s * n + l] = true;
    }
    if auto_sharing {
        for i in 0..n {
            for j in 0..n {
                if universe[i].coarsens(&universe[j]) {
                    leq[i * n + j] = true;
                }
            }
        }
    }
    // Transitive closure.
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    // Size condition on the closed relation.
    for i in 0..n {
        for j in 0..n {
            if leq[i * n + j] && universe[i].size() > universe[j].size() {
                return Err(TopsError::SizeConditionViolated {
                    small: universe[i].to_string(),
                    large: universe[j].to_string(),
                    ssize: universe[i].size(),
                    lsize: universe[j].size(),
                });
            }
        }
    }
    Ok(Precedence {
        universe,
        index,
        leq,
        signature: signature.clone(),
        decls: decls.to_vec(),
        auto_sharing,
    })
}

impl Precedence {
    /// `small ⊑ large` in the closed relation.
    pub fn leq(&self, small: &CanonicalTop, large: &CanonicalTop) -> Result<bool, TopsError> {
        let s = self.lookup(small)?;
        let l = self.lookup(large)?;
        Ok(self.leq[s * self.universe.len() + l])
    }

    /// The strict part: `small ⊑ large` but not conversely.
    pub fn less(&self, small: &CanonicalTop, large: &CanonicalTop) -> Result<bool, TopsError> {
        Ok(self.leq(small, large)? && !self.leq(large, small)?)
    }

    fn lookup(&self, top: &CanonicalTop) -> Result<usize, TopsError> {
        self.index.get(top).copied().ok_or_else(|| TopsError::UnknownTop(top.to_string()))
    }

    /// Index of a top inside the universe, for repeated id-based queries.
    pub fn top_id(&self, top: &CanonicalTop) -> Result<usize, TopsError> {
        self.lookup(top)
    }

    /// `⊑` by universe indices obtained from [`Precedence::top_id`].
    pub fn leq_ids(&self, small: usize, large: usize) -> bool {
        self.leq[small * self.universe.len() + large]
    }

    pub fn universe(&self) -> &[CanonicalTop] {
        &self.universe
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn decls(&self) -> &[(CanonicalTop, CanonicalTop)] {
        &self.decls
    }

    pub fn auto_sharing(&self) -> bool {
        self.auto_sharing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build;
    use crate::morphism::collapses;

    fn sym(name: &str, arity: usize) -> FunSymbol {
        FunSymbol::new(name, arity)
    }

    fn top(name: &str, arity: usize, pattern: &[u32]) -> CanonicalTop {
        CanonicalTop::new(sym(name, arity), pattern.to_vec()).unwrap()
    }

    fn fixture_signature() -> Signature {
        Signature::from_symbols(&[sym("f", 2), sym("g", 1), sym("a", 0), sym("b", 0)])
    }

    fn chain_precedence() -> Precedence {
        build_precedence(
            &[
                (top("f", 2, &[1, 1]), top("g", 1, &[1])),
                (top("g", 1, &[1]), top("f", 2, &[1, 2])),
            ],
            false,
            &fixture_signature(),
        )
        .unwrap()
    }

    #[test]
    fn top_of_shared_and_tree() {
        let shared = build::graph(&[(1, Label::fun("f", 2), vec![2, 2]), (2, Label::fun("a", 0), vec![])], 1);
        let fab = build::graph(
            &[
                (1, Label::fun("f", 2), vec![2, 3]),
                (2, Label::fun("a", 0), vec![]),
                (3, Label::fun("b", 0), vec![]),
            ],
            1,
        );
        assert_eq!(top_of(shared.dag(), NodeId(0)).unwrap(), top("f", 2, &[1, 1]));
        assert_eq!(top_of(fab.dag(), NodeId(0)).unwrap(), top("f", 2, &[1, 2]));
        assert_eq!(top_of(fab.dag(), NodeId(1)).unwrap(), top("a", 0, &[]));
    }

    #[test]
    fn top_of_variable_rejected() {
        let dag = crate::graph::TermDag::build(&[(1, Label::var("x"), vec![])], &[1]).unwrap();
        assert!(matches!(top_of(&dag, NodeId(0)), Err(TopsError::VariableNode(_))));
    }

    #[test]
    fn tops_counts_are_bell_numbers() {
        // Oracle: enumerate all collapses of the tree f(△,…,△) and
        // deduplicate by isomorphism.
        fn brute_tops(arity: usize) -> usize {
            let tri = Label::fun("tri", 0);
            let mut decls = vec![(0u32, Label::fun("f", arity), (1..=arity as u32).collect())];
            for i in 1..=arity as u32 {
                decls.push((i, tri.clone(), vec![]));
            }
            let tree = build::graph(&decls, 0);
            // All ways to partition the leaves: realized as graphs, then
            // deduplicated by mutual collapse.
            let mut reps: Vec<crate::graph::TermGraph> = Vec::new();
            let mut assign = vec![0u32; arity];
            loop {
                // Build graph with leaf i pointing to block assign[i].
                let blocks: std::collections::BTreeSet<u32> = assign.iter().copied().collect();
                let mut decls = vec![(
                    100u32,
                    Label::fun("f", arity),
                    assign.iter().map(|b| *b + 1).collect::<Vec<u32>>(),
                )];
                for b in &blocks {
                    decls.push((b + 1, tri.clone(), vec![]));
                }
                let candidate = build::graph(&decls, 100);
                if collapses(&tree, &candidate).is_some()
                    && !reps.iter().any(|r| crate::morphism::isomorphic(r, &candidate))
                {
                    reps.push(candidate);
                }
                // Next assignment (restricted growth not required here; iso
                // dedup handles duplicates).
                let mut i = 0;
                loop {
                    if i == arity {
                        return reps.len();
                    }
                    assign[i] += 1;
                    if assign[i] < arity as u32 {
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
            }
        }
        let bell = [1usize, 1, 2, 5, 15];
        for (arity, expected) in bell.into_iter().enumerate() {
            assert_eq!(tops_of_symbol(&sym("f", arity)).len(), expected, "arity {arity}");
            if arity >= 1 {
                assert_eq!(brute_tops(arity), expected, "brute arity {arity}");
            }
        }
    }

    #[test]
    fn chain_closure_and_queries() {
        let p = chain_precedence();
        let f11 = top("f", 2, &[1, 1]);
        let f12 = top("f", 2, &[1, 2]);
        let g1 = top("g", 1, &[1]);
        assert!(p.leq(&f11, &g1).unwrap());
        assert!(p.leq(&g1, &f12).unwrap());
        // By transitivity.
        assert!(p.leq(&f11, &f12).unwrap());
        assert!(!p.leq(&f12, &f11).unwrap());
        // Reflexivity.
        assert!(p.leq(&g1, &g1).unwrap());
    }

    #[test]
    fn auto_sharing_coarsening() {
        let p = build_precedence(&[], true, &fixture_signature()).unwrap();
        let f11 = top("f", 2, &[1, 1]);
        let f12 = top("f", 2, &[1, 2]);
        assert!(p.leq(&f11, &f12).unwrap());
        assert!(!p.leq(&f12, &f11).unwrap());
        assert!(p.less(&f11, &f12).unwrap());
    }

    #[test]
    fn size_condition_rejected() {
        let err = build_precedence(
            &[(top("f", 2, &[1, 2]), top("a", 0, &[]))],
            false,
            &fixture_signature(),
        )
        .unwrap_err();
        assert!(matches!(err, TopsError::SizeConditionViolated { .. }));
    }

    #[test]
    fn unknown_symbol_rejected() {
        let err = build_precedence(
            &[(top("h", 1, &[1]), top("g", 1, &[1]))],
            false,
            &fixture_signature(),
        )
        .unwrap_err();
        assert!(matches!(err, TopsError::UnknownSymbol(_)));
    }

    #[test]
    fn validator_invariants_hold() {
        // On every stored pair: transitive, size-monotone, reflexive on
        // canonical equality; universe finite by construction.
        for p in [chain_precedence(), build_precedence(&[], true, &fixture_signature()).unwrap()] {
            let n = p.universe().len();
            for i in 0..n {
                let ti = &p.universe()[i];
                assert!(p.leq(ti, ti).unwrap());
                for j in 0..n {
                    let tj = &p.universe()[j];
                    if p.leq(ti, tj).unwrap() {
                        assert!(ti.size() <= tj.size());
                        for k in 0..n {
                            let tk = &p.universe()[k];
                            if p.leq(tj, tk).unwrap() {
                                assert!(p.leq(ti, tk).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn auto_sharing_respects_collapse_tops() {
        // If a collapse maps n to m, the image's top is below the source's.
        let p = build_precedence(&[], true, &fixture_signature()).unwrap();
        let tree = build::graph(
            &[
                (1, Label::fun("f", 2), vec![2, 3]),
                (2, Label::fun("a", 0), vec![]),
                (3, Label::fun("a", 0), vec![]),
            ],
            1,
        );
        let shared =
            build::graph(&[(1, Label::fun("f", 2), vec![2, 2]), (2, Label::fun("a", 0), vec![])], 1);
        let m = collapses(&tree, &shared).unwrap();
        for n in tree.nodes() {
            let img = m.apply(n).unwrap();
            let t_src = top_of(tree.dag(), n).unwrap();
            let t_img = top_of(shared.dag(), img).unwrap();
            assert!(p.leq(&t_img, &t_src).unwrap());
        }
    }
}
