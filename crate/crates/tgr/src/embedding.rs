//! Homeomorphic embedding on ground term graphs, in three variants.
//!
//! The final relation `S ⊒ T` ("S embeds T") asks for a partial function
//! from S's nodes onto all of T's nodes such that
//!
//! 1. the top of every image is below the top of its source in the
//!    precedence,
//! 2. every edge between images is matched by a nonempty path in S into the
//!    target's preimage, and
//! 3. whenever one image is left of another (the `≪` order on parallel
//!    nodes), either no node of the target's preimage is parallel to the
//!    source, or the source is left of some preimage node.
//!
//! The two earlier attempts are kept for comparison: the first maps the
//! embedded graph totally *into* the embedding graph (no surjectivity, no
//! order condition), the second is the final relation without the order
//! condition. Both accept argument swaps like f(a,b) against f(b,a) that the
//! final relation rejects.
//!
//! `brute_force_embeds` is a literal enumeration of candidate maps used as
//! an oracle; it shares only the condition checker with the search.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{NodeId, TermGraph};
use crate::morphism::{Morphism, MorphismKind};
use crate::tops::{top_of, CanonicalTop, Precedence, TopsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Attempt1,
    Attempt2,
    Final,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Attempt1 => "attempt1",
            Variant::Attempt2 => "attempt2",
            Variant::Final => "final",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("embedding is defined on ground graphs only")]
    NonGroundGraph,
    #[error("graph with {0} nodes exceeds the brute-force bound of 8")]
    TooLarge(usize),
    #[error(transparent)]
    Tops(#[from] TopsError),
}

/// A witness for one of the embedding variants.
///
/// For `Attempt2`/`Final` the map runs from the larger graph's nodes onto all
/// of the smaller graph's nodes; for `Attempt1` it runs totally from the
/// embedded (smaller) graph into the embedding one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub morphism: Morphism,
    pub variant: Variant,
}

/// Reachability, parallelism, and `≪` tables plus per-node tops, computed
/// once per graph.
#[derive(Debug, Clone)]
pub struct AnalyzedGraph {
    graph: TermGraph,
    reach: Vec<Vec<bool>>,
    direct: Vec<Vec<bool>>,
    parallel: Vec<Vec<bool>>,
    left: Vec<Vec<bool>>,
    tops: Vec<CanonicalTop>,
}

impl AnalyzedGraph {
    pub fn new(graph: &TermGraph) -> Result<AnalyzedGraph, EmbedError> {
        if !graph.is_ground() {
            return Err(EmbedError::NonGroundGraph);
        }
        let n = graph.node_count();
        let reach = graph.reach_matrix();
        let mut direct = vec![vec![false; n]; n];
        for i in graph.nodes() {
            for t in graph.succ(i) {
                direct[i.index()][t.index()] = true;
            }
        }
        let mut parallel = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                parallel[i][j] = i != j && !reach[i][j] && !reach[j][i];
            }
        }
        let minpos = graph.min_positions();
        let mut left = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if parallel[i][j] {
                    if let (Some(p), Some(q)) = (&minpos[i], &minpos[j]) {
                        left[i][j] = crate::graph::lex_less(p, q);
                    }
                }
            }
        }
        let tops = graph
            .nodes()
            .map(|n| top_of(graph.dag(), n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnalyzedGraph { graph: graph.clone(), reach, direct, parallel, left, tops })
    }

    pub fn graph(&self) -> &TermGraph {
        &self.graph
    }

    /// `n ⇀⁺ m`: nonempty path.
    fn path(&self, n: usize, m: usize) -> bool {
        n != m && self.reach[n][m]
    }
}

/// Universe indices of every node's top, for repeated queries against one
/// precedence.
pub fn top_ids(g: &AnalyzedGraph, p: &Precedence) -> Result<Vec<usize>, EmbedError> {
    Ok(g.tops.iter().map(|t| p.top_id(t)).collect::<Result<Vec<_>, _>>()?)
}

/// Direct-successor pairs of a graph, deduplicated.
fn edge_pairs(g: &TermGraph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in g.nodes() {
        for t in g.succ(n) {
            let pair = (n.index(), t.index());
            if !out.contains(&pair) {
                out.push(pair);
            }
        }
    }
    out
}

/// Does `S ⊒ T` hold for the chosen variant, and with which witness?
pub fn embeds(
    larger: &TermGraph,
    smaller: &TermGraph,
    prec: &Precedence,
    variant: Variant,
) -> Result<Option<EmbeddingWitness>, EmbedError> {
    let s = AnalyzedGraph::new(larger)?;
    let t = AnalyzedGraph::new(smaller)?;
    embeds_analyzed(&s, &t, prec, variant)
}

/// As [`embeds`], over pre-analyzed graphs (for corpus sweeps).
pub fn embeds_analyzed(
    s: &AnalyzedGraph,
    t: &AnalyzedGraph,
    prec: &Precedence,
    variant: Variant,
) -> Result<Option<EmbeddingWitness>, EmbedError> {
    let s_tid = top_ids(s, prec)?;
    let t_tid = top_ids(t, prec)?;
    Ok(embeds_ids(s, &s_tid, t, &t_tid, prec, variant))
}

/// As [`embeds`], with the tops already resolved to universe indices.
pub fn embeds_ids(
    s: &AnalyzedGraph,
    s_tid: &[usize],
    t: &AnalyzedGraph,
    t_tid: &[usize],
    prec: &Precedence,
    variant: Variant,
) -> Option<EmbeddingWitness> {
    let map = match variant {
        Variant::Attempt1 => search_total_into(s, s_tid, t, t_tid, prec),
        Variant::Attempt2 => search_partial_onto(s, s_tid, t, t_tid, prec, false),
        Variant::Final => search_partial_onto(s, s_tid, t, t_tid, prec, true),
    };
    map.map(|map| EmbeddingWitness {
        morphism: Morphism { map, kind: MorphismKind::EmbeddingWitness },
        variant,
    })
}

/// First-attempt search: a total map from the embedded graph `t` into `s`.
fn search_total_into(
    s: &AnalyzedGraph,
    s_tid: &[usize],
    t: &AnalyzedGraph,
    t_tid: &[usize],
    prec: &Precedence,
) -> Option<BTreeMap<NodeId, NodeId>> {
    let tn = t.graph.node_count();
    let sn = s.graph.node_count();
    let cands: Vec<Vec<usize>> = (0..tn)
        .map(|ti| (0..sn).filter(|si| prec.leq_ids(t_tid[ti], s_tid[*si])).collect())
        .collect();
    if cands.iter().any(|c| c.is_empty()) {
        return None;
    }
    let edges = edge_pairs(&t.graph);
    let mut assign: Vec<usize> = Vec::new();
    fn rec(
        k: usize,
        tn: usize,
        cands: &[Vec<usize>],
        edges: &[(usize, usize)],
        s: &AnalyzedGraph,
        assign: &mut Vec<usize>,
    ) -> bool {
        if k == tn {
            return true;
        }
        'next: for &c in &cands[k] {
            assign.push(c);
            for &(i, j) in edges {
                if i.max(j) == k && i != j {
                    let (mi, mj) = (assign[i], assign[j]);
                    if !s.path(mi, mj) {
                        assign.pop();
                        continue 'next;
                    }
                }
            }
            if rec(k + 1, tn, cands, edges, s, assign) {
                return true;
            }
            assign.pop();
        }
        false
    }
    if rec(0, tn, &cands, &edges, s, &mut assign) {
        Some(
            assign
                .iter()
                .enumerate()
                .map(|(ti, si)| (NodeId(ti as u32), NodeId(*si as u32)))
                .collect(),
        )
    } else {
        None
    }
}

/// Second-attempt and final search: a partial surjective map from `s` onto
/// `t`, realized as disjoint nonempty preimage sets per `t`-node. Preimage
/// candidates are pre-filtered by the top condition; edge and order
/// conditions are checked as soon as both endpoints are assigned. Subsets
/// are tried largest first so witnesses cover as much sharing as possible.
fn search_partial_onto(
    s: &AnalyzedGraph,
    s_tid: &[usize],
    t: &AnalyzedGraph,
    t_tid: &[usize],
    prec: &Precedence,
    ordered: bool,
) -> Option<BTreeMap<NodeId, NodeId>> {
    let sn = s.graph.node_count();
    let tn = t.graph.node_count();
    if sn < tn {
        return None;
    }
    let cands: Vec<Vec<usize>> = (0..tn)
        .map(|ti| (0..sn).filter(|si| prec.leq_ids(t_tid[ti], s_tid[*si])).collect())
        .collect();
    if cands.iter().any(|c| c.is_empty()) {
        return None;
    }
    let edges = edge_pairs(&t.graph);
    let mut order_pairs: Vec<(usize, usize)> = Vec::new();
    if ordered {
        for i in 0..tn {
            for j in 0..tn {
                if t.left[i][j] {
                    order_pairs.push((i, j));
                }
            }
        }
    }

    struct Search<'a> {
        s: &'a AnalyzedGraph,
        cands: &'a [Vec<usize>],
        edges: &'a [(usize, usize)],
        order_pairs: &'a [(usize, usize)],
        preim: Vec<Vec<usize>>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        /// Condition on a fully assigned image edge (i ⇀ j in T): every
        /// preimage of i has a nonempty path into some preimage of j.
        fn edge_ok(&self, i: usize, j: usize) -> bool {
            self.preim[i]
                .iter()
                .all(|&a| self.preim[j].iter().any(|&b| self.s.path(a, b)))
        }

        /// Order condition on an image pair (i ≪ j in T), read over the
        /// preimage sets: either no preimage of i is parallel to any
        /// preimage of j, or some preimage of i is left of some preimage of
        /// j. Preimage positions determine image positions exactly, so this
        /// is the reading under which a graph embeds its collapses.
        fn order_ok(&self, i: usize, j: usize) -> bool {
            let none_parallel = self.preim[i]
                .iter()
                .all(|&a| self.preim[j].iter().all(|&b| !self.s.parallel[a][b]));
            none_parallel
                || self.preim[i]
                    .iter()
                    .any(|&a| self.preim[j].iter().any(|&b| self.s.left[a][b]))
        }

        /// Both endpoints of a pair are assigned exactly when the larger
        /// index is the node assigned last.
        fn constraints_ok(&self, k: usize) -> bool {
            for &(i, j) in self.edges {
                if i.max(j) == k && !self.edge_ok(i, j) {
                    return false;
                }
            }
            for &(i, j) in self.order_pairs {
                if i.max(j) == k && !self.order_ok(i, j) {
                    return false;
                }
            }
            true
        }

        fn assign(&mut self, k: usize) -> bool {
            if k == self.preim.len() {
                return true;
            }
            let avail: Vec<usize> =
                self.cands[k].iter().copied().filter(|&c| !self.used[c]).collect();
            // Non-empty subsets, largest first, lexicographic within a size.
            let n = avail.len();
            for size in (1..=n).rev() {
                let mut combo: Vec<usize> = (0..size).collect();
                loop {
                    let subset: Vec<usize> = combo.iter().map(|&i| avail[i]).collect();
                    for &c in &subset {
                        self.used[c] = true;
                    }
                    self.preim[k] = subset;
                    if self.constraints_ok(k) && self.assign(k + 1) {
                        return true;
                    }
                    for c in std::mem::take(&mut self.preim[k]) {
                        self.used[c] = false;
                    }
                    if !next_combination(&mut combo, n) {
                        break;
                    }
                }
            }
            false
        }
    }

    /// Advance to the next lexicographic combination of `combo.len()` picks
    /// out of `n`; false when exhausted.
    fn next_combination(combo: &mut [usize], n: usize) -> bool {
        let size = combo.len();
        let mut i = size;
        while i > 0 {
            i -= 1;
            if combo[i] < i + n - size {
                combo[i] += 1;
                for j in i + 1..size {
                    combo[j] = combo[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    let mut search = Search {
        s,
        cands: &cands,
        edges: &edges,
        order_pairs: &order_pairs,
        preim: vec![Vec::new(); tn],
        used: vec![false; sn],
    };
    if search.assign(0) {
        let mut map = BTreeMap::new();
        for (ti, pre) in search.preim.iter().enumerate() {
            for &si in pre {
                map.insert(NodeId(si as u32), NodeId(ti as u32));
            }
        }
        Some(map)
    } else {
        None
    }
}

/// Check a claimed witness literally against the variant's definition.
/// For `Attempt1` the map must be total from `smaller` into `larger`; for
/// the other variants partial from `larger` onto `smaller`.
pub fn validate_witness(
    larger: &TermGraph,
    smaller: &TermGraph,
    prec: &Precedence,
    variant: Variant,
    map: &BTreeMap<NodeId, NodeId>,
) -> Result<(), String> {
    let s = AnalyzedGraph::new(larger).map_err(|e| e.to_string())?;
    let t = AnalyzedGraph::new(smaller).map_err(|e| e.to_string())?;
    validate_witness_analyzed(&s, &t, prec, variant, map)
}

pub fn validate_witness_analyzed(
    s: &AnalyzedGraph,
    t: &AnalyzedGraph,
    prec: &Precedence,
    variant: Variant,
    map: &BTreeMap<NodeId, NodeId>,
) -> Result<(), String> {
    let leq = |small: &CanonicalTop, large: &CanonicalTop| -> Result<bool, String> {
        prec.leq(small, large).map_err(|e| e.to_string())
    };
    match variant {
        Variant::Attempt1 => {
            // Total map t → s with top and path conditions.
            for n in t.graph.nodes() {
                let m = map.get(&n).ok_or_else(|| format!("node {n} unmapped"))?;
                if !s.graph.contains(*m) {
                    return Err(format!("image {m} outside the embedding graph"));
                }
                if !leq(&t.tops[n.index()], &s.tops[m.index()])? {
                    return Err(format!("top condition fails at {n}"));
                }
            }
            for (i, j) in edge_pairs(&t.graph) {
                let (mi, mj) = (map[&NodeId(i as u32)], map[&NodeId(j as u32)]);
                if !s.path(mi.index(), mj.index()) {
                    return Err(format!("path condition fails on edge {i}->{j}"));
                }
            }
            Ok(())
        }
        Variant::Attempt2 | Variant::Final => {
            let mut covered = vec![false; t.graph.node_count()];
            for (src, img) in map {
                if !s.graph.contains(*src) || !t.graph.contains(*img) {
                    return Err(format!("pair {src}->{img} out of range"));
                }
                covered[img.index()] = true;
                if !leq(&t.tops[img.index()], &s.tops[src.index()])? {
                    return Err(format!("top condition fails at {src}"));
                }
            }
            if covered.iter().any(|c| !c) {
                return Err("map is not surjective onto the smaller graph".into());
            }
            let dom: Vec<NodeId> = map.keys().copied().collect();
            for &a in &dom {
                for &b in &dom {
                    let (ma, mb) = (map[&a], map[&b]);
                    if t.graph.succ(ma).contains(&mb) {
                        let ok = dom
                            .iter()
                            .filter(|n| map[*n] == mb)
                            .any(|n| s.path(a.index(), n.index()));
                        if !ok {
                            return Err(format!(
                                "path condition fails for {a}->{b} over edge {ma}->{mb}"
                            ));
                        }
                    }
                }
            }
            if variant == Variant::Final {
                for u in t.graph.nodes() {
                    for v in t.graph.nodes() {
                        if !t.left[u.index()][v.index()] {
                            continue;
                        }
                        let pre_u: Vec<NodeId> =
                            dom.iter().filter(|n| map[*n] == u).copied().collect();
                        let pre_v: Vec<NodeId> =
                            dom.iter().filter(|n| map[*n] == v).copied().collect();
                        let none_parallel = pre_u.iter().all(|a| {
                            pre_v.iter().all(|b| !s.parallel[a.index()][b.index()])
                        });
                        let some_left = pre_u
                            .iter()
                            .any(|a| pre_v.iter().any(|b| s.left[a.index()][b.index()]));
                        if !(none_parallel || some_left) {
                            return Err(format!(
                                "order condition fails for image pair {u} left-of {v}"
                            ));
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

/// Exhaustive oracle: enumerate all candidate maps (total maps for the first
/// variant, partial maps for the others) and check the conditions literally.
pub fn brute_force_embeds(
    larger: &TermGraph,
    smaller: &TermGraph,
    prec: &Precedence,
    variant: Variant,
) -> Result<bool, EmbedError> {
    let s = AnalyzedGraph::new(larger)?;
    let t = AnalyzedGraph::new(smaller)?;
    brute_force_analyzed(&s, &t, prec, variant)
}

/// As [`brute_force_embeds`], over pre-analyzed graphs.
pub fn brute_force_analyzed(
    s: &AnalyzedGraph,
    t: &AnalyzedGraph,
    prec: &Precedence,
    variant: Variant,
) -> Result<bool, EmbedError> {
    let s_tid = top_ids(s, prec)?;
    let t_tid = top_ids(t, prec)?;
    brute_force_ids(s, &s_tid, t, &t_tid, prec, variant)
}

/// As [`brute_force_embeds`], with the tops already resolved to universe
/// indices.
pub fn brute_force_ids(
    s: &AnalyzedGraph,
    s_tid: &[usize],
    t: &AnalyzedGraph,
    t_tid: &[usize],
    prec: &Precedence,
    variant: Variant,
) -> Result<bool, EmbedError> {
    let sn = s.graph.node_count();
    let tn = t.graph.node_count();
    if sn > 8 {
        return Err(EmbedError::TooLarge(sn));
    }
    if tn > 8 {
        return Err(EmbedError::TooLarge(tn));
    }
    match variant {
        Variant::Attempt1 => {
            // All assignments of an s-node to every t-node, filtered per
            // node by the top condition.
            let allowed: Vec<Vec<usize>> = (0..tn)
                .map(|ti| {
                    (0..sn).filter(|si| prec.leq_ids(t_tid[ti], s_tid[*si])).collect()
                })
                .collect();
            if allowed.iter().any(|a| a.is_empty()) {
                return Ok(false);
            }
            let edges = edge_pairs(&t.graph);
            let mut idx = vec![0usize; tn];
            loop {
                let ok = edges.iter().all(|&(i, j)| {
                    s.path(allowed[i][idx[i]], allowed[j][idx[j]])
                });
                if ok {
                    return Ok(true);
                }
                let mut k = 0;
                loop {
                    if k == tn {
                        return Ok(false);
                    }
                    idx[k] += 1;
                    if idx[k] < allowed[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
        Variant::Attempt2 | Variant::Final => {
            if sn < tn {
                return Ok(false);
            }
            // Every s-node maps to one of: undefined, or a t-node passing
            // the top condition.
            let allowed: Vec<Vec<Option<usize>>> = (0..sn)
                .map(|si| {
                    let mut opts: Vec<Option<usize>> = vec![None];
                    opts.extend(
                        (0..tn)
                            .filter(|ti| prec.leq_ids(t_tid[*ti], s_tid[si]))
                            .map(Some),
                    );
                    opts
                })
                .collect();
            let mut idx = vec![0usize; sn];
            loop {
                if check_partial_map(s, t, &allowed, &idx, variant) {
                    return Ok(true);
                }
                let mut k = 0;
                loop {
                    if k == sn {
                        return Ok(false);
                    }
                    idx[k] += 1;
                    if idx[k] < allowed[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
    }
}

fn check_partial_map(
    s: &AnalyzedGraph,
    t: &AnalyzedGraph,
    allowed: &[Vec<Option<usize>>],
    idx: &[usize],
    variant: Variant,
) -> bool {
    let sn = allowed.len();
    let tn = t.graph.node_count();
    let image = |si: usize| allowed[si][idx[si]];
    let mut covered = vec![false; tn];
    for si in 0..sn {
        if let Some(ti) = image(si) {
            covered[ti] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return false;
    }
    for a in 0..sn {
        let Some(ma) = image(a) else { continue };
        for b in 0..sn {
            let Some(mb) = image(b) else { continue };
            if t.direct[ma][mb] {
                let ok = (0..sn).any(|n| image(n) == Some(mb) && s.path(a, n));
                if !ok {
                    return false;
                }
            }
        }
    }
    if variant == Variant::Final {
        for u in 0..tn {
            for v in 0..tn {
                if !t.left[u][v] {
                    continue;
                }
                let none_parallel = (0..sn).all(|a| {
                    image(a) != Some(u)
                        || (0..sn).all(|b| image(b) != Some(v) || !s.parallel[a][b])
                });
                let some_left = (0..sn).any(|a| {
                    image(a) == Some(u)
                        && (0..sn).any(|b| image(b) == Some(v) && s.left[a][b])
                });
                if !(none_parallel || some_left) {
                    return false;
                }
            }
        }
    }
    true
}

/// `S ⊐ T`: the strict part of the final embedding, read as non-mutual.
pub fn strict_embeds(
    larger: &TermGraph,
    smaller: &TermGraph,
    prec: &Precedence,
) -> Result<bool, EmbedError> {
    Ok(embeds(larger, smaller, prec, Variant::Final)?.is_some()
        && embeds(smaller, larger, prec, Variant::Final)?.is_none())
}

/// Compose two final-variant witnesses `S → T` and `T → U` into a candidate
/// witness `S → U` (defined where the composition is).
pub fn compose_witnesses(st: &EmbeddingWitness, tu: &EmbeddingWitness) -> Morphism {
    crate::morphism::compose(&st.morphism, &tu.morphism, MorphismKind::EmbeddingWitness)
}
