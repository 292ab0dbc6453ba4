//! Worked example graphs, rules, and precedences used across the test
//! suite, as ready-made values.
//!
//! `g1`/`g2`/`g3` are the
//! embedding chain, `fga`/`fga_shared` the tree and shared
//! representations of f(g(a),a), `va_*`/`vc_*`/`vd_*` the embedding-variant
//! demonstrations, and `fab`/`fba` the argument-order pair. `r_share` is the
//! sharing rule whose orientation does not imply termination.

use crate::graph::{build, FunSymbol, Label, NodeId, TermDag, TermGraph};
use crate::rewriting::{validate_rule, Grs, Rule};
use crate::tops::{build_precedence, CanonicalTop, Precedence, Signature};

fn f() -> Label {
    Label::fun("f", 2)
}

fn g() -> Label {
    Label::fun("g", 1)
}

fn a() -> Label {
    Label::fun("a", 0)
}

fn b() -> Label {
    Label::fun("b", 0)
}

/// f, g, a, b with arities 2, 1, 0, 0.
pub fn signature() -> Signature {
    Signature::from_symbols(&[
        FunSymbol::new("f", 2),
        FunSymbol::new("g", 1),
        FunSymbol::new("a", 0),
        FunSymbol::new("b", 0),
    ])
}

/// Tree representation of f(a,a): two distinct a-nodes.
pub fn g1() -> TermGraph {
    build::graph(&[(1, f(), vec![2, 3]), (2, a(), vec![]), (3, a(), vec![])], 1)
}

/// g(a).
pub fn g2() -> TermGraph {
    build::graph(&[(1, g(), vec![2]), (2, a(), vec![])], 1)
}

/// f(a,a) with the a shared.
pub fn g3() -> TermGraph {
    build::graph(&[(1, f(), vec![2, 2]), (2, a(), vec![])], 1)
}

/// Tree of f(g(a), a): four nodes.
pub fn fga() -> TermGraph {
    build::graph(
        &[(1, f(), vec![2, 4]), (2, g(), vec![3]), (3, a(), vec![]), (4, a(), vec![])],
        1,
    )
}

/// f(g(a), a) with the a shared between g and the root: three nodes.
pub fn fga_shared() -> TermGraph {
    build::graph(&[(1, f(), vec![2, 3]), (2, g(), vec![3]), (3, a(), vec![])], 1)
}

/// The shared f(g(a), a); the smaller side of the variant-(a) pair.
pub fn va_l() -> TermGraph {
    fga_shared()
}

/// Tree of f(g(a), g(a)): five nodes.
pub fn va_r() -> TermGraph {
    build::graph(
        &[
            (1, f(), vec![2, 4]),
            (2, g(), vec![3]),
            (3, a(), vec![]),
            (4, g(), vec![5]),
            (5, a(), vec![]),
        ],
        1,
    )
}

/// Tree of f(a,b).
pub fn fab() -> TermGraph {
    build::graph(&[(1, f(), vec![2, 3]), (2, a(), vec![]), (3, b(), vec![])], 1)
}

/// Tree of f(b,a).
pub fn fba() -> TermGraph {
    build::graph(&[(1, f(), vec![2, 3]), (2, b(), vec![]), (3, a(), vec![])], 1)
}

/// f(g(x), x) with x = g(a): node 3 is both the root's second argument and
/// the first argument's child.
pub fn vc_l() -> TermGraph {
    build::graph(
        &[(1, f(), vec![2, 3]), (2, g(), vec![3]), (3, g(), vec![4]), (4, a(), vec![])],
        1,
    )
}

/// f(g(y), g(y)) with y = a shared below both g-nodes.
pub fn vc_r() -> TermGraph {
    build::graph(
        &[(1, f(), vec![2, 3]), (2, g(), vec![4]), (3, g(), vec![4]), (4, a(), vec![])],
        1,
    )
}

/// f(x, g(x)) with x = a.
pub fn vd_l() -> TermGraph {
    build::graph(&[(1, f(), vec![3, 2]), (2, g(), vec![3]), (3, a(), vec![])], 1)
}

/// f(g(y), y) with y = a.
pub fn vd_r() -> TermGraph {
    build::graph(&[(1, f(), vec![2, 3]), (2, g(), vec![3]), (3, a(), vec![])], 1)
}

fn top(name: &str, arity: usize, pattern: &[u32]) -> CanonicalTop {
    CanonicalTop::new(FunSymbol::new(name, arity), pattern.to_vec()).unwrap()
}

/// The precedence that orders the embedding chain:
/// f{1,1} ⊏ g{1} ⊏ f{1,2}.
pub fn chain_precedence() -> Precedence {
    build_precedence(
        &[
            (top("f", 2, &[1, 1]), top("g", 1, &[1])),
            (top("g", 1, &[1]), top("f", 2, &[1, 2])),
        ],
        false,
        &signature(),
    )
    .expect("chain precedence is valid")
}

/// a ⊏ b, nothing else beyond reflexivity.
pub fn ab_precedence() -> Precedence {
    build_precedence(&[(top("a", 0, &[]), top("b", 0, &[]))], false, &signature())
        .expect("a<b precedence is valid")
}

/// No declared pairs, no sharing generator: reflexivity only.
pub fn minimal_precedence() -> Precedence {
    build_precedence(&[], false, &signature()).expect("minimal precedence is valid")
}

/// The sharing generator over the fixture signature: more shared ⊑ less
/// shared per symbol.
pub fn sharing_precedence() -> Precedence {
    build_precedence(&[], true, &signature()).expect("sharing precedence is valid")
}

/// The rule tree-f(a,a) → shared-f(a,a) on one carrier.
pub fn r_share() -> Rule {
    let carrier = TermDag::build(
        &[
            (1, f(), vec![2, 3]),
            (2, a(), vec![]),
            (3, a(), vec![]),
            (4, f(), vec![5, 5]),
            (5, a(), vec![]),
        ],
        &[1, 4],
    )
    .expect("share carrier is valid");
    validate_rule("share", carrier, NodeId(0), NodeId(3)).expect("share rule is valid")
}

/// The system consisting of just the sharing rule.
pub fn share_grs() -> Grs {
    Grs::new(vec![r_share()])
}

/// f(b,a) → f(a,b), oriented from right to left under a ⊏ b.
pub fn r_swap() -> Rule {
    let carrier = TermDag::build(
        &[
            (1, f(), vec![2, 3]),
            (2, b(), vec![]),
            (3, a(), vec![]),
            (4, f(), vec![5, 6]),
            (5, a(), vec![]),
            (6, b(), vec![]),
        ],
        &[1, 4],
    )
    .expect("swap carrier is valid");
    validate_rule("swap", carrier, NodeId(0), NodeId(3)).expect("swap rule is valid")
}

/// The three-graph prefix of the infinite sharing derivation:
/// tree f(a,a), then two isomorphic shared copies.
pub fn share_sequence() -> Vec<TermGraph> {
    let shared2 = build::graph(&[(7, f(), vec![9, 9]), (9, a(), vec![])], 7);
    vec![g1(), g3(), shared2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Validation;
    use crate::morphism::isomorphic;

    #[test]
    fn all_fixture_graphs_validate() {
        for g in [
            g1(),
            g2(),
            g3(),
            fga(),
            fga_shared(),
            va_l(),
            va_r(),
            fab(),
            fba(),
            vc_l(),
            vc_r(),
            vd_l(),
            vd_r(),
        ] {
            assert!(g.validate(Validation::Strict).is_ok());
            assert!(g.is_ground());
        }
    }

    #[test]
    fn fixture_shapes() {
        assert_eq!(g1().node_count(), 3);
        assert_eq!(g2().node_count(), 2);
        assert_eq!(g3().node_count(), 2);
        assert_eq!(fga().node_count(), 4);
        assert_eq!(fga_shared().node_count(), 3);
        assert_eq!(va_r().node_count(), 5);
        assert!(!isomorphic(&g1(), &g3()));
        assert!(!isomorphic(&vc_l(), &vc_r()));
        // Argument order distinguishes the variant-(d) pair.
        assert!(!isomorphic(&vd_l(), &vd_r()));
    }

    #[test]
    fn share_sequence_tail_isomorphic() {
        let seq = share_sequence();
        assert!(!isomorphic(&seq[0], &seq[1]));
        assert!(isomorphic(&seq[1], &seq[2]));
    }
}
