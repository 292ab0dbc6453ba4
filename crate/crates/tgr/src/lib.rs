//! Acyclic term-graph rewriting with sharing-aware termination orders.
//!
//! Term graphs are rooted, acyclic graphs whose nodes are labelled with
//! function symbols (with ordered successor lists) or variables. Sharing a
//! subgraph between several parents is what distinguishes them from trees,
//! and the analyses in this crate are built around that distinction:
//!
//! * [`graph`] — term dags, term graphs, positions, parallelism, and the
//!   low-level surgeries (restrict, union, redirect).
//! * [`morphism`] — structure-preserving node maps: collapse, isomorphism,
//!   and rule matching.
//! * [`tops`] — one-level sharing patterns of a node and precedences over
//!   them.
//! * [`embedding`] — the homeomorphic embedding on term graphs, in three
//!   variants, plus a brute-force oracle.
//! * [`rewriting`] — graph rewrite rules, rewrite steps, and bounded
//!   derivations with isomorphism-based cycle detection.
//! * [`orders`] — the term-graph lexicographic path order, rule orientation,
//!   derivation certification, and good-pair search on finite sequences.
//! * [`parse`] — the text format for graphs, rules, precedences, and
//!   sequences used by the `tgr` command-line tool.

pub mod corpus;
pub mod embedding;
pub mod fixtures;
pub mod graph;
pub mod morphism;
pub mod orders;
pub mod parse;
pub mod rewriting;
pub mod tops;

pub use embedding::{brute_force_embeds, embeds, strict_embeds, EmbeddingWitness, Variant};
pub use graph::{lex_less, Label, NodeId, Position, TermDag, TermGraph};
pub use morphism::{collapses, find_rooted_morphism, isomorphic, match_rule_at, Morphism};
pub use orders::{
    certify_derivation, good_pair, lpo_compare, lpo_less, orient_grs, LpoOutcome, OrderKind,
};
pub use parse::{parse_workspace, print_workspace, Workspace};
pub use rewriting::{apply_match, derive, step, validate_rule, Derivation, Grs, Rule, Strategy};
pub use tops::{build_precedence, top_of, tops_of_symbol, CanonicalTop, Precedence, Signature};
