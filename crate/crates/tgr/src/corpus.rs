//! Exhaustive enumeration of small ground term graphs over a signature.
//!
//! Graphs are generated directly in canonical form: nodes are created at
//! their first visit of a depth-first traversal, and cross edges may only
//! target nodes whose subgraph is already complete (anything else would be a
//! cycle, since the in-progress nodes are exactly the ancestors). Every
//! isomorphism class with at most the requested number of nodes appears
//! exactly once.

use crate::graph::{Label, NodeId, TermDag, TermGraph, Validation};
use crate::tops::Signature;

/// All term graphs with `1..=max_nodes` nodes over the signature, each
/// isomorphism class exactly once, in a deterministic order.
pub fn enumerate_term_graphs(signature: &Signature, max_nodes: usize) -> Vec<TermGraph> {
    let labels: Vec<Label> =
        signature.symbols().map(Label::Fun).collect();
    let mut gen = Generator {
        sig: labels,
        labels: Vec::new(),
        succs: Vec::new(),
        completed: Vec::new(),
        stack: Vec::new(),
        max: max_nodes,
        out: Vec::new(),
    };
    for i in 0..gen.sig.len() {
        let lab = gen.sig[i].clone();
        gen.labels.push(lab);
        gen.succs.push(Vec::new());
        gen.completed.push(false);
        gen.stack.push(0);
        gen.recurse();
        gen.stack.pop();
        gen.labels.pop();
        gen.succs.pop();
        gen.completed.pop();
    }
    gen.out
}

struct Generator {
    sig: Vec<Label>,
    labels: Vec<Label>,
    succs: Vec<Vec<NodeId>>,
    completed: Vec<bool>,
    stack: Vec<u32>,
    max: usize,
    out: Vec<TermGraph>,
}

impl Generator {
    fn recurse(&mut self) {
        let Some(&top) = self.stack.last() else {
            self.emit();
            return;
        };
        let n = top as usize;
        if self.succs[n].len() == self.labels[n].arity() {
            self.stack.pop();
            self.completed[n] = true;
            self.recurse();
            self.completed[n] = false;
            self.stack.push(top);
            return;
        }
        // Fresh node for the next slot.
        if self.labels.len() < self.max {
            for i in 0..self.sig.len() {
                let lab = self.sig[i].clone();
                let id = self.labels.len() as u32;
                self.labels.push(lab);
                self.succs.push(Vec::new());
                self.completed.push(false);
                self.succs[n].push(NodeId(id));
                self.stack.push(id);
                self.recurse();
                self.stack.pop();
                self.succs[n].pop();
                self.labels.pop();
                self.succs.pop();
                self.completed.pop();
            }
        }
        // Cross edge to a completed node.
        for c in 0..self.labels.len() {
            if self.completed[c] {
                self.succs[n].push(NodeId(c as u32));
                self.recurse();
                self.succs[n].pop();
            }
        }
    }

    fn emit(&mut self) {
        let names = (0..self.labels.len()).map(|i| i.to_string()).collect();
        let dag = TermDag::from_tables(
            self.labels.clone(),
            self.succs.clone(),
            vec![NodeId(0)],
            names,
            Validation::Strict,
        )
        .expect("generated graphs are valid");
        self.out.push(TermGraph::new(dag).expect("generated graphs are rooted"));
    }
}
