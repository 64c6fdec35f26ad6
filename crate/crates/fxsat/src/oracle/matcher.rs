//! Brute-force BGP evaluation over materialized quads.
//!
//! This is the ground-truth oracle the analyzer is validated against, so it
//! stays a plain backtracking join: bind variables one triple at a time,
//! most constrained triple first, against an indexed view of the graph.
//! Blank nodes in the pattern bind like variables.

use super::materialize::{FxQuad, Term};
use crate::term::{Bgp, NodeKind, PatternNode};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// One solution: bindings for every variable and blank node of the pattern.
pub type Binding = BTreeMap<PatternNode, Term>;

struct GraphView {
    triples: Vec<(Term, Term, Term)>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl GraphView {
    /// Default-graph view: the union of all named graphs, deduplicated.
    fn new(quads: &[FxQuad]) -> Self {
        let set: BTreeSet<(Term, Term, Term)> = quads
            .iter()
            .map(|q| (q.subject.clone(), Term::Iri(q.predicate.clone()), q.object.clone()))
            .collect();
        let triples: Vec<(Term, Term, Term)> = set.into_iter().collect();
        let mut by_subject: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut by_predicate: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut by_object: HashMap<Term, Vec<usize>> = HashMap::new();
        for (i, (s, p, o)) in triples.iter().enumerate() {
            by_subject.entry(s.clone()).or_default().push(i);
            by_predicate.entry(p.clone()).or_default().push(i);
            by_object.entry(o.clone()).or_default().push(i);
        }
        GraphView { triples, by_subject, by_predicate, by_object }
    }

    /// Candidate triple ids for a pattern under the current binding, using
    /// the most selective available index.
    fn candidates(&self, pattern: [&PatternTerm; 3]) -> Vec<usize> {
        let mut best: Option<&Vec<usize>> = None;
        for (position, term) in pattern.iter().enumerate() {
            if let PatternTerm::Bound(t) = term {
                let index = match position {
                    0 => self.by_subject.get(t),
                    1 => self.by_predicate.get(t),
                    _ => self.by_object.get(t),
                };
                match index {
                    None => return Vec::new(),
                    Some(ids) => {
                        if best.is_none_or(|b| ids.len() < b.len()) {
                            best = Some(ids);
                        }
                    }
                }
            }
        }
        match best {
            Some(ids) => ids.clone(),
            None => (0..self.triples.len()).collect(),
        }
    }
}

enum PatternTerm {
    Bound(Term),
    Free(PatternNode),
}

fn resolve(node: &PatternNode, binding: &Binding) -> PatternTerm {
    match node.kind {
        NodeKind::Iri => PatternTerm::Bound(Term::Iri(node.label.clone())),
        NodeKind::Literal => PatternTerm::Bound(Term::Literal {
            lexical: node.label.clone(),
            datatype: node.datatype.clone(),
        }),
        NodeKind::Variable | NodeKind::BlankNode => match binding.get(node) {
            Some(term) => PatternTerm::Bound(term.clone()),
            None => PatternTerm::Free(node.clone()),
        },
    }
}

fn bound_positions(bgp: &Bgp, triple: usize, binding: &Binding) -> usize {
    let t = &bgp.triples[triple];
    [&t.subject, &t.predicate, &t.object]
        .iter()
        .filter(|n| matches!(resolve(n, binding), PatternTerm::Bound(_)))
        .count()
}

fn search(
    bgp: &Bgp,
    view: &GraphView,
    remaining: &mut Vec<usize>,
    binding: &mut Binding,
    out: &mut BTreeSet<Binding>,
    stop_at_first: bool,
) -> bool {
    let Some(pick) = remaining
        .iter()
        .enumerate()
        .max_by_key(|(_, &t)| bound_positions(bgp, t, binding))
        .map(|(i, _)| i)
    else {
        out.insert(binding.clone());
        return stop_at_first;
    };
    let triple = remaining.swap_remove(pick);
    let t = &bgp.triples[triple];
    let pattern = [
        resolve(&t.subject, binding),
        resolve(&t.predicate, binding),
        resolve(&t.object, binding),
    ];
    let candidates = view.candidates([&pattern[0], &pattern[1], &pattern[2]]);

    'next: for id in candidates {
        let data = &view.triples[id];
        let data_terms = [&data.0, &data.1, &data.2];
        let mut added: Vec<PatternNode> = Vec::new();
        for (i, part) in pattern.iter().enumerate() {
            match part {
                PatternTerm::Bound(term) => {
                    if term != data_terms[i] {
                        for a in added.drain(..) {
                            binding.remove(&a);
                        }
                        continue 'next;
                    }
                }
                PatternTerm::Free(node) => match binding.get(node) {
                    Some(existing) if existing != data_terms[i] => {
                        for a in added.drain(..) {
                            binding.remove(&a);
                        }
                        continue 'next;
                    }
                    Some(_) => {}
                    None => {
                        binding.insert(node.clone(), data_terms[i].clone());
                        added.push(node.clone());
                    }
                },
            }
        }
        let done = search(bgp, view, remaining, binding, out, stop_at_first);
        for a in added {
            binding.remove(&a);
        }
        if done {
            remaining.push(triple);
            return true;
        }
    }
    remaining.push(triple);
    false
}

/// Every assignment of variables and blank nodes to terms under which all
/// triples of the pattern are present in the default-graph view of `quads`.
pub fn bgp_match(bgp: &Bgp, quads: &[FxQuad]) -> Vec<Binding> {
    let view = GraphView::new(quads);
    let mut remaining: Vec<usize> = (0..bgp.triples.len()).collect();
    let mut out = BTreeSet::new();
    search(bgp, &view, &mut remaining, &mut Binding::new(), &mut out, false);
    out.into_iter().collect()
}

/// Existence check with early exit; equivalent to `!bgp_match(..).is_empty()`.
pub fn bgp_match_exists(bgp: &Bgp, quads: &[FxQuad]) -> bool {
    let view = GraphView::new(quads);
    let mut remaining: Vec<usize> = (0..bgp.triples.len()).collect();
    let mut out = BTreeSet::new();
    search(bgp, &view, &mut remaining, &mut Binding::new(), &mut out, true)
        || !out.is_empty()
}
