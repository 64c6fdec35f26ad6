//! Structural gates evaluated before and during annotation: unsupported
//! join detection, cycle detection, and the unique-path-to-root condition.

use crate::annotation::Annotation;
use crate::predicate::FxPredicate;
use crate::term::{match_nodes, Bgp, PatternNode, TriplePattern};
use std::collections::HashSet;

/// True when any node occurs both in a predicate position and in a subject
/// or object position, within or across triples. Such a join can never have
/// a solution because properties never occur as subjects or objects in a
/// Façade-X graph. Constants and variables are both checked by node identity.
pub fn has_unsupported_join(bgp: &Bgp) -> bool {
    let mut subjects_objects: HashSet<&PatternNode> = HashSet::new();
    let mut properties: HashSet<&PatternNode> = HashSet::new();
    for t in &bgp.triples {
        subjects_objects.insert(&t.subject);
        subjects_objects.insert(&t.object);
        properties.insert(&t.predicate);
    }
    subjects_objects.intersection(&properties).next().is_some()
}

/// True when the directed graph with one subject-to-object edge per triple
/// contains a directed cycle. Self-loops count as cycles.
pub fn has_cycle(bgp: &Bgp) -> bool {
    // Path-marking depth-first search from every subject.
    fn walk<'a>(
        bgp: &'a Bgp,
        node: &'a PatternNode,
        on_path: &mut Vec<&'a PatternNode>,
        done: &mut HashSet<&'a PatternNode>,
    ) -> bool {
        if done.contains(node) {
            return false;
        }
        if on_path.contains(&node) {
            return true;
        }
        on_path.push(node);
        for t in &bgp.triples {
            if &t.subject == node && walk(bgp, &t.object, on_path, done) {
                return true;
            }
        }
        on_path.pop();
        done.insert(node);
        false
    }

    let mut done = HashSet::new();
    for t in &bgp.triples {
        let mut on_path = Vec::new();
        if walk(bgp, &t.subject, &mut on_path, &mut done) {
            return true;
        }
    }
    false
}

/// A backward chain of triples: each appended triple's object equals the
/// previous triple's subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePath {
    pub triples: Vec<TriplePattern>,
}

impl TriplePath {
    pub fn seed(triple: TriplePattern) -> Self {
        TriplePath { triples: vec![triple] }
    }

    pub fn last(&self) -> &TriplePattern {
        self.triples.last().expect("triple path is never empty")
    }
}

/// Extends `seed` backwards: repeatedly appends a triple whose object equals
/// the subject of the last-appended triple, until no predecessor exists.
/// When several predecessors exist the one earliest in BGP order is taken.
/// Terminates on any acyclic BGP.
pub fn walk_backwards(seed: TriplePath, bgp: &Bgp) -> TriplePath {
    let mut path = seed;
    loop {
        let subject = path.last().subject.clone();
        let pred = bgp.triples.iter().find(|t| t.object == subject);
        match pred {
            Some(t) => path.triples.push(t.clone()),
            None => return path,
        }
    }
}

/// Flattens a triple path into the alternating node sequence used for
/// positional matching: the object of the first triple, then the predicate
/// and subject of each triple in turn.
///
/// Panics on an empty path.
pub fn nodes_path(path: &TriplePath) -> Vec<PatternNode> {
    assert!(!path.triples.is_empty(), "nodes_path requires a non-empty path");
    let mut out = vec![path.triples[0].object.clone()];
    for t in &path.triples {
        out.push(t.predicate.clone());
        out.push(t.subject.clone());
    }
    out
}

/// All maximal backward node paths from `seed`, enumerating every
/// predecessor choice. `walk_backwards` follows a single deterministic
/// chain; the unique-path check compares all of them so that its verdict
/// does not depend on triple order.
fn all_backward_node_paths(seed: &TriplePattern, bgp: &Bgp) -> Vec<Vec<PatternNode>> {
    fn extend(
        bgp: &Bgp,
        chain: &mut Vec<TriplePattern>,
        out: &mut Vec<Vec<PatternNode>>,
    ) {
        let subject = chain.last().unwrap().subject.clone();
        let preds: Vec<&TriplePattern> =
            bgp.triples.iter().filter(|t| t.object == subject).collect();
        if preds.is_empty() {
            let path = TriplePath { triples: chain.clone() };
            out.push(nodes_path(&path));
            return;
        }
        for p in preds {
            if out.len() >= 4096 {
                return;
            }
            chain.push((*p).clone());
            extend(bgp, chain, out);
            chain.pop();
        }
    }

    let mut out = Vec::new();
    let mut chain = vec![seed.clone()];
    extend(bgp, &mut chain, &mut out);
    out
}

/// Annotation-independent part of the unique-path analysis for one node.
///
/// `mismatch` is set when some pair of backward paths disagrees on a common
/// prefix position; `shorter_ends` collects, for every unequal-length pair,
/// the terminal node of the shorter path (which must then not be typed as
/// the root for the check to succeed).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct PathAnalysis {
    pub mismatch: bool,
    pub shorter_ends: Vec<PatternNode>,
    /// Node pairs aligned at the same backward-path position; in any graph
    /// matching the pattern they co-bind.
    pub prefix_pairs: Vec<(PatternNode, PatternNode)>,
}

pub(crate) fn analyze_paths_to(bgp: &Bgp, node: &PatternNode) -> PathAnalysis {
    let mut analysis = PathAnalysis::default();
    let incoming: Vec<&TriplePattern> =
        bgp.triples.iter().filter(|t| &t.object == node).collect();
    for (i, left) in incoming.iter().enumerate() {
        for right in &incoming[i + 1..] {
            if left == right {
                continue;
            }
            let left_paths = all_backward_node_paths(left, bgp);
            let right_paths = all_backward_node_paths(right, bgp);
            for lp in &left_paths {
                for rp in &right_paths {
                    let common = lp.len().min(rp.len());
                    for k in 0..common {
                        if !match_nodes(&lp[k], &rp[k]) {
                            analysis.mismatch = true;
                        }
                        let pair = (lp[k].clone(), rp[k].clone());
                        if pair.0 != pair.1 && !analysis.prefix_pairs.contains(&pair) {
                            analysis.prefix_pairs.push(pair);
                        }
                    }
                    if lp.len() != rp.len() {
                        let end = if lp.len() < rp.len() {
                            lp.last().unwrap()
                        } else {
                            rp.last().unwrap()
                        };
                        if !analysis.shorter_ends.contains(end) {
                            analysis.shorter_ends.push(end.clone());
                        }
                    }
                }
            }
        }
    }
    analysis
}

/// Checks that a node annotated Container or FXRoot is not required to sit
/// at the end of two incompatible backward paths.
///
/// For every pair of distinct triples with `node` as object, each pair of
/// backward node paths must agree positionally under [`match_nodes`] over
/// their common prefix. When lengths differ, the shorter path's terminal
/// node must additionally not be the subject of a triple whose object is
/// annotated FXRoot: a root container cannot have an ancestor.
pub fn satisfies_unique_path_to_root(
    bgp: &Bgp,
    annotation: &Annotation,
    node: &PatternNode,
) -> bool {
    let analysis = analyze_paths_to(bgp, node);
    if analysis.mismatch {
        return false;
    }
    for end in &analysis.shorter_ends {
        let typed_root = bgp
            .triples
            .iter()
            .any(|t| &t.subject == end && annotation.get(&t.object) == Some(FxPredicate::FxRoot));
        if typed_root {
            return false;
        }
    }
    true
}
