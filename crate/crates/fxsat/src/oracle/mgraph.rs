//! Graph-theoretic checks on materialized quad sets, independent of the
//! model validator: connectedness, acyclicity, single root, unique
//! root-to-container paths, per-quad shape constraints, and blank-node
//! isomorphism for golden comparisons.

use super::materialize::{FxQuad, Term};
use crate::term::{classify_iri, WellKnown, FX_ROOT, RDF_TYPE, XYZ_NS};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

fn nodes(quads: &[FxQuad]) -> BTreeSet<&Term> {
    let mut nodes = BTreeSet::new();
    for q in quads {
        nodes.insert(&q.subject);
        nodes.insert(&q.object);
    }
    nodes
}

/// Treating edges as undirected, every node reaches every other node.
pub fn is_connected(quads: &[FxQuad]) -> bool {
    let all = nodes(quads);
    let Some(start) = all.iter().next() else { return true };
    let mut adjacency: HashMap<&Term, Vec<&Term>> = HashMap::new();
    for q in quads {
        adjacency.entry(&q.subject).or_default().push(&q.object);
        adjacency.entry(&q.object).or_default().push(&q.subject);
    }
    let mut seen: HashSet<&Term> = HashSet::new();
    let mut queue = vec![*start];
    while let Some(node) = queue.pop() {
        if seen.insert(node) {
            if let Some(next) = adjacency.get(node) {
                queue.extend(next.iter().copied());
            }
        }
    }
    seen.len() == all.len()
}

/// No directed cycle over subject-to-object edges.
pub fn is_acyclic(quads: &[FxQuad]) -> bool {
    let mut edges: HashMap<&Term, Vec<&Term>> = HashMap::new();
    for q in quads {
        edges.entry(&q.subject).or_default().push(&q.object);
    }
    fn visit<'a>(
        node: &'a Term,
        edges: &HashMap<&'a Term, Vec<&'a Term>>,
        on_path: &mut Vec<&'a Term>,
        done: &mut HashSet<&'a Term>,
    ) -> bool {
        if done.contains(node) {
            return true;
        }
        if on_path.contains(&node) {
            return false;
        }
        on_path.push(node);
        if let Some(next) = edges.get(node) {
            for n in next {
                if !visit(n, edges, on_path, done) {
                    return false;
                }
            }
        }
        on_path.pop();
        done.insert(node);
        true
    }
    let mut done = HashSet::new();
    for node in edges.keys() {
        let mut on_path = Vec::new();
        if !visit(node, &edges, &mut on_path, &mut done) {
            return false;
        }
    }
    true
}

fn root_nodes(quads: &[FxQuad]) -> BTreeSet<&Term> {
    quads
        .iter()
        .filter(|q| q.predicate == RDF_TYPE && q.object == Term::Iri(FX_ROOT.to_string()))
        .map(|q| &q.subject)
        .collect()
}

/// Exactly one node is typed as the root.
pub fn has_single_root(quads: &[FxQuad]) -> bool {
    quads.is_empty() || root_nodes(quads).len() == 1
}

/// Every subject node is reached from the root by exactly one directed path
/// (counting parallel edges as distinct paths). Assumes acyclicity.
pub fn has_unique_root_paths(quads: &[FxQuad]) -> bool {
    if quads.is_empty() {
        return true;
    }
    let roots = root_nodes(quads);
    if roots.len() != 1 {
        return false;
    }
    let root = *roots.iter().next().unwrap();

    // Count paths with memoization over the DAG, multiplicity included.
    let mut incoming: HashMap<&Term, Vec<&Term>> = HashMap::new();
    for q in quads {
        incoming.entry(&q.object).or_default().push(&q.subject);
    }
    fn count<'a>(
        node: &'a Term,
        root: &'a Term,
        incoming: &HashMap<&'a Term, Vec<&'a Term>>,
        memo: &mut HashMap<&'a Term, u64>,
    ) -> u64 {
        if node == root {
            return 1;
        }
        if let Some(&c) = memo.get(node) {
            return c;
        }
        let total = incoming
            .get(node)
            .map(|parents| {
                parents
                    .iter()
                    .map(|p| count(p, root, incoming, memo))
                    .sum()
            })
            .unwrap_or(0);
        memo.insert(node, total.min(1_000_000));
        total
    }

    let subjects: BTreeSet<&Term> = quads.iter().map(|q| &q.subject).collect();
    let mut memo = HashMap::new();
    subjects
        .iter()
        .all(|s| count(s, root, &incoming, &mut memo) == 1)
}

/// Per-quad shape constraints every materialized graph satisfies:
/// recognised predicates only, literal objects only under slots, rdf:type
/// objects only the root marker or a type IRI, and every subject a container
/// (the root or something held by a slot edge).
pub fn quad_shape_violations(quads: &[FxQuad]) -> Vec<String> {
    let mut violations = Vec::new();
    let roots = root_nodes(quads);
    let slot_objects: HashSet<&Term> = quads
        .iter()
        .filter(|q| is_slot_predicate(&q.predicate) && !q.object.is_literal())
        .map(|q| &q.object)
        .collect();

    for q in quads {
        let slot = is_slot_predicate(&q.predicate);
        if !slot && q.predicate != RDF_TYPE {
            violations.push(format!("unrecognised predicate <{}>", q.predicate));
            continue;
        }
        if q.object.is_literal() && !slot {
            violations.push(format!("literal object under non-slot <{}>", q.predicate));
        }
        if q.predicate == RDF_TYPE {
            match &q.object {
                Term::Iri(_) => {}
                other => violations.push(format!("rdf:type object {other} is not an IRI")),
            }
        }
        if !roots.contains(&q.subject) && !slot_objects.contains(&q.subject) {
            violations.push(format!("subject {} is not a container node", q.subject.render()));
        }
    }
    violations
}

fn is_slot_predicate(predicate: &str) -> bool {
    matches!(classify_iri(predicate), WellKnown::ContainerMembershipProperty(_))
        || predicate.starts_with(XYZ_NS)
}

/// Blank-node isomorphism of two quad sets, compared on their default-graph
/// views. Grounded on the rooted-DAG shape of materialized graphs: each
/// blank node is canonicalised by the signature of its outgoing subtree.
pub fn isomorphic(a: &[FxQuad], b: &[FxQuad]) -> bool {
    canonical_form(a) == canonical_form(b)
}

fn canonical_form(quads: &[FxQuad]) -> Option<BTreeSet<(String, String, String)>> {
    let mut edges: BTreeMap<&Term, Vec<(&str, &Term)>> = BTreeMap::new();
    for q in quads {
        edges.entry(&q.subject).or_default().push((q.predicate.as_str(), &q.object));
    }

    fn signature<'a>(
        term: &'a Term,
        edges: &BTreeMap<&'a Term, Vec<(&'a str, &'a Term)>>,
        depth: usize,
        memo: &mut HashMap<&'a Term, String>,
    ) -> Option<String> {
        match term {
            Term::Iri(_) | Term::Literal { .. } => Some(term.render()),
            Term::Blank(_) => {
                if let Some(s) = memo.get(term) {
                    return Some(s.clone());
                }
                if depth > 512 {
                    return None;
                }
                let mut parts: Vec<String> = Vec::new();
                if let Some(out) = edges.get(term) {
                    for (p, o) in out {
                        parts.push(format!("{p}->{}", signature(o, edges, depth + 1, memo)?));
                    }
                }
                parts.sort();
                let s = format!("({})", parts.join(";"));
                memo.insert(term, s.clone());
                Some(s)
            }
        }
    }

    let mut memo = HashMap::new();
    let mut out = BTreeSet::new();
    for q in quads {
        let s = signature(&q.subject, &edges, 0, &mut memo)?;
        let o = signature(&q.object, &edges, 0, &mut memo)?;
        out.insert((s, q.predicate.clone(), o));
    }
    Some(out)
}
