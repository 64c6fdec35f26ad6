//! Realizability screening of ground solution patterns.
//!
//! The inference rules constrain each node locally, but a matching graph
//! also forces nodes to co-bind: all subjects typed as the root are the one
//! root container, a container's single incoming slot identifies the parents
//! and keys of every triple reaching it, and a slot identified by subject
//! and key holds exactly one thing. Closing a solution under these merges
//! can demand that two distinct constants be equal, or that a literal act as
//! a container; such solutions describe no graph and are discarded. The
//! witness builder shares this closure, so every accepted solution pattern
//! is one it can realise (up to the data-vocabulary restriction on constant
//! slot names).

use crate::predicate::FxPredicate;
use crate::rules::RuleContext;
use crate::term::NodeKind;
use std::collections::BTreeMap;

pub(crate) struct Unification {
    parent: Vec<usize>,
}

impl Unification {
    pub(crate) fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Class members, keyed by representative.
    pub(crate) fn classes(&mut self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.parent.len() {
            let rep = self.find(i);
            out.entry(rep).or_default().push(i);
        }
        out
    }
}

/// Closes the co-binding relation induced by `map` over the BGP.
pub(crate) fn unify_solution(ctx: &RuleContext, map: &[FxPredicate]) -> Unification {
    let mut uf = Unification { parent: (0..ctx.node_count()).collect() };

    // Subjects typed as the root are the same container.
    let mut root_subject: Option<usize> = None;
    for &[s, _, o] in &ctx.triples {
        if map[o] == FxPredicate::FxRoot {
            match root_subject {
                None => root_subject = Some(s),
                Some(first) => {
                    uf.union(first, s);
                }
            }
        }
    }

    // Backward paths into a shared container or root align position-wise.
    for node in 0..ctx.node_count() {
        if map[node] != FxPredicate::Container && map[node] != FxPredicate::FxRoot {
            continue;
        }
        for &(a, b) in ctx.path_merge_pairs(node) {
            uf.union(a, b);
        }
    }

    // A slot identified by its owner and key holds a single thing, so the
    // objects of co-bound (subject, slot) pairs co-bind too; iterate because
    // merging objects can identify further slots.
    loop {
        let mut changed = false;
        let mut by_slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &[s, p, o] in &ctx.triples {
            if !map[p].is_a(FxPredicate::Slot) {
                continue;
            }
            let key = (uf.find(s), uf.find(p));
            match by_slot.get(&key) {
                None => {
                    by_slot.insert(key, o);
                }
                Some(&first) => {
                    changed |= uf.union(first, o);
                }
            }
        }
        if !changed {
            break;
        }
    }
    uf
}

/// Why a solution cannot be realised as a graph.
pub(crate) enum UnrealizableReason {
    ConstantClash(usize, usize),
    LiteralContainer(usize),
    ContainmentCycle,
    RootInsideSlot,
}

/// Checks class coherence after unification: at most one distinct constant
/// per class, no literal in a class that must be a container, no cycle in
/// the class-level containment edges, and no slot edge into the root class.
pub(crate) fn coherence_failure(
    ctx: &RuleContext,
    map: &[FxPredicate],
    uf: &mut Unification,
) -> Option<UnrealizableReason> {
    let classes = uf.classes();
    let mut container_class: BTreeMap<usize, bool> = BTreeMap::new();
    for (&rep, members) in &classes {
        let mut constant: Option<usize> = None;
        let mut is_container = false;
        for &m in members {
            if map[m] == FxPredicate::Container {
                is_container = true;
            }
            if ctx.nodes[m].is_constant() {
                match constant {
                    None => constant = Some(m),
                    Some(first) if ctx.nodes[first] != ctx.nodes[m] => {
                        return Some(UnrealizableReason::ConstantClash(first, m));
                    }
                    _ => {}
                }
            }
        }
        container_class.insert(rep, is_container);
        if is_container {
            if let Some(c) = constant {
                if ctx.nodes[c].kind == NodeKind::Literal {
                    return Some(UnrealizableReason::LiteralContainer(c));
                }
            }
        }
    }

    // Class-level containment: slot edges whose object class is a container.
    let mut edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &[s, p, o] in &ctx.triples {
        if !map[p].is_a(FxPredicate::Slot) {
            continue;
        }
        let co = uf.find(o);
        if container_class.get(&co).copied().unwrap_or(false) {
            edges.entry(uf.find(s)).or_default().push(co);
        }
    }
    if class_graph_has_cycle(&edges) {
        return Some(UnrealizableReason::ContainmentCycle);
    }

    // The root class (subjects typed as the root) cannot be held by a slot.
    let root_class = ctx
        .triples
        .iter()
        .find(|t| map[t[2]] == FxPredicate::FxRoot)
        .map(|t| uf.find(t[0]));
    if let Some(root) = root_class {
        if edges.values().any(|targets| targets.contains(&root)) {
            return Some(UnrealizableReason::RootInsideSlot);
        }
    }
    None
}

fn class_graph_has_cycle(edges: &BTreeMap<usize, Vec<usize>>) -> bool {
    fn visit(
        node: usize,
        edges: &BTreeMap<usize, Vec<usize>>,
        on_path: &mut Vec<usize>,
        done: &mut std::collections::BTreeSet<usize>,
    ) -> bool {
        if done.contains(&node) {
            return false;
        }
        if on_path.contains(&node) {
            return true;
        }
        on_path.push(node);
        if let Some(next) = edges.get(&node) {
            for &n in next {
                if visit(n, edges, on_path, done) {
                    return true;
                }
            }
        }
        on_path.pop();
        done.insert(node);
        false
    }
    let mut done = std::collections::BTreeSet::new();
    for &start in edges.keys() {
        let mut on_path = Vec::new();
        if visit(start, edges, &mut on_path, &mut done) {
            return true;
        }
    }
    false
}

/// True when the solution's co-binding closure is coherent, i.e. some graph
/// can realise the annotation.
pub(crate) fn solution_realizable(ctx: &RuleContext, map: &[FxPredicate]) -> bool {
    let mut uf = unify_solution(ctx, map);
    coherence_failure(ctx, map, &mut uf).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_bgp_text;

    #[test]
    fn chained_slot_identification_rejects_literal_containers() {
        // Any match forces ?p5 = rdf:_2 and ?v1 = _:b0, putting "x y" and
        // the container ?v3 in the same slot.
        let bgp = parse_bgp_text(
            "_:b0 ?p5 \"x y\" . ?v3 a _:b1 . ?v1 ?p5 ?v3 . _:b0 rdf:_2 ?v3 .",
        )
        .unwrap();
        let ctx = RuleContext::new(&bgp);
        use FxPredicate::*;
        // Node order: _:b0, ?p5, "x y", ?v3, rdf:type, _:b1, ?v1, rdf:_2.
        let map = vec![
            Container,
            SlotNumber,
            Value,
            Container,
            TypeProperty,
            Type,
            Container,
            SlotNumber,
        ];
        assert!(ctx.check_map(&map).consistent, "rules alone accept the annotation");
        assert!(!solution_realizable(&ctx, &map));
    }

    #[test]
    fn plain_shared_objects_remain_realizable() {
        let bgp = parse_bgp_text("?a ?p ?c . ?b ?q ?c . ?c a ?t .").unwrap();
        let ctx = RuleContext::new(&bgp);
        use FxPredicate::*;
        let map = vec![Container, SlotNumber, Container, Container, SlotString, TypeProperty, Type];
        assert!(ctx.check_map(&map).consistent);
        assert!(solution_realizable(&ctx, &map));
    }

    #[test]
    fn unified_containment_self_loop_is_rejected() {
        // Matching forces ?v1 = ?v5 and ?p2 = rdf:_2, so slot _2 of the
        // unified container holds both _:b1 and ?v5, and the merged class
        // contains itself.
        let bgp = parse_bgp_text(
            "_:b1 rdf:_3 ?v3 . ?v5 rdf:_2 _:b1 . ?v1 ?p2 _:b1 . ?v1 rdf:_2 ?v5 .",
        )
        .unwrap();
        let ctx = RuleContext::new(&bgp);
        use FxPredicate::*;
        // Node order: _:b1, rdf:_3, ?v3, ?v5, rdf:_2, ?v1, ?p2.
        let map = vec![Container, SlotNumber, Value, Container, SlotNumber, Container, SlotNumber];
        assert!(ctx.check_map(&map).consistent);
        assert!(!solution_realizable(&ctx, &map));
    }

    #[test]
    fn distinct_constant_roots_are_rejected() {
        let bgp =
            parse_bgp_text("<http://ex/a> a ?r1 . <http://ex/b> a ?r2 .").unwrap();
        let ctx = RuleContext::new(&bgp);
        use FxPredicate::*;
        // Node order: <a>, rdf:type, ?r1, <b>, ?r2.
        let both_roots = vec![Container, TypeProperty, FxRoot, Container, FxRoot];
        assert!(ctx.check_map(&both_roots).consistent);
        assert!(!solution_realizable(&ctx, &both_roots));
        let both_types = vec![Container, TypeProperty, Type, Container, Type];
        assert!(solution_realizable(&ctx, &both_types));
    }
}
