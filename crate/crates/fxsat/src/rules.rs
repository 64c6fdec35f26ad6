//! The inference rules constraining node annotations and the `check`
//! consistency function built on them.
//!
//! Each rule has a body (a condition over the BGP, a node, and the current
//! annotation) and a head that either implies a role for the node or raises
//! NS ("no solution"). A node's annotation is inconsistent when an implied
//! role is disjoint with its current role, or when an NS head fires. The
//! rule set is fixed: all nineteen rules are always active.

use crate::annotation::Annotation;
use crate::predicate::{disjoint_with, FxPredicate};
use crate::structure::analyze_paths_to;
use crate::term::{classify_iri, Bgp, NodeKind, PatternNode, WellKnown, FX_ROOT};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Identifier of one of the nineteen annotation rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleId(pub u8);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

impl RuleId {
    /// Short statement of the constraint the rule enforces.
    pub fn description(self) -> &'static str {
        match self.0 {
            1 => "a subject node is a Container",
            2 => "the IRI fx:root is FXRoot",
            3 => "the IRI rdf:type is TypeProperty",
            4 => "a constant property other than rdf:type is a Slot",
            5 => "a non-root object under rdf:type is a Type",
            6 => "the property of an FXRoot object is TypeProperty",
            7 => "the property of a Type object is TypeProperty",
            8 => "a container membership property is a SlotNumber",
            9 => "a constant property that is neither rdf:type nor a membership property is a SlotString",
            10 => "a literal is a Value",
            11 => "an IRI object under a Slot property is a Container",
            12 => "the property of a Value object is a Slot",
            13 => "an IRI other than fx:root cannot be FXRoot",
            14 => "fx:root cannot be a Type",
            15 => "an IRI object cannot be a Value",
            16 => "the property of a Container object is a Slot",
            17 => "two triples with the same subject and Slot property need matching objects",
            18 => "a root container cannot be held by a slot",
            19 => "a Container or FXRoot object admits at most one backward path",
            _ => "unknown rule",
        }
    }
}

/// How a rule found the annotation inconsistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conflict {
    /// The rule head raised NS directly.
    NoSolution,
    /// The rule implied a role disjoint with the node's current role.
    Disjoint { implied: FxPredicate, current: FxPredicate },
}

/// Result of consistency checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub consistent: bool,
    pub violated_rule: Option<RuleId>,
    pub conflicting_node: Option<PatternNode>,
    pub conflict: Option<Conflict>,
}

impl CheckOutcome {
    pub fn consistent() -> Self {
        CheckOutcome { consistent: true, violated_rule: None, conflicting_node: None, conflict: None }
    }

    fn violation(rule: RuleId, node: PatternNode, conflict: Conflict) -> Self {
        CheckOutcome {
            consistent: false,
            violated_rule: Some(rule),
            conflicting_node: Some(node),
            conflict: Some(conflict),
        }
    }

    /// Human-readable diagnostic, present only on inconsistent outcomes.
    pub fn message(&self) -> Option<String> {
        let rule = self.violated_rule?;
        let node = self.conflicting_node.as_ref()?;
        let detail = match self.conflict.as_ref()? {
            Conflict::NoSolution => format!("{rule}: {}", rule.description()),
            Conflict::Disjoint { implied, current } => format!(
                "{rule}: {} ({current} is disjoint with {implied})",
                rule.description()
            ),
        };
        Some(format!("node {node}: {detail}"))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("annotation has no entry for node {node}")]
pub struct MissingEntryError {
    pub node: PatternNode,
}

// ---------------------------------------------------------------------------
// Preprocropessed BGP facts shared by every rule evaluation
// ---------------------------------------------------------------------------

/// Per-node precomputation for the unique-path rule.
#[derive(Debug, Clone, Default)]
pub(crate) struct PathFacts {
    pub(crate) checked: bool,
    mismatch: bool,
    /// Outgoing-object node ids of each shorter-path terminal.
    shorter_end_objects: Vec<usize>,
    /// Position-aligned node pairs from the backward-path comparison; they
    /// co-bind in every graph where the node is a shared container or root.
    pub(crate) prefix_pairs: Vec<(usize, usize)>,
}

/// Interned view of a BGP with the indexes the rules need. Building one is
/// linear-ish in the pattern size; evaluating `check` against a candidate
/// annotation is then cheap enough to run hundreds of thousands of times.
pub(crate) struct RuleContext {

    pub nodes: Vec<PatternNode>,
    pub ids: HashMap<PatternNode, usize>,
    pub triples: Vec<[usize; 3]>,
    pub in_subject: Vec<bool>,
    pub in_predicate: Vec<bool>,
    pub in_object: Vec<bool>,
    kind: Vec<NodeKind>,
    class: Vec<WellKnown>,
    is_fx_root: Vec<bool>,
    /// Object ids of triples with the node as subject.
    out_objects: Vec<Vec<usize>>,
    /// Object ids of triples with the node as predicate.
    pred_objects: Vec<Vec<usize>>,
    /// Predicate ids of triples with the node as object.
    incoming_preds: Vec<Vec<usize>>,
    /// Node is the object of a triple whose predicate is constant rdf:type.
    under_rdf_type: Vec<bool>,
    /// Per subject node: predicate ids over which two same-subject triples
    /// carry non-matching objects.
    same_slot_mismatch: Vec<Vec<usize>>,
    path_facts: Vec<PathFacts>,
}

impl RuleContext {
    pub fn new(bgp: &Bgp) -> Self {
        let nodes: Vec<PatternNode> = bgp.nodes().into_iter().cloned().collect();
        let ids: HashMap<PatternNode, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let n = nodes.len();
        let triples: Vec<[usize; 3]> = bgp
            .triples
            .iter()
            .map(|t| [ids[&t.subject], ids[&t.predicate], ids[&t.object]])
            .collect();

        let mut ctx = RuleContext {

            kind: nodes.iter().map(|n| n.kind).collect(),
            class: nodes
                .iter()
                .map(|n| match n.kind {
                    NodeKind::Iri => classify_iri(&n.label),
                    _ => WellKnown::Other,
                })
                .collect(),
            is_fx_root: nodes.iter().map(|n| n.is_iri(FX_ROOT)).collect(),
            nodes,
            ids,
            triples,
            in_subject: vec![false; n],
            in_predicate: vec![false; n],
            in_object: vec![false; n],
            out_objects: vec![Vec::new(); n],
            pred_objects: vec![Vec::new(); n],
            incoming_preds: vec![Vec::new(); n],
            under_rdf_type: vec![false; n],
            same_slot_mismatch: vec![Vec::new(); n],
            path_facts: vec![PathFacts::default(); n],
        };

        for &[s, p, o] in &ctx.triples {
            ctx.in_subject[s] = true;
            ctx.in_predicate[p] = true;
            ctx.in_object[o] = true;
            if !ctx.out_objects[s].contains(&o) {
                ctx.out_objects[s].push(o);
            }
            if !ctx.pred_objects[p].contains(&o) {
                ctx.pred_objects[p].push(o);
            }
            if !ctx.incoming_preds[o].contains(&p) {
                ctx.incoming_preds[o].push(p);
            }
            if ctx.class[p] == WellKnown::RdfType {
                ctx.under_rdf_type[o] = true;
            }
        }

        // Same subject and predicate, objects that cannot co-bind.
        for (i, &[s1, p1, o1]) in ctx.triples.iter().enumerate() {
            for &[s2, p2, o2] in &ctx.triples[i + 1..] {
                if s1 == s2 && p1 == p2 && o1 != o2 {
                    let left = &ctx.nodes[o1];
                    let right = &ctx.nodes[o2];
                    if !crate::term::match_nodes(left, right)
                        && !ctx.same_slot_mismatch[s1].contains(&p1)
                    {
                        ctx.same_slot_mismatch[s1].push(p1);
                    }
                }
            }
        }

        // Backward-path compatibility per multi-parent node.
        for id in 0..n {
            let distinct_incoming = ctx
                .triples
                .iter()
                .filter(|t| t[2] == id)
                .map(|t| (t[0], t[1]))
                .collect::<std::collections::HashSet<_>>();
            if distinct_incoming.len() < 2 {
                continue;
            }
            let analysis = analyze_paths_to(bgp, &ctx.nodes[id]);
            let mut shorter_end_objects = Vec::new();
            for end in &analysis.shorter_ends {
                let end_id = ctx.ids[end];
                for &obj in &ctx.out_objects[end_id] {
                    if !shorter_end_objects.contains(&obj) {
                        shorter_end_objects.push(obj);
                    }
                }
            }
            let prefix_pairs = analysis
                .prefix_pairs
                .iter()
                .map(|(a, b)| (ctx.ids[a], ctx.ids[b]))
                .collect();
            ctx.path_facts[id] = PathFacts {
                checked: true,
                mismatch: analysis.mismatch,
                shorter_end_objects,
                prefix_pairs,
            };
        }

        ctx
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Position-aligned co-binding pairs from the backward-path analysis of
    /// `node`; empty unless the node has two or more distinct incoming
    /// triples.
    pub(crate) fn path_merge_pairs(&self, node: usize) -> &[(usize, usize)] {
        &self.path_facts[node].prefix_pairs
    }

    pub fn annotation_to_map(&self, annotation: &Annotation) -> Result<Vec<FxPredicate>, MissingEntryError> {
        let mut map = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            match annotation.get(node) {
                Some(p) => map.push(p),
                None => return Err(MissingEntryError { node: node.clone() }),
            }
        }
        Ok(map)
    }

    pub fn map_to_annotation(&self, map: &[FxPredicate]) -> Annotation {
        self.nodes.iter().cloned().zip(map.iter().copied()).collect()
    }

    /// Evaluates every rule against `node`; the first inconsistency wins.
    pub fn apply_rules(&self, node: usize, map: &[FxPredicate]) -> CheckOutcome {
        match self.first_violation_at(node, map) {
            None => CheckOutcome::consistent(),
            Some((rule, conflict)) => {
                CheckOutcome::violation(rule, self.nodes[node].clone(), conflict)
            }
        }
    }

    /// Checks every node of the BGP; the first inconsistency wins.
    pub fn check_map(&self, map: &[FxPredicate]) -> CheckOutcome {
        for node in 0..self.nodes.len() {
            let outcome = self.apply_rules(node, map);
            if !outcome.consistent {
                return outcome;
            }
        }
        CheckOutcome::consistent()
    }

    /// Fast boolean variant used by the annotation algorithms.
    pub fn is_consistent(&self, map: &[FxPredicate]) -> bool {
        (0..self.nodes.len()).all(|node| self.first_violation_at(node, map).is_none())
    }

    fn first_violation_at(&self, i: usize, map: &[FxPredicate]) -> Option<(RuleId, Conflict)> {
        let current = map[i];
        let imply = |rule: u8, implied: FxPredicate| -> Option<(RuleId, Conflict)> {
            if disjoint_with(implied, current) {
                Some((RuleId(rule), Conflict::Disjoint { implied, current }))
            } else {
                None
            }
        };

        // R1: subjects are containers.
        if self.in_subject[i] {
            if let Some(v) = imply(1, FxPredicate::Container) {
                return Some(v);
            }
        }
        // R2: the fx:root IRI.
        if self.is_fx_root[i] {
            if let Some(v) = imply(2, FxPredicate::FxRoot) {
                return Some(v);
            }
        }
        // R3: the rdf:type IRI.
        if self.class[i] == WellKnown::RdfType {
            if let Some(v) = imply(3, FxPredicate::TypeProperty) {
                return Some(v);
            }
        }
        // R4: constant properties other than rdf:type are slots.
        if self.in_predicate[i]
            && self.kind[i] == NodeKind::Iri
            && self.class[i] != WellKnown::RdfType
        {
            if let Some(v) = imply(4, FxPredicate::Slot) {
                return Some(v);
            }
        }
        // R5: objects under a constant rdf:type are types, unless they are
        // (or are annotated as) the root marker.
        if self.under_rdf_type[i] && !self.is_fx_root[i] && current != FxPredicate::FxRoot {
            if let Some(v) = imply(5, FxPredicate::Type) {
                return Some(v);
            }
        }
        // R6/R7: properties of FXRoot or Type objects.
        if self.in_predicate[i] {
            for &o in &self.pred_objects[i] {
                if map[o] == FxPredicate::FxRoot {
                    if let Some(v) = imply(6, FxPredicate::TypeProperty) {
                        return Some(v);
                    }
                }
            }
            for &o in &self.pred_objects[i] {
                if map[o] == FxPredicate::Type {
                    if let Some(v) = imply(7, FxPredicate::TypeProperty) {
                        return Some(v);
                    }
                }
            }
        }
        // R8: container membership properties.
        if self.in_predicate[i]
            && matches!(self.class[i], WellKnown::ContainerMembershipProperty(_))
        {
            if let Some(v) = imply(8, FxPredicate::SlotNumber) {
                return Some(v);
            }
        }
        // R9: all other constant properties.
        if self.in_predicate[i]
            && self.kind[i] == NodeKind::Iri
            && self.class[i] != WellKnown::RdfType
            && !matches!(self.class[i], WellKnown::ContainerMembershipProperty(_))
        {
            if let Some(v) = imply(9, FxPredicate::SlotString) {
                return Some(v);
            }
        }
        // R10: literals are values.
        if self.kind[i] == NodeKind::Literal {
            if let Some(v) = imply(10, FxPredicate::Value) {
                return Some(v);
            }
        }
        // R11: IRI objects under a slot are containers.
        if self.in_object[i] && self.kind[i] == NodeKind::Iri {
            let under_slot = self.incoming_preds[i]
                .iter()
                .any(|&p| map[p].is_a(FxPredicate::Slot));
            if under_slot {
                if let Some(v) = imply(11, FxPredicate::Container) {
                    return Some(v);
                }
            }
        }
        // R12: properties of Value objects are slots.
        if self.in_predicate[i] {
            for &o in &self.pred_objects[i] {
                if map[o] == FxPredicate::Value {
                    if let Some(v) = imply(12, FxPredicate::Slot) {
                        return Some(v);
                    }
                }
            }
        }
        // R13: only the fx:root IRI may be FXRoot.
        if self.in_object[i]
            && self.kind[i] == NodeKind::Iri
            && !self.is_fx_root[i]
            && current == FxPredicate::FxRoot
        {
            return Some((RuleId(13), Conflict::NoSolution));
        }
        // R14: fx:root is not a type.
        if self.is_fx_root[i] && current == FxPredicate::Type {
            return Some((RuleId(14), Conflict::NoSolution));
        }
        // R15: IRI objects are never values.
        if self.in_object[i] && self.kind[i] == NodeKind::Iri && current == FxPredicate::Value {
            return Some((RuleId(15), Conflict::NoSolution));
        }
        // R16: properties of Container objects are slots.
        if self.in_predicate[i] {
            for &o in &self.pred_objects[i] {
                if map[o] == FxPredicate::Container {
                    if let Some(v) = imply(16, FxPredicate::Slot) {
                        return Some(v);
                    }
                }
            }
        }
        // R17: same subject and slot property demand matching objects.
        if self.in_subject[i] {
            for &p in &self.same_slot_mismatch[i] {
                if map[p].is_a(FxPredicate::Slot) {
                    return Some((RuleId(17), Conflict::NoSolution));
                }
            }
        }
        // R18: a subject typed as the root cannot be held by a slot.
        if self.in_object[i] {
            for &o in &self.out_objects[i] {
                if map[o] == FxPredicate::FxRoot {
                    return Some((RuleId(18), Conflict::NoSolution));
                }
            }
        }
        // R19: multi-parent containers and roots need compatible paths.
        if (current == FxPredicate::Container || current == FxPredicate::FxRoot)
            && self.path_facts[i].checked
        {
            let facts = &self.path_facts[i];
            if facts.mismatch {
                return Some((RuleId(19), Conflict::NoSolution));
            }
            for &obj in &facts.shorter_end_objects {
                if map[obj] == FxPredicate::FxRoot {
                    return Some((RuleId(19), Conflict::NoSolution));
                }
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Evaluates every rule against one node of the BGP under `annotation`.
///
/// The annotation must cover every node of the BGP (rule bodies read
/// neighbouring annotations).
pub fn apply_rules_to_node(
    bgp: &Bgp,
    node: &PatternNode,
    annotation: &Annotation,
) -> CheckOutcome {
    let ctx = RuleContext::new(bgp);
    let map = ctx
        .annotation_to_map(annotation)
        .expect("annotation must cover every node of the BGP");
    let id = *ctx.ids.get(node).expect("node must occur in the BGP");
    ctx.apply_rules(id, &map)
}

/// Verifies the consistency of `annotation` against the whole BGP. The first
/// failing node is reported; permuting the BGP's triples never changes the
/// `consistent` field.
pub fn check(annotation: &Annotation, bgp: &Bgp) -> Result<CheckOutcome, MissingEntryError> {
    let ctx = RuleContext::new(bgp);
    let map = ctx.annotation_to_map(annotation)?;
    Ok(ctx.check_map(&map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_bgp_text;
    use crate::predicate::GROUND_PREDICATES;
    use FxPredicate::*;

    fn bgp(text: &str) -> Bgp {
        parse_bgp_text(text).unwrap()
    }

    fn annotate(bgp: &Bgp, preds: &[FxPredicate]) -> Annotation {
        bgp.nodes().into_iter().cloned().zip(preds.iter().copied()).collect()
    }

    #[test]
    fn subject_under_rdf_type_conflicts_as_container_and_type() {
        let g = bgp("?s rdf:_1 ?o . ?x a ?s .");
        // Node order: ?s, rdf:_1, ?o, ?x, rdf:type.
        let ann = annotate(&g, &[Container, SlotNumber, Value, Container, TypeProperty]);
        let outcome = apply_rules_to_node(&g, &PatternNode::variable("s"), &ann);
        assert!(!outcome.consistent);
        assert_eq!(outcome.violated_rule, Some(RuleId(5)));
        assert_eq!(
            outcome.conflict,
            Some(Conflict::Disjoint { implied: Type, current: Container })
        );
    }

    #[test]
    fn same_subject_same_slot_with_unmatchable_objects() {
        let g = bgp("<http://ex/i1> rdf:_1 \"a\" . <http://ex/i1> rdf:_1 <http://ex/i2> .");
        // Node order: <i1>, rdf:_1, "a", <i2>.
        let ann = annotate(&g, &[Container, SlotNumber, Value, Container]);
        let outcome = apply_rules_to_node(&g, &PatternNode::iri("http://ex/i1"), &ann);
        assert!(!outcome.consistent);
        assert_eq!(outcome.violated_rule, Some(RuleId(17)));
    }

    #[test]
    fn value_object_of_variable_slot_is_consistent() {
        let g = bgp("?s xyz:name ?o .");
        let ann = annotate(&g, &[Container, SlotString, Value]);
        let outcome = apply_rules_to_node(&g, &PatternNode::variable("o"), &ann);
        assert!(outcome.consistent);
    }

    #[test]
    fn check_accepts_number_slot_value_row() {
        let g = bgp("?s ?p ?o .");
        let outcome = check(&annotate(&g, &[Container, SlotNumber, Value]), &g).unwrap();
        assert!(outcome.consistent);
    }

    #[test]
    fn check_rejects_container_object_under_type_property() {
        let g = bgp("?s ?p ?o .");
        let outcome = check(&annotate(&g, &[Container, TypeProperty, Container]), &g).unwrap();
        assert!(!outcome.consistent);
        assert_eq!(outcome.violated_rule, Some(RuleId(16)));
    }

    #[test]
    fn check_rejects_value_object_under_type_property() {
        let g = bgp("?s ?p ?o .");
        let outcome = check(&annotate(&g, &[Container, TypeProperty, Value]), &g).unwrap();
        assert!(!outcome.consistent);
        assert_eq!(outcome.violated_rule, Some(RuleId(12)));
    }

    #[test]
    fn check_reports_missing_entries() {
        let g = bgp("?s ?p ?o .");
        let mut ann = Annotation::new();
        ann.insert(PatternNode::variable("s"), Container);
        assert!(check(&ann, &g).is_err());
    }

    #[test]
    fn exactly_six_single_triple_solution_patterns() {
        let g = bgp("?s ?p ?o .");
        let mut passing = Vec::new();
        for &p in &GROUND_PREDICATES {
            for &o in &GROUND_PREDICATES {
                if !p.tops().contains(&Property) || !o.tops().contains(&Object) {
                    continue;
                }
                let ann = annotate(&g, &[Container, p, o]);
                if check(&ann, &g).unwrap().consistent {
                    passing.push((p, o));
                }
            }
        }
        let expected = [
            (SlotNumber, Value),
            (SlotNumber, Container),
            (SlotString, Value),
            (SlotString, Container),
            (TypeProperty, Type),
            (TypeProperty, FxRoot),
        ];
        assert_eq!(passing.len(), 6);
        for pair in expected {
            assert!(passing.contains(&pair), "missing {pair:?}");
        }
    }

    #[test]
    fn check_is_invariant_under_triple_permutation() {
        let texts = [
            "?s rdf:_1 ?o . ?x a ?s .",
            "?a ?p ?c . ?b ?q ?c . ?c a ?t .",
            "<http://ex/i1> a fx:root . <http://ex/i2> rdf:_1 <http://ex/i1> .",
            "?s ?p ?o . ?s ?q ?o2 . ?o2 ?r ?o3 .",
        ];
        for text in texts {
            let g = bgp(text);
            let ctx = RuleContext::new(&g);
            let n = ctx.node_count();
            // Try a spread of ground maps rather than the full product.
            for seed in 0..243usize {
                let mut map = Vec::with_capacity(n);
                let mut k = seed;
                for _ in 0..n {
                    map.push(GROUND_PREDICATES[k % 7]);
                    k /= 7;
                }
                let ann = ctx.map_to_annotation(&map);
                let base = check(&ann, &g).unwrap().consistent;
                let mut reversed = g.clone();
                reversed.triples.reverse();
                assert_eq!(base, check(&ann, &reversed).unwrap().consistent);
                if g.len() >= 3 {
                    let mut rotated = g.clone();
                    rotated.triples.rotate_left(1);
                    assert_eq!(base, check(&ann, &rotated).unwrap().consistent);
                }
            }
        }
    }
}
