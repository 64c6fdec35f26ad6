//! Constructing a concrete Façade-X instance from a ground solution
//! pattern, such that the original BGP provably matches its materialization.
//!
//! Nodes that must co-bind in any matching graph are unified first: subjects
//! typed as the root, objects held by the same slot, and the positions of
//! matching backward paths into shared containers. Each resulting class
//! becomes one model element; constants pin entity IRIs, slot keys, literal
//! values and type names, while unconstrained classes receive fresh ones.

use super::model::{validate_model, FxInstance, LiteralValue, SlotKey, TypeName};
use crate::annotation::Annotation;
use crate::predicate::FxPredicate;
use crate::realize::{coherence_failure, unify_solution, UnrealizableReason};
use crate::rules::RuleContext;
use crate::term::{classify_iri, Bgp, NodeKind, WellKnown, XYZ_NS};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("cannot build a witness: {reason}")]
pub struct WitnessError {
    pub reason: String,
}

fn err(reason: impl Into<String>) -> WitnessError {
    WitnessError { reason: reason.into() }
}

/// Builds a model instance witnessing `solution` over `bgp`.
///
/// Preconditions: the solution was produced by the annotator (it passed the
/// rules and the realizability screen). The one construction failure left
/// open is a constant slot property outside the data vocabulary, which no
/// materialized graph can contain; callers deciding satisfiability against
/// the oracle try the next solution pattern in that case.
pub fn build_witness(bgp: &Bgp, solution: &Annotation) -> Result<FxInstance, WitnessError> {
    let ctx = RuleContext::new(bgp);
    let sol: Vec<FxPredicate> = ctx
        .annotation_to_map(solution)
        .map_err(|e| err(format!("incomplete solution: {e}")))?;

    let mut uf = unify_solution(&ctx, &sol);
    if let Some(reason) = coherence_failure(&ctx, &sol, &mut uf) {
        return Err(match reason {
            UnrealizableReason::ConstantClash(a, b) => err(format!(
                "nodes {} and {} must co-bind but are distinct constants",
                ctx.nodes[a], ctx.nodes[b]
            )),
            UnrealizableReason::LiteralContainer(c) => {
                err(format!("literal {} would have to be a container", ctx.nodes[c]))
            }
            UnrealizableReason::ContainmentCycle => {
                err("co-bound containers would have to contain themselves")
            }
            UnrealizableReason::RootInsideSlot => {
                err("the root container would be held by a slot")
            }
        });
    }

    let root_subject: Option<usize> = ctx
        .triples
        .iter()
        .find(|t| sol[t[2]] == FxPredicate::FxRoot)
        .map(|t| t[0]);

    let classes = uf.classes();

    // Coherence screening already rejected clashing classes, so each class
    // carries at most one distinct constant.
    let class_constant = |members: &[usize]| -> Option<usize> {
        members.iter().copied().find(|&m| ctx.nodes[m].is_constant())
    };

    // Containers.
    let mut instance = FxInstance {
        source_iri: "urn:fx:witness".to_string(),
        roots: Vec::new(),
        containers: BTreeSet::new(),
        slots: Vec::new(),
        types: Vec::new(),
        entity_overrides: BTreeMap::new(),
    };
    let mut container_of: BTreeMap<usize, String> = BTreeMap::new();
    for (&rep, members) in &classes {
        if !members.iter().any(|&m| sol[m] == FxPredicate::Container) {
            continue;
        }
        let id = format!("c{rep}");
        if let Some(constant) = class_constant(members) {
            let node = &ctx.nodes[constant];
            if node.kind == NodeKind::Literal {
                return Err(err(format!("literal {node} would have to be a container")));
            }
            instance.entity_overrides.insert(id.clone(), node.label.clone());
        }
        instance.containers.insert(id.clone());
        container_of.insert(rep, id);
    }

    // Slot keys per property class. Fresh numbers start above every constant
    // membership index in the pattern; fresh names are prefixed to avoid the
    // constant name pool.
    let mut next_number: u64 = 1 + bgp
        .triples
        .iter()
        .filter_map(|t| match classify_iri(&t.predicate.label) {
            WellKnown::ContainerMembershipProperty(k) => Some(k),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut next_name = 0u64;
    let mut key_of: BTreeMap<usize, SlotKey> = BTreeMap::new();
    for (&rep, members) in &classes {
        let slotty = members.iter().any(|&m| sol[m].is_a(FxPredicate::Slot));
        if !slotty {
            continue;
        }
        let key = match class_constant(members) {
            Some(constant) => {
                let node = &ctx.nodes[constant];
                match classify_iri(&node.label) {
                    WellKnown::ContainerMembershipProperty(k) => SlotKey::Number(k),
                    _ => match node.label.strip_prefix(XYZ_NS) {
                        Some(local) => SlotKey::Name(decode_percent(local)),
                        None => {
                            return Err(err(format!(
                                "slot property {node} lies outside the data vocabulary"
                            )))
                        }
                    },
                }
            }
            None => {
                // A fresh key typed by the first member's annotation.
                let anno = members.iter().map(|&m| sol[m]).find(|p| p.is_a(FxPredicate::Slot));
                match anno {
                    Some(FxPredicate::SlotNumber) => {
                        let k = SlotKey::Number(next_number);
                        next_number += 1;
                        k
                    }
                    _ => {
                        let k = SlotKey::Name(format!("wk{next_name}"));
                        next_name += 1;
                        k
                    }
                }
            }
        };
        key_of.insert(rep, key);
    }

    // Literal values and type names per class.
    let mut fresh_value = 0u64;
    let mut value_of: BTreeMap<usize, LiteralValue> = BTreeMap::new();
    let mut fresh_type = 0u64;
    let mut type_of: BTreeMap<usize, TypeName> = BTreeMap::new();
    for (&rep, members) in &classes {
        if container_of.contains_key(&rep) {
            continue;
        }
        if members.iter().any(|&m| sol[m] == FxPredicate::Value) {
            let value = match class_constant(members) {
                Some(constant) => {
                    let node = &ctx.nodes[constant];
                    if node.kind != NodeKind::Literal {
                        return Err(err(format!("{node} would have to be a literal value", node = node)));
                    }
                    LiteralValue { lexical: node.label.clone(), datatype: node.datatype.clone() }
                }
                None => {
                    let v = LiteralValue::string(format!("w{fresh_value}"));
                    fresh_value += 1;
                    v
                }
            };
            value_of.insert(rep, value);
        } else if members.iter().any(|&m| sol[m] == FxPredicate::Type) {
            let name = match class_constant(members) {
                Some(constant) => {
                    let node = &ctx.nodes[constant];
                    match node.label.strip_prefix(XYZ_NS) {
                        Some(local) => TypeName::Local(decode_percent(local)),
                        None => TypeName::Iri(node.label.clone()),
                    }
                }
                None => {
                    let t = TypeName::Local(format!("T{fresh_type}"));
                    fresh_type += 1;
                    t
                }
            };
            type_of.insert(rep, name);
        }
    }

    // Edges and slots, deduplicated at class level.
    let mut child_edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut value_slots: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut typings: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &[s, p, o] in &ctx.triples {
        let (cs, cp, co) = (uf.find(s), uf.find(p), uf.find(o));
        if sol[o] == FxPredicate::FxRoot {
            continue;
        }
        if container_of.contains_key(&co) {
            child_edges.insert((cs, cp, co));
        } else if value_of.contains_key(&co) {
            value_slots.insert((cs, cp, co));
        } else if type_of.contains_key(&co) {
            typings.insert((cs, co));
        } else {
            return Err(err(format!(
                "object {} has no model role in this solution",
                ctx.nodes[o]
            )));
        }
    }

    let mut parents_seen: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for &(cs, cp, co) in &child_edges {
        if let Some(&(ps, pp)) = parents_seen.get(&co) {
            if (ps, pp) != (cs, cp) {
                return Err(err("a container would be held by two different slots"));
            }
            continue;
        }
        parents_seen.insert(co, (cs, cp));
        let owner = container_of
            .get(&cs)
            .ok_or_else(|| err("slot owner is not a container"))?
            .clone();
        let key = key_of.get(&cp).ok_or_else(|| err("child edge without a slot key"))?.clone();
        let child = container_of[&co].clone();
        instance.add_child_slot(owner, key, child);
    }
    for &(cs, cp, co) in &value_slots {
        let owner = container_of
            .get(&cs)
            .ok_or_else(|| err("slot owner is not a container"))?
            .clone();
        let key = key_of.get(&cp).ok_or_else(|| err("value slot without a key"))?.clone();
        instance.add_value_slot(owner, key, value_of[&co].clone());
    }
    for &(cs, co) in &typings {
        let owner = container_of
            .get(&cs)
            .ok_or_else(|| err("typed node is not a container"))?
            .clone();
        instance.add_type(owner, type_of[&co].clone());
    }

    // Root selection: the root-typed class when present, otherwise a fresh
    // root synthesized above every parentless container.
    let root_id = match root_subject {
        Some(s) => {
            let rep = uf.find(s);
            let id = container_of
                .get(&rep)
                .ok_or_else(|| err("root-typed subject is not a container"))?
                .clone();
            if parents_seen.contains_key(&rep) {
                return Err(err("the root container would be held by a slot"));
            }
            id
        }
        None => {
            let id = "root".to_string();
            instance.containers.insert(id.clone());
            id
        }
    };
    instance.roots.push(root_id.clone());
    let mut attach_key = 1 + instance
        .slots
        .iter()
        .filter(|s| s.owner == root_id)
        .filter_map(|s| match s.key {
            SlotKey::Number(k) => Some(k),
            SlotKey::Name(_) => None,
        })
        .max()
        .unwrap_or(next_number);
    for (&rep, id) in &container_of {
        if *id == root_id || parents_seen.contains_key(&rep) {
            continue;
        }
        instance.add_child_slot(root_id.clone(), SlotKey::Number(attach_key), id.clone());
        attach_key += 1;
    }

    let violations = validate_model(&instance);
    if !violations.is_empty() {
        return Err(err(format!(
            "constructed instance violates the model: {}",
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
        )));
    }
    Ok(instance)
}

fn decode_percent(encoded: &str) -> String {
    let bytes = encoded.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() + 1 && i + 3 <= bytes.len() {
            if let Ok(byte) = u8::from_str_radix(&encoded[i + 1..i + 3], 16) {
                out.push(byte);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

/// Finds the first solution pattern admitting a witness instance, trying
/// solutions in canonical enumeration order. Returns the annotation and its
/// instance, or `None` when no enumerated solution can be realised.
pub fn find_witness(
    bgp: &Bgp,
    timeout: std::time::Duration,
) -> Option<(Annotation, FxInstance)> {
    use crate::annotate::candidate_sets;
    if crate::structure::has_unsupported_join(bgp) || crate::structure::has_cycle(bgp) {
        return None;
    }
    if bgp.is_empty() {
        return Some((Annotation::new(), FxInstance::new("urn:fx:witness", "root")));
    }
    let deadline = std::time::Instant::now() + timeout;
    let ctx = RuleContext::new(bgp);
    let sets = candidate_sets(&ctx);
    if sets.iter().any(|s| s.is_empty()) {
        return None;
    }
    let n = ctx.node_count();
    let mut indices = vec![0usize; n];
    let mut map: Vec<FxPredicate> = (0..n).map(|i| sets[i][0]).collect();
    let mut step = 0u64;
    loop {
        step += 1;
        if step.is_multiple_of(256) && std::time::Instant::now() >= deadline {
            return None;
        }
        if ctx.is_consistent(&map) {
            let annotation = ctx.map_to_annotation(&map);
            if let Ok(instance) = build_witness(bgp, &annotation) {
                return Some((annotation, instance));
            }
        }
        let mut advanced = false;
        for i in (0..n).rev() {
            indices[i] += 1;
            if indices[i] < sets[i].len() {
                map[i] = sets[i][indices[i]];
                advanced = true;
                break;
            }
            indices[i] = 0;
            map[i] = sets[i][0];
        }
        if !advanced {
            return None;
        }
    }
}
