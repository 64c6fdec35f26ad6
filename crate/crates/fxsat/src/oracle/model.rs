//! In-memory Façade-X model instances and the axiom validator.
//!
//! An instance is a set of containers connected by keyed slots, each slot
//! holding exactly one value or one child container, with a single root
//! container not held by any slot. The representation is deliberately loose
//! (plain collections) so that invalid instances can be built by hand and
//! fed to [`validate_model`]; the façadifiers only ever construct valid ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type ContainerId = String;

/// Slot key: either an ordinal position or a member name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotKey {
    Number(u64),
    Name(String),
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotKey::Number(n) => write!(f, "_{n}"),
            SlotKey::Name(n) => write!(f, "{n}"),
        }
    }
}

/// A literal value held by a slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiteralValue {
    pub lexical: String,
    /// Datatype IRI; `None` is a plain string.
    pub datatype: Option<String>,
}

impl LiteralValue {
    pub fn string(lexical: impl Into<String>) -> Self {
        LiteralValue { lexical: lexical.into(), datatype: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        LiteralValue { lexical: lexical.into(), datatype: Some(datatype.into()) }
    }
}

/// What a slot holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Holding {
    Value(LiteralValue),
    Child(ContainerId),
}

/// One slot: a keyed place in a container.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot {
    pub owner: ContainerId,
    pub key: SlotKey,
    pub holding: Holding,
}

/// A container type name, normally a local name in the data namespace.
/// Explicit IRIs only appear in witness instances built from constant nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeName {
    Local(String),
    Iri(String),
}

/// A Façade-X model instance for a single data source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FxInstance {
    pub source_iri: String,
    /// Root containers; a valid instance has exactly one.
    pub roots: Vec<ContainerId>,
    pub containers: BTreeSet<ContainerId>,
    pub slots: Vec<Slot>,
    pub types: Vec<(ContainerId, TypeName)>,
    /// Explicit entity terms used at materialization, keyed by container.
    /// Only witness construction sets these.
    pub entity_overrides: BTreeMap<ContainerId, String>,
}

impl FxInstance {
    /// An instance holding only a root container.
    pub fn new(source_iri: impl Into<String>, root: impl Into<ContainerId>) -> Self {
        let root = root.into();
        FxInstance {
            source_iri: source_iri.into(),
            roots: vec![root.clone()],
            containers: BTreeSet::from([root]),
            slots: Vec::new(),
            types: Vec::new(),
            entity_overrides: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> &ContainerId {
        &self.roots[0]
    }

    pub fn add_container(&mut self, id: impl Into<ContainerId>) -> ContainerId {
        let id = id.into();
        self.containers.insert(id.clone());
        id
    }

    pub fn add_child_slot(
        &mut self,
        owner: impl Into<ContainerId>,
        key: SlotKey,
        child: impl Into<ContainerId>,
    ) {
        let child = child.into();
        self.containers.insert(child.clone());
        self.slots.push(Slot { owner: owner.into(), key, holding: Holding::Child(child) });
    }

    pub fn add_value_slot(
        &mut self,
        owner: impl Into<ContainerId>,
        key: SlotKey,
        value: LiteralValue,
    ) {
        self.slots.push(Slot { owner: owner.into(), key, holding: Holding::Value(value) });
    }

    pub fn add_type(&mut self, owner: impl Into<ContainerId>, name: TypeName) {
        self.types.push((owner.into(), name));
    }

    /// Slots owned by a container, in key order.
    pub fn slots_of(&self, owner: &ContainerId) -> Vec<&Slot> {
        let mut slots: Vec<&Slot> = self.slots.iter().filter(|s| &s.owner == owner).collect();
        slots.sort_by(|a, b| a.key.cmp(&b.key));
        slots
    }
}

/// A violated model axiom, labelled by what it constrains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// There must be one and only one root.
    RootCount { found: usize },
    /// The root cannot be held by a slot.
    RootHeldBySlot { root: ContainerId },
    /// A slot holds either a single container or a single value.
    DuplicateSlotHolding { owner: ContainerId, key: SlotKey },
    /// Each container is held by at most one slot.
    ContainerHeldTwice { container: ContainerId },
    /// Every non-root container must be held by a slot.
    OrphanContainer { container: ContainerId },
    /// A container cannot recursively contain itself.
    ContainmentCycle { container: ContainerId },
    /// Every container is recursively contained by the root.
    UnreachableContainer { container: ContainerId },
    /// A slot or type refers to a container the instance does not declare.
    UndeclaredContainer { container: ContainerId },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::RootCount { found } => {
                write!(f, "instance must have exactly one root, found {found}")
            }
            AxiomViolation::RootHeldBySlot { root } => {
                write!(f, "root container '{root}' is held by a slot")
            }
            AxiomViolation::DuplicateSlotHolding { owner, key } => {
                write!(f, "slot ({owner}, {key}) holds more than one thing")
            }
            AxiomViolation::ContainerHeldTwice { container } => {
                write!(f, "container '{container}' is held by more than one slot")
            }
            AxiomViolation::OrphanContainer { container } => {
                write!(f, "non-root container '{container}' is not held by any slot")
            }
            AxiomViolation::ContainmentCycle { container } => {
                write!(f, "container '{container}' recursively contains itself")
            }
            AxiomViolation::UnreachableContainer { container } => {
                write!(f, "container '{container}' is not reachable from the root")
            }
            AxiomViolation::UndeclaredContainer { container } => {
                write!(f, "reference to undeclared container '{container}'")
            }
        }
    }
}

/// Checks every machine-checkable model axiom and returns the violations;
/// an empty result means the instance is valid.
pub fn validate_model(instance: &FxInstance) -> Vec<AxiomViolation> {
    let mut violations = Vec::new();

    if instance.roots.len() != 1 {
        violations.push(AxiomViolation::RootCount { found: instance.roots.len() });
    }
    for root in &instance.roots {
        if !instance.containers.contains(root) {
            violations.push(AxiomViolation::UndeclaredContainer { container: root.clone() });
        }
    }

    // Slot references and per-(owner, key) uniqueness.
    let mut seen_keys: BTreeMap<(&ContainerId, &SlotKey), usize> = BTreeMap::new();
    for slot in &instance.slots {
        if !instance.containers.contains(&slot.owner) {
            violations.push(AxiomViolation::UndeclaredContainer { container: slot.owner.clone() });
        }
        if let Holding::Child(child) = &slot.holding {
            if !instance.containers.contains(child) {
                violations.push(AxiomViolation::UndeclaredContainer { container: child.clone() });
            }
        }
        *seen_keys.entry((&slot.owner, &slot.key)).or_default() += 1;
    }
    for ((owner, key), count) in seen_keys {
        if count > 1 {
            violations.push(AxiomViolation::DuplicateSlotHolding {
                owner: owner.clone(),
                key: key.clone(),
            });
        }
    }
    for (owner, name) in &instance.types {
        let _ = name;
        if !instance.containers.contains(owner) {
            violations.push(AxiomViolation::UndeclaredContainer { container: owner.clone() });
        }
    }

    // Incoming-slot counts: the root has none, every other container one.
    let mut held: BTreeMap<&ContainerId, usize> = BTreeMap::new();
    for slot in &instance.slots {
        if let Holding::Child(child) = &slot.holding {
            *held.entry(child).or_default() += 1;
        }
    }
    for (container, count) in &held {
        if *count > 1 {
            violations.push(AxiomViolation::ContainerHeldTwice { container: (*container).clone() });
        }
        if instance.roots.contains(container) {
            violations.push(AxiomViolation::RootHeldBySlot { root: (*container).clone() });
        }
    }
    for container in &instance.containers {
        if !instance.roots.contains(container) && !held.contains_key(container) {
            violations.push(AxiomViolation::OrphanContainer { container: container.clone() });
        }
    }

    // Acyclicity of the containment relation and reachability from the root.
    let children: BTreeMap<&ContainerId, Vec<&ContainerId>> = {
        let mut map: BTreeMap<&ContainerId, Vec<&ContainerId>> = BTreeMap::new();
        for slot in &instance.slots {
            if let Holding::Child(child) = &slot.holding {
                map.entry(&slot.owner).or_default().push(child);
            }
        }
        map
    };
    for start in &instance.containers {
        let mut on_path: Vec<&ContainerId> = Vec::new();
        if containment_cycle_from(start, &children, &mut on_path) {
            violations.push(AxiomViolation::ContainmentCycle { container: start.clone() });
        }
    }
    if instance.roots.len() == 1 {
        let mut reachable: BTreeSet<&ContainerId> = BTreeSet::new();
        let mut queue = vec![instance.root()];
        while let Some(c) = queue.pop() {
            if reachable.insert(c) {
                if let Some(kids) = children.get(c) {
                    queue.extend(kids.iter().copied());
                }
            }
        }
        for container in &instance.containers {
            if !reachable.contains(container) {
                violations
                    .push(AxiomViolation::UnreachableContainer { container: container.clone() });
            }
        }
    }

    violations
}

fn containment_cycle_from<'a>(
    node: &'a ContainerId,
    children: &BTreeMap<&'a ContainerId, Vec<&'a ContainerId>>,
    on_path: &mut Vec<&'a ContainerId>,
) -> bool {
    if on_path.contains(&node) {
        return true;
    }
    on_path.push(node);
    if let Some(kids) = children.get(node) {
        for kid in kids {
            if containment_cycle_from(kid, children, on_path) {
                return true;
            }
        }
    }
    on_path.pop();
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_root_instance_is_valid() {
        let instance = FxInstance::new("urn:test", "r");
        assert!(validate_model(&instance).is_empty());
    }

    #[test]
    fn container_held_by_two_slots_is_reported() {
        let mut instance = FxInstance::new("urn:test", "r");
        instance.add_child_slot("r", SlotKey::Number(1), "c");
        instance.add_child_slot("r", SlotKey::Number(2), "c");
        let violations = validate_model(&instance);
        assert!(violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::ContainerHeldTwice { container } if container == "c")));
    }

    #[test]
    fn two_roots_are_reported() {
        let mut instance = FxInstance::new("urn:test", "r1");
        instance.add_container("r2");
        instance.roots.push("r2".to_string());
        let violations = validate_model(&instance);
        assert!(violations.iter().any(|v| matches!(v, AxiomViolation::RootCount { found: 2 })));
    }

    #[test]
    fn duplicate_slot_key_is_reported() {
        let mut instance = FxInstance::new("urn:test", "r");
        instance.add_value_slot("r", SlotKey::Number(1), LiteralValue::string("a"));
        instance.add_child_slot("r", SlotKey::Number(1), "c");
        let violations = validate_model(&instance);
        assert!(violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::DuplicateSlotHolding { .. })));
    }

    #[test]
    fn orphan_and_unreachable_containers_are_reported() {
        let mut instance = FxInstance::new("urn:test", "r");
        instance.add_container("island");
        let violations = validate_model(&instance);
        assert!(violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::OrphanContainer { container } if container == "island")));
        assert!(violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::UnreachableContainer { container } if container == "island")));
    }

    #[test]
    fn containment_cycle_is_reported() {
        let mut instance = FxInstance::new("urn:test", "r");
        instance.add_child_slot("r", SlotKey::Number(1), "a");
        instance.add_child_slot("a", SlotKey::Number(1), "b");
        instance.add_child_slot("b", SlotKey::Number(1), "a");
        let violations = validate_model(&instance);
        assert!(violations.iter().any(|v| matches!(v, AxiomViolation::ContainmentCycle { .. })));
    }

    #[test]
    fn root_in_a_slot_is_reported() {
        let mut instance = FxInstance::new("urn:test", "r");
        instance.add_container("c");
        // Make c reachable oddly: r holds c, c holds r.
        instance.add_child_slot("r", SlotKey::Number(1), "c");
        instance.add_child_slot("c", SlotKey::Number(1), "r");
        let violations = validate_model(&instance);
        assert!(violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::RootHeldBySlot { root } if root == "r")));
    }
}
