//! The Façade-X role hierarchy used to annotate BGP nodes.
//!
//! Roles form a small specialisation lattice rooted at the three triple
//! positions (Subject, Property, Object). The seven roles that cannot be
//! specialised further are the *ground* predicates; a node annotation is a
//! solution pattern only when every node carries a ground predicate.

use std::fmt;

/// A role in the Façade-X predicate hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FxPredicate {
    Subject,
    Property,
    Object,
    TypeProperty,
    Type,
    Container,
    Slot,
    Value,
    FxRoot,
    SlotNumber,
    SlotString,
}

pub const ALL_PREDICATES: [FxPredicate; 11] = [
    FxPredicate::Subject,
    FxPredicate::Property,
    FxPredicate::Object,
    FxPredicate::TypeProperty,
    FxPredicate::Type,
    FxPredicate::Container,
    FxPredicate::Slot,
    FxPredicate::Value,
    FxPredicate::FxRoot,
    FxPredicate::SlotNumber,
    FxPredicate::SlotString,
];

/// Ground predicates in canonical enumeration order. Fixing this order makes
/// every generated solution sequence and tested-count reproducible.
pub const GROUND_PREDICATES: [FxPredicate; 7] = [
    FxPredicate::Container,
    FxPredicate::TypeProperty,
    FxPredicate::SlotString,
    FxPredicate::SlotNumber,
    FxPredicate::Type,
    FxPredicate::Value,
    FxPredicate::FxRoot,
];

/// The three position roles at the top of the hierarchy.
pub const TOP_PREDICATES: [FxPredicate; 3] =
    [FxPredicate::Subject, FxPredicate::Property, FxPredicate::Object];

/// Direct specialisation pairs (child, parent), in fixed table order.
/// Children are listed here in the order the top-down search expands them.
pub const SPECIALISATIONS: [(FxPredicate, FxPredicate); 9] = [
    (FxPredicate::Container, FxPredicate::Subject),
    (FxPredicate::Container, FxPredicate::Object),
    (FxPredicate::TypeProperty, FxPredicate::Property),
    (FxPredicate::Slot, FxPredicate::Property),
    (FxPredicate::SlotString, FxPredicate::Slot),
    (FxPredicate::SlotNumber, FxPredicate::Slot),
    (FxPredicate::Type, FxPredicate::Object),
    (FxPredicate::Value, FxPredicate::Object),
    (FxPredicate::FxRoot, FxPredicate::Object),
];

impl FxPredicate {
    /// True for the seven roles that cannot be specialised further.
    pub fn is_ground(self) -> bool {
        GROUND_PREDICATES.contains(&self)
    }

    /// Direct parents in the hierarchy.
    pub fn specialises(self) -> &'static [FxPredicate] {
        use FxPredicate::*;
        match self {
            Subject | Property | Object => &[],
            TypeProperty => &[Property],
            Type => &[Object],
            Container => &[Subject, Object],
            Slot => &[Property],
            Value => &[Object],
            FxRoot => &[Object],
            SlotNumber => &[Slot],
            SlotString => &[Slot],
        }
    }

    /// Declared disjointness sets. These are the raw table entries; use
    /// [`disjoint_with`] for the closure under specialisation.
    pub fn declared_disjoint(self) -> &'static [FxPredicate] {
        use FxPredicate::*;
        match self {
            Subject => &[Property],
            Property => &[Subject, Object],
            Object => &[Property],
            TypeProperty => &[Subject, Object, Slot, Type, Container],
            Type => &[Slot, Container, Value, FxRoot],
            Container => &[Property, Slot, Value, Type, FxRoot],
            Slot => &[Subject, Object, TypeProperty],
            Value => &[Property, Subject, Type, Container, FxRoot, Slot],
            FxRoot => &[Subject, Property, Container, Value, Type],
            SlotNumber => &[SlotString, Subject, Object],
            SlotString => &[SlotNumber, Subject, Object],
        }
    }

    /// Direct children in expansion order.
    pub fn children(self) -> Vec<FxPredicate> {
        SPECIALISATIONS
            .iter()
            .filter(|(_, parent)| *parent == self)
            .map(|(child, _)| *child)
            .collect()
    }

    /// The predicate together with all its ancestors.
    pub fn ancestors(self) -> Vec<FxPredicate> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            for &p in out[i].specialises() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            i += 1;
        }
        out
    }

    /// Top predicates (position roles) reached by transitive specialisation.
    /// Container reaches both Subject and Object; every other ground
    /// predicate reaches exactly one top.
    pub fn tops(self) -> Vec<FxPredicate> {
        let mut tops: Vec<FxPredicate> = self
            .ancestors()
            .into_iter()
            .filter(|p| p.specialises().is_empty())
            .collect();
        tops.sort();
        tops
    }

    /// True when `self` specialises `other` (reflexively).
    pub fn is_a(self, other: FxPredicate) -> bool {
        self.ancestors().contains(&other)
    }
}

/// Disjointness closed under specialisation: two roles are incompatible when
/// any ancestor of one is declared disjoint with any ancestor of the other.
/// The closure is what makes e.g. SlotNumber incompatible with TypeProperty
/// (via Slot) even though the declared table never pairs them directly.
pub fn disjoint_with(a: FxPredicate, b: FxPredicate) -> bool {
    for pa in a.ancestors() {
        for pb in b.ancestors() {
            if pa.declared_disjoint().contains(&pb) || pb.declared_disjoint().contains(&pa) {
                return true;
            }
        }
    }
    false
}

impl fmt::Display for FxPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FxPredicate::Subject => "Subject",
            FxPredicate::Property => "Property",
            FxPredicate::Object => "Object",
            FxPredicate::TypeProperty => "TypeProperty",
            FxPredicate::Type => "Type",
            FxPredicate::Container => "Container",
            FxPredicate::Slot => "Slot",
            FxPredicate::Value => "Value",
            FxPredicate::FxRoot => "FXRoot",
            FxPredicate::SlotNumber => "SlotNumber",
            FxPredicate::SlotString => "SlotString",
        };
        f.write_str(name)
    }
}
