//! Node-to-role assignments over a BGP.

use crate::predicate::FxPredicate;
use crate::term::PatternNode;
use std::collections::BTreeMap;
use std::fmt;

/// A total map from BGP nodes to Façade-X roles.
///
/// Annotations produced by the annotator cover exactly the nodes of the BGP
/// they were derived from. An annotation whose every value is ground is a
/// solution pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Annotation {
    entries: BTreeMap<PatternNode, FxPredicate>,
}

impl Annotation {
    pub fn new() -> Self {
        Annotation { entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, node: PatternNode, predicate: FxPredicate) {
        self.entries.insert(node, predicate);
    }

    pub fn get(&self, node: &PatternNode) -> Option<FxPredicate> {
        self.entries.get(node).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PatternNode, FxPredicate)> {
        self.entries.iter().map(|(n, p)| (n, *p))
    }

    /// True when every assigned role is a ground predicate.
    pub fn is_ground(&self) -> bool {
        self.entries.values().all(|p| p.is_ground())
    }
}

impl FromIterator<(PatternNode, FxPredicate)> for Annotation {
    fn from_iter<T: IntoIterator<Item = (PatternNode, FxPredicate)>>(iter: T) -> Self {
        Annotation { entries: iter.into_iter().collect() }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "{{")?;
        for (node, pred) in &self.entries {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{node} -> {pred}")?;
            first = false;
        }
        write!(f, "}}")
    }
}
