//! BGP syntax objects: pattern nodes, triple patterns, and basic graph patterns.
//!
//! Blank nodes are kept distinct from variables for reporting purposes but
//! behave exactly like variables everywhere in the satisfiability logic
//! (see [`PatternNode::is_binding`]).

use std::fmt;

/// The RDF namespace.
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
/// `rdf:type`.
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
/// The Façade-X model namespace (`fx:`).
pub const FX_NS: &str = "http://sparql.xyz/facade-x/ns/";
/// `fx:root`, the marker object for root containers.
pub const FX_ROOT: &str = "http://sparql.xyz/facade-x/ns/root";
/// The Façade-X data namespace (`xyz:`), used for string slots and types.
pub const XYZ_NS: &str = "http://sparql.xyz/facade-x/data/";
/// The XML Schema datatype namespace (`xsd:`).
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

/// Syntactic category of a [`PatternNode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Variable,
    Iri,
    BlankNode,
    Literal,
}

/// One node of a triple pattern: a variable, IRI, blank node, or literal.
///
/// Equality is structural over kind, label, and literal datatype. A variable
/// `?x` and a blank node `_:x` are distinct nodes even though both bind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternNode {
    pub kind: NodeKind,
    /// Variable name, IRI string, blank-node id, or literal lexical form.
    pub label: String,
    /// Datatype IRI, present only on typed literals.
    pub datatype: Option<String>,
}

impl PatternNode {
    pub fn variable(name: impl Into<String>) -> Self {
        let label = name.into();
        assert!(!label.is_empty(), "variable name must be non-empty");
        PatternNode { kind: NodeKind::Variable, label, datatype: None }
    }

    pub fn iri(iri: impl Into<String>) -> Self {
        let label = iri.into();
        assert!(!label.is_empty(), "IRI must be non-empty");
        PatternNode { kind: NodeKind::Iri, label, datatype: None }
    }

    pub fn blank(id: impl Into<String>) -> Self {
        let label = id.into();
        assert!(!label.is_empty(), "blank node id must be non-empty");
        PatternNode { kind: NodeKind::BlankNode, label, datatype: None }
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        PatternNode { kind: NodeKind::Literal, label: lexical.into(), datatype: None }
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        PatternNode {
            kind: NodeKind::Literal,
            label: lexical.into(),
            datatype: Some(datatype.into()),
        }
    }

    /// True for variables and blank nodes, which act as existential
    /// qualifiers and may bind any RDF term.
    pub fn is_binding(&self) -> bool {
        matches!(self.kind, NodeKind::Variable | NodeKind::BlankNode)
    }

    /// True for IRIs and literals.
    pub fn is_constant(&self) -> bool {
        !self.is_binding()
    }

    pub fn is_iri(&self, iri: &str) -> bool {
        self.kind == NodeKind::Iri && self.label == iri
    }
}

impl fmt::Display for PatternNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NodeKind::Variable => write!(f, "?{}", self.label),
            NodeKind::BlankNode => write!(f, "_:{}", self.label),
            NodeKind::Iri => write!(f, "<{}>", self.label),
            NodeKind::Literal => {
                write!(f, "\"{}\"", escape_literal(&self.label))?;
                if let Some(dt) = &self.datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// A subject/predicate/object triple of pattern nodes.
///
/// Construction does not revalidate position constraints; the parser rejects
/// literal subjects and non-IRI/non-binding predicates before building one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternNode,
    pub predicate: PatternNode,
    pub object: PatternNode,
}

impl TriplePattern {
    pub fn new(subject: PatternNode, predicate: PatternNode, object: PatternNode) -> Self {
        debug_assert!(subject.kind != NodeKind::Literal, "literal subject");
        debug_assert!(
            predicate.kind != NodeKind::Literal && predicate.kind != NodeKind::BlankNode,
            "invalid predicate kind"
        );
        TriplePattern { subject, predicate, object }
    }

    pub fn nodes(&self) -> [&PatternNode; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A basic graph pattern: an ordered sequence of triple patterns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bgp {
    pub triples: Vec<TriplePattern>,
    /// Provenance, e.g. the file the pattern was read from.
    pub source_label: Option<String>,
}

impl Bgp {
    pub fn new(triples: Vec<TriplePattern>) -> Self {
        Bgp { triples, source_label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = Some(label.into());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    /// Distinct nodes in first-occurrence order (subject, predicate, object
    /// within each triple).
    pub fn nodes(&self) -> Vec<&PatternNode> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for t in &self.triples {
            for n in t.nodes() {
                if seen.insert(n) {
                    out.push(n);
                }
            }
        }
        out
    }
}

impl fmt::Display for Bgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.triples {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Outcome of classifying an IRI against the reserved vocabularies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellKnown {
    /// `rdf:type`.
    RdfType,
    /// `fx:root`.
    FxRoot,
    /// `rdf:_n` with n >= 1 and no leading zeros.
    ContainerMembershipProperty(u64),
    /// Any other IRI in the `fx:` namespace (engine configuration).
    FxConfigNamespace,
    Other,
}

/// Classifies an IRI string against the reserved RDF and Façade-X vocabulary.
///
/// `rdf:_0` and `rdf:_01` are *not* container membership properties: the
/// index must be a positive decimal integer without leading zeros.
pub fn classify_iri(iri: &str) -> WellKnown {
    if iri == RDF_TYPE {
        return WellKnown::RdfType;
    }
    if iri == FX_ROOT {
        return WellKnown::FxRoot;
    }
    if let Some(rest) = iri.strip_prefix(RDF_NS) {
        if let Some(digits) = rest.strip_prefix('_') {
            if !digits.is_empty()
                && !digits.starts_with('0')
                && digits.bytes().all(|b| b.is_ascii_digit())
            {
                if let Ok(n) = digits.parse::<u64>() {
                    return WellKnown::ContainerMembershipProperty(n);
                }
            }
        }
        return WellKnown::Other;
    }
    if iri.starts_with(FX_NS) {
        return WellKnown::FxConfigNamespace;
    }
    WellKnown::Other
}

/// Classifies a node; non-IRI nodes are always [`WellKnown::Other`].
pub fn classify_well_known(node: &PatternNode) -> WellKnown {
    if node.kind == NodeKind::Iri {
        classify_iri(&node.label)
    } else {
        WellKnown::Other
    }
}

/// Node comparison used by path compatibility checks and pattern matching:
/// a binding node matches anything; constants match only themselves.
pub fn match_nodes(left: &PatternNode, right: &PatternNode) -> bool {
    if left.is_binding() || right.is_binding() {
        return true;
    }
    left == right
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_reserved_iris() {
        assert_eq!(
            classify_iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#_1"),
            WellKnown::ContainerMembershipProperty(1)
        );
        assert_eq!(
            classify_iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#_42"),
            WellKnown::ContainerMembershipProperty(42)
        );
        assert_eq!(classify_iri(FX_ROOT), WellKnown::FxRoot);
        assert_eq!(classify_iri(RDF_TYPE), WellKnown::RdfType);
        assert_eq!(classify_iri("http://example.org/p"), WellKnown::Other);
        assert_eq!(
            classify_iri("http://sparql.xyz/facade-x/ns/csv.headers"),
            WellKnown::FxConfigNamespace
        );
    }

    #[test]
    fn membership_index_must_be_positive_without_leading_zeros() {
        assert_eq!(
            classify_iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#_0"),
            WellKnown::Other
        );
        assert_eq!(
            classify_iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#_01"),
            WellKnown::Other
        );
        assert_eq!(
            classify_iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#_1a"),
            WellKnown::Other
        );
        assert_eq!(
            classify_iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#value"),
            WellKnown::Other
        );
    }

    #[test]
    fn fx_root_is_not_configuration() {
        assert_eq!(classify_iri(FX_ROOT), WellKnown::FxRoot);
        assert_eq!(
            classify_iri("http://sparql.xyz/facade-x/ns/rooted"),
            WellKnown::FxConfigNamespace
        );
    }

    #[test]
    fn match_nodes_table() {
        let var = PatternNode::variable("x");
        let iri1 = PatternNode::iri("http://ex/i1");
        let iri2 = PatternNode::iri("http://ex/i2");
        let lit = PatternNode::literal("a");

        assert!(match_nodes(&var, &iri1));
        assert!(match_nodes(&var, &lit));
        assert!(match_nodes(&var, &var));
        assert!(match_nodes(&iri1, &iri1));
        assert!(!match_nodes(&iri1, &iri2));
        assert!(!match_nodes(&iri1, &lit));
        assert!(match_nodes(&lit, &PatternNode::literal("a")));
        assert!(!match_nodes(&lit, &PatternNode::literal("b")));
        // Blank nodes behave as variables.
        assert!(match_nodes(&PatternNode::blank("b"), &iri1));
    }

    #[test]
    fn match_nodes_is_symmetric() {
        let pool = [
            PatternNode::variable("x"),
            PatternNode::blank("b"),
            PatternNode::iri("http://ex/i"),
            PatternNode::literal("a"),
            PatternNode::typed_literal("5", format!("{XSD_NS}integer")),
        ];
        for a in &pool {
            for b in &pool {
                assert_eq!(match_nodes(a, b), match_nodes(b, a));
            }
        }
    }

    #[test]
    fn literal_equality_includes_datatype() {
        let plain = PatternNode::literal("5");
        let typed = PatternNode::typed_literal("5", format!("{XSD_NS}integer"));
        assert_ne!(plain, typed);
        assert!(!match_nodes(&plain, &typed));
    }

    #[test]
    fn core_types_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<PatternNode>();
        assert_send_sync::<TriplePattern>();
        assert_send_sync::<Bgp>();
        assert_send_sync::<crate::predicate::FxPredicate>();
        assert_send_sync::<crate::annotation::Annotation>();
    }

    #[test]
    fn bgp_nodes_deduplicate_in_first_occurrence_order() {
        let s = PatternNode::variable("s");
        let p = PatternNode::variable("p");
        let o = PatternNode::variable("o");
        let bgp = Bgp::new(vec![
            TriplePattern::new(s.clone(), p.clone(), o.clone()),
            TriplePattern::new(o.clone(), p.clone(), s.clone()),
        ]);
        let nodes = bgp.nodes();
        assert_eq!(nodes, vec![&s, &p, &o]);
    }
}
