//! Mapping Façade-X instances to RDF quads and back.
//!
//! One quad is emitted per mapping-rule instance: root typing, container
//! typing, container-to-container slots, and container-to-value slots.
//! Number slots become `rdf:_n` properties, name slots and types become
//! IRIs in the data namespace. The quad set is returned in a canonical
//! order so serialized output is byte-stable.

use super::model::{FxInstance, Holding, LiteralValue, SlotKey, TypeName};
use crate::term::{classify_iri, escape_literal, WellKnown, FX_ROOT, RDF_NS, RDF_TYPE, XYZ_NS};
use std::collections::BTreeMap;
use std::fmt;

/// An RDF term as it appears in a materialized graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal { lexical: String, datatype: Option<String> },
}

impl Term {
    pub fn literal(value: &LiteralValue) -> Term {
        Term::Literal { lexical: value.lexical.clone(), datatype: value.datatype.clone() }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    /// N-Triples form.
    pub fn render(&self) -> String {
        match self {
            Term::Iri(iri) => format!("<{iri}>"),
            Term::Blank(label) => format!("_:{label}"),
            Term::Literal { lexical, datatype } => match datatype {
                Some(dt) => format!("\"{}\"^^<{dt}>", escape_literal(lexical)),
                None => format!("\"{}\"", escape_literal(lexical)),
            },
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// One materialized quad; the graph component names the data source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FxQuad {
    pub graph: String,
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

impl FxQuad {
    pub fn render(&self) -> String {
        format!(
            "{} <{}> {} <{}> .",
            self.subject.render(),
            self.predicate,
            self.object.render(),
            self.graph
        )
    }
}

/// Whether container entities materialize as blank nodes or IRIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityMode {
    BlankNodes,
    Iris,
}

/// Percent-encodes a slot or type name for use inside an IRI.
fn encode_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for byte in name.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => {
                out.push(byte as char)
            }
            _ => out.push_str(&format!("%{byte:02X}")),
        }
    }
    out
}

fn decode_name(encoded: &str) -> String {
    let bytes = encoded.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() + 1 && i + 2 < bytes.len() {
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

fn slot_predicate(key: &SlotKey) -> String {
    match key {
        SlotKey::Number(n) => format!("{RDF_NS}_{n}"),
        SlotKey::Name(name) => format!("{XYZ_NS}{}", encode_name(name)),
    }
}

fn type_iri(name: &TypeName) -> String {
    match name {
        TypeName::Local(local) => format!("{XYZ_NS}{}", encode_name(local)),
        TypeName::Iri(iri) => iri.clone(),
    }
}

/// Maps a valid instance to its RDF quad set.
///
/// Blank-node labels are assigned deterministically from the container ids
/// in sorted order, so equal instances materialize to byte-equal quad sets.
/// Containers carrying an entity override always materialize as that IRI.
pub fn materialize(instance: &FxInstance, mode: EntityMode) -> Vec<FxQuad> {
    let entity: BTreeMap<&str, Term> = instance
        .containers
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let term = if let Some(iri) = instance.entity_overrides.get(id) {
                Term::Iri(iri.clone())
            } else {
                match mode {
                    EntityMode::BlankNodes => Term::Blank(format!("b{i}")),
                    EntityMode::Iris => {
                        Term::Iri(format!("{}#{}", instance.source_iri, encode_name(id)))
                    }
                }
            };
            (id.as_str(), term)
        })
        .collect();

    let mut quads = Vec::new();
    let graph = instance.source_iri.clone();

    for root in &instance.roots {
        quads.push(FxQuad {
            graph: graph.clone(),
            subject: entity[root.as_str()].clone(),
            predicate: RDF_TYPE.to_string(),
            object: Term::Iri(FX_ROOT.to_string()),
        });
    }
    for slot in &instance.slots {
        let object = match &slot.holding {
            Holding::Child(child) => entity[child.as_str()].clone(),
            Holding::Value(value) => Term::literal(value),
        };
        quads.push(FxQuad {
            graph: graph.clone(),
            subject: entity[slot.owner.as_str()].clone(),
            predicate: slot_predicate(&slot.key),
            object,
        });
    }
    for (owner, name) in &instance.types {
        quads.push(FxQuad {
            graph: graph.clone(),
            subject: entity[owner.as_str()].clone(),
            predicate: RDF_TYPE.to_string(),
            object: Term::Iri(type_iri(name)),
        });
    }

    quads.sort_by(|a, b| {
        (&a.graph, a.subject.render(), &a.predicate, a.object.render()).cmp(&(
            &b.graph,
            b.subject.render(),
            &b.predicate,
            b.object.render(),
        ))
    });
    quads.dedup();
    quads
}

/// Canonical N-Quads rendering: one line per quad, ordered by graph, then
/// subject, predicate, and object.
pub fn to_nquads(quads: &[FxQuad]) -> String {
    let mut sorted: Vec<&FxQuad> = quads.iter().collect();
    sorted.sort_by_key(|q| {
        (q.graph.clone(), q.subject.render(), q.predicate.clone(), q.object.render())
    });
    sorted.dedup();
    let mut out = String::new();
    for quad in sorted {
        out.push_str(&quad.render());
        out.push('\n');
    }
    out
}

/// Default-graph view: the union of all graphs as sorted N-Triples.
pub fn to_ntriples(quads: &[FxQuad]) -> String {
    let mut lines: Vec<String> = quads
        .iter()
        .map(|q| format!("{} <{}> {} .", q.subject.render(), q.predicate, q.object.render()))
        .collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Line-based N-Quads/N-Triples reader for golden files and the oracle CLI.
/// Triples without a graph component land in `urn:default`.
pub fn parse_nquads(text: &str) -> Result<Vec<FxQuad>, String> {
    let mut quads = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut terms = Vec::new();
        let mut rest = line;
        loop {
            rest = rest.trim_start();
            if rest.starts_with('.') {
                break;
            }
            let (term, tail) = parse_term(rest).map_err(|e| format!("line {}: {e}", number + 1))?;
            terms.push(term);
            rest = tail;
        }
        let (graph, s, p, o) = match terms.len() {
            3 => (Term::Iri("urn:default".to_string()), terms.remove(0), terms.remove(0), terms.remove(0)),
            4 => {
                let g = terms.pop().unwrap();
                (g, terms.remove(0), terms.remove(0), terms.remove(0))
            }
            n => return Err(format!("line {}: expected 3 or 4 terms, found {n}", number + 1)),
        };
        let graph = match graph {
            Term::Iri(iri) => iri,
            other => return Err(format!("line {}: graph {other} is not an IRI", number + 1)),
        };
        let predicate = match p {
            Term::Iri(iri) => iri,
            other => return Err(format!("line {}: predicate {other} is not an IRI", number + 1)),
        };
        quads.push(FxQuad { graph, subject: s, predicate, object: o });
    }
    Ok(quads)
}

fn parse_term(input: &str) -> Result<(Term, &str), String> {
    if let Some(rest) = input.strip_prefix('<') {
        let end = rest.find('>').ok_or("unterminated IRI")?;
        return Ok((Term::Iri(rest[..end].to_string()), &rest[end + 1..]));
    }
    if let Some(rest) = input.strip_prefix("_:") {
        let end = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(rest.len());
        return Ok((Term::Blank(rest[..end].to_string()), &rest[end..]));
    }
    if let Some(rest) = input.strip_prefix('"') {
        let mut lexical = String::new();
        let mut chars = rest.char_indices();
        let mut end = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => match chars.next() {
                    Some((_, 'n')) => lexical.push('\n'),
                    Some((_, 't')) => lexical.push('\t'),
                    Some((_, 'r')) => lexical.push('\r'),
                    Some((_, '"')) => lexical.push('"'),
                    Some((_, '\\')) => lexical.push('\\'),
                    _ => return Err("bad escape".to_string()),
                },
                '"' => {
                    end = Some(i);
                    break;
                }
                c => lexical.push(c),
            }
        }
        let end = end.ok_or("unterminated literal")?;
        let mut tail = &rest[end + 1..];
        let mut datatype = None;
        if let Some(dt_rest) = tail.strip_prefix("^^<") {
            let dt_end = dt_rest.find('>').ok_or("unterminated datatype")?;
            datatype = Some(dt_rest[..dt_end].to_string());
            tail = &dt_rest[dt_end + 1..];
        }
        return Ok((Term::Literal { lexical, datatype }, tail));
    }
    Err(format!("unrecognised term at '{}'", input.chars().take(20).collect::<String>()))
}

/// Inverts the mapping: reconstructs a model instance from a quad set by
/// recognising the shape of each quad. Returns an error when a quad fits no
/// mapping-rule shape.
pub fn from_quads(quads: &[FxQuad]) -> Result<FxInstance, String> {
    let graph = quads
        .first()
        .map(|q| q.graph.clone())
        .unwrap_or_else(|| "urn:empty".to_string());

    let mut instance = FxInstance {
        source_iri: graph,
        roots: Vec::new(),
        containers: Default::default(),
        slots: Vec::new(),
        types: Vec::new(),
        entity_overrides: BTreeMap::new(),
    };

    let term_id = |term: &Term| term.render();

    for quad in quads {
        instance.containers.insert(term_id(&quad.subject));
        match classify_iri(&quad.predicate) {
            WellKnown::RdfType => match &quad.object {
                Term::Iri(iri) if iri == FX_ROOT => {
                    instance.roots.push(term_id(&quad.subject));
                }
                Term::Iri(iri) => {
                    let name = match iri.strip_prefix(XYZ_NS) {
                        Some(local) => TypeName::Local(decode_name(local)),
                        None => TypeName::Iri(iri.clone()),
                    };
                    instance.types.push((term_id(&quad.subject), name));
                }
                other => return Err(format!("rdf:type object {other} fits no mapping rule")),
            },
            WellKnown::ContainerMembershipProperty(n) => match &quad.object {
                Term::Literal { lexical, datatype } => {
                    instance.slots.push(super::model::Slot {
                        owner: term_id(&quad.subject),
                        key: SlotKey::Number(n),
                        holding: Holding::Value(LiteralValue {
                            lexical: lexical.clone(),
                            datatype: datatype.clone(),
                        }),
                    });
                }
                child => {
                    let child_id = term_id(child);
                    instance.containers.insert(child_id.clone());
                    instance.slots.push(super::model::Slot {
                        owner: term_id(&quad.subject),
                        key: SlotKey::Number(n),
                        holding: Holding::Child(child_id),
                    });
                }
            },
            _ if quad.predicate.starts_with(XYZ_NS) => {
                let name = decode_name(quad.predicate.strip_prefix(XYZ_NS).unwrap());
                match &quad.object {
                    Term::Literal { lexical, datatype } => {
                        instance.slots.push(super::model::Slot {
                            owner: term_id(&quad.subject),
                            key: SlotKey::Name(name),
                            holding: Holding::Value(LiteralValue {
                                lexical: lexical.clone(),
                                datatype: datatype.clone(),
                            }),
                        });
                    }
                    child => {
                        let child_id = term_id(child);
                        instance.containers.insert(child_id.clone());
                        instance.slots.push(super::model::Slot {
                            owner: term_id(&quad.subject),
                            key: SlotKey::Name(name),
                            holding: Holding::Child(child_id),
                        });
                    }
                }
            }
            _ => {
                return Err(format!(
                    "predicate <{}> fits no mapping rule",
                    quad.predicate
                ))
            }
        }
    }
    Ok(instance)
}

/// Structural equality of instances up to container renaming: compares the
/// recursive slot/type signature from the root down.
pub fn instances_isomorphic(a: &FxInstance, b: &FxInstance) -> bool {
    if a.roots.len() != 1 || b.roots.len() != 1 {
        return false;
    }
    container_signature(a, a.root(), 0) == container_signature(b, b.root(), 0)
}

fn container_signature(instance: &FxInstance, id: &str, depth: usize) -> String {
    if depth > instance.containers.len() + 1 {
        return "cycle".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    for slot in instance.slots.iter().filter(|s| s.owner == id) {
        let part = match &slot.holding {
            Holding::Value(v) => format!("{}={}", slot.key, Term::literal(v).render()),
            Holding::Child(child) => {
                format!("{}=>{}", slot.key, container_signature(instance, child, depth + 1))
            }
        };
        parts.push(part);
    }
    let mut types: Vec<String> = instance
        .types
        .iter()
        .filter(|(owner, _)| owner == id)
        .map(|(_, t)| type_iri(t))
        .collect();
    types.sort();
    parts.sort();
    format!("[{}|{}]", types.join(","), parts.join(","))
}
