//! Seeded generators for test inputs: random BGPs over the Façade-X
//! vocabulary and a deterministic corpus of CSV/JSON/XML files.
//!
//! Constant properties are drawn from the vocabulary an actual Façade-X
//! graph can contain (rdf:type, membership properties, data-namespace
//! names); subjects and objects may also be arbitrary entity IRIs and
//! literals. Everything is reproducible from the seed.

use crate::oracle::facadify::DataFormat;
use crate::term::{Bgp, PatternNode, TriplePattern, RDF_NS, RDF_TYPE, XSD_NS, XYZ_NS};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subject_node(rng: &mut ChaCha8Rng) -> PatternNode {
    match rng.random_range(0..10) {
        0 => PatternNode::blank(format!("b{}", rng.random_range(0..2))),
        1 | 2 => PatternNode::iri(format!("http://example.org/e{}", rng.random_range(1..4))),
        _ => PatternNode::variable(format!("v{}", rng.random_range(0..6))),
    }
}

fn predicate_node(rng: &mut ChaCha8Rng) -> PatternNode {
    match rng.random_range(0..10) {
        0 => PatternNode::iri(RDF_TYPE),
        1 | 2 => PatternNode::iri(format!("{RDF_NS}_{}", rng.random_range(1..4))),
        3 | 4 => PatternNode::iri(format!("{XYZ_NS}k{}", rng.random_range(0..3))),
        _ => PatternNode::variable(format!("p{}", rng.random_range(0..6))),
    }
}

fn object_node(rng: &mut ChaCha8Rng) -> PatternNode {
    match rng.random_range(0..12) {
        0 => PatternNode::literal(["a", "b", "x y"][rng.random_range(0..3)]),
        1 => PatternNode::typed_literal(
            rng.random_range(0..5).to_string(),
            format!("{XSD_NS}integer"),
        ),
        2 => PatternNode::iri(format!("http://example.org/e{}", rng.random_range(1..4))),
        3 => PatternNode::iri(crate::term::FX_ROOT),
        4 => PatternNode::iri(format!("{XYZ_NS}T{}", rng.random_range(0..2))),
        5 => PatternNode::blank(format!("b{}", rng.random_range(0..2))),
        _ => PatternNode::variable(format!("v{}", rng.random_range(0..6))),
    }
}

/// A random BGP of up to `max_triples` triples over a small node pool, so
/// joins of every shape arise with useful frequency.
pub fn random_bgp(rng: &mut ChaCha8Rng, max_triples: usize) -> Bgp {
    let len = rng.random_range(1..=max_triples.max(1));
    let triples = (0..len)
        .map(|_| TriplePattern {
            subject: subject_node(rng),
            predicate: predicate_node(rng),
            object: object_node(rng),
        })
        .collect();
    Bgp::new(triples)
}

/// One generated corpus file.
#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub name: String,
    pub format: DataFormat,
    pub bytes: Vec<u8>,
}

/// A deterministic corpus cycling through the three formats, including the
/// degenerate shapes (single cell, empty array, empty element).
pub fn corpus(seed: u64, count: usize) -> Vec<CorpusFile> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| match i % 3 {
            0 => CorpusFile {
                name: format!("corpus_{i:02}.csv"),
                format: DataFormat::Csv,
                bytes: random_csv(&mut rng, i),
            },
            1 => CorpusFile {
                name: format!("corpus_{i:02}.json"),
                format: DataFormat::Json,
                bytes: random_json(&mut rng, i),
            },
            _ => CorpusFile {
                name: format!("corpus_{i:02}.xml"),
                format: DataFormat::Xml,
                bytes: random_xml(&mut rng, i),
            },
        })
        .collect()
}

const WORDS: [&str; 8] = ["alpha", "beta", "x y", "100%", "", "Grey", "name,with,commas", "\"q\""];

fn random_csv(rng: &mut ChaCha8Rng, index: usize) -> Vec<u8> {
    if index == 0 {
        return b"x".to_vec();
    }
    let rows = rng.random_range(1..=8);
    let cols = rng.random_range(1..=5);
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    for _ in 0..rows {
        let record: Vec<&str> =
            (0..cols).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
        writer.write_record(&record).unwrap();
    }
    writer.into_inner().unwrap()
}

fn random_json_value(rng: &mut ChaCha8Rng, depth: usize) -> serde_json::Value {
    use serde_json::Value;
    let leafy = depth >= 3 || rng.random_range(0..4) == 0;
    if leafy {
        match rng.random_range(0..5) {
            0 => Value::from(rng.random_range(-5..100)),
            1 => Value::from(rng.random_range(0..100) as f64 / 4.0),
            2 => Value::from(WORDS[rng.random_range(0..WORDS.len())]),
            3 => Value::Bool(rng.random()),
            _ => Value::Null,
        }
    } else if rng.random() {
        let members = rng.random_range(0..4);
        let mut map = serde_json::Map::new();
        for k in 0..members {
            map.insert(format!("m{k}"), random_json_value(rng, depth + 1));
        }
        Value::Object(map)
    } else {
        let elements = rng.random_range(0..4);
        Value::Array((0..elements).map(|_| random_json_value(rng, depth + 1)).collect())
    }
}

fn random_json(rng: &mut ChaCha8Rng, index: usize) -> Vec<u8> {
    if index == 1 {
        return b"[]".to_vec();
    }
    let value = if rng.random() {
        let mut map = serde_json::Map::new();
        for k in 0..rng.random_range(1..4) {
            map.insert(format!("r{k}"), random_json_value(rng, 1));
        }
        serde_json::Value::Object(map)
    } else {
        serde_json::Value::Array(
            (0..rng.random_range(1..4)).map(|_| random_json_value(rng, 1)).collect(),
        )
    };
    serde_json::to_vec_pretty(&value).unwrap()
}

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn random_xml_element(rng: &mut ChaCha8Rng, depth: usize, out: &mut String) {
    let tag = format!("t{}", rng.random_range(0..4));
    out.push('<');
    out.push_str(&tag);
    for a in 0..rng.random_range(0..3) {
        out.push_str(&format!(" a{a}=\"{}\"", escape_xml(WORDS[rng.random_range(0..WORDS.len())])));
    }
    if depth >= 3 || rng.random_range(0..4) == 0 {
        out.push_str("/>");
        return;
    }
    out.push('>');
    for _ in 0..rng.random_range(0..4) {
        if rng.random() {
            random_xml_element(rng, depth + 1, out);
        } else {
            out.push_str(&escape_xml(WORDS[rng.random_range(0..WORDS.len())].trim()));
        }
    }
    out.push_str(&format!("</{tag}>"));
}

fn random_xml(rng: &mut ChaCha8Rng, index: usize) -> Vec<u8> {
    if index == 2 {
        return b"<empty/>".to_vec();
    }
    let mut out = String::new();
    random_xml_element(rng, 0, &mut out);
    out.into_bytes()
}
