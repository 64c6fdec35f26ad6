//! Converting raw CSV/JSON/XML resources into Façade-X model instances.
//!
//! Every format maps onto the same four primitives: containers, keyed slots,
//! values, and types. CSV is read as a list of lists (the header line is
//! data, row 1); JSON objects become name-keyed slots and arrays become
//! number-keyed slots; XML elements become typed containers with attribute
//! name slots and document-order number slots for children and text.

use super::model::{FxInstance, LiteralValue, SlotKey, TypeName};
use crate::term::XSD_NS;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FacadifyError {
    #[error("CSV parse error: {0}")]
    CsvParse(String),
    #[error("JSON parse error: {0}")]
    JsonParse(String),
    #[error("JSON top-level value must be an object or array")]
    JsonScalarTopLevel,
    #[error("XML parse error: {0}")]
    XmlParse(String),
    #[error("XML document must have exactly one document element")]
    XmlDocumentElement,
    #[error("cannot determine format of '{0}': expected .csv, .json, or .xml")]
    UnknownFormat(String),
    #[error("io error reading '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
    Xml,
}

impl DataFormat {
    pub fn from_extension(path: &Path) -> Option<DataFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "json" => Some(DataFormat::Json),
            "xml" => Some(DataFormat::Xml),
            _ => None,
        }
    }
}

/// Reads a file, sniffing the format from its extension.
pub fn facadify_file(path: &Path) -> Result<FxInstance, FacadifyError> {
    let format = DataFormat::from_extension(path)
        .ok_or_else(|| FacadifyError::UnknownFormat(path.display().to_string()))?;
    facadify_file_as(path, format)
}

pub fn facadify_file_as(path: &Path, format: DataFormat) -> Result<FxInstance, FacadifyError> {
    let bytes = std::fs::read(path)
        .map_err(|source| FacadifyError::Io { path: path.display().to_string(), source })?;
    let source_iri = format!("file://{}", path.display());
    facadify_bytes(&bytes, format, &source_iri)
}

pub fn facadify_bytes(
    bytes: &[u8],
    format: DataFormat,
    source_iri: &str,
) -> Result<FxInstance, FacadifyError> {
    match format {
        DataFormat::Csv => facadify_csv(bytes, source_iri),
        DataFormat::Json => facadify_json(bytes, source_iri),
        DataFormat::Xml => facadify_xml(bytes, source_iri),
    }
}

fn child_id(parent: &str, key: &SlotKey) -> String {
    let segment = match key {
        SlotKey::Number(n) => n.to_string(),
        SlotKey::Name(name) => name.replace('%', "%25").replace('/', "%2F"),
    };
    format!("{parent}/{segment}")
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Interprets CSV as a root container of row containers, each holding its
/// cells as string values in column order. The header row is row 1.
pub fn facadify_csv(bytes: &[u8], source_iri: &str) -> Result<FxInstance, FacadifyError> {
    let mut instance = FxInstance::new(source_iri, "");
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes);
    let mut row_number = 0u64;
    for record in reader.records() {
        let record = record.map_err(|e| FacadifyError::CsvParse(e.to_string()))?;
        row_number += 1;
        let row_key = SlotKey::Number(row_number);
        let row_id = child_id("", &row_key);
        instance.add_child_slot("", row_key, row_id.clone());
        for (i, cell) in record.iter().enumerate() {
            instance.add_value_slot(
                &row_id,
                SlotKey::Number(i as u64 + 1),
                LiteralValue::string(cell),
            );
        }
    }
    Ok(instance)
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

/// Interprets a JSON document whose top level is an object or array.
/// Members and elements that are `null` contribute no slot; array positions
/// keep their original one-based indexes.
pub fn facadify_json(bytes: &[u8], source_iri: &str) -> Result<FxInstance, FacadifyError> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| FacadifyError::JsonParse(e.to_string()))?;
    if !value.is_object() && !value.is_array() {
        return Err(FacadifyError::JsonScalarTopLevel);
    }
    let mut instance = FxInstance::new(source_iri, "");
    json_container(&mut instance, "", &value);
    Ok(instance)
}

fn json_container(instance: &mut FxInstance, id: &str, value: &serde_json::Value) {
    match value {
        serde_json::Value::Object(members) => {
            for (name, member) in members {
                json_slot(instance, id, SlotKey::Name(name.clone()), member);
            }
        }
        serde_json::Value::Array(elements) => {
            for (i, element) in elements.iter().enumerate() {
                json_slot(instance, id, SlotKey::Number(i as u64 + 1), element);
            }
        }
        _ => unreachable!("containers are only built for objects and arrays"),
    }
}

fn json_slot(instance: &mut FxInstance, owner: &str, key: SlotKey, value: &serde_json::Value) {
    match value {
        serde_json::Value::Null => {}
        serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
            let id = child_id(owner, &key);
            instance.add_child_slot(owner, key, id.clone());
            json_container(instance, &id, value);
        }
        serde_json::Value::String(s) => {
            instance.add_value_slot(owner, key, LiteralValue::string(s));
        }
        serde_json::Value::Bool(b) => {
            instance.add_value_slot(
                owner,
                key,
                LiteralValue::typed(b.to_string(), format!("{XSD_NS}boolean")),
            );
        }
        serde_json::Value::Number(n) => {
            let value = if n.is_i64() || n.is_u64() {
                LiteralValue::typed(n.to_string(), format!("{XSD_NS}integer"))
            } else {
                LiteralValue::typed(n.to_string(), format!("{XSD_NS}double"))
            };
            instance.add_value_slot(owner, key, value);
        }
    }
}

// ---------------------------------------------------------------------------
// XML
// ---------------------------------------------------------------------------

/// Interprets well-formed XML with a single document element. Each element
/// becomes a container typed by its local tag name; attributes become name
/// slots; child elements and non-whitespace text chunks become number slots
/// in document order. Comments and processing instructions are ignored.
pub fn facadify_xml(bytes: &[u8], source_iri: &str) -> Result<FxInstance, FacadifyError> {
    use quick_xml::events::Event;

    let text = std::str::from_utf8(bytes)
        .map_err(|e| FacadifyError::XmlParse(e.to_string()))?;
    let mut reader = quick_xml::Reader::from_str(text);
    reader.config_mut().trim_text(false);

    let mut instance = FxInstance::new(source_iri, "");
    // Stack of (container id, next child ordinal).
    let mut stack: Vec<(String, u64)> = Vec::new();
    let mut seen_document_element = false;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| FacadifyError::XmlParse(e.to_string()))?;
        match event {
            Event::Start(ref start) | Event::Empty(ref start) => {
                let empty = matches!(event, Event::Empty(_));
                let id = if let Some((parent, ordinal)) = stack.last_mut() {
                    let key = SlotKey::Number(*ordinal);
                    *ordinal += 1;
                    let parent = parent.clone();
                    let id = child_id(&parent, &key);
                    instance.add_child_slot(&parent, key, id.clone());
                    id
                } else {
                    if seen_document_element {
                        return Err(FacadifyError::XmlDocumentElement);
                    }
                    seen_document_element = true;
                    instance.root().clone()
                };

                let name = start.name();
                let local = local_name(name.as_ref());
                instance.add_type(&id, TypeName::Local(local));

                for attr in start.attributes() {
                    let attr = attr.map_err(|e| FacadifyError::XmlParse(e.to_string()))?;
                    let attr_name = local_name(attr.key.as_ref());
                    let attr_value = attr
                        .unescape_value()
                        .map_err(|e| FacadifyError::XmlParse(e.to_string()))?;
                    instance.add_value_slot(
                        &id,
                        SlotKey::Name(attr_name),
                        LiteralValue::string(attr_value.as_ref()),
                    );
                }

                if !empty {
                    stack.push((id, 1));
                }
            }
            Event::End(_) => {
                stack.pop();
            }
            Event::Text(t) => {
                let text = t
                    .unescape()
                    .map_err(|e| FacadifyError::XmlParse(e.to_string()))?;
                if text.trim().is_empty() {
                    continue;
                }
                if let Some((parent, ordinal)) = stack.last_mut() {
                    let key = SlotKey::Number(*ordinal);
                    *ordinal += 1;
                    let parent = parent.clone();
                    instance.add_value_slot(
                        &parent,
                        key,
                        LiteralValue::string(text.as_ref().trim()),
                    );
                }
            }
            Event::CData(c) => {
                let text = String::from_utf8_lossy(c.as_ref()).to_string();
                if text.trim().is_empty() {
                    continue;
                }
                if let Some((parent, ordinal)) = stack.last_mut() {
                    let key = SlotKey::Number(*ordinal);
                    *ordinal += 1;
                    let parent = parent.clone();
                    instance.add_value_slot(&parent, key, LiteralValue::string(text.trim()));
                }
            }
            Event::Eof => break,
            // Declarations, comments, processing instructions, doctype.
            _ => {}
        }
    }
    if !seen_document_element {
        return Err(FacadifyError::XmlDocumentElement);
    }
    Ok(instance)
}

fn local_name(qualified: &[u8]) -> String {
    let s = String::from_utf8_lossy(qualified);
    match s.rsplit_once(':') {
        Some((_, local)) => local.to_string(),
        None => s.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::model::{validate_model, Holding};

    const FIGURE_CSV: &str = "email,name,surname\nlaura@example.com,Laura,Grey\ncraig@example.com,Craig,Johnson\nmary@example.com,Mary,Jenkins\njamie@example.com,Jamie,Smith\n";

    fn value_at(instance: &FxInstance, owner: &str, key: SlotKey) -> Option<LiteralValue> {
        instance.slots.iter().find_map(|s| {
            if s.owner == owner && s.key == key {
                match &s.holding {
                    Holding::Value(v) => Some(v.clone()),
                    Holding::Child(_) => None,
                }
            } else {
                None
            }
        })
    }

    #[test]
    fn csv_rows_include_the_header_as_row_one() {
        let instance = facadify_csv(FIGURE_CSV.as_bytes(), "urn:t").unwrap();
        assert!(validate_model(&instance).is_empty());
        // Root holds five row containers.
        assert_eq!(instance.slots_of(&"".to_string()).len(), 5);
        assert_eq!(
            value_at(&instance, "/2", SlotKey::Number(2)),
            Some(LiteralValue::string("Laura"))
        );
        assert_eq!(
            value_at(&instance, "/1", SlotKey::Number(3)),
            Some(LiteralValue::string("surname"))
        );
        assert!(instance.types.is_empty());
    }

    #[test]
    fn single_cell_csv() {
        let instance = facadify_csv(b"x", "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 2);
        assert_eq!(value_at(&instance, "/1", SlotKey::Number(1)), Some(LiteralValue::string("x")));
    }

    #[test]
    fn two_by_two_csv_counts() {
        let instance = facadify_csv(b"a,b\nc,d\n", "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 3);
        assert_eq!(instance.slots.len(), 6);
        assert!(validate_model(&instance).is_empty());
    }

    #[test]
    fn empty_csv_is_a_bare_root() {
        let instance = facadify_csv(b"", "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 1);
        assert!(instance.slots.is_empty());
        assert!(validate_model(&instance).is_empty());
    }

    #[test]
    fn ragged_csv_rows_are_an_error() {
        assert!(facadify_csv(b"a,b\nc\n", "urn:t").is_err());
        assert!(facadify_csv(b"a\nb,c,d\n", "urn:t").is_err());
    }

    #[test]
    fn json_object_with_array_member() {
        let instance = facadify_json(br#"{"a":1,"b":[1,2,3]}"#, "urn:t").unwrap();
        assert!(validate_model(&instance).is_empty());
        assert_eq!(
            value_at(&instance, "", SlotKey::Name("a".into())),
            Some(LiteralValue::typed("1", format!("{XSD_NS}integer")))
        );
        let array_id = "/b";
        assert_eq!(
            value_at(&instance, array_id, SlotKey::Number(3)),
            Some(LiteralValue::typed("3", format!("{XSD_NS}integer")))
        );
        assert_eq!(instance.containers.len(), 2);
    }

    #[test]
    fn empty_json_array_is_a_bare_root() {
        let instance = facadify_json(b"[]", "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 1);
        assert!(instance.slots.is_empty());
    }

    #[test]
    fn nested_json_objects_chain_containers() {
        let instance = facadify_json(br#"{"x":{"y":"z"}}"#, "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 2);
        assert_eq!(
            value_at(&instance, "/x", SlotKey::Name("y".into())),
            Some(LiteralValue::string("z"))
        );
        assert!(validate_model(&instance).is_empty());
    }

    #[test]
    fn json_scalar_top_level_is_rejected() {
        assert!(matches!(
            facadify_json(b"42", "urn:t"),
            Err(FacadifyError::JsonScalarTopLevel)
        ));
        assert!(facadify_json(b"{", "urn:t").is_err());
    }

    #[test]
    fn team_xml_example() {
        let xml = r#"<TEAM name="Chicago Bulls"><PLAYER name="Michael Jordan"/></TEAM>"#;
        let instance = facadify_xml(xml.as_bytes(), "urn:t").unwrap();
        assert!(validate_model(&instance).is_empty());
        assert!(instance
            .types
            .contains(&("".to_string(), TypeName::Local("TEAM".into()))));
        assert_eq!(
            value_at(&instance, "", SlotKey::Name("name".into())),
            Some(LiteralValue::string("Chicago Bulls"))
        );
        let player = instance
            .types
            .iter()
            .find(|(_, t)| *t == TypeName::Local("PLAYER".into()))
            .map(|(c, _)| c.clone())
            .unwrap();
        assert_eq!(
            value_at(&instance, &player, SlotKey::Name("name".into())),
            Some(LiteralValue::string("Michael Jordan"))
        );
        // The player container hangs off number slot 1 of the root.
        assert!(instance.slots.iter().any(|s| {
            s.owner.is_empty()
                && s.key == SlotKey::Number(1)
                && s.holding == Holding::Child(player.clone())
        }));
    }

    #[test]
    fn empty_element_is_a_typed_container_without_slots() {
        let instance = facadify_xml(b"<a/>", "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 1);
        assert!(instance.slots.is_empty());
        assert_eq!(instance.types, vec![("".to_string(), TypeName::Local("a".into()))]);
    }

    #[test]
    fn sibling_elements_get_consecutive_number_slots() {
        let instance = facadify_xml(b"<a><b/><b/></a>", "urn:t").unwrap();
        assert_eq!(instance.containers.len(), 3);
        let root_slots = instance.slots_of(&"".to_string());
        assert_eq!(root_slots.len(), 2);
        assert_eq!(root_slots[0].key, SlotKey::Number(1));
        assert_eq!(root_slots[1].key, SlotKey::Number(2));
        assert_eq!(instance.types.len(), 3);
        assert!(validate_model(&instance).is_empty());
    }

    #[test]
    fn mixed_text_and_elements_follow_document_order() {
        let instance = facadify_xml(b"<a>x<b/>y</a>", "urn:t").unwrap();
        assert_eq!(value_at(&instance, "", SlotKey::Number(1)), Some(LiteralValue::string("x")));
        assert!(instance
            .slots
            .iter()
            .any(|s| s.key == SlotKey::Number(2) && matches!(s.holding, Holding::Child(_))));
        assert_eq!(value_at(&instance, "", SlotKey::Number(3)), Some(LiteralValue::string("y")));
    }

    #[test]
    fn malformed_xml_is_an_error() {
        assert!(facadify_xml(b"<a><b></a>", "urn:t").is_err());
        assert!(facadify_xml(b"", "urn:t").is_err());
    }

    #[test]
    fn namespace_prefixes_are_stripped_from_type_names() {
        let instance = facadify_xml(b"<ns:a xmlns:ns=\"urn:x\"/>", "urn:t").unwrap();
        assert!(instance.types.contains(&("".to_string(), TypeName::Local("a".into()))));
    }
}
