//! Typed knowledge graph: a flat map from lowercase entry names to records.
//!
//! The on-disk form is a single JSON object. Each top-level key names an
//! entry and maps to an object with a required `"type"` and optional
//! `"description"`, `"date"`, `"location"`, `"author"` and `"events"` fields:
//!
//! ```json
//! {
//!   "1923": {"type": "date", "events": ["der sturmer", "beer hall putsch"]},
//!   "babi yar massacre": {"type": "event", "date": ["1941"], "description": "..."}
//! }
//! ```
//!
//! Fields not listed above are kept verbatim and written back by
//! [`KnowledgeGraph::to_json`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// A small closed graph shipped with the crate. Every cross-reference
/// resolves, so it validates with no errors and no warnings.
pub const SAMPLE_GRAPH: &str = include_str!("../data/sample_graph.json");

const LIST_FIELDS: [&str; 4] = ["date", "location", "author", "events"];

#[derive(Debug, Error)]
pub enum KgError {
    #[error("cannot read knowledge graph {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed knowledge graph: {0}")]
    Parse(String),
    #[error("entry {key:?} has unknown type {found:?}")]
    UnknownType { key: String, found: String },
    #[error("entry {key:?} has no type field")]
    MissingType { key: String },
}

/// The eight entry kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryType {
    Event,
    Place,
    Person,
    Date,
    Publication,
    Organization,
    Product,
    Slur,
}

impl EntryType {
    pub const ALL: [EntryType; 8] = [
        EntryType::Event,
        EntryType::Place,
        EntryType::Person,
        EntryType::Date,
        EntryType::Publication,
        EntryType::Organization,
        EntryType::Product,
        EntryType::Slur,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntryType::Event => "event",
            EntryType::Place => "place",
            EntryType::Person => "person",
            EntryType::Date => "date",
            EntryType::Publication => "publication",
            EntryType::Organization => "organization",
            EntryType::Product => "product",
            EntryType::Slur => "slur",
        }
    }

    /// Types whose description is rendered during infusion and is therefore
    /// mandatory.
    pub fn requires_description(self) -> bool {
        !matches!(self, EntryType::Date | EntryType::Place)
    }

    /// Types whose `events` list is followed during infusion.
    pub fn expands_events(self) -> bool {
        matches!(self, EntryType::Date | EntryType::Place)
    }
}

impl fmt::Display for EntryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntryType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntryType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// One knowledge graph record.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub kind: EntryType,
    pub description: Option<String>,
    pub date: Option<Vec<String>>,
    pub location: Option<Vec<String>>,
    pub author: Option<Vec<String>>,
    pub events: Option<Vec<String>>,
    /// Unrecognised fields, preserved as-is.
    pub extra: BTreeMap<String, Value>,
}

impl Entry {
    pub fn new(kind: EntryType) -> Self {
        Entry {
            kind,
            description: None,
            date: None,
            location: None,
            author: None,
            events: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn with_events<I, S>(mut self, events: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.events = Some(events.into_iter().map(Into::into).collect());
        self
    }

    /// All `(field name, referenced key)` pairs from the list fields.
    pub fn references(&self) -> impl Iterator<Item = (&'static str, &str)> {
        let lists = [
            ("date", &self.date),
            ("location", &self.location),
            ("author", &self.author),
            ("events", &self.events),
        ];
        lists.into_iter().flat_map(|(name, list)| {
            list.iter()
                .flat_map(|v| v.iter())
                .map(move |s| (name, s.as_str()))
        })
    }

    fn list_mut(&mut self, field: &str) -> &mut Option<Vec<String>> {
        match field {
            "date" => &mut self.date,
            "location" => &mut self.location,
            "author" => &mut self.author,
            "events" => &mut self.events,
            _ => unreachable!("not a list field: {field}"),
        }
    }

    fn list(&self, field: &str) -> &Option<Vec<String>> {
        match field {
            "date" => &self.date,
            "location" => &self.location,
            "author" => &self.author,
            "events" => &self.events,
            _ => unreachable!("not a list field: {field}"),
        }
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("type".into(), Value::String(self.kind.as_str().into()));
        if let Some(d) = &self.description {
            obj.insert("description".into(), Value::String(d.clone()));
        }
        for field in LIST_FIELDS {
            if let Some(items) = self.list(field) {
                obj.insert(
                    field.into(),
                    Value::Array(items.iter().cloned().map(Value::String).collect()),
                );
            }
        }
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

/// Immutable map of lowercase keys to entries. Iteration is in key order.
///
/// Equality compares entries only, not the provenance string.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entries: BTreeMap<String, Entry>,
    source: Option<String>,
}

impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entry, lowercasing the key. Intended for building graphs in
    /// code; loaded graphs are not modified afterwards.
    pub fn insert(&mut self, key: impl AsRef<str>, entry: Entry) -> Option<Entry> {
        self.entries.insert(key.as_ref().to_lowercase(), entry)
    }

    pub fn remove(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    /// Like [`get`](Self::get) but also returns the stored key, borrowed
    /// from the graph.
    pub fn get_key_value(&self, key: &str) -> Option<(&str, &Entry)> {
        self.entries
            .get_key_value(key)
            .map(|(k, v)| (k.as_str(), v))
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Where the graph was loaded from, if known.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.entries
                .iter()
                .map(|(k, e)| (k.clone(), e.to_json()))
                .collect(),
        )
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph serializes")
    }

    /// The bundled [`SAMPLE_GRAPH`].
    pub fn sample() -> Self {
        parse_graph(SAMPLE_GRAPH.as_bytes())
            .expect("bundled sample graph is well formed")
            .with_source("sample")
    }
}

/// Problems found while decoding a single entry object.
#[derive(Debug)]
enum EntryProblem {
    NotObject,
    MissingType,
    UnknownType(String),
    Malformed(String),
}

fn parse_entry(value: &Value) -> Result<Entry, EntryProblem> {
    let obj = value.as_object().ok_or(EntryProblem::NotObject)?;
    let kind = match obj.get("type") {
        None => return Err(EntryProblem::MissingType),
        Some(Value::String(s)) => s.parse::<EntryType>().map_err(EntryProblem::UnknownType)?,
        Some(other) => return Err(EntryProblem::UnknownType(other.to_string())),
    };
    let mut entry = Entry::new(kind);
    for (field, v) in obj {
        match field.as_str() {
            "type" => {}
            "description" => match v {
                Value::String(s) => entry.description = Some(s.clone()),
                _ => {
                    return Err(EntryProblem::Malformed(
                        "description must be a string".into(),
                    ))
                }
            },
            f if LIST_FIELDS.contains(&f) => {
                let items = v
                    .as_array()
                    .and_then(|arr| {
                        arr.iter()
                            .map(|x| x.as_str().map(str::to_string))
                            .collect::<Option<Vec<_>>>()
                    })
                    .ok_or_else(|| {
                        EntryProblem::Malformed(format!("{f} must be an array of strings"))
                    })?;
                *entry.list_mut(f) = Some(items);
            }
            _ => {
                entry.extra.insert(field.clone(), v.clone());
            }
        }
    }
    Ok(entry)
}

fn parse_document(bytes: &[u8]) -> Result<Map<String, Value>, KgError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| KgError::Parse(e.to_string()))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(KgError::Parse("top level must be a JSON object".into())),
    }
}

fn parse_graph(bytes: &[u8]) -> Result<KnowledgeGraph, KgError> {
    let doc = parse_document(bytes)?;
    let mut graph = KnowledgeGraph::new();
    for (key, value) in &doc {
        let entry = parse_entry(value).map_err(|p| match p {
            EntryProblem::MissingType => KgError::MissingType { key: key.clone() },
            EntryProblem::UnknownType(found) => KgError::UnknownType {
                key: key.clone(),
                found,
            },
            EntryProblem::NotObject => {
                KgError::Parse(format!("entry {key:?} is not a JSON object"))
            }
            EntryProblem::Malformed(msg) => KgError::Parse(format!("entry {key:?}: {msg}")),
        })?;
        graph.insert(key, entry);
    }
    Ok(graph)
}

/// Loads a graph from a reader.
pub fn load_graph_from_reader<R: Read>(mut reader: R) -> Result<KnowledgeGraph, KgError> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf).map_err(|e| KgError::Io {
        path: "<stream>".into(),
        source: e,
    })?;
    parse_graph(&buf)
}

/// Loads a graph file. Keys are lowercased; unknown fields are preserved.
pub fn load_graph(path: impl AsRef<Path>) -> Result<KnowledgeGraph, KgError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| KgError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(parse_graph(&bytes)?.with_source(path.display().to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FindingCode {
    UnknownType,
    MissingDescription,
    EmptyKey,
    MalformedField,
    DanglingReference,
    DuplicateAlias,
}

impl FindingCode {
    pub fn is_error(self) -> bool {
        !matches!(
            self,
            FindingCode::DanglingReference | FindingCode::DuplicateAlias
        )
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub key: String,
    pub code: FindingCode,
    pub message: String,
}

impl Finding {
    fn new(key: &str, code: FindingCode, message: impl Into<String>) -> Self {
        Finding {
            key: key.to_string(),
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn push(&mut self, finding: Finding) {
        if finding.code.is_error() {
            self.errors.push(finding);
        } else {
            self.warnings.push(finding);
        }
    }

    /// All findings, errors first.
    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.errors.iter().chain(self.warnings.iter())
    }
}

/// Checks every entry and key invariant of a loaded graph.
///
/// Errors: empty keys, keys with surrounding whitespace, empty or
/// non-lowercase list elements, and missing descriptions on types that need
/// one. Warnings: references to keys absent from the graph, and distinct
/// keys sharing a byte-identical description.
pub fn validate_graph(kg: &KnowledgeGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut first_with_description: HashMap<&str, &str> = HashMap::new();

    for (key, entry) in kg.iter() {
        if key.trim().is_empty() {
            report.push(Finding::new(key, FindingCode::EmptyKey, "key is empty"));
        } else if key.trim() != key {
            report.push(Finding::new(
                key,
                FindingCode::MalformedField,
                "key has leading or trailing whitespace",
            ));
        }

        if entry.kind.requires_description()
            && entry
                .description
                .as_deref()
                .is_none_or(|d| d.trim().is_empty())
        {
            report.push(Finding::new(
                key,
                FindingCode::MissingDescription,
                format!("{} entry has no description", entry.kind),
            ));
        }

        for (field, target) in entry.references() {
            if target.is_empty() {
                report.push(Finding::new(
                    key,
                    FindingCode::MalformedField,
                    format!("{field} contains an empty string"),
                ));
            } else if target.to_lowercase() != target {
                report.push(Finding::new(
                    key,
                    FindingCode::MalformedField,
                    format!("{field} element {target:?} is not lowercase"),
                ));
            } else if !kg.contains_key(target) {
                report.push(Finding::new(
                    key,
                    FindingCode::DanglingReference,
                    format!("{field} references missing key {target:?}"),
                ));
            }
        }

        if let Some(desc) = entry.description.as_deref().filter(|d| !d.is_empty()) {
            match first_with_description.get(desc) {
                Some(first) => report.push(Finding::new(
                    key,
                    FindingCode::DuplicateAlias,
                    format!("description identical to {first:?}"),
                )),
                None => {
                    first_with_description.insert(desc, key);
                }
            }
        }
    }
    report
}

/// Validates a raw graph document without failing on bad entries.
///
/// Entries that [`load_graph`] would reject (unknown or missing type,
/// wrongly typed fields) are reported as errors and left out; the remaining
/// entries go through [`validate_graph`]. Only document-level syntax errors
/// are returned as `Err`.
pub fn validate_source(bytes: &[u8]) -> Result<(KnowledgeGraph, ValidationReport), KgError> {
    let doc = parse_document(bytes)?;
    let mut graph = KnowledgeGraph::new();
    let mut load_findings = Vec::new();
    for (key, value) in &doc {
        match parse_entry(value) {
            Ok(entry) => {
                graph.insert(key, entry);
            }
            Err(p) => {
                let key = key.to_lowercase();
                load_findings.push(match p {
                    EntryProblem::UnknownType(found) => Finding::new(
                        &key,
                        FindingCode::UnknownType,
                        format!("unknown type {found}"),
                    ),
                    EntryProblem::MissingType => {
                        Finding::new(&key, FindingCode::MalformedField, "missing type field")
                    }
                    EntryProblem::NotObject => {
                        Finding::new(&key, FindingCode::MalformedField, "entry is not an object")
                    }
                    EntryProblem::Malformed(msg) => {
                        Finding::new(&key, FindingCode::MalformedField, msg)
                    }
                });
            }
        }
    }
    let mut report = ValidationReport::default();
    for f in load_findings {
        report.push(f);
    }
    let rest = validate_graph(&graph);
    report.errors.extend(rest.errors);
    report.warnings.extend(rest.warnings);
    Ok((graph, report))
}

/// Entry counts per type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    counts: BTreeMap<EntryType, usize>,
    pub total: usize,
}

impl TypeCounts {
    pub fn get(&self, kind: EntryType) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    /// `(type, count)` for all eight types in declaration order, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (EntryType, usize)> + '_ {
        EntryType::ALL.into_iter().map(|t| (t, self.get(t)))
    }
}

pub fn graph_stats(kg: &KnowledgeGraph) -> TypeCounts {
    let mut counts = TypeCounts::default();
    for (_, entry) in kg.iter() {
        *counts.counts.entry(entry.kind).or_insert(0) += 1;
        counts.total += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const THREE_ENTRIES: &str = r#"{
        "1923": {"type": "date", "events": ["der sturmer", "beer hall putsch"]},
        "babi yar massacre": {"type": "event", "date": ["1941"],
            "location": ["babi yar", "babyn yar"],
            "description": "Nazis and their collaborators shot to death 33,771 Jews at Babi Yar over the course of two days."},
        "vienna 1910": {"type": "publication", "date": ["1943"],
            "author": ["emerich walter emo", "e.w. emo"],
            "description": "Vienna 1910 (German: Wien 1910) is a 1943 German biographical film directed by Emerich Walter Emo and starring Rudolf Forster, Heinrich George, and Lil Dagover. It is based on the life of Mayor of Vienna Karl Lueger. Its antisemitic content led to it being banned by the Allied Occupation forces following the Second World War."}
    }"#;

    fn three_entries() -> KnowledgeGraph {
        parse_graph(THREE_ENTRIES.as_bytes()).unwrap()
    }

    #[test]
    fn loads_date_entry_with_events() {
        let kg = three_entries();
        let e = kg.get("1923").unwrap();
        assert_eq!(e.kind, EntryType::Date);
        assert_eq!(
            e.events.as_deref().unwrap(),
            ["der sturmer".to_string(), "beer hall putsch".to_string()]
        );
        assert!(e.description.is_none());
    }

    #[test]
    fn empty_object_is_empty_graph() {
        let kg = parse_graph(b"{}").unwrap();
        assert!(kg.is_empty());
        assert_eq!(graph_stats(&kg), TypeCounts::default());
    }

    #[test]
    fn unknown_type_names_key() {
        let err = parse_graph(br#"{"foo": {"type": "widget"}}"#).unwrap_err();
        match err {
            KgError::UnknownType { key, found } => {
                assert_eq!(key, "foo");
                assert_eq!(found, "widget");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_type_and_parse_errors() {
        assert!(matches!(
            parse_graph(br#"{"foo": {"description": "x"}}"#),
            Err(KgError::MissingType { key }) if key == "foo"
        ));
        assert!(matches!(parse_graph(b"{\"foo\": "), Err(KgError::Parse(_))));
        assert!(matches!(parse_graph(b"[1, 2]"), Err(KgError::Parse(_))));
        assert!(matches!(
            parse_graph(br#"{"a": {"type": "date", "events": "x"}}"#),
            Err(KgError::Parse(_))
        ));
    }

    #[test]
    fn keys_are_lowercased_and_extras_kept() {
        let kg = parse_graph(
            br#"{"Beer Hall Putsch": {"type": "event", "description": "d", "wiki": {"id": 7}}}"#,
        )
        .unwrap();
        let e = kg.get("beer hall putsch").unwrap();
        assert_eq!(e.extra.get("wiki"), Some(&serde_json::json!({"id": 7})));
        let back = parse_graph(kg.to_json_string().as_bytes()).unwrap();
        assert_eq!(back, kg);
    }

    #[test]
    fn dangling_reference_on_single_date() {
        let mut kg = KnowledgeGraph::new();
        kg.insert(
            "1923",
            Entry::new(EntryType::Date).with_events(["beer hall putsch"]),
        );
        let report = validate_graph(&kg);
        assert!(report.errors.is_empty());
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].key, "1923");
        assert_eq!(report.warnings[0].code, FindingCode::DanglingReference);
    }

    #[test]
    fn three_entries_have_only_dangling_warnings() {
        let report = validate_graph(&three_entries());
        assert!(report.errors.is_empty());
        // 1923 -> 2 events, babi yar massacre -> 1941 + 2 places,
        // vienna 1910 -> 1943 + 2 authors; none of them are keys.
        let mut dangling: Vec<(&str, &str)> = report
            .warnings
            .iter()
            .map(|f| (f.key.as_str(), f.message.as_str()))
            .collect();
        dangling.sort();
        assert_eq!(dangling.len(), 8);
        assert!(report
            .warnings
            .iter()
            .all(|f| f.code == FindingCode::DanglingReference));
    }

    #[test]
    fn empty_description_is_error() {
        let mut kg = KnowledgeGraph::new();
        kg.insert(
            "pogrom x",
            Entry::new(EntryType::Event).with_description(""),
        );
        let report = validate_graph(&kg);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].key, "pogrom x");
        assert_eq!(report.errors[0].code, FindingCode::MissingDescription);
    }

    #[test]
    fn place_without_description_is_fine() {
        let mut kg = KnowledgeGraph::new();
        kg.insert("babi yar", Entry::new(EntryType::Place));
        assert_eq!(validate_graph(&kg), ValidationReport::default());
    }

    #[test]
    fn empty_key_and_bad_list_elements() {
        let kg = parse_graph(
            br#"{"": {"type": "place"}, " x ": {"type": "date", "events": ["", "Caps"]}}"#,
        )
        .unwrap();
        let codes: Vec<_> = validate_graph(&kg).errors.iter().map(|f| f.code).collect();
        assert_eq!(
            codes,
            vec![
                FindingCode::EmptyKey,
                FindingCode::MalformedField,
                FindingCode::MalformedField,
                FindingCode::MalformedField
            ]
        );
    }

    #[test]
    fn duplicate_alias_warning() {
        let mut kg = KnowledgeGraph::new();
        kg.insert("a", Entry::new(EntryType::Person).with_description("same"));
        kg.insert("b", Entry::new(EntryType::Person).with_description("same"));
        let report = validate_graph(&kg);
        assert!(report.errors.is_empty());
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].key, "b");
        assert_eq!(report.warnings[0].code, FindingCode::DuplicateAlias);
    }

    #[test]
    fn lenient_validation_reports_unknown_type() {
        let (kg, report) =
            validate_source(br#"{"foo": {"type": "widget"}, "bar": {"type": "place"}}"#).unwrap();
        assert_eq!(kg.len(), 1);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].code, FindingCode::UnknownType);
    }

    #[test]
    fn three_entry_counts() {
        let c = graph_stats(&three_entries());
        assert_eq!(c.get(EntryType::Date), 1);
        assert_eq!(c.get(EntryType::Event), 1);
        assert_eq!(c.get(EntryType::Publication), 1);
        assert_eq!(c.get(EntryType::Slur), 0);
        assert_eq!(c.total, 3);
    }

    #[test]
    fn sample_graph_is_closed() {
        let kg = KnowledgeGraph::sample();
        assert_eq!(validate_graph(&kg), ValidationReport::default());
    }

    fn arb_key() -> impl Strategy<Value = String> {
        "[a-z0-9]{1,6}( [a-z]{1,5}){0,2}"
    }

    fn arb_entry() -> impl Strategy<Value = Entry> {
        (
            0usize..8,
            proptest::option::of(".{0,20}"),
            proptest::option::of(proptest::collection::vec(arb_key(), 0..3)),
            proptest::option::of(proptest::collection::vec(arb_key(), 0..3)),
        )
            .prop_map(|(t, description, events, date)| Entry {
                kind: EntryType::ALL[t],
                description,
                date,
                location: None,
                author: None,
                events,
                extra: BTreeMap::new(),
            })
    }

    fn arb_graph() -> impl Strategy<Value = KnowledgeGraph> {
        proptest::collection::btree_map(arb_key(), arb_entry(), 0..12).prop_map(|m| {
            let mut kg = KnowledgeGraph::new();
            for (k, e) in m {
                kg.insert(k, e);
            }
            kg
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(kg in arb_graph()) {
            let back = parse_graph(kg.to_json_string().as_bytes()).unwrap();
            prop_assert_eq!(back, kg);
        }

        #[test]
        fn stats_total_is_cardinality(kg in arb_graph()) {
            let c = graph_stats(&kg);
            prop_assert_eq!(c.total, kg.len());
            prop_assert_eq!(c.iter().map(|(_, n)| n).sum::<usize>(), kg.len());
        }

        #[test]
        fn validation_is_pure(kg in arb_graph()) {
            prop_assert_eq!(validate_graph(&kg), validate_graph(&kg));
        }
    }
}
