//! Knowledge infusion: prepend rendered graph entries to a document.
//!
//! Every graph key that equals one of the document's unigrams, bigrams or
//! trigrams contributes a segment such as `event name: babi yar massacre`
//! followed, for described types, by `event description: ...`. Date and
//! place entries pull in the entries listed in their `events` field, and so
//! on transitively. The context is joined with `", "` and placed before
//! `" [SEP] "` and the untouched original text.
//!
//! Matched keys are emitted in document order: by the token position where
//! their n-gram first occurs, longer n-grams first at the same position.
//! Keys reached through `events` follow immediately after the date or place
//! that introduced them. Each key is rendered at most once, which also makes
//! cyclic `events` references terminate.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::corpus::{Document, LabeledCorpus};
use crate::exec::Exec;
use crate::kg::{EntryType, KnowledgeGraph};

pub const SEPARATOR: &str = "[SEP]";

/// Longest n-gram matched against graph keys.
pub const MAX_NGRAM: usize = 3;

/// Lowercases and splits on whitespace; leading and trailing runs of
/// non-alphanumeric characters become tokens of their own while interior
/// punctuation (`don't`, `non-white`, `k*ke`) stays attached.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lower.split_whitespace() {
        let Some(start) = chunk.find(char::is_alphanumeric) else {
            tokens.push(chunk.to_string());
            continue;
        };
        let last = chunk.rfind(char::is_alphanumeric).unwrap_or(start);
        let end = last + chunk[last..].chars().next().map_or(0, char::len_utf8);
        if start > 0 {
            tokens.push(chunk[..start].to_string());
        }
        tokens.push(chunk[start..end].to_string());
        if end < chunk.len() {
            tokens.push(chunk[end..].to_string());
        }
    }
    tokens
}

/// Position of an n-gram's first occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

/// Space-joined token runs of length 1 to 3, plus keys added while
/// following `events` lists.
#[derive(Debug, Clone, Default)]
pub struct NgramSet {
    grams: HashMap<String, Span>,
    expansion: BTreeSet<String>,
}

impl NgramSet {
    pub fn contains(&self, gram: &str) -> bool {
        self.grams.contains_key(gram) || self.expansion.contains(gram)
    }

    /// Number of distinct n-grams from the text itself.
    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn first_span(&self, gram: &str) -> Option<Span> {
        self.grams.get(gram).copied()
    }

    /// N-grams from the text, sorted.
    pub fn grams(&self) -> BTreeSet<&str> {
        self.grams.keys().map(String::as_str).collect()
    }

    pub fn expansion_grams(&self) -> &BTreeSet<String> {
        &self.expansion
    }
}

pub fn extract_ngrams<S: AsRef<str>>(tokens: &[S]) -> NgramSet {
    let mut grams = HashMap::new();
    for start in 0..tokens.len() {
        let mut gram = String::new();
        for len in 1..=MAX_NGRAM.min(tokens.len() - start) {
            if len > 1 {
                gram.push(' ');
            }
            gram.push_str(tokens[start + len - 1].as_ref());
            grams.entry(gram.clone()).or_insert(Span { start, len });
        }
    }
    NgramSet {
        grams,
        expansion: BTreeSet::new(),
    }
}

/// A document with its knowledge context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfusedDocument {
    /// Rendered segments joined by `", "`; empty when nothing matched.
    pub context: String,
    /// The input text, byte for byte.
    pub original: String,
    /// Keys in the order they were rendered.
    pub matched_keys: Vec<String>,
    /// Keys reached through `events` lists, whether or not present in the graph.
    pub expansion_grams: BTreeSet<String>,
}

impl InfusedDocument {
    pub fn render(&self) -> String {
        format!("{} {} {}", self.context, SEPARATOR, self.original)
    }
}

impl fmt::Display for InfusedDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.context, SEPARATOR, self.original)
    }
}

fn render_key(kg: &KnowledgeGraph, key: &str, segments: &mut Vec<String>) {
    let Some(entry) = kg.get(key) else { return };
    let kind = entry.kind;
    if kind == EntryType::Date {
        segments.push(format!("{kind}: {key}"));
    } else {
        segments.push(format!("{kind} name: {key}"));
    }
    if kind.requires_description() {
        let description = entry.description.as_deref().unwrap_or("");
        segments.push(format!("{kind} description: {description}"));
    }
}

pub fn infuse(kg: &KnowledgeGraph, text: &str) -> InfusedDocument {
    let tokens = tokenize(text);
    let mut ngrams = extract_ngrams(&tokens);

    let mut direct: Vec<(Span, &str)> = ngrams
        .grams
        .iter()
        .filter_map(|(gram, span)| kg.get_key_value(gram).map(|(k, _)| (*span, k)))
        .collect();
    direct.sort_by_key(|&(span, key)| (span.start, Reverse(span.len), key));

    let mut visited: HashSet<&str> = HashSet::new();
    let mut segments = Vec::new();
    let mut matched_keys = Vec::new();
    let mut stack: Vec<&str> = Vec::new();

    for (_, key) in direct {
        stack.push(key);
        while let Some(key) = stack.pop() {
            if !visited.insert(key) {
                continue;
            }
            render_key(kg, key, &mut segments);
            matched_keys.push(key.to_string());

            let entry = kg.get(key).expect("stacked keys come from the graph");
            if !entry.kind.expands_events() {
                continue;
            }
            // Reversed so the first listed event is rendered first.
            for event in entry.events.iter().flatten().rev() {
                ngrams.expansion.insert(event.clone());
                if let Some((k, _)) = kg.get_key_value(event) {
                    if !visited.contains(k) {
                        stack.push(k);
                    }
                }
            }
        }
    }

    InfusedDocument {
        context: segments.join(", "),
        original: text.to_string(),
        matched_keys,
        expansion_grams: ngrams.expansion,
    }
}

/// Replaces every document's text by its rendered infusion. Labels and order
/// are unchanged.
pub fn infuse_corpus(kg: &KnowledgeGraph, corpus: &LabeledCorpus) -> LabeledCorpus {
    infuse_corpus_with(kg, corpus, Exec::default())
}

pub fn infuse_corpus_with(
    kg: &KnowledgeGraph,
    corpus: &LabeledCorpus,
    exec: Exec,
) -> LabeledCorpus {
    let docs = exec.map(corpus.docs(), |doc| Document {
        text: infuse(kg, &doc.text).render(),
        label: doc.label,
    });
    LabeledCorpus::new(docs)
}
