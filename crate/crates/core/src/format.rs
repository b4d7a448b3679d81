//! On-disk JSON document format and corpus manifests.
//!
//! One document per UTF-8 JSON file:
//!
//! ```json
//! {
//!   "id": "doc1",
//!   "genre": "NEWS",
//!   "text": "In 2003 ...",
//!   "sentence_breaks": [25],
//!   "dct": "2003-04-07",
//!   "nodes": [{"id": "t1", "kind": "timex", "span": [3, 7], "class": "ABSOLUTE_CONCRETE"}],
//!   "edges": [{"child": "t1", "parent": "ROOT", "label": "DEPEND_ON"}]
//! }
//! ```
//!
//! Meta nodes appear as `{"id": "DCT", "kind": "meta"}`. Surfaces are not
//! stored; they are recomputed from the text.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Document, DocumentDraft, DocumentError, Edge, EdgeLabel, EventClass, EventNode, Genre, MetaKind, Node, NodeId,
    Span, TimexClass, TimexNode, TreeError,
};
use crate::normalize::{CalendarValue, TimexSemantics};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("input is not UTF-8 (invalid byte at offset {offset})")]
    Encoding { offset: usize },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("tree invariant violated: {0}")]
    Invariant(#[from] TreeError),
}

impl FormatError {
    fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireDocument {
    pub id: String,
    pub genre: Genre,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_breaks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dct: Option<String>,
    pub nodes: Vec<WireNode>,
    #[serde(default)]
    pub edges: Vec<WireEdge>,
}

/// Classes stay strings here so that unknown values can be reported per node.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireNode {
    pub id: String,
    pub kind: WireKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub(crate) enum WireKind {
    Meta,
    Timex,
    Event,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WireEdge {
    pub child: String,
    pub parent: String,
    pub label: EdgeLabel,
}

/// A class string that names neither a timex nor an event class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct UnknownClass {
    pub node: String,
    pub kind: WireKind,
    pub class: String,
}

pub(crate) fn read_wire(bytes: &[u8]) -> Result<WireDocument, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Encoding { offset: e.valid_up_to() })?;
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => FormatError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => FormatError::schema("document", e.to_string()),
        }
    })
}

impl WireDocument {
    pub(crate) fn unknown_classes(&self) -> Vec<UnknownClass> {
        self.nodes
            .iter()
            .filter_map(|n| {
                let class = n.class.as_deref()?;
                let known = match n.kind {
                    WireKind::Timex => TimexClass::from_name(class).is_some(),
                    WireKind::Event => EventClass::from_name(class).is_some(),
                    WireKind::Meta => true,
                };
                (!known).then(|| UnknownClass {
                    node: n.id.clone(),
                    kind: n.kind,
                    class: class.to_owned(),
                })
            })
            .collect()
    }

    pub(crate) fn into_draft(self) -> Result<DocumentDraft, FormatError> {
        let dct = match &self.dct {
            None => None,
            Some(s) => {
                let value: CalendarValue = s.parse().map_err(|e| FormatError::schema("dct", format!("{e}")))?;
                value.validate().map_err(|e| FormatError::schema("dct", format!("{e}")))?;
                Some(value)
            }
        };
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, wire) in self.nodes.into_iter().enumerate() {
            nodes.push(wire_node(i, wire)?);
        }
        let edges = self
            .edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                let child = NodeId::try_new(e.child).ok_or_else(|| FormatError::schema(format!("edges[{i}].child"), "empty id"))?;
                let parent =
                    NodeId::try_new(e.parent).ok_or_else(|| FormatError::schema(format!("edges[{i}].parent"), "empty id"))?;
                Ok(Edge {
                    child,
                    parent,
                    label: e.label,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(DocumentDraft {
            id: self.id,
            genre: self.genre,
            text: self.text,
            sentence_breaks: self.sentence_breaks,
            dct,
            nodes,
            edges,
        })
    }
}

fn wire_node(i: usize, wire: WireNode) -> Result<Node, FormatError> {
    let field = |name: &str| format!("nodes[{i}].{name}");
    let id = NodeId::try_new(wire.id).ok_or_else(|| FormatError::schema(field("id"), "empty id"))?;
    if wire.kind == WireKind::Meta {
        let kind = MetaKind::from_id(id.as_str())
            .ok_or_else(|| FormatError::schema(field("id"), format!("`{id}` is not a meta node id")))?;
        if wire.span.is_some() || wire.class.is_some() || wire.semantics.is_some() {
            return Err(FormatError::schema(field("kind"), "meta nodes carry only an id"));
        }
        return Ok(Node::Meta(kind));
    }
    let span = wire.span.ok_or_else(|| FormatError::schema(field("span"), "missing"))?;
    let class = wire.class.ok_or_else(|| FormatError::schema(field("class"), "missing"))?;
    match wire.kind {
        WireKind::Timex => {
            let class = TimexClass::from_name(&class)
                .ok_or_else(|| FormatError::schema(field("class"), format!("unknown timex class `{class}`")))?;
            let semantics = match wire.semantics {
                None => None,
                Some(value) => {
                    let sem: TimexSemantics =
                        serde_json::from_value(value).map_err(|e| FormatError::schema(field("semantics"), e.to_string()))?;
                    sem.check().map_err(|e| FormatError::schema(field("semantics"), e.to_string()))?;
                    if sem.expected_class() != class {
                        return Err(FormatError::schema(
                            field("semantics"),
                            format!("semantics of a {} timex must describe a {} timex", class.name(), sem.expected_class().name()),
                        ));
                    }
                    Some(sem)
                }
            };
            Ok(Node::Timex(TimexNode {
                id,
                span,
                surface: String::new(),
                class,
                semantics,
            }))
        }
        WireKind::Event => {
            if wire.semantics.is_some() {
                return Err(FormatError::schema(field("semantics"), "events carry no semantics"));
            }
            let class = EventClass::from_name(&class)
                .ok_or_else(|| FormatError::schema(field("class"), format!("unknown event class `{class}`")))?;
            Ok(Node::Event(EventNode {
                id,
                span,
                surface: String::new(),
                class,
            }))
        }
        WireKind::Meta => unreachable!("handled above"),
    }
}

/// Parses the node inventory and edges without building the tree.
pub fn parse_draft(bytes: &[u8]) -> Result<DocumentDraft, FormatError> {
    read_wire(bytes)?.into_draft()
}

pub(crate) fn build_draft(draft: DocumentDraft) -> Result<Document, FormatError> {
    draft.build().map_err(|e| match e {
        DocumentError::Tree(t) => FormatError::Invariant(t),
        DocumentError::SpanOutOfBounds { node, span, len } => FormatError::schema(
            format!("span of `{node}`"),
            format!("[{}, {}] exceeds text length {len}", span.start, span.end),
        ),
        DocumentError::SentenceBreaks => {
            FormatError::schema("sentence_breaks", "offsets must be strictly increasing and within the text")
        }
    })
}

pub fn parse_document(bytes: &[u8]) -> Result<Document, FormatError> {
    build_draft(parse_draft(bytes)?)
}

fn node_to_wire(node: &Node) -> WireNode {
    match node {
        Node::Meta(kind) => WireNode {
            id: kind.id().to_owned(),
            kind: WireKind::Meta,
            span: None,
            class: None,
            semantics: None,
        },
        Node::Timex(t) => WireNode {
            id: t.id.to_string(),
            kind: WireKind::Timex,
            span: Some(t.span),
            class: Some(t.class.name().to_owned()),
            semantics: t
                .semantics
                .as_ref()
                .map(|s| serde_json::to_value(s).expect("semantics serialize")),
        },
        Node::Event(e) => WireNode {
            id: e.id.to_string(),
            kind: WireKind::Event,
            span: Some(e.span),
            class: Some(e.class.name().to_owned()),
            semantics: None,
        },
    }
}

fn draft_to_wire(draft: &DocumentDraft) -> WireDocument {
    let mut nodes: Vec<&Node> = draft.nodes.iter().collect();
    nodes.sort_by(|a, b| a.id().cmp(b.id()));
    let mut edges: Vec<&Edge> = draft.edges.iter().collect();
    edges.sort();
    WireDocument {
        id: draft.id.clone(),
        genre: draft.genre,
        text: draft.text.clone(),
        sentence_breaks: draft.sentence_breaks.clone(),
        dct: draft.dct.map(|v| v.to_string()),
        nodes: nodes.into_iter().map(node_to_wire).collect(),
        edges: edges
            .into_iter()
            .map(|e| WireEdge {
                child: e.child.to_string(),
                parent: e.parent.to_string(),
                label: e.label,
            })
            .collect(),
    }
}

/// Pretty-printed JSON with nodes ordered by id and edges by child id.
pub fn serialize_draft(draft: &DocumentDraft) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&draft_to_wire(draft)).expect("document serializes");
    out.push(b'\n');
    out
}

pub fn serialize_document(doc: &Document) -> Vec<u8> {
    serialize_draft(&doc.clone().into_draft())
}

pub fn read_document(path: &Path) -> Result<Document, CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_document(&bytes).map_err(|source| CorpusError::Parse {
        path: path.to_owned(),
        source,
    })
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Manifest { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: FormatError },
    #[error("{}: manifest says {manifest} but the document says {document}", path.display())]
    GenreMismatch { path: PathBuf, manifest: Genre, document: Genre },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Resolved against the manifest's directory.
    pub path: PathBuf,
    pub genre: Genre,
    pub annotator: Option<String>,
}

/// Reads `path<TAB>genre[<TAB>annotator]` lines; blank lines and lines
/// starting with `#` are skipped.
pub fn read_manifest(manifest: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let text = fs::read_to_string(manifest).map_err(|source| CorpusError::Io {
        path: manifest.to_owned(),
        source,
    })?;
    parse_manifest(&text, manifest.parent().unwrap_or(Path::new("")))
        .map_err(|(line, message)| CorpusError::Manifest {
            path: manifest.to_owned(),
            line,
            message,
        })
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>, (usize, String)> {
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err((n + 1, format!("expected 2 or 3 tab-separated fields, found {}", fields.len())));
        }
        let genre = Genre::from_name(fields[1].trim()).ok_or_else(|| (n + 1, format!("unknown genre `{}`", fields[1])))?;
        let annotator = fields.get(2).map(|a| a.trim()).filter(|a| !a.is_empty()).map(str::to_owned);
        entries.push(ManifestEntry {
            path: base.join(fields[0].trim()),
            genre,
            annotator,
        });
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDocument {
    pub path: PathBuf,
    pub annotator: Option<String>,
    pub document: Document,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    /// In manifest order.
    pub documents: Vec<CorpusDocument>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn by_genre(&self, genre: Genre) -> impl Iterator<Item = &CorpusDocument> {
        self.documents.iter().filter(move |d| d.document.genre == genre)
    }

    /// Index pairs of files annotating the same document id under different
    /// annotators, in manifest order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, d) in self.documents.iter().enumerate() {
            if d.annotator.is_some() {
                groups.entry(d.document.id.as_str()).or_default().push(i);
            }
        }
        let mut pairs = Vec::new();
        for members in groups.values() {
            for (k, &a) in members.iter().enumerate() {
                for &b in &members[k + 1..] {
                    if self.documents[a].annotator != self.documents[b].annotator {
                        pairs.push((a, b));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// The first document with the given id.
    pub fn find(&self, id: &str) -> Option<&CorpusDocument> {
        self.documents.iter().find(|d| d.document.id == id)
    }
}

pub fn load_corpus(manifest: &Path) -> Result<Corpus, CorpusError> {
    let mut documents = Vec::new();
    for entry in read_manifest(manifest)? {
        let document = read_document(&entry.path)?;
        if document.genre != entry.genre {
            return Err(CorpusError::GenreMismatch {
                path: entry.path,
                manifest: entry.genre,
                document: document.genre,
            });
        }
        documents.push(CorpusDocument {
            path: entry.path,
            annotator: entry.annotator,
            document,
        });
    }
    Ok(Corpus { documents })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "id": "empty",
  "genre": "NEWS",
  "text": "",
  "nodes": [
    {"id": "ROOT", "kind": "meta"}, {"id": "DCT", "kind": "meta"},
    {"id": "PRESENT_REF", "kind": "meta"}, {"id": "PAST_REF", "kind": "meta"},
    {"id": "FUTURE_REF", "kind": "meta"}, {"id": "ATEMPORAL", "kind": "meta"}
  ],
  "edges": [
    {"child": "DCT", "parent": "ROOT", "label": "DEPEND_ON"},
    {"child": "PRESENT_REF", "parent": "ROOT", "label": "DEPEND_ON"},
    {"child": "PAST_REF", "parent": "ROOT", "label": "DEPEND_ON"},
    {"child": "FUTURE_REF", "parent": "ROOT", "label": "DEPEND_ON"},
    {"child": "ATEMPORAL", "parent": "ROOT", "label": "DEPEND_ON"}
  ]
}"#;

    #[test]
    fn minimal_document() {
        let doc = parse_document(MINIMAL.as_bytes()).unwrap();
        assert_eq!(doc.tree.len(), 6);
        let again = parse_document(&serialize_document(&doc)).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_document(b"{\n  \"id\": ,\n}").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn encoding_error() {
        let err = parse_document(b"{\"id\": \"\xff\"}").unwrap_err();
        assert_eq!(err, FormatError::Encoding { offset: 8 });
    }

    #[test]
    fn unknown_field_is_schema_error() {
        let text = MINIMAL.replacen("\"text\": \"\",", "\"text\": \"\", \"extra\": 1,", 1);
        assert!(matches!(parse_document(text.as_bytes()), Err(FormatError::Schema { .. })));
    }

    #[test]
    fn span_out_of_bounds_is_schema_error() {
        let text = MINIMAL
            .replace("\"text\": \"\"", "\"text\": \"ab\"")
            .replace(
                "{\"id\": \"ROOT\", \"kind\": \"meta\"}",
                "{\"id\": \"ROOT\", \"kind\": \"meta\"}, {\"id\": \"e1\", \"kind\": \"event\", \"span\": [0, 3], \"class\": \"EVENT\"}",
            )
            .replace(
                "\"edges\": [",
                "\"edges\": [{\"child\": \"e1\", \"parent\": \"DCT\", \"label\": \"OVERLAP\"},",
            );
        let err = parse_document(text.as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Schema { .. }), "{err:?}");
    }

    #[test]
    fn missing_meta_node_is_invariant_violation() {
        let text = MINIMAL
            .replace(", {\"id\": \"ATEMPORAL\", \"kind\": \"meta\"}", "")
            .replace(",\n    {\"child\": \"ATEMPORAL\", \"parent\": \"ROOT\", \"label\": \"DEPEND_ON\"}", "");
        let err = parse_document(text.as_bytes()).unwrap_err();
        assert_eq!(err, FormatError::Invariant(TreeError::MissingMetaNode(MetaKind::Atemporal)));
    }

    #[test]
    fn manifest_lines() {
        let text = "# corpus\n\na.json\tNEWS\tA\nb.json\tnarrative\n";
        let entries = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].path, Path::new("/data/a.json"));
        assert_eq!(entries[0].annotator.as_deref(), Some("A"));
        assert_eq!(entries[1].genre, Genre::Narrative);
        assert_eq!(entries[1].annotator, None);
        assert_eq!(parse_manifest("a.json\tPOETRY\n", Path::new("")).unwrap_err().0, 1);
    }
}
