//! Temporal dependency tree data model.
//!
//! A document's tree holds three kinds of nodes: the six meta nodes, time
//! expressions and events. Every node except `ROOT` has exactly one parent,
//! and each edge is stored child→parent with a label that reads
//! parent-relative-to-child: an `INCLUDES` edge from `e1` to `t1` asserts
//! "t1 includes e1".

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{CalendarValue, TimexSemantics};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    /// Panics on an empty id; use [`NodeId::try_new`] for untrusted input.
    pub fn new(id: impl Into<String>) -> Self {
        Self::try_new(id).expect("node id must be non-empty")
    }

    pub fn try_new(id: impl Into<String>) -> Option<Self> {
        let id = id.into();
        if id.is_empty() {
            None
        } else {
            Some(NodeId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        MetaKind::from_id(&self.0).is_some()
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<MetaKind> for NodeId {
    fn from(kind: MetaKind) -> Self {
        NodeId(kind.id().to_owned())
    }
}

/// Half-open character range `[start, end)` over the document text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn is_well_formed(&self, text_len: usize) -> bool {
        self.start < self.end && self.end <= text_len
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl From<[usize; 2]> for Span {
    fn from([start, end]: [usize; 2]) -> Self {
        Span { start, end }
    }
}

impl From<Span> for [usize; 2] {
    fn from(span: Span) -> Self {
        [span.start, span.end]
    }
}

/// Slices `text` by character offsets. Out-of-range spans yield `None`.
pub fn char_slice(text: &str, span: Span) -> Option<&str> {
    if span.start > span.end {
        return None;
    }
    let mut indices = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let start = indices.nth(span.start)?;
    let end = if span.end == span.start {
        start
    } else {
        indices.nth(span.end - span.start - 1)?
    };
    Some(&text[start..end])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaKind {
    Root,
    Dct,
    PresentRef,
    PastRef,
    FutureRef,
    Atemporal,
}

impl MetaKind {
    pub const ALL: [MetaKind; 6] = [
        MetaKind::Root,
        MetaKind::Dct,
        MetaKind::PresentRef,
        MetaKind::PastRef,
        MetaKind::FutureRef,
        MetaKind::Atemporal,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MetaKind::Root => "ROOT",
            MetaKind::Dct => "DCT",
            MetaKind::PresentRef => "PRESENT_REF",
            MetaKind::PastRef => "PAST_REF",
            MetaKind::FutureRef => "FUTURE_REF",
            MetaKind::Atemporal => "ATEMPORAL",
        }
    }

    pub fn from_id(id: &str) -> Option<MetaKind> {
        MetaKind::ALL.into_iter().find(|k| k.id() == id)
    }

    pub fn is_symbolic_ref(self) -> bool {
        matches!(self, MetaKind::PresentRef | MetaKind::PastRef | MetaKind::FutureRef)
    }
}

impl fmt::Display for MetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimexClass {
    AbsoluteConcrete,
    RelativeConcrete,
    Vague,
    /// Unmodified durations and recurrences; recognized but never attached.
    Unlocatable,
}

impl TimexClass {
    pub const ALL: [TimexClass; 4] = [
        TimexClass::AbsoluteConcrete,
        TimexClass::RelativeConcrete,
        TimexClass::Vague,
        TimexClass::Unlocatable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TimexClass::AbsoluteConcrete => "ABSOLUTE_CONCRETE",
            TimexClass::RelativeConcrete => "RELATIVE_CONCRETE",
            TimexClass::Vague => "VAGUE",
            TimexClass::Unlocatable => "UNLOCATABLE",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        TimexClass::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn is_concrete(self) -> bool {
        matches!(self, TimexClass::AbsoluteConcrete | TimexClass::RelativeConcrete)
    }

    pub fn is_locatable(self) -> bool {
        self != TimexClass::Unlocatable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventClass {
    Event,
    State,
    Habitual,
    Ongoing,
    Completed,
    Modalized,
    GenericHabitual,
    GenericState,
}

impl EventClass {
    pub const ALL: [EventClass; 8] = [
        EventClass::Event,
        EventClass::State,
        EventClass::Habitual,
        EventClass::Ongoing,
        EventClass::Completed,
        EventClass::Modalized,
        EventClass::GenericHabitual,
        EventClass::GenericState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventClass::Event => "EVENT",
            EventClass::State => "STATE",
            EventClass::Habitual => "HABITUAL",
            EventClass::Ongoing => "ONGOING",
            EventClass::Completed => "COMPLETED",
            EventClass::Modalized => "MODALIZED",
            EventClass::GenericHabitual => "GENERIC_HABITUAL",
            EventClass::GenericState => "GENERIC_STATE",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        EventClass::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Only `EVENT` advances narrative time; the other seven are stative.
    pub fn is_eventive(self) -> bool {
        self == EventClass::Event
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimexNode {
    pub id: NodeId,
    pub span: Span,
    /// Text covered by `span`; recomputed from the document text on build.
    pub surface: String,
    pub class: TimexClass,
    pub semantics: Option<TimexSemantics>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventNode {
    pub id: NodeId,
    /// Covers the headword only.
    pub span: Span,
    pub surface: String,
    pub class: EventClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Meta,
    Timex,
    Event,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Meta(MetaKind),
    Timex(TimexNode),
    Event(EventNode),
}

impl Node {
    pub fn id(&self) -> &str {
        match self {
            Node::Meta(kind) => kind.id(),
            Node::Timex(t) => t.id.as_str(),
            Node::Event(e) => e.id.as_str(),
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Meta(_) => NodeKind::Meta,
            Node::Timex(_) => NodeKind::Timex,
            Node::Event(_) => NodeKind::Event,
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            Node::Meta(_) => None,
            Node::Timex(t) => Some(t.span),
            Node::Event(e) => Some(e.span),
        }
    }

    pub fn meta(&self) -> Option<MetaKind> {
        match self {
            Node::Meta(kind) => Some(*kind),
            _ => None,
        }
    }

    pub fn as_timex(&self) -> Option<&TimexNode> {
        match self {
            Node::Timex(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_event(&self) -> Option<&EventNode> {
        match self {
            Node::Event(e) => Some(e),
            _ => None,
        }
    }

    fn surface_mut(&mut self) -> Option<(&mut String, Span)> {
        match self {
            Node::Meta(_) => None,
            Node::Timex(t) => Some((&mut t.surface, t.span)),
            Node::Event(e) => Some((&mut e.surface, e.span)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeLabel {
    DependOn,
    Before,
    After,
    Overlap,
    Includes,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 5] = [
        EdgeLabel::DependOn,
        EdgeLabel::Before,
        EdgeLabel::After,
        EdgeLabel::Overlap,
        EdgeLabel::Includes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeLabel::DependOn => "DEPEND_ON",
            EdgeLabel::Before => "BEFORE",
            EdgeLabel::After => "AFTER",
            EdgeLabel::Overlap => "OVERLAP",
            EdgeLabel::Includes => "INCLUDES",
        }
    }

    pub fn is_temporal(self) -> bool {
        self != EdgeLabel::DependOn
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub child: NodeId,
    pub parent: NodeId,
    pub label: EdgeLabel,
}

impl Edge {
    pub fn new(child: impl Into<String>, parent: impl Into<String>, label: EdgeLabel) -> Self {
        Edge {
            child: NodeId::new(child),
            parent: NodeId::new(parent),
            label,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.child, self.label, self.parent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("duplicate node id `{0}`")]
    DuplicateId(NodeId),
    #[error("node `{0}` uses a reserved meta-node id")]
    ReservedId(NodeId),
    #[error("edge {edge} references missing node `{missing}`")]
    MissingNode { edge: Edge, missing: NodeId },
    #[error("node `{0}` has more than one parent")]
    MultipleParents(NodeId),
    #[error("node `{0}` has no parent")]
    MissingParent(NodeId),
    #[error("ROOT cannot have a parent")]
    RootHasParent,
    #[error("cycle through node `{0}`")]
    CycleDetected(NodeId),
    #[error("meta node {0} is missing")]
    MissingMetaNode(MetaKind),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

impl TreeError {
    /// Violations of the single-antecedent shape, as opposed to dangling
    /// references or inventory problems.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            TreeError::MultipleParents(_)
                | TreeError::MissingParent(_)
                | TreeError::RootHasParent
                | TreeError::CycleDetected(_)
        )
    }

    pub fn node(&self) -> Option<&str> {
        match self {
            TreeError::DuplicateId(id)
            | TreeError::ReservedId(id)
            | TreeError::MultipleParents(id)
            | TreeError::MissingParent(id)
            | TreeError::CycleDetected(id) => Some(id.as_str()),
            TreeError::MissingNode { edge, .. } => Some(edge.child.as_str()),
            TreeError::RootHasParent => Some(MetaKind::Root.id()),
            TreeError::MissingMetaNode(kind) => Some(kind.id()),
            TreeError::UnknownNode(id) => Some(id.as_str()),
        }
    }
}

/// A validated spanning tree over meta, timex and event nodes.
///
/// Nodes are kept sorted by id, so two trees built from the same node and
/// edge sets compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalDependencyTree {
    nodes: Vec<Node>,
    parents: Vec<Option<(usize, EdgeLabel)>>,
}

impl TemporalDependencyTree {
    pub fn build(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, TreeError> {
        Self::build_inner(nodes, edges, false)
    }

    /// Like [`build`](Self::build), but inserts any missing meta node along
    /// with its `DEPEND_ON` edge to `ROOT`.
    pub fn build_with_meta(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, TreeError> {
        Self::build_inner(nodes, edges, true)
    }

    fn build_inner(
        mut nodes: Vec<Node>,
        mut edges: Vec<Edge>,
        auto_meta: bool,
    ) -> Result<Self, TreeError> {
        for node in &nodes {
            if !matches!(node, Node::Meta(_)) && MetaKind::from_id(node.id()).is_some() {
                return Err(TreeError::ReservedId(NodeId::new(node.id())));
            }
        }
        if auto_meta {
            for kind in MetaKind::ALL {
                if !nodes.iter().any(|n| n.meta() == Some(kind)) {
                    nodes.push(Node::Meta(kind));
                    if kind != MetaKind::Root && !edges.iter().any(|e| e.child.as_str() == kind.id())
                    {
                        edges.push(meta_edge(kind));
                    }
                }
            }
        }
        nodes.sort_by(|a, b| a.id().cmp(b.id()));
        for pair in nodes.windows(2) {
            if pair[0].id() == pair[1].id() {
                return Err(TreeError::DuplicateId(NodeId::new(pair[0].id())));
            }
        }
        for kind in MetaKind::ALL {
            if !nodes.iter().any(|n| n.meta() == Some(kind)) {
                return Err(TreeError::MissingMetaNode(kind));
            }
        }

        let lookup = |id: &NodeId| nodes.binary_search_by(|n| n.id().cmp(id.as_str())).ok();
        let mut parents: Vec<Option<(usize, EdgeLabel)>> = vec![None; nodes.len()];
        for edge in &edges {
            let child = lookup(&edge.child).ok_or_else(|| TreeError::MissingNode {
                edge: edge.clone(),
                missing: edge.child.clone(),
            })?;
            let parent = lookup(&edge.parent).ok_or_else(|| TreeError::MissingNode {
                edge: edge.clone(),
                missing: edge.parent.clone(),
            })?;
            if nodes[child].meta() == Some(MetaKind::Root) {
                return Err(TreeError::RootHasParent);
            }
            if child == parent {
                return Err(TreeError::CycleDetected(edge.child.clone()));
            }
            if parents[child].is_some() {
                return Err(TreeError::MultipleParents(edge.child.clone()));
            }
            parents[child] = Some((parent, edge.label));
        }
        for (i, node) in nodes.iter().enumerate() {
            if parents[i].is_none() && node.meta() != Some(MetaKind::Root) {
                return Err(TreeError::MissingParent(NodeId::new(node.id())));
            }
        }

        // 0 = unvisited, 1 = on the current walk, 2 = known to reach ROOT
        let mut state = vec![0u8; nodes.len()];
        for start in 0..nodes.len() {
            let mut walk = Vec::new();
            let mut cur = start;
            loop {
                match state[cur] {
                    2 => break,
                    1 => return Err(TreeError::CycleDetected(NodeId::new(nodes[cur].id()))),
                    _ => {}
                }
                state[cur] = 1;
                walk.push(cur);
                match parents[cur] {
                    Some((p, _)) => cur = p,
                    None => break,
                }
            }
            for i in walk {
                state[i] = 2;
            }
        }

        Ok(TemporalDependencyTree { nodes, parents })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.id().cmp(id)).ok()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    pub fn node_at(&self, index: usize) -> &Node {
        &self.nodes[index]
    }

    pub fn parent_index(&self, index: usize) -> Option<(usize, EdgeLabel)> {
        self.parents[index]
    }

    /// The edge leaving `id`, or `None` for `ROOT` and unknown ids.
    pub fn edge_of(&self, id: &str) -> Option<Edge> {
        let i = self.index_of(id)?;
        let (p, label) = self.parents[i]?;
        Some(Edge {
            child: NodeId::new(self.nodes[i].id()),
            parent: NodeId::new(self.nodes[p].id()),
            label,
        })
    }

    pub fn parent(&self, id: &str) -> Option<(&Node, EdgeLabel)> {
        let i = self.index_of(id)?;
        self.parents[i].map(|(p, label)| (&self.nodes[p], label))
    }

    /// All edges, ordered by child id.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.parents.iter().enumerate().filter_map(move |(i, p)| {
            p.map(|(p, label)| Edge {
                child: NodeId::new(self.nodes[i].id()),
                parent: NodeId::new(self.nodes[p].id()),
                label,
            })
        })
    }

    pub fn children<'a>(&'a self, id: &str) -> Vec<&'a Node> {
        let Some(target) = self.index_of(id) else {
            return Vec::new();
        };
        self.parents
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Some((q, _)) if *q == target))
            .map(|(i, _)| &self.nodes[i])
            .collect()
    }

    fn index_or_err(&self, id: &str) -> Result<usize, TreeError> {
        self.index_of(id).ok_or_else(|| TreeError::UnknownNode(id.to_owned()))
    }

    fn ancestry(&self, mut index: usize) -> Vec<usize> {
        let mut chain = vec![index];
        while let Some((p, _)) = self.parents[index] {
            chain.push(p);
            index = p;
        }
        chain
    }

    pub fn depth(&self, id: &str) -> Result<usize, TreeError> {
        Ok(self.ancestry(self.index_or_err(id)?).len() - 1)
    }

    /// Edges from `id` up to `ROOT`, nearest first.
    pub fn path_to_root(&self, id: &str) -> Result<Vec<Edge>, TreeError> {
        let chain = self.ancestry(self.index_or_err(id)?);
        Ok(chain
            .windows(2)
            .map(|w| Edge {
                child: NodeId::new(self.nodes[w[0]].id()),
                parent: NodeId::new(self.nodes[w[1]].id()),
                label: self.parents[w[0]].expect("non-root has a parent").1,
            })
            .collect())
    }

    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<&str, TreeError> {
        let ia = self.index_or_err(a)?;
        let ib = self.index_or_err(b)?;
        Ok(self.nodes[self.lca_index(ia, ib)].id())
    }

    pub(crate) fn lca_index(&self, a: usize, b: usize) -> usize {
        let mut pa = self.ancestry(a);
        let mut pb = self.ancestry(b);
        let mut lca = *pa.last().expect("non-empty ancestry");
        while let (Some(x), Some(y)) = (pa.pop(), pb.pop()) {
            if x != y {
                break;
            }
            lca = x;
        }
        lca
    }

    /// Node indices on the path from `a` up to the LCA and down to `b`.
    pub(crate) fn path_between(&self, a: usize, b: usize) -> (Vec<usize>, Vec<usize>) {
        let lca = self.lca_index(a, b);
        let up: Vec<usize> = self
            .ancestry(a)
            .into_iter()
            .take_while(|&i| i != lca)
            .chain(std::iter::once(lca))
            .collect();
        let mut down: Vec<usize> = self.ancestry(b).into_iter().take_while(|&i| i != lca).collect();
        down.reverse();
        (up, down)
    }
}

/// The housekeeping edge attaching a non-root meta node to `ROOT`.
pub fn meta_edge(kind: MetaKind) -> Edge {
    Edge::new(kind.id(), MetaKind::Root.id(), EdgeLabel::DependOn)
}

pub fn meta_nodes() -> Vec<Node> {
    MetaKind::ALL.into_iter().map(Node::Meta).collect()
}

pub fn meta_edges() -> Vec<Edge> {
    MetaKind::ALL[1..].iter().map(|&k| meta_edge(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Genre {
    News,
    Narrative,
}

impl Genre {
    pub const ALL: [Genre; 2] = [Genre::News, Genre::Narrative];

    pub fn name(self) -> &'static str {
        match self {
            Genre::News => "NEWS",
            Genre::Narrative => "NARRATIVE",
        }
    }

    pub fn from_name(name: &str) -> Option<Genre> {
        match name.to_ascii_uppercase().as_str() {
            "NEWS" => Some(Genre::News),
            "NARRATIVE" | "NARRATIVES" => Some(Genre::Narrative),
            _ => None,
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("span {span:?} of node `{node}` lies outside the text ({len} characters)")]
    SpanOutOfBounds { node: NodeId, span: Span, len: usize },
    #[error("sentence breaks must be strictly increasing offsets within the text")]
    SentenceBreaks,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Nodes and edges that have not yet been checked against the tree
/// invariants. Produced by the reader and consumed by the baseline parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentDraft {
    pub id: String,
    pub genre: Genre,
    pub text: String,
    pub sentence_breaks: Option<Vec<usize>>,
    pub dct: Option<CalendarValue>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl DocumentDraft {
    pub fn new(id: impl Into<String>, genre: Genre, text: impl Into<String>) -> Self {
        DocumentDraft {
            id: id.into(),
            genre,
            text: text.into(),
            sentence_breaks: None,
            dct: None,
            nodes: meta_nodes(),
            edges: meta_edges(),
        }
    }

    /// Checks spans and sentence breaks, fills surfaces from the text, moves
    /// unattached unlocatable timexes out of the tree and builds it.
    pub fn build(mut self) -> Result<Document, DocumentError> {
        let len = self.text.chars().count();
        if let Some(breaks) = &self.sentence_breaks {
            let increasing = breaks.windows(2).all(|w| w[0] < w[1]);
            if !increasing || breaks.iter().any(|&b| b > len) {
                return Err(DocumentError::SentenceBreaks);
            }
        }
        for node in &mut self.nodes {
            let id = node.id().to_owned();
            if let Some((surface, span)) = node.surface_mut() {
                if !span.is_well_formed(len) {
                    return Err(DocumentError::SpanOutOfBounds {
                        node: NodeId::new(id),
                        span,
                        len,
                    });
                }
                *surface = char_slice(&self.text, span).unwrap_or_default().to_owned();
            }
        }
        let attached: std::collections::HashSet<&str> =
            self.edges.iter().map(|e| e.child.as_str()).collect();
        let (unattached, nodes): (Vec<Node>, Vec<Node>) = self.nodes.into_iter().partition(|n| {
            matches!(n, Node::Timex(t) if t.class == TimexClass::Unlocatable
                && !attached.contains(t.id.as_str()))
        });
        let mut unattached: Vec<TimexNode> = unattached
            .into_iter()
            .filter_map(|n| match n {
                Node::Timex(t) => Some(t),
                _ => None,
            })
            .collect();
        unattached.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(dup) = unattached.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(TreeError::DuplicateId(dup[0].id.clone()).into());
        }
        let tree = TemporalDependencyTree::build(nodes, self.edges)?;
        if let Some(t) = unattached.iter().find(|t| tree.contains(t.id.as_str())) {
            return Err(TreeError::DuplicateId(t.id.clone()).into());
        }
        Ok(Document {
            id: self.id,
            genre: self.genre,
            text: self.text,
            sentence_breaks: self.sentence_breaks,
            dct: self.dct,
            tree,
            unattached,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub genre: Genre,
    pub text: String,
    /// End offsets of sentences, strictly increasing.
    pub sentence_breaks: Option<Vec<usize>>,
    pub dct: Option<CalendarValue>,
    pub tree: TemporalDependencyTree,
    /// Unlocatable time expressions recognized in the text but kept out of
    /// the tree.
    pub unattached: Vec<TimexNode>,
}

impl Document {
    pub fn timexes(&self) -> impl Iterator<Item = &TimexNode> {
        self.tree.nodes().iter().filter_map(Node::as_timex)
    }

    pub fn events(&self) -> impl Iterator<Item = &EventNode> {
        self.tree.nodes().iter().filter_map(Node::as_event)
    }

    /// Every text-anchored node, attached or not, ordered by id.
    pub fn anchored_nodes(&self) -> Vec<Node> {
        let mut all: Vec<Node> = self
            .tree
            .nodes()
            .iter()
            .filter(|n| n.span().is_some())
            .cloned()
            .chain(self.unattached.iter().cloned().map(Node::Timex))
            .collect();
        all.sort_by(|a, b| a.id().cmp(b.id()));
        all
    }

    pub fn sentence_count(&self) -> usize {
        self.sentence_breaks.as_ref().map_or(0, Vec::len)
    }

    /// Index of the sentence containing character `offset`.
    pub fn sentence_of(&self, offset: usize) -> usize {
        match &self.sentence_breaks {
            Some(breaks) => breaks.partition_point(|&b| b <= offset),
            None => 0,
        }
    }

    /// Converts back into an editable draft carrying the same nodes and edges.
    pub fn into_draft(self) -> DocumentDraft {
        let edges = self.tree.edges().collect();
        let mut nodes: Vec<Node> = self.tree.nodes().to_vec();
        nodes.extend(self.unattached.into_iter().map(Node::Timex));
        DocumentDraft {
            id: self.id,
            genre: self.genre,
            text: self.text,
            sentence_breaks: self.sentence_breaks,
            dct: self.dct,
            nodes,
            edges,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timex(id: &str, start: usize, end: usize, class: TimexClass) -> Node {
        Node::Timex(TimexNode {
            id: NodeId::new(id),
            span: Span::new(start, end),
            surface: String::new(),
            class,
            semantics: None,
        })
    }

    fn example_2003() -> TemporalDependencyTree {
        let mut nodes = meta_nodes();
        nodes.push(timex("t1", 0, 4, TimexClass::AbsoluteConcrete));
        nodes.push(timex("t2", 10, 15, TimexClass::RelativeConcrete));
        nodes.push(timex("t3", 20, 29, TimexClass::RelativeConcrete));
        let mut edges = meta_edges();
        edges.push(Edge::new("t1", "ROOT", EdgeLabel::DependOn));
        edges.push(Edge::new("t2", "t1", EdgeLabel::DependOn));
        edges.push(Edge::new("t3", "t1", EdgeLabel::DependOn));
        TemporalDependencyTree::build(nodes, edges).unwrap()
    }

    #[test]
    fn minimal_tree_has_six_nodes() {
        let tree = TemporalDependencyTree::build(meta_nodes(), meta_edges()).unwrap();
        assert_eq!(tree.len(), 6);
        assert_eq!(tree.edges().count(), 5);
        assert!(tree.edges().all(|e| e.parent.as_str() == "ROOT"));
    }

    #[test]
    fn example_tree_builds() {
        let tree = example_2003();
        assert_eq!(tree.len(), 9);
        assert_eq!(tree.edges().count(), 8);
    }

    #[test]
    fn multiple_parents_rejected() {
        let mut nodes = meta_nodes();
        nodes.push(timex("t1", 0, 4, TimexClass::AbsoluteConcrete));
        nodes.push(Node::Event(EventNode {
            id: NodeId::new("e1"),
            span: Span::new(5, 8),
            surface: String::new(),
            class: EventClass::Event,
        }));
        nodes.push(Node::Event(EventNode {
            id: NodeId::new("e2"),
            span: Span::new(9, 12),
            surface: String::new(),
            class: EventClass::Event,
        }));
        let mut edges = meta_edges();
        edges.push(Edge::new("t1", "ROOT", EdgeLabel::DependOn));
        edges.push(Edge::new("e2", "t1", EdgeLabel::Includes));
        edges.push(Edge::new("e1", "e2", EdgeLabel::Before));
        edges.push(Edge::new("e1", "t1", EdgeLabel::Includes));
        assert_eq!(
            TemporalDependencyTree::build(nodes, edges),
            Err(TreeError::MultipleParents(NodeId::new("e1")))
        );
    }

    #[test]
    fn build_errors() {
        let dup = {
            let mut nodes = meta_nodes();
            nodes.push(timex("t1", 0, 1, TimexClass::AbsoluteConcrete));
            nodes.push(timex("t1", 2, 3, TimexClass::AbsoluteConcrete));
            TemporalDependencyTree::build(nodes, meta_edges())
        };
        assert!(matches!(dup, Err(TreeError::DuplicateId(_))));

        let mut edges = meta_edges();
        edges.push(Edge::new("t9", "ROOT", EdgeLabel::DependOn));
        assert!(matches!(
            TemporalDependencyTree::build(meta_nodes(), edges),
            Err(TreeError::MissingNode { .. })
        ));

        let nodes: Vec<Node> = meta_nodes().into_iter().filter(|n| n.id() != "DCT").collect();
        let edges: Vec<Edge> = meta_edges().into_iter().filter(|e| e.child.as_str() != "DCT").collect();
        assert_eq!(
            TemporalDependencyTree::build(nodes.clone(), edges.clone()),
            Err(TreeError::MissingMetaNode(MetaKind::Dct))
        );
        assert!(TemporalDependencyTree::build_with_meta(nodes, edges).is_ok());

        let mut nodes = meta_nodes();
        nodes.push(timex("t1", 0, 1, TimexClass::RelativeConcrete));
        nodes.push(timex("t2", 2, 3, TimexClass::RelativeConcrete));
        let mut edges = meta_edges();
        edges.push(Edge::new("t1", "t2", EdgeLabel::DependOn));
        edges.push(Edge::new("t2", "t1", EdgeLabel::DependOn));
        assert!(matches!(
            TemporalDependencyTree::build(nodes.clone(), edges),
            Err(TreeError::CycleDetected(_))
        ));
        assert_eq!(
            TemporalDependencyTree::build(nodes, meta_edges()),
            Err(TreeError::MissingParent(NodeId::new("t1")))
        );

        let mut edges = meta_edges();
        edges.push(Edge::new("ROOT", "DCT", EdgeLabel::DependOn));
        assert_eq!(
            TemporalDependencyTree::build(meta_nodes(), edges),
            Err(TreeError::RootHasParent)
        );

        let mut nodes = meta_nodes();
        nodes.push(timex("DCT", 0, 1, TimexClass::AbsoluteConcrete));
        assert!(matches!(
            TemporalDependencyTree::build(nodes, meta_edges()),
            Err(TreeError::ReservedId(_))
        ));
    }

    #[test]
    fn paths_and_lca() {
        let tree = example_2003();
        assert!(tree.path_to_root("ROOT").unwrap().is_empty());
        assert_eq!(
            tree.path_to_root("t2").unwrap(),
            vec![
                Edge::new("t2", "t1", EdgeLabel::DependOn),
                Edge::new("t1", "ROOT", EdgeLabel::DependOn)
            ]
        );
        assert_eq!(tree.lowest_common_ancestor("t2", "t3").unwrap(), "t1");
        assert_eq!(tree.lowest_common_ancestor("t2", "t2").unwrap(), "t2");
        assert_eq!(tree.lowest_common_ancestor("t2", "DCT").unwrap(), "ROOT");
        assert!(matches!(tree.path_to_root("nope"), Err(TreeError::UnknownNode(_))));
        assert!(matches!(
            tree.lowest_common_ancestor("t1", "nope"),
            Err(TreeError::UnknownNode(_))
        ));
    }

    #[test]
    fn deep_chain_path() {
        let mut nodes = meta_nodes();
        let mut edges = meta_edges();
        for i in 0..1000 {
            nodes.push(timex(&format!("c{i:04}"), i, i + 1, TimexClass::RelativeConcrete));
            let parent = if i == 0 { "ROOT".to_owned() } else { format!("c{:04}", i - 1) };
            edges.push(Edge::new(format!("c{i:04}"), parent, EdgeLabel::DependOn));
        }
        let tree = TemporalDependencyTree::build(nodes, edges).unwrap();
        assert_eq!(tree.path_to_root("c0999").unwrap().len(), 1000);
        assert_eq!(tree.depth("c0999").unwrap(), 1000);
    }

    #[test]
    fn char_slices_count_characters() {
        let text = "年3月 March";
        assert_eq!(char_slice(text, Span::new(0, 3)), Some("年3月"));
        assert_eq!(char_slice(text, Span::new(4, 9)), Some("March"));
        assert_eq!(char_slice(text, Span::new(4, 10)), None);
    }

    #[test]
    fn sentence_lookup() {
        let mut draft = DocumentDraft::new("d", Genre::News, "Ab. Cd. Ef.");
        draft.sentence_breaks = Some(vec![3, 7, 11]);
        let doc = draft.build().unwrap();
        assert_eq!(doc.sentence_of(0), 0);
        assert_eq!(doc.sentence_of(4), 1);
        assert_eq!(doc.sentence_of(8), 2);
        assert_eq!(doc.sentence_count(), 3);
    }
}
