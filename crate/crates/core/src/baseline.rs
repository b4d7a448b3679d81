//! A deterministic heuristic parser that attaches given nodes into a tree.
//!
//! Nodes are visited in text order. Time expressions attach by class;
//! eventive events prefer a time expression in their own sentence, then the
//! previous eventive event, then a genre default; stative events prefer the
//! previous eventive event. Candidates further back than `window` sentences
//! are ignored, and ties go to the smaller start offset, then the smaller id.

use thiserror::Error;

use crate::format::{build_draft, FormatError};
use crate::model::{
    meta_edges, Document, DocumentDraft, Edge, EdgeLabel, Genre, MetaKind, Node, NodeId, Span, TimexClass,
};
use crate::normalize::TimexSemantics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GenreMode {
    /// Use the document's own genre.
    #[default]
    Auto,
    News,
    Narrative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParserConfig {
    pub genre_mode: GenreMode,
    /// Maximum sentence distance to a candidate parent; at least 1.
    pub window: usize,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            genre_mode: GenreMode::Auto,
            window: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("window must be at least 1")]
    InvalidWindow,
    #[error("relative time expression `{0}` has no semantics and the document has no DCT value")]
    MissingSemantics(NodeId),
    #[error("predicted tree is invalid: {0}")]
    Invalid(#[from] FormatError),
}

struct Candidate<'a> {
    node: &'a Node,
    span: Span,
    sentence: usize,
}

fn meta(kind: MetaKind) -> NodeId {
    NodeId::from(kind)
}

/// Predicted edges for `draft`, including the five meta edges. Edges already
/// present in the draft are ignored.
pub fn predict_edges(draft: &DocumentDraft, config: &ParserConfig) -> Result<Vec<Edge>, BaselineError> {
    if config.window == 0 {
        return Err(BaselineError::InvalidWindow);
    }
    let genre = match config.genre_mode {
        GenreMode::Auto => draft.genre,
        GenreMode::News => Genre::News,
        GenreMode::Narrative => Genre::Narrative,
    };
    let sentence_of = |offset: usize| match &draft.sentence_breaks {
        Some(breaks) => breaks.partition_point(|&b| b <= offset),
        None => 0,
    };
    let mut nodes: Vec<Candidate> = draft
        .nodes
        .iter()
        .filter_map(|node| {
            let span = node.span()?;
            Some(Candidate {
                node,
                span,
                sentence: sentence_of(span.start),
            })
        })
        .collect();
    nodes.sort_by(|a, b| (a.span.start, a.node.id()).cmp(&(b.span.start, b.node.id())));

    let within = |c: &Candidate, parent: &Candidate| c.sentence - parent.sentence <= config.window;
    let is_eventive = |n: &Node| n.as_event().is_some_and(|e| e.class.is_eventive());
    // nearest preceding candidate satisfying `pred`; earlier nodes sort first
    let preceding = |i: usize, pred: &dyn Fn(&Node) -> bool| -> Option<&Candidate> {
        nodes[..i]
            .iter()
            .rev()
            .take_while(|p| within(&nodes[i], p))
            .filter(|p| pred(p.node))
            .min_by_key(|p| (nodes[i].span.start.saturating_sub(p.span.end), p.span.start, p.node.id()))
    };
    let default_parent = match genre {
        Genre::News => meta(MetaKind::Dct),
        Genre::Narrative => meta(MetaKind::PastRef),
    };

    let mut edges = meta_edges();
    for (i, c) in nodes.iter().enumerate() {
        let child = NodeId::new(c.node.id());
        let edge = |parent: NodeId, label| Edge { child: child.clone(), parent, label };
        match c.node {
            Node::Meta(_) => unreachable!("meta nodes have no span"),
            Node::Timex(t) => match t.class {
                TimexClass::Unlocatable => {}
                TimexClass::AbsoluteConcrete => edges.push(edge(meta(MetaKind::Root), EdgeLabel::DependOn)),
                TimexClass::RelativeConcrete => {
                    let concrete = |n: &Node| n.as_timex().is_some_and(|p| p.class.is_concrete());
                    let parent = match preceding(i, &concrete) {
                        Some(p) => NodeId::new(p.node.id()),
                        None if draft.dct.is_none() && t.semantics.is_none() => {
                            return Err(BaselineError::MissingSemantics(child));
                        }
                        None => meta(MetaKind::Dct),
                    };
                    edges.push(edge(parent, EdgeLabel::DependOn));
                }
                TimexClass::Vague => {
                    let parent = match &t.semantics {
                        Some(TimexSemantics::Symbolic(region)) => region.meta(),
                        _ if genre == Genre::Narrative && c.sentence == 0 => MetaKind::PastRef,
                        _ => MetaKind::PresentRef,
                    };
                    edges.push(edge(meta(parent), EdgeLabel::DependOn));
                }
            },
            Node::Event(e) => {
                let eventive = e.class.is_eventive();
                let same_sentence_timex = nodes
                    .iter()
                    .filter(|p| p.sentence == c.sentence)
                    .filter(|p| p.node.as_timex().is_some_and(|t| t.class.is_locatable()))
                    .min_by_key(|p| {
                        let distance = if p.span.start < c.span.start {
                            c.span.start.saturating_sub(p.span.end)
                        } else {
                            p.span.start.saturating_sub(c.span.end)
                        };
                        (distance, p.span.start, p.node.id())
                    });
                let previous_eventive = preceding(i, &is_eventive);
                let (parent, label) = if eventive {
                    match (same_sentence_timex, previous_eventive) {
                        (Some(t), _) => (NodeId::new(t.node.id()), EdgeLabel::Includes),
                        (None, Some(p)) => (NodeId::new(p.node.id()), EdgeLabel::Before),
                        (None, None) => (default_parent.clone(), EdgeLabel::Overlap),
                    }
                } else {
                    match (previous_eventive, same_sentence_timex) {
                        (Some(p), _) => (NodeId::new(p.node.id()), EdgeLabel::Overlap),
                        (None, Some(t)) => (NodeId::new(t.node.id()), EdgeLabel::Overlap),
                        (None, None) => (default_parent.clone(), EdgeLabel::Overlap),
                    }
                };
                edges.push(edge(parent, label));
            }
        }
    }
    Ok(edges)
}

/// Replaces the draft's edges with predicted ones and builds the document.
pub fn predict_tree(mut draft: DocumentDraft, config: &ParserConfig) -> Result<Document, BaselineError> {
    for kind in MetaKind::ALL {
        if !draft.nodes.iter().any(|n| n.meta() == Some(kind)) {
            draft.nodes.push(Node::Meta(kind));
        }
    }
    draft.edges = predict_edges(&draft, config)?;
    Ok(build_draft(draft)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meta_only_document() {
        let draft = DocumentDraft::new("d", Genre::News, "");
        let doc = predict_tree(draft, &ParserConfig::default()).unwrap();
        assert_eq!(doc.tree.edges().count(), 5);
    }

    #[test]
    fn zero_window_rejected() {
        let draft = DocumentDraft::new("d", Genre::News, "");
        let config = ParserConfig {
            window: 0,
            ..ParserConfig::default()
        };
        assert_eq!(predict_tree(draft, &config).unwrap_err(), BaselineError::InvalidWindow);
    }
}
