//! Agreement between two annotations of the same document.
//!
//! Every metric compares multisets of keys built from exact spans. Corpus
//! scores are micro-averaged: counts are summed over documents before
//! precision and recall are taken.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use thiserror::Error;

use crate::model::{Document, EdgeLabel, Genre, Node, NodeKind, Span};
use crate::scalar::Score;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot compare document `{gold}` with `{pred}`: {reason}")]
    DocumentMismatch { gold: String, pred: String, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Counts {
    pub true_positive: u64,
    pub predicted: u64,
    pub gold: u64,
}

impl Counts {
    pub fn prf<S: Score>(self) -> Prf<S> {
        Prf::from_counts(self)
    }
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            true_positive: self.true_positive + o.true_positive,
            predicted: self.predicted + o.predicted,
            gold: self.gold + o.gold,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

impl Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), Add::add)
    }
}

/// Precision, recall and F1 in any [`Score`] field, with the counts behind
/// them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<S> {
    pub precision: S,
    pub recall: S,
    pub f1: S,
    pub counts: Counts,
}

impl<S: Score> Prf<S> {
    pub fn from_counts(counts: Counts) -> Self {
        let ratio = |n: u64, d: u64| {
            if d == 0 {
                S::zero()
            } else {
                S::from_count(n) / S::from_count(d)
            }
        };
        let precision = ratio(counts.true_positive, counts.predicted);
        let recall = ratio(counts.true_positive, counts.gold);
        let sum = precision + recall;
        let f1 = if sum == S::zero() {
            S::zero()
        } else {
            (S::one() + S::one()) * precision * recall / sum
        };
        Prf {
            precision,
            recall,
            f1,
            counts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Timex,
    Event,
}

impl Target {
    fn kind(self) -> NodeKind {
        match self {
            Target::Timex => NodeKind::Timex,
            Target::Event => NodeKind::Event,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Recognition(Target),
    Classification(Target),
    Attachment { target: Target, labeled: bool },
}

impl Metric {
    /// The seven reported variants. Timex edges all carry `DEPEND_ON`, so
    /// only unlabeled timex attachment is reported.
    pub const ALL: [Metric; 7] = [
        Metric::Recognition(Target::Timex),
        Metric::Classification(Target::Timex),
        Metric::Attachment {
            target: Target::Timex,
            labeled: false,
        },
        Metric::Recognition(Target::Event),
        Metric::Classification(Target::Event),
        Metric::Attachment {
            target: Target::Event,
            labeled: false,
        },
        Metric::Attachment {
            target: Target::Event,
            labeled: true,
        },
    ];

    pub fn target(self) -> Target {
        match self {
            Metric::Recognition(t) | Metric::Classification(t) | Metric::Attachment { target: t, .. } => t,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Recognition(_) => "Recognition",
            Metric::Classification(_) => "Classification",
            Metric::Attachment {
                target: Target::Timex, ..
            } => "Parsing",
            Metric::Attachment { labeled: false, .. } => "Relations (unlabeled)",
            Metric::Attachment { labeled: true, .. } => "Relations (labeled)",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target = match self.target() {
            Target::Timex => "Timex",
            Target::Event => "Event",
        };
        write!(f, "{target} {}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ParentKey {
    Meta(&'static str),
    Span(Span),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Span(Span),
    Classified(Span, &'static str),
    Edge(Span, ParentKey, Option<EdgeLabel>),
}

fn class_name(node: &Node) -> &'static str {
    match node {
        Node::Meta(kind) => kind.id(),
        Node::Timex(t) => t.class.name(),
        Node::Event(e) => e.class.name(),
    }
}

fn keys(doc: &Document, metric: Metric) -> BTreeMap<Key, u64> {
    let kind = metric.target().kind();
    let mut out = BTreeMap::new();
    let mut add = |k: Key| *out.entry(k).or_insert(0) += 1;
    match metric {
        Metric::Recognition(_) | Metric::Classification(_) => {
            for node in doc.anchored_nodes().iter().filter(|n| n.kind() == kind) {
                let span = node.span().expect("anchored");
                add(match metric {
                    Metric::Recognition(_) => Key::Span(span),
                    _ => Key::Classified(span, class_name(node)),
                });
            }
        }
        Metric::Attachment { labeled, .. } => {
            for node in doc.tree.nodes().iter().filter(|n| n.kind() == kind) {
                let (parent, label) = doc.tree.parent(node.id()).expect("non-root nodes have parents");
                let parent_key = match parent {
                    Node::Meta(m) => ParentKey::Meta(m.id()),
                    other => ParentKey::Span(other.span().expect("anchored")),
                };
                add(Key::Edge(node.span().expect("anchored"), parent_key, labeled.then_some(label)));
            }
        }
    }
    out
}

/// Raw counts for one metric on one document pair.
pub fn count(gold: &Document, pred: &Document, metric: Metric) -> Result<Counts, MetricsError> {
    let mismatch = |reason| MetricsError::DocumentMismatch {
        gold: gold.id.clone(),
        pred: pred.id.clone(),
        reason,
    };
    if gold.id != pred.id {
        return Err(mismatch("document ids differ"));
    }
    if gold.text != pred.text {
        return Err(mismatch("texts differ"));
    }
    let g = keys(gold, metric);
    let p = keys(pred, metric);
    let true_positive = p.iter().map(|(k, &n)| n.min(g.get(k).copied().unwrap_or(0))).sum();
    Ok(Counts {
        true_positive,
        predicted: p.values().sum(),
        gold: g.values().sum(),
    })
}

pub fn score<S: Score>(gold: &Document, pred: &Document, metric: Metric) -> Result<Prf<S>, MetricsError> {
    count(gold, pred, metric).map(Counts::prf)
}

/// A predicted node counts if a gold node of the same kind has the same span.
pub fn score_recognition(gold: &Document, pred: &Document, target: Target) -> Result<Prf<f64>, MetricsError> {
    score(gold, pred, Metric::Recognition(target))
}

/// Span and class must both match.
pub fn score_classification(gold: &Document, pred: &Document, target: Target) -> Result<Prf<f64>, MetricsError> {
    score(gold, pred, Metric::Classification(target))
}

/// Edges match on child span and parent (meta id or span), and on the label
/// when `labeled`.
pub fn score_attachment(gold: &Document, pred: &Document, target: Target, labeled: bool) -> Result<Prf<f64>, MetricsError> {
    score(gold, pred, Metric::Attachment { target, labeled })
}

/// Micro-averaged counts per genre for every metric in [`Metric::ALL`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreTable {
    pub documents: BTreeMap<Genre, usize>,
    pub counts: BTreeMap<Genre, [Counts; 7]>,
}

impl ScoreTable {
    pub fn add(&mut self, gold: &Document, pred: &Document) -> Result<(), MetricsError> {
        let mut row = [Counts::default(); 7];
        for (slot, metric) in row.iter_mut().zip(Metric::ALL) {
            *slot = count(gold, pred, metric)?;
        }
        let entry = self.counts.entry(gold.genre).or_default();
        for (total, c) in entry.iter_mut().zip(row) {
            *total += c;
        }
        *self.documents.entry(gold.genre).or_default() += 1;
        Ok(())
    }

    pub fn genre(&self, genre: Genre) -> [Counts; 7] {
        self.counts.get(&genre).copied().unwrap_or_default()
    }

    pub fn overall(&self) -> [Counts; 7] {
        let mut out = [Counts::default(); 7];
        for row in self.counts.values() {
            for (o, c) in out.iter_mut().zip(row) {
                *o += *c;
            }
        }
        out
    }

    /// F1 per metric, one column per genre present plus the overall column.
    pub fn render(&self) -> String {
        let genres: Vec<Genre> = self.counts.keys().copied().collect();
        let mut columns: Vec<(String, [Counts; 7])> = genres
            .iter()
            .map(|&g| (format!("{} ({})", g.name(), self.documents[&g]), self.genre(g)))
            .collect();
        columns.push((format!("OVERALL ({})", self.documents.values().sum::<usize>()), self.overall()));
        let mut out = format!("{:<6} {:<22}", "", "");
        for (name, _) in &columns {
            out.push_str(&format!(" {name:>16}"));
        }
        out.push('\n');
        let mut last_target = None;
        for (m, metric) in Metric::ALL.iter().enumerate() {
            let target = match metric.target() {
                Target::Timex => "Timex",
                Target::Event => "Event",
            };
            let head = if last_target == Some(target) { "" } else { target };
            last_target = Some(target);
            out.push_str(&format!("{head:<6} {:<22}", metric.name()));
            for (_, counts) in &columns {
                let prf: Prf<f64> = counts[m].prf();
                out.push_str(&format!(" {:>16.4}", prf.f1));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn prf_from_counts() {
        let c = Counts {
            true_positive: 3,
            predicted: 5,
            gold: 4,
        };
        let exact: Prf<Ratio<i64>> = c.prf();
        assert_eq!(exact.precision, Ratio::new(3, 5));
        assert_eq!(exact.recall, Ratio::new(3, 4));
        assert_eq!(exact.f1, Ratio::new(2, 3));
        let float: Prf<f64> = c.prf();
        assert!((float.f1 - 2.0 * 0.45 / 1.35).abs() < 1e-12);
    }

    #[test]
    fn zero_denominators() {
        let p: Prf<f64> = Counts::default().prf();
        assert_eq!((p.precision, p.recall, p.f1), (0.0, 0.0, 0.0));
    }
}
