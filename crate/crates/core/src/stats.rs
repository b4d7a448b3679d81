//! Corpus statistics: sizes, class and label distributions, and the
//! parent-kind by child-kind matrix.

use std::fmt::Write as _;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::model::{Document, EdgeLabel, EventClass, Genre, Node, TimexClass};

/// Child kinds, in matrix row order.
pub const CHILD_KINDS: [&str; 3] = ["Time Expression", "Eventive Event", "Stative Event"];
/// Parent kinds, in matrix column order.
pub const PARENT_KINDS: [&str; 4] = ["Pre-defined Node", "Time Expression", "Eventive Event", "Stative Event"];
/// Locatable timex classes, in distribution order.
pub const TIMEX_CLASSES: [TimexClass; 3] = [TimexClass::AbsoluteConcrete, TimexClass::RelativeConcrete, TimexClass::Vague];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GenreCounts {
    pub documents: u64,
    pub sentences: u64,
    /// Documents without sentence breaks; they contribute no sentences.
    pub missing_sentence_breaks: u64,
    pub timexes: u64,
    pub events: u64,
    /// Indexed like [`TIMEX_CLASSES`].
    pub timex_classes: [u64; 3],
    /// Unlocatable timexes, reported outside the class distribution.
    pub unlocatable: u64,
    /// Indexed like [`EventClass::ALL`].
    pub event_classes: [u64; 8],
    /// Indexed like [`EdgeLabel::ALL`]; meta-node edges are excluded.
    pub edge_labels: [u64; 5],
    /// Rows follow [`CHILD_KINDS`], columns [`PARENT_KINDS`].
    pub matrix: [[u64; 4]; 3],
}

fn add_arrays<const N: usize>(a: &mut [u64; N], b: &[u64; N]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

impl AddAssign for GenreCounts {
    fn add_assign(&mut self, o: GenreCounts) {
        self.documents += o.documents;
        self.sentences += o.sentences;
        self.missing_sentence_breaks += o.missing_sentence_breaks;
        self.timexes += o.timexes;
        self.events += o.events;
        self.unlocatable += o.unlocatable;
        add_arrays(&mut self.timex_classes, &o.timex_classes);
        add_arrays(&mut self.event_classes, &o.event_classes);
        add_arrays(&mut self.edge_labels, &o.edge_labels);
        for (row, other) in self.matrix.iter_mut().zip(&o.matrix) {
            add_arrays(row, other);
        }
    }
}

impl Add for GenreCounts {
    type Output = GenreCounts;
    fn add(mut self, o: GenreCounts) -> GenreCounts {
        self += o;
        self
    }
}

impl GenreCounts {
    pub fn label(&self, label: EdgeLabel) -> u64 {
        self.edge_labels[EdgeLabel::ALL.iter().position(|&l| l == label).expect("known label")]
    }

    /// BEFORE and AFTER counted together.
    pub fn before_after(&self) -> u64 {
        self.label(EdgeLabel::Before) + self.label(EdgeLabel::After)
    }

    pub fn edge_total(&self) -> u64 {
        self.edge_labels.iter().sum()
    }
}

fn child_row(node: &Node) -> Option<usize> {
    match node {
        Node::Meta(_) => None,
        Node::Timex(_) => Some(0),
        Node::Event(e) if e.class.is_eventive() => Some(1),
        Node::Event(_) => Some(2),
    }
}

fn parent_column(node: &Node) -> usize {
    match node {
        Node::Meta(_) => 0,
        Node::Timex(_) => 1,
        Node::Event(e) if e.class.is_eventive() => 2,
        Node::Event(_) => 3,
    }
}

pub fn document_counts(doc: &Document) -> GenreCounts {
    let mut c = GenreCounts {
        documents: 1,
        sentences: doc.sentence_count() as u64,
        missing_sentence_breaks: u64::from(doc.sentence_breaks.is_none()),
        unlocatable: doc.unattached.len() as u64,
        ..GenreCounts::default()
    };
    let tree = &doc.tree;
    for node in tree.nodes() {
        match node {
            Node::Meta(_) => continue,
            Node::Timex(t) => match TIMEX_CLASSES.iter().position(|&k| k == t.class) {
                Some(i) => {
                    c.timexes += 1;
                    c.timex_classes[i] += 1;
                }
                None => c.unlocatable += 1,
            },
            Node::Event(e) => {
                c.events += 1;
                c.event_classes[EventClass::ALL.iter().position(|&k| k == e.class).expect("known class")] += 1;
            }
        }
        let (parent, label) = tree.parent(node.id()).expect("anchored nodes have parents");
        c.edge_labels[EdgeLabel::ALL.iter().position(|&l| l == label).expect("known label")] += 1;
        let row = child_row(node).expect("anchored");
        c.matrix[row][parent_column(parent)] += 1;
    }
    c
}

/// Integer percentages of `counts` summing to exactly 100 (largest
/// remainder; ties go to the earlier entry). All zeros when the total is 0.
pub fn percentages(counts: &[u64]) -> Vec<u64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut out: Vec<u64> = counts.iter().map(|&c| 100 * c / total).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(100 * counts[i] % total), i));
    let missing = 100 - out.iter().sum::<u64>();
    for &i in order.iter().take(missing as usize) {
        out[i] += 1;
    }
    out
}


#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub news: GenreCounts,
    pub narrative: GenreCounts,
    pub warnings: Vec<String>,
}

impl CorpusReport {
    pub fn genre(&self, genre: Genre) -> &GenreCounts {
        match genre {
            Genre::News => &self.news,
            Genre::Narrative => &self.narrative,
        }
    }

    pub fn total(&self) -> GenreCounts {
        self.news + self.narrative
    }
}

pub fn corpus_report<'a>(documents: impl IntoIterator<Item = &'a Document>) -> CorpusReport {
    let mut report = CorpusReport::default();
    for doc in documents {
        let counts = document_counts(doc);
        if doc.sentence_breaks.is_none() {
            report.warnings.push(format!("document `{}` has no sentence breaks; counted as 0 sentences", doc.id));
        }
        match doc.genre {
            Genre::News => report.news += counts,
            Genre::Narrative => report.narrative += counts,
        }
    }
    report
}

/// The matrix component of [`corpus_report`] for one genre or the total.
pub fn parent_child_matrix(counts: &GenreCounts) -> [[u64; 4]; 3] {
    counts.matrix
}

/// Published figures for the full released corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublishedFigures {
    pub genre: Genre,
    pub documents: u64,
    pub sentences: u64,
    pub timexes: u64,
    pub events: u64,
    /// Includes, Before(After), Overlap, Depend-on.
    pub labels: [u64; 4],
}

pub const PUBLISHED: [PublishedFigures; 2] = [
    PublishedFigures {
        genre: Genre::News,
        documents: 115,
        sentences: 2841,
        timexes: 1167,
        events: 4807,
        labels: [1096, 507, 3246, 1125],
    },
    PublishedFigures {
        genre: Genre::Narrative,
        documents: 120,
        sentences: 3662,
        timexes: 131,
        events: 10976,
        labels: [157, 5885, 4914, 151],
    },
];

/// Known inconsistencies within the publication itself.
pub fn known_discrepancy(genre: Genre) -> &'static str {
    match genre {
        Genre::News => "the prose gives 1166 time expressions and 4805 events against 1,167 and 4,807 in the corpus table",
        Genre::Narrative => "the prose gives 132/10314 time expressions/events against 131/10,976 in the corpus table",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub name: &'static str,
    pub published: u64,
    pub observed: u64,
}

impl ComparisonRow {
    pub fn matches(&self) -> bool {
        self.published == self.observed
    }
}

/// Observed counts against the published ones, for a genre whose document
/// count equals the published corpus size; `None` otherwise.
pub fn compare_published(counts: &GenreCounts, genre: Genre) -> Option<Vec<ComparisonRow>> {
    let p = PUBLISHED.iter().find(|p| p.genre == genre)?;
    if counts.documents != p.documents {
        return None;
    }
    let row = |name, published, observed| ComparisonRow { name, published, observed };
    Some(vec![
        row("documents", p.documents, counts.documents),
        row("sentences", p.sentences, counts.sentences),
        row("timexes", p.timexes, counts.timexes),
        row("events", p.events, counts.events),
        row("Includes", p.labels[0], counts.label(EdgeLabel::Includes)),
        row("Before(After)", p.labels[1], counts.before_after()),
        row("Overlap", p.labels[2], counts.label(EdgeLabel::Overlap)),
        row("Depend-on", p.labels[3], counts.label(EdgeLabel::DependOn)),
    ])
}

/// Entry `i` of a distribution with its percentage.
fn cell(values: &[u64], i: usize) -> String {
    format!("{} ({}%)", values[i], percentages(values)[i])
}

fn label_distribution(c: &GenreCounts) -> [u64; 4] {
    [
        c.label(EdgeLabel::Includes),
        c.before_after(),
        c.label(EdgeLabel::Overlap),
        c.label(EdgeLabel::DependOn),
    ]
}

/// Plain-text tables mirroring the published layout.
pub fn render_report(report: &CorpusReport) -> String {
    let columns = [("News", report.news), ("Narratives", report.narrative), ("Total", report.total())];
    let mut out = String::new();
    let header = |out: &mut String, title: &str| {
        let _ = write!(out, "{title:<24}");
        for (name, _) in &columns {
            let _ = write!(out, " {name:>16}");
        }
        out.push('\n');
    };
    let row = |out: &mut String, name: &str, values: &mut dyn Iterator<Item = String>| {
        let _ = write!(out, "{name:<24}");
        for v in values {
            let _ = write!(out, " {v:>16}");
        }
        out.push('\n');
    };

    header(&mut out, "Corpus");
    row(&mut out, "Docs", &mut columns.iter().map(|(_, c)| c.documents.to_string()));
    row(&mut out, "Sentences", &mut columns.iter().map(|(_, c)| c.sentences.to_string()));
    row(&mut out, "Timexes", &mut columns.iter().map(|(_, c)| c.timexes.to_string()));
    row(&mut out, "Events", &mut columns.iter().map(|(_, c)| c.events.to_string()));

    out.push('\n');
    header(&mut out, "Time expression type");
    for (i, class) in TIMEX_CLASSES.iter().enumerate() {
        row(&mut out, class.name(), &mut columns.iter().map(|(_, c)| cell(&c.timex_classes, i)));
    }
    let _ = writeln!(
        out,
        "  unlocatable (not in tree): {}",
        columns.iter().map(|(n, c)| format!("{n} {}", c.unlocatable)).collect::<Vec<_>>().join(", ")
    );

    out.push('\n');
    header(&mut out, "Event type");
    for (i, class) in EventClass::ALL.iter().enumerate() {
        row(&mut out, class.name(), &mut columns.iter().map(|(_, c)| cell(&c.event_classes, i)));
    }

    out.push('\n');
    header(&mut out, "Edge label");
    row(&mut out, "Includes", &mut columns.iter().map(|(_, c)| cell(&label_distribution(c), 0)));
    row(&mut out, "Before(After)", &mut columns.iter().map(|(_, c)| cell(&label_distribution(c), 1)));
    row(&mut out, "  Before", &mut columns.iter().map(|(_, c)| c.label(EdgeLabel::Before).to_string()));
    row(&mut out, "  After", &mut columns.iter().map(|(_, c)| c.label(EdgeLabel::After).to_string()));
    row(&mut out, "Overlap", &mut columns.iter().map(|(_, c)| cell(&label_distribution(c), 2)));
    row(&mut out, "Depend-on", &mut columns.iter().map(|(_, c)| cell(&label_distribution(c), 3)));

    for (name, counts) in &columns {
        out.push('\n');
        let _ = write!(out, "{:<24}", format!("{name}: child \\ parent"));
        for p in PARENT_KINDS {
            let _ = write!(out, " {p:>18}");
        }
        out.push('\n');
        for (r, child) in CHILD_KINDS.iter().enumerate() {
            let _ = write!(out, "{child:<24}");
            for i in 0..PARENT_KINDS.len() {
                let _ = write!(out, " {:>18}", cell(&counts.matrix[r], i));
            }
            out.push('\n');
        }
    }

    for genre in Genre::ALL {
        let Some(rows) = compare_published(report.genre(genre), genre) else { continue };
        let _ = writeln!(out, "\nPublished figures ({}):", genre.name());
        for r in &rows {
            let status = if r.matches() { "ok" } else { "DIFFERS" };
            let _ = writeln!(out, "  {:<16} published {:>6} observed {:>6} {status}", r.name, r.published, r.observed);
        }
        let _ = writeln!(out, "  note: {}", known_discrepancy(genre));
    }

    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages_sum_to_one_hundred() {
        assert_eq!(percentages(&[1, 1]), vec![50, 50]);
        assert_eq!(percentages(&[1; 8]), vec![13, 13, 13, 13, 12, 12, 12, 12]);
        assert_eq!(percentages(&[1, 1, 1]), vec![34, 33, 33]);
        assert_eq!(percentages(&[1078, 89]), vec![92, 8]);
        assert_eq!(percentages(&[0, 0]), vec![0, 0]);
        assert_eq!(percentages(&[]), Vec::<u64>::new());
    }
}
