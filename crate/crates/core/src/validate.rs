//! Annotation-scheme rules R1 to R14.
//!
//! | rule | requirement |
//! |------|-------------|
//! | R1  | every non-ROOT node has exactly one parent |
//! | R2  | non-ROOT meta nodes attach to ROOT with `DEPEND_ON` |
//! | R3  | a timex depends on a timex or meta node, with `DEPEND_ON` |
//! | R4  | absolute timexes attach to ROOT |
//! | R5  | relative timexes attach to DCT or a concrete timex |
//! | R6  | vague timexes attach to PRESENT_REF, PAST_REF or FUTURE_REF |
//! | R7  | unlocatable timexes stay out of the tree |
//! | R8  | event edges carry a temporal label, or `DEPEND_ON` to ATEMPORAL |
//! | R9  | events never attach to ROOT |
//! | R10 | a stative event does not parent an eventive one |
//! | R11 | classes come from the fixed inventories |
//! | R12 | only relative timexes and events attach to DCT |
//! | R13 | spans of distinct nodes are disjoint |
//! | R14 | timex-to-timex edges carry no temporal label |
//!
//! R1 and R11 concern input that cannot be built into a [`Document`]; they are
//! reported by [`validate_source`].

use std::fmt;

use serde::Serialize;

use crate::format::{build_draft, read_wire, FormatError, WireKind};
use crate::model::{Document, EdgeLabel, MetaKind, Node, TimexClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::R1,
        Rule::R2,
        Rule::R3,
        Rule::R4,
        Rule::R5,
        Rule::R6,
        Rule::R7,
        Rule::R8,
        Rule::R9,
        Rule::R10,
        Rule::R11,
        Rule::R12,
        Rule::R13,
        Rule::R14,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_id(id: &str) -> Option<Rule> {
        let n: usize = id.strip_prefix('R')?.parse().ok()?;
        Rule::ALL.get(n.checked_sub(1)?).copied()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    Strict,
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Diagnostic {
    pub rule: Rule,
    pub severity: Severity,
    pub node: String,
    pub message: String,
}

impl Diagnostic {
    fn error(rule: Rule, node: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            rule,
            severity: Severity::Error,
            node: node.to_owned(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `rule:severity:node:message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.rule, self.severity, self.node, self.message)
    }
}

fn describe(node: &Node) -> String {
    match node {
        Node::Meta(kind) => kind.id().to_owned(),
        Node::Timex(t) => format!("{} timex `{}`", t.class.name(), t.id),
        Node::Event(e) => format!("{} event `{}`", e.class.name(), e.id),
    }
}

/// Checks R2 to R10 and R12 to R14. Output is ordered by node id, then rule.
pub fn validate(doc: &Document, mode: Mode) -> Vec<Diagnostic> {
    let tree = &doc.tree;
    let mut out = Vec::new();
    for (i, node) in tree.nodes().iter().enumerate() {
        let Some((p, label)) = tree.parent_index(i) else { continue };
        let parent = tree.node_at(p);
        let id = node.id();
        let parent_meta = parent.meta();
        match node {
            Node::Meta(_) => {
                if parent_meta != Some(MetaKind::Root) || label != EdgeLabel::DependOn {
                    out.push(Diagnostic::error(
                        Rule::R2,
                        id,
                        format!("meta node must depend on ROOT with DEPEND_ON, found {} {label}", parent.id()),
                    ));
                }
            }
            Node::Timex(t) => {
                if t.class == TimexClass::Unlocatable {
                    out.push(Diagnostic::error(Rule::R7, id, "unlocatable time expression is attached to the tree"));
                    continue;
                }
                match parent {
                    Node::Event(_) => {
                        out.push(Diagnostic::error(
                            Rule::R3,
                            id,
                            format!("time expression depends on {}", describe(parent)),
                        ));
                        continue;
                    }
                    Node::Timex(_) if label != EdgeLabel::DependOn => {
                        out.push(Diagnostic::error(
                            Rule::R14,
                            id,
                            format!("timex-to-timex edge labeled {label}; relations between timexes are computed"),
                        ));
                        continue;
                    }
                    Node::Meta(_) if label != EdgeLabel::DependOn => out.push(Diagnostic::error(
                        Rule::R3,
                        id,
                        format!("time expression edge labeled {label}, expected DEPEND_ON"),
                    )),
                    _ => {}
                }
                let parent_concrete = parent.as_timex().is_some_and(|pt| pt.class.is_concrete());
                match t.class {
                    TimexClass::AbsoluteConcrete if parent_meta == Some(MetaKind::Dct) => out.push(Diagnostic::error(
                        Rule::R12,
                        id,
                        "only relative time expressions and events may depend on DCT",
                    )),
                    TimexClass::AbsoluteConcrete if parent_meta != Some(MetaKind::Root) => out.push(Diagnostic::error(
                        Rule::R4,
                        id,
                        format!("absolute time expression depends on {}, expected ROOT", describe(parent)),
                    )),
                    TimexClass::RelativeConcrete if parent_meta != Some(MetaKind::Dct) && !parent_concrete => {
                        out.push(Diagnostic::error(
                            Rule::R5,
                            id,
                            format!("relative time expression depends on {}, expected DCT or a concrete time expression", describe(parent)),
                        ))
                    }
                    TimexClass::Vague if !parent_meta.is_some_and(MetaKind::is_symbolic_ref) => out.push(Diagnostic::error(
                        Rule::R6,
                        id,
                        format!("vague time expression depends on {}, expected PRESENT_REF, PAST_REF or FUTURE_REF", describe(parent)),
                    )),
                    _ => {}
                }
            }
            Node::Event(e) => {
                let atemporal = parent_meta == Some(MetaKind::Atemporal);
                if atemporal != (label == EdgeLabel::DependOn) {
                    let message = if atemporal {
                        format!("edge to ATEMPORAL labeled {label}, expected DEPEND_ON")
                    } else {
                        "DEPEND_ON is reserved for events under ATEMPORAL".to_owned()
                    };
                    out.push(Diagnostic::error(Rule::R8, id, message));
                }
                if parent_meta == Some(MetaKind::Root) {
                    out.push(Diagnostic::error(Rule::R9, id, "event depends directly on ROOT"));
                }
                if let Node::Event(pe) = parent {
                    if e.class.is_eventive() && !pe.class.is_eventive() {
                        out.push(Diagnostic {
                            rule: Rule::R10,
                            severity: match mode {
                                Mode::Strict => Severity::Error,
                                Mode::Lenient => Severity::Warning,
                            },
                            node: id.to_owned(),
                            message: format!("eventive event depends on {}", describe(parent)),
                        });
                    }
                }
            }
        }
    }
    out.extend(overlapping_spans(doc));
    out.sort_by(|a, b| a.node.cmp(&b.node).then(a.rule.cmp(&b.rule)));
    out
}

fn overlapping_spans(doc: &Document) -> Vec<Diagnostic> {
    let mut anchored: Vec<(crate::model::Span, String)> = doc
        .anchored_nodes()
        .into_iter()
        .map(|n| (n.span().expect("anchored"), n.id().to_owned()))
        .collect();
    anchored.sort();
    let mut out = Vec::new();
    for (i, (span, id)) in anchored.iter().enumerate() {
        for (other, other_id) in &anchored[i + 1..] {
            if other.start >= span.end {
                break;
            }
            let (first, second) = if id < other_id { (id, other_id) } else { (other_id, id) };
            out.push(Diagnostic::error(
                Rule::R13,
                second,
                format!("span [{}, {}) overlaps `{first}`", span.start.max(other.start), span.end.min(other.end)),
            ));
        }
    }
    out
}

/// Validates raw document bytes, reporting R1 and R11 for input that cannot
/// be built into a tree. Other malformed input is an error.
pub fn validate_source(bytes: &[u8], mode: Mode) -> Result<Vec<Diagnostic>, FormatError> {
    let wire = read_wire(bytes)?;
    let unknown = wire.unknown_classes();
    if !unknown.is_empty() {
        let mut out: Vec<Diagnostic> = unknown
            .into_iter()
            .map(|u| {
                let kind = if u.kind == WireKind::Timex { "timex" } else { "event" };
                Diagnostic::error(Rule::R11, &u.node, format!("`{}` is not a {kind} class", u.class))
            })
            .collect();
        out.sort_by(|a, b| a.node.cmp(&b.node));
        return Ok(out);
    }
    match build_draft(wire.into_draft()?) {
        Ok(doc) => Ok(validate(&doc, mode)),
        Err(FormatError::Invariant(e)) if e.is_structural() => Ok(vec![Diagnostic::error(
            Rule::R1,
            e.node().unwrap_or(MetaKind::Root.id()),
            e.to_string(),
        )]),
        Err(e) => Err(e),
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_ids() {
        assert_eq!(Rule::R10.to_string(), "R10");
        assert_eq!(Rule::from_id("R14"), Some(Rule::R14));
        assert_eq!(Rule::from_id("R0"), None);
        assert_eq!(Rule::from_id("R15"), None);
    }
}
