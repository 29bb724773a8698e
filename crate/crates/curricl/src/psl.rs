//! Core domain types: operators, problem-solving logic, examples, and queries.
//!
//! A question's *problem-solving logic* (PSL) is the ordered sequence of
//! QDMR operators that its decomposition consists of. The number of
//! operators in the sequence is the question's difficulty.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// One of the 13 QDMR step kinds.
///
/// No other value is representable; parsing any other label fails with
/// [`UnknownOperator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Select,
    Filter,
    Project,
    Aggregate,
    Group,
    Superlative,
    Comparative,
    Union,
    Intersection,
    Discard,
    Sort,
    Boolean,
    Arithmetic,
}

/// All 13 operators in canonical order.
pub const OPERATORS: [Operator; 13] = [
    Operator::Select,
    Operator::Filter,
    Operator::Project,
    Operator::Aggregate,
    Operator::Group,
    Operator::Superlative,
    Operator::Comparative,
    Operator::Union,
    Operator::Intersection,
    Operator::Discard,
    Operator::Sort,
    Operator::Boolean,
    Operator::Arithmetic,
];

/// Raised when a label is not one of the 13 operator names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown operator `{0}`")]
pub struct UnknownOperator(pub String);

impl Operator {
    /// The canonical (lowercase) label.
    pub fn label(self) -> &'static str {
        match self {
            Operator::Select => "select",
            Operator::Filter => "filter",
            Operator::Project => "project",
            Operator::Aggregate => "aggregate",
            Operator::Group => "group",
            Operator::Superlative => "superlative",
            Operator::Comparative => "comparative",
            Operator::Union => "union",
            Operator::Intersection => "intersection",
            Operator::Discard => "discard",
            Operator::Sort => "sort",
            Operator::Boolean => "boolean",
            Operator::Arithmetic => "arithmetic",
        }
    }

    /// Parse a label, ignoring case and surrounding whitespace.
    pub fn from_label(label: &str) -> Result<Self, UnknownOperator> {
        let trimmed = label.trim();
        let lower = trimmed.to_ascii_lowercase();
        OPERATORS
            .iter()
            .copied()
            .find(|op| op.label() == lower)
            .ok_or_else(|| UnknownOperator(trimmed.to_string()))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Operator {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::from_label(s)
    }
}

/// Raised when constructing a [`PslSequence`] from zero operators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("problem-solving logic must contain at least one operator")]
pub struct EmptySequence;

/// An ordered, nonempty sequence of operators: the problem-solving logic
/// of one question.
///
/// Emptiness is a constructor error, not a value — every decomposition has
/// at least one step. Two sequences are equal iff they have the same length
/// and pairwise-equal operators; that structural equality is the matching
/// primitive used by the selector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Operator>", into = "Vec<Operator>")]
pub struct PslSequence(Vec<Operator>);

impl PslSequence {
    pub fn new(ops: Vec<Operator>) -> Result<Self, EmptySequence> {
        if ops.is_empty() {
            Err(EmptySequence)
        } else {
            Ok(PslSequence(ops))
        }
    }

    /// Parse a sequence from textual labels, e.g. `["select", "FILTER"]`.
    pub fn from_labels<I, S>(labels: I) -> Result<Self, PslError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let ops = labels
            .into_iter()
            .map(|l| Operator::from_label(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PslSequence::new(ops)?)
    }

    pub fn ops(&self) -> &[Operator] {
        &self.0
    }

    /// Number of decomposition steps. Always at least 1.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// The difficulty of a question is the number of steps in its logic.
    pub fn difficulty(&self) -> DifficultyLevel {
        DifficultyLevel(self.0.len())
    }

    /// Canonical labels of the sequence, in order.
    pub fn labels(&self) -> Vec<&'static str> {
        self.0.iter().map(|op| op.label()).collect()
    }
}

impl TryFrom<Vec<Operator>> for PslSequence {
    type Error = EmptySequence;

    fn try_from(ops: Vec<Operator>) -> Result<Self, Self::Error> {
        PslSequence::new(ops)
    }
}

impl From<PslSequence> for Vec<Operator> {
    fn from(seq: PslSequence) -> Self {
        seq.0
    }
}

impl fmt::Display for PslSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            f.write_str(op.label())?;
        }
        Ok(())
    }
}

/// Errors from constructing problem-solving logic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PslError {
    #[error(transparent)]
    UnknownOperator(#[from] UnknownOperator),
    #[error(transparent)]
    Empty(#[from] EmptySequence),
}

/// Difficulty of a question: the number of operations in its logic.
///
/// Only obtainable from a [`PslSequence`], so the count is always positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DifficultyLevel(usize);

impl DifficultyLevel {
    pub fn steps(self) -> usize {
        self.0
    }
}

impl fmt::Display for DifficultyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A candidate demonstration: a worked question/answer pair together with
/// its problem-solving logic.
///
/// `answer` is `None` for decomposition-only records (some corpora store
/// decompositions without final answers). Such examples load fine but are
/// not promptable: the selector skips them and the renderer rejects them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    pub question: String,
    pub answer: Option<String>,
    pub psl: PslSequence,
    /// Benchmark or corpus tag, e.g. `svamp`.
    pub source: String,
}

impl Example {
    pub fn new(
        id: impl Into<String>,
        question: impl Into<String>,
        answer: impl Into<String>,
        psl: PslSequence,
        source: impl Into<String>,
    ) -> Self {
        Example {
            id: id.into(),
            question: question.into(),
            answer: Some(answer.into()),
            psl,
            source: source.into(),
        }
    }

    /// A decomposition-only example with no answer text.
    pub fn without_answer(
        id: impl Into<String>,
        question: impl Into<String>,
        psl: PslSequence,
        source: impl Into<String>,
    ) -> Self {
        Example {
            id: id.into(),
            question: question.into(),
            answer: None,
            psl,
            source: source.into(),
        }
    }

    /// Whether the example can appear in a prompt (it has answer text).
    pub fn promptable(&self) -> bool {
        self.answer.as_deref().is_some_and(|a| !a.trim().is_empty())
    }

    pub fn difficulty(&self) -> DifficultyLevel {
        self.psl.difficulty()
    }
}

/// A test item: the question to solve, its gold answer, and — once analyzed —
/// its problem-solving logic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub question: String,
    /// Gold answer in the benchmark's answer format (numeric literal,
    /// choice label, or yes/no).
    pub gold: String,
    /// Present after analysis; `None` until an analyzer binding fills it in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psl: Option<PslSequence>,
}

impl Query {
    pub fn new(id: impl Into<String>, question: impl Into<String>, gold: impl Into<String>) -> Self {
        Query {
            id: id.into(),
            question: question.into(),
            gold: gold.into(),
            psl: None,
        }
    }

    pub fn with_psl(mut self, psl: PslSequence) -> Self {
        self.psl = Some(psl);
        self
    }
}
