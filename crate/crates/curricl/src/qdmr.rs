//! Parser for the QDMR formal language and for analyzer output.
//!
//! A formal step looks like `FILTER['#1', 'from denver']`: an operator head
//! followed by a bracketed list of single-quoted arguments. `#k` tokens
//! inside arguments are back-references to earlier steps. An analyzer
//! labels a question with two aligned lists:
//!
//! ```text
//! <operators>: ['select', 'filter', 'filter', 'filter']
//! <formal language>: ["SELECT['flights']", "FILTER['#1', 'from denver']",
//!                     "FILTER['#2', 'to philadelphia']", "FILTER['#3', 'if available']"]
//! ```

use crate::psl::{EmptySequence, Operator, PslSequence, UnknownOperator};
use regex::Regex;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

/// Errors from parsing steps, programs, or analyzer output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QdmrParseError {
    #[error("malformed step `{text}`: {reason}")]
    MalformedStep { text: String, reason: String },
    #[error(transparent)]
    UnknownOperator(#[from] UnknownOperator),
    #[error("missing `{0}` section")]
    MissingSection(&'static str),
    #[error("operators list has {operators} entries but formal language has {steps}")]
    LengthMismatch { operators: usize, steps: usize },
    #[error("operator {index} is listed as `{listed}` but the step head is `{parsed}`")]
    OperatorMismatch {
        /// 1-based step index.
        index: usize,
        listed: Operator,
        parsed: Operator,
    },
    #[error("program has no steps")]
    EmptyProgram,
}

impl From<EmptySequence> for QdmrParseError {
    fn from(_: EmptySequence) -> Self {
        QdmrParseError::EmptyProgram
    }
}

fn ref_token_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"#([1-9][0-9]*)").unwrap())
}

/// One step of a formal program: an operator with its text arguments.
///
/// `refs` holds every `#k` back-reference found in the arguments, in
/// argument order, duplicates preserved. References embedded in longer
/// phrases ("border states of #1") count the same as bare `'#1'` arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalStep {
    pub op: Operator,
    pub args: Vec<String>,
    pub refs: Vec<usize>,
}

impl FormalStep {
    pub fn new(op: Operator, args: Vec<String>) -> Self {
        let refs = args
            .iter()
            .flat_map(|arg| {
                ref_token_re()
                    .captures_iter(arg)
                    .map(|c| c[1].parse::<usize>().expect("digits"))
            })
            .collect();
        FormalStep { op, args, refs }
    }

    /// Parse one step of the form `HEAD['arg1', 'arg2', …]`.
    ///
    /// Arguments are single-quoted and comma-separated; commas inside quotes
    /// are kept; escaped quotes are not supported.
    pub fn parse(text: &str) -> Result<Self, QdmrParseError> {
        let malformed = |reason: &str| QdmrParseError::MalformedStep {
            text: text.to_string(),
            reason: reason.to_string(),
        };

        let trimmed = text.trim();
        let open = trimmed.find('[').ok_or_else(|| malformed("missing `[`"))?;
        let head = trimmed[..open].trim();
        if head.is_empty() {
            return Err(malformed("empty head"));
        }
        if !trimmed.ends_with(']') {
            return Err(malformed("missing closing `]`"));
        }
        let op = Operator::from_label(head)?;

        let inner = &trimmed[open + 1..trimmed.len() - 1];
        let mut args = Vec::new();
        let mut rest = inner.trim_start();
        while !rest.is_empty() {
            if !rest.starts_with('\'') {
                return Err(malformed("argument is not single-quoted"));
            }
            let close = rest[1..]
                .find('\'')
                .ok_or_else(|| malformed("unterminated quote"))?;
            args.push(rest[1..1 + close].to_string());
            rest = rest[close + 2..].trim_start();
            match rest.strip_prefix(',') {
                Some(after) => {
                    rest = after.trim_start();
                    if rest.is_empty() {
                        return Err(malformed("trailing comma"));
                    }
                }
                None if rest.is_empty() => break,
                None => return Err(malformed("expected `,` between arguments")),
            }
        }

        Ok(FormalStep::new(op, args))
    }

    /// Canonical rendering: uppercase head, `', '`-separated arguments.
    ///
    /// `render(parse(s))` reproduces `s` up to whitespace normalization
    /// inside the brackets.
    pub fn render(&self) -> String {
        let args = self
            .args
            .iter()
            .map(|a| format!("'{a}'"))
            .collect::<Vec<_>>()
            .join(", ");
        format!("{}[{}]", self.op.label().to_ascii_uppercase(), args)
    }
}

impl fmt::Display for FormalStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// What a back-reference did wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Step i references step j with i ≤ j ≤ total: it points at itself or ahead.
    Forward,
    /// The referenced index is beyond the last step.
    OutOfRange,
}

/// One invalid back-reference in a program. Violations are data, not
/// failures: a parsed program always yields a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefViolation {
    /// 1-based index of the step containing the bad reference.
    pub step: usize,
    /// The referenced step index.
    pub referenced: usize,
    pub kind: ViolationKind,
    /// The offending token, e.g. `#9`.
    pub token: String,
}

impl fmt::Display for RefViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Forward => "forward reference",
            ViolationKind::OutOfRange => "out-of-range reference",
        };
        write!(f, "step {}: {} {}", self.step, kind, self.token)
    }
}

/// A parsed formal program: an ordered, nonempty list of steps.
///
/// Construction does not require the program to be reference-valid, so
/// partial programs stay loadable; run [`QdmrProgram::validate`] to get
/// the violation report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QdmrProgram {
    steps: Vec<FormalStep>,
}

impl QdmrProgram {
    pub fn new(steps: Vec<FormalStep>) -> Result<Self, QdmrParseError> {
        if steps.is_empty() {
            return Err(QdmrParseError::EmptyProgram);
        }
        Ok(QdmrProgram { steps })
    }

    /// Parse each step string in order.
    pub fn parse_steps<I, S>(texts: I) -> Result<Self, QdmrParseError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let steps = texts
            .into_iter()
            .map(|t| FormalStep::parse(t.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        QdmrProgram::new(steps)
    }

    pub fn steps(&self) -> &[FormalStep] {
        &self.steps
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// The ordered projection of step operators: the program's
    /// problem-solving logic.
    pub fn operators(&self) -> PslSequence {
        PslSequence::new(self.steps.iter().map(|s| s.op).collect())
            .expect("programs are nonempty")
    }

    /// Report every forward/self reference and every out-of-range reference.
    /// An empty report means the program is well-formed.
    pub fn validate(&self) -> Vec<RefViolation> {
        let total = self.steps.len();
        let mut violations = Vec::new();
        for (i, step) in self.steps.iter().enumerate() {
            let index = i + 1;
            for &referenced in &step.refs {
                let kind = if referenced > total {
                    ViolationKind::OutOfRange
                } else if referenced >= index {
                    ViolationKind::Forward
                } else {
                    continue;
                };
                violations.push(RefViolation {
                    step: index,
                    referenced,
                    kind,
                    token: format!("#{referenced}"),
                });
            }
        }
        violations
    }

    /// Canonical step strings, one per step.
    pub fn render_steps(&self) -> Vec<String> {
        self.steps.iter().map(|s| s.render()).collect()
    }
}

/// The two aligned sections of an analyzer label: the operator list and the
/// formal program. The lists always agree in length and per-index operator;
/// [`parse_analyzer_output`] rejects anything else.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzerOutput {
    pub operators: PslSequence,
    pub program: QdmrProgram,
}

pub const OPERATORS_MARKER: &str = "<operators>:";
pub const FORMAL_LANGUAGE_MARKER: &str = "<formal language>:";

/// Parse analyzer output containing an `<operators>:` list and a
/// `<formal language>:` list. Prose before, between, and after the two
/// sections is ignored, so raw generative-model output parses as long as
/// the two labeled lists are present.
pub fn parse_analyzer_output(text: &str) -> Result<AnalyzerOutput, QdmrParseError> {
    let operator_items = section_items(text, OPERATORS_MARKER)?;
    let step_items = section_items(text, FORMAL_LANGUAGE_MARKER)?;

    let operators = PslSequence::from_labels(&operator_items).map_err(|e| match e {
        crate::psl::PslError::UnknownOperator(u) => QdmrParseError::UnknownOperator(u),
        crate::psl::PslError::Empty(_) => QdmrParseError::EmptyProgram,
    })?;
    let program = QdmrProgram::parse_steps(&step_items)?;

    if operators.len() != program.len() {
        return Err(QdmrParseError::LengthMismatch {
            operators: operators.len(),
            steps: program.len(),
        });
    }
    for (i, (listed, step)) in operators.ops().iter().zip(program.steps()).enumerate() {
        if *listed != step.op {
            return Err(QdmrParseError::OperatorMismatch {
                index: i + 1,
                listed: *listed,
                parsed: step.op,
            });
        }
    }

    Ok(AnalyzerOutput { operators, program })
}

/// Find `marker` in `text` and parse the bracketed, quoted list after it.
fn section_items(text: &str, marker: &'static str) -> Result<Vec<String>, QdmrParseError> {
    let at = text
        .find(marker)
        .ok_or(QdmrParseError::MissingSection(marker))?;
    let after = &text[at + marker.len()..];
    parse_bracketed_list(after).ok_or(QdmrParseError::MissingSection(marker))
}

/// Parse a `[...]` list whose items are quoted with `'` or `"` (no escapes).
/// Returns `None` when the text after the marker is not such a list.
fn parse_bracketed_list(text: &str) -> Option<Vec<String>> {
    let rest = text.trim_start();
    let mut rest = rest.strip_prefix('[')?;
    let mut items = Vec::new();
    loop {
        rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix(']') {
            let _ = after;
            return Some(items);
        }
        let quote = rest.chars().next()?;
        if quote != '\'' && quote != '"' {
            return None;
        }
        let body = &rest[1..];
        let close = body.find(quote)?;
        items.push(body[..close].to_string());
        rest = body[close + 1..].trim_start();
        if let Some(after) = rest.strip_prefix(',') {
            rest = after;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psl::Operator::*;

    #[test]
    fn parses_the_flights_filter_step() {
        let step = FormalStep::parse("FILTER['#1', 'from denver']").unwrap();
        assert_eq!(step.op, Filter);
        assert_eq!(step.args, vec!["#1", "from denver"]);
        assert_eq!(step.refs, vec![1]);
    }

    #[test]
    fn parses_a_single_argument_select() {
        let step = FormalStep::parse("SELECT['flights']").unwrap();
        assert_eq!(step.op, Select);
        assert_eq!(step.args, vec!["flights"]);
        assert!(step.refs.is_empty());
    }

    #[test]
    fn refs_embedded_in_phrases_count() {
        let step = FormalStep::parse("PROJECT['border states of #1']").unwrap();
        assert_eq!(step.refs, vec![1]);

        let multi = FormalStep::parse("BOOLEAN['if #3 is the same as #4']").unwrap();
        assert_eq!(multi.refs, vec![3, 4]);

        let dup = FormalStep::parse("GROUP['number of #2', 'for each #1', '#2']").unwrap();
        assert_eq!(dup.refs, vec![2, 1, 2]);
    }

    #[test]
    fn hash_zero_is_not_a_reference() {
        let step = FormalStep::parse("FILTER['#0', 'gate #10']").unwrap();
        assert_eq!(step.refs, vec![10]);
    }

    #[test]
    fn unknown_head_is_rejected() {
        let err = FormalStep::parse("FROBNICATE['x']").unwrap_err();
        assert_eq!(err, QdmrParseError::UnknownOperator(UnknownOperator("FROBNICATE".into())));
    }

    #[test]
    fn malformed_steps_are_rejected() {
        for (text, fragment) in [
            ("SELECT'flights'", "missing `[`"),
            ("['flights']", "empty head"),
            ("SELECT['flights'", "missing closing `]`"),
            ("SELECT[flights]", "not single-quoted"),
            ("SELECT['flights]", "unterminated quote"),
            ("SELECT['a' 'b']", "expected `,`"),
            ("SELECT['a',]", "trailing comma"),
        ] {
            match FormalStep::parse(text) {
                Err(QdmrParseError::MalformedStep { reason, .. }) => {
                    assert!(reason.contains(fragment), "{text}: got reason `{reason}`")
                }
                other => panic!("{text}: expected MalformedStep, got {other:?}"),
            }
        }
    }

    #[test]
    fn commas_inside_quotes_are_kept() {
        let step = FormalStep::parse("UNION['#1, #2', 'extra']").unwrap();
        assert_eq!(step.args[0], "#1, #2");
        assert_eq!(step.refs, vec![1, 2]);
    }

    #[test]
    fn render_round_trips_the_flights_program() {
        for text in [
            "SELECT['flights']",
            "FILTER['#1', 'from denver']",
            "FILTER['#2', 'to philadelphia']",
            "FILTER['#3', 'if available']",
        ] {
            let step = FormalStep::parse(text).unwrap();
            assert_eq!(step.render(), text);
        }
    }

    #[test]
    fn render_normalizes_whitespace_and_case() {
        let step = FormalStep::parse("filter[ '#1' ,'from denver' ]").unwrap();
        assert_eq!(step.render(), "FILTER['#1', 'from denver']");
    }

    #[test]
    fn program_operators_project_in_order() {
        let program = QdmrProgram::parse_steps([
            "SELECT['flights']",
            "FILTER['#1', 'from denver']",
            "FILTER['#2', 'to philadelphia']",
            "FILTER['#3', 'if available']",
        ])
        .unwrap();
        assert_eq!(
            program.operators(),
            PslSequence::from_labels(["select", "filter", "filter", "filter"]).unwrap()
        );
        assert!(program.validate().is_empty());
    }

    #[test]
    fn forward_reference_is_reported() {
        let program =
            QdmrProgram::parse_steps(["FILTER['#2', 'x']", "SELECT['y']"]).unwrap();
        let report = program.validate();
        assert_eq!(
            report,
            vec![RefViolation {
                step: 1,
                referenced: 2,
                kind: ViolationKind::Forward,
                token: "#2".into(),
            }]
        );
    }

    #[test]
    fn self_reference_is_a_forward_violation() {
        let program = QdmrProgram::parse_steps(["FILTER['#1', 'x']"]).unwrap();
        assert_eq!(program.validate()[0].kind, ViolationKind::Forward);
    }

    #[test]
    fn out_of_range_reference_is_reported() {
        let program =
            QdmrProgram::parse_steps(["SELECT['y']", "FILTER['#9', 'x']"]).unwrap();
        let report = program.validate();
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].step, 2);
        assert_eq!(report[0].referenced, 9);
        assert_eq!(report[0].kind, ViolationKind::OutOfRange);
        assert_eq!(report[0].token, "#9");
    }

    #[test]
    fn empty_program_is_a_constructor_error() {
        assert_eq!(QdmrProgram::new(vec![]), Err(QdmrParseError::EmptyProgram));
    }

    const FLIGHTS_LABEL: &str = concat!(
        "<operators>: ['select', 'filter', 'filter', 'filter']\n",
        "<formal language>: [\"SELECT['flights']\", \"FILTER['#1', 'from denver']\", ",
        "\"FILTER['#2', 'to philadelphia']\", \"FILTER['#3', 'if available']\"]",
    );

    #[test]
    fn parses_the_flights_label_block() {
        let out = parse_analyzer_output(FLIGHTS_LABEL).unwrap();
        assert_eq!(out.operators.len(), 4);
        assert_eq!(out.program.len(), 4);
        assert_eq!(out.operators, out.program.operators());
    }

    #[test]
    fn tolerates_surrounding_prose() {
        let wrapped = format!(
            "Sure! Here is the breakdown you asked for.\n{FLIGHTS_LABEL}\nLet me know if you need anything else."
        );
        let out = parse_analyzer_output(&wrapped).unwrap();
        assert_eq!(out.operators.len(), 4);
    }

    #[test]
    fn missing_marker_is_reported() {
        let err = parse_analyzer_output("<formal language>: [\"SELECT['x']\"]").unwrap_err();
        assert_eq!(err, QdmrParseError::MissingSection(OPERATORS_MARKER));

        let err = parse_analyzer_output("<operators>: ['select']").unwrap_err();
        assert_eq!(err, QdmrParseError::MissingSection(FORMAL_LANGUAGE_MARKER));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let text = concat!(
            "<operators>: ['select', 'filter', 'filter']\n",
            "<formal language>: [\"SELECT['flights']\", \"FILTER['#1', 'from denver']\", ",
            "\"FILTER['#2', 'to philadelphia']\", \"FILTER['#3', 'if available']\"]",
        );
        assert_eq!(
            parse_analyzer_output(text).unwrap_err(),
            QdmrParseError::LengthMismatch { operators: 3, steps: 4 }
        );
    }

    #[test]
    fn operator_disagreement_is_reported() {
        let text = concat!(
            "<operators>: ['select', 'project']\n",
            "<formal language>: [\"SELECT['flights']\", \"FILTER['#1', 'from denver']\"]",
        );
        assert_eq!(
            parse_analyzer_output(text).unwrap_err(),
            QdmrParseError::OperatorMismatch { index: 2, listed: Project, parsed: Filter }
        );
    }
}
