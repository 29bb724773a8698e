//! Problem-solving-logic guided curriculum in-context learning.
//!
//! `curricl` builds few-shot prompts for reasoning benchmarks by matching
//! the *problem-solving logic* (PSL) of candidate demonstrations against
//! the logic of the query, sampling by difficulty, and ordering the
//! chosen examples easy → hard. A small harness runs the resulting
//! prompts against a chat-completion endpoint (or replay fixtures) and
//! reports accuracy, example-count, and difficulty-diversity metrics.
//!
//! The pipeline, end to end:
//!
//! 1. [`qdmr`] parses the formal language that describes how a question
//!    decomposes into steps, and extracts its operator sequence.
//! 2. [`corpus`] ingests candidate examples from CSV or line-delimited
//!    JSON into [`psl::Example`] records.
//! 3. [`selector`] keeps the candidates whose logic matches the query
//!    (prefix or anchored-subsequence), samples them by one of four
//!    difficulty strategies, and orders the result as a curriculum.
//! 4. [`prompt`] renders the plan into exact prompt bytes and scores
//!    completions.
//! 5. [`harness`] orchestrates whole experiments: analysis, selection,
//!    rendering, completion, scoring, and reporting.
//!
//! Everything is deterministic given a seed: per-query RNG streams are
//! derived from the global seed and the query id, so adding or removing
//! queries never perturbs the plans of the others.
//!
//! ```
//! use curricl::prelude::*;
//!
//! let corpus = vec![
//!     Example::new("e1", "how many flights leave denver?",
//!                  "Count them. The final answer is 4",
//!                  PslSequence::from_labels(["select", "filter"]).unwrap(), "demo"),
//!     Example::new("e2", "what airlines fly to boston?",
//!                  "List them. The final answer is 2",
//!                  PslSequence::from_labels(["select", "project"]).unwrap(), "demo"),
//! ];
//! let query = Query::new("q1", "what flights are available tomorrow from denver to philadelphia?", "4")
//!     .with_psl(PslSequence::from_labels(["select", "filter", "filter", "filter"]).unwrap());
//!
//! let cfg = PlanConfig::new(7);
//! let plan = build_plan(&corpus, &query, &cfg).unwrap();
//! assert_eq!(plan.sampled, vec!["e1"]);
//! ```

pub mod corpus;
pub mod harness;
pub mod prompt;
pub mod psl;
pub mod qdmr;
pub mod selector;

pub use psl::{DifficultyLevel, Example, Operator, PslSequence, Query, OPERATORS};
pub use qdmr::{parse_analyzer_output, AnalyzerOutput, FormalStep, QdmrProgram};
pub use selector::{build_plan, MatchMode, PlanConfig, SamplingStrategy, SelectionPlan};

/// Common imports for building and running selection pipelines.
pub mod prelude {
    pub use crate::corpus::{corpus_stats, load_corpus, save_corpus, CorpusFormat, CorpusRecord};
    pub use crate::harness::{run_baseline, run_experiment, Baseline, ExperimentConfig, ExperimentReport};
    pub use crate::prompt::{extract_answer, render_prompt, score, AnswerSpec, PromptTemplate};
    pub use crate::psl::{DifficultyLevel, Example, Operator, PslSequence, Query};
    pub use crate::qdmr::{parse_analyzer_output, FormalStep, QdmrProgram};
    pub use crate::selector::{
        build_plan, difficulty_std, is_admissible, order_curriculum, sample, select_candidates,
        MatchMode, PlanConfig, SamplingStrategy, SelectionPlan,
    };
}
