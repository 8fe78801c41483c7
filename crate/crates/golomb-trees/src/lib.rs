//! Nested Golomb-style recursions and their labeled-tree interpretations.
//!
//! This crate computes solutions to the nested recursion family
//!
//! ```text
//! g(n) = g(n - s - g(n - j)) + λj
//! ```
//!
//! (and its k-term generalization), builds the two infinite labeled trees
//! whose leaf-weight counts solve it (the knot variant and the tail
//! variant), and evaluates the λ = 1 closed forms. The three
//! engines (recursion, tree leaf-weight counting, closed form) are kept
//! deliberately independent so they can cross-check each other; the
//! [`verify`] module and the `verify` CLI subcommand run that
//! cross-verification over parameter grids.
//!
//! Sequences are 1-indexed throughout: `g(1)` is the first term and index 0
//! never exists. All arithmetic is signed 64-bit and checked; overflow is a
//! reported error, never a silent wraparound.

pub mod cli;
pub mod closed_forms;
pub mod pruning;
pub mod recurrence;
pub mod tree;
pub mod verify;

pub use closed_forms::{
    closed_form_j1, closed_form_lambda1, frequency_lambda1, golomb_closed, isqrt_exact,
    last_leaf_label, leaf_label, reduce_params, ClosedFormError, LeafPosition, ReducedParams,
};
pub use pruning::{
    min_prunable_cutoff, prune, structurally_equal, verify_prune_identity, PruneCheck,
    PruneError, PruneResult,
};
pub use recurrence::{
    analyze, eval_general, eval_golomb, frequency_of, EvalError, FrequencyTable, GeneralParams,
    GolombParams, InitialConditions, ParamError, Params, SequenceBuffer, SequenceStats, Source,
};
pub use tree::{
    assign_labels, build_skeleton, initial_conditions, leaf_records, leaf_weight_sequence,
    prefix_view, LabelRange, LabeledTree, LeafRecord, Node, NodeId, NodeKind, PartialSubtree,
    PrefixView, SubtreeSpan, TreeError, TreeSkeleton, TreeVariant, MAX_SKELETON_NODES,
};
pub use verify::{run_suite, CheckOutcome, GridConfig, SuiteReport};
