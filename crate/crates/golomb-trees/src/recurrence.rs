//! Evaluators for the nested recursion family and its Golomb-style specialization.
//!
//! The general evaluator computes prefixes of
//!
//! ```text
//! R(n) = Σ_{i=1}^{k} R(n − s − (i−1)j − R(n − ij)) + ν
//! ```
//!
//! and the specialized evaluator computes
//!
//! ```text
//! g(n) = g(n − s − g(n − j)) + λj
//! ```
//!
//! which is the k = 1, ν = λj member of the family. Sequences are 1-indexed
//! throughout; index 0 does not exist. Both evaluators accept arbitrary
//! caller-supplied initial conditions and fill a dense memo from left to
//! right, so every term costs O(k). A nested argument that leaves [1, n−1]
//! or an overflow of signed 64-bit arithmetic aborts evaluation with the
//! index that failed; every smaller index has been assigned a value first.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Parameters (k, j, s, ν) of the general nested recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneralParams {
    k: i64,
    j: i64,
    s: i64,
    nu: i64,
}

impl GeneralParams {
    /// Validates k ≥ 1, j ≥ 1, s ≥ 0. The additive constant ν may be any integer.
    pub fn new(k: i64, j: i64, s: i64, nu: i64) -> Result<Self, ParamError> {
        if k < 1 {
            return Err(ParamError::KTooSmall(k));
        }
        if j < 1 {
            return Err(ParamError::JTooSmall(j));
        }
        if s < 0 {
            return Err(ParamError::SNegative(s));
        }
        Ok(Self { k, j, s, nu })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn nu(&self) -> i64 {
        self.nu
    }
}

impl fmt::Display for GeneralParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} j={} s={} nu={}", self.k, self.j, self.s, self.nu)
    }
}

/// Parameters (j, s, λ) of the specialized recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GolombParams {
    j: i64,
    s: i64,
    lambda: i64,
}

impl GolombParams {
    /// Validates j ≥ 1, s ≥ 0, λ ≥ 1.
    pub fn new(j: i64, s: i64, lambda: i64) -> Result<Self, ParamError> {
        if j < 1 {
            return Err(ParamError::JTooSmall(j));
        }
        if s < 0 {
            return Err(ParamError::SNegative(s));
        }
        if lambda < 1 {
            return Err(ParamError::LambdaTooSmall(lambda));
        }
        Ok(Self { j, s, lambda })
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// The additive step λj applied at every recursive expansion, or `None`
    /// when the product leaves the 64-bit range.
    pub fn step(&self) -> Option<i64> {
        self.lambda.checked_mul(self.j)
    }

    /// Length 3 + 2s + λj of the initial segment that pins the tree-derived
    /// solution, or `None` when it leaves the 64-bit range.
    pub fn initial_segment_len(&self) -> Option<i64> {
        let step = self.step()?;
        self.s
            .checked_mul(2)
            .and_then(|two_s| two_s.checked_add(3))
            .and_then(|base| base.checked_add(step))
    }
}

impl fmt::Display for GolombParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j={} s={} lambda={}", self.j, self.s, self.lambda)
    }
}

/// The parameter tuple a sequence buffer was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Params {
    General(GeneralParams),
    Golomb(GolombParams),
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::General(p) => p.fmt(f),
            Params::Golomb(p) => p.fmt(f),
        }
    }
}

/// Which engine produced a sequence buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Recursion,
    TreeWeight,
    ClosedForm,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Recursion => "recursion",
            Source::TreeWeight => "tree-weight",
            Source::ClosedForm => "closed-form",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A 1-indexed initial segment g(1)..g(L) supplied to an evaluator.
///
/// The values are immutable once constructed. Any integer list of length
/// ≥ 1 is accepted; definedness of the recursion under these values is
/// checked per step during evaluation, not up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialConditions {
    values: Vec<i64>,
}

impl InitialConditions {
    pub fn new(values: Vec<i64>) -> Result<Self, ParamError> {
        if values.is_empty() {
            return Err(ParamError::EmptyInit);
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The value at 1-based index `n`. Panics if `n` is 0 or past the end.
    pub fn get(&self, n: usize) -> i64 {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// A finite 1-indexed sequence prefix together with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceBuffer {
    params: Params,
    source: Source,
    values: Vec<i64>,
}

impl SequenceBuffer {
    pub(crate) fn from_parts(params: Params, source: Source, values: Vec<i64>) -> Self {
        Self {
            params,
            source,
            values,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The value at 1-based index `n`. Panics if `n` is 0 or past the end.
    pub fn get(&self, n: usize) -> i64 {
        self.values[n - 1]
    }

    pub fn last(&self) -> Option<i64> {
        self.values.last().copied()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// Diagnostics for a sequence prefix.
///
/// `is_slow` holds when every consecutive difference is 0 or 1, which
/// implies `is_monotone` and `max_step ≤ 1`. `max_step` is 0 for prefixes
/// shorter than two terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceStats {
    pub is_slow: bool,
    pub is_monotone: bool,
    pub max_step: i64,
    pub frequency: FrequencyTable,
}

/// Map from value to its number of occurrences within a sequence prefix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    entries: BTreeMap<i64, i64>,
}

impl FrequencyTable {
    pub fn from_values(values: &[i64]) -> Self {
        let mut entries = BTreeMap::new();
        for &v in values {
            *entries.entry(v).or_insert(0) += 1;
        }
        Self { entries }
    }

    /// Occurrences of `value`; 0 if absent.
    pub fn count(&self, value: i64) -> i64 {
        self.entries.get(&value).copied().unwrap_or(0)
    }

    /// Distinct values in ascending order with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.entries.iter().map(|(&v, &c)| (v, c))
    }

    /// Number of distinct values.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all counts, which equals the length of the scanned prefix.
    pub fn total(&self) -> i64 {
        self.entries.values().sum()
    }
}

/// Parameter or initial-condition validation failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("k must be at least 1, got {0}")]
    KTooSmall(i64),
    #[error("j must be at least 1, got {0}")]
    JTooSmall(i64),
    #[error("s must be non-negative, got {0}")]
    SNegative(i64),
    #[error("lambda must be at least 1, got {0}")]
    LambdaTooSmall(i64),
    #[error("initial conditions must contain at least one value")]
    EmptyInit,
}

/// Evaluation failure at a specific index.
///
/// `ArgumentOutOfRange` is raised exactly when a nested argument
/// n − s − (i−1)j − R(n − ij), or the inner index n − ij itself, falls
/// outside [1, n−1]. `Overflow` is raised when checked 64-bit arithmetic
/// overflows while computing the term at `at`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("nested argument {inner} falls outside [1, {}] at index {at}", .at - 1)]
    ArgumentOutOfRange { at: usize, inner: i64 },
    #[error("64-bit overflow while evaluating index {at}")]
    Overflow { at: usize },
}

impl EvalError {
    /// The index whose term could not be computed.
    pub fn at(&self) -> usize {
        match self {
            EvalError::ArgumentOutOfRange { at, .. } => *at,
            EvalError::Overflow { at } => *at,
        }
    }
}

/// Evaluates R(1..n_max) for the general recursion.
///
/// For n ≤ len(init) the initial values are copied through; beyond them
/// each term is computed from already-memoized values only.
pub fn eval_general(
    params: GeneralParams,
    init: &InitialConditions,
    n_max: usize,
) -> Result<SequenceBuffer, EvalError> {
    let (k, j, s, nu) = (params.k, params.j, params.s, params.nu);
    let prefix = init.len().min(n_max);
    let mut values = Vec::with_capacity(n_max);
    values.extend_from_slice(&init.values()[..prefix]);
    for n in (prefix + 1)..=n_max {
        let n_i = n as i64;
        let mut acc = nu;
        for i in 1..=k {
            let shift = i.checked_mul(j).ok_or(EvalError::Overflow { at: n })?;
            let inner_idx = n_i.checked_sub(shift).ok_or(EvalError::Overflow { at: n })?;
            if inner_idx < 1 || inner_idx > n_i - 1 {
                return Err(EvalError::ArgumentOutOfRange {
                    at: n,
                    inner: inner_idx,
                });
            }
            let r_inner = values[(inner_idx - 1) as usize];
            let outer_shift = (i - 1)
                .checked_mul(j)
                .ok_or(EvalError::Overflow { at: n })?;
            let arg = n_i
                .checked_sub(s)
                .and_then(|x| x.checked_sub(outer_shift))
                .and_then(|x| x.checked_sub(r_inner))
                .ok_or(EvalError::Overflow { at: n })?;
            if arg < 1 || arg > n_i - 1 {
                return Err(EvalError::ArgumentOutOfRange { at: n, inner: arg });
            }
            acc = acc
                .checked_add(values[(arg - 1) as usize])
                .ok_or(EvalError::Overflow { at: n })?;
        }
        values.push(acc);
    }
    Ok(SequenceBuffer::from_parts(
        Params::General(params),
        Source::Recursion,
        values,
    ))
}

/// Evaluates g(1..n_max) for the specialized recursion.
///
/// Same contract as [`eval_general`] with k = 1 and ν = λj, and it agrees
/// exactly with that translation.
pub fn eval_golomb(
    params: GolombParams,
    init: &InitialConditions,
    n_max: usize,
) -> Result<SequenceBuffer, EvalError> {
    let (j, s) = (params.j, params.s);
    let prefix = init.len().min(n_max);
    let mut values = Vec::with_capacity(n_max);
    values.extend_from_slice(&init.values()[..prefix]);
    if prefix < n_max {
        let step = params.step().ok_or(EvalError::Overflow { at: prefix + 1 })?;
        for n in (prefix + 1)..=n_max {
            let n_i = n as i64;
            let inner_idx = n_i - j;
            if inner_idx < 1 {
                return Err(EvalError::ArgumentOutOfRange {
                    at: n,
                    inner: inner_idx,
                });
            }
            let g_inner = values[(inner_idx - 1) as usize];
            let arg = n_i
                .checked_sub(s)
                .and_then(|x| x.checked_sub(g_inner))
                .ok_or(EvalError::Overflow { at: n })?;
            if arg < 1 || arg > n_i - 1 {
                return Err(EvalError::ArgumentOutOfRange { at: n, inner: arg });
            }
            let term = values[(arg - 1) as usize]
                .checked_add(step)
                .ok_or(EvalError::Overflow { at: n })?;
            values.push(term);
        }
    }
    Ok(SequenceBuffer::from_parts(
        Params::Golomb(params),
        Source::Recursion,
        values,
    ))
}

/// Computes slowness, monotonicity, the largest step, and the value
/// frequencies of a sequence prefix.
pub fn analyze(seq: &SequenceBuffer) -> SequenceStats {
    let values = seq.values();
    let mut is_slow = true;
    let mut is_monotone = true;
    let mut max_step: Option<i128> = None;
    for pair in values.windows(2) {
        let step = pair[1] as i128 - pair[0] as i128;
        if step < 0 {
            is_monotone = false;
        }
        if step != 0 && step != 1 {
            is_slow = false;
        }
        max_step = Some(max_step.map_or(step, |m| m.max(step)));
    }
    let max_step = max_step
        .map(|m| m.clamp(i64::MIN as i128, i64::MAX as i128) as i64)
        .unwrap_or(0);
    SequenceStats {
        is_slow,
        is_monotone,
        max_step,
        frequency: FrequencyTable::from_values(values),
    }
}

/// Occurrences of `value` in the buffer; 0 if absent.
pub fn frequency_of(seq: &SequenceBuffer, value: i64) -> i64 {
    seq.values().iter().filter(|&&v| v == value).count() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{initial_conditions, TreeVariant};
    use proptest::prelude::*;

    fn init(values: &[i64]) -> InitialConditions {
        InitialConditions::new(values.to_vec()).unwrap()
    }

    #[test]
    fn golomb_sequence_prefix_via_general_form() {
        let params = GeneralParams::new(1, 1, 0, 1).unwrap();
        let buf = eval_general(params, &init(&[1]), 15).unwrap();
        assert_eq!(
            buf.values(),
            &[1, 2, 2, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 5]
        );
    }

    #[test]
    fn odd_value_sequence_prefix_via_general_form() {
        let params = GeneralParams::new(1, 2, 0, 2).unwrap();
        let buf = eval_general(params, &init(&[1, 3, 3]), 9).unwrap();
        assert_eq!(buf.values(), &[1, 3, 3, 3, 5, 5, 5, 5, 5]);
    }

    #[test]
    fn initial_condition_only_prefix() {
        let params = GeneralParams::new(1, 1, 0, 1).unwrap();
        let buf = eval_general(params, &init(&[1]), 1).unwrap();
        assert_eq!(buf.values(), &[1]);
    }

    #[test]
    fn init_longer_than_requested_prefix_is_truncated() {
        let params = GolombParams::new(1, 0, 1).unwrap();
        let buf = eval_golomb(params, &init(&[1, 2, 2, 3, 3]), 3).unwrap();
        assert_eq!(buf.values(), &[1, 2, 2]);
    }

    #[test]
    fn golomb_sequence_prefix_via_specialized_form() {
        let params = GolombParams::new(1, 0, 1).unwrap();
        let buf = eval_golomb(params, &init(&[1]), 10).unwrap();
        assert_eq!(buf.values(), &[1, 2, 2, 3, 3, 3, 4, 4, 4, 4]);
    }

    #[test]
    fn non_slow_prefix_with_tree_initial_segment() {
        let params = GolombParams::new(2, 4, 3).unwrap();
        let seed = initial_conditions(TreeVariant::Knot, params);
        assert_eq!(seed.len(), 17);
        let buf = eval_golomb(params, &seed, 26).unwrap();
        assert_eq!(
            buf.values(),
            &[1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3, 3, 5, 5, 7, 7, 9, 9, 9, 9, 9, 9, 9, 9, 9, 11]
        );
    }

    #[test]
    fn parameter_shift_identity_spot_check() {
        let high = GolombParams::new(2, 5, 1).unwrap();
        let low = GolombParams::new(2, 1, 1).unwrap();
        let g_high = eval_golomb(high, &initial_conditions(TreeVariant::Knot, high), 200).unwrap();
        let g_low = eval_golomb(low, &initial_conditions(TreeVariant::Knot, low), 206).unwrap();
        for n in 1..=200 {
            assert_eq!(g_high.get(n), g_low.get(n + 6) - 4, "n={n}");
        }
    }

    #[test]
    fn analyze_flags_slow_and_non_slow_prefixes() {
        let golomb = GolombParams::new(1, 0, 1).unwrap();
        let buf = eval_golomb(golomb, &init(&[1]), 6).unwrap();
        let stats = analyze(&buf);
        assert!(stats.is_slow);
        assert!(stats.is_monotone);
        assert_eq!(stats.max_step, 1);

        let odd = GeneralParams::new(1, 2, 0, 2).unwrap();
        let buf = eval_general(odd, &init(&[1, 3, 3]), 9).unwrap();
        let stats = analyze(&buf);
        assert!(!stats.is_slow);
        assert!(stats.is_monotone);
        assert_eq!(stats.max_step, 2);

        let single = eval_general(odd, &init(&[1]), 1).unwrap();
        let stats = analyze(&single);
        assert!(stats.is_slow);
        assert!(stats.is_monotone);
        assert_eq!(stats.max_step, 0);
    }

    #[test]
    fn frequency_counts_match_prefix() {
        let golomb = GolombParams::new(1, 0, 1).unwrap();
        let buf = eval_golomb(golomb, &init(&[1]), 15).unwrap();
        assert_eq!(frequency_of(&buf, 4), 4);
        assert_eq!(frequency_of(&buf, 99), 0);

        let odd = GeneralParams::new(1, 2, 0, 2).unwrap();
        let buf = eval_general(odd, &init(&[1, 3, 3]), 9).unwrap();
        assert_eq!(frequency_of(&buf, 2), 0);

        let table = FrequencyTable::from_values(buf.values());
        assert_eq!(table.total(), buf.len() as i64);
        assert_eq!(table.count(5), 5);
    }

    #[test]
    fn out_of_range_argument_reports_failing_index() {
        let params = GolombParams::new(1, 0, 1).unwrap();
        let err = eval_golomb(params, &init(&[5]), 10).unwrap_err();
        assert_eq!(
            err,
            EvalError::ArgumentOutOfRange { at: 2, inner: -3 }
        );
        assert_eq!(err.at(), 2);
    }

    #[test]
    fn every_index_below_the_failure_point_evaluates_first() {
        let params = GolombParams::new(1, 0, 1).unwrap();
        let seed = init(&[1, 10]);
        let err = eval_golomb(params, &seed, 10).unwrap_err();
        assert_eq!(err.at(), 3);
        let shorter = eval_golomb(params, &seed, 2).unwrap();
        assert_eq!(shorter.values(), &[1, 10]);
    }

    #[test]
    fn value_overflow_is_reported_not_wrapped() {
        let params = GolombParams::new(1, 0, 1).unwrap();
        let err = eval_golomb(params, &init(&[i64::MAX, 2]), 3).unwrap_err();
        assert_eq!(err, EvalError::Overflow { at: 3 });
    }

    #[test]
    fn parameter_validation_rejects_out_of_range_fields() {
        assert_eq!(
            GeneralParams::new(0, 1, 0, 1).unwrap_err(),
            ParamError::KTooSmall(0)
        );
        assert_eq!(
            GolombParams::new(0, 0, 1).unwrap_err(),
            ParamError::JTooSmall(0)
        );
        assert_eq!(
            GolombParams::new(1, -1, 1).unwrap_err(),
            ParamError::SNegative(-1)
        );
        assert_eq!(
            GolombParams::new(1, 0, 0).unwrap_err(),
            ParamError::LambdaTooSmall(0)
        );
        assert_eq!(
            InitialConditions::new(vec![]).unwrap_err(),
            ParamError::EmptyInit
        );
    }

    #[test]
    fn specialized_form_matches_general_translation_on_tree_seeds() {
        for j in 1..=3 {
            for s in 0..=2 {
                for lambda in 1..=3 {
                    let golomb = GolombParams::new(j, s, lambda).unwrap();
                    let general = GeneralParams::new(1, j, s, lambda * j).unwrap();
                    let seed = initial_conditions(TreeVariant::Knot, golomb);
                    let a = eval_golomb(golomb, &seed, 500).unwrap();
                    let b = eval_general(general, &seed, 500).unwrap();
                    assert_eq!(a.values(), b.values(), "j={j} s={s} lambda={lambda}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn specialized_form_matches_general_translation_on_arbitrary_seeds(
            j in 1i64..=4,
            s in 0i64..=4,
            lambda in 1i64..=4,
            seed in proptest::collection::vec(1i64..=20, 1..=10),
            n_max in 1usize..=120,
        ) {
            let golomb = GolombParams::new(j, s, lambda).unwrap();
            let general = GeneralParams::new(1, j, s, lambda * j).unwrap();
            let seed = InitialConditions::new(seed).unwrap();
            let a = eval_golomb(golomb, &seed, n_max);
            let b = eval_general(general, &seed, n_max);
            match (a, b) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x.values(), y.values()),
                (Err(e), Err(f)) => prop_assert_eq!(e, f),
                (a, b) => prop_assert!(false, "outcomes diverge: {a:?} vs {b:?}"),
            }
        }

        #[test]
        fn slow_implies_monotone_with_unit_steps(
            values in proptest::collection::vec(-50i64..=50, 1..=40),
        ) {
            let params = Params::Golomb(GolombParams::new(1, 0, 1).unwrap());
            let buf = SequenceBuffer::from_parts(params, Source::Recursion, values);
            let stats = analyze(&buf);
            if stats.is_slow {
                prop_assert!(stats.is_monotone);
                prop_assert!(stats.max_step <= 1);
            }
            prop_assert_eq!(stats.frequency.total(), buf.len() as i64);
        }
    }
}
