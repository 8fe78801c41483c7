//! Closed-form evaluation for the λ = 1 family.
//!
//! With a single chain per subtree the knot and tail variants coincide and
//! the solution admits exact formulas: the run length of each value, the
//! label p(m) of the mᵗʰ non-initial leaf, the label F(n) of the last leaf
//! at or below a cutoff, and finally the solution value itself via an
//! integer square root. A parameter reduction lowers s below j, and for
//! j = 1 the whole solution collapses to a single square-root expression.
//!
//! Everything here is exact integer arithmetic. Discriminants that fail to
//! be perfect squares, odd numerators, or out-of-range values surface as
//! [`ClosedFormError::FormulaInconsistency`] instead of being rounded
//! away, so a verification pass can assert that no such error ever fires.

use thiserror::Error;

use crate::recurrence::ParamError;

/// Failure modes of the closed-form layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error(transparent)]
    BadParams(#[from] ParamError),
    #[error("cutoff must be at least 1, got {0}")]
    CutoffTooSmall(i64),
    #[error("leaf index must be non-negative, got {0}")]
    IndexNegative(i64),
    #[error("value overflows the 64-bit range")]
    Overflow,
    #[error("closed form broke down at n={n}: {detail}")]
    FormulaInconsistency { n: i64, detail: String },
    #[error("reduction needs s >= j, got j={j} s={s}")]
    ReductionNotApplicable { j: i64, s: i64 },
}

/// A non-initial leaf of the λ = 1 tree: the `index`ᵗʰ one carries label
/// `label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafPosition {
    pub index: i64,
    pub label: i64,
}

/// Result of lowering s below j: s = q·j + r with the cutoff shift α.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedParams {
    pub q: i64,
    pub r: i64,
    pub alpha: i64,
}

/// Floor square root with an exactness flag, by Newton iteration from
/// above; `(r, true)` means r² = x.
pub fn isqrt_exact(x: u128) -> (u128, bool) {
    if x < 2 {
        return (x, true);
    }
    let mut r = 1u128 << (x.ilog2() / 2 + 1);
    loop {
        let next = (r + x / r) / 2;
        if next >= r {
            break;
        }
        r = next;
    }
    (r, r * r == x)
}

fn validate(j: i64, s: i64) -> Result<(), ClosedFormError> {
    if j < 1 {
        return Err(ParamError::JTooSmall(j).into());
    }
    if s < 0 {
        return Err(ParamError::SNegative(s).into());
    }
    Ok(())
}

/// Run length of `value` in the λ = 1 solution: value + s when the value
/// is ≡ 1 (mod j), otherwise 0. Values below 1 never occur.
pub fn frequency_lambda1(j: i64, s: i64, value: i64) -> Result<i64, ClosedFormError> {
    validate(j, s)?;
    if value < 1 || (value - 1) % j != 0 {
        return Ok(0);
    }
    value.checked_add(s).ok_or(ClosedFormError::Overflow)
}

/// Label of the `index`ᵗʰ non-initial leaf in the λ = 1 tree:
/// 1 + (index+1)(s+1) + j·index·(index+1)/2.
pub fn leaf_label(j: i64, s: i64, index: i64) -> Result<LeafPosition, ClosedFormError> {
    validate(j, s)?;
    if index < 0 {
        return Err(ClosedFormError::IndexNegative(index));
    }
    let m = index as i128;
    let value = 1 + (m + 1) * (s as i128 + 1) + j as i128 * m * (m + 1) / 2;
    let label = i64::try_from(value).map_err(|_| ClosedFormError::Overflow)?;
    Ok(LeafPosition { index, label })
}

/// Label F(n) of the last leaf at or below the cutoff, taken as 1 (the
/// initial leaf) when no non-initial leaf fits. Solves the leaf-label
/// quadratic directly instead of scanning.
pub fn last_leaf_label(j: i64, s: i64, n: i64) -> Result<i64, ClosedFormError> {
    validate(j, s)?;
    if n < 1 {
        return Err(ClosedFormError::CutoffTooSmall(n));
    }
    if n < s + 2 {
        return Ok(1);
    }
    let jq = j as i128;
    let b = jq + 2 * s as i128 + 2;
    let c = 2 * s as i128 + 2;
    let target = 2 * (n as i128 - 1);
    let q = |m: i128| (m + 1) * (jq * m + c);
    let disc = b * b + 4 * jq * (target - c);
    debug_assert!(disc >= 0);
    let (root, _) = isqrt_exact(disc as u128);
    let mut m = (root as i128 - b) / (2 * jq);
    if m < 0 {
        m = 0;
    }
    while q(m + 1) <= target {
        m += 1;
    }
    while m > 0 && q(m) > target {
        m -= 1;
    }
    debug_assert!(q(m) <= target);
    Ok(leaf_label(j, s, m as i64)?.label)
}

/// The λ = 1 solution at n, computed without recursion:
/// ((j − 2s) + √((2s − j)² + 4(2j·F(n) + 2s + 1 − 3j))) / 2, with the
/// negative branch of the root when F(n) = 1.
pub fn closed_form_lambda1(j: i64, s: i64, n: i64) -> Result<i64, ClosedFormError> {
    let f = last_leaf_label(j, s, n)?;
    let js = j as i128;
    let ss = s as i128;
    let disc = (2 * ss - js) * (2 * ss - js) + 4 * (2 * js * f as i128 + 2 * ss + 1 - 3 * js);
    if disc < 0 {
        return Err(ClosedFormError::FormulaInconsistency {
            n,
            detail: format!("negative discriminant {disc}"),
        });
    }
    let (root, exact) = isqrt_exact(disc as u128);
    if !exact {
        return Err(ClosedFormError::FormulaInconsistency {
            n,
            detail: format!("discriminant {disc} is not a perfect square"),
        });
    }
    let signed_root = if f == 1 { 2 * ss - js + 2 } else { root as i128 };
    debug_assert!(signed_root.unsigned_abs() == root);
    let numerator = (js - 2 * ss) + signed_root;
    if numerator % 2 != 0 {
        return Err(ClosedFormError::FormulaInconsistency {
            n,
            detail: format!("odd numerator {numerator}"),
        });
    }
    let value = numerator / 2;
    if value < 1 {
        return Err(ClosedFormError::FormulaInconsistency {
            n,
            detail: format!("value {value} below 1"),
        });
    }
    if (value - 1) % js != 0 {
        return Err(ClosedFormError::FormulaInconsistency {
            n,
            detail: format!("value {value} is not 1 mod {j}"),
        });
    }
    i64::try_from(value).map_err(|_| ClosedFormError::Overflow)
}

/// Lowers s = q·j + r to the remainder r, with the cutoff shift
/// α = q(r + 1) + j·q(q − 1)/2; the solution at (j, s) equals the solution
/// at (j, r) evaluated at n + α, minus q·j.
pub fn reduce_params(j: i64, s: i64) -> Result<ReducedParams, ClosedFormError> {
    validate(j, s)?;
    if s < j {
        return Err(ClosedFormError::ReductionNotApplicable { j, s });
    }
    let q = s / j;
    let r = s % j;
    let qq = q as i128;
    let alpha = qq * (r as i128 + 1) + j as i128 * qq * (qq - 1) / 2;
    let alpha = i64::try_from(alpha).map_err(|_| ClosedFormError::Overflow)?;
    Ok(ReducedParams { q, r, alpha })
}

/// The j = 1 solution in a single expression:
/// ⌊(⌊√(8(n + s(s+1)/2))⌋ + 1)/2⌋ − s.
pub fn closed_form_j1(s: i64, n: i64) -> Result<i64, ClosedFormError> {
    validate(1, s)?;
    if n < 1 {
        return Err(ClosedFormError::CutoffTooSmall(n));
    }
    let ss = s as i128;
    let shifted = n as i128 + ss * (ss + 1) / 2;
    let radicand = shifted.checked_mul(8).ok_or(ClosedFormError::Overflow)?;
    let (root, _) = isqrt_exact(radicand as u128);
    let value = (root as i128 + 1) / 2 - ss;
    i64::try_from(value).map_err(|_| ClosedFormError::Overflow)
}

/// The classic j = 1, s = 0 case: ⌊(⌊√(8n)⌋ + 1)/2⌋, the sequence in which
/// n appears n times. Panics if n < 1.
pub fn golomb_closed(n: i64) -> i64 {
    assert!(n >= 1, "cutoff must be at least 1, got {n}");
    let (root, _) = isqrt_exact(8 * n as u128);
    root.div_ceil(2) as i64
}
