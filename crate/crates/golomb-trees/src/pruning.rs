//! The pruning operation on knot-variant prefix views.
//!
//! Pruning removes the root subtree except for the initial leaf, shortens
//! every chain of the complete subtrees below it by j nodes, and trims the
//! final subtree by one of three rules: with at least two chains attached
//! to its knot node, every chain holding at least j labels loses its j
//! largest; with fewer than two chains but at least j labels in total, the
//! j largest labels go regardless of which nodes hold them; with fewer
//! than j labels nothing happens. The initial leaf is then reattached and
//! the survivors relabeled in pre-order.
//!
//! The identity under test: for n above the initial segment, pruning the
//! prefix of labels 1..=n yields exactly the prefix of labels
//! 1..=n−s−w(n−j), and the leaf weight drops by exactly λj. The pruned
//! view here is assembled from explicit label bookkeeping, so comparing it
//! against a freshly computed prefix view exercises two separate paths.

use thiserror::Error;

use crate::recurrence::GolombParams;
use crate::tree::{
    complete_partial, leaf_weight_sequence, prefix_view, PartialSubtree, PrefixView, TreeVariant,
};

/// Outcome of pruning one prefix view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneResult {
    result: PrefixView,
    labels_removed: i64,
    d: i64,
    weight_drop: i64,
}

impl PruneResult {
    /// The pruned tree, relabeled, as a prefix view.
    pub fn result(&self) -> &PrefixView {
        &self.result
    }

    pub fn labels_removed(&self) -> i64 {
        self.labels_removed
    }

    /// The cutoff of the pruned view: the original n minus the labels
    /// removed.
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn weight_drop(&self) -> i64 {
        self.weight_drop
    }
}

/// Why a view cannot be pruned.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PruneError {
    #[error("cutoff {n} is too small to prune, need at least {min}")]
    CutoffTooSmall { n: i64, min: i64 },
    #[error("pruning is defined on the knot variant only")]
    TailVariant,
    #[error("initial segment length overflows the 64-bit range")]
    ThresholdOverflow,
}

/// One cutoff checked by [`verify_prune_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneCheck {
    pub n: i64,
    /// Cutoff reached by structural pruning.
    pub d_structural: i64,
    /// Cutoff predicted by n − s − w(n − j).
    pub d_formula: i64,
    pub weight_drop: i64,
    /// Whether the pruned view equals the prefix view at the predicted
    /// cutoff, component by component.
    pub structural_match: bool,
    pub pass: bool,
}

/// Prunes a knot-variant prefix view whose cutoff lies above the initial
/// segment.
pub fn prune(view: &PrefixView) -> Result<PruneResult, PruneError> {
    if view.variant() != TreeVariant::Knot {
        return Err(PruneError::TailVariant);
    }
    let params = view.params();
    let threshold = params
        .initial_segment_len()
        .ok_or(PruneError::ThresholdOverflow)?;
    let n = view.n();
    if n <= threshold {
        return Err(PruneError::CutoffTooSmall {
            n,
            min: threshold + 1,
        });
    }

    let j = params.j();
    let s = params.s();
    let lambda = params.lambda();
    let m = view.m();
    debug_assert!(m >= 2);

    let (u, knot, whole, last) = match *view.partial() {
        PartialSubtree::Knot {
            supernode_labels,
            knot_present,
            whole_chains,
            last_chain_labels,
        } => (
            supernode_labels,
            knot_present,
            whole_chains,
            last_chain_labels,
        ),
        _ => unreachable!("knot views above the initial segment end in a knot subtree"),
    };

    let chains_attached = if knot {
        whole + i64::from(last > 0)
    } else {
        0
    };
    let total_labels = u
        + i64::from(knot)
        + whole * (m as i64) * j
        + last;

    let (removal, u2, knot2, whole2, last2) = if chains_attached >= 2 {
        let trimmed_partial = last >= j;
        let removal = j * (whole + i64::from(trimmed_partial));
        let last2 = if trimmed_partial { last - j } else { last };
        (removal, u, knot, whole, last2)
    } else if total_labels >= j {
        if whole == 1 {
            (j, u, knot, 1, 0)
        } else {
            let mut remaining = j;
            let take = remaining.min(last);
            let last2 = last - take;
            remaining -= take;
            let knot2 = if remaining > 0 && knot {
                remaining -= 1;
                false
            } else {
                knot
            };
            debug_assert!(u >= remaining);
            (j, u - remaining, knot2, 0, last2)
        }
    } else {
        (0, u, knot, whole, last)
    };

    let removed_complete = (m as i128 - 1) * lambda as i128 * j as i128;
    let labels_removed = i64::try_from(s as i128 + 1 + removed_complete + removal as i128)
        .expect("removed label count fits in 64 bits");
    let d = n - labels_removed;

    let new_chain_len = (m as i64 - 1) * j;
    let survivors = u2 + i64::from(knot2) + whole2 * new_chain_len + last2;
    let full = s + 1 + lambda * new_chain_len;
    let (m_new, partial, incomplete) = if survivors == 0 {
        (m - 2, complete_partial(TreeVariant::Knot, params, m - 2), false)
    } else if survivors == full {
        (m - 1, complete_partial(TreeVariant::Knot, params, m - 1), false)
    } else {
        (
            m - 1,
            PartialSubtree::Knot {
                supernode_labels: u2,
                knot_present: knot2,
                whole_chains: whole2,
                last_chain_labels: last2,
            },
            true,
        )
    };

    let result = PrefixView::from_parts(TreeVariant::Knot, params, d, m_new, partial, incomplete);
    let weight_drop = view.leaf_weight() - result.leaf_weight();
    Ok(PruneResult {
        result,
        labels_removed,
        d,
        weight_drop,
    })
}

/// Component-wise equality of two prefix views: same variant, parameters,
/// cutoff, complete subtree spans, final portion, and completeness flag.
pub fn structurally_equal(a: &PrefixView, b: &PrefixView) -> bool {
    a.variant() == b.variant()
        && a.params() == b.params()
        && a.n() == b.n()
        && a.m() == b.m()
        && a.complete_subtrees() == b.complete_subtrees()
        && a.partial() == b.partial()
        && a.incomplete() == b.incomplete()
}

/// Checks the pruning identity for every cutoff in n_from..=n_to: the
/// structurally pruned view must equal the directly computed prefix view
/// at n − s − w(n − j), and the leaf weight must drop by exactly λj.
pub fn verify_prune_identity(
    params: GolombParams,
    n_from: i64,
    n_to: i64,
) -> Result<Vec<PruneCheck>, PruneError> {
    let threshold = params
        .initial_segment_len()
        .ok_or(PruneError::ThresholdOverflow)?;
    if n_from <= threshold {
        return Err(PruneError::CutoffTooSmall {
            n: n_from,
            min: threshold + 1,
        });
    }
    let step = params.step().ok_or(PruneError::ThresholdOverflow)?;
    let mut checks = Vec::new();
    if n_to < n_from {
        return Ok(checks);
    }

    let weights = leaf_weight_sequence(TreeVariant::Knot, params, n_to as usize);
    for n in n_from..=n_to {
        let view = prefix_view(TreeVariant::Knot, params, n);
        let pruned = prune(&view)?;
        let d_formula = n - params.s() - weights.get((n - params.j()) as usize);
        let structural_match = d_formula >= 1
            && structurally_equal(
                pruned.result(),
                &prefix_view(TreeVariant::Knot, params, d_formula),
            );
        let pass =
            structural_match && pruned.d() == d_formula && pruned.weight_drop() == step;
        checks.push(PruneCheck {
            n,
            d_structural: pruned.d(),
            d_formula,
            weight_drop: pruned.weight_drop(),
            structural_match,
            pass,
        });
    }
    Ok(checks)
}

/// Smallest cutoff the pruning operation accepts for these parameters.
pub fn min_prunable_cutoff(params: GolombParams) -> Result<i64, PruneError> {
    let threshold = params
        .initial_segment_len()
        .ok_or(PruneError::ThresholdOverflow)?;
    Ok(threshold + 1)
}
