//! The two labeled infinite trees whose leaf weights solve the recursion.
//!
//! Both trees are an infinite spine of supernodes, one per subtree index
//! i ≥ 0. Subtree 0 is a supernode with two extra nodes attached: the
//! initial leaf and one far node. For i ≥ 1 the knot variant hangs a single
//! knot node below the iᵗʰ supernode and λ chains of ij regular nodes below
//! the knot, while the tail variant hangs the λ chains directly below the
//! supernode and appends one extra tail node to the end of the last chain.
//! Subtree node counts agree across the variants.
//!
//! Labels 1, 2, 3, … are assigned in traversal order: the initial leaf,
//! then each subtree as supernode (s labels, possibly zero), knot node if
//! present, and chains root to leaf in creation order. The initial leaf
//! carries weight 1 and every other leaf carries weight j; the leaf weight
//! sequence w(n) sums the weights of all leaves with label ≤ n.
//!
//! Two computation paths coexist: an explicit arena (`build_skeleton`,
//! `assign_labels`) bounded at [`MAX_SKELETON_NODES`] nodes, and an
//! arithmetic path (`leaf_records`, `prefix_view`) that never materializes
//! nodes and serves arbitrarily large cutoffs.

use std::fmt;

use thiserror::Error;

use crate::recurrence::{GolombParams, InitialConditions, Params, SequenceBuffer, Source};

/// Upper bound on explicit skeleton size.
pub const MAX_SKELETON_NODES: i64 = 10_000_000;

/// Which of the two tree shapes is being built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeVariant {
    Knot,
    Tail,
}

impl TreeVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            TreeVariant::Knot => "knot",
            TreeVariant::Tail => "tail",
        }
    }
}

impl fmt::Display for TreeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Role of a node within its subtree.
///
/// The payload on `Supernode`, `KnotNode`, and `TailNode` is the subtree
/// index. Knot nodes occur only in the knot variant and tail nodes only in
/// the tail variant, both for subtree indices ≥ 1; the far node of subtree
/// 0 is a regular node in both variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    InitialLeaf,
    Supernode(usize),
    KnotNode(usize),
    Regular,
    TailNode(usize),
}

pub type NodeId = usize;

/// One arena slot. Nodes are stored in traversal (label) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub subtree_index: usize,
    /// Chain number 1..=λ for chain nodes, `None` elsewhere.
    pub chain_index: Option<usize>,
    /// Position 1..=ij along the chain for regular chain nodes.
    pub depth_in_chain: Option<usize>,
}

/// An unlabeled arena holding subtrees 0..=depth of one tree variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSkeleton {
    variant: TreeVariant,
    j: i64,
    lambda: i64,
    depth: usize,
    nodes: Vec<Node>,
}

impl TreeSkeleton {
    pub fn variant(&self) -> TreeVariant {
        self.variant
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// Index of the deepest complete subtree contained in the arena.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The contiguous labels held by one node: `width` is 0 for supernodes when
/// s = 0, s for other supernodes, and 1 everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelRange {
    pub start: i64,
    pub width: i64,
}

impl LabelRange {
    pub fn is_empty(&self) -> bool {
        self.width == 0
    }

    /// Last label in the range; meaningful only when non-empty.
    pub fn end(&self) -> i64 {
        self.start + self.width - 1
    }

    pub fn contains(&self, label: i64) -> bool {
        self.width > 0 && label >= self.start && label <= self.end()
    }
}

/// A skeleton with pre-order label ranges attached to every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    skeleton: TreeSkeleton,
    labels: Vec<LabelRange>,
    total_labels: i64,
    s: i64,
}

impl LabeledTree {
    pub fn skeleton(&self) -> &TreeSkeleton {
        &self.skeleton
    }

    /// Label ranges aligned with `skeleton().nodes()`.
    pub fn labels(&self) -> &[LabelRange] {
        &self.labels
    }

    pub fn total_labels(&self) -> i64 {
        self.total_labels
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    /// The node holding `label`, if any node of the arena does.
    pub fn find_label(&self, label: i64) -> Option<NodeId> {
        self.labels.iter().position(|r| r.contains(label))
    }
}

/// One leaf of the infinite tree, in label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafRecord {
    pub label: i64,
    pub weight: i64,
    /// Leaf number, counting the initial leaf as 0.
    pub ordinal: usize,
}

/// Label span of one complete subtree inside a prefix view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubtreeSpan {
    pub index: usize,
    pub first_label: i64,
    pub last_label: i64,
}

/// Shape of the final, possibly incomplete subtree of a prefix view.
///
/// `Root` describes subtree 0 (the initial leaf is always present and is
/// not counted here). For the chain-bearing subtrees, `whole_chains` counts
/// fully present chains of the subtree's chain length and
/// `last_chain_labels` counts labels in the first partial chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialSubtree {
    Root {
        supernode_labels: i64,
        far_present: bool,
    },
    Knot {
        supernode_labels: i64,
        knot_present: bool,
        whole_chains: i64,
        last_chain_labels: i64,
    },
    Tail {
        supernode_labels: i64,
        whole_chains: i64,
        last_chain_labels: i64,
        tail_present: bool,
    },
}

/// The prefix subtree of all nodes with labels ≤ n, decomposed into
/// complete subtrees 0..m−1 plus the final portion of subtree m.
///
/// When the cutoff lands exactly on a subtree boundary the final subtree is
/// complete and `incomplete()` is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixView {
    variant: TreeVariant,
    params: GolombParams,
    n: i64,
    m: usize,
    complete: Vec<SubtreeSpan>,
    partial: PartialSubtree,
    incomplete: bool,
}

impl PrefixView {
    pub(crate) fn from_parts(
        variant: TreeVariant,
        params: GolombParams,
        n: i64,
        m: usize,
        partial: PartialSubtree,
        incomplete: bool,
    ) -> Self {
        let mut complete = Vec::with_capacity(m);
        for index in 0..m {
            let first = if index == 0 {
                1
            } else {
                as_i64(labels_through(params, index as i64 - 1)) + 1
            };
            let last = as_i64(labels_through(params, index as i64));
            complete.push(SubtreeSpan {
                index,
                first_label: first,
                last_label: last,
            });
        }
        let view = Self {
            variant,
            params,
            n,
            m,
            complete,
            partial,
            incomplete,
        };
        debug_assert_eq!(view.count_labels(), n as i128);
        view
    }

    pub fn variant(&self) -> TreeVariant {
        self.variant
    }

    pub fn params(&self) -> GolombParams {
        self.params
    }

    /// The cutoff label.
    pub fn n(&self) -> i64 {
        self.n
    }

    /// Index of the final (possibly incomplete) subtree.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn complete_subtrees(&self) -> &[SubtreeSpan] {
        &self.complete
    }

    pub fn partial(&self) -> &PartialSubtree {
        &self.partial
    }

    pub fn incomplete(&self) -> bool {
        self.incomplete
    }

    /// Total weight of the infinite tree's leaves with labels in the view.
    ///
    /// Chain ends count only when the whole chain is present, since a
    /// shorter chain segment continues below its deepest visible node.
    pub fn leaf_weight(&self) -> i64 {
        let j = self.params.j() as i128;
        let lambda = self.params.lambda() as i128;
        let mut weight: i128 = 1;
        if self.m >= 1 {
            weight += j;
            weight += (self.m as i128 - 1) * lambda * j;
        }
        weight += match self.partial {
            PartialSubtree::Root { far_present, .. } => {
                if far_present {
                    j
                } else {
                    0
                }
            }
            PartialSubtree::Knot { whole_chains, .. } => whole_chains as i128 * j,
            PartialSubtree::Tail {
                whole_chains,
                tail_present,
                ..
            } => {
                let chain_leaves = (whole_chains as i128).min(lambda - 1);
                chain_leaves * j + if tail_present { j } else { 0 }
            }
        };
        i64::try_from(weight).expect("leaf weight fits in 64 bits")
    }

    fn count_labels(&self) -> i128 {
        let before = if self.m == 0 {
            0
        } else {
            labels_through(self.params, self.m as i64 - 1)
        };
        before + partial_label_count(&self.partial, self.params, self.m as i64)
    }
}

/// Construction failure for explicit arenas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("j must be at least 1, got {0}")]
    JTooSmall(i64),
    #[error("lambda must be at least 1, got {0}")]
    LambdaTooSmall(i64),
    #[error("s must be non-negative, got {0}")]
    SNegative(i64),
    #[error("skeleton would hold {requested} nodes, above the limit of {limit}")]
    TooLarge { requested: i128, limit: i64 },
    #[error("label assignment overflows the 64-bit range")]
    LabelOverflow,
}

/// Total labels in subtrees 0..=i: subtree 0 holds s + 2 labels including
/// the initial leaf, and subtree i ≥ 1 holds s + λij + 1.
pub(crate) fn labels_through(params: GolombParams, i: i64) -> i128 {
    debug_assert!(i >= 0);
    let s = params.s() as i128;
    let lj = params.lambda() as i128 * params.j() as i128;
    let i = i as i128;
    (s + 2) + i * (s + 1) + lj * i * (i + 1) / 2
}

/// The fully-present shape of subtree `index`, as a partial description.
pub(crate) fn complete_partial(
    variant: TreeVariant,
    params: GolombParams,
    index: usize,
) -> PartialSubtree {
    if index == 0 {
        return PartialSubtree::Root {
            supernode_labels: params.s(),
            far_present: true,
        };
    }
    match variant {
        TreeVariant::Knot => PartialSubtree::Knot {
            supernode_labels: params.s(),
            knot_present: true,
            whole_chains: params.lambda(),
            last_chain_labels: 0,
        },
        TreeVariant::Tail => PartialSubtree::Tail {
            supernode_labels: params.s(),
            whole_chains: params.lambda(),
            last_chain_labels: 0,
            tail_present: true,
        },
    }
}

fn partial_label_count(partial: &PartialSubtree, params: GolombParams, m: i64) -> i128 {
    let chain_len = m as i128 * params.j() as i128;
    match *partial {
        PartialSubtree::Root {
            supernode_labels,
            far_present,
        } => 1 + supernode_labels as i128 + i128::from(far_present),
        PartialSubtree::Knot {
            supernode_labels,
            knot_present,
            whole_chains,
            last_chain_labels,
        } => {
            supernode_labels as i128
                + i128::from(knot_present)
                + whole_chains as i128 * chain_len
                + last_chain_labels as i128
        }
        PartialSubtree::Tail {
            supernode_labels,
            whole_chains,
            last_chain_labels,
            tail_present,
        } => {
            supernode_labels as i128
                + whole_chains as i128 * chain_len
                + last_chain_labels as i128
                + i128::from(tail_present)
        }
    }
}

fn as_i64(x: i128) -> i64 {
    i64::try_from(x).expect("label count fits in 64 bits")
}

/// Builds the arena for subtrees 0..=depth of the requested variant.
///
/// Nodes are pushed in traversal order, so label assignment is a single
/// scan. Refuses to build arenas above [`MAX_SKELETON_NODES`] nodes.
pub fn build_skeleton(
    variant: TreeVariant,
    j: i64,
    lambda: i64,
    depth: usize,
) -> Result<TreeSkeleton, TreeError> {
    if j < 1 {
        return Err(TreeError::JTooSmall(j));
    }
    if lambda < 1 {
        return Err(TreeError::LambdaTooSmall(lambda));
    }
    let d = depth as i128;
    let requested = 3 + 2 * d + lambda as i128 * j as i128 * d * (d + 1) / 2;
    if requested > MAX_SKELETON_NODES as i128 {
        return Err(TreeError::TooLarge {
            requested,
            limit: MAX_SKELETON_NODES,
        });
    }

    let mut nodes = Vec::with_capacity(requested as usize);
    nodes.push(Node {
        kind: NodeKind::InitialLeaf,
        parent: Some(1),
        subtree_index: 0,
        chain_index: None,
        depth_in_chain: None,
    });
    nodes.push(Node {
        kind: NodeKind::Supernode(0),
        parent: None,
        subtree_index: 0,
        chain_index: None,
        depth_in_chain: None,
    });
    nodes.push(Node {
        kind: NodeKind::Regular,
        parent: Some(1),
        subtree_index: 0,
        chain_index: None,
        depth_in_chain: None,
    });

    let mut prev_supernode: NodeId = 1;
    for i in 1..=depth {
        let supernode = nodes.len();
        nodes.push(Node {
            kind: NodeKind::Supernode(i),
            parent: Some(prev_supernode),
            subtree_index: i,
            chain_index: None,
            depth_in_chain: None,
        });
        let chain_root_parent = match variant {
            TreeVariant::Knot => {
                let knot = nodes.len();
                nodes.push(Node {
                    kind: NodeKind::KnotNode(i),
                    parent: Some(supernode),
                    subtree_index: i,
                    chain_index: None,
                    depth_in_chain: None,
                });
                knot
            }
            TreeVariant::Tail => supernode,
        };
        let chain_len = i * j as usize;
        for chain in 1..=lambda as usize {
            let mut parent = chain_root_parent;
            for pos in 1..=chain_len {
                let id = nodes.len();
                nodes.push(Node {
                    kind: NodeKind::Regular,
                    parent: Some(parent),
                    subtree_index: i,
                    chain_index: Some(chain),
                    depth_in_chain: Some(pos),
                });
                parent = id;
            }
            if variant == TreeVariant::Tail && chain == lambda as usize {
                nodes.push(Node {
                    kind: NodeKind::TailNode(i),
                    parent: Some(parent),
                    subtree_index: i,
                    chain_index: Some(chain),
                    depth_in_chain: None,
                });
            }
        }
        prev_supernode = supernode;
    }

    Ok(TreeSkeleton {
        variant,
        j,
        lambda,
        depth,
        nodes,
    })
}

/// Assigns pre-order label ranges: supernodes take s consecutive labels
/// (possibly zero), every other node takes one.
pub fn assign_labels(skeleton: TreeSkeleton, s: i64) -> Result<LabeledTree, TreeError> {
    if s < 0 {
        return Err(TreeError::SNegative(s));
    }
    let mut labels = Vec::with_capacity(skeleton.len());
    let mut next: i64 = 1;
    for node in skeleton.nodes() {
        let width = match node.kind {
            NodeKind::Supernode(_) => s,
            _ => 1,
        };
        labels.push(LabelRange { start: next, width });
        next = next.checked_add(width).ok_or(TreeError::LabelOverflow)?;
    }
    Ok(LabeledTree {
        skeleton,
        labels,
        total_labels: next - 1,
        s,
    })
}

/// All leaves of the infinite tree with label ≤ `label_limit`, in label
/// order, computed arithmetically from per-subtree label counts.
pub fn leaf_records(
    variant: TreeVariant,
    params: GolombParams,
    label_limit: i64,
) -> Vec<LeafRecord> {
    let j = params.j() as i128;
    let s = params.s() as i128;
    let lambda = params.lambda() as i128;
    let limit = label_limit as i128;
    let mut out = Vec::new();
    if limit < 1 {
        return out;
    }
    out.push(LeafRecord {
        label: 1,
        weight: 1,
        ordinal: 0,
    });
    if s + 2 > limit {
        return out;
    }
    out.push(LeafRecord {
        label: (s + 2) as i64,
        weight: params.j(),
        ordinal: 1,
    });
    let mut base = s + 2;
    let mut ordinal = 2;
    let mut i: i128 = 1;
    loop {
        let chain_len = i * j;
        match variant {
            TreeVariant::Knot => {
                for chain in 1..=lambda {
                    let label = base + s + 1 + chain * chain_len;
                    if label > limit {
                        return out;
                    }
                    out.push(LeafRecord {
                        label: label as i64,
                        weight: params.j(),
                        ordinal,
                    });
                    ordinal += 1;
                }
            }
            TreeVariant::Tail => {
                for chain in 1..lambda {
                    let label = base + s + chain * chain_len;
                    if label > limit {
                        return out;
                    }
                    out.push(LeafRecord {
                        label: label as i64,
                        weight: params.j(),
                        ordinal,
                    });
                    ordinal += 1;
                }
                let tail_label = base + s + lambda * chain_len + 1;
                if tail_label > limit {
                    return out;
                }
                out.push(LeafRecord {
                    label: tail_label as i64,
                    weight: params.j(),
                    ordinal,
                });
                ordinal += 1;
            }
        }
        base += s + lambda * chain_len + 1;
        if base >= limit {
            return out;
        }
        i += 1;
    }
}

/// The leaf weight sequence w(1..n_max): w(n) is the total weight of leaves
/// with label ≤ n.
pub fn leaf_weight_sequence(
    variant: TreeVariant,
    params: GolombParams,
    n_max: usize,
) -> SequenceBuffer {
    let records = leaf_records(variant, params, n_max as i64);
    let mut values = Vec::with_capacity(n_max);
    let mut acc: i64 = 0;
    let mut next = records.iter().peekable();
    for n in 1..=n_max as i64 {
        if let Some(record) = next.peek() {
            if record.label == n {
                acc = acc
                    .checked_add(record.weight)
                    .expect("leaf weight fits in 64 bits");
                next.next();
            }
        }
        values.push(acc);
    }
    SequenceBuffer::from_parts(Params::Golomb(params), Source::TreeWeight, values)
}

/// The tree-derived initial segment w(1..3+2s+λj) for the given variant.
pub fn initial_conditions(variant: TreeVariant, params: GolombParams) -> InitialConditions {
    let len = params
        .initial_segment_len()
        .expect("initial segment length fits in 64 bits");
    let len = usize::try_from(len).expect("initial segment length fits in memory");
    let buf = leaf_weight_sequence(variant, params, len);
    InitialConditions::new(buf.values().to_vec()).expect("initial segment is non-empty")
}

/// Decomposes the prefix holding labels 1..=n into complete subtrees plus
/// the final portion. Panics if n < 1.
pub fn prefix_view(variant: TreeVariant, params: GolombParams, n: i64) -> PrefixView {
    assert!(n >= 1, "prefix cutoff must be at least 1, got {n}");
    let n_big = n as i128;
    let mut m: i64 = 0;
    while labels_through(params, m) < n_big {
        m += 1;
    }
    let before = if m == 0 {
        0
    } else {
        labels_through(params, m - 1)
    };
    let in_last = n_big - before;
    let s = params.s() as i128;
    let lambda = params.lambda() as i128;

    let (partial, incomplete) = if m == 0 {
        let rest = in_last - 1;
        let supernode_labels = rest.min(s);
        let far_present = rest > s;
        (
            PartialSubtree::Root {
                supernode_labels: supernode_labels as i64,
                far_present,
            },
            !far_present,
        )
    } else {
        let chain_len = m as i128 * params.j() as i128;
        let mut x = in_last;
        let supernode_labels = x.min(s);
        x -= supernode_labels;
        match variant {
            TreeVariant::Knot => {
                let knot_present = x >= 1;
                if knot_present {
                    x -= 1;
                }
                let whole_chains = (x / chain_len).min(lambda);
                let last_chain_labels = x - whole_chains * chain_len;
                let complete =
                    supernode_labels == s && knot_present && whole_chains == lambda;
                debug_assert!(!complete || last_chain_labels == 0);
                (
                    PartialSubtree::Knot {
                        supernode_labels: supernode_labels as i64,
                        knot_present,
                        whole_chains: whole_chains as i64,
                        last_chain_labels: last_chain_labels as i64,
                    },
                    !complete,
                )
            }
            TreeVariant::Tail => {
                let all_chains = lambda * chain_len;
                let (whole_chains, last_chain_labels, tail_present) = if x > all_chains {
                    debug_assert_eq!(x, all_chains + 1);
                    (lambda, 0, true)
                } else {
                    let whole = x / chain_len;
                    (whole, x - whole * chain_len, false)
                };
                let complete = supernode_labels == s && tail_present;
                (
                    PartialSubtree::Tail {
                        supernode_labels: supernode_labels as i64,
                        whole_chains: whole_chains as i64,
                        last_chain_labels: last_chain_labels as i64,
                        tail_present,
                    },
                    !complete,
                )
            }
        }
    };

    PrefixView::from_parts(variant, params, n, m as usize, partial, incomplete)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::ParamError;

    fn params(j: i64, s: i64, lambda: i64) -> GolombParams {
        GolombParams::new(j, s, lambda).unwrap()
    }

    /// Enumerates (label, weight) for every infinite-tree leaf in the arena.
    fn structural_leaves(tree: &LabeledTree) -> Vec<(i64, i64)> {
        let skeleton = tree.skeleton();
        let j = skeleton.j();
        let lambda = skeleton.lambda() as usize;
        skeleton
            .nodes()
            .iter()
            .enumerate()
            .filter_map(|(id, node)| {
                let is_leaf = match node.kind {
                    NodeKind::InitialLeaf => true,
                    NodeKind::TailNode(_) => true,
                    NodeKind::Regular => {
                        if node.subtree_index == 0 {
                            true
                        } else {
                            let chain_len = node.subtree_index * j as usize;
                            let at_end = node.depth_in_chain == Some(chain_len);
                            match skeleton.variant() {
                                TreeVariant::Knot => at_end,
                                TreeVariant::Tail => {
                                    at_end && node.chain_index != Some(lambda)
                                }
                            }
                        }
                    }
                    _ => false,
                };
                is_leaf.then(|| {
                    let weight = if node.kind == NodeKind::InitialLeaf { 1 } else { j };
                    (tree.labels()[id].start, weight)
                })
            })
            .collect()
    }

    #[test]
    fn depth_zero_skeleton_is_two_nodes_plus_initial_leaf() {
        let skeleton = build_skeleton(TreeVariant::Knot, 3, 2, 0).unwrap();
        assert_eq!(skeleton.len(), 3);
        assert_eq!(skeleton.nodes()[0].kind, NodeKind::InitialLeaf);
        assert_eq!(skeleton.nodes()[1].kind, NodeKind::Supernode(0));
        assert_eq!(skeleton.nodes()[2].kind, NodeKind::Regular);
        assert_eq!(skeleton.nodes()[2].parent, Some(1));
    }

    #[test]
    fn chain_counts_match_subtree_index() {
        let skeleton = build_skeleton(TreeVariant::Knot, 2, 3, 2).unwrap();
        for chain in 1..=3 {
            let len = skeleton
                .nodes()
                .iter()
                .filter(|n| n.subtree_index == 2 && n.chain_index == Some(chain))
                .count();
            assert_eq!(len, 4);
        }
    }

    #[test]
    fn variants_hold_equally_many_nodes() {
        for depth in 0..=4 {
            let knot = build_skeleton(TreeVariant::Knot, 2, 3, depth).unwrap();
            let tail = build_skeleton(TreeVariant::Tail, 2, 3, depth).unwrap();
            assert_eq!(knot.len(), tail.len());
        }
    }

    #[test]
    fn oversized_skeleton_is_refused() {
        let err = build_skeleton(TreeVariant::Knot, 1_000, 1_000, 1_000).unwrap_err();
        assert!(matches!(err, TreeError::TooLarge { .. }));
    }

    #[test]
    fn knot_leaf_labels_match_hand_labeling() {
        let skeleton = build_skeleton(TreeVariant::Knot, 2, 3, 3).unwrap();
        let tree = assign_labels(skeleton, 4).unwrap();
        let leaves: Vec<i64> = structural_leaves(&tree).iter().map(|&(l, _)| l).collect();
        assert_eq!(leaves, vec![1, 6, 13, 15, 17, 26, 30, 34, 45, 51, 57]);
    }

    #[test]
    fn label_52_sits_in_third_chain_of_fourth_subtree() {
        let skeleton = build_skeleton(TreeVariant::Knot, 2, 3, 3).unwrap();
        let tree = assign_labels(skeleton, 4).unwrap();
        let id = tree.find_label(52).unwrap();
        let node = &tree.skeleton().nodes()[id];
        assert_eq!(node.kind, NodeKind::Regular);
        assert_eq!(node.subtree_index, 3);
        assert_eq!(node.chain_index, Some(3));
    }

    #[test]
    fn tail_node_labels_for_depth_three() {
        let skeleton = build_skeleton(TreeVariant::Tail, 2, 3, 3).unwrap();
        let tree = assign_labels(skeleton, 4).unwrap();
        let tails: Vec<i64> = tree
            .skeleton()
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::TailNode(_)))
            .map(|(id, _)| tree.labels()[id].start)
            .collect();
        assert_eq!(tails, vec![17, 34, 57]);
    }

    #[test]
    fn zero_width_supernodes_keep_labels_contiguous() {
        let skeleton = build_skeleton(TreeVariant::Knot, 1, 1, 2).unwrap();
        let tree = assign_labels(skeleton, 0).unwrap();
        assert_eq!(tree.total_labels(), 7);
        for supernode in [1usize, 3, 6] {
            assert!(tree.labels()[supernode].is_empty());
        }
        let leaves: Vec<i64> = structural_leaves(&tree).iter().map(|&(l, _)| l).collect();
        assert_eq!(leaves, vec![1, 2, 4, 7]);
    }

    #[test]
    fn arithmetic_leaves_match_structural_enumeration() {
        for variant in [TreeVariant::Knot, TreeVariant::Tail] {
            for (j, s, lambda) in [(1, 0, 1), (2, 4, 3), (3, 1, 2), (1, 3, 4)] {
                let p = params(j, s, lambda);
                let depth = prefix_view(variant, p, 400).m();
                let skeleton = build_skeleton(variant, j, lambda, depth).unwrap();
                let tree = assign_labels(skeleton, s).unwrap();
                let structural: Vec<(i64, i64)> = structural_leaves(&tree)
                    .into_iter()
                    .filter(|&(label, _)| label <= 400)
                    .collect();
                let arithmetic: Vec<(i64, i64)> = leaf_records(variant, p, 400)
                    .iter()
                    .map(|r| (r.label, r.weight))
                    .collect();
                assert_eq!(structural, arithmetic, "variant={variant} j={j} s={s} lambda={lambda}");
            }
        }
    }

    #[test]
    fn leaf_records_examples() {
        let recs = leaf_records(TreeVariant::Knot, params(2, 4, 3), 26);
        let labels: Vec<i64> = recs.iter().map(|r| r.label).collect();
        let weights: Vec<i64> = recs.iter().map(|r| r.weight).collect();
        assert_eq!(labels, vec![1, 6, 13, 15, 17, 26]);
        assert_eq!(weights, vec![1, 2, 2, 2, 2, 2]);
        assert_eq!(recs[0].ordinal, 0);
        assert_eq!(recs[5].ordinal, 5);

        let labels: Vec<i64> = leaf_records(TreeVariant::Knot, params(1, 0, 1), 7)
            .iter()
            .map(|r| r.label)
            .collect();
        assert_eq!(labels, vec![1, 2, 4, 7]);

        let labels: Vec<i64> = leaf_records(TreeVariant::Tail, params(2, 4, 3), 17)
            .iter()
            .map(|r| r.label)
            .collect();
        assert_eq!(labels, vec![1, 6, 12, 14, 17]);
    }

    #[test]
    fn knot_weight_sequence_prefix() {
        let buf = leaf_weight_sequence(TreeVariant::Knot, params(2, 4, 3), 26);
        assert_eq!(
            buf.values(),
            &[1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3, 3, 5, 5, 7, 7, 9, 9, 9, 9, 9, 9, 9, 9, 9, 11]
        );
        assert_eq!(buf.source(), Source::TreeWeight);
    }

    #[test]
    fn tail_weight_sequence_prefix() {
        let buf = leaf_weight_sequence(TreeVariant::Tail, params(2, 4, 3), 17);
        assert_eq!(
            buf.values(),
            &[1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3, 5, 5, 7, 7, 7, 9]
        );
    }

    #[test]
    fn minimal_knot_weight_sequence_prefix() {
        let buf = leaf_weight_sequence(TreeVariant::Knot, params(2, 0, 1), 9);
        assert_eq!(buf.values(), &[1, 3, 3, 3, 5, 5, 5, 5, 5]);
    }

    #[test]
    fn initial_segments_for_both_variants() {
        let knot = initial_conditions(TreeVariant::Knot, params(2, 4, 3));
        assert_eq!(
            knot.values(),
            &[1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3, 3, 5, 5, 7, 7, 9]
        );
        let tail = initial_conditions(TreeVariant::Tail, params(2, 4, 3));
        assert_eq!(
            tail.values(),
            &[1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3, 5, 5, 7, 7, 7, 9]
        );
        let golomb = initial_conditions(TreeVariant::Knot, params(1, 0, 1));
        assert_eq!(golomb.values(), &[1, 2, 2, 3]);
    }

    #[test]
    fn lambda_one_variants_coincide() {
        for (j, s) in [(1, 0), (2, 1), (3, 4)] {
            let p = params(j, s, 1);
            let knot = leaf_weight_sequence(TreeVariant::Knot, p, 600);
            let tail = leaf_weight_sequence(TreeVariant::Tail, p, 600);
            assert_eq!(knot.values(), tail.values(), "j={j} s={s}");
        }
    }

    #[test]
    fn prefix_view_of_pinned_cutoff() {
        let view = prefix_view(TreeVariant::Knot, params(2, 4, 3), 52);
        assert_eq!(view.m(), 3);
        assert!(view.incomplete());
        assert_eq!(
            *view.partial(),
            PartialSubtree::Knot {
                supernode_labels: 4,
                knot_present: true,
                whole_chains: 2,
                last_chain_labels: 1,
            }
        );
        assert_eq!(view.complete_subtrees().len(), 3);
        assert_eq!(view.complete_subtrees()[2].first_label, 18);
        assert_eq!(view.complete_subtrees()[2].last_label, 34);
    }

    #[test]
    fn prefix_view_at_subtree_boundary_is_complete() {
        let view = prefix_view(TreeVariant::Knot, params(2, 4, 3), 17);
        assert_eq!(view.m(), 1);
        assert!(!view.incomplete());
        assert_eq!(
            *view.partial(),
            PartialSubtree::Knot {
                supernode_labels: 4,
                knot_present: true,
                whole_chains: 3,
                last_chain_labels: 0,
            }
        );
    }

    #[test]
    fn prefix_view_of_label_one_holds_only_the_initial_leaf() {
        for variant in [TreeVariant::Knot, TreeVariant::Tail] {
            let view = prefix_view(variant, params(3, 2, 2), 1);
            assert_eq!(view.m(), 0);
            assert!(view.incomplete());
            assert_eq!(
                *view.partial(),
                PartialSubtree::Root {
                    supernode_labels: 0,
                    far_present: false,
                }
            );
            assert_eq!(view.leaf_weight(), 1);
        }
    }

    #[test]
    fn view_weight_agrees_with_weight_sequence() {
        for variant in [TreeVariant::Knot, TreeVariant::Tail] {
            for (j, s, lambda) in [(1, 0, 1), (2, 4, 3), (3, 1, 2), (2, 0, 4)] {
                let p = params(j, s, lambda);
                let w = leaf_weight_sequence(variant, p, 300);
                for n in 1..=300usize {
                    let view = prefix_view(variant, p, n as i64);
                    assert_eq!(
                        view.leaf_weight(),
                        w.get(n),
                        "variant={variant} j={j} s={s} lambda={lambda} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn label_accounting_matches_arena_totals() {
        for variant in [TreeVariant::Knot, TreeVariant::Tail] {
            for (j, s, lambda) in [(1, 0, 1), (2, 4, 3), (3, 2, 2)] {
                let p = params(j, s, lambda);
                for depth in 0..=4usize {
                    let skeleton = build_skeleton(variant, j, lambda, depth).unwrap();
                    let tree = assign_labels(skeleton, s).unwrap();
                    assert_eq!(
                        tree.total_labels() as i128,
                        labels_through(p, depth as i64),
                        "variant={variant} j={j} s={s} lambda={lambda} depth={depth}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejected_parameters_surface_as_errors() {
        assert_eq!(
            build_skeleton(TreeVariant::Knot, 0, 1, 1).unwrap_err(),
            TreeError::JTooSmall(0)
        );
        assert_eq!(
            build_skeleton(TreeVariant::Knot, 1, 0, 1).unwrap_err(),
            TreeError::LambdaTooSmall(0)
        );
        let skeleton = build_skeleton(TreeVariant::Knot, 1, 1, 0).unwrap();
        assert_eq!(
            assign_labels(skeleton, -1).unwrap_err(),
            TreeError::SNegative(-1)
        );
        assert!(matches!(
            GolombParams::new(1, 0, 0).unwrap_err(),
            ParamError::LambdaTooSmall(0)
        ));
    }
}
