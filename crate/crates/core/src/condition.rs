//! Muller winning conditions and their Zielonka trees.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::vertex_set::{Player, VertexSet};

/// Largest universe for which Zielonka trees are built by subset enumeration.
pub const MAX_TREE_UNIVERSE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("{set} is not contained in the universe {universe}")]
    OutOfUniverse { set: VertexSet, universe: VertexSet },
    #[error("universe of {0} vertices is too large for Zielonka-tree construction (max {MAX_TREE_UNIVERSE})")]
    UniverseTooLarge(usize),
}

/// A partition `(F0, F1)` of the subsets of a universe. `F0` is listed explicitly and every
/// unlisted set, including the empty set unless listed, belongs to `F1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MullerCondition {
    universe: VertexSet,
    f0: BTreeSet<VertexSet>,
}

impl MullerCondition {
    pub fn new(
        universe: VertexSet,
        f0: impl IntoIterator<Item = VertexSet>,
    ) -> Result<Self, ConditionError> {
        let mut sets = BTreeSet::new();
        for set in f0 {
            if !set.is_subset(universe) {
                return Err(ConditionError::OutOfUniverse { set, universe });
            }
            sets.insert(set);
        }
        Ok(MullerCondition { universe, f0: sets })
    }

    pub fn universe(&self) -> VertexSet {
        self.universe
    }

    /// The explicitly listed family `F0`, in ascending bit-mask order.
    pub fn f0(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.f0.iter().copied()
    }

    pub fn f0_len(&self) -> usize {
        self.f0.len()
    }

    /// The player whose family contains `set`.
    pub fn membership(&self, set: VertexSet) -> Result<Player, ConditionError> {
        if !set.is_subset(self.universe) {
            return Err(ConditionError::OutOfUniverse { set, universe: self.universe });
        }
        Ok(self.owner_of(set))
    }

    /// Like [`Self::membership`] without the universe check; sets reaching outside the
    /// universe are never listed and so belong to Player 1.
    pub fn owner_of(&self, set: VertexSet) -> Player {
        if self.f0.contains(&set) {
            Player::Zero
        } else {
            Player::One
        }
    }

    /// `(F0, F1) ↾ X`.
    pub fn restrict(&self, set: VertexSet) -> MullerCondition {
        MullerCondition {
            universe: set,
            f0: self.f0.iter().copied().filter(|f| f.is_subset(set)).collect(),
        }
    }

    /// The condition with the roles of the players exchanged. Only defined for
    /// universes small enough to enumerate.
    pub fn swapped(&self) -> Result<MullerCondition, ConditionError> {
        let n = self.universe.len();
        if n > MAX_TREE_UNIVERSE {
            return Err(ConditionError::UniverseTooLarge(n));
        }
        let f0 = self.universe.subsets().filter(|s| !self.f0.contains(s));
        MullerCondition::new(self.universe, f0)
    }

    pub fn zielonka_tree(&self) -> Result<ZielonkaTree, ConditionError> {
        ZielonkaTree::build(self)
    }
}

/// Index of a node inside a [`ZielonkaTree`].
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: VertexSet,
    /// The player whose family contains `label`.
    pub owner: Player,
    pub children: Vec<NodeId>,
}

/// Zielonka tree of a Muller condition, stored as an arena of nodes. Node 0 is the root.
///
/// Children of a node labelled `X` (owned by `i`) are the ⊆-maximal non-empty sets of
/// `F_{1-i}` below `X`, ordered by descending cardinality and then ascending bit mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZielonkaTree {
    nodes: Vec<TreeNode>,
}

impl ZielonkaTree {
    pub const ROOT: NodeId = 0;

    pub fn build(cond: &MullerCondition) -> Result<Self, ConditionError> {
        let n = cond.universe.len();
        if n > MAX_TREE_UNIVERSE {
            return Err(ConditionError::UniverseTooLarge(n));
        }
        let mut tree = ZielonkaTree { nodes: Vec::new() };
        let mut memo = HashMap::new();
        tree.grow(cond, cond.universe, &mut memo);
        Ok(tree)
    }

    fn grow(
        &mut self,
        cond: &MullerCondition,
        label: VertexSet,
        memo: &mut HashMap<VertexSet, Vec<VertexSet>>,
    ) -> NodeId {
        let owner = cond.owner_of(label);
        let id = self.nodes.len();
        self.nodes.push(TreeNode { label, owner, children: Vec::new() });
        let child_labels = memo
            .entry(label)
            .or_insert_with(|| maximal_subsets(cond, label, owner.opponent()))
            .clone();
        let children = child_labels.into_iter().map(|l| self.grow(cond, l, memo)).collect();
        self.nodes[id].children = children;
        id
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn label(&self, id: NodeId) -> VertexSet {
        self.nodes[id].label
    }

    pub fn owner(&self, id: NodeId) -> Player {
        self.nodes[id].owner
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn branching(&self, id: NodeId) -> usize {
        self.nodes[id].children.len()
    }

    /// `child(T, j)`.
    pub fn child(&self, id: NodeId, j: usize) -> NodeId {
        self.nodes[id].children[j]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &ZielonkaTree, id: NodeId) -> usize {
            1 + t.children(id).iter().map(|&c| go(t, c)).max().unwrap_or(0)
        }
        go(self, Self::ROOT)
    }

    /// Copy of the subtree rooted at `id`, renumbered so that `id` becomes the root.
    pub fn subtree(&self, id: NodeId) -> ZielonkaTree {
        fn copy(src: &ZielonkaTree, id: NodeId, dst: &mut Vec<TreeNode>) -> NodeId {
            let new_id = dst.len();
            dst.push(TreeNode { children: Vec::new(), ..src.nodes[id].clone() });
            let children = src.nodes[id].children.iter().map(|&c| copy(src, c, dst)).collect();
            dst[new_id].children = children;
            new_id
        }
        let mut nodes = Vec::new();
        copy(self, id, &mut nodes);
        ZielonkaTree { nodes }
    }

    /// Node ids in pre-order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![Self::ROOT];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }
}

/// ⊆-maximal non-empty subsets of `label` owned by `side`, in child order.
fn maximal_subsets(cond: &MullerCondition, label: VertexSet, side: Player) -> Vec<VertexSet> {
    let mut candidates: Vec<VertexSet> = label
        .subsets()
        .filter(|s| !s.is_empty() && *s != label && cond.owner_of(*s) == side)
        .collect();
    candidates.sort_by(|a, b| b.len().cmp(&a.len()).then(a.bits().cmp(&b.bits())));
    let mut maximal: Vec<VertexSet> = Vec::new();
    for c in candidates {
        // larger sets come first, so anything dominating c is already kept
        if !maximal.iter().any(|m| c.is_subset(*m)) {
            maximal.push(c);
        }
    }
    maximal
}
