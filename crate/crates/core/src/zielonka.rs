//! Zielonka's recursive algorithm, keeping every round so that strategies can be built
//! from the recursion afterwards.

use std::sync::Arc;

use crate::arena::{Arena, AttractorResult};
use crate::condition::{ConditionError, MullerCondition, NodeId, ZielonkaTree};
use crate::vertex_set::{Player, VertexSet};

/// One iteration of the main loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    /// Round number, starting at 1.
    pub n: usize,
    /// `A_n`: the opponent's attractor of `U_{n-1}`, with its positional strategy.
    pub opponent_attractor: AttractorResult,
    /// `X_n = V ∖ A_n`.
    pub x: VertexSet,
    /// `n mod k`.
    pub child_index: usize,
    /// Tree node of `T_n`.
    pub child: NodeId,
    /// `lbl(T_n)`.
    pub label: VertexSet,
    /// `Z_n = X_n ∖ lbl(T_n)`.
    pub z: VertexSet,
    /// Attractor of `Z_n` for the owner of the root label, inside `X_n`.
    pub own_attractor: AttractorResult,
    /// `Y_n = X_n ∖ own_attractor`.
    pub y: VertexSet,
    /// Recursive result on `G[Y_n]` with tree `T_n`.
    pub sub: Decomposition,
    /// `U_n = A_n ∪ W^n_{1-i}`.
    pub u: VertexSet,
}

impl RoundRecord {
    pub fn a(&self) -> VertexSet {
        self.opponent_attractor.attractor
    }
}

/// Winning regions of a (sub)arena together with the full recursion record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub tree: Arc<ZielonkaTree>,
    /// Tree node this level was solved for.
    pub node: NodeId,
    /// Vertices of the (sub)arena.
    pub domain: VertexSet,
    /// The player `i` whose family contains the node's label.
    pub owner: Player,
    pub rounds: Vec<RoundRecord>,
    pub w0: VertexSet,
    pub w1: VertexSet,
}

impl Decomposition {
    pub fn label(&self) -> VertexSet {
        self.tree.label(self.node)
    }

    pub fn branching(&self) -> usize {
        self.tree.branching(self.node)
    }

    pub fn is_leaf(&self) -> bool {
        self.tree.is_leaf(self.node)
    }

    pub fn region(&self, p: Player) -> VertexSet {
        match p {
            Player::Zero => self.w0,
            Player::One => self.w1,
        }
    }

    pub fn winning_regions(&self) -> (VertexSet, VertexSet) {
        (self.w0, self.w1)
    }

    /// The last `k` rounds, one per child; empty for leaves and empty domains.
    pub fn final_rounds(&self) -> &[RoundRecord] {
        let k = self.branching().min(self.rounds.len());
        &self.rounds[self.rounds.len() - k..]
    }

    /// Number of decompositions in the recursion, this one included.
    pub fn size(&self) -> usize {
        1 + self.rounds.iter().map(|r| r.sub.size()).sum::<usize>()
    }
}

/// Solves the game on `arena` for the condition whose Zielonka tree is `tree`.
pub fn solve(arena: &Arena, tree: Arc<ZielonkaTree>) -> Result<Decomposition, ConditionError> {
    let universe = tree.label(ZielonkaTree::ROOT);
    if !arena.vertices().is_subset(universe) {
        return Err(ConditionError::OutOfUniverse { set: arena.vertices(), universe });
    }
    Ok(solve_in(arena, &tree, ZielonkaTree::ROOT, arena.vertices()))
}

/// Builds the condition's tree and solves.
pub fn solve_game(arena: &Arena, condition: &MullerCondition) -> Result<Decomposition, ConditionError> {
    solve(arena, Arc::new(condition.zielonka_tree()?))
}

fn solve_in(arena: &Arena, tree: &Arc<ZielonkaTree>, node: NodeId, domain: VertexSet) -> Decomposition {
    let owner = tree.owner(node);
    let mut d = Decomposition {
        tree: Arc::clone(tree),
        node,
        domain,
        owner,
        rounds: Vec::new(),
        w0: VertexSet::EMPTY,
        w1: VertexSet::EMPTY,
    };
    if domain.is_empty() {
        return d;
    }
    let k = tree.branching(node);
    if k == 0 {
        d.set_regions(owner, domain);
        return d;
    }
    let opp = owner.opponent();
    let mut us = vec![VertexSet::EMPTY];
    loop {
        let n = us.len();
        let prev = us[n - 1];
        let opponent_attractor = arena.attractor(opp, prev, domain);
        let x = domain.difference(opponent_attractor.attractor);
        let child_index = n % k;
        let child = tree.child(node, child_index);
        let label = tree.label(child);
        let z = x.difference(label);
        let own_attractor = arena.attractor(owner, z, x);
        let y = x.difference(own_attractor.attractor);
        debug_assert!(y.is_empty() || arena.induces_subarena(y));
        let sub = solve_in(arena, tree, child, y);
        let u = opponent_attractor.attractor.union(sub.region(opp));
        debug_assert!(prev.is_subset(u), "U must grow monotonically");
        us.push(u);
        d.rounds.push(RoundRecord {
            n,
            opponent_attractor,
            x,
            child_index,
            child,
            label,
            z,
            own_attractor,
            y,
            sub,
            u,
        });
        if n >= k && us[n - k..].iter().all(|&s| s == u) {
            d.set_regions(owner, domain.difference(u));
            return d;
        }
    }
}

impl Decomposition {
    fn set_regions(&mut self, owner: Player, owned: VertexSet) {
        let other = self.domain.difference(owned);
        match owner {
            Player::Zero => (self.w0, self.w1) = (owned, other),
            Player::One => (self.w0, self.w1) = (other, owned),
        }
    }
}
