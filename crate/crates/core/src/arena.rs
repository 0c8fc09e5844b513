//! Game graphs, subarenas, traps and attractors.

use thiserror::Error;

use crate::vertex_set::{Player, VertexId, VertexSet, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("arena has {0} vertices, at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("arena has no vertices")]
    Empty,
    #[error("vertex {0} has no successor")]
    NoSuccessor(VertexId),
    #[error("vertex {from} has successor {to} outside the arena")]
    DanglingSuccessor { from: VertexId, to: VertexId },
    #[error("vertex {from} lists successor {to} twice")]
    DuplicateSuccessor { from: VertexId, to: VertexId },
    #[error("owner and successor tables disagree on the vertex count")]
    ShapeMismatch,
    #[error("{set} is not a subset of the arena's vertices")]
    OutsideArena { set: VertexSet },
    #[error("vertex {vertex} has no successor inside {set}, so the set does not induce a subarena")]
    NotASubarena { vertex: VertexId, set: VertexSet },
}

/// A finite game graph `(V, V0, V1, E)` in which every vertex has a successor.
///
/// Successor lists keep their construction order; vertex iteration is ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    owner: Vec<Player>,
    successors: Vec<Vec<VertexId>>,
    predecessors: Vec<Vec<VertexId>>,
    succ_sets: Vec<VertexSet>,
    names: Vec<Option<String>>,
}

impl Arena {
    pub fn new(owner: Vec<Player>, successors: Vec<Vec<VertexId>>) -> Result<Self, ArenaError> {
        let n = owner.len();
        Self::with_names(owner, successors, vec![None; n])
    }

    pub fn with_names(
        owner: Vec<Player>,
        successors: Vec<Vec<VertexId>>,
        names: Vec<Option<String>>,
    ) -> Result<Self, ArenaError> {
        let n = owner.len();
        if n == 0 {
            return Err(ArenaError::Empty);
        }
        if n > MAX_VERTICES {
            return Err(ArenaError::TooManyVertices(n));
        }
        if successors.len() != n || names.len() != n {
            return Err(ArenaError::ShapeMismatch);
        }
        let mut predecessors = vec![Vec::new(); n];
        let mut succ_sets = Vec::with_capacity(n);
        for (v, succ) in successors.iter().enumerate() {
            if succ.is_empty() {
                return Err(ArenaError::NoSuccessor(v));
            }
            let mut set = VertexSet::EMPTY;
            for &w in succ {
                if w >= n {
                    return Err(ArenaError::DanglingSuccessor { from: v, to: w });
                }
                if set.contains(w) {
                    return Err(ArenaError::DuplicateSuccessor { from: v, to: w });
                }
                set.insert(w);
                predecessors[w].push(v);
            }
            succ_sets.push(set);
        }
        Ok(Arena { owner, successors, predecessors, succ_sets, names })
    }

    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owner[v]
    }

    /// Vertices owned by `p`.
    pub fn owned_by(&self, p: Player) -> VertexSet {
        self.owner.iter().enumerate().filter(|(_, &o)| o == p).map(|(v, _)| v).collect()
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v]
    }

    pub fn successor_set(&self, v: VertexId) -> VertexSet {
        self.succ_sets[v]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.predecessors[v]
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        from < self.vertex_count() && self.succ_sets[from].contains(to)
    }

    pub fn name(&self, v: VertexId) -> Option<&str> {
        self.names[v].as_deref()
    }

    pub fn names(&self) -> &[Option<String>] {
        &self.names
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Checks that consecutive entries of `path` are edges.
    pub fn is_path(&self, path: &[VertexId]) -> bool {
        path.iter().all(|&v| v < self.vertex_count())
            && path.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// First vertex of `set` lacking a successor inside `set`.
    pub fn dead_end_in(&self, set: VertexSet) -> Option<VertexId> {
        set.iter().find(|&v| self.succ_sets[v].is_disjoint(set))
    }

    pub fn induces_subarena(&self, set: VertexSet) -> bool {
        set.is_subset(self.vertices()) && self.dead_end_in(set).is_none()
    }

    /// The subarena `G[X]`, renumbered densely; `mapping[new] = old`.
    pub fn subarena(&self, set: VertexSet) -> Result<Subarena, ArenaError> {
        if !set.is_subset(self.vertices()) {
            return Err(ArenaError::OutsideArena { set });
        }
        if set.is_empty() {
            return Err(ArenaError::Empty);
        }
        if let Some(vertex) = self.dead_end_in(set) {
            return Err(ArenaError::NotASubarena { vertex, set });
        }
        let mapping: Vec<VertexId> = set.to_vec();
        let mut new_index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in mapping.iter().enumerate() {
            new_index[v] = i;
        }
        let owner = mapping.iter().map(|&v| self.owner[v]).collect();
        let successors = mapping
            .iter()
            .map(|&v| {
                self.successors[v].iter().filter(|w| set.contains(**w)).map(|&w| new_index[w]).collect()
            })
            .collect();
        let names = mapping.iter().map(|&v| self.names[v].clone()).collect();
        let arena = Arena::with_names(owner, successors, names)?;
        Ok(Subarena { arena, mapping })
    }

    /// Attractor of `target` for `player` inside `within`.
    ///
    /// `within` is expected to induce a subarena. Vertices of `player` join when some
    /// successor is already attracted, opponent vertices when all successors inside
    /// `within` are.
    pub fn attractor(&self, player: Player, target: VertexSet, within: VertexSet) -> AttractorResult {
        let n = self.vertex_count();
        let within = within.intersection(self.vertices());
        let mut attractor = target.intersection(within);
        let base = attractor;
        let mut rank = vec![None; n];
        let mut strategy = vec![None; n];
        for v in attractor.iter() {
            rank[v] = Some(0);
        }
        let mut layer = 0;
        let mut frontier = attractor;
        while !frontier.is_empty() {
            layer += 1;
            let mut next = VertexSet::EMPTY;
            // candidates are predecessors of the newest layer
            let mut candidates = VertexSet::EMPTY;
            for w in frontier.iter() {
                for &u in &self.predecessors[w] {
                    candidates.insert(u);
                }
            }
            let candidates = candidates.intersection(within).difference(attractor);
            for v in candidates.iter() {
                let inside = self.succ_sets[v].intersection(within);
                let joins = if self.owner[v] == player {
                    !inside.is_disjoint(attractor)
                } else {
                    inside.is_subset(attractor)
                };
                if joins {
                    next.insert(v);
                    rank[v] = Some(layer);
                    if self.owner[v] == player {
                        strategy[v] = self.successors[v]
                            .iter()
                            .copied()
                            .find(|&w| attractor.contains(w));
                    }
                }
            }
            attractor = attractor.union(next);
            frontier = next;
        }
        AttractorResult { player, target: base, within, attractor, strategy, rank }
    }

    /// `set` is a trap for `player`: every edge of `player` inside stays inside and
    /// every opponent vertex inside keeps at least one successor inside.
    pub fn is_trap(&self, set: VertexSet, player: Player) -> bool {
        set.iter().all(|v| {
            let succ = self.succ_sets[v];
            if self.owner[v] == player {
                succ.is_subset(set)
            } else {
                !succ.is_disjoint(set)
            }
        })
    }
}

/// A subarena together with the mapping back to the parent's vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subarena {
    pub arena: Arena,
    pub mapping: Vec<VertexId>,
}

impl Subarena {
    pub fn to_parent(&self, v: VertexId) -> VertexId {
        self.mapping[v]
    }

    pub fn from_parent(&self, v: VertexId) -> Option<VertexId> {
        self.mapping.iter().position(|&w| w == v)
    }

    pub fn set_to_parent(&self, set: VertexSet) -> VertexSet {
        set.iter().map(|v| self.mapping[v]).collect()
    }
}

/// Result of an attractor computation, with the positional strategy that realises it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractorResult {
    pub player: Player,
    /// `target ∩ within`.
    pub target: VertexSet,
    pub within: VertexSet,
    pub attractor: VertexSet,
    strategy: Vec<Option<VertexId>>,
    rank: Vec<Option<usize>>,
}

impl AttractorResult {
    /// Move for `player` at `v`; defined on the player's attractor vertices outside the target.
    pub fn strategy(&self, v: VertexId) -> Option<VertexId> {
        self.strategy.get(v).copied().flatten()
    }

    /// Fixpoint layer at which `v` joined the attractor.
    pub fn rank(&self, v: VertexId) -> Option<usize> {
        self.rank.get(v).copied().flatten()
    }

    /// Vertices on which [`Self::strategy`] is defined.
    pub fn strategy_domain(&self) -> VertexSet {
        self.strategy.iter().enumerate().filter(|(_, m)| m.is_some()).map(|(v, _)| v).collect()
    }
}
