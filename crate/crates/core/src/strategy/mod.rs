//! Strategies as memory machines.
//!
//! A strategy reads the play one vertex at a time into a memory value and picks a move from
//! the memory and the current vertex. [`Strategy::evaluate`] folds a whole prefix, so every
//! strategy is also a function of the full history.

mod named;
mod plan;
mod reference;

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arena::{Arena, AttractorResult};
use crate::vertex_set::{Player, VertexId, VertexSet};

pub use plan::{trace_change_points, ChangePointTrace, Mode, PlanMemory, TraceError, ZielonkaStrategy};
pub use named::{AnyMemory, AnyStrategy, BuildOptions, NamedError, StrategyName, RANDOM_STATES};
pub use reference::ReferenceBounding;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy of player {player} is not defined at vertex {vertex}")]
    OffDomain { player: Player, vertex: VertexId },
    #[error("scripted play has no move after {0} vertices")]
    ScriptExhausted(usize),
}

pub trait Strategy {
    type Memory: Clone + Eq + Hash + Debug;

    fn player(&self) -> Player;

    /// Memory after the one-vertex history `v`.
    fn start(&self, v: VertexId) -> Self::Memory;

    /// Memory after appending `v` to the history summarised by `memory`.
    fn observe(&self, memory: &Self::Memory, v: VertexId) -> Self::Memory;

    /// Move at the current vertex `v`, the last vertex observed.
    fn choose(&self, memory: &Self::Memory, v: VertexId) -> Result<VertexId, StrategyError>;

    /// Whether the memory takes finitely many values, so that a repeated
    /// `(vertex, memory)` pair proves the play is a lasso.
    fn is_finite_state(&self) -> bool {
        true
    }

    fn memory_of(&self, prefix: &[VertexId]) -> Option<Self::Memory> {
        let (&first, rest) = prefix.split_first()?;
        Some(rest.iter().fold(self.start(first), |m, &v| self.observe(&m, v)))
    }

    /// The move after a non-empty prefix ending in one of the player's vertices.
    fn evaluate(&self, prefix: &[VertexId]) -> Result<VertexId, StrategyError> {
        let memory = self.memory_of(prefix).expect("evaluate needs a non-empty prefix");
        self.choose(&memory, *prefix.last().unwrap())
    }
}

fn smallest_successor_in(arena: &Arena, v: VertexId, region: VertexSet) -> Option<VertexId> {
    arena.successor_set(v).intersection(region).first()
}

/// Always the first listed successor.
#[derive(Debug, Clone)]
pub struct FirstSuccessor {
    pub arena: Arc<Arena>,
    pub player: Player,
}

impl Strategy for FirstSuccessor {
    type Memory = ();

    fn player(&self) -> Player {
        self.player
    }

    fn start(&self, _: VertexId) {}

    fn observe(&self, _: &(), _: VertexId) {}

    fn choose(&self, _: &(), v: VertexId) -> Result<VertexId, StrategyError> {
        Ok(self.arena.successors(v)[0])
    }
}

/// Positional attractor strategy.
#[derive(Debug, Clone)]
pub struct AttractorStrategy {
    pub result: AttractorResult,
}

impl Strategy for AttractorStrategy {
    type Memory = ();

    fn player(&self) -> Player {
        self.result.player
    }

    fn start(&self, _: VertexId) {}

    fn observe(&self, _: &(), _: VertexId) {}

    fn choose(&self, _: &(), v: VertexId) -> Result<VertexId, StrategyError> {
        self.result.strategy(v).ok_or(StrategyError::OffDomain { player: self.result.player, vertex: v })
    }
}

/// A random finite-state strategy: `states` memory states, with a random move and a random
/// memory transition for every (state, vertex) pair. One state gives a positional strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomMachine {
    player: Player,
    moves: Vec<Vec<VertexId>>,
    transitions: Vec<Vec<usize>>,
}

impl RandomMachine {
    pub fn new(arena: &Arena, player: Player, states: usize, seed: u64) -> Self {
        assert!(states >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = arena.vertex_count();
        let moves = (0..states)
            .map(|_| {
                (0..n)
                    .map(|v| {
                        let succ = arena.successors(v);
                        succ[rng.random_range(0..succ.len())]
                    })
                    .collect()
            })
            .collect();
        let transitions =
            (0..states).map(|_| (0..n).map(|_| rng.random_range(0..states)).collect()).collect();
        RandomMachine { player, moves, transitions }
    }

    pub fn positional(arena: &Arena, player: Player, seed: u64) -> Self {
        RandomMachine::new(arena, player, 1, seed)
    }

    /// The positional strategy with the given move at every vertex.
    pub fn from_moves(player: Player, moves: Vec<VertexId>) -> Self {
        let n = moves.len();
        RandomMachine { player, moves: vec![moves], transitions: vec![vec![0; n]] }
    }

    pub fn states(&self) -> usize {
        self.moves.len()
    }
}

impl Strategy for RandomMachine {
    type Memory = usize;

    fn player(&self) -> Player {
        self.player
    }

    fn start(&self, v: VertexId) -> usize {
        self.transitions[0][v]
    }

    fn observe(&self, &m: &usize, v: VertexId) -> usize {
        self.transitions[m][v]
    }

    fn choose(&self, &m: &usize, v: VertexId) -> Result<VertexId, StrategyError> {
        Ok(self.moves[m][v])
    }
}

/// Every positional strategy of `player` on `arena`, in lexicographic order of move tables.
pub fn all_positional(arena: &Arena, player: Player) -> Vec<RandomMachine> {
    let n = arena.vertex_count();
    let mut tables: Vec<Vec<VertexId>> = vec![Vec::new()];
    for v in 0..n {
        let options: Vec<VertexId> = if arena.owner(v) == player {
            arena.successors(v).to_vec()
        } else {
            vec![arena.successors(v)[0]]
        };
        tables = tables
            .into_iter()
            .flat_map(|t| {
                options.iter().map(move |&w| {
                    let mut t = t.clone();
                    t.push(w);
                    t
                })
            })
            .collect();
    }
    tables.into_iter().map(|t| RandomMachine::from_moves(player, t)).collect()
}

/// Replays a fixed word: after `m` vertices the move is `word[m]`.
#[derive(Debug, Clone)]
pub struct Scripted {
    pub player: Player,
    pub word: Vec<VertexId>,
}

impl Strategy for Scripted {
    type Memory = usize;

    fn player(&self) -> Player {
        self.player
    }

    fn start(&self, _: VertexId) -> usize {
        1
    }

    fn observe(&self, &m: &usize, _: VertexId) -> usize {
        m + 1
    }

    fn choose(&self, &m: &usize, _: VertexId) -> Result<VertexId, StrategyError> {
        self.word.get(m).copied().ok_or(StrategyError::ScriptExhausted(m))
    }

    fn is_finite_state(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn attractor_strategy_moves_down() {
        let g = corpus::fig1().arena;
        let s = AttractorStrategy { result: g.attractor(Player::Zero, VertexSet::from([2]), g.vertices()) };
        assert_eq!(s.evaluate(&[1]), Ok(2));
        assert!(matches!(s.evaluate(&[2]), Err(StrategyError::OffDomain { .. })));

        let gn = corpus::g_n(4).arena;
        let s = AttractorStrategy { result: gn.attractor(Player::Zero, VertexSet::from([0]), gn.vertices()) };
        for j in 1..=4 {
            assert_eq!(s.evaluate(&[j]), Ok(j - 1));
        }
    }

    #[test]
    fn positional_enumeration() {
        let g = corpus::fig1().arena;
        assert_eq!(all_positional(&g, Player::One).len(), 4);
        assert_eq!(all_positional(&g, Player::Zero).len(), 2);
    }

    #[test]
    fn random_machine_is_legal_and_seeded() {
        let g = corpus::random_game(3, 4).arena;
        let a = RandomMachine::new(&g, Player::One, 3, 9);
        assert_eq!(a, RandomMachine::new(&g, Player::One, 3, 9));
        for m in 0..3 {
            for v in 0..4 {
                assert!(g.has_edge(v, a.choose(&m, v).unwrap()));
            }
        }
    }
}
