//! Finite-time Muller games: the play stops as soon as some set's score reaches its
//! threshold, and the owner of that set wins.
//!
//! The game is solved as a reachability game on states `(vertex, score chain)`. Below the
//! thresholds the chain is finite memory, and the running part of the product is acyclic.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::arena::Arena;
use crate::condition::MullerCondition;
use crate::scoring::{ScoreChain, ScoringError};
use crate::strategy::{Strategy, StrategyError};
use crate::vertex_set::{Player, VertexId, VertexSet};

/// Default cap on the number of product states.
pub const DEFAULT_STATE_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteTimeError {
    #[error("threshold {0} is below 2")]
    ThresholdTooSmall(u32),
    #[error("|F|! + 1 overflows for |F| = {0}")]
    ThresholdOverflow(usize),
    #[error("the rule never stops a play")]
    NoStoppingRule,
    #[error("product game exceeds {0} states")]
    StateBudgetExceeded(usize),
    #[error("running states contain a cycle through {0:?}")]
    AcyclicityViolation(Vec<VertexId>),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// When the referee stops a play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "lowercase")]
pub enum StoppingRule {
    /// Every set stops the play at score `k`.
    Uniform(u32),
    /// A set `F` stops the play at score `|F|! + 1`.
    McNaughton,
    /// Plays are never stopped.
    None,
}

impl StoppingRule {
    pub fn validate(self) -> Result<Self, FiniteTimeError> {
        match self {
            StoppingRule::Uniform(k) if k < 2 => Err(FiniteTimeError::ThresholdTooSmall(k)),
            _ => Ok(self),
        }
    }

    /// Score at which `set` stops the play; `u32::MAX` under [`StoppingRule::None`].
    pub fn threshold(self, set: VertexSet) -> Result<u32, FiniteTimeError> {
        match self {
            StoppingRule::Uniform(k) => Ok(k),
            StoppingRule::None => Ok(u32::MAX),
            StoppingRule::McNaughton => {
                let n = set.len();
                (1..=n as u32)
                    .try_fold(1u32, |acc, x| acc.checked_mul(x))
                    .and_then(|f| f.checked_add(1))
                    .ok_or(FiniteTimeError::ThresholdOverflow(n))
            }
        }
    }

    /// Threshold per set size `1..=n`.
    pub fn thresholds(self, n: usize) -> Vec<(usize, Result<u32, FiniteTimeError>)> {
        (1..=n).map(|s| (s, self.threshold(VertexSet::full(s)))).collect()
    }

    /// Thresholds for every set of a universe, checked once up front.
    pub fn table(self, universe: VertexSet) -> Result<ThresholdTable, FiniteTimeError> {
        let by_size = (0..=universe.len())
            .map(|s| self.threshold(VertexSet::full(s)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ThresholdTable { by_size })
    }
}

/// Precomputed thresholds by set size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdTable {
    by_size: Vec<u32>,
}

impl ThresholdTable {
    pub fn get(&self, set: VertexSet) -> u32 {
        self.by_size.get(set.len()).copied().unwrap_or(u32::MAX)
    }

    /// The set whose score reached its threshold, if any. Two at once is a scoring bug.
    pub fn hit(&self, chain: &ScoreChain) -> Result<Option<VertexSet>, ScoringError> {
        chain.threshold_hit(|s| self.get(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Stopped { winner: Player, set: VertexSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductState {
    pub vertex: VertexId,
    pub chain: ScoreChain,
    pub status: Status,
}

/// Reachable states `(vertex, chain)` from every one-vertex play.
#[derive(Debug, Clone)]
pub struct ProductGame {
    pub rule: StoppingRule,
    states: Vec<ProductState>,
    successors: Vec<Vec<usize>>,
    initial: Vec<usize>,
    owners: Vec<Player>,
}

impl ProductGame {
    pub fn build(
        arena: &Arena,
        condition: &MullerCondition,
        rule: StoppingRule,
        state_cap: usize,
    ) -> Result<Self, FiniteTimeError> {
        if rule == StoppingRule::None {
            return Err(FiniteTimeError::NoStoppingRule);
        }
        let table = rule.validate()?.table(arena.vertices())?;
        let mut pg = ProductGame {
            rule,
            states: Vec::new(),
            successors: Vec::new(),
            initial: Vec::new(),
            owners: (0..arena.vertex_count()).map(|v| arena.owner(v)).collect(),
        };
        let mut index: HashMap<ScoreChain, usize> = HashMap::new();
        let mut queue = Vec::new();
        let mut intern = |chain: ScoreChain,
                          pg: &mut ProductGame,
                          queue: &mut Vec<usize>|
         -> Result<usize, FiniteTimeError> {
            if let Some(&i) = index.get(&chain) {
                return Ok(i);
            }
            if pg.states.len() >= state_cap {
                return Err(FiniteTimeError::StateBudgetExceeded(state_cap));
            }
            let status = match table.hit(&chain)? {
                Some(set) => Status::Stopped { winner: condition.owner_of(set), set },
                None => Status::Running,
            };
            let i = pg.states.len();
            pg.states.push(ProductState { vertex: chain.last_vertex(), chain: chain.clone(), status });
            pg.successors.push(Vec::new());
            index.insert(chain, i);
            if status == Status::Running {
                queue.push(i);
            }
            Ok(i)
        };
        for v in 0..arena.vertex_count() {
            let i = intern(ScoreChain::new(v), &mut pg, &mut queue)?;
            pg.initial.push(i);
        }
        while let Some(i) = queue.pop() {
            let v = pg.states[i].vertex;
            let mut out = Vec::with_capacity(arena.successors(v).len());
            for &w in arena.successors(v) {
                let chain = pg.states[i].chain.updated(w);
                out.push(intern(chain, &mut pg, &mut queue)?);
            }
            pg.successors[i] = out;
        }
        pg.check_acyclic()?;
        Ok(pg)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &ProductState {
        &self.states[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    pub fn initial(&self, v: VertexId) -> usize {
        self.initial[v]
    }

    pub fn running_count(&self) -> usize {
        self.states.iter().filter(|s| s.status == Status::Running).count()
    }

    /// Running states in an order where every successor comes first.
    fn postorder(&self) -> Result<Vec<usize>, Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = vec![Mark::New; self.states.len()];
        let mut order = Vec::with_capacity(self.states.len());
        for root in 0..self.states.len() {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Open;
            while let Some(&mut (s, ref mut next)) = stack.last_mut() {
                if self.states[s].status == Status::Running && *next < self.successors[s].len() {
                    let t = self.successors[s][*next];
                    *next += 1;
                    match mark[t] {
                        Mark::New => {
                            mark[t] = Mark::Open;
                            stack.push((t, 0));
                        }
                        Mark::Open => {
                            let from = stack.iter().position(|&(x, _)| x == t).unwrap();
                            return Err(stack[from..].iter().map(|&(x, _)| self.states[x].vertex).collect());
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[s] = Mark::Done;
                    order.push(s);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    /// Explicit cycle check on the running part.
    pub fn check_acyclic(&self) -> Result<(), FiniteTimeError> {
        self.postorder().map(|_| ()).map_err(FiniteTimeError::AcyclicityViolation)
    }

    /// Longest number of moves from any initial state to a stopped state.
    pub fn max_depth(&self) -> usize {
        let order = self.postorder().expect("product is acyclic");
        let mut depth = vec![0usize; self.states.len()];
        for s in order {
            depth[s] = self.successors[s].iter().map(|&t| depth[t] + 1).max().unwrap_or(0);
        }
        self.initial.iter().map(|&i| depth[i]).max().unwrap_or(0)
    }

    /// Backward induction: who wins from every state.
    pub fn solve(&self) -> FiniteSolution {
        let order = self.postorder().expect("product is acyclic");
        let mut winner = vec![Player::Zero; self.states.len()];
        for s in order {
            winner[s] = match self.states[s].status {
                Status::Stopped { winner, .. } => winner,
                Status::Running => {
                    let p = self.owners[self.states[s].vertex];
                    if self.successors[s].iter().any(|&t| winner[t] == p) {
                        p
                    } else {
                        p.opponent()
                    }
                }
            };
        }
        let mut w0 = VertexSet::EMPTY;
        let mut w1 = VertexSet::EMPTY;
        for (v, &i) in self.initial.iter().enumerate() {
            match winner[i] {
                Player::Zero => w0.insert(v),
                Player::One => w1.insert(v),
            }
        }
        FiniteSolution { winner, w0, w1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSolution {
    winner: Vec<Player>,
    pub w0: VertexSet,
    pub w1: VertexSet,
}

impl FiniteSolution {
    pub fn winner(&self, state: usize) -> Player {
        self.winner[state]
    }

    pub fn regions(&self) -> (VertexSet, VertexSet) {
        (self.w0, self.w1)
    }
}

/// Winning regions of the finite-time game.
pub fn solve_finite(
    arena: &Arena,
    condition: &MullerCondition,
    rule: StoppingRule,
    state_cap: usize,
) -> Result<(ProductGame, FiniteSolution), FiniteTimeError> {
    let pg = ProductGame::build(arena, condition, rule, state_cap)?;
    let sol = pg.solve();
    Ok((pg, sol))
}

/// Follows the solved product: at a winning running state, move to the first winning
/// successor state. The memory is the current product state.
#[derive(Debug, Clone)]
pub struct FiniteStrategy {
    product: Arc<ProductGame>,
    solution: Arc<FiniteSolution>,
    player: Player,
}

impl FiniteStrategy {
    pub fn new(product: Arc<ProductGame>, solution: Arc<FiniteSolution>, player: Player) -> Self {
        FiniteStrategy { product, solution, player }
    }

    pub fn region(&self) -> VertexSet {
        match self.player {
            Player::Zero => self.solution.w0,
            Player::One => self.solution.w1,
        }
    }
}

impl Strategy for FiniteStrategy {
    type Memory = Option<usize>;

    fn player(&self) -> Player {
        self.player
    }

    fn start(&self, v: VertexId) -> Option<usize> {
        self.product.initial.get(v).copied()
    }

    fn observe(&self, memory: &Option<usize>, v: VertexId) -> Option<usize> {
        let s = (*memory)?;
        self.product.successors(s).iter().copied().find(|&t| self.product.state(t).vertex == v)
    }

    fn choose(&self, memory: &Option<usize>, v: VertexId) -> Result<VertexId, StrategyError> {
        let off = StrategyError::OffDomain { player: self.player, vertex: v };
        let s = memory.ok_or(off.clone())?;
        if self.solution.winner(s) != self.player || self.product.state(s).status != Status::Running {
            return Err(off);
        }
        self.product
            .successors(s)
            .iter()
            .find(|&&t| self.solution.winner(t) == self.player)
            .map(|&t| self.product.state(t).vertex)
            .ok_or(off)
    }
}
