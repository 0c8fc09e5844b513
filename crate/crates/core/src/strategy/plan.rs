//! Strategies read off a [`Decomposition`].
//!
//! At every level of the recursion the player either owns the node's label or not. The
//! non-owner attracts towards `U_{m-1}` and plays recursively inside the pieces
//! `W^m`, handing each sub-strategy the longest suffix of the history inside its piece.
//! The owner works through the children of the node. In [`Mode::Bounding`] the next child
//! is chosen by the indicator of the opponent's scores; in [`Mode::Naive`] a cyclic
//! counter picks it and sub-strategies forget everything before the last switch.

use std::sync::Arc;

use thiserror::Error;

use super::{smallest_successor_in, Strategy, StrategyError};
use crate::arena::{Arena, AttractorResult};
use crate::condition::MullerCondition;
use crate::scoring::{indicator_of_chain, PlayerFamily, ScoreChain};
use crate::vertex_set::{Player, VertexId, VertexSet};
use crate::zielonka::Decomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Keeps the opponent's scores at most 2.
    Bounding,
    /// The classic cyclic-counter construction.
    Naive,
}

#[derive(Debug, Clone)]
pub(crate) struct Piece {
    /// `A_m ∖ U_{m-1}`.
    pub approach: VertexSet,
    pub attractor: AttractorResult,
    /// `W^m` of the player.
    pub inner: VertexSet,
    pub sub: Plan,
}

#[derive(Debug, Clone)]
pub(crate) struct Child {
    /// Round number `j`, one of the final `k`.
    pub round: usize,
    pub label: VertexSet,
    /// Attractor of `Z_j` inside `X_j`.
    pub attractor: AttractorResult,
    /// `W^j` of the player.
    pub inner: VertexSet,
    pub sub: Plan,
}

#[derive(Debug, Clone)]
pub(crate) enum Plan {
    /// Any move that stays in the region.
    Free { region: VertexSet },
    /// The player does not own the label.
    Descend { region: VertexSet, pieces: Vec<Piece> },
    /// The player owns the label; `family` is the opponent's family below it.
    Cycle { region: VertexSet, family: Arc<FamilyRef>, members: Vec<VertexSet>, children: Vec<Child> },
}

/// `F_opponent ↾ label`, kept as owned data so plans can be shared across threads.
#[derive(Debug, Clone)]
pub(crate) struct FamilyRef {
    pub condition: Arc<MullerCondition>,
    pub opponent: Player,
    pub label: VertexSet,
}

impl FamilyRef {
    pub fn family(&self) -> PlayerFamily<'_> {
        PlayerFamily::new(&self.condition, self.opponent, self.label)
    }
}

impl Plan {
    pub fn build(d: &Decomposition, player: Player, condition: &Arc<MullerCondition>) -> Plan {
        let region = d.region(player);
        if region.is_empty() || d.is_leaf() {
            return Plan::Free { region };
        }
        if player != d.owner {
            let mut previous = VertexSet::EMPTY;
            let mut pieces = Vec::new();
            for r in &d.rounds {
                let approach = r.a().difference(previous);
                let inner = r.sub.region(player);
                previous = r.u;
                if approach.is_empty() && inner.is_empty() {
                    continue;
                }
                pieces.push(Piece {
                    approach,
                    attractor: r.opponent_attractor.clone(),
                    inner,
                    sub: Plan::build(&r.sub, player, condition),
                });
            }
            return Plan::Descend { region, pieces };
        }
        let family = Arc::new(FamilyRef {
            condition: Arc::clone(condition),
            opponent: player.opponent(),
            label: d.label(),
        });
        let members = family.family().members();
        let children = d
            .final_rounds()
            .iter()
            .map(|r| Child {
                round: r.n,
                label: r.label,
                attractor: r.own_attractor.clone(),
                inner: r.sub.region(player),
                sub: Plan::build(&r.sub, player, condition),
            })
            .collect();
        Plan::Cycle { region, family, members, children }
    }

    pub fn region(&self) -> VertexSet {
        match self {
            Plan::Free { region } | Plan::Descend { region, .. } | Plan::Cycle { region, .. } => *region,
        }
    }
}

/// Memory of a plan; the history it summarises lies inside the plan's region.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlanMemory {
    Free,
    /// Index of the piece whose `W^m` holds the current vertex, with the sub-memory of the
    /// longest suffix inside it.
    Descend(Option<(usize, Box<PlanMemory>)>),
    /// Score chain with scores capped at 1 (enough for the indicator), the current child,
    /// and for every child the memory of the longest suffix inside its `W^j`.
    Select { chain: ScoreChain, current: Option<usize>, inner: Vec<Option<PlanMemory>> },
    /// Cyclic counter and the memory since the last restart.
    Counter { counter: usize, inner: Option<Box<PlanMemory>> },
}

impl PlanMemory {
    /// The current child index at a selecting level.
    pub fn selected(&self) -> Option<usize> {
        match self {
            PlanMemory::Select { current, .. } => *current,
            _ => None,
        }
    }
}

impl Plan {
    fn start(&self, mode: Mode, v: VertexId) -> PlanMemory {
        match self {
            Plan::Free { .. } => PlanMemory::Free,
            Plan::Descend { pieces, .. } => PlanMemory::Descend(
                pieces
                    .iter()
                    .position(|p| p.inner.contains(v))
                    .map(|i| (i, Box::new(pieces[i].sub.start(mode, v)))),
            ),
            Plan::Cycle { children, family, .. } => match mode {
                Mode::Bounding => {
                    let chain = ScoreChain::new(v);
                    let current = select(children, family, None, v, &chain);
                    let inner = children
                        .iter()
                        .map(|c| c.inner.contains(v).then(|| c.sub.start(mode, v)))
                        .collect();
                    PlanMemory::Select { chain, current, inner }
                }
                Mode::Naive => {
                    let counter = bump(children, 0, v);
                    let c = &children[counter_child(children, counter)];
                    let inner = c.inner.contains(v).then(|| Box::new(c.sub.start(mode, v)));
                    PlanMemory::Counter { counter, inner }
                }
            },
        }
    }

    fn observe(&self, mode: Mode, memory: &PlanMemory, v: VertexId) -> PlanMemory {
        match (self, memory) {
            (Plan::Free { .. }, _) => PlanMemory::Free,
            (Plan::Descend { pieces, .. }, PlanMemory::Descend(cell)) => {
                let Some(i) = pieces.iter().position(|p| p.inner.contains(v)) else {
                    return PlanMemory::Descend(None);
                };
                let sub = match cell {
                    Some((j, m)) if *j == i => pieces[i].sub.observe(mode, m, v),
                    _ => pieces[i].sub.start(mode, v),
                };
                PlanMemory::Descend(Some((i, Box::new(sub))))
            }
            (Plan::Cycle { children, family, .. }, PlanMemory::Select { chain, current, inner }) => {
                let mut chain = chain.clone();
                chain.push_saturating(v, 1);
                let current = select(children, family, *current, v, &chain);
                let inner = children
                    .iter()
                    .zip(inner)
                    .map(|(c, m)| {
                        c.inner.contains(v).then(|| match m {
                            Some(m) => c.sub.observe(mode, m, v),
                            None => c.sub.start(mode, v),
                        })
                    })
                    .collect();
                PlanMemory::Select { chain, current, inner }
            }
            (Plan::Cycle { children, .. }, PlanMemory::Counter { counter, inner }) => {
                let next = bump(children, *counter, v);
                let c = &children[counter_child(children, next)];
                let inner = c.inner.contains(v).then(|| {
                    Box::new(match inner {
                        Some(m) if next == *counter => c.sub.observe(mode, m, v),
                        _ => c.sub.start(mode, v),
                    })
                });
                PlanMemory::Counter { counter: next, inner }
            }
            _ => panic!("memory does not belong to this plan"),
        }
    }

    fn choose(
        &self,
        arena: &Arena,
        player: Player,
        memory: &PlanMemory,
        v: VertexId,
    ) -> Result<VertexId, StrategyError> {
        let off = StrategyError::OffDomain { player, vertex: v };
        match (self, memory) {
            (Plan::Free { region }, _) => smallest_successor_in(arena, v, *region).ok_or(off),
            (Plan::Descend { pieces, .. }, PlanMemory::Descend(cell)) => {
                if let Some((i, m)) = cell {
                    return pieces[*i].sub.choose(arena, player, m, v);
                }
                match pieces.iter().find(|p| p.approach.contains(v)) {
                    Some(p) => p.attractor.strategy(v).ok_or(off),
                    None => Err(off),
                }
            }
            (Plan::Cycle { children, region, .. }, PlanMemory::Select { current, inner, .. }) => {
                match current {
                    Some(j) => match &inner[*j] {
                        Some(m) => children[*j].sub.choose(arena, player, m, v),
                        None => children[*j].attractor.strategy(v).ok_or(off),
                    },
                    None => smallest_successor_in(arena, v, *region).ok_or(off),
                }
            }
            (Plan::Cycle { children, region, .. }, PlanMemory::Counter { counter, inner }) => {
                let c = &children[counter_child(children, *counter)];
                match inner {
                    Some(m) => c.sub.choose(arena, player, m, v),
                    None => c
                        .attractor
                        .strategy(v)
                        .or_else(|| smallest_successor_in(arena, v, *region))
                        .ok_or(off),
                }
            }
            _ => panic!("memory does not belong to this plan"),
        }
    }
}

/// The child-selection function: keep the current child while inside its label, otherwise
/// take the first child whose label covers the indicator, or the current vertex when the
/// indicator is empty.
fn select(
    children: &[Child],
    family: &FamilyRef,
    current: Option<usize>,
    v: VertexId,
    chain: &ScoreChain,
) -> Option<usize> {
    if let Some(j) = current {
        if children[j].label.contains(v) {
            return Some(j);
        }
    }
    if !children.iter().any(|c| c.label.contains(v)) {
        return None;
    }
    let ind = indicator_of_chain(chain, &family.family());
    if ind.is_empty() {
        children.iter().position(|c| c.label.contains(v))
    } else {
        let j = children.iter().position(|c| ind.is_subset(c.label));
        debug_assert!(j.is_some(), "indicator {ind} fits under no child");
        j.or_else(|| children.iter().position(|c| c.label.contains(v)))
    }
}

/// Counter value `c` plays round `n - c`, the `c`-th child counted from the last round.
fn counter_child(children: &[Child], counter: usize) -> usize {
    children.len() - 1 - counter
}

fn bump(children: &[Child], counter: usize, v: VertexId) -> usize {
    if children[counter_child(children, counter)].label.contains(v) {
        counter
    } else {
        (counter + 1) % children.len()
    }
}

/// A strategy built from a [`Decomposition`], defined on the player's winning region.
///
/// The history handed to the construction is the longest suffix of the play inside the
/// region; outside the region the strategy has no move.
#[derive(Debug, Clone)]
pub struct ZielonkaStrategy {
    arena: Arc<Arena>,
    player: Player,
    mode: Mode,
    pub(crate) plan: Plan,
}

impl ZielonkaStrategy {
    pub fn new(
        arena: Arc<Arena>,
        condition: Arc<MullerCondition>,
        d: &Decomposition,
        player: Player,
        mode: Mode,
    ) -> Self {
        ZielonkaStrategy { plan: Plan::build(d, player, &condition), arena, player, mode }
    }

    /// Score-bounding strategy of `player`.
    pub fn bounding(arena: Arc<Arena>, condition: Arc<MullerCondition>, d: &Decomposition, player: Player) -> Self {
        ZielonkaStrategy::new(arena, condition, d, player, Mode::Bounding)
    }

    /// Player 0's score-bounding strategy.
    pub fn sigma_star(arena: Arc<Arena>, condition: Arc<MullerCondition>, d: &Decomposition) -> Self {
        ZielonkaStrategy::bounding(arena, condition, d, Player::Zero)
    }

    /// Player 1's score-bounding strategy.
    pub fn tau_star(arena: Arc<Arena>, condition: Arc<MullerCondition>, d: &Decomposition) -> Self {
        ZielonkaStrategy::bounding(arena, condition, d, Player::One)
    }

    pub fn naive(arena: Arc<Arena>, condition: Arc<MullerCondition>, d: &Decomposition, player: Player) -> Self {
        ZielonkaStrategy::new(arena, condition, d, player, Mode::Naive)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn region(&self) -> VertexSet {
        self.plan.region()
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }
}

impl Strategy for ZielonkaStrategy {
    type Memory = Option<PlanMemory>;

    fn player(&self) -> Player {
        self.player
    }

    fn start(&self, v: VertexId) -> Option<PlanMemory> {
        self.region().contains(v).then(|| self.plan.start(self.mode, v))
    }

    fn observe(&self, memory: &Option<PlanMemory>, v: VertexId) -> Option<PlanMemory> {
        if !self.region().contains(v) {
            return None;
        }
        Some(match memory {
            Some(m) => self.plan.observe(self.mode, m, v),
            None => self.plan.start(self.mode, v),
        })
    }

    fn choose(&self, memory: &Option<PlanMemory>, v: VertexId) -> Result<VertexId, StrategyError> {
        match memory {
            Some(m) => self.plan.choose(&self.arena, self.player, m, v),
            None => Err(StrategyError::OffDomain { player: self.player, vertex: v }),
        }
    }
}

/// Positions where the child selection of a score-bounding strategy changes, counted from
/// the last vertex of the handed-over prefix, with the selected round after each of them
/// (`None` when no child applies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangePointTrace {
    pub positions: Vec<usize>,
    pub values: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("the strategy does not select children at its top level")]
    NoSelection,
    #[error("prefix length {prefix_len} does not fit a play of length {play_len}")]
    BadPrefix { prefix_len: usize, play_len: usize },
    #[error("vertex at position {0} lies outside the strategy's region")]
    OutsideRegion(usize),
    #[error("move at position {position} is {found}, the strategy plays {expected}")]
    InconsistentPlay { position: usize, expected: VertexId, found: VertexId },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Change points of `play = w v ρ_1 ρ_2 ⋯` where `w v = play[..prefix_len]` is the
/// handed-over prefix; moves from `v` onwards must agree with the strategy.
pub fn trace_change_points(
    strategy: &ZielonkaStrategy,
    play: &[VertexId],
    prefix_len: usize,
) -> Result<ChangePointTrace, TraceError> {
    let Plan::Cycle { children, .. } = &strategy.plan else {
        return Err(TraceError::NoSelection);
    };
    if strategy.mode != Mode::Bounding {
        return Err(TraceError::NoSelection);
    }
    if prefix_len == 0 || prefix_len > play.len() {
        return Err(TraceError::BadPrefix { prefix_len, play_len: play.len() });
    }
    if let Some(p) = play.iter().position(|&v| !strategy.region().contains(v)) {
        return Err(TraceError::OutsideRegion(p));
    }
    let arena = strategy.arena();
    let mut memory = strategy.start(play[0]);
    let mut trace = ChangePointTrace { positions: Vec::new(), values: Vec::new() };
    let mut last = None;
    for t in 0..play.len() {
        if t > 0 {
            memory = strategy.observe(&memory, play[t]);
        }
        if t + 1 < prefix_len {
            continue;
        }
        let r = t + 1 - prefix_len;
        let c = memory.as_ref().and_then(PlanMemory::selected);
        if r == 0 || c != last {
            trace.positions.push(r);
            trace.values.push(c.map(|j| children[j].round));
        }
        last = c;
        if t + 1 < play.len() && arena.owner(play[t]) == strategy.player {
            let expected = strategy.choose(&memory, play[t])?;
            if expected != play[t + 1] {
                return Err(TraceError::InconsistentPlay { position: r + 1, expected, found: play[t + 1] });
            }
        }
    }
    Ok(trace)
}
