//! Strategies chosen by name, for front ends that pick them at run time.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FirstSuccessor, PlanMemory, RandomMachine, Strategy, StrategyError, ZielonkaStrategy};
use crate::arena::Arena;
use crate::condition::{ConditionError, MullerCondition};
use crate::finite_time::{solve_finite, FiniteStrategy, FiniteTimeError, StoppingRule};
use crate::vertex_set::{Player, VertexId, VertexSet};
use crate::zielonka::solve_game;

/// Memory states of the `random` strategy.
pub const RANDOM_STATES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    SigmaStar,
    TauStar,
    Naive,
    Finite,
    Random,
    First,
}

impl StrategyName {
    pub const ALL: [StrategyName; 6] = [
        StrategyName::SigmaStar,
        StrategyName::TauStar,
        StrategyName::Naive,
        StrategyName::Finite,
        StrategyName::Random,
        StrategyName::First,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::SigmaStar => "sigma-star",
            StrategyName::TauStar => "tau-star",
            StrategyName::Naive => "naive",
            StrategyName::Finite => "finite",
            StrategyName::Random => "random",
            StrategyName::First => "first",
        }
    }

    /// The player a strategy is tied to, if it is tied to one.
    pub fn fixed_player(self) -> Option<Player> {
        match self {
            StrategyName::SigmaStar => Some(Player::Zero),
            StrategyName::TauStar => Some(Player::One),
            _ => None,
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = NamedError;

    fn from_str(s: &str) -> Result<Self, NamedError> {
        StrategyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| NamedError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NamedError {
    #[error("unknown strategy {0:?} (expected sigma-star, tau-star, naive, finite, random or first)")]
    Unknown(String),
    #[error("{name} plays for Player {owner}, not Player {requested}")]
    WrongPlayer { name: StrategyName, owner: Player, requested: Player },
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    FiniteTime(#[from] FiniteTimeError),
}

/// Parameters that only some strategies need.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Rule of the finite-time game solved by `finite`; [`StoppingRule::None`] means `Uniform(3)`.
    pub rule: StoppingRule,
    pub seed: u64,
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { rule: StoppingRule::Uniform(3), seed: 0, state_cap: crate::finite_time::DEFAULT_STATE_CAP }
    }
}

#[derive(Debug, Clone)]
pub enum AnyStrategy {
    Zielonka(ZielonkaStrategy),
    Finite(FiniteStrategy),
    Random(RandomMachine),
    First(FirstSuccessor),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnyMemory {
    Zielonka(Option<PlanMemory>),
    Finite(Option<usize>),
    Random(usize),
    First,
}

impl AnyStrategy {
    pub fn build(
        name: StrategyName,
        player: Player,
        arena: &Arc<Arena>,
        condition: &Arc<MullerCondition>,
        opts: BuildOptions,
    ) -> Result<Self, NamedError> {
        if let Some(owner) = name.fixed_player() {
            if owner != player {
                return Err(NamedError::WrongPlayer { name, owner, requested: player });
            }
        }
        Ok(match name {
            StrategyName::SigmaStar | StrategyName::TauStar | StrategyName::Naive => {
                let d = solve_game(arena, condition)?;
                let (a, c) = (Arc::clone(arena), Arc::clone(condition));
                AnyStrategy::Zielonka(if name == StrategyName::Naive {
                    ZielonkaStrategy::naive(a, c, &d, player)
                } else {
                    ZielonkaStrategy::bounding(a, c, &d, player)
                })
            }
            StrategyName::Finite => {
                let rule = match opts.rule {
                    StoppingRule::None => StoppingRule::Uniform(3),
                    r => r,
                };
                let (pg, sol) = solve_finite(arena, condition, rule, opts.state_cap)?;
                AnyStrategy::Finite(FiniteStrategy::new(Arc::new(pg), Arc::new(sol), player))
            }
            StrategyName::Random => AnyStrategy::Random(RandomMachine::new(arena, player, RANDOM_STATES, opts.seed)),
            StrategyName::First => AnyStrategy::First(FirstSuccessor { arena: Arc::clone(arena), player }),
        })
    }

    /// Vertices where the strategy is guaranteed to have a move; `None` when it has one
    /// everywhere.
    pub fn region(&self) -> Option<VertexSet> {
        match self {
            AnyStrategy::Zielonka(s) => Some(s.region()),
            AnyStrategy::Finite(s) => Some(s.region()),
            AnyStrategy::Random(_) | AnyStrategy::First(_) => None,
        }
    }
}

impl Strategy for AnyStrategy {
    type Memory = AnyMemory;

    fn player(&self) -> Player {
        match self {
            AnyStrategy::Zielonka(s) => s.player(),
            AnyStrategy::Finite(s) => s.player(),
            AnyStrategy::Random(s) => s.player(),
            AnyStrategy::First(s) => s.player(),
        }
    }

    fn start(&self, v: VertexId) -> AnyMemory {
        match self {
            AnyStrategy::Zielonka(s) => AnyMemory::Zielonka(s.start(v)),
            AnyStrategy::Finite(s) => AnyMemory::Finite(s.start(v)),
            AnyStrategy::Random(s) => AnyMemory::Random(s.start(v)),
            AnyStrategy::First(_) => AnyMemory::First,
        }
    }

    fn observe(&self, memory: &AnyMemory, v: VertexId) -> AnyMemory {
        match (self, memory) {
            (AnyStrategy::Zielonka(s), AnyMemory::Zielonka(m)) => AnyMemory::Zielonka(s.observe(m, v)),
            (AnyStrategy::Finite(s), AnyMemory::Finite(m)) => AnyMemory::Finite(s.observe(m, v)),
            (AnyStrategy::Random(s), AnyMemory::Random(m)) => AnyMemory::Random(s.observe(m, v)),
            (AnyStrategy::First(_), AnyMemory::First) => AnyMemory::First,
            _ => unreachable!("memory of another strategy"),
        }
    }

    fn choose(&self, memory: &AnyMemory, v: VertexId) -> Result<VertexId, StrategyError> {
        match (self, memory) {
            (AnyStrategy::Zielonka(s), AnyMemory::Zielonka(m)) => s.choose(m, v),
            (AnyStrategy::Finite(s), AnyMemory::Finite(m)) => s.choose(m, v),
            (AnyStrategy::Random(s), AnyMemory::Random(m)) => s.choose(m, v),
            (AnyStrategy::First(s), AnyMemory::First) => s.choose(&(), v),
            _ => unreachable!("memory of another strategy"),
        }
    }

    fn is_finite_state(&self) -> bool {
        match self {
            AnyStrategy::Zielonka(s) => s.is_finite_state(),
            AnyStrategy::Finite(s) => s.is_finite_state(),
            AnyStrategy::Random(s) => s.is_finite_state(),
            AnyStrategy::First(s) => s.is_finite_state(),
        }
    }
}
