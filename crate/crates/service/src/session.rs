//! One refereed play between a human and an engine strategy.

use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use muller_core::finite_time::{FiniteTimeError, StoppingRule, ThresholdTable};
use muller_core::gamefile::GameFile;
use muller_core::scoring::{definition, ScoringError};
use muller_core::strategy::{AnyMemory, AnyStrategy, BuildOptions, NamedError, Strategy, StrategyError, StrategyName};
use muller_core::{Arena, MullerCondition, Player, ScoreChain, VertexId, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    AwaitingHuman,
    AwaitingEngine,
    Finished,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::AwaitingHuman => "awaiting-human",
            Status::AwaitingEngine => "awaiting-engine",
            Status::Finished => "finished",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub winner: Player,
    pub set: VertexSet,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("start vertex {0} is not in the arena")]
    InvalidStart(VertexId),
    #[error(transparent)]
    Strategy(#[from] NamedError),
    #[error(transparent)]
    Rule(#[from] FiniteTimeError),
    #[error("it is not the human's turn")]
    NotYourTurn,
    #[error("it is not the engine's turn")]
    NotEngineTurn,
    #[error("no edge from {from} to {to}")]
    IllegalMove { from: VertexId, to: VertexId },
    #[error("the play is finished")]
    Finished,
    #[error(transparent)]
    OffDomain(StrategyError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

impl SessionError {
    /// Stable identifier for clients.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::InvalidStart(_) => "InvalidStart",
            SessionError::Strategy(NamedError::Unknown(_)) => "UnknownStrategy",
            SessionError::Strategy(NamedError::WrongPlayer { .. }) => "WrongPlayer",
            SessionError::Strategy(_) => "StrategyUnavailable",
            SessionError::Rule(_) => "InvalidRule",
            SessionError::NotYourTurn => "NotYourTurn",
            SessionError::NotEngineTurn => "NotEngineTurn",
            SessionError::IllegalMove { .. } => "IllegalMove",
            SessionError::Finished => "Finished",
            SessionError::OffDomain(_) => "StrategyOffDomain",
            SessionError::Scoring(_) => "ScoringError",
        }
    }
}

pub struct SessionConfig {
    pub rule: StoppingRule,
    pub human: Player,
    pub engine: StrategyName,
    pub start: VertexId,
    pub seed: u64,
}

pub struct Session {
    pub arena: Arc<Arena>,
    pub condition: Arc<MullerCondition>,
    pub rule: StoppingRule,
    pub human: Player,
    pub engine_name: StrategyName,
    pub warning: Option<String>,
    table: ThresholdTable,
    engine: AnyStrategy,
    engine_memory: AnyMemory,
    /// The human's own score-bounding strategy, used for hints on the human's turn.
    advisor: Option<AnyStrategy>,
    history: Vec<VertexId>,
    chain: ScoreChain,
    verdict: Option<Verdict>,
    pub touched: Instant,
}

impl Session {
    pub fn new(game: &GameFile, cfg: SessionConfig) -> Result<Self, SessionError> {
        let arena = Arc::new(game.arena.clone());
        let condition = Arc::new(game.condition.clone());
        if cfg.start >= arena.vertex_count() {
            return Err(SessionError::InvalidStart(cfg.start));
        }
        let table = cfg.rule.validate()?.table(condition.universe())?;
        let opts = BuildOptions { rule: cfg.rule, seed: cfg.seed, ..BuildOptions::default() };
        let engine_player = cfg.human.opponent();
        let engine = AnyStrategy::build(cfg.engine, engine_player, &arena, &condition, opts)?;
        let advisor_name = match cfg.human {
            Player::Zero => StrategyName::SigmaStar,
            Player::One => StrategyName::TauStar,
        };
        let advisor = AnyStrategy::build(advisor_name, cfg.human, &arena, &condition, opts).ok();
        let warning = engine.region().filter(|r| !r.contains(cfg.start)).map(|r| {
            format!("start {} is outside the region {r} where {} is guaranteed to move", cfg.start, cfg.engine)
        });
        let mut s = Session {
            engine_memory: engine.start(cfg.start),
            arena,
            condition,
            rule: cfg.rule,
            human: cfg.human,
            engine_name: cfg.engine,
            warning,
            table,
            engine,
            advisor,
            history: vec![cfg.start],
            chain: ScoreChain::new(cfg.start),
            verdict: None,
            touched: Instant::now(),
        };
        s.referee()?;
        Ok(s)
    }

    pub fn history(&self) -> &[VertexId] {
        &self.history
    }

    pub fn chain(&self) -> &ScoreChain {
        &self.chain
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }

    pub fn current(&self) -> VertexId {
        *self.history.last().expect("history starts with the start vertex")
    }

    pub fn side_to_move(&self) -> Player {
        self.arena.owner(self.current())
    }

    pub fn status(&self) -> Status {
        if self.verdict.is_some() {
            Status::Finished
        } else if self.side_to_move() == self.human {
            Status::AwaitingHuman
        } else {
            Status::AwaitingEngine
        }
    }

    pub fn thresholds(&self) -> Vec<(usize, u32)> {
        (1..=self.condition.universe().len()).map(|s| (s, self.table.get(VertexSet::full(s)))).collect()
    }

    pub fn human_move(&mut self, to: VertexId) -> Result<(), SessionError> {
        match self.status() {
            Status::Finished => return Err(SessionError::Finished),
            Status::AwaitingEngine => return Err(SessionError::NotYourTurn),
            Status::AwaitingHuman => {}
        }
        let from = self.current();
        if to >= self.arena.vertex_count() || !self.arena.has_edge(from, to) {
            return Err(SessionError::IllegalMove { from, to });
        }
        self.append(to)
    }

    pub fn engine_step(&mut self) -> Result<VertexId, SessionError> {
        match self.status() {
            Status::Finished => return Err(SessionError::Finished),
            Status::AwaitingHuman => return Err(SessionError::NotEngineTurn),
            Status::AwaitingEngine => {}
        }
        let to = self.engine.choose(&self.engine_memory, self.current()).map_err(SessionError::OffDomain)?;
        let from = self.current();
        if !self.arena.has_edge(from, to) {
            return Err(SessionError::IllegalMove { from, to });
        }
        self.append(to)?;
        Ok(to)
    }

    /// Suggested move for whoever is to move, with the strategy that suggests it.
    pub fn hint(&self) -> Result<(VertexId, StrategyName), SessionError> {
        match self.status() {
            Status::Finished => Err(SessionError::Finished),
            Status::AwaitingEngine => self
                .engine
                .choose(&self.engine_memory, self.current())
                .map(|v| (v, self.engine_name))
                .map_err(SessionError::OffDomain),
            Status::AwaitingHuman => {
                let v = self.current();
                let off = || SessionError::OffDomain(StrategyError::OffDomain { player: self.human, vertex: v });
                let advisor = self.advisor.as_ref().ok_or_else(off)?;
                let name = match self.human {
                    Player::Zero => StrategyName::SigmaStar,
                    Player::One => StrategyName::TauStar,
                };
                advisor.evaluate(&self.history).map(|m| (m, name)).map_err(SessionError::OffDomain)
            }
        }
    }

    fn append(&mut self, v: VertexId) -> Result<(), SessionError> {
        self.history.push(v);
        self.chain.push(v);
        self.engine_memory = self.engine.observe(&self.engine_memory, v);
        if cfg!(debug_assertions) {
            for e in self.chain.entries() {
                debug_assert_eq!(e.score, definition::score(e.set, &self.history));
                debug_assert_eq!(e.accumulator, definition::accumulator(e.set, &self.history));
            }
        }
        self.referee()
    }

    fn referee(&mut self) -> Result<(), SessionError> {
        if let Some(set) = self.table.hit(&self.chain)? {
            self.verdict =
                Some(Verdict { winner: self.condition.owner_of(set), set, step: self.history.len() });
        }
        Ok(())
    }
}
