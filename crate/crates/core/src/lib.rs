//! Muller games: arenas, winning conditions, Zielonka-tree solving, score tracking and
//! strategies that keep scores bounded, plus a referee for finite-time play.

pub mod arena;
pub mod condition;
pub mod engine;
pub mod finite_time;
pub mod corpus;
pub mod gamefile;
pub mod par;
pub mod scoring;
pub mod strategy;
pub mod vertex_set;
pub mod zielonka;

pub use arena::{Arena, ArenaError, AttractorResult, Subarena};
pub use condition::{ConditionError, MullerCondition, NodeId, ZielonkaTree};
pub use gamefile::{GameFile, ParseError};
pub use scoring::{ChainEntry, ScoreChain, ScoringError};
pub use vertex_set::{Player, VertexId, VertexSet, MAX_VERTICES};
