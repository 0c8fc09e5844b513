//! Score-bounding strategies evaluated straight from the history.
//!
//! Every call recomputes the child selection over all prefixes with the definitional
//! indicator and cuts the longest suffixes explicitly. Slow, and independent of the
//! incremental machinery in [`super::plan`]; the two must produce identical moves.

use std::sync::Arc;

use super::plan::{Mode, Plan};
use super::{smallest_successor_in, Strategy, StrategyError, ZielonkaStrategy};
use crate::arena::Arena;
use crate::condition::MullerCondition;
use crate::scoring::definition;
use crate::vertex_set::{Player, VertexId, VertexSet};
use crate::zielonka::Decomposition;

#[derive(Debug, Clone)]
pub struct ReferenceBounding {
    arena: Arc<Arena>,
    player: Player,
    plan: Plan,
}

impl ReferenceBounding {
    pub fn new(arena: Arc<Arena>, condition: Arc<MullerCondition>, d: &Decomposition, player: Player) -> Self {
        let plan = ZielonkaStrategy::new(Arc::clone(&arena), condition, d, player, Mode::Bounding).plan;
        ReferenceBounding { arena, player, plan }
    }

    /// The selected round after every prefix of `history` at the top level, if it selects.
    pub fn selections(&self, history: &[VertexId]) -> Option<Vec<Option<usize>>> {
        let Plan::Cycle { children, members, .. } = &self.plan else {
            return None;
        };
        let h = suffix_within(history, self.plan.region());
        let picks = selections(&children_labels(children), members, h);
        Some(picks.into_iter().map(|c| c.map(|j| children[j].round)).collect())
    }
}

fn children_labels(children: &[super::plan::Child]) -> Vec<VertexSet> {
    children.iter().map(|c| c.label).collect()
}

/// Longest suffix of `h` inside `set`.
fn suffix_within(h: &[VertexId], set: VertexSet) -> &[VertexId] {
    let start = h.iter().rposition(|&v| !set.contains(v)).map_or(0, |p| p + 1);
    &h[start..]
}

/// Child selection after each prefix of `h`.
fn selections(labels: &[VertexSet], members: &[VertexSet], h: &[VertexId]) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(h.len());
    let mut c: Option<usize> = None;
    for t in 0..h.len() {
        let v = h[t];
        c = match c {
            Some(j) if labels[j].contains(v) => Some(j),
            _ if !labels.iter().any(|l| l.contains(v)) => None,
            _ => {
                let ind = definition::indicator(members, &h[..=t]);
                if ind.is_empty() {
                    labels.iter().position(|l| l.contains(v))
                } else {
                    labels.iter().position(|l| ind.is_subset(*l))
                }
            }
        };
        out.push(c);
    }
    out
}

fn evaluate(arena: &Arena, player: Player, plan: &Plan, h: &[VertexId]) -> Result<VertexId, StrategyError> {
    let v = *h.last().expect("non-empty history");
    let off = StrategyError::OffDomain { player, vertex: v };
    match plan {
        Plan::Free { region } => smallest_successor_in(arena, v, *region).ok_or(off),
        Plan::Descend { pieces, .. } => {
            if let Some(p) = pieces.iter().find(|p| p.inner.contains(v)) {
                return evaluate(arena, player, &p.sub, suffix_within(h, p.inner));
            }
            match pieces.iter().find(|p| p.approach.contains(v)) {
                Some(p) => p.attractor.strategy(v).ok_or(off),
                None => Err(off),
            }
        }
        Plan::Cycle { region, members, children, .. } => {
            let c = *selections(&children_labels(children), members, h).last().unwrap();
            match c {
                Some(j) if children[j].inner.contains(v) => {
                    evaluate(arena, player, &children[j].sub, suffix_within(h, children[j].inner))
                }
                Some(j) => children[j].attractor.strategy(v).ok_or(off),
                None => smallest_successor_in(arena, v, *region).ok_or(off),
            }
        }
    }
}

impl Strategy for ReferenceBounding {
    type Memory = Vec<VertexId>;

    fn player(&self) -> Player {
        self.player
    }

    fn start(&self, v: VertexId) -> Vec<VertexId> {
        vec![v]
    }

    fn observe(&self, memory: &Vec<VertexId>, v: VertexId) -> Vec<VertexId> {
        let mut h = memory.clone();
        h.push(v);
        h
    }

    fn choose(&self, memory: &Vec<VertexId>, v: VertexId) -> Result<VertexId, StrategyError> {
        if !self.plan.region().contains(v) {
            return Err(StrategyError::OffDomain { player: self.player, vertex: v });
        }
        evaluate(&self.arena, self.player, &self.plan, suffix_within(memory, self.plan.region()))
    }

    fn is_finite_state(&self) -> bool {
        false
    }
}
