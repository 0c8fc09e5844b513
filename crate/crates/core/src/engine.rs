//! Refereed plays between two strategies, and adversary search against the score-bounding
//! strategies.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arena::Arena;
use crate::condition::MullerCondition;
use crate::finite_time::{FiniteTimeError, StoppingRule, ThresholdTable};
use crate::par::{self, ExecMode};
use crate::scoring::{chain_family_max, PlayerFamily, ScoreChain, ScoringError};
use crate::strategy::{Strategy, StrategyError, ZielonkaStrategy};
use crate::vertex_set::{occurrences, Player, VertexId, VertexSet};
use crate::zielonka::Decomposition;

/// Largest arena for exhaustive adversary search.
pub const EXHAUSTIVE_MAX_VERTICES: usize = 4;

/// Default cap on search-tree nodes in exhaustive mode.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("play must start with at least one vertex")]
    EmptyPrefix,
    #[error("vertex {0} is not in the arena")]
    InvalidStart(VertexId),
    #[error("prefix is not a path: no edge {0} -> {1}")]
    NotAPath(VertexId, VertexId),
    #[error("step {step}: {source}")]
    Strategy { step: usize, prefix: Vec<VertexId>, source: StrategyError },
    #[error("strategy of player {player} moved along the non-edge {from} -> {to}")]
    IllegalMove { player: Player, from: VertexId, to: VertexId },
    #[error("strategy belongs to player {0}, expected player {1}")]
    WrongPlayer(Player, Player),
    #[error("player {0} has an empty region")]
    EmptyRegion(Player),
    #[error("exhaustive search supports at most {EXHAUSTIVE_MAX_VERTICES} vertices, arena has {0}")]
    ArenaTooLarge(usize),
    #[error("search exceeded its budget of {0} nodes")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Rule(#[from] FiniteTimeError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The referee stopped the play after `step` vertices because `set` hit its threshold.
    Stopped { winner: Player, set: VertexSet, step: usize },
    /// The joint state repeated: the play is `steps[..cycle_start]` followed by
    /// `steps[cycle_start..steps.len()-1]` forever.
    Lasso { infinity_set: VertexSet, winner: Player, cycle_start: usize },
    BudgetExhausted,
}

/// A finite play with the score chain after every prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayRecord {
    pub steps: Vec<VertexId>,
    pub chains: Vec<ScoreChain>,
    pub verdict: Verdict,
}

impl PlayRecord {
    /// Highest score reached by a member of `family` over all prefixes.
    pub fn max_score(&self, family: &PlayerFamily<'_>) -> u32 {
        self.chains.iter().map(|c| chain_family_max(c, family)).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefereeConfig {
    pub rule: StoppingRule,
    /// Longest play, in vertices.
    pub budget: usize,
    /// Stop on a repeated `(vertex, memory, memory)` when both strategies are finite-state.
    pub detect_lasso: bool,
}

impl RefereeConfig {
    pub fn new(rule: StoppingRule, budget: usize) -> Self {
        RefereeConfig { rule, budget, detect_lasso: true }
    }
}

/// Plays `s0` against `s1` from `prefix` (a non-empty path) until the referee stops the
/// play, a lasso closes, or the budget runs out.
pub fn referee_play<S0: Strategy, S1: Strategy>(
    arena: &Arena,
    condition: &MullerCondition,
    config: RefereeConfig,
    prefix: &[VertexId],
    s0: &S0,
    s1: &S1,
) -> Result<PlayRecord, EngineError> {
    if s0.player() != Player::Zero {
        return Err(EngineError::WrongPlayer(s0.player(), Player::Zero));
    }
    if s1.player() != Player::One {
        return Err(EngineError::WrongPlayer(s1.player(), Player::One));
    }
    let (&first, _) = prefix.split_first().ok_or(EngineError::EmptyPrefix)?;
    if let Some(&v) = prefix.iter().find(|&&v| v >= arena.vertex_count()) {
        return Err(EngineError::InvalidStart(v));
    }
    if let Some(w) = prefix.windows(2).find(|w| !arena.has_edge(w[0], w[1])) {
        return Err(EngineError::NotAPath(w[0], w[1]));
    }
    let table = config.rule.validate()?.table(arena.vertices())?;
    let lasso = config.detect_lasso && s0.is_finite_state() && s1.is_finite_state();

    let mut record = PlayRecord { steps: vec![first], chains: vec![ScoreChain::new(first)], verdict: Verdict::BudgetExhausted };
    let mut m0 = s0.start(first);
    let mut m1 = s1.start(first);
    let mut seen: HashMap<(VertexId, S0::Memory, S1::Memory), usize> = HashMap::new();
    let mut step = 1;
    loop {
        let chain = record.chains.last().unwrap();
        let v = chain.last_vertex();
        if let Some(set) = table.hit(chain)? {
            record.verdict = Verdict::Stopped { winner: condition.owner_of(set), set, step };
            return Ok(record);
        }
        if step >= prefix.len() && lasso {
            if let Some(&start) = seen.get(&(v, m0.clone(), m1.clone())) {
                let infinity_set = occurrences(&record.steps[start..step - 1]);
                let winner = condition.owner_of(infinity_set);
                record.verdict = Verdict::Lasso { infinity_set, winner, cycle_start: start };
                return Ok(record);
            }
            seen.insert((v, m0.clone(), m1.clone()), step - 1);
        }
        if step >= config.budget {
            return Ok(record);
        }
        let next = if step < prefix.len() {
            prefix[step]
        } else {
            let owner = arena.owner(v);
            let mv = match owner {
                Player::Zero => s0.choose(&m0, v),
                Player::One => s1.choose(&m1, v),
            };
            let w = mv.map_err(|source| EngineError::Strategy { step, prefix: record.steps.clone(), source })?;
            if !arena.has_edge(v, w) {
                return Err(EngineError::IllegalMove { player: owner, from: v, to: w });
            }
            w
        };
        m0 = s0.observe(&m0, next);
        m1 = s1.observe(&m1, next);
        let chain = chain.updated(next);
        record.steps.push(next);
        record.chains.push(chain);
        step += 1;
    }
}

/// How [`verify_bound`] explores the opponent's behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Every opponent choice sequence, until the referee stops the play at threshold 3 or
    /// the play has `depth` vertices.
    Exhaustive { depth: usize, node_budget: u64 },
    /// Uniformly random opponent moves for `trials` plays of `depth` vertices, never stopped.
    Random { trials: u64, depth: usize, seed: u64 },
}

impl SearchMode {
    pub fn exhaustive(depth: usize) -> Self {
        SearchMode::Exhaustive { depth, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub player: Player,
    /// Highest score of any opponent set over every explored play.
    pub max_opponent_score: u32,
    /// Lexicographically least prefix reaching the maximum (absent when it is 0).
    pub witness: Option<Vec<VertexId>>,
    /// Plays explored to their end.
    pub plays: u64,
    /// Search-tree nodes visited.
    pub nodes: u64,
}

impl BoundReport {
    fn empty(player: Player) -> Self {
        BoundReport { player, max_opponent_score: 0, witness: None, plays: 0, nodes: 0 }
    }

    fn offer(&mut self, score: u32, prefix: &[VertexId]) {
        if score == 0 {
            return;
        }
        let better = match &self.witness {
            _ if score > self.max_opponent_score => true,
            Some(w) if score == self.max_opponent_score => prefix < w.as_slice(),
            _ => false,
        };
        if better {
            self.max_opponent_score = score;
            self.witness = Some(prefix.to_vec());
        }
    }

    fn merge(mut self, other: BoundReport) -> BoundReport {
        self.plays += other.plays;
        self.nodes += other.nodes;
        if let Some(w) = &other.witness {
            self.offer(other.max_opponent_score, w);
        }
        self
    }
}

struct Search<'a> {
    arena: &'a Arena,
    strategy: &'a ZielonkaStrategy,
    family: PlayerFamily<'a>,
    stop: Option<ThresholdTable>,
    depth: usize,
}

#[derive(Clone)]
struct Node {
    path: Vec<VertexId>,
    chain: ScoreChain,
    memory: <ZielonkaStrategy as Strategy>::Memory,
}

impl Search<'_> {
    fn root(&self, v: VertexId) -> Node {
        Node { path: vec![v], chain: ScoreChain::new(v), memory: self.strategy.start(v) }
    }

    fn child(&self, node: &Node, w: VertexId) -> Node {
        let mut path = node.path.clone();
        path.push(w);
        Node { path, chain: node.chain.updated(w), memory: self.strategy.observe(&node.memory, w) }
    }

    /// Scores the node; returns the moves to explore from it (empty at a leaf).
    fn visit(&self, node: &Node, report: &mut BoundReport) -> Result<Vec<VertexId>, EngineError> {
        report.nodes += 1;
        report.offer(chain_family_max(&node.chain, &self.family), &node.path);
        let stopped = match &self.stop {
            Some(t) => t.hit(&node.chain)?.is_some(),
            None => false,
        };
        if stopped || node.path.len() >= self.depth {
            report.plays += 1;
            return Ok(Vec::new());
        }
        let v = *node.path.last().unwrap();
        if self.arena.owner(v) == self.strategy.player() {
            let w = self.strategy.choose(&node.memory, v).map_err(|source| EngineError::Strategy {
                step: node.path.len(),
                prefix: node.path.clone(),
                source,
            })?;
            if !self.arena.has_edge(v, w) {
                return Err(EngineError::IllegalMove { player: self.strategy.player(), from: v, to: w });
            }
            Ok(vec![w])
        } else {
            Ok(self.arena.successor_set(v).to_vec())
        }
    }

    fn dfs(&self, root: Node, budget: u64) -> Result<BoundReport, EngineError> {
        let mut report = BoundReport::empty(self.strategy.player());
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if report.nodes >= budget {
                return Err(EngineError::BudgetExceeded(budget));
            }
            let moves = self.visit(&node, &mut report)?;
            for &w in moves.iter().rev() {
                stack.push(self.child(&node, w));
            }
        }
        Ok(report)
    }
}

/// Searches for opponent behaviour that drives one of the opponent's sets to a high score
/// against `player`'s score-bounding strategy, starting from every vertex of `starts`
/// inside the player's region (the whole region when `starts` is `None`).
pub fn verify_bound(
    arena: &Arc<Arena>,
    condition: &Arc<MullerCondition>,
    d: &Decomposition,
    player: Player,
    starts: Option<VertexSet>,
    mode: SearchMode,
    exec: ExecMode,
) -> Result<BoundReport, EngineError> {
    let strategy = ZielonkaStrategy::bounding(Arc::clone(arena), Arc::clone(condition), d, player);
    let region = strategy.region();
    let starts: Vec<VertexId> = starts.map_or(region, |s| s.intersection(region)).to_vec();
    if starts.is_empty() {
        return Err(EngineError::EmptyRegion(player));
    }
    let family = PlayerFamily::new(condition, player.opponent(), condition.universe());
    match mode {
        SearchMode::Exhaustive { depth, node_budget } => {
            if arena.vertex_count() > EXHAUSTIVE_MAX_VERTICES {
                return Err(EngineError::ArenaTooLarge(arena.vertex_count()));
            }
            let search = Search {
                arena,
                strategy: &strategy,
                family,
                stop: Some(StoppingRule::Uniform(3).table(arena.vertices())?),
                depth,
            };
            // expand breadth-first until there is enough work to spread
            let mut head = BoundReport::empty(player);
            let mut frontier: Vec<Node> = starts.iter().map(|&v| search.root(v)).collect();
            for _ in 0..8 {
                if frontier.len() >= 64 {
                    break;
                }
                let mut next = Vec::new();
                for node in &frontier {
                    for w in search.visit(node, &mut head)? {
                        next.push(search.child(node, w));
                    }
                }
                frontier = next;
            }
            let budget = node_budget.saturating_sub(head.nodes);
            let parts = par::map(exec, frontier, |node| search.dfs(node, budget));
            let mut report = head;
            for part in parts {
                report = report.merge(part?);
            }
            if report.nodes > node_budget {
                return Err(EngineError::BudgetExceeded(node_budget));
            }
            Ok(report)
        }
        SearchMode::Random { trials, depth, seed } => {
            let search = Search { arena, strategy: &strategy, family, stop: None, depth };
            let parts = par::map_range(exec, trials as usize, |trial| -> Result<BoundReport, EngineError> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial as u64);
                let mut report = BoundReport::empty(player);
                let mut node = search.root(starts[rng.random_range(0..starts.len())]);
                loop {
                    let moves = search.visit(&node, &mut report)?;
                    if moves.is_empty() {
                        return Ok(report);
                    }
                    let w = moves[rng.random_range(0..moves.len())];
                    node = search.child(&node, w);
                }
            });
            let mut report = BoundReport::empty(player);
            for part in parts {
                report = report.merge(part?);
            }
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::strategy::{FirstSuccessor, RandomMachine, Scripted};
    use crate::zielonka::solve_game;

    const PLAY: [VertexId; 9] = [1, 0, 0, 1, 2, 2, 1, 2, 1];

    #[test]
    fn fig1_scripted_play_stops_at_nine() {
        let g = corpus::fig1();
        let s0 = Scripted { player: Player::Zero, word: PLAY.to_vec() };
        let s1 = Scripted { player: Player::One, word: PLAY.to_vec() };
        let rec = referee_play(&g.arena, &g.condition, RefereeConfig::new(StoppingRule::Uniform(3), 100), &[1], &s0, &s1)
            .unwrap();
        assert_eq!(rec.steps, PLAY);
        assert_eq!(rec.verdict, Verdict::Stopped { winner: Player::One, set: VertexSet::from([1, 2]), step: 9 });
        // the same play handed over as a prefix
        let rec2 =
            referee_play(&g.arena, &g.condition, RefereeConfig::new(StoppingRule::Uniform(3), 100), &PLAY, &s0, &s1)
                .unwrap();
        assert_eq!(rec2, rec);
    }

    #[test]
    fn self_loop_stops_at_two() {
        let arena = Arena::new(vec![Player::Zero], vec![vec![0]]).unwrap();
        let cond = MullerCondition::new(arena.vertices(), [VertexSet::from([0])]).unwrap();
        let a = Arc::new(arena.clone());
        let rec = referee_play(
            &arena,
            &cond,
            RefereeConfig::new(StoppingRule::Uniform(2), 10),
            &[0],
            &FirstSuccessor { arena: Arc::clone(&a), player: Player::Zero },
            &FirstSuccessor { arena: a, player: Player::One },
        )
        .unwrap();
        assert_eq!(rec.verdict, Verdict::Stopped { winner: Player::Zero, set: VertexSet::from([0]), step: 2 });
    }

    #[test]
    fn sigma_star_against_stay_at_zero_is_a_lasso() {
        let g = corpus::fig1();
        let arena = Arc::new(g.arena.clone());
        let cond = Arc::new(g.condition.clone());
        let d = solve_game(&arena, &cond).unwrap();
        let s0 = ZielonkaStrategy::sigma_star(Arc::clone(&arena), Arc::clone(&cond), &d);
        let stay = RandomMachine::from_moves(Player::One, vec![0, 0, 1]);
        let rec = referee_play(&arena, &cond, RefereeConfig::new(StoppingRule::None, 100), &[1], &s0, &stay).unwrap();
        match rec.verdict {
            Verdict::Lasso { infinity_set, winner, .. } => {
                assert_eq!(infinity_set, VertexSet::from([0]));
                assert_eq!(winner, Player::Zero);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_budget_is_reported() {
        let g = corpus::g_n(5);
        let a = Arc::new(g.arena.clone());
        let s0 = FirstSuccessor { arena: Arc::clone(&a), player: Player::Zero };
        let s1 = FirstSuccessor { arena: a, player: Player::One };
        let cfg = RefereeConfig { rule: StoppingRule::None, budget: 3, detect_lasso: true };
        let rec = referee_play(&g.arena, &g.condition, cfg, &[0], &s0, &s1).unwrap();
        assert_eq!(rec.verdict, Verdict::BudgetExhausted);
        assert_eq!(rec.steps.len(), 3);
    }

    #[test]
    fn rejects_bad_prefixes() {
        let g = corpus::fig1();
        let a = Arc::new(g.arena.clone());
        let s0 = FirstSuccessor { arena: Arc::clone(&a), player: Player::Zero };
        let s1 = FirstSuccessor { arena: a, player: Player::One };
        let cfg = RefereeConfig::new(StoppingRule::Uniform(3), 10);
        assert_eq!(referee_play(&g.arena, &g.condition, cfg, &[], &s0, &s1), Err(EngineError::EmptyPrefix));
        assert_eq!(referee_play(&g.arena, &g.condition, cfg, &[7], &s0, &s1), Err(EngineError::InvalidStart(7)));
        assert_eq!(referee_play(&g.arena, &g.condition, cfg, &[0, 2], &s0, &s1), Err(EngineError::NotAPath(0, 2)));
    }
}
