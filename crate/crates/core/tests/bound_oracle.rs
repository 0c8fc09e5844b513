//! Exhaustive bound search checked against a plain recursive play-tree walk that uses the
//! history-based reference strategy and the definitional scores.

use std::sync::Arc;

use muller_core::corpus;
use muller_core::engine::{verify_bound, SearchMode};
use muller_core::gamefile::GameFile;
use muller_core::par::ExecMode;
use muller_core::scoring::{definition, PlayerFamily};
use muller_core::strategy::{ReferenceBounding, Strategy};
use muller_core::zielonka::solve_game;
use muller_core::{Arena, Player, VertexId, VertexSet};

struct Walk<'a> {
    arena: &'a Arena,
    strategy: &'a ReferenceBounding,
    opponent_sets: Vec<VertexSet>,
    all_sets: Vec<VertexSet>,
    depth: usize,
    best: Option<(u32, Vec<VertexId>)>,
    nodes: u64,
}

impl Walk<'_> {
    fn go(&mut self, path: &mut Vec<VertexId>) {
        self.nodes += 1;
        let score = self.opponent_sets.iter().map(|&f| definition::score(f, path)).max().unwrap_or(0);
        if score > 0 {
            let better = match &self.best {
                None => true,
                Some((s, w)) => score > *s || (score == *s && path.as_slice() < w.as_slice()),
            };
            if better {
                self.best = Some((score, path.clone()));
            }
        }
        let stopped = self.all_sets.iter().any(|&f| definition::score(f, path) >= 3);
        if stopped || path.len() >= self.depth {
            return;
        }
        let v = *path.last().unwrap();
        let moves: Vec<VertexId> = if self.arena.owner(v) == self.strategy.player() {
            vec![self.strategy.evaluate(path).unwrap()]
        } else {
            self.arena.successors(v).to_vec()
        };
        let mut moves = moves;
        moves.sort_unstable();
        moves.dedup();
        for w in moves {
            path.push(w);
            self.go(path);
            path.pop();
        }
    }
}

fn compare(g: &GameFile, exec: ExecMode) -> usize {
    let arena = Arc::new(g.arena.clone());
    let cond = Arc::new(g.condition.clone());
    let d = solve_game(&arena, &cond).unwrap();
    let depth = 3usize.pow(arena.vertex_count() as u32);
    let mut runs = 0;
    for p in [Player::Zero, Player::One] {
        let region = d.region(p);
        if region.is_empty() {
            continue;
        }
        let reference = ReferenceBounding::new(Arc::clone(&arena), Arc::clone(&cond), &d, p);
        let mut walk = Walk {
            arena: &arena,
            strategy: &reference,
            opponent_sets: PlayerFamily::new(&cond, p.opponent(), cond.universe()).members(),
            all_sets: arena.vertices().subsets().skip(1).collect(),
            depth,
            best: None,
            nodes: 0,
        };
        for v in region.iter() {
            walk.go(&mut vec![v]);
        }
        let report = verify_bound(&arena, &cond, &d, p, None, SearchMode::exhaustive(depth), exec).unwrap();
        let (score, witness) = walk.best.clone().map_or((0, None), |(s, w)| (s, Some(w)));
        assert_eq!(report.max_opponent_score, score, "player {p}");
        assert_eq!(report.witness, witness, "player {p}");
        assert_eq!(report.nodes, walk.nodes, "player {p}");
        assert!(score <= 2);
        runs += 1;
    }
    runs
}

#[test]
fn fig1_matches_play_tree() {
    assert_eq!(compare(&corpus::fig1(), ExecMode::Sequential), 1);
    assert_eq!(compare(&corpus::fig1(), ExecMode::Parallel), 1);
}

#[test]
fn random_small_games_match_play_tree() {
    let mut runs = 0;
    for seed in 0..60u64 {
        let g = corpus::random_game(seed + 31_000, 1 + seed as usize % 3);
        let exec = if seed % 2 == 0 { ExecMode::Sequential } else { ExecMode::Parallel };
        runs += compare(&g, exec);
    }
    assert!(runs >= 60);
}

#[test]
fn random_adversaries_on_larger_games() {
    for seed in 0..12u64 {
        let n = 4 + seed as usize % 3;
        let g = corpus::random_game(seed + 41_000, n);
        let arena = Arc::new(g.arena.clone());
        let cond = Arc::new(g.condition.clone());
        let d = solve_game(&arena, &cond).unwrap();
        for p in [Player::Zero, Player::One] {
            if d.region(p).is_empty() {
                continue;
            }
            let mode = SearchMode::Random { trials: 1000, depth: 200, seed };
            let report = verify_bound(&arena, &cond, &d, p, None, mode, ExecMode::Parallel).unwrap();
            assert!(report.max_opponent_score <= 2, "seed {seed} player {p}: {report:?}");
            assert_eq!(report.plays, 1000);
        }
    }
}
