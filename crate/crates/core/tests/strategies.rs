use std::sync::Arc;

use muller_core::corpus;
use muller_core::engine::{referee_play, verify_bound, RefereeConfig, SearchMode, Verdict};
use muller_core::finite_time::StoppingRule;
use muller_core::gamefile::GameFile;
use muller_core::par::ExecMode;
use muller_core::scoring::{self, PlayerFamily};
use muller_core::strategy::{
    all_positional, trace_change_points, FirstSuccessor, RandomMachine, ReferenceBounding, Strategy,
    ZielonkaStrategy,
};
use muller_core::zielonka::{solve_game, Decomposition};
use muller_core::{Arena, MullerCondition, Player, VertexId, VertexSet};

struct Solved {
    arena: Arc<Arena>,
    cond: Arc<MullerCondition>,
    d: Decomposition,
}

fn solved(g: &GameFile) -> Solved {
    let arena = Arc::new(g.arena.clone());
    let cond = Arc::new(g.condition.clone());
    let d = solve_game(&arena, &cond).unwrap();
    Solved { arena, cond, d }
}

fn g_n_max_score(n: usize, strategy: &ZielonkaStrategy, s: &Solved) -> u32 {
    let cfg = RefereeConfig { rule: StoppingRule::None, budget: 500, detect_lasso: false };
    let idle = FirstSuccessor { arena: Arc::clone(&s.arena), player: Player::One };
    let rec = referee_play(&s.arena, &s.cond, cfg, &[0], strategy, &idle).unwrap();
    assert_eq!(rec.steps.len(), 500);
    let top: VertexSet = (1..=n).collect();
    rec.chains.iter().map(|c| c.score(top)).max().unwrap()
}

#[test]
fn naive_strategy_on_g_n_reaches_n() {
    for n in 3..=6 {
        let s = solved(&corpus::g_n(n));
        let naive = ZielonkaStrategy::naive(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, Player::Zero);
        assert_eq!(g_n_max_score(n, &naive, &s), n as u32, "G_{n}");
    }
}

#[test]
fn naive_strategy_on_g_3_cycles_through_targets() {
    let s = solved(&corpus::g_n(3));
    let naive = ZielonkaStrategy::naive(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, Player::Zero);
    let idle = FirstSuccessor { arena: Arc::clone(&s.arena), player: Player::One };
    let cfg = RefereeConfig { rule: StoppingRule::None, budget: 11, detect_lasso: false };
    let rec = referee_play(&s.arena, &s.cond, cfg, &[0], &naive, &idle).unwrap();
    assert_eq!(rec.steps, vec![0, 3, 2, 1, 0, 3, 2, 1, 3, 2, 1]);
}

#[test]
fn sigma_star_on_g_n_stays_at_two() {
    for n in 3..=6 {
        let s = solved(&corpus::g_n(n));
        let sigma = ZielonkaStrategy::sigma_star(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d);
        let fam = PlayerFamily::new(&s.cond, Player::One, s.cond.universe());
        let cfg = RefereeConfig { rule: StoppingRule::None, budget: 500, detect_lasso: false };
        let idle = FirstSuccessor { arena: Arc::clone(&s.arena), player: Player::One };
        for v in 0..=n {
            let rec = referee_play(&s.arena, &s.cond, cfg, &[v], &sigma, &idle).unwrap();
            assert!(rec.max_score(&fam) <= 2, "G_{n} from {v}");
        }
    }
}

#[test]
fn fig1_bound_is_exactly_two_with_witness_1001() {
    let g = corpus::fig1();
    let s = solved(&g);
    let report = verify_bound(
        &s.arena,
        &s.cond,
        &s.d,
        Player::Zero,
        Some(VertexSet::from([1])),
        SearchMode::exhaustive(27),
        ExecMode::Sequential,
    )
    .unwrap();
    assert_eq!(report.max_opponent_score, 2);
    assert_eq!(report.witness, Some(vec![1, 0, 0, 1]));
}

#[test]
fn swapped_fig1_tau_star_bounds_player_zero() {
    let g = corpus::fig1();
    let cond = g.condition.swapped().unwrap();
    let s = solved(&GameFile { condition: cond, ..g });
    assert_eq!(s.d.w1, VertexSet::full(3));
    let report =
        verify_bound(&s.arena, &s.cond, &s.d, Player::One, None, SearchMode::exhaustive(27), ExecMode::Sequential)
            .unwrap();
    assert!(report.max_opponent_score <= 2);
}

fn both_players(s: &Solved) -> Vec<Player> {
    [Player::Zero, Player::One].into_iter().filter(|&p| !s.d.region(p).is_empty()).collect()
}

#[test]
fn machine_and_reference_agree_on_random_plays() {
    for seed in 0..40u64 {
        let g = corpus::random_game(seed, 2 + seed as usize % 4);
        let s = solved(&g);
        for p in both_players(&s) {
            let machine = ZielonkaStrategy::bounding(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p);
            let reference = ReferenceBounding::new(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p);
            for t in 0..10u64 {
                let opp = RandomMachine::new(&s.arena, p.opponent(), 3, seed * 100 + t);
                let start = s.d.region(p).iter().nth(t as usize % s.d.region(p).len()).unwrap();
                let cfg = RefereeConfig { rule: StoppingRule::None, budget: 60, detect_lasso: false };
                let (a, b) = match p {
                    Player::Zero => (
                        referee_play(&s.arena, &s.cond, cfg, &[start], &machine, &opp).unwrap(),
                        referee_play(&s.arena, &s.cond, cfg, &[start], &reference, &opp).unwrap(),
                    ),
                    Player::One => (
                        referee_play(&s.arena, &s.cond, cfg, &[start], &opp, &machine).unwrap(),
                        referee_play(&s.arena, &s.cond, cfg, &[start], &opp, &reference).unwrap(),
                    ),
                };
                assert_eq!(a.steps, b.steps, "seed {seed} player {p} trial {t}");
            }
        }
    }
}

#[test]
fn random_games_bounded_against_finite_state_opponents() {
    for seed in 0..60u64 {
        let n = 2 + seed as usize % 5;
        let g = corpus::random_game(seed + 500, n);
        let s = solved(&g);
        for p in both_players(&s) {
            let bounding = ZielonkaStrategy::bounding(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p);
            let fam = PlayerFamily::new(&s.cond, p.opponent(), s.cond.universe());
            for t in 0..8u64 {
                let opp = RandomMachine::new(&s.arena, p.opponent(), 1 + t as usize % 3, seed * 31 + t);
                let start = s.d.region(p).iter().nth(t as usize % s.d.region(p).len()).unwrap();
                let cfg = RefereeConfig { rule: StoppingRule::None, budget: 5000, detect_lasso: true };
                let rec = match p {
                    Player::Zero => referee_play(&s.arena, &s.cond, cfg, &[start], &bounding, &opp),
                    Player::One => referee_play(&s.arena, &s.cond, cfg, &[start], &opp, &bounding),
                }
                .unwrap();
                assert!(rec.max_score(&fam) <= 2, "seed {seed} player {p}");
                match rec.verdict {
                    Verdict::Lasso { winner, .. } => assert_eq!(winner, p, "seed {seed}"),
                    other => panic!("expected a lasso, got {other:?}"),
                }
            }
        }
    }
}

#[test]
fn strategies_win_against_every_positional_opponent() {
    for seed in 0..40u64 {
        let g = corpus::random_game(seed + 900, 2 + seed as usize % 2);
        let s = solved(&g);
        for p in both_players(&s) {
            for mode_naive in [false, true] {
                let st = if mode_naive {
                    ZielonkaStrategy::naive(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p)
                } else {
                    ZielonkaStrategy::bounding(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p)
                };
                for opp in all_positional(&s.arena, p.opponent()) {
                    for start in s.d.region(p).iter() {
                        let cfg = RefereeConfig { rule: StoppingRule::None, budget: 10_000, detect_lasso: true };
                        let rec = match p {
                            Player::Zero => referee_play(&s.arena, &s.cond, cfg, &[start], &st, &opp),
                            Player::One => referee_play(&s.arena, &s.cond, cfg, &[start], &opp, &st),
                        }
                        .unwrap();
                        match rec.verdict {
                            Verdict::Lasso { winner, .. } => assert_eq!(winner, p),
                            other => panic!("{other:?}"),
                        }
                    }
                }
            }
        }
    }
}

/// Prefixes up to each change point are burdens for the opponent's family inside the region.
#[test]
fn burdens_survive_change_points() {
    let mut checked = 0;
    for seed in 0..80u64 {
        let g = corpus::random_game(seed + 2000, 2 + seed as usize % 4);
        let s = solved(&g);
        let p = s.d.owner;
        let region = s.d.region(p);
        if region.is_empty() || s.d.is_leaf() {
            continue;
        }
        let tau = ZielonkaStrategy::bounding(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p);
        let fam = PlayerFamily::new(&s.cond, p.opponent(), region);
        for t in 0..6u64 {
            let opp = RandomMachine::new(&s.arena, p.opponent(), 2, seed * 7 + t);
            let start = region.iter().nth(t as usize % region.len()).unwrap();
            let cfg = RefereeConfig { rule: StoppingRule::None, budget: 80, detect_lasso: false };
            let rec = match p {
                Player::Zero => referee_play(&s.arena, &s.cond, cfg, &[start], &tau, &opp),
                Player::One => referee_play(&s.arena, &s.cond, cfg, &[start], &opp, &tau),
            }
            .unwrap();
            let trace = trace_change_points(&tau, &rec.steps, 1).unwrap();
            assert_eq!(trace.positions[0], 0);
            for &r in &trace.positions {
                assert!(scoring::is_burden(&rec.steps[..=r], &fam).unwrap(), "seed {seed} at {r}");
                checked += 1;
            }
            let reference = ReferenceBounding::new(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d, p);
            let picks = reference.selections(&rec.steps).unwrap();
            let mut expected = Vec::new();
            for (r, c) in picks.iter().enumerate() {
                if r == 0 || picks[r - 1] != *c {
                    expected.push(r);
                }
            }
            assert_eq!(trace.positions, expected);
        }
    }
    assert!(checked > 100);
}

#[test]
fn change_point_trace_rejects_foreign_moves() {
    let g = corpus::fig1();
    let s = solved(&GameFile { condition: g.condition.swapped().unwrap(), ..g });
    let tau = ZielonkaStrategy::tau_star(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d);
    // find what the strategy plays at 0 and contradict it
    let mv = tau.evaluate(&[0]).unwrap();
    let other: VertexId = if mv == 0 { 1 } else { 0 };
    assert!(trace_change_points(&tau, &[0, other], 1).is_err());
    assert!(trace_change_points(&tau, &[0, mv], 1).is_ok());
}

#[test]
fn off_domain_outside_region() {
    let g = corpus::fig1();
    let s = solved(&g);
    // Player 1 wins nothing on the example
    let tau = ZielonkaStrategy::tau_star(Arc::clone(&s.arena), Arc::clone(&s.cond), &s.d);
    assert!(tau.evaluate(&[0]).is_err());
}
