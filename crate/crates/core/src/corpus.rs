//! Built-in games: the three-vertex example arena, the `G_n` family and seeded random games.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::Arena;
use crate::condition::MullerCondition;
use crate::gamefile::GameFile;
use crate::vertex_set::{Player, VertexId, VertexSet};

/// Three vertices: `0` (Player 1) with edges to 0 and 1, `1` (Player 0) with edges to 0
/// and 2, `2` (Player 1) with edges to 1 and 2. `F0 = {{0}, {2}, {0,1,2}}`, start 1.
pub fn fig1() -> GameFile {
    let arena = Arena::new(
        vec![Player::One, Player::Zero, Player::One],
        vec![vec![0, 1], vec![0, 2], vec![1, 2]],
    )
    .expect("valid arena");
    let condition = MullerCondition::new(
        arena.vertices(),
        [VertexSet::from([0]), VertexSet::from([2]), VertexSet::from([0, 1, 2])],
    )
    .expect("valid condition");
    GameFile { arena, condition, start: Some(1) }
}

/// `G_n`: vertices `0..=n`, all owned by Player 0, edges `i+1 → i` plus `0 → n` and
/// `1 → n`; Player 0 wins exactly when every vertex is seen infinitely often.
pub fn g_n(n: usize) -> GameFile {
    assert!((1..64).contains(&n), "G_n needs 1 <= n < 64");
    let mut succ: Vec<Vec<VertexId>> = vec![Vec::new(); n + 1];
    for i in 0..n {
        succ[i + 1].push(i);
    }
    succ[0].push(n);
    if !succ[1].contains(&n) {
        succ[1].push(n);
    }
    let arena = Arena::new(vec![Player::Zero; n + 1], succ).expect("valid arena");
    let condition = MullerCondition::new(arena.vertices(), [arena.vertices()]).expect("valid");
    GameFile { arena, condition, start: Some(0) }
}

/// A random game on `n` vertices: owners uniform, each edge present with probability
/// 0.4 (at least one per vertex), each non-empty set in `F0` with probability 1/2.
pub fn random_game(seed: u64, n: usize) -> GameFile {
    assert!((1..=16).contains(&n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owner = (0..n).map(|_| if rng.random_bool(0.5) { Player::One } else { Player::Zero }).collect();
    let succ = (0..n)
        .map(|_| {
            let mut s: Vec<VertexId> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
            if s.is_empty() {
                s.push(rng.random_range(0..n));
            }
            s
        })
        .collect();
    let arena = Arena::new(owner, succ).expect("valid arena");
    let f0: Vec<VertexSet> =
        arena.vertices().subsets().skip(1).filter(|_| rng.random_bool(0.5)).collect();
    let condition = MullerCondition::new(arena.vertices(), f0).expect("valid condition");
    GameFile { arena, condition, start: None }
}

/// Seed and size of the `i`-th bundled random game.
pub fn bundled_random_params(i: usize) -> (u64, usize) {
    (1000 + i as u64, 2 + i % 3)
}

/// Number of random games in the bundled corpus.
pub const BUNDLED_RANDOM: usize = 20;

/// The bundled corpus as `(file stem, game)` pairs.
pub fn bundled() -> Vec<(String, GameFile)> {
    let mut out = vec![("fig1".to_string(), fig1())];
    for n in 2..=6 {
        out.push((format!("g{n}"), g_n(n)));
    }
    for i in 0..BUNDLED_RANDOM {
        let (seed, n) = bundled_random_params(i);
        out.push((format!("random_{i:02}"), random_game(seed, n)));
    }
    out
}
