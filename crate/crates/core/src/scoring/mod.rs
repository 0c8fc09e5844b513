//! Scores, accumulators and the derived play measures.
//!
//! The sets with non-zero score after a finite play are exactly the occurrence sets of its
//! suffixes, and they form a ⊆-chain. [`ScoreChain`] keeps one entry per such set and
//! updates all of them in one pass per move.

pub mod definition;

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::condition::MullerCondition;
use crate::vertex_set::{Player, VertexId, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("sets {0} and {1} reached their thresholds in the same step")]
    MultipleHits(VertexSet, VertexSet),
    #[error("word of length {k}^{n} - 1 exceeds the length budget")]
    LengthOverflow { k: u32, n: u32 },
    #[error("a play needs at least one vertex")]
    EmptyPlay,
}

/// Score and accumulator of one suffix-occurrence set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChainEntry {
    pub set: VertexSet,
    pub score: u32,
    pub accumulator: VertexSet,
}

/// Incremental score state of a finite play.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScoreChain {
    /// Ordered by strict inclusion, smallest first.
    entries: Vec<ChainEntry>,
    last: VertexId,
}

impl ScoreChain {
    /// State after the one-letter play `v`.
    pub fn new(v: VertexId) -> Self {
        ScoreChain {
            entries: vec![ChainEntry {
                set: VertexSet::singleton(v),
                score: 1,
                accumulator: VertexSet::EMPTY,
            }],
            last: v,
        }
    }

    /// Replays a whole non-empty play.
    pub fn of_play(play: &[VertexId]) -> Result<Self, ScoringError> {
        let (&first, rest) = play.split_first().ok_or(ScoringError::EmptyPlay)?;
        let mut chain = ScoreChain::new(first);
        for &v in rest {
            chain.push(v);
        }
        Ok(chain)
    }

    pub fn entries(&self) -> &[ChainEntry] {
        &self.entries
    }

    pub fn last_vertex(&self) -> VertexId {
        self.last
    }

    /// The entry for `set`, if it currently has a non-zero score.
    pub fn entry(&self, set: VertexSet) -> Option<&ChainEntry> {
        self.entries.iter().find(|e| e.set == set)
    }

    pub fn score(&self, set: VertexSet) -> u32 {
        self.entry(set).map_or(0, |e| e.score)
    }

    /// `acc_F` for any `F`. Sets outside the chain accumulate the largest chain set they
    /// contain, i.e. the occurrence set of the longest suffix inside them.
    pub fn accumulator(&self, set: VertexSet) -> VertexSet {
        if let Some(e) = self.entry(set) {
            return e.accumulator;
        }
        self.largest_below(set)
    }

    /// Largest chain set contained in `set`, or the empty set.
    pub fn largest_below(&self, set: VertexSet) -> VertexSet {
        self.entries
            .iter()
            .rev()
            .map(|e| e.set)
            .find(|s| s.is_subset(set))
            .unwrap_or(VertexSet::EMPTY)
    }

    /// Highest score currently held by any set.
    pub fn top_score(&self) -> u32 {
        self.entries.iter().map(|e| e.score).max().unwrap_or(0)
    }

    /// Appends `v` to the play.
    pub fn push(&mut self, v: VertexId) {
        self.push_saturating(v, u32::MAX);
    }

    /// Appends `v`, capping scores at `cap`.
    pub fn push_saturating(&mut self, v: VertexId, cap: u32) {
        let old = std::mem::take(&mut self.entries);
        let mut next: Vec<ChainEntry> = Vec::with_capacity(old.len() + 1);
        let has = |sets: &[ChainEntry], s: VertexSet| sets.iter().any(|e| e.set == s);
        let single = VertexSet::singleton(v);
        if !has(&old, single) {
            next.push(ChainEntry { set: single, score: 1, accumulator: VertexSet::EMPTY });
        }
        for e in &old {
            if e.set.contains(v) {
                let acc = e.accumulator.with(v);
                next.push(if acc == e.set {
                    ChainEntry { set: e.set, score: e.score.saturating_add(1).min(cap), accumulator: VertexSet::EMPTY }
                } else {
                    ChainEntry { accumulator: acc, ..*e }
                });
            } else {
                // the previous longest suffix inside the grown set is `e.set`, so the
                // new vertex completes its first block immediately
                let grown = e.set.with(v);
                if !has(&old, grown) {
                    next.push(ChainEntry { set: grown, score: 1, accumulator: VertexSet::EMPTY });
                }
            }
        }
        next.sort_by_key(|e| e.set.len());
        self.entries = next;
        self.last = v;
    }

    /// Returns the updated chain, leaving `self` unchanged.
    pub fn updated(&self, v: VertexId) -> ScoreChain {
        let mut c = self.clone();
        c.push(v);
        c
    }

    /// Sets whose score has reached `threshold(set)`; at most one unless scoring is broken.
    pub fn threshold_hit(
        &self,
        threshold: impl Fn(VertexSet) -> u32,
    ) -> Result<Option<VertexSet>, ScoringError> {
        let mut hits = self.entries.iter().filter(|e| e.score >= threshold(e.set)).map(|e| e.set);
        match (hits.next(), hits.next()) {
            (None, _) => Ok(None),
            (Some(a), None) => Ok(Some(a)),
            (Some(a), Some(b)) => Err(ScoringError::MultipleHits(a, b)),
        }
    }

    /// Whether the entry sets form a strict ⊆-chain whose smallest member contains the
    /// last vertex.
    pub fn is_chain(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].set.is_strict_subset(w[1].set))
            && self.entries.first().is_some_and(|e| e.set.contains(self.last))
    }
}

/// A (possibly implicit) family of vertex sets.
pub trait SetFamily {
    fn contains(&self, set: VertexSet) -> bool;

    /// Every member is a subset of this set.
    fn bound(&self) -> VertexSet;

    /// Whether some member `F` satisfies `lower ⊊ F` and `avoid ⊄ F`.
    fn any_strictly_above(&self, lower: VertexSet, avoid: Option<VertexSet>) -> bool {
        let free = self.bound().difference(lower);
        if !lower.is_subset(self.bound()) {
            return false;
        }
        free.subsets().skip(1).map(|extra| lower.union(extra)).any(|f| {
            avoid.is_none_or(|a| !a.is_subset(f)) && self.contains(f)
        })
    }
}

/// Every subset of a universe.
#[derive(Debug, Clone, Copy)]
pub struct AllSets(pub VertexSet);

impl SetFamily for AllSets {
    fn contains(&self, set: VertexSet) -> bool {
        set.is_subset(self.0)
    }

    fn bound(&self) -> VertexSet {
        self.0
    }
}

/// An explicitly listed family.
#[derive(Debug, Clone, Default)]
pub struct ListedSets {
    sets: HashSet<VertexSet>,
    bound: VertexSet,
}

impl ListedSets {
    pub fn new(sets: impl IntoIterator<Item = VertexSet>) -> Self {
        let sets: HashSet<VertexSet> = sets.into_iter().collect();
        let bound = sets.iter().fold(VertexSet::EMPTY, |a, s| a.union(*s));
        ListedSets { sets, bound }
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.sets.iter().copied()
    }
}

impl FromIterator<VertexSet> for ListedSets {
    fn from_iter<I: IntoIterator<Item = VertexSet>>(iter: I) -> Self {
        ListedSets::new(iter)
    }
}

impl SetFamily for ListedSets {
    fn contains(&self, set: VertexSet) -> bool {
        self.sets.contains(&set)
    }

    fn bound(&self) -> VertexSet {
        self.bound
    }

    fn any_strictly_above(&self, lower: VertexSet, avoid: Option<VertexSet>) -> bool {
        self.sets
            .iter()
            .any(|&f| lower.is_strict_subset(f) && avoid.is_none_or(|a| !a.is_subset(f)))
    }
}

impl SetFamily for BTreeSet<VertexSet> {
    fn contains(&self, set: VertexSet) -> bool {
        BTreeSet::contains(self, &set)
    }

    fn bound(&self) -> VertexSet {
        self.iter().fold(VertexSet::EMPTY, |a, s| a.union(*s))
    }
}

/// The non-empty sets of one player's family that lie inside `within`: `F_p ↾ within`.
#[derive(Debug, Clone, Copy)]
pub struct PlayerFamily<'a> {
    pub condition: &'a MullerCondition,
    pub player: Player,
    pub within: VertexSet,
}

impl<'a> PlayerFamily<'a> {
    pub fn new(condition: &'a MullerCondition, player: Player, within: VertexSet) -> Self {
        PlayerFamily { condition, player, within: within.intersection(condition.universe()) }
    }

    /// Members listed explicitly; enumerates subsets for Player 1's implicit family.
    pub fn members(&self) -> Vec<VertexSet> {
        match self.player {
            Player::Zero => self.condition.f0().filter(|f| self.contains(*f)).collect(),
            Player::One => self.within.subsets().filter(|f| self.contains(*f)).collect(),
        }
    }
}

impl SetFamily for PlayerFamily<'_> {
    fn contains(&self, set: VertexSet) -> bool {
        !set.is_empty() && set.is_subset(self.within) && self.condition.owner_of(set) == self.player
    }

    fn bound(&self) -> VertexSet {
        self.within
    }

    fn any_strictly_above(&self, lower: VertexSet, avoid: Option<VertexSet>) -> bool {
        match self.player {
            Player::Zero => self.condition.f0().any(|f| {
                lower.is_strict_subset(f)
                    && f.is_subset(self.within)
                    && avoid.is_none_or(|a| !a.is_subset(f))
            }),
            Player::One => {
                let free = self.within.difference(lower);
                lower.is_subset(self.within)
                    && free.subsets().skip(1).map(|x| lower.union(x)).any(|f| {
                        avoid.is_none_or(|a| !a.is_subset(f)) && self.contains(f)
                    })
            }
        }
    }
}

/// `maxscore` of a family over every prefix of `play`.
pub fn max_score(family: &impl SetFamily, play: &[VertexId]) -> u32 {
    let Some((&first, rest)) = play.split_first() else {
        return 0;
    };
    let mut chain = ScoreChain::new(first);
    let mut best = chain_family_max(&chain, family);
    for &v in rest {
        chain.push(v);
        best = best.max(chain_family_max(&chain, family));
    }
    best
}

/// Highest current score among chain sets belonging to `family`.
pub fn chain_family_max(chain: &ScoreChain, family: &impl SetFamily) -> u32 {
    chain.entries().iter().filter(|e| family.contains(e.set)).map(|e| e.score).max().unwrap_or(0)
}

/// `ind(w)`: union of the family's scored sets and non-empty accumulators, read off a chain.
pub fn indicator_of_chain(chain: &ScoreChain, family: &impl SetFamily) -> VertexSet {
    let entries = chain.entries();
    let mut out = VertexSet::EMPTY;
    for e in entries {
        if family.contains(e.set) {
            // acc ⊊ set, so the set covers it
            out = out.union(e.set);
        }
    }
    // a set outside the chain accumulates the largest chain set below it
    for (j, e) in entries.iter().enumerate().rev() {
        if e.set.is_subset(out) {
            break;
        }
        let next = entries.get(j + 1).map(|n| n.set);
        if family.any_strictly_above(e.set, next) {
            out = out.union(e.set);
            break;
        }
    }
    out
}

pub fn indicator(play: &[VertexId], family: &impl SetFamily) -> Result<VertexSet, ScoringError> {
    Ok(indicator_of_chain(&ScoreChain::of_play(play)?, family))
}

/// A play is a burden for a family when its scores never exceeded 2 and every family set
/// that currently scores has score 1 with nothing accumulated.
pub fn is_burden(play: &[VertexId], family: &impl SetFamily) -> Result<bool, ScoringError> {
    let chain = ScoreChain::of_play(play)?;
    Ok(max_score(family, play) <= 2 && chain_is_burden(&chain, family))
}

/// The final-state half of [`is_burden`].
pub fn chain_is_burden(chain: &ScoreChain, family: &impl SetFamily) -> bool {
    chain
        .entries()
        .iter()
        .filter(|e| family.contains(e.set))
        .all(|e| e.score == 1 && e.accumulator.is_empty())
}

/// Longest word permitted by [`low_score_word`].
pub const LOW_SCORE_WORD_BUDGET: u64 = 1 << 24;

/// The word `w(k,n)` over `{1..n}` with `w(k,1) = 1^(k-1)` and
/// `w(k,n) = (w(k,n-1) n)^(k-1) w(k,n-1)`; it has length `k^n - 1` and every set scores
/// below `k` on it.
pub fn low_score_word(k: u32, n: u32) -> Result<Vec<VertexId>, ScoringError> {
    let overflow = ScoringError::LengthOverflow { k, n };
    if k == 0 || n == 0 || n as usize >= crate::vertex_set::MAX_VERTICES {
        return Err(overflow);
    }
    let len = (k as u64).checked_pow(n).ok_or(overflow.clone())? - 1;
    if len > LOW_SCORE_WORD_BUDGET {
        return Err(overflow);
    }
    let mut word: Vec<VertexId> = vec![1; (k - 1) as usize];
    for letter in 2..=n as VertexId {
        let mut next = Vec::with_capacity(word.len() * k as usize + k as usize);
        for _ in 1..k {
            next.extend_from_slice(&word);
            next.push(letter);
        }
        next.extend_from_slice(&word);
        word = next;
    }
    Ok(word)
}
