//! Direct evaluation of scores and accumulators from their definitions, used as the
//! ground truth for the incremental [`ScoreChain`](super::ScoreChain).
//!
//! Everything here rescans the word and has no shared state with the chain.

use crate::vertex_set::{VertexId, VertexSet};

/// `score_F(w)`: the largest `k` such that some suffix of `w` splits into `k` non-empty
/// blocks whose occurrence sets are all exactly `F`.
///
/// Blocks are peeled off from the end, each one as short as possible; a shortest last
/// block leaves the longest remainder for the others, so the count is maximal.
pub fn score(set: VertexSet, word: &[VertexId]) -> u32 {
    if set.is_empty() {
        return 0;
    }
    let mut count = 0;
    let mut seen = VertexSet::EMPTY;
    for &v in word.iter().rev() {
        if !set.contains(v) {
            break;
        }
        seen.insert(v);
        if seen == set {
            count += 1;
            seen = VertexSet::EMPTY;
        }
    }
    count
}

/// Exhaustive variant of [`score`]: tries every suffix and every split point.
/// Exponential in spirit, quadratic in practice; only for checking [`score`] on short words.
pub fn score_exhaustive(set: VertexSet, word: &[VertexId]) -> u32 {
    let n = word.len();
    // best[p]: most blocks that exactly tile word[p..], None if impossible
    let mut best: Vec<Option<u32>> = vec![None; n + 1];
    best[n] = Some(0);
    for p in (0..n).rev() {
        let mut occ = VertexSet::EMPTY;
        let mut b: Option<u32> = None;
        for q in p..n {
            occ.insert(word[q]);
            if occ == set {
                if let Some(rest) = best[q + 1] {
                    b = Some(b.map_or(rest + 1, |x| x.max(rest + 1)));
                }
            }
        }
        best[p] = b;
    }
    best[..n].iter().flatten().copied().max().unwrap_or(0)
}

/// `acc_F(w)`: occurrence set of the longest suffix `x` of `w` with `occ(x) ⊆ F` such that
/// removing any suffix of `x` from `w` leaves the score of `F` unchanged. The empty word
/// scores 0.
pub fn accumulator(set: VertexSet, word: &[VertexId]) -> VertexSet {
    let target = score(set, word);
    let mut start = word.len();
    while start > 0 && set.contains(word[start - 1]) && score(set, &word[..start - 1]) == target {
        start -= 1;
    }
    word[start..].iter().copied().collect()
}

/// Occurrence sets of all non-empty suffixes of `word`, smallest first, without repeats.
pub fn suffix_occurrence_sets(word: &[VertexId]) -> Vec<VertexSet> {
    let mut out: Vec<VertexSet> = Vec::new();
    let mut occ = VertexSet::EMPTY;
    for &v in word.iter().rev() {
        occ.insert(v);
        if out.last() != Some(&occ) {
            out.push(occ);
        }
    }
    out
}

/// `maxscore` over an explicit list of sets and every prefix of `word`.
pub fn max_score(family: &[VertexSet], word: &[VertexId]) -> u32 {
    (1..=word.len())
        .flat_map(|len| family.iter().map(move |&f| score(f, &word[..len])))
        .max()
        .unwrap_or(0)
}

/// `ind(w)` over an explicit family.
pub fn indicator(family: &[VertexSet], word: &[VertexId]) -> VertexSet {
    family.iter().fold(VertexSet::EMPTY, |acc, &f| {
        let mut out = acc;
        if score(f, word) > 0 {
            out = out.union(f);
        }
        out.union(accumulator(f, word))
    })
}

/// Burden check over an explicit family.
pub fn is_burden(family: &[VertexSet], word: &[VertexId]) -> bool {
    max_score(family, word) <= 2
        && family.iter().all(|&f| match score(f, word) {
            0 => true,
            1 => accumulator(f, word).is_empty(),
            _ => false,
        })
}
