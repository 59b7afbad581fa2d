//! Codes as sorted sets of ternary words.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrifError};
use crate::word::{self, check_length, lanes_trifferent, Codeword, POW3};

/// A set of distinct words of a common length, kept in ascending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    length: usize,
    words: Vec<Codeword>,
}

impl Code {
    /// Builds a code from words in any order. Duplicates are rejected.
    pub fn new(length: usize, mut words: Vec<Codeword>) -> Result<Self> {
        check_length(length)?;
        for w in &words {
            if w.len() != length {
                return Err(TrifError::LengthMismatch {
                    expected: length,
                    got: w.len(),
                });
            }
        }
        words.sort_unstable();
        if let Some(pair) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(TrifError::DuplicateWord(pair[0].encode()));
        }
        Ok(Code { length, words })
    }

    pub fn empty(length: usize) -> Result<Self> {
        Self::new(length, Vec::new())
    }

    pub fn from_values(length: usize, values: &[u32]) -> Result<Self> {
        let words = values
            .iter()
            .map(|&v| Codeword::decode(length, u64::from(v)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(length, words)
    }

    /// Caller guarantees ascending, distinct words of length `length`.
    pub(crate) fn from_sorted_unchecked(length: usize, words: Vec<Codeword>) -> Self {
        debug_assert!(words.windows(2).all(|p| p[0] < p[1]));
        Code { length, words }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn cardinality(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    pub fn values(&self) -> Vec<u32> {
        self.words.iter().map(Codeword::encode).collect()
    }

    pub fn contains(&self, w: &Codeword) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// Codes with at most two words are vacuously trifferent.
    pub fn is_trifferent(&self) -> bool {
        self.violating_triple().is_none()
    }

    /// Indices of the first triple that has no coordinate with all three
    /// symbols, if any.
    pub fn violating_triple(&self) -> Option<(usize, usize, usize)> {
        let lanes: Vec<u64> = self.words.iter().map(Codeword::lanes).collect();
        for c in 2..lanes.len() {
            for b in 1..c {
                for a in 0..b {
                    if !lanes_trifferent(lanes[a], lanes[b], lanes[c]) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Whether adding `w` keeps a trifferent code trifferent. Only triples
    /// that contain `w` are checked.
    pub fn can_add(&self, w: &Codeword) -> bool {
        can_add_lanes(&self.words, w.lanes())
    }

    pub fn min_distance(&self) -> Result<usize> {
        if self.words.len() < 2 {
            return Err(TrifError::TooFewWords(self.words.len()));
        }
        let mut best = usize::MAX;
        for (i, a) in self.words.iter().enumerate() {
            for b in &self.words[i + 1..] {
                best = best.min(word::lanes_distance(a.lanes(), b.lanes()) as usize);
            }
        }
        Ok(best)
    }

    /// `C_{not i:j}`: the words whose coordinate `i` (0-based) differs from
    /// `j`, with coordinate `i` deleted.
    pub fn residual_subcode(&self, coordinate: usize, symbol: u8) -> Result<Code> {
        if self.length < 2 {
            return Err(TrifError::ResidualOfLengthOne);
        }
        if coordinate >= self.length {
            return Err(TrifError::CoordinateOutOfRange {
                coordinate,
                length: self.length,
            });
        }
        if symbol > 2 {
            return Err(TrifError::InvalidSymbol(symbol));
        }
        let mut words: Vec<Codeword> = self
            .words
            .iter()
            .filter(|w| w.digit(coordinate) != symbol)
            .map(|w| w.delete_coordinate(coordinate))
            .collect();
        words.sort_unstable();
        // Words differing only in coordinate i collapse to one.
        words.dedup();
        Ok(Code::from_sorted_unchecked(self.length - 1, words))
    }

    pub fn symbol_counts(&self) -> SymbolCounts {
        let mut counts = vec![[0usize; 3]; self.length];
        for w in &self.words {
            for (i, row) in counts.iter_mut().enumerate() {
                row[w.digit(i) as usize] += 1;
            }
        }
        SymbolCounts { counts }
    }

    pub fn tau(&self) -> TauInfo {
        self.symbol_counts().tau()
    }

    /// Every word of `{0,1,2}^n` in ascending order.
    pub fn full_space(length: usize) -> Result<Code> {
        check_length(length)?;
        let words = (0..POW3[length])
            .map(|v| Codeword::decode_unchecked(length, v))
            .collect();
        Ok(Code::from_sorted_unchecked(length, words))
    }
}

pub(crate) fn can_add_lanes(words: &[Codeword], w: u64) -> bool {
    for (i, a) in words.iter().enumerate() {
        let da = word::differ_mask(a.lanes(), w);
        if da == 0 {
            return false;
        }
        for b in &words[..i] {
            if da & word::differ_mask(b.lanes(), w) & word::differ_mask(a.lanes(), b.lanes()) == 0 {
                return false;
            }
        }
    }
    true
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code(n={}, {{", self.length)?;
        for (i, v) in self.values().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}})")
    }
}

/// `counts[i][j]`: number of words carrying symbol `j` at coordinate `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolCounts {
    pub counts: Vec<[usize; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauInfo {
    pub tau: usize,
    /// Coordinate attaining the maximum pair sum (first in scan order).
    pub coordinate: usize,
    /// The symbol left out of the maximizing pair; `C'` is the residual
    /// `C_{not coordinate:excluded_symbol}`.
    pub excluded_symbol: u8,
}

impl SymbolCounts {
    pub fn length(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, coordinate: usize, symbol: u8) -> usize {
        self.counts[coordinate][symbol as usize]
    }

    /// Largest `s[i][j1] + s[i][j2]` over coordinates and symbol pairs.
    pub fn tau(&self) -> TauInfo {
        let mut best = TauInfo {
            tau: 0,
            coordinate: 0,
            excluded_symbol: 0,
        };
        let mut first = true;
        for (i, row) in self.counts.iter().enumerate() {
            let total: usize = row.iter().sum();
            for excluded in 0..3u8 {
                let pair = total - row[excluded as usize];
                if first || pair > best.tau {
                    best = TauInfo {
                        tau: pair,
                        coordinate: i,
                        excluded_symbol: excluded,
                    };
                    first = false;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const T6_FIRST: [u32; 13] = [0, 13, 26, 113, 231, 285, 385, 389, 399, 410, 545, 582, 694];

    #[test]
    fn t6_code_is_trifferent_with_distance_three() {
        let c = Code::from_values(6, &T6_FIRST).unwrap();
        assert!(c.is_trifferent());
        assert_eq!(c.min_distance().unwrap(), 3);
    }

    #[test]
    fn full_square_not_trifferent() {
        let c = Code::from_values(2, &(0..9).collect::<Vec<_>>()).unwrap();
        assert!(!c.is_trifferent());
        assert!(c.violating_triple().is_some());
    }

    #[test]
    fn tiny_codes_are_trifferent() {
        assert!(Code::empty(3).unwrap().is_trifferent());
        assert!(Code::from_values(3, &[0, 1]).unwrap().is_trifferent());
    }

    #[test]
    fn duplicate_rejected() {
        assert_eq!(
            Code::from_values(2, &[1, 1]),
            Err(TrifError::DuplicateWord(1))
        );
    }

    #[test]
    fn min_distance_needs_two_words() {
        let c = Code::from_values(2, &[4]).unwrap();
        assert_eq!(c.min_distance(), Err(TrifError::TooFewWords(1)));
    }

    #[test]
    fn residual_errors() {
        let c = Code::from_values(1, &[0, 1, 2]).unwrap();
        assert_eq!(
            c.residual_subcode(0, 2),
            Err(TrifError::ResidualOfLengthOne)
        );
        let c = Code::from_values(3, &[0, 1, 2]).unwrap();
        assert!(matches!(
            c.residual_subcode(3, 0),
            Err(TrifError::CoordinateOutOfRange { .. })
        ));
        assert_eq!(c.residual_subcode(0, 3), Err(TrifError::InvalidSymbol(3)));
    }

    #[test]
    fn residual_drops_coordinate() {
        // {000, 001, 002} minus words with symbol 1 at the last coordinate.
        let c = Code::from_values(3, &[0, 1, 2]).unwrap();
        let r = c.residual_subcode(2, 1).unwrap();
        assert_eq!(r.length(), 2);
        // 000 and 002 both collapse to 00.
        assert_eq!(r.values(), vec![0]);
        let r = c.residual_subcode(0, 1).unwrap();
        assert_eq!(r.values(), vec![0, 1, 2]);
    }

    #[test]
    fn symbol_counts_small() {
        let c = Code::from_values(6, &[0, 13, 26]).unwrap();
        let s = c.symbol_counts();
        for i in 0..3 {
            assert_eq!(s.counts[i], [3, 0, 0]);
        }
        for i in 3..6 {
            assert_eq!(s.counts[i], [1, 1, 1]);
        }
        // Rows 0..2 are constant: both pairs containing symbol 0 reach 3.
        let t = s.tau();
        assert_eq!(t.tau, 3);
        assert_eq!(t.coordinate, 0);
        assert_eq!(t.excluded_symbol, 1);

        let single = Code::from_values(4, &[17]).unwrap();
        assert_eq!(single.tau().tau, 1);
    }

    fn random_trifferent(rng: &mut ChaCha8Rng, n: usize, tries: usize) -> Code {
        let mut words: Vec<Codeword> = Vec::new();
        for _ in 0..tries {
            let w = Codeword::decode(n, rng.random_range(0..POW3[n])).unwrap();
            if !words.contains(&w) && can_add_lanes(&words, w.lanes()) {
                words.push(w);
            }
        }
        Code::new(n, words).unwrap()
    }

    #[test]
    fn trifference_is_hereditary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(2..7);
            let c = random_trifferent(&mut rng, n, 60);
            assert!(c.is_trifferent());
            if c.cardinality() == 0 {
                continue;
            }
            let k = rng.random_range(0..=c.cardinality());
            let idx = sample(&mut rng, c.cardinality(), k);
            let sub = Code::new(n, idx.iter().map(|i| c.words()[i]).collect()).unwrap();
            assert!(sub.is_trifferent());
        }
    }

    #[test]
    fn residuals_of_trifferent_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(2..7);
            let c = random_trifferent(&mut rng, n, 80);
            for i in 0..n {
                let mut best_kept = 0;
                for j in 0..3u8 {
                    let r = c.residual_subcode(i, j).unwrap();
                    assert!(r.is_trifferent());
                    let kept = c.words().iter().filter(|w| w.digit(i) != j).count();
                    // Two kept words collapse only if they differ in coordinate i alone.
                    let collapses = c.words().iter().enumerate().any(|(a, x)| {
                        c.words()[a + 1..].iter().any(|y| {
                            x.digit(i) != j
                                && y.digit(i) != j
                                && x.delete_coordinate(i) == y.delete_coordinate(i)
                        })
                    });
                    assert_eq!(r.cardinality() == kept, !collapses);
                    best_kept = best_kept.max(kept);
                }
                assert!(3 * best_kept >= 2 * c.cardinality());
            }
        }
    }

    proptest! {
        #[test]
        fn pair_sums_total_twice_cardinality(n in 1usize..6, vals in proptest::collection::btree_set(0u32..243, 0..30)) {
            let vals: Vec<u32> = vals.into_iter().filter(|&v| u64::from(v) < POW3[n]).collect();
            let c = Code::from_values(n, &vals).unwrap();
            let s = c.symbol_counts();
            for row in &s.counts {
                prop_assert_eq!(row.iter().sum::<usize>(), c.cardinality());
                let pairs = (row[0] + row[1]) + (row[0] + row[2]) + (row[1] + row[2]);
                prop_assert_eq!(pairs, 2 * c.cardinality());
            }
        }

        #[test]
        fn incremental_matches_full(n in 1usize..5, vals in proptest::collection::btree_set(0u32..81, 1..12)) {
            let vals: Vec<u32> = vals.into_iter().filter(|&v| u64::from(v) < POW3[n]).collect();
            prop_assume!(!vals.is_empty());
            let c = Code::from_values(n, &vals).unwrap();
            let (last, rest) = c.words().split_last().unwrap();
            let prefix = Code::new(n, rest.to_vec()).unwrap();
            if prefix.is_trifferent() {
                prop_assert_eq!(prefix.can_add(last), c.is_trifferent());
            }
        }
    }
}
