//! Code equivalence: coordinate permutations combined with an independent
//! permutation of `{0,1,2}` in every coordinate. Word order is immaterial.
//!
//! The canonical representative of a class is the matrix (words as columns,
//! columns sorted) that is lexicographically smallest when read column by
//! column. Equivalently: the smallest sorted list of encodings.
//!
//! [`canonical_form`] builds that matrix one column at a time. A search state
//! is a partial assignment of symbol maps; rows are kept ordered by the row
//! strings built so far, and only rows with identical strings remain
//! interchangeable. For the next column every state tries every unused word,
//! each row takes the smallest symbol its map allows, and the rows of each
//! still-tied group are sorted. All (state, word) pairs reaching the smallest
//! column value survive; everything else is cut. After the last column the
//! surviving states are exactly the group elements mapping the input onto its
//! representative, up to swaps of identical rows and completions of symbol
//! maps on unused symbols, which gives the stabilizer order.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::code::Code;
use crate::error::{Result, TrifError};
use crate::word::{Codeword, MAX_LENGTH};

/// The six permutations of `{0,1,2}`, as images of 0, 1, 2.
pub const SYMBOL_PERMUTATIONS: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    /// Coordinate `i` of a word moves to coordinate `row_perm[i]`.
    row_perm: Vec<usize>,
    /// Symbol map applied to coordinate `i` before it moves.
    symbol_perms: Vec<[u8; 3]>,
}

impl GroupElement {
    pub fn new(row_perm: Vec<usize>, symbol_perms: Vec<[u8; 3]>) -> Result<Self> {
        let n = row_perm.len();
        if symbol_perms.len() != n {
            return Err(TrifError::InvalidGroupElement(format!(
                "{} rows but {} symbol permutations",
                n,
                symbol_perms.len()
            )));
        }
        let mut seen = vec![false; n];
        for &r in &row_perm {
            if r >= n || seen[r] {
                return Err(TrifError::InvalidGroupElement(
                    "row map is not a permutation".into(),
                ));
            }
            seen[r] = true;
        }
        for p in &symbol_perms {
            let mut s = *p;
            s.sort_unstable();
            if s != [0, 1, 2] {
                return Err(TrifError::InvalidGroupElement(format!(
                    "{p:?} is not a permutation of {{0,1,2}}"
                )));
            }
        }
        Ok(GroupElement {
            row_perm,
            symbol_perms,
        })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            row_perm: (0..n).collect(),
            symbol_perms: vec![[0, 1, 2]; n],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut row_perm: Vec<usize> = (0..n).collect();
        row_perm.shuffle(rng);
        let symbol_perms = (0..n)
            .map(|_| SYMBOL_PERMUTATIONS[rng.random_range(0..6)])
            .collect();
        GroupElement {
            row_perm,
            symbol_perms,
        }
    }

    pub fn length(&self) -> usize {
        self.row_perm.len()
    }

    pub fn row_perm(&self) -> &[usize] {
        &self.row_perm
    }

    pub fn symbol_perms(&self) -> &[[u8; 3]] {
        &self.symbol_perms
    }

    pub fn apply_word(&self, w: &Codeword) -> Codeword {
        let n = self.length();
        let mut digits = [0u8; MAX_LENGTH];
        for i in 0..n {
            digits[self.row_perm[i]] = self.symbol_perms[i][w.digit(i) as usize];
        }
        Codeword::from_digits(&digits[..n]).expect("valid digits")
    }

    /// Order of the whole group for length `n`: `n! * 6^n`.
    pub fn group_order(n: usize) -> u128 {
        (1..=n as u128).product::<u128>() * 6u128.pow(n as u32)
    }
}

pub fn apply(g: &GroupElement, code: &Code) -> Result<Code> {
    if g.length() != code.length() {
        return Err(TrifError::LengthMismatch {
            expected: code.length(),
            got: g.length(),
        });
    }
    let words = code.words().iter().map(|w| g.apply_word(w)).collect();
    Code::new(code.length(), words)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalResult {
    pub canonical: Code,
    pub is_input_canonical: bool,
    /// Number of group elements `g` with `sorted(g * input) = canonical`,
    /// i.e. the order of the input's stabilizer.
    pub stabilizer_order: u128,
}

pub fn canonical_form(code: &Code) -> CanonicalResult {
    canonical_form_with_map(code).0
}

/// Canonical form together with one element `g` such that
/// `apply(g, code) == canonical`.
pub fn canonical_form_with_map(code: &Code) -> (CanonicalResult, GroupElement) {
    let mut engine = Engine::new(code);
    let Outcome::Complete { values } = engine.run(None) else {
        unreachable!("full search always completes")
    };
    let words = values
        .iter()
        .map(|&v| Codeword::decode_unchecked(code.length(), v))
        .collect();
    let canonical = Code::from_sorted_unchecked(code.length(), words);
    let result = CanonicalResult {
        is_input_canonical: canonical == *code,
        canonical,
        stabilizer_order: engine.stabilizer_order(),
    };
    (result, engine.witness())
}

/// Accept/reject only: stops as soon as some branch beats the input.
pub fn is_canonical(code: &Code) -> bool {
    let targets: Vec<u64> = code.values().iter().map(|&v| u64::from(v)).collect();
    let mut engine = Engine::new(code);
    matches!(engine.run(Some(&targets)), Outcome::Complete { .. })
}

/// [`is_canonical`] on ascending packed words.
pub(crate) fn is_canonical_lanes(n: usize, lanes: &[u64]) -> bool {
    let targets: Vec<u64> = lanes
        .iter()
        .map(|&w| u64::from(Codeword::from_lanes(n, w).encode()))
        .collect();
    let mut engine = Engine::from_lanes(n, lanes);
    matches!(engine.run(Some(&targets)), Outcome::Complete { .. })
}

/// Encodings of the canonical form of ascending packed words.
pub(crate) fn canonical_values_lanes(n: usize, lanes: &[u64]) -> Vec<u32> {
    let mut engine = Engine::from_lanes(n, lanes);
    let Outcome::Complete { values } = engine.run(None) else {
        unreachable!("full search always completes")
    };
    values.into_iter().map(|v| v as u32).collect()
}

/// Whether two codes lie in the same orbit.
pub fn equivalent(a: &Code, b: &Code) -> bool {
    a.length() == b.length()
        && a.cardinality() == b.cardinality()
        && canonical_form(a).canonical == canonical_form(b).canonical
}

const UNSET: u8 = 3;

/// Smallest target symbol not in a 3-bit used mask.
const LOWEST_FREE: [u8; 8] = [0, 1, 0, 2, 0, 1, 0, UNSET];

#[derive(Clone, Copy)]
struct Frame {
    sigma: [[u8; 3]; MAX_LENGTH],
    used: [u8; MAX_LENGTH],
    rank: [u8; MAX_LENGTH],
}

enum Outcome {
    Complete { values: Vec<u64> },
    Beaten,
}

struct Engine {
    n: usize,
    l: usize,
    cols: Vec<[u8; MAX_LENGTH]>,
    stride: usize,
    frames: Vec<Frame>,
    chosen: Vec<u64>,
    next_frames: Vec<Frame>,
    next_chosen: Vec<u64>,
    hits: Vec<(u32, u32)>,
}

impl Engine {
    fn new(code: &Code) -> Self {
        let lanes: Vec<u64> = code.words().iter().map(Codeword::lanes).collect();
        Self::from_lanes(code.length(), &lanes)
    }

    fn from_lanes(n: usize, lanes: &[u64]) -> Self {
        let l = lanes.len();
        let cols = lanes
            .iter()
            .map(|&w| {
                let mut c = [0u8; MAX_LENGTH];
                for (i, d) in c.iter_mut().enumerate().take(n) {
                    *d = ((w >> (2 * (n - 1 - i))) & 3) as u8;
                }
                c
            })
            .collect();
        let stride = l.div_ceil(64).max(1);
        Engine {
            n,
            l,
            cols,
            stride,
            frames: vec![Frame {
                sigma: [[UNSET; 3]; MAX_LENGTH],
                used: [0; MAX_LENGTH],
                rank: [0; MAX_LENGTH],
            }],
            chosen: vec![0; stride],
            next_frames: Vec::new(),
            next_chosen: Vec::new(),
            hits: Vec::new(),
        }
    }

    /// Column value of word `w` under the best completion of `frame`.
    #[inline]
    fn column_value(&self, frame: &Frame, w: usize) -> u64 {
        let col = &self.cols[w];
        let n = self.n;
        let mut keys = [0u8; MAX_LENGTH];
        for i in 0..n {
            let mapped = frame.sigma[i][col[i] as usize];
            let d = if mapped != UNSET {
                mapped
            } else {
                LOWEST_FREE[frame.used[i] as usize]
            };
            let key = frame.rank[i] * 3 + d;
            // insertion sort, n <= 20
            let mut j = i;
            while j > 0 && keys[j - 1] > key {
                keys[j] = keys[j - 1];
                j -= 1;
            }
            keys[j] = key;
        }
        let mut v = 0u64;
        for &k in &keys[..n] {
            v = v * 3 + u64::from(k % 3);
        }
        v
    }

    fn extend_frame(&self, frame: &Frame, w: usize) -> Frame {
        let col = &self.cols[w];
        let mut out = *frame;
        let mut keys = [0u8; MAX_LENGTH];
        let mut present = 0u64;
        for i in 0..self.n {
            let s = col[i] as usize;
            if out.sigma[i][s] == UNSET {
                let t = LOWEST_FREE[out.used[i] as usize];
                out.sigma[i][s] = t;
                out.used[i] |= 1 << t;
            }
            let key = out.rank[i] * 3 + out.sigma[i][s];
            keys[i] = key;
            present |= 1u64 << key;
        }
        for i in 0..self.n {
            out.rank[i] = (present & ((1u64 << keys[i]) - 1)).count_ones() as u8;
        }
        out
    }

    fn run(&mut self, targets: Option<&[u64]>) -> Outcome {
        let mut values = Vec::with_capacity(self.l);
        for step in 0..self.l {
            let mut best = u64::MAX;
            self.hits.clear();
            for s in 0..self.frames.len() {
                let frame = self.frames[s];
                let bits = &self.chosen[s * self.stride..(s + 1) * self.stride];
                for w in 0..self.l {
                    if bits[w / 64] >> (w % 64) & 1 == 1 {
                        continue;
                    }
                    let v = self.column_value(&frame, w);
                    if let Some(t) = targets {
                        if v < t[step] {
                            return Outcome::Beaten;
                        }
                    }
                    if v < best {
                        best = v;
                        self.hits.clear();
                    }
                    if v == best {
                        self.hits.push((s as u32, w as u32));
                    }
                }
            }
            self.next_frames.clear();
            self.next_chosen.clear();
            for &(s, w) in &self.hits {
                let (s, w) = (s as usize, w as usize);
                let f = self.extend_frame(&self.frames[s], w);
                self.next_frames.push(f);
                let start = self.next_chosen.len();
                self.next_chosen
                    .extend_from_slice(&self.chosen[s * self.stride..(s + 1) * self.stride]);
                self.next_chosen[start + w / 64] |= 1u64 << (w % 64);
            }
            std::mem::swap(&mut self.frames, &mut self.next_frames);
            std::mem::swap(&mut self.chosen, &mut self.next_chosen);
            values.push(best);
        }
        Outcome::Complete { values }
    }

    /// One group element realizing the final state: tied rows keep their
    /// input order and unused symbols are completed in ascending order.
    fn witness(&self) -> GroupElement {
        let frame = &self.frames[0];
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&i| frame.rank[i]);
        let mut row_perm = vec![0; self.n];
        for (pos, &i) in order.iter().enumerate() {
            row_perm[i] = pos;
        }
        let symbol_perms = (0..self.n)
            .map(|i| {
                let mut p = frame.sigma[i];
                let mut used = frame.used[i];
                for t in p.iter_mut() {
                    if *t == UNSET {
                        *t = LOWEST_FREE[used as usize];
                        used |= 1 << *t;
                    }
                }
                p
            })
            .collect();
        GroupElement {
            row_perm,
            symbol_perms,
        }
    }

    fn stabilizer_order(&self) -> u128 {
        let frame = &self.frames[0];
        let mut factor: u128 = 1;
        let mut group_sizes = [0u32; MAX_LENGTH];
        for i in 0..self.n {
            group_sizes[frame.rank[i] as usize] += 1;
            // Unused symbols of a row may be mapped in any order.
            factor *= match frame.used[i].count_ones() {
                0 => 6,
                1 => 2,
                _ => 1,
            };
        }
        for &g in &group_sizes[..self.n] {
            factor *= (1..=u128::from(g)).product::<u128>();
        }
        self.frames.len() as u128 * factor
    }
}

/// Largest length accepted by [`orbit_oracle`].
pub const ORACLE_MAX_LENGTH: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub canonical: Code,
    pub stabilizer_order: u128,
    pub orbit_size: usize,
}

/// Applies every group element explicitly and keeps the smallest sorted
/// image. Independent of [`canonical_form`]; used to check it.
pub fn orbit_oracle(code: &Code) -> Result<OracleResult> {
    let n = code.length();
    if n > ORACLE_MAX_LENGTH {
        return Err(TrifError::OracleTooLarge {
            got: n,
            max: ORACLE_MAX_LENGTH,
        });
    }
    let mut best: Option<Vec<u32>> = None;
    let mut hits: u128 = 0;
    let mut images = std::collections::HashSet::new();
    let n_sym = 6usize.pow(n as u32);
    for row_perm in permutations(n) {
        for mut idx in 0..n_sym {
            let mut perms = Vec::with_capacity(n);
            for _ in 0..n {
                perms.push(SYMBOL_PERMUTATIONS[idx % 6]);
                idx /= 6;
            }
            let g = GroupElement {
                row_perm: row_perm.clone(),
                symbol_perms: perms,
            };
            let mut image: Vec<u32> = code
                .words()
                .iter()
                .map(|w| g.apply_word(w).encode())
                .collect();
            image.sort_unstable();
            match &best {
                Some(b) if image > *b => {}
                Some(b) if image == *b => hits += 1,
                _ => {
                    best = Some(image.clone());
                    hits = 1;
                }
            }
            images.insert(image);
        }
    }
    let best = best.unwrap_or_default();
    Ok(OracleResult {
        canonical: Code::from_values(n, &best)?,
        stabilizer_order: hits,
        orbit_size: images.len(),
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
