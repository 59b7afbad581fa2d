//! Linear codes over GF(3): expansion, weight enumerators, minimality and
//! the point multisets of their generator matrices.

pub mod blocking;
pub mod gf3;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::code::Code;
use crate::error::{Result, TrifError};
use crate::word::Codeword;
pub use gf3::Vec3;

/// Largest dimension accepted by the exhaustive routines.
pub const MAX_DIMENSION: usize = 10;

/// Largest dimension for [`minimal_iff_trifferent_check`].
pub const CHECK_MAX_DIMENSION: usize = 6;

/// A full-rank `k x n` matrix over GF(3).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    k: usize,
    n: usize,
    rows: Vec<Vec3>,
}

impl GeneratorMatrix {
    pub fn new(rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if k == 0 || k > MAX_DIMENSION {
            return Err(TrifError::DimensionTooLarge {
                got: k,
                max: MAX_DIMENSION,
            });
        }
        if n == 0 || n > gf3::MAX_LEN {
            return Err(TrifError::InvalidLength {
                got: n,
                max: gf3::MAX_LEN,
            });
        }
        for r in rows {
            if r.len() != n {
                return Err(TrifError::LengthMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            if let Some(&s) = r.iter().find(|&&s| s > 2) {
                return Err(TrifError::InvalidSymbol(s));
            }
        }
        let rows: Vec<Vec3> = rows.iter().map(|r| Vec3::from_digits(r)).collect();
        let rank = gf3::rank(&rows);
        if rank != k {
            return Err(TrifError::RankDeficient { rank, k });
        }
        Ok(GeneratorMatrix { k, n, rows })
    }

    /// One row per line, written as `n` digits. Blank and `#` lines are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let lead = line.len() - line.trim_start().len();
            let mut row = Vec::with_capacity(t.len());
            for (col, ch) in t.chars().enumerate() {
                match ch.to_digit(3) {
                    Some(d) => row.push(d as u8),
                    None => {
                        return Err(TrifError::parse(
                            idx + 1,
                            lead + col + 1,
                            format!("expected a digit 0, 1 or 2, found `{ch}`"),
                        ))
                    }
                }
            }
            if let Some(first) = rows.first() {
                let first: &Vec<u8> = first;
                if row.len() != first.len() {
                    return Err(TrifError::parse(
                        idx + 1,
                        lead + 1,
                        format!("row has {} entries, expected {}", row.len(), first.len()),
                    ));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(TrifError::parse(1, 1, "no rows"));
        }
        Self::new(&rows)
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(|r| r.digits(self.n)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r.get(j)).collect()
    }

    /// All `3^k` codewords, indexed by message vector.
    pub fn codewords(&self) -> Vec<Vec3> {
        let mut out = vec![Vec3::ZERO];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * 3);
            for &c in &out {
                next.push(c);
                next.push(c.add(*row));
                next.push(c.add(row.neg()));
            }
            out = next;
        }
        out
    }

    /// One codeword per nonzero scalar class: those whose first nonzero
    /// message coordinate is 1.
    pub fn projective_codewords(&self) -> Vec<Vec3> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut span = vec![*row];
            for later in &self.rows[i + 1..] {
                span = span
                    .iter()
                    .flat_map(|&c| [c, c.add(*later), c.add(later.neg())])
                    .collect();
            }
            out.extend(span);
        }
        out
    }

    /// The code as a [`Code`]; needs `n <= 20`.
    pub fn expand(&self) -> Result<Code> {
        let words = self
            .codewords()
            .iter()
            .map(|c| Codeword::from_digits(&c.digits(self.n)))
            .collect::<Result<Vec<_>>>()?;
        Code::new(self.n, words)
    }

    pub fn weight_enumerator(&self) -> WeightEnumerator {
        let mut coefficients = BTreeMap::new();
        for c in self.codewords() {
            *coefficients.entry(c.weight() as usize).or_insert(0u64) += 1;
        }
        WeightEnumerator { coefficients }
    }

    pub fn min_distance(&self) -> usize {
        self.projective_codewords()
            .iter()
            .map(|c| c.weight() as usize)
            .min()
            .unwrap_or(0)
    }
}

impl fmt::Display for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            for d in r.digits(self.n) {
                write!(f, "{d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Number of codewords of each Hamming weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightEnumerator {
    pub coefficients: BTreeMap<usize, u64>,
}

impl WeightEnumerator {
    pub fn total(&self) -> u64 {
        self.coefficients.values().sum()
    }

    /// Smallest nonzero weight.
    pub fn min_weight(&self) -> Option<usize> {
        self.coefficients.keys().copied().find(|&w| w > 0)
    }

    pub fn max_weight(&self) -> Option<usize> {
        self.coefficients.keys().copied().rfind(|&w| w > 0)
    }
}

/// Renders as `1+6x^5+8x^6+12x^7`.
impl fmt::Display for WeightEnumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&w, &c) in &self.coefficients {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (w, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{w}")?,
                _ => write!(f, "{c}x^{w}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Outcome of the support-inclusion test. When the code is not minimal,
/// `witness` holds `(u, c)` with `supp(u) ⊆ supp(c)` and `u` not a
/// multiple of `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimality {
    pub minimal: bool,
    pub witness: Option<(Vec<u8>, Vec<u8>)>,
}

pub fn is_minimal_code(g: &GeneratorMatrix) -> Minimality {
    let words = g.projective_codewords();
    for (a, u) in words.iter().enumerate() {
        for (b, c) in words.iter().enumerate() {
            if a != b && u.support() & !c.support() == 0 {
                return Minimality {
                    minimal: false,
                    witness: Some((u.digits(g.n), c.digits(g.n))),
                };
            }
        }
    }
    Minimality {
        minimal: true,
        witness: None,
    }
}

/// Trifference of a linear code from pairs alone: translating a triple by
/// one of its words is a symbol permutation per coordinate, so only
/// triples `{0, u, v}` need checking.
pub fn is_trifferent_linear(g: &GeneratorMatrix) -> bool {
    let words = g.codewords();
    for (a, u) in words.iter().enumerate() {
        if u.is_zero() {
            continue;
        }
        for v in &words[a + 1..] {
            if v.is_zero() {
                continue;
            }
            if (u.ones & v.twos) | (u.twos & v.ones) == 0 {
                return false;
            }
        }
    }
    true
}

/// Whether minimality and trifference agree on `g`. Trifference is taken
/// from [`Code::is_trifferent`] when the length allows it.
pub fn minimal_iff_trifferent_check(g: &GeneratorMatrix) -> Result<bool> {
    if g.k > CHECK_MAX_DIMENSION {
        return Err(TrifError::DimensionTooLarge {
            got: g.k,
            max: CHECK_MAX_DIMENSION,
        });
    }
    let minimal = is_minimal_code(g).minimal;
    let trifferent = match g.expand() {
        Ok(code) => code.is_trifferent(),
        Err(_) => is_trifferent_linear(g),
    };
    Ok(minimal == trifferent)
}

/// `w_max < w_min * 3/2`, a sufficient condition for minimality.
pub fn ashikhmin_barg(w: &WeightEnumerator) -> Result<bool> {
    match (w.min_weight(), w.max_weight()) {
        (Some(lo), Some(hi)) => Ok(2 * hi < 3 * lo),
        _ => Err(TrifError::EmptyEnumerator),
    }
}

/// `d >= 2k - 1`, which every minimal ternary code satisfies.
pub fn min_distance_floor_check(g: &GeneratorMatrix) -> Result<bool> {
    if !is_minimal_code(g).minimal {
        return Err(TrifError::NotMinimal);
    }
    Ok(g.min_distance() + 1 >= 2 * g.k)
}

/// Dual distance at least 2 (no zero column) or 3 (additionally no two
/// proportional columns, i.e. projective).
pub fn dual_distance_at_least(g: &GeneratorMatrix, t: usize) -> Result<bool> {
    if !(2..=3).contains(&t) {
        return Err(TrifError::InvalidDualDistance(t));
    }
    let cols: Vec<Vec3> = (0..g.n).map(|j| Vec3::from_digits(&g.column(j))).collect();
    if cols.iter().any(Vec3::is_zero) {
        return Ok(false);
    }
    if t == 2 {
        return Ok(true);
    }
    let mut points: Vec<Vec3> = cols.iter().map(|c| c.normalized()).collect();
    points.sort_unstable();
    Ok(points.windows(2).all(|w| w[0] != w[1]))
}

/// Compact fixtures, one matrix per file.
pub mod fixtures {
    pub const FOUR2: &str = include_str!("../../data/linear/four2.gen");
    pub const NINE3: &str = include_str!("../../data/linear/nine3.gen");
    pub const FOURTEEN4: [&str; 3] = [
        include_str!("../../data/linear/fourteen4a.gen"),
        include_str!("../../data/linear/fourteen4b.gen"),
        include_str!("../../data/linear/fourteen4c.gen"),
    ];
    pub const NINETEEN5: &str = include_str!("../../data/linear/nineteen5.gen");
    /// The 27 words of the linear length-9 code in code-list format.
    pub const LINEAR_N9: &str = include_str!("../../data/linear/linear_n9.txt");
}
