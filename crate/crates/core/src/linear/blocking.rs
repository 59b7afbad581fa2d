//! Point multisets in PG(k-1,3) and strong blocking sets.
//!
//! A point is a nonzero vector scaled so that its first nonzero entry is 1.
//! Hyperplanes are represented the same way by their normal vectors.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gf3::{rank, Vec3};
use super::{GeneratorMatrix, MAX_DIMENSION};
use crate::error::{Result, TrifError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMultiset {
    k: usize,
    /// Normalized digits and multiplicity.
    points: BTreeMap<Vec<u8>, usize>,
}

fn normalize(digits: &[u8]) -> Option<Vec<u8>> {
    let first = *digits.iter().find(|&&d| d != 0)?;
    Some(digits.iter().map(|&d| d * first % 3).collect())
}

fn check_dimension(k: usize) -> Result<()> {
    if k < 2 {
        return Err(TrifError::DimensionTooSmall(k));
    }
    if k > MAX_DIMENSION {
        return Err(TrifError::DimensionTooLarge {
            got: k,
            max: MAX_DIMENSION,
        });
    }
    Ok(())
}

/// All normalized nonzero vectors of length `k`, in lexicographic order.
fn projective_points(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for v in 1..3usize.pow(k as u32) {
        let mut digits = vec![0u8; k];
        let mut x = v;
        for d in digits.iter_mut().rev() {
            *d = (x % 3) as u8;
            x /= 3;
        }
        if digits.iter().find(|&&d| d != 0) == Some(&1) {
            out.push(digits);
        }
    }
    out
}

impl PointMultiset {
    pub fn new(k: usize, points: &[Vec<u8>]) -> Result<Self> {
        check_dimension(k)?;
        let mut map = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if p.len() != k {
                return Err(TrifError::LengthMismatch {
                    expected: k,
                    got: p.len(),
                });
            }
            if let Some(&s) = p.iter().find(|&&s| s > 2) {
                return Err(TrifError::InvalidSymbol(s));
            }
            let n = normalize(p).ok_or(TrifError::ZeroColumn(i))?;
            *map.entry(n).or_insert(0) += 1;
        }
        Ok(PointMultiset { k, points: map })
    }

    /// Every point of PG(k-1,3) once.
    pub fn all_points(k: usize) -> Result<Self> {
        check_dimension(k)?;
        Ok(PointMultiset {
            k,
            points: projective_points(k).into_iter().map(|p| (p, 1)).collect(),
        })
    }

    /// One point per line as `k` digits; `#` lines and blank lines are
    /// skipped. Points are normalized, repeats raise the multiplicity.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        check_dimension(k)?;
        let mut points = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let lead = line.len() - line.trim_start().len();
            let mut p = Vec::with_capacity(k);
            for (col, ch) in t.chars().enumerate() {
                let d = ch.to_digit(3).ok_or_else(|| {
                    TrifError::parse(
                        idx + 1,
                        lead + col + 1,
                        format!("expected 0, 1 or 2, found `{ch}`"),
                    )
                })?;
                p.push(d as u8);
            }
            if p.len() != k {
                return Err(TrifError::parse(
                    idx + 1,
                    lead + 1,
                    format!("point has {} coordinates, expected {k}", p.len()),
                ));
            }
            if p.iter().all(|&d| d == 0) {
                return Err(TrifError::parse(
                    idx + 1,
                    lead + 1,
                    "the zero vector is not a point",
                ));
            }
            points.push(p);
        }
        Self::new(k, &points)
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// Total size counting multiplicity.
    pub fn len(&self) -> usize {
        self.points.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distinct(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> impl Iterator<Item = (&[u8], usize)> {
        self.points.iter().map(|(p, &m)| (p.as_slice(), m))
    }

    /// Every line of the plane meets the set in at least `t` points
    /// (counting multiplicity). Only meaningful for `k = 3`.
    pub fn min_hyperplane_intersection(&self) -> usize {
        hyperplanes(self.k)
            .iter()
            .map(|h| {
                self.points
                    .iter()
                    .filter(|(p, _)| Vec3::from_digits(p).dot(h) == 0)
                    .map(|(_, &m)| m)
                    .sum()
            })
            .min()
            .unwrap_or(0)
    }

    /// The generator matrix whose columns are the points, in order.
    pub fn generator_matrix(&self) -> Result<GeneratorMatrix> {
        let cols: Vec<&Vec<u8>> = self
            .points
            .iter()
            .flat_map(|(p, &m)| std::iter::repeat_n(p, m))
            .collect();
        let rows: Vec<Vec<u8>> = (0..self.k)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        GeneratorMatrix::new(&rows)
    }

    fn remove_one(&mut self, p: &[u8]) {
        if let Some(m) = self.points.get_mut(p) {
            *m -= 1;
            if *m == 0 {
                self.points.remove(p);
            }
        }
    }
}

impl fmt::Display for PointMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, &m) in &self.points {
            for _ in 0..m {
                for d in p {
                    write!(f, "{d}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

fn hyperplanes(k: usize) -> Vec<Vec3> {
    projective_points(k)
        .iter()
        .map(|p| Vec3::from_digits(p))
        .collect()
}

/// The points of the columns of `g`. Zero columns are rejected.
pub fn points_of(g: &GeneratorMatrix) -> Result<PointMultiset> {
    let cols: Vec<Vec<u8>> = (0..g.length()).map(|j| g.column(j)).collect();
    PointMultiset::new(g.dimension(), &cols)
}

/// For every hyperplane `H`, the points in `H` span `H`.
pub fn is_strong_blocking(m: &PointMultiset) -> bool {
    let pts: Vec<Vec3> = m.points.keys().map(|p| Vec3::from_digits(p)).collect();
    hyperplanes(m.k).iter().all(|h| {
        let inside: Vec<Vec3> = pts.iter().copied().filter(|p| p.dot(h) == 0).collect();
        rank(&inside) == m.k - 1
    })
}

/// Removes random removable points (one copy at a time) until no single
/// removal keeps the set strong blocking.
pub fn greedy_point_removal(m: &PointMultiset, seed: u64) -> Result<PointMultiset> {
    if !is_strong_blocking(m) {
        return Err(TrifError::NotStrongBlocking);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = m.clone();
    loop {
        let removable: Vec<Vec<u8>> = cur
            .points
            .iter()
            .filter(|(p, &mult)| {
                mult > 1 || {
                    let mut t = cur.clone();
                    t.remove_one(p);
                    is_strong_blocking(&t)
                }
            })
            .map(|(p, _)| p.clone())
            .collect();
        let Some(p) = removable.choose(&mut rng) else {
            return Ok(cur);
        };
        cur.remove_one(&p.clone());
    }
}
