//! Extension of length-(n-1) trifferent codes to length n.
//!
//! A base `B` of `tau` words receives a last coordinate in `{0,1}` (the
//! filling) and is joined by new words ending in `2`. For a new word `x`
//! the only triples that can fail are `(a, b, x2)` with `a`, `b` in `B`
//! and equal filling, so `x` fixes a graph of base pairs that the filling
//! must split. A set `S` of new words is usable iff the union of these
//! graphs is bipartite, and its usable fillings are the proper
//! 2-colourings. The search runs over `S` in ascending order and keeps the
//! colouring constraints in a union-find with parities.
//!
//! With pruning on, a node is cut when `2*tau - s_ij` drops below the
//! target for some coordinate `i` and symbol `j`, where `s_ij` counts the
//! words already placed. For the last coordinate the counts of `0` and `1`
//! depend on the colouring; a node survives only if some colouring keeps
//! both within the bound.

use std::collections::BTreeMap;
use std::time::Instant;

use dashmap::DashSet;
use serde::Serialize;

use crate::code::Code;
use crate::enumeration::{orderly_generate, GenerateConfig};
use crate::equivalence::canonical_values_lanes;
use crate::error::{Result, TrifError};
use crate::par;
use crate::word::{check_length, differ_mask, lanes_trifferent, Codeword, POW3};

/// Largest base handled by [`extend`]; colouring sums live in a `u128`.
pub const MAX_BASE: usize = 127;

#[derive(Clone, Copy, Debug)]
pub struct ExtendOptions {
    pub prune: bool,
    pub jobs: Option<usize>,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions {
            prune: true,
            jobs: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExtendStats {
    pub bases: u64,
    /// Search nodes, i.e. sets of new words, visited.
    pub nodes: u64,
    /// Nodes cut by the occurrence bound.
    pub pruned: u64,
    /// Codes produced before deduplication.
    pub raw_codes: u64,
}

impl ExtendStats {
    fn add(&mut self, o: &ExtendStats) {
        self.bases += o.bases;
        self.nodes += o.nodes;
        self.pruned += o.pruned;
        self.raw_codes += o.raw_codes;
    }
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub length: usize,
    pub target: usize,
    /// Canonical representatives in ascending order.
    pub codes: Vec<Code>,
    pub stats: ExtendStats,
}

impl Extension {
    /// Classes per cardinality.
    pub fn counts(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for c in &self.codes {
            *out.entry(c.cardinality()).or_default() += 1;
        }
        out
    }
}

/// The occurrence-count bound `#C <= 2*tau - s_ij` over per-coordinate
/// lower bounds on the symbol counts:
/// `min_ij (2*tau - s_ij)`, saturating at zero.
pub fn prune_bound(s_lower: &[[usize; 3]], tau: usize) -> usize {
    s_lower
        .iter()
        .flatten()
        .map(|&s| (2 * tau).saturating_sub(s))
        .min()
        .unwrap_or(2 * tau)
}

fn check_target(base: &Code, target: usize) -> Result<()> {
    let tau = base.cardinality();
    if tau > MAX_BASE {
        return Err(TrifError::BaseTooLarge {
            got: tau,
            max: MAX_BASE,
        });
    }
    let limit = 3 * tau / 2;
    if target > limit {
        return Err(TrifError::TargetTooLarge { target, tau, limit });
    }
    Ok(())
}

/// Extends a single base. Results are canonical, deduplicated and sorted.
pub fn extend(base: &Code, target: usize, prune: bool) -> Result<(Vec<Code>, ExtendStats)> {
    check_length(base.length() + 1)?;
    if base.is_empty() {
        return Ok((Vec::new(), ExtendStats::default()));
    }
    check_target(base, target)?;
    if !base.is_trifferent() {
        return Err(TrifError::NotTrifferent);
    }
    let mut out = Vec::new();
    let stats = Search::new(base, target, prune).run(&mut |v| out.push(v));
    out.sort_unstable();
    out.dedup();
    let n = base.length() + 1;
    let codes = out.iter().map(|v| values_to_code(n, v)).collect();
    Ok((codes, stats))
}

fn values_to_code(n: usize, values: &[u32]) -> Code {
    Code::from_sorted_unchecked(
        n,
        values
            .iter()
            .map(|&v| Codeword::decode_unchecked(n, u64::from(v)))
            .collect(),
    )
}

/// Extends every base whose size allows `target` and merges the classes.
/// Bases with `floor(3*tau/2) < target` are skipped.
pub fn extend_all(bases: &[Code], target: usize, opts: ExtendOptions) -> Result<Extension> {
    let Some(first) = bases.first() else {
        return Err(TrifError::CensusUnavailable(0));
    };
    let m = first.length();
    check_length(m + 1)?;
    for b in bases {
        if b.length() != m {
            return Err(TrifError::LengthMismatch {
                expected: m,
                got: b.length(),
            });
        }
        if !b.is_trifferent() {
            return Err(TrifError::NotTrifferent);
        }
        if b.cardinality() > MAX_BASE {
            return Err(TrifError::BaseTooLarge {
                got: b.cardinality(),
                max: MAX_BASE,
            });
        }
    }
    let usable: Vec<&Code> = bases
        .iter()
        .filter(|b| !b.is_empty() && 3 * b.cardinality() / 2 >= target)
        .collect();
    let found: DashSet<Vec<u32>> = DashSet::new();
    let per_base = par::with_jobs(opts.jobs, || {
        par::map(usable, |b| {
            let mut local = Vec::new();
            let stats = Search::new(b, target, opts.prune).run(&mut |v| local.push(v));
            for v in local {
                found.insert(v);
            }
            stats
        })
    });
    let mut stats = ExtendStats::default();
    for s in &per_base {
        stats.add(s);
    }
    let mut values: Vec<Vec<u32>> = found.into_iter().collect();
    values.sort_unstable();
    let n = m + 1;
    Ok(Extension {
        length: n,
        target,
        codes: values.iter().map(|v| values_to_code(n, v)).collect(),
        stats,
    })
}

/// Checks `l_i >= ceil(2*l_(i+1)/3)` along a threshold chain.
pub fn check_thresholds(thresholds: &[usize]) -> Result<()> {
    if thresholds.len() < 2 {
        return Err(TrifError::InvalidThresholds {
            from: thresholds.first().copied().unwrap_or(0),
            to: 0,
        });
    }
    for w in thresholds.windows(2) {
        if w[0] < (2 * w[1]).div_ceil(3) {
            return Err(TrifError::InvalidThresholds {
                from: w[0],
                to: w[1],
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub length: usize,
    pub target: usize,
    pub counts: BTreeMap<usize, u64>,
    pub stats: ExtendStats,
    pub wall_seconds: f64,
    #[serde(skip)]
    pub codes: Vec<Code>,
}

/// Chains [`extend_all`] from `bases` (all classes of their length with at
/// least `thresholds[0]` words) through the remaining thresholds.
pub fn pipeline_from_bases(
    bases: Vec<Code>,
    thresholds: &[usize],
    opts: ExtendOptions,
) -> Result<Vec<StageReport>> {
    check_thresholds(thresholds)?;
    let mut current: Vec<Code> = bases
        .into_iter()
        .filter(|b| b.cardinality() >= thresholds[0])
        .collect();
    let mut reports = Vec::new();
    for &target in &thresholds[1..] {
        let start = Instant::now();
        let ext = extend_all(&current, target, opts)?;
        reports.push(StageReport {
            length: ext.length,
            target,
            counts: ext.counts(),
            stats: ext.stats,
            wall_seconds: start.elapsed().as_secs_f64(),
            codes: ext.codes.clone(),
        });
        current = ext.codes;
    }
    Ok(reports)
}

/// Generates the bases of length `start_length` by orderly generation and
/// runs [`pipeline_from_bases`].
pub fn staged_pipeline(
    start_length: usize,
    thresholds: &[usize],
    opts: ExtendOptions,
) -> Result<Vec<StageReport>> {
    check_thresholds(thresholds)?;
    let mut cfg = GenerateConfig::new(start_length);
    cfg.min_card = thresholds[0];
    cfg.store_min_card = Some(thresholds[0]);
    cfg.jobs = opts.jobs;
    let census = orderly_generate(&cfg, &|_| {})?;
    pipeline_from_bases(census.stored, thresholds, opts)
}

/// Runs the extension on every residual subcode of `code`.
pub fn residual_seeded_search(
    code: &Code,
    target: usize,
    opts: ExtendOptions,
) -> Result<Extension> {
    if !code.is_trifferent() {
        return Err(TrifError::NotTrifferent);
    }
    let mut bases: Vec<Code> = Vec::new();
    for i in 0..code.length() {
        for j in 0..3 {
            bases.push(crate::equivalence::canonical_form(&code.residual_subcode(i, j)?).canonical);
        }
    }
    bases.sort();
    bases.dedup();
    if bases.iter().all(|b| 3 * b.cardinality() / 2 < target) {
        let n = code.length();
        return Ok(Extension {
            length: n,
            target,
            codes: Vec::new(),
            stats: ExtendStats::default(),
        });
    }
    extend_all(&bases, target, opts)
}

/// Union-find with parities over base words.
#[derive(Clone)]
struct Parity {
    parent: Vec<u8>,
    /// Parity relative to the parent.
    odd: Vec<bool>,
}

impl Parity {
    fn new(tau: usize) -> Self {
        Parity {
            parent: (0..tau as u8).collect(),
            odd: vec![false; tau],
        }
    }

    fn find(&self, mut v: usize) -> (usize, bool) {
        let mut p = false;
        while self.parent[v] as usize != v {
            p ^= self.odd[v];
            v = self.parent[v] as usize;
        }
        (v, p)
    }

    /// Records that `a` and `b` get different colours; false on an odd cycle.
    fn split(&mut self, a: usize, b: usize) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa != pb;
        }
        self.parent[rb] = ra as u8;
        self.odd[rb] = !(pa ^ pb);
        true
    }

    fn consistent(&self, pairs: &[(u8, u8)]) -> bool {
        pairs.iter().all(|&(a, b)| {
            let (ra, pa) = self.find(a as usize);
            let (rb, pb) = self.find(b as usize);
            ra != rb || pa != pb
        })
    }

    /// Per component: the root and the two side sizes.
    fn components(&self) -> (Vec<usize>, Vec<bool>, Vec<(usize, usize, usize)>) {
        let tau = self.parent.len();
        let mut root = vec![0; tau];
        let mut parity = vec![false; tau];
        let mut comps: Vec<(usize, usize, usize)> = Vec::new();
        let mut index = vec![usize::MAX; tau];
        for v in 0..tau {
            let (r, p) = self.find(v);
            if index[r] == usize::MAX {
                index[r] = comps.len();
                comps.push((r, 0, 0));
            }
            let c = &mut comps[index[r]];
            if p {
                c.2 += 1;
            } else {
                c.1 += 1;
            }
            root[v] = index[r];
            parity[v] = p;
        }
        (root, parity, comps)
    }
}

/// Achievable numbers of zeros in the filling, as a bitmask.
fn zero_counts(comps: &[(usize, usize, usize)]) -> u128 {
    let mut reach: u128 = 1;
    for &(_, p, q) in comps {
        reach = (reach << p) | (reach << q);
    }
    reach
}

struct Search<'a> {
    base: &'a Code,
    m: usize,
    tau: usize,
    target: usize,
    prune: bool,
    /// Usable new words: packed lanes and the base pairs they force apart.
    cand: Vec<u64>,
    pairs: Vec<Vec<(u8, u8)>>,
    /// `differ_mask(a, x)` for every base word `a`, per candidate.
    dmask: Vec<Vec<u64>>,
    stats: ExtendStats,
}

struct Frame {
    chosen: Vec<usize>,
    parity: Parity,
    counts: Vec<[usize; 3]>,
}

impl<'a> Search<'a> {
    fn new(base: &'a Code, target: usize, prune: bool) -> Self {
        let m = base.length();
        let tau = base.cardinality();
        let lanes: Vec<u64> = base.words().iter().map(Codeword::lanes).collect();
        let mut pair_masks = Vec::with_capacity(tau * (tau.saturating_sub(1)) / 2);
        for a in 0..tau {
            for b in a + 1..tau {
                pair_masks.push((a as u8, b as u8, differ_mask(lanes[a], lanes[b])));
            }
        }
        let mut cand = Vec::new();
        let mut pairs = Vec::new();
        let mut dmask = Vec::new();
        for v in 0..POW3[m] {
            let x = Codeword::decode_unchecked(m, v).lanes();
            let dx: Vec<u64> = lanes.iter().map(|&a| differ_mask(a, x)).collect();
            let bad: Vec<(u8, u8)> = pair_masks
                .iter()
                .filter(|&&(a, b, d)| d & dx[a as usize] & dx[b as usize] == 0)
                .map(|&(a, b, _)| (a, b))
                .collect();
            let mut p = Parity::new(tau);
            if bad.iter().all(|&(a, b)| p.split(a as usize, b as usize)) {
                cand.push(x);
                pairs.push(bad);
                dmask.push(dx);
            }
        }
        Search {
            base,
            m,
            tau,
            target,
            prune,
            cand,
            pairs,
            dmask,
            stats: ExtendStats {
                bases: 1,
                ..Default::default()
            },
        }
    }

    fn run(mut self, emit: &mut dyn FnMut(Vec<u32>)) -> ExtendStats {
        let counts = self.base.symbol_counts().counts;
        let root = Frame {
            chosen: Vec::new(),
            parity: Parity::new(self.tau),
            counts,
        };
        let remaining: Vec<usize> = (0..self.cand.len())
            .filter(|&k| self.fits(&root.counts, k))
            .collect();
        self.node(&root, &remaining, emit);
        self.stats
    }

    /// Bound for the first `m` coordinates, or none when pruning is off.
    fn cap(&self) -> usize {
        if self.prune {
            (2 * self.tau).saturating_sub(self.target)
        } else {
            usize::MAX
        }
    }

    fn fits(&self, counts: &[[usize; 3]], k: usize) -> bool {
        let cap = self.cap();
        let x = self.cand[k];
        (0..self.m).all(|i| counts[i][((x >> (2 * (self.m - 1 - i))) & 3) as usize] < cap)
    }

    fn node(&mut self, f: &Frame, remaining: &[usize], emit: &mut dyn FnMut(Vec<u32>)) {
        self.stats.nodes += 1;
        let s = f.chosen.len();
        let cap = self.cap();
        let (root, parity, comps) = f.parity.components();
        let reach = zero_counts(&comps);
        // Zeros and ones each at most 2*tau - target, and the new words too.
        let (lo, hi) = if self.prune {
            (self.tau.saturating_sub(cap), cap.min(self.tau))
        } else {
            (0, self.tau)
        };
        let feasible = (lo..=hi).any(|z| reach >> z & 1 == 1);
        if !feasible || s > cap || prune_bound(&f.counts, self.tau) < self.target && self.prune {
            self.stats.pruned += 1;
            return;
        }
        if self.tau + s >= self.target {
            self.emit_colourings(f, &root, &parity, &comps, lo, hi, emit);
        }
        if self.tau + s + remaining.len() < self.target || s + 1 > cap {
            return;
        }
        for (pos, &k) in remaining.iter().enumerate() {
            if self.tau + s + 1 + (remaining.len() - pos - 1) < self.target {
                break;
            }
            let mut parity = f.parity.clone();
            if !self.pairs[k]
                .iter()
                .all(|&(a, b)| parity.split(a as usize, b as usize))
            {
                continue;
            }
            let mut counts = f.counts.clone();
            let x = self.cand[k];
            for (i, row) in counts.iter_mut().enumerate() {
                row[((x >> (2 * (self.m - 1 - i))) & 3) as usize] += 1;
            }
            let dk = &self.dmask[k];
            let next: Vec<usize> = remaining[pos + 1..]
                .iter()
                .copied()
                .filter(|&y| {
                    let cy = self.cand[y];
                    let dxy = differ_mask(x, cy);
                    dk.iter()
                        .zip(&self.dmask[y])
                        .all(|(&a, &b)| a & b & dxy != 0)
                        && f.chosen
                            .iter()
                            .all(|&c| lanes_trifferent(self.cand[c], x, cy))
                        && parity.consistent(&self.pairs[y])
                        && self.fits(&counts, y)
                })
                .collect();
            let mut chosen = f.chosen.clone();
            chosen.push(k);
            let child = Frame {
                chosen,
                parity,
                counts,
            };
            self.node(&child, &next, emit);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn emit_colourings(
        &mut self,
        f: &Frame,
        root: &[usize],
        parity: &[bool],
        comps: &[(usize, usize, usize)],
        lo: usize,
        hi: usize,
        emit: &mut dyn FnMut(Vec<u32>),
    ) {
        let n = self.m + 1;
        let base: Vec<u64> = self.base.words().iter().map(|w| w.lanes() << 2).collect();
        let added: Vec<u64> = f.chosen.iter().map(|&k| (self.cand[k] << 2) | 2).collect();
        let c = comps.len();
        assert!(c < 64, "too many free components");
        let mut words = Vec::with_capacity(base.len() + added.len());
        for choice in 0u64..(1u64 << c) {
            let zeros: usize = comps
                .iter()
                .enumerate()
                .map(|(ci, &(_, p, q))| if choice >> ci & 1 == 0 { p } else { q })
                .sum();
            if zeros < lo || zeros > hi {
                continue;
            }
            words.clear();
            for (v, &w) in base.iter().enumerate() {
                let colour = (choice >> root[v] & 1 == 1) ^ parity[v];
                words.push(w | u64::from(colour));
            }
            words.extend_from_slice(&added);
            words.sort_unstable();
            self.stats.raw_codes += 1;
            emit(canonical_values_lanes(n, &words));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::census;
    use crate::equivalence::canonical_form;
    use std::collections::HashSet;

    fn code(n: usize, v: &[u32]) -> Code {
        Code::from_values(n, v).unwrap()
    }

    /// Every trifferent code of length n built from `base` per the
    /// construction, by brute force over fillings and word sets.
    fn brute(base: &Code, target: usize) -> HashSet<Code> {
        let m = base.length();
        let n = m + 1;
        let tau = base.cardinality();
        let mut out = HashSet::new();
        for fill in 0u32..(1 << tau) {
            let words: Vec<Codeword> = base
                .words()
                .iter()
                .enumerate()
                .map(|(i, w)| w.append((fill >> i & 1) as u8))
                .collect();
            let start = Code::new(n, words.clone()).unwrap();
            if !start.is_trifferent() {
                continue;
            }
            let twos: Vec<Codeword> = (0..POW3[m])
                .map(|v| Codeword::decode_unchecked(m, v).append(2))
                .collect();
            fn rec(
                cur: &mut Vec<Codeword>,
                twos: &[Codeword],
                from: usize,
                n: usize,
                target: usize,
                out: &mut HashSet<Code>,
            ) {
                if cur.len() >= target {
                    out.insert(canonical_form(&Code::new(n, cur.clone()).unwrap()).canonical);
                }
                for i in from..twos.len() {
                    cur.push(twos[i]);
                    if Code::new(n, cur.clone()).unwrap().is_trifferent() {
                        rec(cur, twos, i + 1, n, target, out);
                    }
                    cur.pop();
                }
            }
            let mut cur = words;
            rec(&mut cur, &twos, 0, n, target, &mut out);
        }
        out
    }

    #[test]
    fn prune_bound_examples() {
        assert_eq!(prune_bound(&[[0; 3]; 4], 13), 26);
        assert_eq!(prune_bound(&[[3, 7, 2], [1, 1, 1]], 13), 19);
        assert_eq!(prune_bound(&[], 5), 10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = code(1, &[0, 1, 2]);
        assert!(matches!(
            extend(&b, 5, true),
            Err(TrifError::TargetTooLarge { .. })
        ));
        let bad = code(2, &[0, 1, 4]);
        assert!(matches!(
            extend(&bad, 3, true),
            Err(TrifError::NotTrifferent)
        ));
        assert!(check_thresholds(&[10, 14]).is_ok());
        assert!(check_thresholds(&[9, 14]).is_err());
        assert!(check_thresholds(&[13, 19, 28]).is_ok());
        assert!(check_thresholds(&[19]).is_err());
    }

    #[test]
    fn length_one_base_reaches_t2() {
        let (codes, _) = extend(&code(1, &[0, 1, 2]), 4, true).unwrap();
        let t2 = census(2).unwrap();
        assert!(codes.iter().any(|c| c.cardinality() == 4));
        assert_eq!(
            codes.iter().filter(|c| c.cardinality() == 4).count() as u64,
            t2.count(4)
        );
    }

    #[test]
    fn unpruned_matches_brute_force() {
        let mut bases = census_codes(2, 3);
        bases.extend(census_codes(3, 4).into_iter().step_by(2));
        bases.push(code(3, &[0, 13, 26]));
        for b in &bases {
            let target = b.cardinality();
            let (codes, _) = extend(b, target, false).unwrap();
            let got: HashSet<Code> = codes.into_iter().collect();
            assert_eq!(got, brute(b, target), "base {:?}", b.values());
        }
    }

    #[test]
    fn pruned_results_are_subset_with_larger_tau() {
        for b in census_codes(3, 4) {
            let target = (3 * b.cardinality() / 2).min(b.cardinality() + 1);
            let (on, _) = extend(&b, target, true).unwrap();
            let (off, _) = extend(&b, target, false).unwrap();
            let on: HashSet<_> = on.into_iter().collect();
            for c in &off {
                if !on.contains(c) {
                    assert!(c.tau().tau > b.cardinality());
                }
            }
            assert!(on.iter().all(|c| off.contains(c)));
        }
    }

    fn census_codes(n: usize, min: usize) -> Vec<Code> {
        let mut cfg = GenerateConfig::new(n);
        cfg.min_card = min;
        cfg.store_min_card = Some(min);
        orderly_generate(&cfg, &|_| {}).unwrap().stored
    }

    #[test]
    fn pipeline_matches_census() {
        // Every class of length n and size >= l1 from all classes of
        // length n-1 and size >= ceil(2*l1/3).
        for (n, l1) in [(3usize, 4usize), (4, 5), (4, 6), (5, 7), (5, 8)] {
            let l0 = (2 * l1).div_ceil(3);
            let full = census(n).unwrap();
            for prune in [true, false] {
                let reports = pipeline_from_bases(
                    census_codes(n - 1, l0),
                    &[l0, l1],
                    ExtendOptions { prune, jobs: None },
                )
                .unwrap();
                let r = &reports[0];
                for l in l1..=full.max_cardinality() + 1 {
                    assert_eq!(
                        r.counts.get(&l).copied().unwrap_or(0),
                        full.count(l),
                        "n={n} l={l} prune={prune}"
                    );
                }
                for c in &r.codes {
                    assert!(c.is_trifferent());
                    assert!(canonical_form(c).is_input_canonical);
                }
            }
        }
    }

    #[test]
    fn extremal_length5_from_pipeline() {
        let reports =
            pipeline_from_bases(census_codes(4, 7), &[7, 10], ExtendOptions::default()).unwrap();
        let got: Vec<Vec<u32>> = reports[0].codes.iter().map(Code::values).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 1, 41, 80, 98, 128, 140, 185, 197, 227],
                vec![0, 4, 11, 34, 101, 142, 209, 232, 239, 240],
                vec![0, 4, 38, 79, 97, 131, 132, 137, 182, 196],
                vec![0, 4, 38, 79, 97, 131, 137, 182, 196, 230],
                vec![0, 4, 38, 79, 97, 131, 137, 182, 196, 231],
            ]
        );
    }

    #[test]
    fn residual_search_degenerate() {
        let r = residual_seeded_search(&code(3, &[0, 13]), 2, ExtendOptions::default()).unwrap();
        assert!(r
            .codes
            .iter()
            .all(|c| c.cardinality() >= 2 && c.length() == 3));
        let r = residual_seeded_search(&code(3, &[0, 13]), 9, ExtendOptions::default()).unwrap();
        assert!(r.codes.is_empty());
    }
}
