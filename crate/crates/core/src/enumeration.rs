//! Orderly generation of trifferent codes up to equivalence.
//!
//! A node of the search tree is a canonical trifferent code. Its children
//! append one word larger than every word present and are kept when the
//! result is trifferent and canonical. Canonical forms are closed under
//! removing the largest word, so every class is reached exactly once.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::code::Code;
use crate::equivalence::{canonical_form, is_canonical_lanes};
use crate::error::{Result, TrifError};
use crate::par;
use crate::word::{check_length, lanes_distance, lanes_trifferent, Codeword, POW3};

#[derive(Clone, Debug)]
pub struct GenerateConfig {
    pub length: usize,
    pub min_card: usize,
    pub max_card: usize,
    /// Classes with at least this many words are kept in
    /// [`CensusTable::stored`].
    pub store_min_card: Option<usize>,
    /// Subtrees rooted at this cardinality are the unit of parallel work
    /// and of checkpointing.
    pub split_card: usize,
    pub jobs: Option<usize>,
    pub checkpoint: Option<PathBuf>,
}

impl GenerateConfig {
    pub fn new(length: usize) -> Self {
        GenerateConfig {
            length,
            min_card: 1,
            max_card: usize::MAX,
            store_min_card: None,
            split_card: 4,
            jobs: None,
            checkpoint: None,
        }
    }
}

/// Class counts a(n,l), plus the number of classes per (l, d) where d is
/// the minimum distance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub length: usize,
    pub min_card: usize,
    pub max_card: usize,
    pub counts: BTreeMap<usize, u64>,
    pub distances: BTreeMap<usize, BTreeMap<usize, u64>>,
    /// False when some class at `max_card` had children that were not
    /// explored.
    pub exhausted: bool,
    #[serde(skip)]
    pub stored: Vec<Code>,
}

impl CensusTable {
    fn empty(cfg: &GenerateConfig) -> Self {
        CensusTable {
            length: cfg.length,
            min_card: cfg.min_card,
            max_card: cfg.max_card,
            exhausted: true,
            ..Default::default()
        }
    }

    pub fn count(&self, l: usize) -> u64 {
        self.counts.get(&l).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Largest cardinality with at least one class.
    pub fn max_cardinality(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    fn record(&mut self, l: usize, d: Option<usize>) {
        *self.counts.entry(l).or_default() += 1;
        if let Some(d) = d {
            *self.distances.entry(l).or_default().entry(d).or_default() += 1;
        }
    }

    fn merge(&mut self, other: CensusTable) {
        for (l, c) in other.counts {
            *self.counts.entry(l).or_default() += c;
        }
        for (l, row) in other.distances {
            let mine = self.distances.entry(l).or_default();
            for (d, c) in row {
                *mine.entry(d).or_default() += c;
            }
        }
        self.exhausted &= other.exhausted;
        self.stored.extend(other.stored);
    }

    /// Two tab-separated lines: the cardinalities, then `n` and the counts.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\\l");
        for l in self.counts.keys() {
            out.push_str(&format!("\t{l}"));
        }
        out.push_str(&format!("\n{}", self.length));
        for c in self.counts.values() {
            out.push_str(&format!("\t{c}"));
        }
        out.push('\n');
        out
    }
}

/// One search node: words as packed lanes in ascending order, the words
/// that may still be appended, and the current minimum distance.
#[derive(Clone)]
struct Node {
    words: Vec<u64>,
    cand: Vec<u64>,
    dmin: Option<u32>,
}

impl Node {
    fn root(n: usize) -> Self {
        Node {
            words: Vec::new(),
            cand: (0..POW3[n])
                .map(|v| Codeword::decode_unchecked(n, v).lanes())
                .collect(),
            dmin: None,
        }
    }

    /// The child appending `cand[k]`, if it is canonical.
    fn child(&self, n: usize, k: usize) -> Option<Node> {
        let w = self.cand[k];
        let mut dmin = self.dmin;
        for &x in &self.words {
            let d = lanes_distance(x, w);
            // A smaller distance would change the second canonical word.
            if self.dmin.is_some_and(|p| d < p) {
                return None;
            }
            dmin = Some(dmin.map_or(d, |m| m.min(d)));
        }
        let mut words = self.words.clone();
        words.push(w);
        if !is_canonical_lanes(n, &words) {
            return None;
        }
        let cand = self.cand[k + 1..]
            .iter()
            .copied()
            .filter(|&y| self.words.iter().all(|&x| lanes_trifferent(x, w, y)))
            .collect();
        Some(Node { words, cand, dmin })
    }

    fn code(&self, n: usize) -> Code {
        Code::from_sorted_unchecked(
            n,
            self.words
                .iter()
                .map(|&l| Codeword::from_lanes(n, l))
                .collect(),
        )
    }
}

struct Walk<'a> {
    cfg: &'a GenerateConfig,
    sink: &'a (dyn Fn(&Code) + Sync),
}

impl Walk<'_> {
    fn visit(&self, node: &Node, table: &mut CensusTable) {
        let l = node.words.len();
        let cfg = self.cfg;
        if l >= cfg.min_card && l <= cfg.max_card && l > 0 {
            table.record(l, node.dmin.map(|d| d as usize));
            if cfg.store_min_card.is_some_and(|s| l >= s) {
                table.stored.push(node.code(cfg.length));
            }
            (self.sink)(&node.code(cfg.length));
        }
    }

    /// Full depth-first walk below `node` (which is visited first).
    fn subtree(&self, node: &Node, table: &mut CensusTable) {
        self.visit(node, table);
        let l = node.words.len();
        if l + node.cand.len() < self.cfg.min_card {
            return;
        }
        if l >= self.cfg.max_card {
            if !node.cand.is_empty() && self.has_child(node) {
                table.exhausted = false;
            }
            return;
        }
        for k in 0..node.cand.len() {
            if let Some(child) = node.child(self.cfg.length, k) {
                self.subtree(&child, table);
            }
        }
    }

    fn has_child(&self, node: &Node) -> bool {
        (0..node.cand.len()).any(|k| node.child(self.cfg.length, k).is_some())
    }

    /// Walks down to `split_card`, visiting shallower nodes and returning
    /// the nodes at the split level.
    fn roots(&self, node: Node, table: &mut CensusTable, out: &mut Vec<Node>) {
        let l = node.words.len();
        if l >= self.cfg.split_card || l >= self.cfg.max_card {
            out.push(node);
            return;
        }
        self.visit(&node, table);
        if l + node.cand.len() < self.cfg.min_card {
            return;
        }
        for k in 0..node.cand.len() {
            if let Some(child) = node.child(self.cfg.length, k) {
                self.roots(child, table, out);
            }
        }
    }
}

/// Visits every class of trifferent codes of length `cfg.length` with
/// `min_card <= l <= max_card` exactly once, as its canonical
/// representative, and tallies the result.
pub fn orderly_generate(
    cfg: &GenerateConfig,
    sink: &(dyn Fn(&Code) + Sync),
) -> Result<CensusTable> {
    check_length(cfg.length)?;
    let walk = Walk { cfg, sink };
    let mut table = CensusTable::empty(cfg);
    let mut roots = Vec::new();
    walk.roots(Node::root(cfg.length), &mut table, &mut roots);

    let store = match &cfg.checkpoint {
        Some(dir) => Some(Checkpoint::open(dir, cfg, roots.len())?),
        None => None,
    };
    let indexed: Vec<(usize, Node)> = roots.into_iter().enumerate().collect();
    let parts = par::with_jobs(cfg.jobs, || {
        par::map(indexed, |(idx, root)| -> Result<CensusTable> {
            if let Some(store) = &store {
                if let Some(done) = store.load(idx)? {
                    for code in &done.stored {
                        sink(code);
                    }
                    return Ok(done);
                }
            }
            let mut part = CensusTable::empty(cfg);
            walk.subtree(&root, &mut part);
            if let Some(store) = &store {
                store.save(idx, &part)?;
            }
            Ok(part)
        })
    });
    for part in parts {
        table.merge(part?);
    }
    Ok(table)
}

/// Completed subtrees on disk, one JSON file per root index.
struct Checkpoint {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CheckpointMeta {
    length: usize,
    min_card: usize,
    max_card: usize,
    store_min_card: Option<usize>,
    split_card: usize,
    roots: usize,
}

#[derive(Serialize, Deserialize)]
struct CheckpointPart {
    table: CensusTable,
    stored: Vec<Vec<u32>>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> TrifError {
    TrifError::Checkpoint(format!("{}: {e}", path.display()))
}

impl Checkpoint {
    fn open(dir: &Path, cfg: &GenerateConfig, roots: usize) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let meta = CheckpointMeta {
            length: cfg.length,
            min_card: cfg.min_card,
            max_card: cfg.max_card,
            store_min_card: cfg.store_min_card,
            split_card: cfg.split_card,
            roots,
        };
        let meta_json = serde_json::to_string_pretty(&meta).map_err(|e| io_err(dir, e))?;
        let path = dir.join("meta.json");
        match fs::read_to_string(&path) {
            Ok(existing) if existing == meta_json => {}
            Ok(_) => {
                return Err(TrifError::Checkpoint(format!(
                    "{} belongs to a run with different parameters",
                    dir.display()
                )))
            }
            Err(_) => fs::write(&path, meta_json).map_err(|e| io_err(&path, e))?,
        }
        Ok(Checkpoint {
            dir: dir.to_path_buf(),
        })
    }

    fn part_path(&self, idx: usize) -> PathBuf {
        self.dir.join(format!("part-{idx:06}.json"))
    }

    fn load(&self, idx: usize) -> Result<Option<CensusTable>> {
        let path = self.part_path(idx);
        let Ok(text) = fs::read_to_string(&path) else {
            return Ok(None);
        };
        let part: CheckpointPart = serde_json::from_str(&text).map_err(|e| io_err(&path, e))?;
        let mut table = part.table;
        table.stored = part
            .stored
            .iter()
            .map(|v| Code::from_values(table.length, v))
            .collect::<Result<_>>()?;
        Ok(Some(table))
    }

    fn save(&self, idx: usize, table: &CensusTable) -> Result<()> {
        let part = CheckpointPart {
            table: table.clone(),
            stored: table.stored.iter().map(Code::values).collect(),
        };
        let path = self.part_path(idx);
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(&part).map_err(|e| io_err(&path, e))?;
        fs::write(&tmp, text).map_err(|e| io_err(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))
    }
}

/// Convenience wrapper: the full census for length `n`, nothing stored.
pub fn census(n: usize) -> Result<CensusTable> {
    orderly_generate(&GenerateConfig::new(n), &|_| {})
}

/// Largest length accepted by [`labeled_census_oracle`].
pub const LABELED_ORACLE_MAX_LENGTH: usize = 3;

/// Enumerates every trifferent code as a plain word set, canonicalizes
/// each one and counts distinct forms. Shares nothing with the orderly
/// search except the canonical form itself.
pub fn labeled_census_oracle(n: usize) -> Result<CensusTable> {
    check_length(n)?;
    if n > LABELED_ORACLE_MAX_LENGTH {
        return Err(TrifError::OracleTooLarge {
            got: n,
            max: LABELED_ORACLE_MAX_LENGTH,
        });
    }
    let words: Vec<Codeword> = (0..POW3[n])
        .map(|v| Codeword::decode_unchecked(n, v))
        .collect();
    let mut seen: HashSet<Code> = HashSet::new();
    let mut current = Vec::new();
    fn dfs(
        n: usize,
        words: &[Codeword],
        start: usize,
        current: &mut Vec<Codeword>,
        seen: &mut HashSet<Code>,
    ) {
        for i in start..words.len() {
            current.push(words[i]);
            let code = Code::from_sorted_unchecked(n, current.clone());
            if code.is_trifferent() {
                seen.insert(canonical_form(&code).canonical);
                dfs(n, words, i + 1, current, seen);
            }
            current.pop();
        }
    }
    dfs(n, &words, 0, &mut current, &mut seen);
    let mut table = CensusTable {
        length: n,
        min_card: 1,
        max_card: usize::MAX,
        exhausted: true,
        ..Default::default()
    };
    for code in &seen {
        let d = code.min_distance().ok();
        table.record(code.cardinality(), d);
    }
    Ok(table)
}

/// T(n,d): the largest cardinality of a trifferent code of length n and
/// minimum distance exactly d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub length: usize,
    pub values: BTreeMap<usize, usize>,
}

impl DistanceTable {
    pub fn get(&self, d: usize) -> usize {
        self.values.get(&d).copied().unwrap_or(1)
    }

    /// max over d of T(n,d), which is T(n).
    pub fn max(&self) -> usize {
        self.values.values().copied().max().unwrap_or(1)
    }

    /// Distances at which T(n) is attained.
    pub fn maximizers(&self) -> Vec<usize> {
        let m = self.max();
        self.values
            .iter()
            .filter(|&(_, &v)| v == m)
            .map(|(&d, _)| d)
            .collect()
    }
}

/// Derives T(n,d) for `1 <= d <= max_d` from a complete census.
pub fn distance_classify(census: &CensusTable, max_d: usize) -> Result<DistanceTable> {
    let n = census.length;
    if census.min_card > 2 || !census.exhausted || census.counts.is_empty() {
        return Err(TrifError::CensusUnavailable(n));
    }
    let mut values = BTreeMap::new();
    for d in 1..=max_d.max(n) {
        let best = census
            .distances
            .iter()
            .filter(|(_, row)| row.get(&d).is_some_and(|&c| c > 0))
            .map(|(&l, _)| l)
            .max();
        let v = if d > n { 1 } else { best.unwrap_or(1) };
        values.insert(d, v);
    }
    if values.get(&n) != Some(&3) {
        return Err(TrifError::CensusUnavailable(n));
    }
    values.retain(|&d, _| d <= max_d);
    Ok(DistanceTable { length: n, values })
}
