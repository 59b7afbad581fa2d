//! Known extremal and near-extremal codes for small lengths.
//!
//! Every bucket `(n, l)` is stored twice: as compiled-in fixtures and as
//! shipped code-list files. [`verify_catalog`] checks both copies.

mod fixtures;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::code::Code;
use crate::equivalence::canonical_form;
use crate::error::Result;
use crate::io::parse_code_list;

use fixtures::FIXTURES;

/// `(length, cardinality, number of classes)` for every bucket.
pub const HEADLINE: &[(usize, usize, usize)] = &[
    (4, 7, 3),
    (4, 8, 2),
    (4, 9, 1),
    (5, 10, 5),
    (6, 12, 93),
    (6, 13, 3),
    (7, 16, 3),
    (8, 20, 57),
    (9, 27, 11),
];

const FILES: &[(usize, usize, &str)] = &[
    (4, 7, include_str!("../../data/catalog_n4_l7.txt")),
    (4, 8, include_str!("../../data/catalog_n4_l8.txt")),
    (4, 9, include_str!("../../data/catalog_n4_l9.txt")),
    (5, 10, include_str!("../../data/catalog_n5_l10.txt")),
    (6, 12, include_str!("../../data/catalog_n6_l12.txt")),
    (6, 13, include_str!("../../data/catalog_n6_l13.txt")),
    (7, 16, include_str!("../../data/catalog_n7_l16.txt")),
    (8, 20, include_str!("../../data/catalog_n8_l20.txt")),
    (9, 27, include_str!("../../data/catalog_n9_l27.txt")),
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<(usize, usize), Vec<Code>>,
}

impl Catalog {
    pub fn embedded() -> Result<Self> {
        let mut entries = BTreeMap::new();
        for f in FIXTURES {
            let codes = f
                .codes
                .iter()
                .map(|v| Code::from_values(f.length, v))
                .collect::<Result<Vec<_>>>()?;
            entries.insert((f.length, f.cardinality), codes);
        }
        Ok(Catalog { entries })
    }

    /// Parses the code-list files bundled with the crate.
    pub fn shipped() -> Result<Self> {
        let mut entries = BTreeMap::new();
        for &(n, l, text) in FILES {
            let list = parse_code_list(text)?;
            entries.insert((n, l), list.codes);
        }
        Ok(Catalog { entries })
    }

    pub fn shipped_text(length: usize, cardinality: usize) -> Option<&'static str> {
        FILES
            .iter()
            .find(|&&(n, l, _)| n == length && l == cardinality)
            .map(|&(_, _, t)| t)
    }

    pub fn from_entries(entries: BTreeMap<(usize, usize), Vec<Code>>) -> Self {
        Catalog { entries }
    }

    pub fn get(&self, length: usize, cardinality: usize) -> Option<&[Code]> {
        self.entries.get(&(length, cardinality)).map(Vec::as_slice)
    }

    pub fn get_mut(&mut self, length: usize, cardinality: usize) -> Option<&mut Vec<Code>> {
        self.entries.get_mut(&(length, cardinality))
    }

    pub fn buckets(&self) -> impl Iterator<Item = ((usize, usize), &[Code])> {
        self.entries.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    pub fn codes(&self) -> impl Iterator<Item = &Code> {
        self.entries.values().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    WrongShape {
        index: usize,
        length: usize,
        cardinality: usize,
    },
    ViolatingTriple {
        index: usize,
        words: [u32; 3],
    },
    NotCanonical {
        index: usize,
        smaller: Vec<u32>,
    },
    Equivalent {
        first: usize,
        second: usize,
    },
    CountMismatch {
        expected: usize,
        found: usize,
    },
    CopiesDisagree {
        index: usize,
    },
    MissingBucket,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BucketReport {
    pub length: usize,
    pub cardinality: usize,
    pub expected: usize,
    pub found: usize,
    pub failures: Vec<Failure>,
}

impl BucketReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogReport {
    pub buckets: Vec<BucketReport>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.buckets.iter().all(BucketReport::passed)
    }
}

/// Checks the compiled-in catalog against the shipped files.
pub fn verify_catalog() -> Result<CatalogReport> {
    let embedded = Catalog::embedded()?;
    let shipped = Catalog::shipped()?;
    Ok(verify(&embedded, Some(&shipped)))
}

pub fn verify(catalog: &Catalog, reference: Option<&Catalog>) -> CatalogReport {
    let buckets = HEADLINE
        .iter()
        .map(|&(n, l, expected)| {
            let Some(codes) = catalog.get(n, l) else {
                return BucketReport {
                    length: n,
                    cardinality: l,
                    expected,
                    found: 0,
                    failures: vec![Failure::MissingBucket],
                };
            };
            let mut failures = check_bucket(n, l, codes);
            if codes.len() != expected {
                failures.push(Failure::CountMismatch {
                    expected,
                    found: codes.len(),
                });
            }
            if let Some(other) = reference {
                match other.get(n, l) {
                    None => failures.push(Failure::MissingBucket),
                    Some(copy) => {
                        for i in 0..codes.len().max(copy.len()) {
                            if codes.get(i) != copy.get(i) {
                                failures.push(Failure::CopiesDisagree { index: i });
                            }
                        }
                    }
                }
            }
            BucketReport {
                length: n,
                cardinality: l,
                expected,
                found: codes.len(),
                failures,
            }
        })
        .collect();
    CatalogReport { buckets }
}

fn check_bucket(n: usize, l: usize, codes: &[Code]) -> Vec<Failure> {
    let mut failures = Vec::new();
    let mut seen: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (index, code) in codes.iter().enumerate() {
        if code.length() != n || code.cardinality() != l {
            failures.push(Failure::WrongShape {
                index,
                length: code.length(),
                cardinality: code.cardinality(),
            });
        }
        if let Some((a, b, c)) = code.violating_triple() {
            let w = code.words();
            failures.push(Failure::ViolatingTriple {
                index,
                words: [w[a].encode(), w[b].encode(), w[c].encode()],
            });
        }
        let canon = canonical_form(code);
        if !canon.is_input_canonical {
            failures.push(Failure::NotCanonical {
                index,
                smaller: canon.canonical.values(),
            });
        }
        if let Some(&first) = seen.get(&canon.canonical.values()) {
            failures.push(Failure::Equivalent {
                first,
                second: index,
            });
        } else {
            seen.insert(canon.canonical.values(), index);
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Code;

    #[test]
    fn embedded_catalog_verifies() {
        let report = verify_catalog().unwrap();
        for b in &report.buckets {
            assert!(
                b.passed(),
                "bucket ({}, {}): {:?}",
                b.length,
                b.cardinality,
                b.failures
            );
        }
        let sizes: Vec<usize> = report.buckets.iter().map(|b| b.found).collect();
        assert_eq!(sizes, vec![3, 2, 1, 5, 93, 3, 3, 57, 11]);
    }

    #[test]
    fn corrupted_entry_reports_triple() {
        let mut cat = Catalog::embedded().unwrap();
        let bucket = cat.get_mut(6, 13).unwrap();
        let mut values = bucket[0].values();
        // 000001 clashes with 000000 and 000111.
        values[12] = 1;
        values.sort_unstable();
        bucket[0] = Code::from_values(6, &values).unwrap();
        let report = verify(&cat, None);
        let b = report
            .buckets
            .iter()
            .find(|b| (b.length, b.cardinality) == (6, 13))
            .unwrap();
        assert!(!report.passed());
        let triple = b.failures.iter().find_map(|f| match f {
            Failure::ViolatingTriple { words, .. } => Some(*words),
            _ => None,
        });
        let words = triple.expect("expected a violating triple");
        let code = &cat.get(6, 13).unwrap()[0];
        let w: Vec<_> = words
            .iter()
            .map(|&v| crate::word::Codeword::decode(6, u64::from(v)).unwrap())
            .collect();
        assert!(code.words().contains(&w[0]));
        assert!(!crate::word::triple_trifferent(&w[0], &w[1], &w[2]).unwrap());
    }

    #[test]
    fn detects_duplicates_and_disagreement() {
        let shipped = Catalog::shipped().unwrap();
        let mut cat = Catalog::embedded().unwrap();
        let bucket = cat.get_mut(4, 8).unwrap();
        let moved = crate::equivalence::apply(
            &crate::equivalence::GroupElement::new(
                vec![1, 0, 3, 2],
                vec![[0, 1, 2], [2, 1, 0], [0, 1, 2], [1, 0, 2]],
            )
            .unwrap(),
            &bucket[0],
        )
        .unwrap();
        bucket.push(moved);
        let report = verify(&cat, Some(&shipped));
        let b = &report.buckets[1];
        assert!(b.failures.contains(&Failure::Equivalent {
            first: 0,
            second: 2
        }));
        assert!(b.failures.contains(&Failure::CountMismatch {
            expected: 2,
            found: 3
        }));
        assert!(b.failures.contains(&Failure::CopiesDisagree { index: 2 }));
        assert!(b
            .failures
            .iter()
            .any(|f| matches!(f, Failure::NotCanonical { index: 2, .. })));
    }

    #[test]
    fn removing_largest_word_keeps_canonical() {
        let cat = Catalog::embedded().unwrap();
        for code in cat.codes() {
            let mut values = code.values();
            while values.len() > 1 {
                values.pop();
                let sub = Code::from_values(code.length(), &values).unwrap();
                assert!(crate::equivalence::is_canonical(&sub), "{values:?}");
            }
        }
    }

    #[test]
    fn residuals_of_catalog_codes_are_trifferent() {
        let cat = Catalog::embedded().unwrap();
        for code in cat.codes() {
            for i in 0..code.length() {
                for j in 0..3 {
                    assert!(code.residual_subcode(i, j).unwrap().is_trifferent());
                }
            }
        }
    }

    #[test]
    fn shipped_text_lookup() {
        assert!(Catalog::shipped_text(9, 27).unwrap().contains("length=9"));
        assert!(Catalog::shipped_text(9, 28).is_none());
    }
}
