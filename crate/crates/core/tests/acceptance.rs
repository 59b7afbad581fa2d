//! End-to-end acceptance checks, one output line per criterion.
//!
//! Criterion 5 needs weeks of single-core time and only runs when
//! `TRIF_ACCEPT_EXTENDED=1` is set; otherwise it is reported as failed.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trifferent::bounds::{distance1_construct, BoundLedger};
use trifferent::catalog::Catalog;
use trifferent::enumeration::{
    distance_classify, labeled_census_oracle, orderly_generate, CensusTable, GenerateConfig,
};
use trifferent::extension::{
    pipeline_from_bases, residual_seeded_search, staged_pipeline, ExtendOptions,
};
use trifferent::io::parse_code_list;
use trifferent::linear::blocking::{
    greedy_point_removal, is_strong_blocking, points_of, PointMultiset,
};
use trifferent::linear::{
    ashikhmin_barg, dual_distance_at_least, fixtures, is_minimal_code, min_distance_floor_check,
    minimal_iff_trifferent_check, GeneratorMatrix,
};
use trifferent::{apply, canonical_form, orbit_oracle, Code, GroupElement};

/// a(n,l) for n = 1..=6, l = 1, 2, ...
const TABLE1: [&[u64]; 6] = [
    &[1, 1, 1],
    &[1, 2, 3, 1],
    &[1, 3, 7, 7, 2, 1],
    &[1, 4, 14, 35, 38, 25, 3, 2, 1],
    &[1, 5, 25, 141, 613, 1410, 944, 269, 55, 5],
    &[
        1, 6, 41, 499, 8038, 99612, 486122, 727128, 339695, 63781, 4832, 93, 3,
    ],
];

/// T(n,d) for n = 1..=6, d = 1..=6.
const TABLE2: [[usize; 6]; 6] = [
    [3, 1, 1, 1, 1, 1],
    [4, 3, 1, 1, 1, 1],
    [5, 6, 3, 1, 1, 1],
    [7, 8, 9, 3, 1, 1],
    [10, 10, 9, 6, 3, 1],
    [11, 12, 13, 10, 4, 3],
];

type Verdict = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn row(table: &CensusTable) -> Vec<u64> {
    (1..=table.max_cardinality())
        .map(|l| table.count(l))
        .collect()
}

fn value_set(codes: &[Code]) -> BTreeSet<Vec<u32>> {
    codes.iter().map(Code::values).collect()
}

fn catalog_set(n: usize, l: usize) -> BTreeSet<Vec<u32>> {
    value_set(Catalog::embedded().unwrap().get(n, l).unwrap())
}

fn census_with(n: usize, store_from: Option<usize>) -> CensusTable {
    let mut cfg = GenerateConfig::new(n);
    cfg.store_min_card = store_from;
    orderly_generate(&cfg, &|_| {}).unwrap()
}

fn linear_n9() -> Code {
    parse_code_list(fixtures::LINEAR_N9)
        .unwrap()
        .codes
        .remove(0)
}

fn criterion_1() -> Verdict {
    let mut cells = 0;
    for n in 1..=5 {
        let got = row(&census_with(n, None));
        check(got == TABLE1[n - 1], format!("n={n}: got {got:?}"))?;
        cells += got.len();
    }
    Ok(format!("a(n,l) for n <= 5 match ({cells} cells)"))
}

fn criterion_2(c6: &CensusTable) -> Verdict {
    let got = row(c6);
    check(got == TABLE1[5], format!("row 6 is {got:?}"))?;
    for l in [12, 13] {
        let found: Vec<Code> = c6
            .stored
            .iter()
            .filter(|c| c.cardinality() == l)
            .cloned()
            .collect();
        check(
            value_set(&found) == catalog_set(6, l),
            format!("card-{l} codes differ from the catalog"),
        )?;
    }
    Ok("row 6 matches, 93 + 3 codes equal the catalog".into())
}

fn criterion_3(c6: &CensusTable) -> Verdict {
    for n in 1..=6 {
        let census = if n == 6 {
            c6.clone()
        } else {
            census_with(n, None)
        };
        let t = distance_classify(&census, 6).map_err(|e| e.to_string())?;
        let got: Vec<usize> = (1..=6).map(|d| t.get(d)).collect();
        check(got == TABLE2[n - 1], format!("n={n}: got {got:?}"))?;
    }
    Ok("36 cells of T(n,d) match".into())
}

fn criterion_4(c6: &CensusTable) -> Verdict {
    let start = Instant::now();
    let bases: Vec<Code> = c6
        .stored
        .iter()
        .filter(|c| c.cardinality() >= 10)
        .cloned()
        .collect();
    let stages = pipeline_from_bases(bases, &[10, 14], ExtendOptions::default())
        .map_err(|e| e.to_string())?;
    let s = &stages[0];
    let want: BTreeMap<usize, u64> = [(14, 429602), (15, 2164), (16, 3)].into();
    check(s.counts == want, format!("counts {:?}", s.counts))?;
    let top: Vec<Code> = s
        .codes
        .iter()
        .filter(|c| c.cardinality() == 16)
        .cloned()
        .collect();
    check(
        value_set(&top) == catalog_set(7, 16),
        "card-16 codes differ from the catalog",
    )?;
    Ok(format!(
        "a(7,14..17) = 429602, 2164, 3, 0; card-16 codes equal the catalog ({:.0}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_5() -> Verdict {
    if std::env::var("TRIF_ACCEPT_EXTENDED").as_deref() != Ok("1") {
        return Err(
            "not run: the 7 -> 8 stage extends all 22.7M classes a(7,13) at about 0.06 s \
                    each, roughly 16 days on one core; set TRIF_ACCEPT_EXTENDED=1 to attempt"
                .into(),
        );
    }
    let stages = staged_pipeline(6, &[9, 13, 19, 25], ExtendOptions::default())
        .map_err(|e| e.to_string())?;
    let eight: BTreeMap<usize, u64> = [(19, 38581), (20, 57)].into();
    let eight_got: BTreeMap<usize, u64> = stages[1]
        .counts
        .iter()
        .filter(|(&l, _)| l >= 19)
        .map(|(&l, &c)| (l, c))
        .collect();
    check(eight_got == eight, format!("length 8 counts {eight_got:?}"))?;
    let nine: BTreeMap<usize, u64> = [(25, 44)].into();
    check(
        stages[2].counts == nine,
        format!("length 9 counts {:?}", stages[2].counts),
    )?;
    Ok("a(8,19..21) = 38581, 57, 0; length 9 gives 44 at 25, none above".into())
}

fn criterion_6() -> Verdict {
    let g = GeneratorMatrix::parse(fixtures::NINE3).map_err(|e| e.to_string())?;
    let code = g.expand().map_err(|e| e.to_string())?;
    check(code.cardinality() == 27, "expected 27 words")?;
    check(code.is_trifferent(), "not trifferent")?;
    check(
        canonical_form(&code).canonical == linear_n9(),
        "not equivalent to the shipped word list",
    )?;
    check(
        g.weight_enumerator().to_string() == "1+6x^5+8x^6+12x^7",
        "weight enumerator",
    )?;
    check(dual_distance_at_least(&g, 3).unwrap(), "not projective")?;
    for i in 0..9 {
        for j in 0..3 {
            let r = code.residual_subcode(i, j).unwrap();
            check(
                r.cardinality() == 18,
                format!("residual ({i},{j}) has {}", r.cardinality()),
            )?;
            for i2 in 0..8 {
                for j2 in 0..3 {
                    let rr = r.residual_subcode(i2, j2).unwrap();
                    check(rr.cardinality() == 12, "second-level residual size")?;
                }
            }
        }
    }
    Ok("27 words, trifferent, 1+6x^5+8x^6+12x^7, projective, residuals 18 and 12".into())
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let code = linear_n9();
    let ext =
        residual_seeded_search(&code, 25, ExtendOptions::default()).map_err(|e| e.to_string())?;
    let want: BTreeMap<usize, u64> = [(25, 166), (26, 39), (27, 11)].into();
    check(ext.counts() == want, format!("counts {:?}", ext.counts()))?;
    let top: Vec<Code> = ext
        .codes
        .iter()
        .filter(|c| c.cardinality() == 27)
        .cloned()
        .collect();
    check(
        value_set(&top) == catalog_set(9, 27),
        "card-27 codes differ from the catalog",
    )?;
    check(
        top.contains(&canonical_form(&code).canonical),
        "the linear code itself is missing",
    )?;
    Ok(format!(
        "166 / 39 / 11 classes at 25 / 26 / 27, the 11 equal the catalog ({:.0}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_8() -> Verdict {
    let expected = [
        (fixtures::FOURTEEN4[0], "1+14x^7+4x^8+20x^9+16x^10+26x^11"),
        (fixtures::FOURTEEN4[1], "1+12x^7+12x^8+8x^9+24x^10+24x^11"),
        (fixtures::FOURTEEN4[2], "1+12x^7+12x^8+8x^9+24x^10+24x^11"),
        (fixtures::NINETEEN5, "1+26x^9+132x^12+84x^15"),
    ];
    for (i, (text, we)) in expected.iter().enumerate() {
        let g = GeneratorMatrix::parse(text).map_err(|e| e.to_string())?;
        let w = g.weight_enumerator();
        check(w.to_string() == *we, format!("fixture {i}: enumerator {w}"))?;
        check(
            is_minimal_code(&g).minimal,
            format!("fixture {i} is not minimal"),
        )?;
        if i < 3 {
            check(
                !ashikhmin_barg(&w).unwrap(),
                format!("fixture {i} satisfies Ashikhmin-Barg"),
            )?;
        }
    }
    for text in [fixtures::FOUR2, fixtures::NINE3]
        .into_iter()
        .chain(expected.iter().map(|e| e.0))
    {
        let g = GeneratorMatrix::parse(text).unwrap();
        check(min_distance_floor_check(&g).unwrap(), "d < 2k - 1")?;
    }
    Ok("enumerators match, all minimal, [14,4] codes violate Ashikhmin-Barg, d >= 2k-1".into())
}

fn random_code(rng: &mut ChaCha8Rng, n: usize) -> Code {
    let space = 3u32.pow(n as u32);
    let size = rng.random_range(1..=space.min(9));
    let mut values = BTreeSet::new();
    while values.len() < size as usize {
        values.insert(rng.random_range(0..space));
    }
    Code::from_values(n, &values.into_iter().collect::<Vec<_>>()).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng) -> GeneratorMatrix {
    loop {
        let k = rng.random_range(1..=3);
        let n = rng.random_range(k..=10);
        let cols: Vec<Vec<u8>> = (0..n)
            .map(|_| loop {
                let c: Vec<u8> = (0..k).map(|_| rng.random_range(0..3u8)).collect();
                if c.iter().any(|&d| d != 0) {
                    break c;
                }
            })
            .collect();
        let rows: Vec<Vec<u8>> = (0..k)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        if let Ok(g) = GeneratorMatrix::new(&rows) {
            return g;
        }
    }
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=3 {
        let a = census_with(n, None);
        let b = labeled_census_oracle(n).unwrap();
        check(
            a.counts == b.counts,
            format!("oracle census differs at n={n}"),
        )?;
    }
    for _ in 0..1000 {
        let n = rng.random_range(1..=3);
        let c = random_code(&mut rng, n);
        let fast = canonical_form(&c);
        let slow = orbit_oracle(&c).unwrap();
        check(
            fast.canonical == slow.canonical && fast.stabilizer_order == slow.stabilizer_order,
            format!(
                "canonical form disagrees with the oracle on {:?}",
                c.values()
            ),
        )?;
    }
    let catalog = Catalog::embedded().unwrap();
    for code in catalog.codes() {
        for _ in 0..100 {
            let g = GroupElement::random(code.length(), &mut rng);
            let moved = apply(&g, code).unwrap();
            check(
                canonical_form(&moved).canonical == *code,
                "canonical form not invariant",
            )?;
        }
    }
    for _ in 0..200 {
        let g = random_matrix(&mut rng);
        check(
            minimal_iff_trifferent_check(&g).unwrap(),
            format!("minimal vs trifferent on\n{g}"),
        )?;
        if g.dimension() >= 2 {
            let sb = is_strong_blocking(&points_of(&g).unwrap());
            check(
                sb == is_minimal_code(&g).minimal,
                format!("strong blocking vs minimal on\n{g}"),
            )?;
        }
    }
    let plane = PointMultiset::all_points(3).unwrap();
    for seed in 0..100 {
        let r = greedy_point_removal(&plane, seed).unwrap();
        check(
            r.len() == 9,
            format!("seed {seed} stopped at {} points", r.len()),
        )?;
    }
    let mut sample = census_with(5, Some(1)).stored;
    sample.retain(|c| c.cardinality() >= 2);
    for _ in 0..100 {
        let code = &sample[rng.random_range(0..sample.len())];
        let c = code.words()[rng.random_range(0..code.cardinality())];
        let e = distance1_construct(code, &c).unwrap();
        check(
            e.is_trifferent()
                && e.min_distance().unwrap() == 1
                && e.cardinality() == code.cardinality() + 1,
            format!("construction fails on {:?}", code.values()),
        )?;
    }
    let ledger = BoundLedger::default();
    check(ledger.is_consistent(30), "ledger inconsistent")?;
    let from_t6 = BoundLedger::with_known(
        trifferent::bounds::KNOWN_T
            .into_iter()
            .filter(|&(n, _)| n <= 6)
            .collect(),
    );
    check(from_t6.best(11).value == 94, "T(11) <= 94 from T(6) = 13")?;
    check(ledger.best(11).value <= 94, "T(11) bound")?;
    for n in 10..=30 {
        check(
            ledger.best(n).value as f64 <= 0.6937 * 1.5f64.powi(n as i32),
            format!("envelope fails at n={n}"),
        )?;
    }
    Ok(format!(
        "all property suites pass ({:.0}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn report(id: usize, f: impl FnOnce() -> Verdict) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match outcome {
        Ok(detail) => {
            println!("criterion {id}: PASS: {detail}");
            true
        }
        Err(reason) => {
            println!("criterion {id}: FAIL: {reason}");
            false
        }
    }
}

fn main() -> ExitCode {
    let c6 = census_with(6, Some(10));
    let results = [
        report(1, criterion_1),
        report(2, || criterion_2(&c6)),
        report(3, || criterion_3(&c6)),
        report(4, || criterion_4(&c6)),
        report(5, criterion_5),
        report(6, criterion_6),
        report(7, criterion_7),
        report(8, criterion_8),
        report(9, criterion_9),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/9 criteria passed");
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
