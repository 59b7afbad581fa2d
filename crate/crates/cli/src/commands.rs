use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use trifferent::bounds::BoundLedger;
use trifferent::catalog::{verify_catalog, Catalog};
use trifferent::enumeration::{distance_classify, orderly_generate, GenerateConfig};
use trifferent::extension::{
    check_thresholds, extend_all, residual_seeded_search, ExtendOptions, ExtendStats, Extension,
};
use trifferent::io::{format_code_list, parse_code_list};
use trifferent::linear::blocking::{
    greedy_point_removal, is_strong_blocking, points_of, PointMultiset,
};
use trifferent::linear::{
    ashikhmin_barg, dual_distance_at_least, is_minimal_code, is_trifferent_linear, GeneratorMatrix,
};
use trifferent::{canonical_form, Code};

use crate::{
    BlockingAction, BlockingArgs, BoundsArgs, CatalogAction, CatalogArgs, Cli, Command,
    DistanceArgs, EnumerateArgs, ExtendArgs, Format, InputArgs, LinearAction, LinearArgs, Outcome,
    PipelineArgs,
};

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Enumerate(_) => "enumerate",
        Command::Extend(_) => "extend",
        Command::Pipeline(_) => "pipeline",
        Command::Canon(_) => "canon",
        Command::Verify(_) => "verify",
        Command::DistanceTable(_) => "distance-table",
        Command::Bounds(_) => "bounds",
        Command::Linear(_) => "linear",
        Command::Blocking(_) => "blocking",
        Command::Catalog(_) => "catalog",
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    match &cli.command {
        Command::Enumerate(a) => enumerate(a, f, cli.jobs),
        Command::Extend(a) => extend(a, f, cli.jobs),
        Command::Pipeline(a) => pipeline(a, f, cli.jobs),
        Command::Canon(a) => canon(a, f),
        Command::Verify(a) => verify(a, f),
        Command::DistanceTable(a) => distance_table(a, f, cli.jobs),
        Command::Bounds(a) => bounds(a, f),
        Command::Linear(a) => linear(a, f),
        Command::Blocking(a) => blocking(a, f),
        Command::Catalog(a) => catalog(a, f),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_codes(path: &Path) -> Result<(usize, Vec<Code>)> {
    let list = parse_code_list(&read(path)?).with_context(|| path.display().to_string())?;
    Ok((list.length, list.codes))
}

fn read_matrix(path: &Path) -> Result<GeneratorMatrix> {
    GeneratorMatrix::parse(&read(path)?).with_context(|| path.display().to_string())
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn counts_text(length: usize, counts: &BTreeMap<usize, u64>) -> String {
    let mut out = String::new();
    for (l, c) in counts {
        let _ = writeln!(out, "a({length},{l}) = {c}");
    }
    out
}

fn counts_json(counts: &BTreeMap<usize, u64>) -> Value {
    Value::Object(
        counts
            .iter()
            .map(|(l, c)| (l.to_string(), json!(c)))
            .collect(),
    )
}

fn enumerate(a: &EnumerateArgs, f: Format, jobs: Option<usize>) -> Result<Outcome> {
    let mut cfg = GenerateConfig::new(a.length);
    cfg.min_card = a.min_card;
    if let Some(m) = a.max_card {
        cfg.max_card = m;
    }
    cfg.split_card = a.split_card;
    cfg.jobs = jobs;
    cfg.checkpoint = a.checkpoint.clone();
    let keep = a.out.is_some() && !a.count_only;
    if keep {
        cfg.store_min_card = Some(a.min_card);
    }
    let table = orderly_generate(&cfg, &|_| {})?;
    let stdout = match f {
        Format::Tsv => table.to_tsv(),
        Format::Json => to_json(&table),
        Format::Text => {
            let mut s = counts_text(a.length, &table.counts);
            let _ = writeln!(s, "largest cardinality: {}", table.max_cardinality());
            if !table.exhausted {
                let _ = writeln!(s, "note: search stopped at cardinality {}", table.max_card);
            }
            s
        }
    };
    let mut out = Outcome::ok(stdout);
    if keep {
        let mut codes = table.stored.clone();
        codes.sort();
        let text = format_code_list(
            a.length,
            &codes,
            &[format!(
                "classes of length {} with at least {} words",
                a.length, a.min_card
            )],
        );
        out.files.push((a.out.clone().unwrap(), text));
    }
    Ok(out)
}

fn extension_summary(ext: &Extension, seconds: f64, f: Format) -> String {
    match f {
        Format::Json => to_json(&json!({
            "length": ext.length,
            "target": ext.target,
            "classes_found": ext.codes.len(),
            "counts": counts_json(&ext.counts()),
            "nodes": ext.stats.nodes,
            "pruned": ext.stats.pruned,
            "wall_seconds": seconds,
        })),
        Format::Tsv => {
            let mut s = String::from("length\tcardinality\tclasses\n");
            for (l, c) in ext.counts() {
                let _ = writeln!(s, "{}\t{l}\t{c}", ext.length);
            }
            s
        }
        Format::Text => {
            let mut s = counts_text(ext.length, &ext.counts());
            let _ = writeln!(
                s,
                "{} classes with at least {} words ({} bases, {} nodes)",
                ext.codes.len(),
                ext.target,
                ext.stats.bases,
                ext.stats.nodes
            );
            s
        }
    }
}

fn options(no_prune: bool, jobs: Option<usize>) -> ExtendOptions {
    ExtendOptions {
        prune: !no_prune,
        jobs,
    }
}

fn extend(a: &ExtendArgs, f: Format, jobs: Option<usize>) -> Result<Outcome> {
    let (n, codes) = read_codes(&a.bases)?;
    let opts = options(a.no_prune, jobs);
    let expected = if a.residual_of { n } else { n + 1 };
    if let Some(t) = a.target_length {
        if t != expected {
            bail!("--target-length {t} does not match the input (length {expected} expected)");
        }
    }
    let start = Instant::now();
    let ext = if a.residual_of {
        let mut all: Vec<Code> = Vec::new();
        let mut stats = ExtendStats::default();
        for code in &codes {
            let e = residual_seeded_search(code, a.target_card, opts)?;
            all.extend(e.codes);
            stats.bases += e.stats.bases;
            stats.nodes += e.stats.nodes;
            stats.pruned += e.stats.pruned;
            stats.raw_codes += e.stats.raw_codes;
        }
        all.sort();
        all.dedup();
        Extension {
            length: n,
            target: a.target_card,
            codes: all,
            stats,
        }
    } else {
        extend_all(&codes, a.target_card, opts)?
    };
    let mut out = Outcome::ok(extension_summary(&ext, start.elapsed().as_secs_f64(), f));
    if let Some(p) = &a.out {
        let text = format_code_list(
            ext.length,
            &ext.codes,
            &[format!(
                "length {} with at least {} words",
                ext.length, ext.target
            )],
        );
        out.files.push((p.clone(), text));
    }
    Ok(out)
}

fn stage_file(dir: &Path, length: usize, target: usize) -> PathBuf {
    dir.join(format!("stage_n{length}_l{target}.txt"))
}

fn pipeline(a: &PipelineArgs, f: Format, jobs: Option<usize>) -> Result<Outcome> {
    check_thresholds(&a.thresholds)?;
    let opts = options(a.no_prune, jobs);
    let mut current = match &a.bases {
        Some(p) => {
            let (n, codes) = read_codes(p)?;
            if n != a.from_length {
                bail!("bases have length {n}, expected {}", a.from_length);
            }
            codes
        }
        None => {
            let mut cfg = GenerateConfig::new(a.from_length);
            cfg.min_card = a.thresholds[0];
            cfg.store_min_card = Some(a.thresholds[0]);
            cfg.jobs = jobs;
            cfg.checkpoint = a.checkpoint.as_ref().map(|d| d.join("census"));
            orderly_generate(&cfg, &|_| {})?.stored
        }
    };
    current.retain(|c| c.cardinality() >= a.thresholds[0]);
    current.sort();
    if let Some(dir) = &a.checkpoint {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    }
    let mut stages = Vec::new();
    let mut files = Vec::new();
    let mut length = a.from_length;
    for &target in &a.thresholds[1..] {
        length += 1;
        let start = Instant::now();
        let resumed = match &a.checkpoint {
            Some(dir) if stage_file(dir, length, target).exists() => {
                Some(read_codes(&stage_file(dir, length, target))?.1)
            }
            _ => None,
        };
        let (codes, nodes) = match resumed {
            Some(c) => (c, None),
            None => {
                let ext = extend_all(&current, target, opts)?;
                if let Some(dir) = &a.checkpoint {
                    let path = stage_file(dir, length, target);
                    let tmp = path.with_extension("tmp");
                    std::fs::write(&tmp, format_code_list(length, &ext.codes, &[]))?;
                    std::fs::rename(&tmp, &path)?;
                }
                (ext.codes, Some(ext.stats.nodes))
            }
        };
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for c in &codes {
            *counts.entry(c.cardinality()).or_default() += 1;
        }
        if let Some(dir) = &a.out_dir {
            files.push((
                stage_file(dir, length, target),
                format_code_list(
                    length,
                    &codes,
                    &[format!("length {length} with at least {target} words")],
                ),
            ));
        }
        stages.push((length, target, counts, nodes, start.elapsed().as_secs_f64()));
        current = codes;
    }
    let stdout = match f {
        Format::Json => to_json(
            &stages
                .iter()
                .map(|(n, t, counts, nodes, secs)| {
                    json!({
                        "length": n,
                        "target": t,
                        "classes_found": counts.values().sum::<u64>(),
                        "counts": counts_json(counts),
                        "nodes": nodes,
                        "wall_seconds": secs,
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Tsv => {
            let mut s = String::from("length\tcardinality\tclasses\n");
            for (n, _, counts, _, _) in &stages {
                for (l, c) in counts {
                    let _ = writeln!(s, "{n}\t{l}\t{c}");
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (n, t, counts, _, _) in &stages {
                let _ = writeln!(s, "stage length {n}, at least {t} words");
                s.push_str(&counts_text(*n, counts));
            }
            s
        }
    };
    Ok(Outcome {
        stdout,
        files,
        passed: true,
        seed: None,
    })
}

fn canon(a: &InputArgs, f: Format) -> Result<Outcome> {
    let (n, codes) = read_codes(&a.input)?;
    let results: Vec<_> = codes.iter().map(canonical_form).collect();
    let canonical: Vec<Code> = results.iter().map(|r| r.canonical.clone()).collect();
    let list = format_code_list(n, &canonical, &[]);
    let stdout = match f {
        Format::Json => to_json(
            &codes
                .iter()
                .zip(&results)
                .map(|(c, r)| {
                    json!({
                        "input": c.values(),
                        "canonical": r.canonical.values(),
                        "is_input_canonical": r.is_input_canonical,
                        "stabilizer_order": r.stabilizer_order.to_string(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Tsv => {
            let mut s = String::from("index\tcanonical\tstabilizer_order\n");
            for (i, r) in results.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}",
                    i + 1,
                    trifferent::io::format_code_line(&r.canonical),
                    r.stabilizer_order
                );
            }
            s
        }
        Format::Text => list.clone(),
    };
    let mut out = Outcome::ok(stdout);
    if let Some(p) = &a.out {
        out.files.push((p.clone(), list));
    }
    Ok(out)
}

fn verify(a: &InputArgs, f: Format) -> Result<Outcome> {
    let (n, codes) = read_codes(&a.input)?;
    let mut rows = Vec::new();
    for (i, c) in codes.iter().enumerate() {
        let triple = c.violating_triple().map(|(x, y, z)| {
            [
                c.words()[x].encode(),
                c.words()[y].encode(),
                c.words()[z].encode(),
            ]
        });
        rows.push((
            i + 1,
            c.cardinality(),
            c.min_distance().ok(),
            c.tau().tau,
            triple,
        ));
    }
    let passed = rows.iter().all(|r| r.4.is_none());
    let stdout = match f {
        Format::Json => to_json(&json!({
            "length": n,
            "passed": passed,
            "codes": rows.iter().map(|(i, l, d, tau, t)| json!({
                "index": i,
                "cardinality": l,
                "min_distance": d,
                "tau": tau,
                "trifferent": t.is_none(),
                "violating_triple": t,
            })).collect::<Vec<_>>(),
        })),
        Format::Tsv => {
            let mut s = String::from("index\tcardinality\tmin_distance\ttau\ttrifferent\n");
            for (i, l, d, tau, t) in &rows {
                let d = d.map_or("-".to_string(), |d| d.to_string());
                let _ = writeln!(s, "{i}\t{l}\t{d}\t{tau}\t{}", t.is_none());
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, l, d, tau, t) in &rows {
                let d = d.map_or("-".to_string(), |d| d.to_string());
                match t {
                    None => {
                        let _ = writeln!(s, "code {i}: trifferent, {l} words, d={d}, tau={tau}");
                    }
                    Some([x, y, z]) => {
                        let _ = writeln!(s, "code {i}: NOT trifferent, words {x}, {y}, {z}");
                    }
                }
            }
            s
        }
    };
    Ok(Outcome {
        stdout,
        passed,
        ..Default::default()
    })
}

fn distance_table(a: &DistanceArgs, f: Format, jobs: Option<usize>) -> Result<Outcome> {
    let mut cfg = GenerateConfig::new(a.length);
    cfg.jobs = jobs;
    cfg.checkpoint = a.checkpoint.clone();
    let census = orderly_generate(&cfg, &|_| {})?;
    let table = distance_classify(&census, a.length)?;
    let best = table.maximizers();
    let stdout = match f {
        Format::Json => to_json(&json!({
            "length": table.length,
            "values": counts_json(&table.values.iter().map(|(&d, &v)| (d, v as u64)).collect()),
            "maximizers": best,
        })),
        Format::Tsv => {
            let mut s = String::from("n\\d");
            for d in table.values.keys() {
                let _ = write!(s, "\t{d}");
            }
            let _ = write!(s, "\n{}", table.length);
            for v in table.values.values() {
                let _ = write!(s, "\t{v}");
            }
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (d, v) in &table.values {
                let mark = if best.contains(d) { " *" } else { "" };
                let _ = writeln!(s, "T({},{d}) = {v}{mark}", table.length);
            }
            s
        }
    };
    Ok(Outcome::ok(stdout))
}

fn bounds(a: &BoundsArgs, f: Format) -> Result<Outcome> {
    let ledger = BoundLedger::default();
    let rows = ledger.table(a.max_length);
    let passed = ledger.is_consistent(a.max_length);
    let stdout = match f {
        Format::Json => to_json(&json!({
            "consistent": passed,
            "bounds": rows.iter().map(|(n, b)| json!({
                "length": n,
                "value": b.value,
                "provenance": b.provenance.to_string(),
            })).collect::<Vec<_>>(),
        })),
        Format::Tsv => {
            let mut s = String::from("n\tbound\tprovenance\n");
            for (n, b) in &rows {
                let _ = writeln!(s, "{n}\t{}\t{}", b.value, b.provenance);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (n, b) in &rows {
                let rel = if b.provenance == trifferent::bounds::Provenance::Exact {
                    "="
                } else {
                    "<="
                };
                let _ = writeln!(s, "T({n}) {rel} {} ({})", b.value, b.provenance);
            }
            if !passed {
                s.push_str("ledger is inconsistent\n");
            }
            s
        }
    };
    Ok(Outcome {
        stdout,
        passed,
        ..Default::default()
    })
}

fn digits(v: &[u8]) -> String {
    v.iter().map(|d| char::from(b'0' + d)).collect()
}

fn verdict(f: Format, key: &str, ok: bool, extra: Value, text: String) -> Outcome {
    let stdout = match f {
        Format::Json => {
            let mut obj = json!({ key: ok });
            if let (Value::Object(o), Value::Object(e)) = (&mut obj, extra) {
                o.extend(e);
            }
            to_json(&obj)
        }
        Format::Tsv => format!("{key}\n{ok}\n"),
        Format::Text => text,
    };
    Outcome {
        stdout,
        passed: ok,
        ..Default::default()
    }
}

fn linear(a: &LinearArgs, f: Format) -> Result<Outcome> {
    let g = read_matrix(&a.r#gen)?;
    let (k, n) = (g.dimension(), g.length());
    Ok(match a.action {
        LinearAction::Weights => {
            let w = g.weight_enumerator();
            let stdout = match f {
                Format::Json => to_json(&json!({
                    "length": n,
                    "dimension": k,
                    "min_distance": g.min_distance(),
                    "enumerator": w.to_string(),
                    "coefficients": counts_json(&w.coefficients),
                })),
                Format::Tsv => {
                    let mut s = String::from("weight\tcount\n");
                    for (wt, c) in &w.coefficients {
                        let _ = writeln!(s, "{wt}\t{c}");
                    }
                    s
                }
                Format::Text => format!("{w}\n"),
            };
            Outcome::ok(stdout)
        }
        LinearAction::Minimal => {
            let m = is_minimal_code(&g);
            let w = g.weight_enumerator();
            let ab = ashikhmin_barg(&w)?;
            let d = g.min_distance();
            let mut text = format!("[{n},{k},{d}] code: ");
            match &m.witness {
                None => text.push_str("minimal\n"),
                Some((u, c)) => {
                    let _ = writeln!(
                        text,
                        "not minimal, supp({}) is inside supp({})",
                        digits(u),
                        digits(c)
                    );
                }
            }
            let _ = writeln!(
                text,
                "Ashikhmin-Barg condition {}",
                if ab { "holds" } else { "fails" }
            );
            let extra = json!({
                "ashikhmin_barg": ab,
                "min_distance": d,
                "witness": m.witness.as_ref().map(|(u, c)| [digits(u), digits(c)]),
            });
            verdict(f, "minimal", m.minimal, extra, text)
        }
        LinearAction::Trifferent => {
            let ok = is_trifferent_linear(&g);
            let text = format!("{}\n", if ok { "trifferent" } else { "not trifferent" });
            verdict(f, "trifferent", ok, json!({}), text)
        }
        LinearAction::Dual => {
            let ok = dual_distance_at_least(&g, a.at_least)?;
            let text = format!(
                "dual distance {} {}\n",
                if ok { ">=" } else { "<" },
                a.at_least
            );
            verdict(
                f,
                "dual_distance_at_least",
                ok,
                json!({ "t": a.at_least }),
                text,
            )
        }
        LinearAction::Expand => {
            let code = g.expand()?;
            let list = format_code_list(n, std::slice::from_ref(&code), &[]);
            let mut out = Outcome::ok(list.clone());
            if let Some(p) = &a.out {
                out.files.push((p.clone(), list));
            }
            out
        }
    })
}

fn blocking(a: &BlockingArgs, f: Format) -> Result<Outcome> {
    let m = match (&a.r#gen, &a.points, a.all_points) {
        (Some(p), _, _) => points_of(&read_matrix(p)?)?,
        (_, Some(p), _) => {
            let k = a.dim.expect("clap enforces --dim");
            PointMultiset::parse(&read(p)?, k).with_context(|| p.display().to_string())?
        }
        (_, _, Some(k)) => PointMultiset::all_points(k)?,
        _ => bail!("one of --gen, --points or --all-points is required"),
    };
    match a.action {
        BlockingAction::Check => {
            let ok = is_strong_blocking(&m);
            let text = format!(
                "{} points in PG({},3): {}\n",
                m.len(),
                m.dimension() - 1,
                if ok {
                    "strong blocking"
                } else {
                    "not strong blocking"
                }
            );
            Ok(verdict(
                f,
                "strong_blocking",
                ok,
                json!({ "points": m.len() }),
                text,
            ))
        }
        BlockingAction::Reduce => {
            let r = greedy_point_removal(&m, a.seed)?;
            let listing = r.to_string();
            let stdout = match f {
                Format::Json => to_json(&json!({
                    "seed": a.seed,
                    "size": r.len(),
                    "points": listing.lines().collect::<Vec<_>>(),
                })),
                Format::Tsv => format!("seed\tsize\n{}\t{}\n", a.seed, r.len()),
                Format::Text => format!("# {} points, seed {}\n{listing}", r.len(), a.seed),
            };
            let mut out = Outcome::ok(stdout);
            out.seed = Some(a.seed);
            if let Some(p) = &a.out {
                out.files.push((p.clone(), listing));
            }
            Ok(out)
        }
    }
}

fn catalog(a: &CatalogArgs, f: Format) -> Result<Outcome> {
    match a.action {
        CatalogAction::Verify => {
            let report = verify_catalog()?;
            let stdout = match f {
                Format::Json => to_json(&report),
                Format::Tsv => {
                    let mut s = String::from("length\tcardinality\texpected\tfound\tpassed\n");
                    for b in &report.buckets {
                        let _ = writeln!(
                            s,
                            "{}\t{}\t{}\t{}\t{}",
                            b.length,
                            b.cardinality,
                            b.expected,
                            b.found,
                            b.passed()
                        );
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for b in &report.buckets {
                        let _ = writeln!(
                            s,
                            "({},{}): {} codes, {}",
                            b.length,
                            b.cardinality,
                            b.found,
                            if b.passed() { "ok" } else { "FAILED" }
                        );
                        for fail in &b.failures {
                            let _ = writeln!(
                                s,
                                "  {}",
                                serde_json::to_string(fail).expect("serializable")
                            );
                        }
                    }
                    s
                }
            };
            Ok(Outcome {
                stdout,
                passed: report.passed(),
                ..Default::default()
            })
        }
        CatalogAction::Show => {
            let (n, l) = (a.length.unwrap_or(0), a.card.unwrap_or(0));
            let cat = Catalog::embedded()?;
            let Some(codes) = cat.get(n, l) else {
                bail!("no catalog entry for length {n}, cardinality {l}");
            };
            Ok(Outcome::ok(format_code_list(
                n,
                codes,
                &[format!(
                    "trifferent codes of length {n} and cardinality {l}, {} classes",
                    codes.len()
                )],
            )))
        }
    }
}
