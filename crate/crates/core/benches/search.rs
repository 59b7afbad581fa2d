//! Single-worker versus full-pool timings of the two search engines.
//!
//! `cargo bench` measures the rayon build; `cargo bench
//! --no-default-features` measures the sequential fallback under the same
//! names.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use trifferent::enumeration::{orderly_generate, GenerateConfig};
use trifferent::extension::{extend_all, ExtendOptions};
use trifferent::par::is_parallel;
use trifferent::Code;

fn mode() -> &'static str {
    if is_parallel() {
        "rayon"
    } else {
        "sequential"
    }
}

fn worker_counts() -> Vec<(String, Option<usize>)> {
    let mut v = vec![("jobs=1".to_string(), Some(1))];
    if is_parallel() {
        v.push(("jobs=all".to_string(), None));
    }
    v
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("census_n5/{}", mode()));
    group.sample_size(20);
    for (label, jobs) in worker_counts() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                let mut cfg = GenerateConfig::new(5);
                cfg.jobs = jobs;
                orderly_generate(&cfg, &|_| {}).unwrap()
            })
        });
    }
    group.finish();
}

fn extension(c: &mut Criterion) {
    let mut cfg = GenerateConfig::new(5);
    cfg.min_card = 8;
    cfg.store_min_card = Some(8);
    let bases: Vec<Code> = orderly_generate(&cfg, &|_| {}).unwrap().stored;
    let mut group = c.benchmark_group(format!("extend_5_to_6/{}", mode()));
    group.sample_size(10);
    for (label, jobs) in worker_counts() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                let opts = ExtendOptions { prune: true, jobs };
                extend_all(&bases, 12, opts).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, census, extension);
criterion_main!(benches);
