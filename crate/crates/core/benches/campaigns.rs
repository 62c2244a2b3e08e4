use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use contrax::harness::{run_campaign_with, Execution, GenConfig};

fn campaigns(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaigns");
    group.sample_size(10);
    for (name, trials) in [("tricks", 40), ("path", 40), ("semifree", 20), ("mc-contr", 8)] {
        let cfg = GenConfig::for_campaign(name).with_seed(1);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), &trials, |b, &n| {
                b.iter(|| run_campaign_with(name, n, &cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, campaigns);
criterion_main!(benches);
