use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pstwalk::extremal::laplacian_spread_oracle;
use pstwalk::families::{catalog_brute_force, CatalogFamily};
use pstwalk::par::Execution;
use pstwalk::{HamiltonianKind, ToleranceConfig};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn catalogs(c: &mut Criterion) {
    let cfg = ToleranceConfig::default();
    let mut group = c.benchmark_group("catalog_brute_force");
    group.sample_size(10);
    for n in [8, 12] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| {
                    catalog_brute_force(black_box(CatalogFamily::Path(n)), HamiltonianKind::Adjacency, &cfg, exec)
                        .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn spread_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian_spread_oracle");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 6), &6, |b, &n| {
            b.iter(|| laplacian_spread_oracle(black_box(n), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, catalogs, spread_oracle);
criterion_main!(benches);
