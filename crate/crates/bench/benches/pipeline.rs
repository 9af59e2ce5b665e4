use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lyphforge::analysis::neurulate;
use lyphforge::document::{parse_model, serialize_generated};
use lyphforge::generator::generate;
use lyphforge::layout::{layout, LayoutConfig};
use lyphforge_bench::{chain_model, graph_model};

fn bench_generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    for chains in [4, 16, 64] {
        let spec = chain_model(chains, 10);
        group.bench_with_input(BenchmarkId::from_parameter(chains), &spec, |b, spec| {
            b.iter(|| generate(black_box(spec)).unwrap())
        });
    }
    group.finish();
}

fn bench_reload(c: &mut Criterion) {
    let text = serialize_generated(&generate(&chain_model(16, 10)).unwrap().model);
    c.bench_function("reload", |b| {
        b.iter(|| generate(&parse_model(black_box(&text)).unwrap()).unwrap())
    });
}

fn bench_layout(c: &mut Criterion) {
    let mut group = c.benchmark_group("layout");
    group.sample_size(10);
    for chains in [2, 8] {
        let model = generate(&chain_model(chains, 10))
            .unwrap()
            .model
            .into_model();
        let cfg = LayoutConfig {
            iterations: 100,
            ..LayoutConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(chains), &model, |b, m| {
            b.iter(|| layout(black_box(m), &cfg))
        });
    }
    group.finish();
}

fn bench_neurulate(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let nodes = 400;
    let ends: Vec<(usize, usize)> = (0..1000)
        .map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes)))
        .collect();
    let model = graph_model(nodes, &ends, &["TUBE", "BAG-left", "BAG-right", "CYST"]);
    c.bench_function("neurulate", |b| b.iter(|| neurulate(black_box(&model))));
}

criterion_group!(
    benches,
    bench_generate,
    bench_reload,
    bench_layout,
    bench_neurulate
);
criterion_main!(benches);
