use std::hint::black_box;

use causal_hierarchy::embedding::{embed, find_violations_with, init_embedding};
use causal_hierarchy::hierarchy::{
    generate_hierarchy, transitive_closure, Ambiguity, GeneratorParams, GroundTruth,
};
use causal_hierarchy::metrics::evaluate_with;
use causal_hierarchy::repair::{perfect_embed, verify_with};
use causal_hierarchy::retrieval::ParentTable;
use causal_hierarchy::{EmbeddingConfig, Execution};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn hierarchy(n: usize) -> causal_hierarchy::HierarchyGraph {
    generate_hierarchy(&GeneratorParams {
        n,
        max_depth: 12,
        branching: 32,
        ambiguity: Ambiguity::Count(n / 100),
        seed: 7,
    })
    .unwrap()
}

fn stages(c: &mut Criterion) {
    for n in [1_000, 4_000] {
        let graph = hierarchy(n);
        let config = EmbeddingConfig {
            seed: 7,
            ..Default::default()
        };
        let pairs = transitive_closure(&graph);
        let raw = init_embedding(graph.len(), &config).unwrap();
        let fitted = perfect_embed(&graph, &config).unwrap().embedding;
        let truth = GroundTruth::new(&graph);

        let mut group = c.benchmark_group(format!("n{n}"));
        group.sample_size(10);
        for (name, exec) in MODES {
            group.bench_function(BenchmarkId::new("find_violations", name), |b| {
                b.iter(|| find_violations_with(black_box(&raw), &pairs, exec).unwrap())
            });
            group.bench_function(BenchmarkId::new("parent_table", name), |b| {
                b.iter(|| ParentTable::build_with(black_box(&fitted), exec))
            });
            group.bench_function(BenchmarkId::new("verify", name), |b| {
                b.iter(|| verify_with(black_box(&fitted), &truth, exec))
            });
            group.bench_function(BenchmarkId::new("evaluate", name), |b| {
                b.iter(|| evaluate_with(black_box(&fitted), &graph, exec).unwrap())
            });
        }
        group.bench_function("embed", |b| {
            b.iter(|| embed(&pairs, graph.len(), &config).unwrap())
        });
        group.finish();
    }
}

criterion_group!(benches, stages);
criterion_main!(benches);
