use std::time::Instant;

use causal_hierarchy::hierarchy::{generate_hierarchy, Ambiguity, GeneratorParams};
use causal_hierarchy::metrics::evaluate;
use causal_hierarchy::repair::perfect_embed;
use causal_hierarchy::EmbeddingConfig;

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().unwrap())
        .collect();
    let n = args.first().copied().unwrap_or(10_000);
    let depth = args.get(1).copied().unwrap_or(20);
    let two = args.get(2).copied().unwrap_or(0);
    let branching = args.get(3).copied().unwrap_or(64);
    for seed in 0..args.get(4).copied().unwrap_or(3) as u64 {
        let ambiguity = if two > 0 {
            Ambiguity::Count(two)
        } else {
            Ambiguity::None
        };
        let g = generate_hierarchy(&GeneratorParams {
            n,
            max_depth: depth,
            branching,
            ambiguity,
            seed,
        })
        .unwrap();
        let start = Instant::now();
        let out = perfect_embed(
            &g,
            &EmbeddingConfig {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        let ev = evaluate(&out.embedding, &g).unwrap();
        println!(
            "seed={seed} pre={:.4} perfect={} rounds={} sweeps={} mean_rank={} map={} secs={:.2}",
            out.initial_report.perfect_fraction(),
            out.is_perfect(),
            out.history.len(),
            out.embedding.sweeps_run(),
            ev.mean_rank,
            ev.map,
            start.elapsed().as_secs_f64()
        );
    }
}
