use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GraphMode, HierarchyGraph, TokenId};
use crate::error::{Error, Result};

/// How many leaves receive a second parent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ambiguity {
    None,
    /// Fraction of eligible leaves, in `[0, 1)`.
    Fraction(f64),
    /// Exact number of leaves.
    Count(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub max_depth: usize,
    /// Maximum children per token.
    pub branching: usize,
    pub ambiguity: Ambiguity,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n: 1000,
            max_depth: 20,
            branching: 64,
            ambiguity: Ambiguity::None,
            seed: 0,
        }
    }
}

fn capacity(max_depth: usize, branching: usize) -> usize {
    let mut total = 1usize;
    let mut level = 1usize;
    for _ in 0..max_depth {
        level = level.saturating_mul(branching);
        total = total.saturating_add(level);
        if total == usize::MAX {
            break;
        }
    }
    total
}

/// Random rooted hierarchy by uniform attachment under depth and fan-out
/// caps, optionally with second parents on some leaves. Token `t0` is the
/// root and every parent has a smaller id than its children.
pub fn generate_hierarchy(params: &GeneratorParams) -> Result<HierarchyGraph> {
    let GeneratorParams {
        n,
        max_depth,
        branching,
        ambiguity,
        seed,
    } = *params;
    if n == 0 {
        return Err(Error::InvalidParameters("n must be at least 1".into()));
    }
    if n > 1 && (branching == 0 || capacity(max_depth, branching) < n) {
        return Err(Error::InvalidParameters(format!(
            "{n} tokens do not fit in depth {max_depth} with branching {branching}"
        )));
    }
    if let Ambiguity::Fraction(f) = ambiguity {
        if !(0.0..1.0).contains(&f) {
            return Err(Error::InvalidParameters(format!(
                "two-parent fraction {f} outside [0, 1)"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut fanout = vec![0usize; n];
    let mut open: Vec<usize> = if max_depth > 0 && branching > 0 {
        vec![0]
    } else {
        Vec::new()
    };

    for i in 1..n {
        let slot = rng.random_range(0..open.len());
        let p = open[slot];
        parent[i] = p;
        depth[i] = depth[p] + 1;
        fanout[p] += 1;
        if fanout[p] == branching {
            open.swap_remove(slot);
        }
        if depth[i] < max_depth {
            open.push(i);
        }
    }

    let mut by_depth: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
    for i in 0..n {
        if fanout[i] > 0 {
            by_depth[depth[i]].push(i);
        }
    }
    // A leaf is eligible when some other internal token sits at its parent's depth.
    let eligible: Vec<usize> = (0..n)
        .filter(|&i| fanout[i] == 0 && depth[i] >= 2 && by_depth[depth[i] - 1].len() >= 2)
        .collect();
    let wanted = match ambiguity {
        Ambiguity::None => 0,
        Ambiguity::Fraction(f) => (f * eligible.len() as f64).round() as usize,
        Ambiguity::Count(k) => k,
    };
    if wanted > eligible.len() {
        return Err(Error::InvalidParameters(format!(
            "{wanted} two-parent leaves requested but only {} are eligible",
            eligible.len()
        )));
    }
    let mut chosen: Vec<usize> = sample(&mut rng, eligible.len(), wanted)
        .into_iter()
        .map(|k| eligible[k])
        .collect();
    chosen.sort_unstable();

    let mut second = vec![usize::MAX; n];
    for &leaf in &chosen {
        let pool = &by_depth[depth[leaf] - 1];
        loop {
            let q = pool[rng.random_range(0..pool.len())];
            if q != parent[leaf] {
                second[leaf] = q;
                break;
            }
        }
    }

    let labels: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let mut edges = Vec::with_capacity(n - 1 + wanted);
    for i in 1..n {
        edges.push((TokenId::from(i), TokenId::from(parent[i])));
        if second[i] != usize::MAX {
            edges.push((TokenId::from(i), TokenId::from(second[i])));
        }
    }
    let mode = if wanted == 0 {
        GraphMode::Tree
    } else {
        GraphMode::Dag {
            multiple_roots: false,
        }
    };
    HierarchyGraph::new(labels, edges, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::ambiguity_profile;
    use std::collections::BTreeMap;

    #[test]
    fn single_token() {
        let g = generate_hierarchy(&GeneratorParams {
            n: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let p = GeneratorParams {
            n: 500,
            max_depth: 10,
            branching: 8,
            ambiguity: Ambiguity::Count(10),
            seed: 42,
        };
        let a = generate_hierarchy(&p).unwrap();
        let b = generate_hierarchy(&p).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = generate_hierarchy(&GeneratorParams { seed: 43, ..p }).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn infeasible_shapes_are_rejected() {
        let chain = GeneratorParams {
            n: 5,
            max_depth: 3,
            branching: 1,
            ..Default::default()
        };
        assert!(matches!(
            generate_hierarchy(&chain),
            Err(Error::InvalidParameters(_))
        ));
        let ok = GeneratorParams {
            n: 4,
            max_depth: 3,
            branching: 1,
            ..Default::default()
        };
        assert!(generate_hierarchy(&ok).unwrap().is_tree());
        let full = GeneratorParams {
            n: 15,
            max_depth: 3,
            branching: 2,
            ..Default::default()
        };
        assert_eq!(generate_hierarchy(&full).unwrap().len(), 15);
        let frac = GeneratorParams {
            ambiguity: Ambiguity::Fraction(1.0),
            ..Default::default()
        };
        assert!(generate_hierarchy(&frac).is_err());
    }

    #[test]
    fn zero_fraction_yields_tree() {
        for seed in 0..20 {
            let p = GeneratorParams {
                n: 200,
                max_depth: 9,
                branching: 5,
                ambiguity: Ambiguity::Fraction(0.0),
                seed,
            };
            let g = generate_hierarchy(&p).unwrap();
            assert!(g.is_tree());
            assert_eq!(g.edges().len(), 199);
        }
    }

    #[test]
    fn mammal_scale_instance() {
        let p = GeneratorParams {
            n: 1182,
            max_depth: 10,
            branching: 64,
            ambiguity: Ambiguity::Count(10),
            seed: 7,
        };
        let g = generate_hierarchy(&p).unwrap();
        assert_eq!(g.len(), 1182);
        let profile = ambiguity_profile(&g);
        assert_eq!(profile.histogram, BTreeMap::from([(1, 1172), (2, 10)]));
        let chains: usize = profile.histogram.iter().map(|(k, v)| k * v).sum();
        assert_eq!(chains, 1192);
    }

    #[test]
    fn fraction_rounds_over_eligible_leaves() {
        let p = GeneratorParams {
            n: 400,
            max_depth: 8,
            branching: 6,
            ambiguity: Ambiguity::Fraction(0.1),
            seed: 1,
        };
        let g = generate_hierarchy(&p).unwrap();
        let k = ambiguity_profile(&g).multi_parent_tokens.len();
        assert!(k > 0 && k < 400 / 5, "{k}");
    }
}
