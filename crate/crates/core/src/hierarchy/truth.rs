use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{HierarchyGraph, TokenId};

pub type Chain = Vec<TokenId>;

/// Every distinct root path `token -> ... -> root`, per token, sorted.
pub fn ground_truth_chains(graph: &HierarchyGraph) -> Vec<Vec<Chain>> {
    let mut chains: Vec<Vec<Chain>> = vec![Vec::new(); graph.len()];
    for t in graph.topological_order() {
        let parents = graph.parents(t);
        let mut own = if parents.is_empty() {
            vec![vec![t]]
        } else {
            let mut v = Vec::new();
            for &p in parents {
                for c in &chains[p.index()] {
                    let mut chain = Vec::with_capacity(c.len() + 1);
                    chain.push(t);
                    chain.extend_from_slice(c);
                    v.push(chain);
                }
            }
            v
        };
        own.sort();
        own.dedup();
        chains[t.index()] = own;
    }
    chains
}

/// Number of root paths per token, by dynamic programming.
pub(crate) fn chain_counts(graph: &HierarchyGraph) -> Vec<u64> {
    let mut count = vec![0u64; graph.len()];
    for t in graph.topological_order() {
        let parents = graph.parents(t);
        count[t.index()] = if parents.is_empty() {
            1
        } else {
            parents
                .iter()
                .fold(0u64, |acc, p| acc.saturating_add(count[p.index()]))
        };
    }
    count
}

/// Longest path length to a root, per token.
pub(crate) fn depths(graph: &HierarchyGraph) -> Vec<usize> {
    let mut depth = vec![0usize; graph.len()];
    for t in graph.topological_order() {
        depth[t.index()] = graph
            .parents(t)
            .iter()
            .map(|p| depth[p.index()] + 1)
            .max()
            .unwrap_or(0);
    }
    depth
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityProfile {
    /// root-path multiplicity k -> number of tokens with exactly k paths.
    pub histogram: BTreeMap<usize, usize>,
    /// Tokens with two or more root paths.
    pub ambiguous_tokens: Vec<TokenId>,
    /// Tokens with two or more direct parents.
    pub multi_parent_tokens: Vec<TokenId>,
}

pub fn ambiguity_profile(graph: &HierarchyGraph) -> AmbiguityProfile {
    let counts = chain_counts(graph);
    let mut histogram = BTreeMap::new();
    let mut ambiguous_tokens = Vec::new();
    for (i, &k) in counts.iter().enumerate() {
        *histogram.entry(k as usize).or_insert(0) += 1;
        if k >= 2 {
            ambiguous_tokens.push(TokenId::from(i));
        }
    }
    let multi_parent_tokens = graph
        .tokens()
        .filter(|&t| graph.parents(t).len() >= 2)
        .collect();
    AmbiguityProfile {
        histogram,
        ambiguous_tokens,
        multi_parent_tokens,
    }
}

/// Precomputed reference data for verification.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    parents: Vec<Vec<TokenId>>,
    chains: Vec<Vec<Chain>>,
    depth: Vec<usize>,
    order: Vec<TokenId>,
}

impl GroundTruth {
    pub fn new(graph: &HierarchyGraph) -> Self {
        let parents = graph
            .tokens()
            .map(|t| {
                let mut p = graph.parents(t).to_vec();
                p.sort_unstable();
                p
            })
            .collect();
        GroundTruth {
            parents,
            chains: ground_truth_chains(graph),
            depth: depths(graph),
            order: graph.topological_order(),
        }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// Direct parents, sorted by id.
    pub fn parents(&self, t: TokenId) -> &[TokenId] {
        &self.parents[t.index()]
    }

    pub fn chains(&self, t: TokenId) -> &[Chain] {
        &self.chains[t.index()]
    }

    pub fn depth(&self, t: TokenId) -> usize {
        self.depth[t.index()]
    }

    /// Parents-first order.
    pub fn topological_order(&self) -> &[TokenId] {
        &self.order
    }
}
