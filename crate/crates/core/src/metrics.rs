//! Mean rank and mean average precision for parent retrieval.
//!
//! Candidates for a child `c` are all other tokens, ordered by
//! `(class, value, id)`: tokens in `c`'s causal past come first, ordered by
//! squared proper time; the rest follow, ordered by spatial distance. A true
//! parent's rank is taken after removing `c`'s other true parents.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::exec::{map_indices, Execution};
use crate::geometry::{past_tau2, squared_distance};
use crate::hierarchy::{HierarchyGraph, TokenId};

/// Ranking key of one candidate relative to a child. Version 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankKey {
    pub causal: bool,
    pub value: f64,
    pub token: TokenId,
}

impl RankKey {
    pub fn of(emb: &Embedding, child: TokenId, candidate: TokenId) -> Self {
        let d2 = squared_distance(emb.position(child), emb.position(candidate));
        match past_tau2(emb.time(child) - emb.time(candidate), d2) {
            Some(tau2) => RankKey {
                causal: true,
                value: tau2,
                token: candidate,
            },
            None => RankKey {
                causal: false,
                value: d2.sqrt(),
                token: candidate,
            },
        }
    }

    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .causal
            .cmp(&self.causal)
            .then(self.value.total_cmp(&other.value))
            .then(self.token.cmp(&other.token))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRank {
    pub child: TokenId,
    pub parent: TokenId,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub mean_rank: f64,
    pub map: f64,
    pub per_token_ranks: Vec<EdgeRank>,
}

fn check_edge(
    emb: &Embedding,
    graph: &HierarchyGraph,
    child: TokenId,
    parent: TokenId,
) -> Result<()> {
    for t in [child, parent] {
        if t.index() >= graph.len() {
            return Err(Error::UnknownToken(t.to_string()));
        }
        emb.check_token(t)?;
    }
    if !graph.parents(child).contains(&parent) {
        return Err(Error::InvalidParameters(format!(
            "`{}` -> `{}` is not an edge",
            graph.label(child),
            graph.label(parent)
        )));
    }
    Ok(())
}

/// Filtered rank (1 = best) of `parent` among all tokens other than `child`.
pub fn rank_of_parent(
    emb: &Embedding,
    graph: &HierarchyGraph,
    child: TokenId,
    parent: TokenId,
) -> Result<usize> {
    check_edge(emb, graph, child, parent)?;
    let target = RankKey::of(emb, child, parent);
    let others = graph.parents(child);
    let ahead = (0..emb.len())
        .map(TokenId::from)
        .filter(|&z| z != child && !others.contains(&z))
        .filter(|&z| RankKey::of(emb, child, z).rank_cmp(&target) == Ordering::Less)
        .count();
    Ok(1 + ahead)
}

struct ChildScore {
    ranks: Vec<EdgeRank>,
    average_precision: f64,
}

fn score_child(emb: &Embedding, graph: &HierarchyGraph, child: TokenId) -> ChildScore {
    let mut parents = graph.parents(child).to_vec();
    parents.sort_unstable();
    let keys: Vec<RankKey> = parents
        .iter()
        .map(|&p| RankKey::of(emb, child, p))
        .collect();
    // Unfiltered 1-based positions among every token except the child.
    let mut position = vec![1usize; parents.len()];
    for z in (0..emb.len()).map(TokenId::from) {
        if z == child {
            continue;
        }
        let kz = RankKey::of(emb, child, z);
        for (pos, key) in position.iter_mut().zip(&keys) {
            if kz.rank_cmp(key) == Ordering::Less {
                *pos += 1;
            }
        }
    }
    let ranks = parents
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let other_parents_ahead = keys
                .iter()
                .filter(|k| k.rank_cmp(&keys[i]) == Ordering::Less)
                .count();
            EdgeRank {
                child,
                parent: p,
                rank: position[i] - other_parents_ahead,
            }
        })
        .collect();
    let mut sorted = position.clone();
    sorted.sort_unstable();
    let ap = sorted
        .iter()
        .enumerate()
        .map(|(i, &pos)| (i + 1) as f64 / pos as f64)
        .sum::<f64>()
        / sorted.len() as f64;
    ChildScore {
        ranks,
        average_precision: ap,
    }
}

pub fn evaluate(emb: &Embedding, graph: &HierarchyGraph) -> Result<EvalResult> {
    evaluate_with(emb, graph, Execution::default())
}

pub fn evaluate_with(
    emb: &Embedding,
    graph: &HierarchyGraph,
    exec: Execution,
) -> Result<EvalResult> {
    if graph.edges().is_empty() {
        return Err(Error::NoEdges);
    }
    if emb.len() != graph.len() {
        return Err(Error::InvalidParameters(format!(
            "embedding has {} tokens, graph has {}",
            emb.len(),
            graph.len()
        )));
    }
    let children: Vec<TokenId> = graph
        .tokens()
        .filter(|&t| !graph.parents(t).is_empty())
        .collect();
    let scores = map_indices(exec, children.len(), |i| {
        score_child(emb, graph, children[i])
    });

    let per_token_ranks: Vec<EdgeRank> = scores
        .iter()
        .flat_map(|s| s.ranks.iter().copied())
        .collect();
    let mean_rank =
        per_token_ranks.iter().map(|r| r.rank as f64).sum::<f64>() / per_token_ranks.len() as f64;
    let map = scores.iter().map(|s| s.average_precision).sum::<f64>() / scores.len() as f64;
    Ok(EvalResult {
        mean_rank,
        map,
        per_token_ranks,
    })
}
