//! Hierarchy reconstruction from geometry alone.
//!
//! The ancestor of a token is the event in its past light cone with the
//! smallest squared proper time `tau2 = -Δs²`. Iterating that choice until
//! an event with an empty past yields the token's chain. A second candidate
//! within `eps1 / 10` of the first on the `tau2` scale is reported as a
//! second parent.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::exec::{map_indices, Execution};
use crate::geometry::{past_tau2, squared_distance};
use crate::hierarchy::TokenId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalCandidate {
    pub token: TokenId,
    /// Squared proper time to the query token, `>= 0`.
    pub tau2: f64,
}

impl CausalCandidate {
    #[inline]
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.tau2
            .total_cmp(&other.tau2)
            .then(self.token.cmp(&other.token))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainResult {
    pub query: TokenId,
    /// `query, ancestor, ..., root`.
    pub chain: Vec<TokenId>,
    /// Second parent detected at each step, `chain.len() - 1` entries.
    pub extra_parents: Vec<Option<TokenId>>,
}

#[inline]
fn candidate(emb: &Embedding, query: TokenId, other: TokenId) -> Option<CausalCandidate> {
    let dt = emb.time(query) - emb.time(other);
    let d2 = squared_distance(emb.position(query), emb.position(other));
    past_tau2(dt, d2).map(|tau2| CausalCandidate { token: other, tau2 })
}

/// Every token in the causal past of `x`, ascending by `(tau2, id)`.
///
/// This full scan is the reference that [`ParentTable`] must reproduce.
pub fn past_cone(emb: &Embedding, x: TokenId) -> Result<Vec<CausalCandidate>> {
    emb.check_token(x)?;
    let mut out: Vec<CausalCandidate> = (0..emb.len())
        .map(TokenId::from)
        .filter(|&z| z != x)
        .filter_map(|z| candidate(emb, x, z))
        .collect();
    out.sort_by(CausalCandidate::cmp_key);
    Ok(out)
}

/// The two nearest causal candidates of one token.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Nearest {
    pub first: Option<CausalCandidate>,
    pub second: Option<CausalCandidate>,
}

impl Nearest {
    #[inline]
    fn offer(&mut self, c: CausalCandidate) {
        match self.first {
            None => self.first = Some(c),
            Some(f) if c.cmp_key(&f) == Ordering::Less => {
                self.second = self.first;
                self.first = Some(c);
            }
            _ => match self.second {
                Some(s) if c.cmp_key(&s) != Ordering::Less => {}
                _ => self.second = Some(c),
            },
        }
    }

    /// One or two parents under the given `tau2` proximity threshold.
    pub fn parents(&self, threshold: f64) -> Vec<TokenId> {
        match (self.first, self.second) {
            (None, _) => Vec::new(),
            (Some(a), Some(b)) if b.tau2 - a.tau2 <= threshold => vec![a.token, b.token],
            (Some(a), _) => vec![a.token],
        }
    }
}

pub(crate) fn nearest_scan(emb: &Embedding, x: TokenId) -> Nearest {
    let mut best = Nearest::default();
    for z in (0..emb.len()).map(TokenId::from) {
        if z != x {
            if let Some(c) = candidate(emb, x, z) {
                best.offer(c);
            }
        }
    }
    best
}

pub fn nearest_ancestor(emb: &Embedding, x: TokenId) -> Result<Option<TokenId>> {
    emb.check_token(x)?;
    Ok(nearest_scan(emb, x).first.map(|c| c.token))
}

/// `[P1]` or `[P1, P2]`; errors when `x` has an empty causal past.
pub fn detect_parents(emb: &Embedding, x: TokenId) -> Result<Vec<TokenId>> {
    emb.check_token(x)?;
    let parents = nearest_scan(emb, x).parents(emb.config().two_parent_threshold());
    if parents.is_empty() {
        return Err(Error::EmptyCausalPast(x));
    }
    Ok(parents)
}

pub fn retrieve_chain(emb: &Embedding, x: TokenId) -> Result<ChainResult> {
    emb.check_token(x)?;
    let threshold = emb.config().two_parent_threshold();
    walk_chain(
        x,
        emb.len(),
        |t| Ok(nearest_scan(emb, t).parents(threshold)),
    )
}

fn walk_chain<F>(x: TokenId, n: usize, mut parents_of: F) -> Result<ChainResult>
where
    F: FnMut(TokenId) -> Result<Vec<TokenId>>,
{
    let mut seen = vec![false; n];
    let mut chain = vec![x];
    let mut extra_parents = Vec::new();
    seen[x.index()] = true;
    let mut cur = x;
    loop {
        let parents = parents_of(cur)?;
        let Some(&next) = parents.first() else { break };
        if std::mem::replace(&mut seen[next.index()], true) {
            return Err(Error::RetrievalCycle(next));
        }
        extra_parents.push(parents.get(1).copied());
        chain.push(next);
        cur = next;
    }
    Ok(ChainResult {
        query: x,
        chain,
        extra_parents,
    })
}

/// Nearest two candidates for every token, computed in one pass.
///
/// Tokens are scanned against a time-sorted copy of the embedding so each
/// query only visits strictly earlier events; results equal [`past_cone`]'s
/// first two entries exactly.
#[derive(Clone, Debug)]
pub struct ParentTable {
    nearest: Vec<Nearest>,
    threshold: f64,
}

impl ParentTable {
    pub fn build(emb: &Embedding) -> Self {
        Self::build_with(emb, Execution::default())
    }

    pub fn build_with(emb: &Embedding, exec: Execution) -> Self {
        let n = emb.len();
        let dim = emb.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| emb.times()[a].total_cmp(&emb.times()[b]).then(a.cmp(&b)));
        let times: Vec<f64> = order.iter().map(|&i| emb.times()[i]).collect();
        let mut coords = Vec::with_capacity(n * dim);
        for &i in &order {
            coords.extend_from_slice(emb.position(TokenId::from(i)));
        }

        let nearest = map_indices(exec, n, |i| {
            let x = TokenId::from(i);
            let tx = emb.time(x);
            let px = emb.position(x);
            let end = times.partition_point(|&t| t < tx);
            let mut best = Nearest::default();
            for k in 0..end {
                let d2 = squared_distance(px, &coords[k * dim..(k + 1) * dim]);
                if let Some(tau2) = past_tau2(tx - times[k], d2) {
                    best.offer(CausalCandidate {
                        token: TokenId::from(order[k]),
                        tau2,
                    });
                }
            }
            best
        });
        ParentTable {
            nearest,
            threshold: emb.config().two_parent_threshold(),
        }
    }

    pub fn len(&self) -> usize {
        self.nearest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nearest.is_empty()
    }

    pub fn nearest(&self, x: TokenId) -> &Nearest {
        &self.nearest[x.index()]
    }

    pub fn nearest_ancestor(&self, x: TokenId) -> Option<TokenId> {
        self.nearest[x.index()].first.map(|c| c.token)
    }

    /// Detected parents; empty for tokens with no causal past.
    pub fn parents(&self, x: TokenId) -> Vec<TokenId> {
        self.nearest[x.index()].parents(self.threshold)
    }

    pub fn chain(&self, x: TokenId) -> Result<ChainResult> {
        walk_chain(x, self.len(), |t| Ok(self.parents(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{embed, EmbeddingConfig};
    use crate::geometry::Event;
    use crate::hierarchy::{generate_hierarchy, transitive_closure, GeneratorParams};

    fn emb(events: &[(f64, [f64; 2])]) -> Embedding {
        let ev: Vec<Event> = events.iter().map(|&(t, x)| Event::new(t, x)).collect();
        Embedding::from_events(&ev, EmbeddingConfig::default()).unwrap()
    }

    fn t(i: u32) -> TokenId {
        TokenId(i)
    }

    /// L = 0, M = 1, R = 2.
    fn lmr() -> Embedding {
        emb(&[(1.3, [1.0, 0.0]), (0.6, [0.5, 0.0]), (0.0, [0.0, 0.0])])
    }

    /// Brute force over all pairs of the three events, written out by hand.
    #[test]
    fn three_event_cone() {
        let e = lmr();
        let cone = past_cone(&e, t(0)).unwrap();
        assert_eq!(cone.len(), 2);
        assert_eq!(cone[0].token, t(1));
        assert!((cone[0].tau2 - (0.7f64 * 0.7 - 0.25)).abs() < 1e-12);
        assert!((cone[0].tau2 - 0.24).abs() < 1e-12);
        assert_eq!(cone[1].token, t(2));
        assert!((cone[1].tau2 - 0.69).abs() < 1e-12);
        assert!(past_cone(&e, t(2)).unwrap().is_empty());
        assert_eq!(nearest_ancestor(&e, t(0)).unwrap(), Some(t(1)));
        assert_eq!(nearest_ancestor(&e, t(2)).unwrap(), None);
        assert_eq!(
            retrieve_chain(&e, t(0)).unwrap().chain,
            vec![t(0), t(1), t(2)]
        );
        assert_eq!(retrieve_chain(&e, t(2)).unwrap().chain, vec![t(2)]);
    }

    #[test]
    fn spacelike_event_has_empty_cone() {
        let e = emb(&[(0.0, [0.0, 0.0]), (0.5, [3.0, 0.0]), (0.1, [0.0, 2.0])]);
        for i in 0..3 {
            assert!(past_cone(&e, t(i)).unwrap().is_empty());
        }
        assert!(matches!(
            detect_parents(&e, t(1)),
            Err(Error::EmptyCausalPast(_))
        ));
        assert!(matches!(past_cone(&e, t(9)), Err(Error::UnknownToken(_))));
    }

    #[test]
    fn two_parent_threshold() {
        // Child at origin + time; parents at distances chosen to set the tau2 gap.
        let tau2 = |dt: f64, d: f64| dt * dt - d * d;
        // gap 0.1: single parent
        let e = emb(&[(1.0, [0.0, 0.0]), (0.5, [0.3, 0.0]), (0.5, [0.0, 0.0])]);
        assert!((tau2(0.5, 0.0) - tau2(0.5, 0.3) - 0.09).abs() < 1e-12);
        assert_eq!(detect_parents(&e, t(0)).unwrap(), vec![t(1)]);
        // gap ~1e-8: two parents
        let d = (0.25f64 - 1e-4).sqrt();
        let d2 = (0.25f64 - 1e-4 - 1e-8).sqrt();
        let e = emb(&[(1.0, [0.0, 0.0]), (0.5, [d, 0.0]), (0.5, [0.0, d2])]);
        assert_eq!(detect_parents(&e, t(0)).unwrap(), vec![t(1), t(2)]);
        let chain = retrieve_chain(&e, t(0)).unwrap();
        assert_eq!(chain.extra_parents, vec![Some(t(2))]);
    }

    #[test]
    fn parent_table_matches_brute_force() {
        for seed in 0..4 {
            let g = generate_hierarchy(&GeneratorParams {
                n: 400,
                max_depth: 10,
                branching: 6,
                seed,
                ..Default::default()
            })
            .unwrap();
            let e = embed(
                &transitive_closure(&g),
                g.len(),
                &EmbeddingConfig {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            let seq = ParentTable::build_with(&e, Execution::Sequential);
            let par = ParentTable::build_with(&e, Execution::Parallel);
            for x in g.tokens() {
                let cone = past_cone(&e, x).unwrap();
                let want = Nearest {
                    first: cone.first().copied(),
                    second: cone.get(1).copied(),
                };
                assert_eq!(*seq.nearest(x), want);
                assert_eq!(*par.nearest(x), want);
                if x.index() % 37 == 0 {
                    assert_eq!(seq.chain(x).unwrap(), retrieve_chain(&e, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn adding_spacelike_token_keeps_nearest() {
        let base = lmr();
        let mut events = base.events();
        // Far away in space at L's time: spacelike to L.
        events.push(Event::new(1.3, [10.0, 10.0]));
        let e = Embedding::from_events(&events, EmbeddingConfig::default()).unwrap();
        assert_eq!(
            nearest_ancestor(&e, t(0)).unwrap(),
            nearest_ancestor(&base, t(0)).unwrap()
        );
    }
}
