use serde::{Deserialize, Serialize};

use super::{HierarchyGraph, TokenId};
use crate::error::{Error, Result};

/// All `(descendant, ancestor)` pairs of a hierarchy, sorted by `(X, Y)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosurePairSet {
    pairs: Vec<(TokenId, TokenId)>,
}

impl ClosurePairSet {
    pub fn pairs(&self) -> &[(TokenId, TokenId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, descendant: TokenId, ancestor: TokenId) -> bool {
        self.pairs.binary_search(&(descendant, ancestor)).is_ok()
    }

    /// One past the largest token id referenced by any pair.
    pub fn token_bound(&self) -> usize {
        self.pairs
            .iter()
            .map(|&(x, y)| x.max(y).index() + 1)
            .max()
            .unwrap_or(0)
    }
}

pub fn transitive_closure(graph: &HierarchyGraph) -> ClosurePairSet {
    close_pairs(graph.len(), graph.edges()).expect("validated graphs are acyclic")
}

/// Transitive closure of an arbitrary `(child, parent)` relation over
/// `n` tokens, computed per node from memoized parent ancestor sets.
pub fn close_pairs(n: usize, edges: &[(TokenId, TokenId)]) -> Result<ClosurePairSet> {
    let mut parents: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(c, p) in edges {
        if c.index() >= n || p.index() >= n {
            return Err(Error::UnknownToken(c.max(p).to_string()));
        }
        if c == p {
            return Err(Error::SelfLoop {
                token: c.to_string(),
            });
        }
        parents[c.index()].push(p.0);
        children[p.index()].push(c.0);
    }

    let mut pending: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut order: Vec<u32> = (0..n as u32)
        .filter(|&i| pending[i as usize] == 0)
        .collect();
    let mut head = 0;
    while head < order.len() {
        let t = order[head] as usize;
        head += 1;
        for &c in &children[t] {
            pending[c as usize] -= 1;
            if pending[c as usize] == 0 {
                order.push(c);
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&i| pending[i] > 0).unwrap_or(0);
        return Err(Error::Cycle {
            token: TokenId::from(stuck).to_string(),
        });
    }

    let mut ancestors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &t in &order {
        let t = t as usize;
        let mut acc: Vec<u32> = Vec::new();
        for &p in &parents[t] {
            acc.push(p);
            acc.extend_from_slice(&ancestors[p as usize]);
        }
        acc.sort_unstable();
        acc.dedup();
        ancestors[t] = acc;
    }

    let pairs = ancestors
        .iter()
        .enumerate()
        .flat_map(|(x, anc)| anc.iter().map(move |&y| (TokenId::from(x), TokenId(y))))
        .collect();
    Ok(ClosurePairSet { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{load_edge_list, GraphMode};
    use proptest::prelude::*;

    fn t(i: u32) -> TokenId {
        TokenId(i)
    }

    #[test]
    fn three_chain() {
        let g = load_edge_list("a\tb\nb\tc\n".as_bytes(), GraphMode::Tree).unwrap();
        let c = transitive_closure(&g);
        assert_eq!(c.pairs(), [(t(0), t(1)), (t(0), t(2)), (t(1), t(2))]);
    }

    #[test]
    fn single_edge() {
        let g = load_edge_list("a\tb\n".as_bytes(), GraphMode::Tree).unwrap();
        assert_eq!(transitive_closure(&g).pairs(), [(t(0), t(1))]);
    }

    #[test]
    fn diamond_deduplicates_shared_ancestor() {
        let g =
            load_edge_list("a\tb\na\tc\nb\td\nc\td\n".as_bytes(), GraphMode::default()).unwrap();
        let c = transitive_closure(&g);
        assert_eq!(c.len(), 5);
        assert!(c.contains(t(0), t(3)));
    }

    #[test]
    fn cyclic_relation_is_rejected() {
        assert!(close_pairs(2, &[(t(0), t(1)), (t(1), t(0))]).is_err());
    }

    /// Random DAG edges: each node i > 0 links to up to three lower ids.
    fn dag_edges() -> impl Strategy<Value = (usize, Vec<(TokenId, TokenId)>)> {
        (2usize..40).prop_flat_map(|n| {
            proptest::collection::vec((1..n, 0..n, 0usize..3), 1..(3 * n)).prop_map(move |raw| {
                let mut edges: Vec<(TokenId, TokenId)> = raw
                    .into_iter()
                    .filter(|&(c, p, _)| p < c)
                    .map(|(c, p, _)| (TokenId::from(c), TokenId::from(p)))
                    .collect();
                edges.sort();
                edges.dedup();
                (n, edges)
            })
        })
    }

    proptest! {
        #[test]
        fn closure_is_idempotent_and_transitive((n, edges) in dag_edges()) {
            let closed = close_pairs(n, &edges).unwrap();
            let again = close_pairs(n, closed.pairs()).unwrap();
            prop_assert_eq!(&closed, &again);
            prop_assert!(closed.len() >= edges.len());
            for &(c, p) in &edges {
                prop_assert!(closed.contains(c, p));
            }
            for &(a, b) in closed.pairs() {
                prop_assert!(a != b);
                for &(b2, c) in closed.pairs() {
                    if b2 == b {
                        prop_assert!(closed.contains(a, c));
                    }
                }
            }
        }
    }
}
