//! Hierarchical input data: token graphs, closures, and ground truth.
//!
//! A [`HierarchyGraph`] holds tokens with dense ids `0..n` and oriented
//! `child -> parent` ("is-a") edges. Everything downstream treats it as
//! immutable ground truth.

mod closure;
mod generate;
mod io;
mod truth;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use closure::{close_pairs, transitive_closure, ClosurePairSet};
pub use generate::{generate_hierarchy, Ambiguity, GeneratorParams};
pub use io::{load_edge_list, write_edge_list, GraphSummary};
pub use truth::{ambiguity_profile, ground_truth_chains, AmbiguityProfile, GroundTruth};

/// Dense token index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u32);

impl TokenId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for TokenId {
    fn from(i: usize) -> Self {
        TokenId(u32::try_from(i).expect("token index exceeds u32"))
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Structural rules enforced at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphMode {
    /// At most one parent per token and exactly one root.
    Tree,
    /// Any number of parents. Multiple roots only when `multiple_roots` is set.
    Dag { multiple_roots: bool },
}

impl Default for GraphMode {
    fn default() -> Self {
        GraphMode::Dag {
            multiple_roots: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HierarchyGraph {
    labels: Vec<String>,
    index: HashMap<String, TokenId>,
    edges: Vec<(TokenId, TokenId)>,
    parents: Vec<Vec<TokenId>>,
    children: Vec<Vec<TokenId>>,
    mode: GraphMode,
}

impl HierarchyGraph {
    /// Builds and validates a graph from labels and `(child, parent)` edges.
    pub fn new(
        labels: Vec<String>,
        edges: Vec<(TokenId, TokenId)>,
        mode: GraphMode,
    ) -> Result<Self> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), TokenId::from(i)).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }

        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(c, p) in &edges {
            for id in [c, p] {
                if id.index() >= n {
                    return Err(Error::UnknownToken(id.to_string()));
                }
            }
            if c == p {
                return Err(Error::SelfLoop {
                    token: labels[c.index()].clone(),
                });
            }
            if parents[c.index()].contains(&p) {
                return Err(Error::DuplicateEdge {
                    child: labels[c.index()].clone(),
                    parent: labels[p.index()].clone(),
                });
            }
            parents[c.index()].push(p);
            children[p.index()].push(c);
        }

        let graph = HierarchyGraph {
            labels,
            index,
            edges,
            parents,
            children,
            mode,
        };
        graph.check_acyclic()?;
        graph.check_mode()?;
        Ok(graph)
    }

    fn check_acyclic(&self) -> Result<()> {
        // Iterative three-colour DFS along parent edges.
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.len();
        let mut colour = vec![WHITE; n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            if colour[start] != WHITE {
                continue;
            }
            colour[start] = GREY;
            stack.push((start, 0));
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&p) = self.parents[node].get(*next) {
                    *next += 1;
                    match colour[p.index()] {
                        WHITE => {
                            colour[p.index()] = GREY;
                            stack.push((p.index(), 0));
                        }
                        GREY => {
                            return Err(Error::Cycle {
                                token: self.labels[p.index()].clone(),
                            });
                        }
                        _ => {}
                    }
                } else {
                    colour[node] = BLACK;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    fn check_mode(&self) -> Result<()> {
        let roots = self.roots().count();
        match self.mode {
            GraphMode::Tree => {
                if let Some(i) = self.parents.iter().position(|p| p.len() > 1) {
                    return Err(Error::MultipleParents {
                        token: self.labels[i].clone(),
                        count: self.parents[i].len(),
                    });
                }
                if roots != 1 {
                    return Err(Error::RootCount { count: roots });
                }
            }
            GraphMode::Dag { multiple_roots } => {
                if roots == 0 || (!multiple_roots && roots > 1) {
                    return Err(Error::RootCount { count: roots });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn tokens(&self) -> impl ExactSizeIterator<Item = TokenId> {
        (0..self.len()).map(TokenId::from)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: TokenId) -> &str {
        &self.labels[id.index()]
    }

    pub fn id(&self, label: &str) -> Option<TokenId> {
        self.index.get(label).copied()
    }

    /// Edges as `(child, parent)`, in insertion order.
    pub fn edges(&self) -> &[(TokenId, TokenId)] {
        &self.edges
    }

    pub fn parents(&self, id: TokenId) -> &[TokenId] {
        &self.parents[id.index()]
    }

    pub fn children(&self, id: TokenId) -> &[TokenId] {
        &self.children[id.index()]
    }

    pub fn roots(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.tokens()
            .filter(|&t| self.parents[t.index()].is_empty())
    }

    pub fn is_tree(&self) -> bool {
        self.parents.iter().all(|p| p.len() <= 1) && self.roots().count() == 1
    }

    /// Tokens ordered so that every parent precedes its children.
    pub fn topological_order(&self) -> Vec<TokenId> {
        let n = self.len();
        let mut pending: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut order: Vec<TokenId> = self.roots().collect();
        let mut head = 0;
        while head < order.len() {
            let t = order[head];
            head += 1;
            for &c in &self.children[t.index()] {
                pending[c.index()] -= 1;
                if pending[c.index()] == 0 {
                    order.push(c);
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rejects_self_loop() {
        let err = HierarchyGraph::new(
            labels(&["a"]),
            vec![(TokenId(0), TokenId(0))],
            GraphMode::default(),
        );
        assert!(matches!(err, Err(Error::SelfLoop { .. })));
    }

    #[test]
    fn rejects_three_cycle() {
        let e = vec![
            (TokenId(0), TokenId(1)),
            (TokenId(1), TokenId(2)),
            (TokenId(2), TokenId(0)),
        ];
        let err = HierarchyGraph::new(labels(&["a", "b", "c"]), e, GraphMode::default());
        assert!(matches!(err, Err(Error::Cycle { .. })));
    }

    #[test]
    fn tree_mode_rejects_second_parent_and_second_root() {
        let diamond = vec![
            (TokenId(0), TokenId(1)),
            (TokenId(0), TokenId(2)),
            (TokenId(1), TokenId(3)),
            (TokenId(2), TokenId(3)),
        ];
        let l = labels(&["a", "b", "c", "d"]);
        assert!(matches!(
            HierarchyGraph::new(l.clone(), diamond.clone(), GraphMode::Tree),
            Err(Error::MultipleParents { .. })
        ));
        assert!(HierarchyGraph::new(l, diamond, GraphMode::default()).is_ok());

        let forest = vec![(TokenId(0), TokenId(1)), (TokenId(2), TokenId(3))];
        let l = labels(&["a", "b", "c", "d"]);
        assert!(matches!(
            HierarchyGraph::new(l.clone(), forest.clone(), GraphMode::Tree),
            Err(Error::RootCount { count: 2 })
        ));
        assert!(matches!(
            HierarchyGraph::new(
                l.clone(),
                forest.clone(),
                GraphMode::Dag {
                    multiple_roots: false
                }
            ),
            Err(Error::RootCount { count: 2 })
        ));
        assert!(HierarchyGraph::new(
            l,
            forest,
            GraphMode::Dag {
                multiple_roots: true
            }
        )
        .is_ok());
    }

    #[test]
    fn topological_order_puts_parents_first() {
        let e = vec![
            (TokenId(0), TokenId(1)),
            (TokenId(1), TokenId(2)),
            (TokenId(3), TokenId(1)),
        ];
        let g = HierarchyGraph::new(labels(&["a", "b", "c", "d"]), e, GraphMode::Tree).unwrap();
        let order = g.topological_order();
        let pos = |t: u32| order.iter().position(|&x| x == TokenId(t)).unwrap();
        assert!(pos(2) < pos(1));
        assert!(pos(1) < pos(0));
        assert!(pos(1) < pos(3));
    }
}
