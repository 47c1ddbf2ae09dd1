use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::truth::{ambiguity_profile, depths};
use super::{GraphMode, HierarchyGraph, TokenId};
use crate::error::{Error, Result};

/// Reads `child<TAB>parent` lines. Blank lines and lines starting with `#`
/// are skipped. Ids are assigned in order of first appearance.
pub fn load_edge_list<R: Read>(source: R, mode: GraphMode) -> Result<HierarchyGraph> {
    let reader = BufReader::new(source);
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, TokenId> = HashMap::new();
    let mut edges = Vec::new();

    let mut intern = |label: &str| -> TokenId {
        if let Some(&id) = index.get(label) {
            return id;
        }
        let id = TokenId::from(labels.len());
        labels.push(label.to_owned());
        index.insert(label.to_owned(), id);
        id
    };

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Parse {
                line: line_no,
                message: "invalid UTF-8".into(),
            },
            _ => Error::Io(e),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (child, parent) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(p), None) => (c, p),
            (_, None, _) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected child<TAB>parent, found no tab".into(),
                })
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected exactly one tab".into(),
                })
            }
        };
        if child.is_empty() || parent.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty token label".into(),
            });
        }
        let c = intern(child);
        let p = intern(parent);
        edges.push((c, p));
    }

    HierarchyGraph::new(labels, edges, mode)
}

/// Writes the graph's edges in the format read by [`load_edge_list`].
pub fn write_edge_list<W: Write>(graph: &HierarchyGraph, mut out: W) -> Result<()> {
    for &(c, p) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(c), graph.label(p))?;
    }
    out.flush()?;
    Ok(())
}

/// Shape statistics exported alongside generated or loaded graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub tokens: usize,
    pub edges: usize,
    pub roots: usize,
    pub max_depth: usize,
    /// depth -> token count (depth = longest path to a root).
    pub depth_histogram: BTreeMap<usize, usize>,
    /// root-path multiplicity -> token count.
    pub ambiguity_histogram: BTreeMap<usize, usize>,
}

impl GraphSummary {
    pub fn of(graph: &HierarchyGraph) -> Self {
        let depth = depths(graph);
        let mut depth_histogram = BTreeMap::new();
        for &d in &depth {
            *depth_histogram.entry(d).or_insert(0) += 1;
        }
        GraphSummary {
            tokens: graph.len(),
            edges: graph.edges().len(),
            roots: graph.roots().count(),
            max_depth: depth.iter().copied().max().unwrap_or(0),
            depth_histogram,
            ambiguity_histogram: ambiguity_profile(graph).histogram,
        }
    }
}
