use std::collections::HashMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use causal_hierarchy::hierarchy::{load_edge_list, GraphMode};
use causal_hierarchy::repair::VerificationReport;
use causal_hierarchy::{Embedding, EmbeddingFile, HierarchyGraph, TokenId};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct LoadedGraph {
    pub graph: HierarchyGraph,
    pub digest: String,
}

pub fn parse_graph(bytes: &[u8], mode: GraphMode, origin: &str) -> Result<LoadedGraph> {
    let graph = load_edge_list(bytes, mode).with_context(|| format!("loading {origin}"))?;
    Ok(LoadedGraph {
        graph,
        digest: digest(bytes),
    })
}

pub fn read_graph(path: &Path, mode: GraphMode) -> Result<LoadedGraph> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&bytes, mode, &path.display().to_string())
}

pub fn read_embedding(path: &Path) -> Result<(EmbeddingFile, Embedding, Vec<String>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file =
        EmbeddingFile::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (emb, labels) = file.to_embedding()?;
    Ok((file, emb, labels))
}

/// Reorders the embedding's events into the graph's token order.
pub fn align(file: &EmbeddingFile, loaded: &LoadedGraph) -> Result<Embedding> {
    if let Some(d) = &file.input_digest {
        if *d != loaded.digest {
            bail!(
                "embedding was built from input {d}, but the edge list hashes to {}",
                loaded.digest
            );
        }
    }
    let graph = &loaded.graph;
    if file.tokens.len() != graph.len() {
        bail!(
            "embedding has {} tokens, edge list has {}",
            file.tokens.len(),
            graph.len()
        );
    }
    let by_label: HashMap<&str, usize> = file
        .tokens
        .iter()
        .enumerate()
        .map(|(i, r)| (r.label.as_str(), i))
        .collect();
    let mut events = Vec::with_capacity(graph.len());
    for label in graph.labels() {
        let i = by_label
            .get(label.as_str())
            .with_context(|| format!("token `{label}` missing from embedding"))?;
        let r = &file.tokens[*i];
        events.push(causal_hierarchy::Event::new(r.t, r.x.clone()));
    }
    Ok(Embedding::from_events(&events, file.config.clone())?)
}

pub fn lookup(labels: &[String], label: &str) -> Result<TokenId> {
    labels
        .iter()
        .position(|l| l == label)
        .map(TokenId::from)
        .with_context(|| format!("unknown token `{label}`"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
pub struct LabeledMismatch {
    pub token: String,
    pub retrieved: Vec<Vec<String>>,
    pub expected: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct LabeledReport {
    pub total: usize,
    pub perfect: usize,
    pub perfect_fraction: f64,
    pub mismatches: Vec<LabeledMismatch>,
}

impl LabeledReport {
    pub fn new(report: &VerificationReport, labels: &[String]) -> Self {
        let name = |chains: &[Vec<TokenId>]| -> Vec<Vec<String>> {
            chains
                .iter()
                .map(|c| c.iter().map(|t| labels[t.index()].clone()).collect())
                .collect()
        };
        LabeledReport {
            total: report.total,
            perfect: report.perfect,
            perfect_fraction: report.perfect_fraction(),
            mismatches: report
                .mismatches
                .iter()
                .map(|m| LabeledMismatch {
                    token: labels[m.token.index()].clone(),
                    retrieved: name(&m.retrieved),
                    expected: name(&m.expected),
                })
                .collect(),
        }
    }
}
