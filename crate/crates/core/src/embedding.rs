//! Event initialization and the causality-enforcement sweep.
//!
//! Every token starts at `t = 0` with spatial coordinates drawn i.i.d. from
//! `U(-1, 1)`. A pair `(X, Y)` ("X is-a Y") violates causality when
//! `T <= 0` or `T < D`, with `T = t_X - t_Y` and `D = |x_X - x_Y|`. A sweep
//! visits the pairs in their stored order and fixes each violation in place:
//!
//! ```text
//! δ   = D + eps1 - T
//! t_X += δ (1 - eps2)
//! t_Y -= δ eps2
//! ```
//!
//! Spatial coordinates are never touched here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{filter_indices, Execution};
use crate::geometry::{squared_distance, Event};
use crate::hierarchy::{ClosurePairSet, TokenId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    /// Spatial dimension `d`; spacetime has `d + 1` dimensions.
    pub dim: usize,
    /// Causal margin added to every fix; also sets the two-parent scale.
    pub eps1: f64,
    /// Share of each fix applied (backwards) to the ancestor's time.
    pub eps2: f64,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 2,
            eps1: 1e-5,
            eps2: 0.0,
            seed: 0,
            max_sweeps: 10_000,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameters(
                "spatial dimension must be at least 1".into(),
            ));
        }
        if !(self.eps1 > 0.0 && self.eps1.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "eps1 must be positive, got {}",
                self.eps1
            )));
        }
        if !(0.0..1.0).contains(&self.eps2) {
            return Err(Error::InvalidParameters(format!(
                "eps2 must lie in [0, 1), got {}",
                self.eps2
            )));
        }
        Ok(())
    }

    /// Proximity on the squared-proper-time scale under which a second
    /// candidate counts as a parent.
    pub fn two_parent_threshold(&self) -> f64 {
        self.eps1 / 10.0
    }
}

/// Token-indexed events plus the configuration that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    times: Vec<f64>,
    coords: Vec<f64>,
    dim: usize,
    config: EmbeddingConfig,
    converged: bool,
    sweeps_run: usize,
}

impl Embedding {
    pub fn from_events(events: &[Event], config: EmbeddingConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim;
        let mut times = Vec::with_capacity(events.len());
        let mut coords = Vec::with_capacity(events.len() * dim);
        for e in events {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: e.dim(),
                });
            }
            if !e.is_finite() {
                return Err(Error::InvalidParameters(
                    "event coordinates must be finite".into(),
                ));
            }
            times.push(e.t);
            coords.extend_from_slice(&e.x);
        }
        Ok(Embedding {
            times,
            coords,
            dim,
            config,
            converged: false,
            sweeps_run: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn sweeps_run(&self) -> usize {
        self.sweeps_run
    }

    #[inline]
    pub fn time(&self, t: TokenId) -> f64 {
        self.times[t.index()]
    }

    #[inline]
    pub fn position(&self, t: TokenId) -> &[f64] {
        let i = t.index() * self.dim;
        &self.coords[i..i + self.dim]
    }

    pub fn event(&self, t: TokenId) -> Event {
        Event::new(self.time(t), self.position(t).to_vec())
    }

    pub fn events(&self) -> Vec<Event> {
        (0..self.len())
            .map(|i| self.event(TokenId::from(i)))
            .collect()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// All spatial coordinates, row-major.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn check_token(&self, t: TokenId) -> Result<()> {
        if t.index() < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownToken(t.to_string()))
        }
    }

    pub(crate) fn set_time(&mut self, t: TokenId, value: f64) {
        self.times[t.index()] = value;
    }

    pub(crate) fn set_event(&mut self, t: TokenId, time: f64, position: &[f64]) {
        debug_assert_eq!(position.len(), self.dim);
        self.times[t.index()] = time;
        let i = t.index() * self.dim;
        self.coords[i..i + self.dim].copy_from_slice(position);
    }

    #[inline]
    pub(crate) fn spatial_distance(&self, a: TokenId, b: TokenId) -> f64 {
        squared_distance(self.position(a), self.position(b)).sqrt()
    }

    fn check_pairs(&self, pairs: &ClosurePairSet) -> Result<()> {
        if pairs.token_bound() > self.len() {
            return Err(Error::UnknownToken(
                TokenId::from(pairs.token_bound() - 1).to_string(),
            ));
        }
        Ok(())
    }
}

/// Seeded start state: uniform spatial coordinates, all times zero.
pub fn init_embedding(token_count: usize, config: &EmbeddingConfig) -> Result<Embedding> {
    config.validate()?;
    if token_count == 0 {
        return Err(Error::InvalidParameters("cannot embed zero tokens".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut coords = Vec::with_capacity(token_count * config.dim);
    for _ in 0..token_count * config.dim {
        // random_range is half-open; keep the support open at -1 too.
        let v = loop {
            let v: f64 = rng.random_range(-1.0..1.0);
            if v != -1.0 {
                break v;
            }
        };
        coords.push(v);
    }
    Ok(Embedding {
        times: vec![0.0; token_count],
        coords,
        dim: config.dim,
        config: config.clone(),
        converged: false,
        sweeps_run: 0,
    })
}

/// Indices into the pair list that currently violate causality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationSet {
    pub entries: Vec<usize>,
}

impl ViolationSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

#[inline]
fn violates(t: f64, d: f64) -> bool {
    t <= 0.0 || t < d
}

pub fn find_violations(emb: &Embedding, pairs: &ClosurePairSet) -> Result<ViolationSet> {
    find_violations_with(emb, pairs, Execution::default())
}

pub fn find_violations_with(
    emb: &Embedding,
    pairs: &ClosurePairSet,
    exec: Execution,
) -> Result<ViolationSet> {
    emb.check_pairs(pairs)?;
    let p = pairs.pairs();
    let entries = filter_indices(exec, p.len(), |i| {
        let (x, y) = p[i];
        violates(emb.time(x) - emb.time(y), emb.spatial_distance(x, y))
    });
    Ok(ViolationSet { entries })
}

/// One in-place sweep over `pairs`. Returns the number of pairs fixed.
pub fn enforce_step(emb: &mut Embedding, pairs: &ClosurePairSet) -> usize {
    let eps1 = emb.config.eps1;
    let eps2 = emb.config.eps2;
    let mut fixed = 0;
    for &(x, y) in pairs.pairs() {
        let d = emb.spatial_distance(x, y);
        let t = emb.time(x) - emb.time(y);
        if violates(t, d) {
            let delta = d + eps1 - t;
            emb.times[x.index()] += delta * (1.0 - eps2);
            emb.times[y.index()] -= delta * eps2;
            fixed += 1;
        }
    }
    fixed
}

/// Sweeps until no pair violates causality or `max_sweeps` sweeps have run
/// in this call. Sets the `converged` flag and returns the sweeps used.
pub fn enforce_causality(
    emb: &mut Embedding,
    pairs: &ClosurePairSet,
    exec: Execution,
) -> Result<usize> {
    emb.check_pairs(pairs)?;
    let mut sweeps = 0;
    loop {
        let remaining = find_violations_with(emb, pairs, exec)?.len();
        if remaining == 0 {
            emb.converged = true;
            break;
        }
        if sweeps == emb.config.max_sweeps {
            emb.converged = false;
            log::warn!("causality enforcement stopped after {sweeps} sweeps with {remaining} violations left");
            break;
        }
        enforce_step(emb, pairs);
        sweeps += 1;
    }
    emb.sweeps_run += sweeps;
    Ok(sweeps)
}

/// Initializes and sweeps until the violation set is empty.
pub fn embed(
    pairs: &ClosurePairSet,
    token_count: usize,
    config: &EmbeddingConfig,
) -> Result<Embedding> {
    embed_with(pairs, token_count, config, Execution::default())
}

pub fn embed_with(
    pairs: &ClosurePairSet,
    token_count: usize,
    config: &EmbeddingConfig,
    exec: Execution,
) -> Result<Embedding> {
    let mut emb = init_embedding(token_count, config)?;
    enforce_causality(&mut emb, pairs, exec)?;
    Ok(emb)
}

/// On-disk form: `{"config": .., "tokens": [{"label", "t", "x"}]}`.
///
/// Floats are written as shortest round-trip decimals, so a write/read
/// cycle reproduces every coordinate bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    pub config: EmbeddingConfig,
    pub converged: bool,
    pub sweeps_run: usize,
    pub tokens: Vec<TokenRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub label: String,
    pub t: f64,
    pub x: Vec<f64>,
}

impl EmbeddingFile {
    pub fn new(emb: &Embedding, labels: &[String], input_digest: Option<String>) -> Result<Self> {
        if labels.len() != emb.len() {
            return Err(Error::InvalidParameters(format!(
                "{} labels for {} events",
                labels.len(),
                emb.len()
            )));
        }
        let tokens = labels
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let id = TokenId::from(i);
                TokenRecord {
                    label: label.clone(),
                    t: emb.time(id),
                    x: emb.position(id).to_vec(),
                }
            })
            .collect();
        Ok(EmbeddingFile {
            input_digest,
            config: emb.config.clone(),
            converged: emb.converged,
            sweeps_run: emb.sweeps_run,
            tokens,
        })
    }

    /// Rebuilds the embedding; labels come back in token-id order.
    pub fn to_embedding(&self) -> Result<(Embedding, Vec<String>)> {
        let events: Vec<Event> = self
            .tokens
            .iter()
            .map(|r| Event::new(r.t, r.x.clone()))
            .collect();
        let mut emb = Embedding::from_events(&events, self.config.clone())?;
        emb.converged = self.converged;
        emb.sweeps_run = self.sweeps_run;
        let labels = self.tokens.iter().map(|r| r.label.clone()).collect();
        Ok((emb, labels))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
