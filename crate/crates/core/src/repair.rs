//! Verification against ground truth and repair of misaligned tokens.
//!
//! After plain causality enforcement most tokens already retrieve their true
//! chain. The rest are fixed by relocating the child onto an almost-null
//! geodesic from its parent: the child moves to `x_parent + r·u` with
//! `t = t_parent + sqrt(r² + τ²)`, so the proper time to the parent is
//! exactly `τ` (a multiple of `eps1`). Two-parent tokens are instead placed
//! where the future light cones of both parents meet, lifted by the same
//! small proper time, so both sit within `eps1 / 10` of each other on the
//! `tau2` scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embedding::{embed_with, enforce_causality, Embedding, EmbeddingConfig};
use crate::error::{AdjustFailure, Error, Result};
use crate::exec::{map_indices, Execution};
use crate::geometry::{past_tau2, squared_distance};
use crate::hierarchy::{transitive_closure, GroundTruth, HierarchyGraph, TokenId};
use crate::retrieval::{nearest_scan, ParentTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepairConfig {
    /// Spatial offset of a repaired child from its parent, drawn from
    /// `U(radius_min, radius_max)`.
    pub radius_min: f64,
    pub radius_max: f64,
    /// Proper time of a repaired edge, in units of `eps1`.
    pub proper_time_multiplier: f64,
    /// Outer verify/repair rounds.
    pub max_iterations: usize,
    /// Placement attempts per two-parent token per round.
    pub adjust_trials: usize,
    /// Magnitude of the random displacement applied on retries.
    pub adjust_jitter: f64,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            radius_min: 0.01,
            radius_max: 0.1,
            proper_time_multiplier: 1.0,
            max_iterations: 1000,
            adjust_trials: 10_000,
            adjust_jitter: 1e-6,
        }
    }
}

impl RepairConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius_min >= 0.0
            && self.radius_min <= self.radius_max
            && self.radius_max.is_finite())
        {
            return Err(Error::InvalidParameters(format!(
                "repair radius range [{}, {}] is invalid",
                self.radius_min, self.radius_max
            )));
        }
        if !(self.proper_time_multiplier > 0.0 && self.proper_time_multiplier.is_finite()) {
            return Err(Error::InvalidParameters(
                "proper_time_multiplier must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub token: TokenId,
    pub retrieved: Vec<Vec<TokenId>>,
    pub expected: Vec<Vec<TokenId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub total: usize,
    pub perfect: usize,
    pub mismatches: Vec<Mismatch>,
    /// Tokens whose own detected parent set is wrong; the edges to repair.
    pub misaligned: Vec<TokenId>,
}

impl VerificationReport {
    pub fn is_perfect(&self) -> bool {
        self.perfect == self.total
    }

    pub fn perfect_fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.perfect as f64 / self.total as f64
        }
    }
}

const MAX_RETRIEVED_CHAINS: usize = 64;

/// Every chain reachable by following detected parents, sorted.
fn retrieved_chains(table: &ParentTable, x: TokenId) -> Vec<Vec<TokenId>> {
    let mut out = Vec::new();
    let mut path = vec![x];
    fn walk(table: &ParentTable, path: &mut Vec<TokenId>, out: &mut Vec<Vec<TokenId>>) {
        if out.len() >= MAX_RETRIEVED_CHAINS {
            return;
        }
        let last = *path.last().unwrap();
        let parents = table.parents(last);
        if parents.is_empty() {
            out.push(path.clone());
            return;
        }
        for p in parents {
            if path.contains(&p) {
                continue;
            }
            path.push(p);
            walk(table, path, out);
            path.pop();
        }
    }
    walk(table, &mut path, &mut out);
    out.sort();
    out
}

pub fn verify_all(emb: &Embedding, graph: &HierarchyGraph) -> VerificationReport {
    verify_with(emb, &GroundTruth::new(graph), Execution::default())
}

/// A token is perfect when the set of chains retrieved through detected
/// parents equals its set of ground-truth root paths. That holds exactly
/// when the token and all its true ancestors have the right parent set.
pub fn verify_with(emb: &Embedding, truth: &GroundTruth, exec: Execution) -> VerificationReport {
    let table = ParentTable::build_with(emb, exec);
    let n = truth.len();
    let aligned: Vec<bool> = map_indices(exec, n, |i| {
        let x = TokenId::from(i);
        let mut found = table.parents(x);
        found.sort_unstable();
        found == truth.parents(x)
    });
    let mut ok = aligned.clone();
    for &x in truth.topological_order() {
        ok[x.index()] = aligned[x.index()] && truth.parents(x).iter().all(|p| ok[p.index()]);
    }
    let bad: Vec<usize> = (0..n).filter(|&i| !ok[i]).collect();
    let mismatches = map_indices(exec, bad.len(), |k| {
        let x = TokenId::from(bad[k]);
        Mismatch {
            token: x,
            retrieved: retrieved_chains(&table, x),
            expected: truth.chains(x).to_vec(),
        }
    });
    let misaligned = (0..n).filter(|&i| !aligned[i]).map(TokenId::from).collect();
    VerificationReport {
        total: n,
        perfect: n - bad.len(),
        mismatches,
        misaligned,
    }
}

/// Uniform direction in `dim` dimensions.
pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Moves `child` onto a random almost-null geodesic from `parent`. Only the
/// child moves; its descendants may need causality re-enforced afterwards.
pub fn repair_pair<R: Rng + ?Sized>(
    emb: &mut Embedding,
    child: TokenId,
    parent: TokenId,
    config: &RepairConfig,
    rng: &mut R,
) -> Result<()> {
    if child == parent {
        return Err(Error::InvalidParameters(format!(
            "cannot repair {child} onto itself"
        )));
    }
    emb.check_token(child)?;
    emb.check_token(parent)?;
    let r = if config.radius_max > config.radius_min {
        rng.random_range(config.radius_min..config.radius_max)
    } else {
        config.radius_min
    };
    let u = unit_vector(emb.dim(), rng);
    place_on_geodesic(
        emb,
        child,
        parent,
        r,
        &u,
        config.proper_time_multiplier * emb.config().eps1,
    );
    Ok(())
}

/// Deterministic core of [`repair_pair`]: offset `r·u` from the parent, proper time `tau`.
pub fn place_on_geodesic(
    emb: &mut Embedding,
    child: TokenId,
    parent: TokenId,
    r: f64,
    u: &[f64],
    tau: f64,
) {
    let position: Vec<f64> = emb
        .position(parent)
        .iter()
        .zip(u)
        .map(|(p, d)| p + r * d)
        .collect();
    let t = emb.time(parent) + (r * r + tau * tau).sqrt();
    emb.set_event(child, t, &position);
}

fn in_past(emb: &Embedding, x: TokenId, z: TokenId) -> bool {
    past_tau2(
        emb.time(x) - emb.time(z),
        squared_distance(emb.position(x), emb.position(z)),
    )
    .is_some()
}

/// Places a two-parent `child` just inside both parents' future light cones
/// so that both are detected. Parents must be spacelike-separated.
pub fn ambiguity_adjust<R: Rng + ?Sized>(
    emb: &mut Embedding,
    child: TokenId,
    parents: (TokenId, TokenId),
    config: &RepairConfig,
    rng: &mut R,
) -> Result<()> {
    let (a, b) = parents;
    for t in [child, a, b] {
        emb.check_token(t)?;
    }
    if a == b || child == a || child == b {
        return Err(Error::InvalidParameters(
            "child and both parents must be distinct".into(),
        ));
    }
    let fail = |reason| Error::AdjustFailed {
        token: child,
        reason,
    };

    let (ta, tb) = (emb.time(a), emb.time(b));
    let xa = emb.position(a).to_vec();
    let xb = emb.position(b).to_vec();
    let span = squared_distance(&xa, &xb).sqrt();
    if (ta - tb).abs() >= span {
        let (later, earlier) = if ta >= tb { (a, b) } else { (b, a) };
        return Err(fail(AdjustFailure::ParentsCausallyRelated {
            later,
            earlier,
        }));
    }

    let dim = emb.dim();
    let axis: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| (q - p) / span).collect();
    let tau = config.proper_time_multiplier * emb.config().eps1;
    let threshold = emb.config().two_parent_threshold();
    let original = (emb.time(child), emb.position(child).to_vec());

    for trial in 0..config.adjust_trials.max(1) {
        let mut offset = vec![0.0; dim];
        if trial > 0 && dim > 1 {
            // Random direction orthogonal to the parent axis.
            let mut w = unit_vector(dim, rng);
            let along: f64 = w.iter().zip(&axis).map(|(p, q)| p * q).sum();
            w.iter_mut().zip(&axis).for_each(|(p, q)| *p -= along * q);
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-9 {
                let h = rng.random_range(-0.5..0.5) * span;
                offset = w.iter().map(|v| v / norm * h).collect();
            }
        }
        let point =
            |s: f64| -> Vec<f64> { (0..dim).map(|k| xa[k] + s * axis[k] + offset[k]).collect() };
        let arrival_gap = |s: f64| {
            let p = point(s);
            (ta + squared_distance(&p, &xa).sqrt()) - (tb + squared_distance(&p, &xb).sqrt())
        };
        let Some(s) = bisect(arrival_gap, span) else {
            continue;
        };
        let mut p = point(s);
        if trial > 0 {
            let jitter = unit_vector(dim, rng);
            p.iter_mut()
                .zip(&jitter)
                .for_each(|(v, j)| *v += config.adjust_jitter * j);
        }
        let da = squared_distance(&p, &xa).sqrt();
        let db = squared_distance(&p, &xb).sqrt();
        let arrival = (ta + da).max(tb + db);
        let reach = da.max(db);
        let lift = (reach * reach + tau * tau).sqrt() - reach;
        emb.set_event(child, arrival + lift, &p);

        let near = nearest_scan(emb, child);
        if let (Some(f), Some(s)) = (near.first, near.second) {
            let mut got = [f.token, s.token];
            got.sort_unstable();
            let mut want = [a, b];
            want.sort_unstable();
            if got == want
                && s.tau2 - f.tau2 <= threshold
                && in_past(emb, child, a)
                && in_past(emb, child, b)
            {
                return Ok(());
            }
        }
    }
    emb.set_event(child, original.0, &original.1);
    Err(fail(AdjustFailure::TrialsExhausted {
        trials: config.adjust_trials,
    }))
}

/// Root of a monotone increasing function along the parent axis.
fn bisect<F: Fn(f64) -> f64>(f: F, span: f64) -> Option<f64> {
    let (mut lo, mut hi) = (0.0, span);
    let mut grow = 0;
    while f(lo) > 0.0 || f(hi) < 0.0 {
        lo -= span * (1 << grow.min(30)) as f64;
        hi += span * (1 << grow.min(30)) as f64;
        grow += 1;
        if grow > 40 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Per-round progress of [`perfect_embed`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub mismatched_tokens: usize,
    pub misaligned_tokens: usize,
    pub repairs: usize,
    pub ambiguity_adjustments: usize,
    pub root_retimes: usize,
    pub stuck: Vec<TokenId>,
    pub sweeps: usize,
}

#[derive(Clone, Debug)]
pub struct PerfectEmbedding {
    pub embedding: Embedding,
    /// Verification straight after plain causality enforcement.
    pub initial_report: VerificationReport,
    pub report: VerificationReport,
    pub history: Vec<IterationStats>,
}

impl PerfectEmbedding {
    pub fn is_perfect(&self) -> bool {
        self.embedding.converged() && self.report.is_perfect()
    }
}

pub fn perfect_embed(graph: &HierarchyGraph, config: &EmbeddingConfig) -> Result<PerfectEmbedding> {
    perfect_embed_with(
        graph,
        config,
        &RepairConfig::default(),
        Execution::default(),
    )
}

/// Embed, then alternate verification and repair until every token
/// retrieves exactly its ground-truth chains or the round cap is hit.
pub fn perfect_embed_with(
    graph: &HierarchyGraph,
    config: &EmbeddingConfig,
    repair: &RepairConfig,
    exec: Execution,
) -> Result<PerfectEmbedding> {
    config.validate()?;
    repair.validate()?;
    if let Some(t) = graph.tokens().find(|&t| graph.parents(t).len() > 2) {
        return Err(Error::Unsupported(format!(
            "token `{}` has {} parents; at most two are supported",
            graph.label(t),
            graph.parents(t).len()
        )));
    }

    let truth = GroundTruth::new(graph);
    let pairs = transitive_closure(graph);
    let mut emb = embed_with(&pairs, graph.len(), config, exec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let initial_report = verify_with(&emb, &truth, exec);
    let mut report = initial_report.clone();
    let mut history = Vec::new();
    log::info!(
        "initial verification: {}/{} tokens perfect ({} misaligned)",
        report.perfect,
        report.total,
        report.misaligned.len()
    );

    for iteration in 0..repair.max_iterations {
        if report.is_perfect() || !emb.converged() {
            break;
        }
        let mut stats = IterationStats {
            iteration,
            mismatched_tokens: report.mismatches.len(),
            misaligned_tokens: report.misaligned.len(),
            repairs: 0,
            ambiguity_adjustments: 0,
            root_retimes: 0,
            stuck: Vec::new(),
            sweeps: 0,
        };

        let mut todo = report.misaligned.clone();
        todo.sort_by_key(|&t| (truth.depth(t), t));
        for z in todo {
            match *truth.parents(z) {
                [] => {
                    retime_root(&mut emb, z);
                    stats.root_retimes += 1;
                }
                [p] => {
                    repair_pair(&mut emb, z, p, repair, &mut rng)?;
                    stats.repairs += 1;
                }
                [p1, p2] => match ambiguity_adjust(&mut emb, z, (p1, p2), repair, &mut rng) {
                    Ok(()) => stats.ambiguity_adjustments += 1,
                    Err(Error::AdjustFailed {
                        reason: AdjustFailure::ParentsCausallyRelated { later, earlier },
                        ..
                    }) => {
                        let mover = highest_in_future(&emb, &truth, later, earlier);
                        match truth.parents(mover).first() {
                            Some(&p) => {
                                repair_pair(&mut emb, mover, p, repair, &mut rng)?;
                                stats.repairs += 1;
                            }
                            None => stats.stuck.push(z),
                        }
                    }
                    Err(Error::AdjustFailed { .. }) => stats.stuck.push(z),
                    Err(e) => return Err(e),
                },
                _ => unreachable!("checked above"),
            }
        }

        stats.sweeps = enforce_causality(&mut emb, &pairs, exec)?;
        report = verify_with(&emb, &truth, exec);
        log::info!(
            "iteration={} mismatched={} misaligned={} repairs={} adjustments={} root_retimes={} stuck={} sweeps={} remaining={}",
            iteration,
            stats.mismatched_tokens,
            stats.misaligned_tokens,
            stats.repairs,
            stats.ambiguity_adjustments,
            stats.root_retimes,
            stats.stuck.len(),
            stats.sweeps,
            report.mismatches.len()
        );
        history.push(stats);
    }

    if !report.is_perfect() {
        log::warn!(
            "stopped after {} rounds with {} mismatched tokens",
            history.len(),
            report.mismatches.len()
        );
    }
    Ok(PerfectEmbedding {
        embedding: emb,
        initial_report,
        report,
        history,
    })
}

/// Walks up the primary ancestry of `later` while the ancestor still has
/// `earlier` in its causal past; returns the topmost such token.
fn highest_in_future(
    emb: &Embedding,
    truth: &GroundTruth,
    later: TokenId,
    earlier: TokenId,
) -> TokenId {
    let mut cur = later;
    while let Some(&p) = truth.parents(cur).first() {
        if p == earlier || !in_past(emb, p, earlier) {
            break;
        }
        cur = p;
    }
    cur
}

/// Moves a root just below every other token's future light cone so its
/// causal past is empty. Lowering a root's time keeps all closure pairs valid.
fn retime_root(emb: &mut Embedding, root: TokenId) {
    let eps1 = emb.config().eps1;
    let bound = (0..emb.len())
        .map(TokenId::from)
        .filter(|&z| z != root)
        .map(|z| emb.time(z) + emb.spatial_distance(root, z))
        .fold(f64::INFINITY, f64::min);
    if bound.is_finite() {
        emb.set_time(root, emb.time(root).min(bound - eps1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::find_violations;
    use crate::geometry::{interval, Event};
    use crate::hierarchy::{
        generate_hierarchy, load_edge_list, Ambiguity, GeneratorParams, GraphMode,
    };
    use crate::retrieval::detect_parents;

    fn t(i: u32) -> TokenId {
        TokenId(i)
    }

    fn emb(events: &[(f64, Vec<f64>)]) -> Embedding {
        let ev: Vec<Event> = events
            .iter()
            .map(|(t, x)| Event::new(*t, x.clone()))
            .collect();
        Embedding::from_events(&ev, EmbeddingConfig::default()).unwrap()
    }

    #[test]
    fn hand_built_chain_verifies() {
        let g = load_edge_list("L\tM\nM\tR\n".as_bytes(), GraphMode::Tree).unwrap();
        let e = emb(&[
            (1.3, vec![1.0, 0.0]),
            (0.6, vec![0.5, 0.0]),
            (0.0, vec![0.0, 0.0]),
        ]);
        let r = verify_all(&e, &g);
        assert_eq!(r.total, 3);
        assert_eq!(r.perfect, 3);
        assert!(r.mismatches.is_empty());
    }

    #[test]
    fn geodesic_placement_formula() {
        let mut e = emb(&[(0.0, vec![0.3, 0.3]), (1.0, vec![0.0, 0.0])]);
        place_on_geodesic(&mut e, t(0), t(1), 0.05, &[1.0, 0.0], 1e-5);
        assert_eq!(e.time(t(0)), 1.0 + (0.0025f64 + 1e-10).sqrt());
        assert_eq!(e.position(t(0)), [0.05, 0.0]);
        let s2 = interval(&e.event(t(0)), &e.event(t(1))).unwrap();
        assert!((s2 + 1e-10).abs() < 1e-15, "{s2}");
    }

    #[test]
    fn repair_moves_only_the_child() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut e = emb(&[
            (0.0, vec![0.3, 0.3]),
            (1.0, vec![0.0, 0.0]),
            (2.0, vec![0.5, -0.5]),
        ]);
        let before = e.clone();
        repair_pair(&mut e, t(0), t(1), &RepairConfig::default(), &mut rng).unwrap();
        assert_eq!(e.event(t(1)), before.event(t(1)));
        assert_eq!(e.event(t(2)), before.event(t(2)));
        let r = e.spatial_distance(t(0), t(1));
        assert!((0.01..0.1).contains(&r));
        let dt = e.time(t(0)) - e.time(t(1));
        assert!(dt > 0.0 && dt >= r);
        let s2 = interval(&e.event(t(0)), &e.event(t(1))).unwrap();
        assert!((s2 + 1e-10).abs() < 1e-14);
        assert!(repair_pair(&mut e, t(1), t(1), &RepairConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn unit_vectors_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in 1..6 {
            for _ in 0..200 {
                let u = unit_vector(dim, &mut rng);
                let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn threshold_arithmetic_for_close_parents() {
        let gap: f64 = 2.5e-10 - 2e-10;
        assert!(gap <= EmbeddingConfig::default().two_parent_threshold());
    }

    #[test]
    fn adjust_places_child_between_spacelike_parents() {
        // root 0, parents 1 and 2 (spacelike), child 3
        let mut e = emb(&[
            (0.0, vec![0.0, 0.0]),
            (0.6, vec![-0.5, 0.0]),
            (0.55, vec![0.5, 0.1]),
            (3.0, vec![0.0, 0.9]),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        ambiguity_adjust(
            &mut e,
            t(3),
            (t(1), t(2)),
            &RepairConfig::default(),
            &mut rng,
        )
        .unwrap();
        let mut got = detect_parents(&e, t(3)).unwrap();
        got.sort();
        assert_eq!(got, vec![t(1), t(2)]);
    }

    #[test]
    fn adjust_rejects_timelike_parents() {
        let mut e = emb(&[
            (0.0, vec![0.0, 0.0]),
            (2.0, vec![0.1, 0.0]),
            (0.5, vec![0.0, 0.0]),
            (3.0, vec![0.0, 0.0]),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = ambiguity_adjust(
            &mut e,
            t(3),
            (t(1), t(2)),
            &RepairConfig::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::AdjustFailed { reason: AdjustFailure::ParentsCausallyRelated { later, earlier }, .. }
                if later == t(1) && earlier == t(2)
        ));
    }

    #[test]
    fn single_edge_is_perfect_without_repairs() {
        let g = load_edge_list("a\tb\n".as_bytes(), GraphMode::Tree).unwrap();
        let out = perfect_embed(&g, &EmbeddingConfig::default()).unwrap();
        assert!(out.is_perfect());
        assert!(out.history.is_empty());
    }

    /// Set equality of retrieved vs expected chains, computed the slow way.
    fn oracle_perfect(e: &Embedding, g: &HierarchyGraph) -> usize {
        let truth = GroundTruth::new(g);
        let table = ParentTable::build_with(e, Execution::Sequential);
        g.tokens()
            .filter(|&x| retrieved_chains(&table, x) == truth.chains(x))
            .count()
    }

    #[test]
    fn verification_matches_chain_set_oracle() {
        for seed in 0..6 {
            let params = GeneratorParams {
                n: 150,
                max_depth: 8,
                branching: 5,
                ambiguity: Ambiguity::Count(6),
                seed,
            };
            let g = generate_hierarchy(&params).unwrap();
            let config = EmbeddingConfig {
                seed,
                ..Default::default()
            };
            let e = crate::embedding::embed(&transitive_closure(&g), g.len(), &config).unwrap();
            let r = verify_all(&e, &g);
            assert_eq!(r.perfect, oracle_perfect(&e, &g));
            assert_eq!(r.perfect + r.mismatches.len(), r.total);
        }
    }

    #[test]
    fn random_trees_become_perfect() {
        for seed in 0..5 {
            let params = GeneratorParams {
                n: 100,
                max_depth: 12,
                branching: 6,
                ambiguity: Ambiguity::None,
                seed,
            };
            let g = generate_hierarchy(&params).unwrap();
            let config = EmbeddingConfig {
                seed,
                ..Default::default()
            };
            let out = perfect_embed(&g, &config).unwrap();
            assert!(
                out.is_perfect(),
                "seed {seed}: {:?}",
                out.report.mismatches.len()
            );
            assert!(find_violations(&out.embedding, &transitive_closure(&g))
                .unwrap()
                .is_empty());
            assert_eq!(oracle_perfect(&out.embedding, &g), g.len());
        }
    }

    #[test]
    fn small_dags_become_perfect() {
        for seed in 0..5 {
            let params = GeneratorParams {
                n: 200,
                max_depth: 8,
                branching: 8,
                ambiguity: Ambiguity::Count(5),
                seed,
            };
            let g = generate_hierarchy(&params).unwrap();
            let out = perfect_embed(
                &g,
                &EmbeddingConfig {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(
                out.is_perfect(),
                "seed {seed}: {} mismatches",
                out.report.mismatches.len()
            );
        }
    }

    #[test]
    fn more_than_two_parents_is_unsupported() {
        let g = load_edge_list(
            "a\tb\na\tc\na\td\nb\tr\nc\tr\nd\tr\n".as_bytes(),
            GraphMode::default(),
        )
        .unwrap();
        assert!(matches!(
            perfect_embed(&g, &EmbeddingConfig::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
