//! Best-first spatial branch-and-bound over the eight source weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::ClassicalModel;
use crate::error::{Error, Result};
use crate::witness::FunctionalSpec;

use super::local::{improve, local_search_with, model_value, LocalSearchConfig};
use super::lp::LpStatus;
use super::objective::BASE_ABSCISSAS;
use super::relax::{model_from_lp, relax_node, RelaxationNode, MAX_CUTS_PER_TERM};

pub const PRUNE_MARGIN: f64 = 1e-9;
pub const DEFAULT_GAP: f64 = 1e-3;
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct BnbConfig {
    pub abs_gap: f64,
    pub node_cap: usize,
    /// Nodes solved concurrently per step; 1 gives a deterministic tree.
    pub workers: usize,
    pub seed: u64,
    /// Local-search starts used for the initial incumbent.
    pub local_starts: usize,
    /// Cutting-plane rounds per node LP.
    pub cut_rounds: usize,
    /// Cuts per square-root term inside one node LP.
    pub node_cut_cap: usize,
    pub time_limit: Option<Duration>,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self {
            abs_gap: DEFAULT_GAP,
            node_cap: DEFAULT_NODE_CAP,
            workers: 1,
            seed: 0,
            local_starts: 64,
            cut_rounds: 12,
            node_cut_cap: 2 * MAX_CUTS_PER_TERM,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GapReached,
    NodeCap,
    TimeLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub witness: String,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub nodes: usize,
    pub seconds: f64,
    pub model: ClassicalModel,
    pub converged: bool,
    pub termination: Termination,
}

impl BoundCertificate {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Result of solving one node.
#[derive(Debug, Clone)]
pub struct NodeOutcome {
    /// `None` when the box is empty or the LP infeasible.
    pub upper: Option<f64>,
    pub node: RelaxationNode,
}

/// Solves a node's relaxation with in-node cutting planes. The returned
/// bound never exceeds the node's inherited bound.
pub fn solve_node(spec: &FunctionalSpec, mut node: RelaxationNode, cfg: &BnbConfig) -> Result<NodeOutcome> {
    node.tighten();
    if !node.is_feasible() {
        return Ok(NodeOutcome { upper: None, node });
    }
    let mut wlp = relax_node(spec, &node)?;
    let sol = wlp.solve_with_cuts(cfg.cut_rounds, 1e-7, cfg.node_cut_cap)?;
    if sol.status != LpStatus::Optimal {
        return Ok(NodeOutcome { upper: None, node });
    }
    let bound = (sol.value + wlp.constant).min(node.upper_bound);
    node.upper_bound = bound;
    // Children inherit the fixed abscissas plus the newest dynamic ones.
    node.cuts = wlp
        .cuts
        .iter()
        .map(|list| {
            let dynamic = &list[BASE_ABSCISSAS.len().min(list.len())..];
            let keep = MAX_CUTS_PER_TERM - BASE_ABSCISSAS.len();
            let mut out = BASE_ABSCISSAS.to_vec();
            out.extend_from_slice(&dynamic[dynamic.len().saturating_sub(keep)..]);
            out
        })
        .collect();
    node.solution = Some(sol.x);
    Ok(NodeOutcome {
        upper: Some(bound),
        node,
    })
}

/// Splits a solved node on its widest source interval.
pub fn branch(node: &RelaxationNode) -> [RelaxationNode; 2] {
    let (k, width) = node.widest();
    let (lo, hi) = node.interval(k);
    let at = node
        .solution
        .as_ref()
        .map(|x| x[if k < 4 { super::relax::PG + k } else { super::relax::PA + k - 4 }])
        .unwrap_or(0.5 * (lo + hi))
        .clamp(lo + 0.1 * width, hi - 0.1 * width);
    let mut left = node.clone();
    let mut right = node.clone();
    left.interval_mut(k).1 = at;
    right.interval_mut(k).0 = at;
    for child in [&mut left, &mut right] {
        child.depth += 1;
        child.solution = None;
    }
    [left, right]
}

struct Queued {
    upper: f64,
    id: usize,
    node: RelaxationNode,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Incumbent {
    model: ClassicalModel,
    value: f64,
}

impl Incumbent {
    fn offer(&mut self, model: ClassicalModel, value: f64) {
        if value > self.value {
            self.model = model;
            self.value = value;
        }
    }
}

fn heuristic(spec: &FunctionalSpec, node: &RelaxationNode) -> Option<(ClassicalModel, f64)> {
    let x = node.solution.as_ref()?;
    let start = model_from_lp(x);
    let cfg = LocalSearchConfig {
        ascent_iterations: 0,
        polish_rounds: 2,
        ..LocalSearchConfig::default()
    };
    improve(spec, &start, &cfg).ok()
}

pub fn branch_and_bound(spec: &FunctionalSpec, abs_gap: f64, node_cap: usize) -> Result<BoundCertificate> {
    branch_and_bound_with(
        spec,
        &BnbConfig {
            abs_gap,
            node_cap,
            ..BnbConfig::default()
        },
    )
}

pub fn branch_and_bound_with(spec: &FunctionalSpec, cfg: &BnbConfig) -> Result<BoundCertificate> {
    if cfg.abs_gap <= 0.0 || cfg.abs_gap.is_nan() {
        return Err(Error::Config("gap target must be positive".into()));
    }
    spec.check_certifiable()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;

    let (model, value) = pool.install(|| {
        local_search_with(spec, cfg.local_starts.max(1), cfg.seed, &LocalSearchConfig::default())
    })?;
    let mut best = Incumbent { model, value };

    let mut frontier = BinaryHeap::new();
    let mut next_id = 0;
    let mut nodes = 0;
    // Largest bound among discarded nodes; stays part of the certificate.
    let mut discarded_upper = f64::NEG_INFINITY;

    let root = solve_node(spec, RelaxationNode::root(spec), cfg)?;
    nodes += 1;
    match root.upper {
        Some(u) => {
            if let Some((m, v)) = heuristic(spec, &root.node) {
                best.offer(m, v);
            }
            frontier.push(Queued {
                upper: u,
                id: next_id,
                node: root.node,
            });
            next_id += 1;
        }
        None => return Err(Error::Lp("root relaxation infeasible".into())),
    }

    let termination = loop {
        let top = frontier.peek().map_or(f64::NEG_INFINITY, |q| q.upper);
        if top.max(discarded_upper) - best.value <= cfg.abs_gap {
            break Termination::GapReached;
        }
        if nodes >= cfg.node_cap {
            break Termination::NodeCap;
        }
        if cfg.time_limit.is_some_and(|t| started.elapsed() >= t) {
            break Termination::TimeLimit;
        }
        let batch: Vec<Queued> = (0..cfg.workers.max(1))
            .map_while(|_| frontier.pop())
            .collect();
        let children: Vec<RelaxationNode> = batch.iter().flat_map(|q| branch(&q.node)).collect();
        let solved: Vec<Result<(NodeOutcome, Option<(ClassicalModel, f64)>)>> = pool.install(|| {
            children
                .into_par_iter()
                .map(|child| {
                    let out = solve_node(spec, child, cfg)?;
                    let h = out.upper.and_then(|_| heuristic(spec, &out.node));
                    Ok((out, h))
                })
                .collect()
        });
        for res in solved {
            let (out, h) = res?;
            nodes += 1;
            if let Some((m, v)) = h {
                best.offer(m, v);
            }
            if let Some(u) = out.upper {
                frontier.push(Queued {
                    upper: u,
                    id: next_id,
                    node: out.node,
                });
                next_id += 1;
            }
        }
        // Prune against the incumbent.
        if frontier.iter().any(|q| q.upper <= best.value + PRUNE_MARGIN) {
            let kept: Vec<Queued> = frontier
                .drain()
                .filter(|q| {
                    let keep = q.upper > best.value + PRUNE_MARGIN;
                    if !keep {
                        discarded_upper = discarded_upper.max(q.upper);
                    }
                    keep
                })
                .collect();
            frontier.extend(kept);
        }
    };

    let frontier_upper = frontier.peek().map_or(f64::NEG_INFINITY, |q| q.upper);
    let lower = model_value(spec, &best.model)?;
    let upper = frontier_upper.max(discarded_upper).max(lower);
    Ok(BoundCertificate {
        witness: spec.name.clone(),
        lower,
        upper,
        gap: upper - lower,
        nodes,
        seconds: started.elapsed().as_secs_f64(),
        model: best.model,
        converged: termination == Termination::GapReached,
        termination,
    })
}
