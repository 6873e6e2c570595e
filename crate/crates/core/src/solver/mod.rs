//! Exact frustration index by branch and bound, with the weighted and
//! multi-colour variants and MILP model export.

mod bnb;
pub mod kcolour;
pub mod milp;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::balance::{frustrated_edges, frustration_count, weighted_frustration};
use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::graph::{Colouring, SignedGraph};

pub use kcolour::{solve_kcolour, KColourResult};
pub use milp::{export_milp, render_lp, Cuts, Formulation, LpTarget, MilpModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    /// Absolute optimality gap; the search stops proving once the incumbent
    /// is within `gap` of the bound.
    pub gap: u64,
    pub use_preprocessing: bool,
    pub use_colour_fixing: bool,
    pub use_degree_branching: bool,
    pub use_triangle_lower_bound: bool,
    pub use_local_search_seed: bool,
    pub workers: usize,
    pub node_budget: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: None,
            gap: 0,
            use_preprocessing: true,
            use_colour_fixing: true,
            use_degree_branching: true,
            use_triangle_lower_bound: true,
            use_local_search_seed: true,
            workers: 1,
            node_budget: None,
        }
    }
}

impl SolverConfig {
    /// Every speed-up switched off.
    pub fn plain() -> Self {
        SolverConfig {
            use_preprocessing: false,
            use_colour_fixing: false,
            use_degree_branching: false,
            use_triangle_lower_bound: false,
            use_local_search_seed: false,
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidSpec("worker count must be at least 1".into()));
        }
        if let Some(t) = self.time_limit {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidSpec(format!("invalid time limit {t}")));
            }
        }
        Ok(())
    }

    pub(crate) fn deadline(&self, start: Instant) -> Option<Instant> {
        self.time_limit.map(|t| start + Duration::from_secs_f64(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    GapTerminated,
    BudgetTerminated,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::GapTerminated => "gap-terminated",
            Status::BudgetTerminated => "budget-terminated",
        })
    }
}

/// Incumbent value after `nodes` search nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrailPoint<C> {
    pub nodes: u64,
    pub upper: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationResult<C = usize> {
    /// Best objective found; the frustration index when `status` is optimal.
    pub l: C,
    pub colouring: Colouring,
    pub status: Status,
    pub lower_bound: C,
    pub nodes: u64,
    pub elapsed_secs: f64,
    /// Endpoints of the edges frustrated under `colouring`.
    pub frustrated_edges: Vec<(usize, usize)>,
    pub trail: Vec<TrailPoint<C>>,
}

pub type WeightedResult = FrustrationResult<f64>;

/// Frustration index of `g` (edge signs only; weights are ignored).
pub fn solve(g: &SignedGraph, cfg: &SolverConfig) -> Result<FrustrationResult> {
    cfg.validate()?;
    let out = run(g, cfg, false);
    let l = frustration_count(g, &out.colouring)?;
    debug_assert_eq!(l as f64, out.value);
    let mut lower = out.lower.round() as usize;
    lower = lower.max(triangle_packing_lower_bound(g)).min(l);
    let status = if lower == l { Status::Optimal } else { out.status };
    Ok(FrustrationResult {
        l,
        status,
        lower_bound: lower,
        frustrated_edges: edge_pairs(g, &out.colouring),
        colouring: out.colouring,
        nodes: out.nodes,
        elapsed_secs: out.elapsed.as_secs_f64(),
        trail: out.trail.iter().map(|p| TrailPoint { nodes: p.nodes, upper: p.upper.round() as usize }).collect(),
    })
}

/// Minimum of `Σ (1-w)/2 + w·[x_i ≠ x_j]` over colourings. The triangle
/// bound is not used; uncoloured edges contribute `min((1-w)/2, (1+w)/2)`.
pub fn solve_weighted(g: &SignedGraph, cfg: &SolverConfig) -> Result<WeightedResult> {
    cfg.validate()?;
    let out = run(g, cfg, true);
    let l = weighted_frustration(g, &out.colouring)?;
    let lower = out.lower.min(l);
    let status = if l - lower <= bnb::EPS { Status::Optimal } else { out.status };
    Ok(FrustrationResult {
        l,
        status,
        lower_bound: lower,
        frustrated_edges: edge_pairs(g, &out.colouring),
        colouring: out.colouring,
        nodes: out.nodes,
        elapsed_secs: out.elapsed.as_secs_f64(),
        trail: out.trail,
    })
}

fn edge_pairs(g: &SignedGraph, x: &Colouring) -> Vec<(usize, usize)> {
    frustrated_edges(g, x)
        .expect("colouring covers the graph")
        .into_iter()
        .map(|i| (g.edge(i).u, g.edge(i).v))
        .collect()
}

struct RunOutcome {
    value: f64,
    lower: f64,
    colouring: Colouring,
    status: Status,
    nodes: u64,
    elapsed: Duration,
    trail: Vec<TrailPoint<f64>>,
}

fn run(g: &SignedGraph, cfg: &SolverConfig, weighted: bool) -> RunOutcome {
    let start = Instant::now();
    let limits = bnb::Limits::new(cfg.deadline(start), cfg.node_budget);

    let (pieces, lift): (Vec<(SignedGraph, Vec<usize>)>, Option<crate::decompose::Decomposition>) =
        if cfg.use_preprocessing {
            let d = decompose(g);
            let pieces = d.pieces().iter().map(|p| (p.graph.clone(), p.nodes.clone())).collect();
            (pieces, Some(d))
        } else {
            (vec![(g.clone(), (0..g.n()).collect())], None)
        };

    let problems: Vec<bnb::Problem> =
        pieces.iter().map(|(h, _)| bnb::Problem::new(h, cfg, weighted)).collect();
    let seeds: Vec<bnb::Seed> = problems.iter().map(|p| p.seed(cfg.use_local_search_seed)).collect();

    let mut gap_left = cfg.gap as f64;
    let mut value = 0.0;
    let mut lower = 0.0;
    let mut status = Status::Optimal;
    let mut colourings = Vec::with_capacity(pieces.len());
    let mut trail = Vec::new();
    let mut done = 0.0;
    for (i, p) in problems.iter().enumerate() {
        let later: f64 = seeds[i + 1..].iter().map(|s| s.cost).sum();
        let r = p.search(&seeds[i], gap_left, cfg.workers, &limits);
        for t in &r.trail {
            trail.push(TrailPoint { nodes: t.nodes, upper: done + t.upper + later });
        }
        gap_left = (gap_left - (r.value - r.lower)).max(0.0);
        done += r.value;
        value += r.value;
        lower += r.lower;
        status = match (status, r.status) {
            (Status::BudgetTerminated, _) | (_, Status::BudgetTerminated) => Status::BudgetTerminated,
            (Status::GapTerminated, _) | (_, Status::GapTerminated) => Status::GapTerminated,
            _ => Status::Optimal,
        };
        colourings.push(r.colouring);
    }

    let colouring = match lift {
        Some(d) => d.lift(&colourings),
        None => colourings.pop().unwrap_or_else(|| Colouring::uniform(g.n(), false)),
    };
    RunOutcome {
        value,
        lower,
        colouring,
        status,
        nodes: limits.nodes(),
        elapsed: start.elapsed(),
        trail,
    }
}

/// A triangle `u < v < w` with its edge ids `(u,v), (u,w), (v,w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Triangle {
    pub nodes: [usize; 3],
    pub edges: [usize; 3],
    pub negative: u8,
}

/// All triangles in lexicographic node order.
pub(crate) fn triangles(g: &SignedGraph) -> Vec<Triangle> {
    let mut out = Vec::new();
    let mut row = vec![usize::MAX; g.n()];
    for u in 0..g.n() {
        for inc in g.neighbours(u) {
            row[inc.node] = inc.edge;
        }
        for uv in g.neighbours(u).iter().filter(|i| i.node > u) {
            let v = uv.node;
            for vw in g.neighbours(v).iter().filter(|i| i.node > v) {
                let uw = row[vw.node];
                if uw == usize::MAX {
                    continue;
                }
                let edges = [uv.edge, uw, vw.edge];
                let negative = edges.iter().filter(|&&e| g.edge(e).sign.is_negative()).count() as u8;
                out.push(Triangle { nodes: [u, v, vw.node], edges, negative });
            }
        }
        for inc in g.neighbours(u) {
            row[inc.node] = usize::MAX;
        }
    }
    out
}

/// Size of a greedy packing of edge-disjoint unbalanced triangles, taken
/// in lexicographic order. Every unbalanced triangle holds a frustrated
/// edge, so this is a lower bound on the frustration index.
pub fn triangle_packing_lower_bound(g: &SignedGraph) -> usize {
    let mut used = vec![false; g.m()];
    let mut count = 0;
    for t in triangles(g).into_iter().filter(|t| t.negative % 2 == 1) {
        if t.edges.iter().any(|&e| used[e]) {
            continue;
        }
        for e in t.edges {
            used[e] = true;
        }
        count += 1;
    }
    count
}

/// Ground-state energy `2L - m` of the ±1 Ising model with the edge signs
/// as couplings.
pub fn ising_hamiltonian(result: &FrustrationResult, m: usize) -> Result<i64> {
    if result.status != Status::Optimal {
        return Err(Error::Refused {
            measure: "ising_hamiltonian",
            reason: format!("solver status is {}, so L is not known to be optimal", result.status),
        });
    }
    Ok(2 * result.l as i64 - m as i64)
}
