//! Branch and bound over assignments of at most `k` colours: a positive edge
//! is frustrated across colour classes, a negative edge inside one.
//!
//! Colours are interchangeable, so a node may only take a colour already in
//! use or the lowest unused one; the first branched node always gets colour 0.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bnb::Limits;
use super::{triangles, SolverConfig, Status, Triangle};
use crate::balance::local_search_upper_bound;
use crate::error::{Error, Result};
use crate::graph::SignedGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KColourResult {
    pub k: usize,
    pub l: usize,
    /// Colour of every node, in `0..k`.
    pub colours: Vec<usize>,
    pub status: Status,
    pub lower_bound: usize,
    pub nodes: u64,
    pub elapsed_secs: f64,
    pub frustrated_edges: Vec<(usize, usize)>,
}

/// Number of edges frustrated by the colour assignment `colours`.
pub fn kcolour_frustration(g: &SignedGraph, colours: &[usize]) -> Result<usize> {
    if colours.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: colours.len() });
    }
    Ok(g.edges().iter().filter(|e| (colours[e.u] == colours[e.v]) == e.sign.is_negative()).count())
}

/// Minimum number of frustrated edges over assignments of at most `k`
/// colours. Preprocessing is not applied; the worker count is ignored.
pub fn solve_kcolour(g: &SignedGraph, k: usize, cfg: &SolverConfig) -> Result<KColourResult> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::InvalidSpec("number of colours must be at least 1".into()));
    }
    let start = Instant::now();
    let limits = Limits::new(cfg.deadline(start), cfg.node_budget);
    let n = g.n();

    let mut order: Vec<usize> = (0..n).collect();
    if cfg.use_degree_branching {
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    }
    // a triangle that every k-colouring frustrates: unbalanced for k = 2,
    // two positive edges and one negative edge for k >= 3
    let forced: Vec<Triangle> = if cfg.use_triangle_lower_bound && k >= 2 {
        triangles(g)
            .into_iter()
            .filter(|t| if k == 2 { t.negative % 2 == 1 } else { t.negative == 1 })
            .collect()
    } else {
        Vec::new()
    };

    let (seed_value, seed) = if cfg.use_local_search_seed && k >= 2 {
        let ls = local_search_upper_bound(g);
        (ls.count as f64, ls.colouring.bits().iter().map(|&b| b as usize).collect())
    } else {
        // everything in one class frustrates exactly the negative edges
        (f64::INFINITY, vec![0; n])
    };
    let fallback = kcolour_frustration(g, &seed)?;

    let mut s = Search {
        g,
        k,
        order,
        forced,
        limits: &limits,
        gap: cfg.gap as f64,
        colour: vec![usize::MAX; n],
        used: 0,
        pos: vec![0; n * k],
        neg: vec![0; n * k],
        pos_total: vec![0; n],
        fixed: 0,
        uu_edges: g.m(),
        mark: vec![0; g.m()],
        epoch: 0,
        incumbent: seed_value,
        best: seed,
        best_value: fallback,
        pruned_min: f64::INFINITY,
        frontier_min: f64::INFINITY,
        aborted: false,
    };
    let root_lb = s.node_bound() as f64 + s.triangle_pack(f64::INFINITY) as f64;
    if n > 0 {
        s.dfs(0);
    }

    let l = s.best_value;
    let mut lower = (l as f64).min(s.pruned_min);
    if s.aborted {
        lower = lower.min(s.frontier_min);
    }
    let lower = (lower.max(root_lb.min(l as f64)).ceil() as usize).min(l);
    let status = if lower == l {
        Status::Optimal
    } else if s.aborted {
        Status::BudgetTerminated
    } else {
        Status::GapTerminated
    };
    debug_assert_eq!(kcolour_frustration(g, &s.best).unwrap(), l);
    let frustrated_edges = g
        .edges()
        .iter()
        .filter(|e| (s.best[e.u] == s.best[e.v]) == e.sign.is_negative())
        .map(|e| (e.u, e.v))
        .collect();
    Ok(KColourResult {
        k,
        l,
        colours: s.best,
        status,
        lower_bound: lower,
        nodes: limits.nodes(),
        elapsed_secs: start.elapsed().as_secs_f64(),
        frustrated_edges,
    })
}

struct Search<'a> {
    g: &'a SignedGraph,
    k: usize,
    order: Vec<usize>,
    forced: Vec<Triangle>,
    limits: &'a Limits,
    gap: f64,
    colour: Vec<usize>,
    /// Colours `0..used` are in use.
    used: usize,
    /// `pos[v*k + c]`: coloured positive neighbours of `v` with colour `c`.
    pos: Vec<usize>,
    neg: Vec<usize>,
    pos_total: Vec<usize>,
    fixed: usize,
    uu_edges: usize,
    mark: Vec<u32>,
    epoch: u32,
    incumbent: f64,
    best: Vec<usize>,
    best_value: usize,
    pruned_min: f64,
    frontier_min: f64,
    aborted: bool,
}

impl Search<'_> {
    fn colour_cost(&self, v: usize, c: usize) -> usize {
        self.pos_total[v] - self.pos[v * self.k + c] + self.neg[v * self.k + c]
    }

    /// Cheapest allowed colour of `v` and its cost; an unused colour costs
    /// every positive edge to a coloured neighbour.
    fn cheapest(&self, v: usize) -> (usize, usize) {
        let mut best = (usize::MAX, usize::MAX);
        for c in 0..self.used {
            let cost = self.colour_cost(v, c);
            if cost < best.1 {
                best = (c, cost);
            }
        }
        if self.used < self.k && self.pos_total[v] < best.1 {
            best = (self.used, self.pos_total[v]);
        }
        best
    }

    fn node_bound(&self) -> usize {
        let open: usize =
            (0..self.g.n()).filter(|&v| self.colour[v] == usize::MAX).map(|v| self.cheapest(v).1).sum();
        self.fixed + open
    }

    fn triangle_pack(&mut self, enough: f64) -> usize {
        if self.forced.is_empty() {
            return 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let mut count = 0;
        for t in &self.forced {
            if t.nodes.iter().any(|&v| self.colour[v] != usize::MAX)
                || t.edges.iter().any(|&e| self.mark[e] == self.epoch)
            {
                continue;
            }
            for &e in &t.edges {
                self.mark[e] = self.epoch;
            }
            count += 1;
            if count as f64 >= enough {
                break;
            }
        }
        count
    }

    fn assign(&mut self, v: usize, c: usize) -> usize {
        let prev_used = self.used;
        self.fixed += self.colour_cost(v, c);
        self.colour[v] = c;
        self.used = self.used.max(c + 1);
        for inc in self.g.neighbours(v) {
            let u = inc.node;
            if self.colour[u] != usize::MAX {
                continue;
            }
            self.uu_edges -= 1;
            if inc.sign.is_negative() {
                self.neg[u * self.k + c] += 1;
            } else {
                self.pos[u * self.k + c] += 1;
                self.pos_total[u] += 1;
            }
        }
        prev_used
    }

    fn unassign(&mut self, v: usize, prev_used: usize) {
        let c = self.colour[v];
        self.colour[v] = usize::MAX;
        for inc in self.g.neighbours(v) {
            let u = inc.node;
            if self.colour[u] != usize::MAX {
                continue;
            }
            self.uu_edges += 1;
            if inc.sign.is_negative() {
                self.neg[u * self.k + c] -= 1;
            } else {
                self.pos[u * self.k + c] -= 1;
                self.pos_total[u] -= 1;
            }
        }
        self.used = prev_used;
        self.fixed -= self.colour_cost(v, c);
    }

    /// No edges remain between uncoloured nodes: each takes its cheapest
    /// colour, and those choosing an unused colour can share one.
    fn leaf(&mut self) {
        let value = self.node_bound();
        if value as f64 >= self.incumbent {
            return;
        }
        self.incumbent = value as f64;
        if value < self.best_value {
            self.best_value = value;
            self.best = (0..self.g.n())
                .map(|v| if self.colour[v] != usize::MAX { self.colour[v] } else { self.cheapest(v).0 })
                .collect();
        }
    }

    fn dfs(&mut self, depth: usize) {
        if self.limits.tick() {
            self.aborted = true;
            self.frontier_min = self.frontier_min.min(self.node_bound() as f64);
            return;
        }
        if self.uu_edges == 0 {
            self.leaf();
            return;
        }
        let threshold = self.incumbent - self.gap;
        let base = self.node_bound() as f64;
        let mut bound = base;
        if bound < threshold {
            bound += self.triangle_pack((threshold - base).ceil()) as f64;
        }
        if bound >= threshold {
            if bound < self.incumbent {
                self.pruned_min = self.pruned_min.min(bound);
            }
            return;
        }

        let v = self.order[depth];
        let allowed = if depth == 0 { 1 } else { (self.used + 1).min(self.k) };
        let mut children: Vec<(usize, usize)> = (0..allowed).map(|c| (self.colour_cost(v, c), c)).collect();
        children.sort_unstable();
        for (i, &(_, c)) in children.iter().enumerate() {
            let prev = self.assign(v, c);
            self.dfs(depth + 1);
            self.unassign(v, prev);
            if self.aborted {
                if i + 1 < children.len() {
                    self.frontier_min = self.frontier_min.min(bound);
                }
                return;
            }
        }
    }
}
