//! Depth-first branch and bound over two-colourings of one piece.
//!
//! Bound at a search node: cost of edges between coloured nodes, plus for
//! every uncoloured node the cheaper of its two colours with respect to its
//! coloured neighbours, plus a greedy packing of edge-disjoint unbalanced
//! triangles among uncoloured nodes (unweighted) or the cheaper state of
//! every uncoloured edge (weighted). The three parts cover disjoint edge
//! sets, so their sum never exceeds the best completion.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::{triangles, SolverConfig, Status, TrailPoint, Triangle};
use crate::balance::{is_frustrated, local_search_upper_bound, weighted_edge_cost};
use crate::graph::{Colouring, SignedGraph};

pub(crate) const EPS: f64 = 1e-9;

/// Limits shared by every piece and worker of one solve.
pub(crate) struct Limits {
    deadline: Option<Instant>,
    budget: Option<u64>,
    nodes: AtomicU64,
    abort: AtomicBool,
}

impl Limits {
    pub(crate) fn new(deadline: Option<Instant>, budget: Option<u64>) -> Self {
        Limits { deadline, budget, nodes: AtomicU64::new(0), abort: AtomicBool::new(false) }
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn aborted(&self) -> bool {
        self.abort.load(Ordering::Relaxed)
    }

    /// Counts one search node; true when the search must stop instead.
    pub(crate) fn tick(&self) -> bool {
        if self.aborted() {
            return true;
        }
        let prev = self.nodes.fetch_add(1, Ordering::Relaxed);
        let over_budget = self.budget.is_some_and(|b| prev >= b);
        let over_time = self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_budget || over_time {
            self.nodes.fetch_sub(1, Ordering::Relaxed);
            self.abort.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }
}

pub(crate) struct Problem {
    n: usize,
    adj: Vec<Vec<(usize, usize)>>,
    same: Vec<f64>,
    diff: Vec<f64>,
    order: Vec<usize>,
    fix_first: bool,
    triangles: Vec<Triangle>,
    local_search: Colouring,
}

pub(crate) struct Seed {
    pub cost: f64,
    pub colouring: Colouring,
    /// Whether `cost` starts as the incumbent; otherwise it is only a fallback.
    pub active: bool,
}

pub(crate) struct PieceResult {
    pub value: f64,
    pub lower: f64,
    pub colouring: Colouring,
    pub status: Status,
    pub trail: Vec<TrailPoint<f64>>,
}

impl Problem {
    pub(crate) fn new(h: &SignedGraph, cfg: &SolverConfig, weighted: bool) -> Self {
        let n = h.n();
        let adj = (0..n).map(|v| h.neighbours(v).iter().map(|i| (i.node, i.edge)).collect()).collect();
        let cost = |e: &crate::graph::Edge, same: bool| {
            if weighted {
                weighted_edge_cost(e, same)
            } else if is_frustrated(e.sign, same) {
                1.0
            } else {
                0.0
            }
        };
        let same = h.edges().iter().map(|e| cost(e, true)).collect();
        let diff = h.edges().iter().map(|e| cost(e, false)).collect();

        let mut order: Vec<usize> = (0..n).collect();
        if cfg.use_degree_branching {
            order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
        }
        let fix_first = cfg.use_colour_fixing && n > 0;
        if fix_first {
            let top = (0..n).min_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v)).unwrap();
            let pos = order.iter().position(|&v| v == top).unwrap();
            order[..=pos].rotate_right(1);
        }
        let triangles = if cfg.use_triangle_lower_bound && !weighted {
            triangles(h).into_iter().filter(|t| t.negative % 2 == 1).collect()
        } else {
            Vec::new()
        };
        let local_search = local_search_upper_bound(h).colouring;
        Problem { n, adj, same, diff, order, fix_first, triangles, local_search }
    }

    fn cost_of(&self, bits: &[bool]) -> f64 {
        let mut total = 0.0;
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, e) in list {
                if u < v {
                    total += if bits[u] == bits[v] { self.same[e] } else { self.diff[e] };
                }
            }
        }
        total
    }

    pub(crate) fn seed(&self, use_local_search: bool) -> Seed {
        if use_local_search {
            Seed { cost: self.cost_of(self.local_search.bits()), colouring: self.local_search.clone(), active: true }
        } else {
            let x = Colouring::uniform(self.n, false);
            Seed { cost: self.cost_of(x.bits()), colouring: x, active: false }
        }
    }

    pub(crate) fn search(&self, seed: &Seed, gap: f64, workers: usize, limits: &Limits) -> PieceResult {
        let mut trail = Vec::new();
        if seed.active {
            trail.push(TrailPoint { nodes: limits.nodes(), upper: seed.cost });
        }
        let shared = Shared {
            limits,
            incumbent: AtomicU64::new(if seed.active { seed.cost } else { f64::INFINITY }.to_bits()),
            best: Mutex::new(Best { value: seed.cost, bits: seed.colouring.bits().to_vec(), trail }),
        };

        let mut root = Worker::new(self, &shared, gap);
        let root_lb = root.base() + root.triangle_pack(f64::INFINITY) as f64;

        let (pruned, frontier, aborted) = if workers <= 1 || self.n < 8 {
            root.dfs(0);
            (root.pruned_min, root.frontier_min, root.aborted)
        } else {
            self.parallel(&shared, gap, workers, root_lb)
        };

        let best = shared.best.into_inner().unwrap();
        let value = best.value;
        let mut lower = value.min(pruned);
        if aborted {
            lower = lower.min(frontier);
        }
        lower = lower.max(root_lb.min(value));
        let status = if lower >= value - EPS {
            Status::Optimal
        } else if aborted {
            Status::BudgetTerminated
        } else {
            Status::GapTerminated
        };
        PieceResult { value, lower, colouring: Colouring::new(best.bits), status, trail: best.trail }
    }

    /// Splits the tree at a fixed depth and hands the subtrees to `workers`
    /// threads that share the incumbent.
    fn parallel(&self, shared: &Shared, gap: f64, workers: usize, root_lb: f64) -> (f64, f64, bool) {
        let free = |d: usize| if self.fix_first { d.saturating_sub(1) } else { d };
        let mut depth = 0;
        while depth < self.n && (1usize << free(depth)) < 4 * workers {
            depth += 1;
        }
        let prefixes: Vec<Vec<bool>> = (0..1usize << free(depth))
            .map(|mask| {
                (0..depth)
                    .map(|i| {
                        if self.fix_first && i == 0 {
                            true
                        } else {
                            let bit = free(depth) - 1 - free(i);
                            mask >> bit & 1 == 1
                        }
                    })
                    .collect()
            })
            .collect();

        let next = AtomicUsize::new(0);
        let results: Vec<(f64, f64, bool)> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut w = Worker::new(self, shared, gap);
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= prefixes.len() {
                                break;
                            }
                            if shared.limits.aborted() {
                                w.aborted = true;
                                w.frontier_min = w.frontier_min.min(root_lb);
                                continue;
                            }
                            let mut saved = Vec::with_capacity(depth);
                            for (d, &c) in prefixes[i].iter().enumerate() {
                                saved.push(w.assign(self.order[d], c));
                            }
                            w.dfs(depth);
                            for d in (0..depth).rev() {
                                w.unassign(self.order[d], saved.pop().unwrap());
                            }
                        }
                        (w.pruned_min, w.frontier_min, w.aborted)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
        });
        results.into_iter().fold((f64::INFINITY, f64::INFINITY, false), |acc, r| {
            (acc.0.min(r.0), acc.1.min(r.1), acc.2 || r.2)
        })
    }
}

struct Best {
    value: f64,
    bits: Vec<bool>,
    trail: Vec<TrailPoint<f64>>,
}

struct Shared<'a> {
    limits: &'a Limits,
    /// Bits of a non-negative `f64`, whose order matches the numeric order.
    incumbent: AtomicU64,
    best: Mutex<Best>,
}

impl Shared<'_> {
    fn incumbent(&self) -> f64 {
        f64::from_bits(self.incumbent.load(Ordering::Relaxed))
    }

    fn offer(&self, value: f64, bits: Vec<bool>) {
        self.incumbent.fetch_min(value.to_bits(), Ordering::Relaxed);
        let mut best = self.best.lock().unwrap();
        if value < best.value - EPS {
            best.value = value;
            best.bits = bits;
            let nodes = self.limits.nodes();
            best.trail.push(TrailPoint { nodes, upper: value });
        }
    }
}

struct Saved {
    fixed: f64,
    summin: f64,
    uu_edges: usize,
    uu_min: f64,
    undo_len: usize,
}

struct Worker<'p, 's> {
    p: &'p Problem,
    shared: &'s Shared<'s>,
    gap: f64,
    /// -1 uncoloured, 0 white, 1 black.
    colour: Vec<i8>,
    /// Cost of white / black for an uncoloured node w.r.t. coloured neighbours.
    cost: Vec<[f64; 2]>,
    fixed: f64,
    summin: f64,
    uu_edges: usize,
    uu_min: f64,
    undo: Vec<(usize, [f64; 2])>,
    mark: Vec<u32>,
    epoch: u32,
    pruned_min: f64,
    frontier_min: f64,
    aborted: bool,
}

impl<'p, 's> Worker<'p, 's> {
    fn new(p: &'p Problem, shared: &'s Shared<'s>, gap: f64) -> Self {
        let uu_min = p.same.iter().zip(&p.diff).map(|(a, b)| a.min(*b)).sum();
        Worker {
            p,
            shared,
            gap,
            colour: vec![-1; p.n],
            cost: vec![[0.0; 2]; p.n],
            fixed: 0.0,
            summin: 0.0,
            uu_edges: p.same.len(),
            uu_min,
            undo: Vec::new(),
            mark: vec![0; p.same.len()],
            epoch: 0,
            pruned_min: f64::INFINITY,
            frontier_min: f64::INFINITY,
            aborted: false,
        }
    }

    fn base(&self) -> f64 {
        self.fixed + self.summin + self.uu_min
    }

    fn assign(&mut self, v: usize, black: bool) -> Saved {
        let saved = Saved {
            fixed: self.fixed,
            summin: self.summin,
            uu_edges: self.uu_edges,
            uu_min: self.uu_min,
            undo_len: self.undo.len(),
        };
        let c = black as usize;
        self.fixed += self.cost[v][c];
        self.summin -= self.cost[v][0].min(self.cost[v][1]);
        self.colour[v] = c as i8;
        for &(u, e) in &self.p.adj[v] {
            if self.colour[u] >= 0 {
                continue;
            }
            let old = self.cost[u];
            self.undo.push((u, old));
            let (same, diff) = (self.p.same[e], self.p.diff[e]);
            let new = if black { [old[0] + diff, old[1] + same] } else { [old[0] + same, old[1] + diff] };
            self.cost[u] = new;
            self.summin += new[0].min(new[1]) - old[0].min(old[1]);
            self.uu_edges -= 1;
            self.uu_min -= same.min(diff);
        }
        saved
    }

    fn unassign(&mut self, v: usize, s: Saved) {
        while self.undo.len() > s.undo_len {
            let (u, c) = self.undo.pop().unwrap();
            self.cost[u] = c;
        }
        self.colour[v] = -1;
        self.fixed = s.fixed;
        self.summin = s.summin;
        self.uu_edges = s.uu_edges;
        self.uu_min = s.uu_min;
    }

    /// Greedy packing of edge-disjoint unbalanced triangles on uncoloured
    /// nodes; stops early once `enough` triangles are found.
    fn triangle_pack(&mut self, enough: f64) -> usize {
        if self.p.triangles.is_empty() {
            return 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let mut count = 0;
        for t in &self.p.triangles {
            if t.nodes.iter().any(|&v| self.colour[v] >= 0) || t.edges.iter().any(|&e| self.mark[e] == self.epoch)
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

    /// No edges remain between uncoloured nodes, so each takes its cheaper colour.
    fn leaf(&mut self) {
        let value = self.fixed + self.summin;
        if value >= self.shared.incumbent() - EPS {
            return;
        }
        let bits = (0..self.p.n)
            .map(|v| match self.colour[v] {
                -1 => self.cost[v][1] <= self.cost[v][0],
                c => c == 1,
            })
            .collect();
        self.shared.offer(value, bits);
    }

    fn dfs(&mut self, depth: usize) {
        if self.shared.limits.tick() {
            self.aborted = true;
            self.frontier_min = self.frontier_min.min(self.base());
            return;
        }
        if self.uu_edges == 0 {
            self.leaf();
            return;
        }
        let incumbent = self.shared.incumbent();
        let threshold = incumbent - self.gap;
        let base = self.base();
        let mut bound = base;
        if bound < threshold - EPS {
            bound += self.triangle_pack((threshold - base - EPS).ceil()) as f64;
        }
        if bound >= threshold - EPS {
            if bound < incumbent - EPS {
                self.pruned_min = self.pruned_min.min(bound);
            }
            return;
        }

        let v = self.p.order[depth];
        let children: &[bool] = if depth == 0 && self.p.fix_first {
            &[true]
        } else if self.cost[v][1] <= self.cost[v][0] {
            &[true, false]
        } else {
            &[false, true]
        };
        for (i, &black) in children.iter().enumerate() {
            let saved = self.assign(v, black);
            self.dfs(depth + 1);
            self.unassign(v, saved);
            if self.aborted {
                if i + 1 < children.len() {
                    self.frontier_min = self.frontier_min.min(bound);
                }
                return;
            }
        }
    }
}
