//! Frustration counting, switching, balance detection, sign reshuffling and
//! the greedy flip heuristic.

use std::collections::VecDeque;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Colouring, Edge, Sign, SignedGraph};
use crate::rng;

#[inline]
pub(crate) fn is_frustrated(sign: Sign, same_colour: bool) -> bool {
    match sign {
        Sign::Positive => !same_colour,
        Sign::Negative => same_colour,
    }
}

/// Number of frustrated edges under `x`.
pub fn frustration_count(g: &SignedGraph, x: &Colouring) -> Result<usize> {
    x.check_len(g.n())?;
    Ok(frustrated_edges_unchecked(g, x).count())
}

/// Indices of the edges frustrated under `x`.
pub fn frustrated_edges(g: &SignedGraph, x: &Colouring) -> Result<Vec<usize>> {
    x.check_len(g.n())?;
    Ok(frustrated_edges_unchecked(g, x).collect())
}

fn frustrated_edges_unchecked<'a>(
    g: &'a SignedGraph,
    x: &'a Colouring,
) -> impl Iterator<Item = usize> + 'a {
    g.edges()
        .iter()
        .enumerate()
        .filter(move |(_, e)| is_frustrated(e.sign, x.get(e.u) == x.get(e.v)))
        .map(|(i, _)| i)
}

/// Cost of one edge in the weighted objective: `(1-w)/2` when the endpoints
/// share a colour and `(1+w)/2` otherwise. For `w = ±1` this is the 0/1
/// frustration state.
#[inline]
pub(crate) fn weighted_edge_cost(e: &Edge, same_colour: bool) -> f64 {
    if same_colour {
        (1.0 - e.weight) / 2.0
    } else {
        (1.0 + e.weight) / 2.0
    }
}

/// Weighted frustration `Σ (1-w)/2 + w·[x_i ≠ x_j]`.
pub fn weighted_frustration(g: &SignedGraph, x: &Colouring) -> Result<f64> {
    x.check_len(g.n())?;
    Ok(g.edges().iter().map(|e| weighted_edge_cost(e, x.get(e.u) == x.get(e.v))).sum())
}

/// Negates every edge with exactly one endpoint in the switching set `x`.
pub fn switch(g: &SignedGraph, x: &Colouring) -> Result<SignedGraph> {
    x.check_len(g.n())?;
    Ok(g.map_signs(|_, e| if x.get(e.u) != x.get(e.v) { e.sign.flipped() } else { e.sign }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceCheck {
    pub balanced: bool,
    /// Harary bipartition: negative edges cross, positive edges do not.
    pub bipartition: Option<Colouring>,
    /// Node sequence of a negative cycle (first node not repeated).
    pub witness: Option<Vec<usize>>,
}

/// Linear-time balance test by colour propagation over a BFS forest.
pub fn is_balanced(g: &SignedGraph) -> BalanceCheck {
    let n = g.n();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];

    for root in 0..n {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let cv = colour[v].unwrap();
            for inc in g.neighbours(v) {
                let expected = if inc.sign.is_negative() { !cv } else { cv };
                match colour[inc.node] {
                    None => {
                        colour[inc.node] = Some(expected);
                        parent[inc.node] = v;
                        depth[inc.node] = depth[v] + 1;
                        queue.push_back(inc.node);
                    }
                    Some(c) if c != expected => {
                        let cycle = tree_cycle(v, inc.node, &parent, &depth);
                        return BalanceCheck { balanced: false, bipartition: None, witness: Some(cycle) };
                    }
                    Some(_) => {}
                }
            }
        }
    }
    BalanceCheck {
        balanced: true,
        bipartition: Some(Colouring::new(colour.into_iter().map(|c| c.unwrap_or(false)).collect())),
        witness: None,
    }
}

/// Cycle closed by the non-tree edge (a, b): a → lca along the tree, then lca → b.
fn tree_cycle(a: usize, b: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut x, mut y) = (a, b);
    let mut left = Vec::new();
    let mut right = Vec::new();
    while depth[x] > depth[y] {
        left.push(x);
        x = parent[x];
    }
    while depth[y] > depth[x] {
        right.push(y);
        y = parent[y];
    }
    while x != y {
        left.push(x);
        right.push(y);
        x = parent[x];
        y = parent[y];
    }
    left.push(x);
    left.extend(right.into_iter().rev());
    left
}

/// Product of edge signs along a closed node sequence.
pub fn cycle_sign(g: &SignedGraph, cycle: &[usize]) -> Option<Sign> {
    let k = cycle.len();
    let mut s = Sign::Positive;
    for i in 0..k {
        s = s * g.sign_between(cycle[i], cycle[(i + 1) % k])?;
    }
    Some(s)
}

/// Random permutation of the edge signs that keeps `m⁻` fixed.
pub fn reshuffle(g: &SignedGraph, seed: u64) -> SignedGraph {
    let (m, neg) = (g.m(), g.negative_count());
    if neg == 0 || neg == m {
        return g.clone();
    }
    let mut rng = rng::seeded(seed);
    let mut negative = vec![false; m];
    for i in index::sample(&mut rng, m, neg) {
        negative[i] = true;
    }
    g.map_signs(|i, _| if negative[i] { Sign::Negative } else { Sign::Positive })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSearch {
    pub colouring: Colouring,
    pub count: usize,
    /// Frustration count before the first flip and after every flip.
    pub trace: Vec<usize>,
}

/// Flip heuristic started from the all-white colouring.
pub fn local_search_upper_bound(g: &SignedGraph) -> LocalSearch {
    local_search_from(g, &Colouring::uniform(g.n(), false)).expect("length matches")
}

/// Repeatedly flips the node with the largest surplus of frustrated over
/// satisfied incident edges (smallest id on ties) until every node has a
/// non-negative net degree in the switched graph.
pub fn local_search_from(g: &SignedGraph, start: &Colouring) -> Result<LocalSearch> {
    start.check_len(g.n())?;
    let mut x = start.clone().into_bits();
    let mut gain: Vec<i64> = (0..g.n())
        .map(|v| {
            g.neighbours(v)
                .iter()
                .map(|inc| if is_frustrated(inc.sign, x[v] == x[inc.node]) { 1 } else { -1 })
                .sum()
        })
        .collect();
    let mut count = frustrated_edges_unchecked(g, start).count();
    let mut trace = vec![count];
    loop {
        let best = gain
            .iter()
            .enumerate()
            .filter(|(_, &gv)| gv > 0)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)));
        let Some((v, &gv)) = best else { break };
        x[v] = !x[v];
        count -= gv as usize;
        gain[v] = -gv;
        for inc in g.neighbours(v) {
            let now = is_frustrated(inc.sign, x[v] == x[inc.node]);
            gain[inc.node] += if now { 2 } else { -2 };
        }
        trace.push(count);
    }
    Ok(LocalSearch { colouring: Colouring::new(x), count, trace })
}
