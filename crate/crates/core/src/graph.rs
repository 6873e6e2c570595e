//! Signed graph data model.
//!
//! Graphs are undirected, simple and immutable. Nodes are dense ids `0..n`;
//! every edge is stored once with `u < v`, and the edge list is kept in
//! lexicographic order so iteration (and everything downstream of it) is
//! deterministic.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn of_weight(w: f64) -> Sign {
        if w < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+1",
            Sign::Negative => "-1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
    /// Equals `sign` as ±1.0 for unweighted graphs.
    pub weight: f64,
}

impl Edge {
    pub fn other(&self, node: usize) -> usize {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// One entry of a node's adjacency list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub node: usize,
    pub edge: usize,
    pub sign: Sign,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub name: Option<String>,
    /// Original label of every node, indexed by node id.
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<Edge>,
    weighted: bool,
    negative: usize,
    adj: Vec<Vec<Incidence>>,
    meta: GraphMeta,
}

impl SignedGraph {
    /// Builds an unweighted graph. Endpoints are canonicalised to `u < v`.
    pub fn from_signs<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Sign)>,
    {
        let edges = edges
            .into_iter()
            .map(|(u, v, sign)| Edge { u, v, sign, weight: sign.value() as f64 })
            .collect();
        Self::from_edges(n, edges, false)
    }

    /// Builds a weighted graph; every weight must lie in `[-1, 1] \ {0}`.
    pub fn from_weights<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (u, v, w) in edges {
            check_weight(w, None)?;
            list.push(Edge { u, v, sign: Sign::of_weight(w), weight: w });
        }
        Self::from_edges(n, list, true)
    }

    /// Shorthand used heavily in tests: `(u, v, ±1)` triples.
    pub fn from_pm(n: usize, edges: &[(usize, usize, i32)]) -> Result<Self> {
        Self::from_signs(
            n,
            edges
                .iter()
                .map(|&(u, v, s)| (u, v, if s < 0 { Sign::Negative } else { Sign::Positive })),
        )
    }

    pub(crate) fn from_edges(n: usize, mut edges: Vec<Edge>, weighted: bool) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.u >= n {
                return Err(Error::NodeOutOfRange { node: e.u, n });
            }
            if e.v >= n {
                return Err(Error::NodeOutOfRange { node: e.v, n });
            }
            if e.u == e.v {
                return Err(Error::SelfLoop { node: e.u.to_string(), line: None });
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            if weighted {
                check_weight(e.weight, None)?;
                e.sign = Sign::of_weight(e.weight);
            } else {
                e.weight = e.sign.value() as f64;
            }
        }
        edges.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
        if let Some(w) = edges.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::DuplicateEdge {
                u: w[0].u.to_string(),
                v: w[0].v.to_string(),
                line: None,
            });
        }
        let mut adj = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            adj[e.u].push(Incidence { node: e.v, edge: idx, sign: e.sign });
            adj[e.v].push(Incidence { node: e.u, edge: idx, sign: e.sign });
        }
        let negative = edges.iter().filter(|e| e.sign.is_negative()).count();
        Ok(SignedGraph { n, edges, weighted, negative, adj, meta: GraphMeta::default() })
    }

    pub fn empty(n: usize) -> Self {
        SignedGraph {
            n,
            edges: Vec::new(),
            weighted: false,
            negative: 0,
            adj: vec![Vec::new(); n],
            meta: GraphMeta::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn negative_count(&self) -> usize {
        self.negative
    }

    pub fn positive_count(&self) -> usize {
        self.edges.len() - self.negative
    }

    /// `2m / (n(n-1))`, defined for `n >= 2`.
    pub fn density(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        Some(2.0 * self.m() as f64 / (self.n as f64 * (self.n as f64 - 1.0)))
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn neighbours(&self, v: usize) -> &[Incidence] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Index of the edge joining `u` and `v`, if any.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search_by(|e| (e.u, e.v).cmp(&(a, b))).ok()
    }

    pub fn sign_between(&self, u: usize, v: usize) -> Option<Sign> {
        self.edge_index(u, v).map(|i| self.edges[i].sign)
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn with_meta(mut self, meta: GraphMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.meta.name = Some(name.into());
        self
    }

    /// Original label of `v`, falling back to the numeric id.
    pub fn label(&self, v: usize) -> String {
        match &self.meta.labels {
            Some(labels) => labels[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let mut positive = vec![0; self.n];
        let mut negative = vec![0; self.n];
        for e in &self.edges {
            let slot = if e.sign.is_negative() { &mut negative } else { &mut positive };
            slot[e.u] += 1;
            slot[e.v] += 1;
        }
        DegreeProfile { positive, negative }
    }

    /// Same topology and metadata, with the sign of edge `i` replaced by `sign(i)`.
    /// For weighted graphs the weight magnitude is kept.
    pub fn map_signs(&self, mut sign: impl FnMut(usize, &Edge) -> Sign) -> SignedGraph {
        let mut edges = self.edges.clone();
        for (i, e) in edges.iter_mut().enumerate() {
            let s = sign(i, &self.edges[i]);
            if s != e.sign {
                e.sign = s;
                e.weight = -e.weight;
            }
        }
        let mut adj = self.adj.clone();
        for list in adj.iter_mut() {
            for inc in list.iter_mut() {
                inc.sign = edges[inc.edge].sign;
            }
        }
        let negative = edges.iter().filter(|e| e.sign.is_negative()).count();
        SignedGraph { n: self.n, edges, weighted: self.weighted, negative, adj, meta: self.meta.clone() }
    }

    /// The graph with the listed edges deleted (node set unchanged).
    pub fn without_edges(&self, removed: &[usize]) -> SignedGraph {
        let mut drop = vec![false; self.m()];
        for &i in removed {
            drop[i] = true;
        }
        let kept = self
            .edges
            .iter()
            .zip(&drop)
            .filter(|(_, &d)| !d)
            .map(|(e, _)| *e)
            .collect();
        SignedGraph::from_edges(self.n, kept, self.weighted)
            .expect("subset of a valid edge list is valid")
            .with_meta(self.meta.clone())
    }

    /// Subgraph induced by `nodes`; node `k` of the result is `nodes[k]` here.
    pub fn induced(&self, nodes: &[usize]) -> SignedGraph {
        let mut local = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| Edge { u: local[e.u], v: local[e.v], ..*e })
            .collect();
        let mut g = SignedGraph::from_edges(nodes.len(), edges, self.weighted)
            .expect("induced subgraph of a valid graph is valid");
        if let Some(labels) = &self.meta.labels {
            g.meta.labels = Some(nodes.iter().map(|&v| labels[v].clone()).collect());
        }
        g.meta.name = self.meta.name.clone();
        g
    }

    /// Disjoint union; nodes of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &SignedGraph) -> SignedGraph {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge { u: e.u + shift, v: e.v + shift, ..*e }));
        SignedGraph::from_edges(self.n + other.n, edges, self.weighted || other.weighted)
            .expect("union of valid graphs is valid")
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for inc in &self.adj[v] {
                    if !seen[inc.node] {
                        seen[inc.node] = true;
                        comp.push(inc.node);
                        queue.push_back(inc.node);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_count() == 1
    }

    /// Circuit rank `m - n + c`.
    pub fn circuit_rank(&self) -> usize {
        self.m() + self.component_count() - self.n
    }

    /// Largest connected component as an induced subgraph (ties: smallest ids).
    pub fn giant_component(&self) -> (SignedGraph, Vec<usize>) {
        let comps = self.components();
        let best = comps
            .into_iter()
            .fold(Vec::new(), |best, c| if c.len() > best.len() { c } else { best });
        (self.induced(&best), best)
    }
}

fn check_weight(w: f64, line: Option<usize>) -> Result<()> {
    if !w.is_finite() || w == 0.0 || !(-1.0..=1.0).contains(&w) {
        return Err(Error::InvalidWeight { weight: w.to_string(), line });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

impl DegreeProfile {
    pub fn total(&self, v: usize) -> usize {
        self.positive[v] + self.negative[v]
    }

    pub fn net(&self, v: usize) -> i64 {
        self.positive[v] as i64 - self.negative[v] as i64
    }
}

/// Two-colour node assignment; `true` marks a node in the colouring set (black).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Colouring(Vec<bool>);

impl Colouring {
    pub fn new(bits: Vec<bool>) -> Self {
        Colouring(bits)
    }

    pub fn uniform(n: usize, black: bool) -> Self {
        Colouring(vec![black; n])
    }

    /// Bit `i` of `mask` gives the colour of node `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Colouring((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn complement(&self) -> Colouring {
        Colouring(self.0.iter().map(|b| !b).collect())
    }

    pub fn black_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: self.0.len() });
        }
        Ok(())
    }
}
