//! Partial-balance and bipartivity measures.
//!
//! Every measure works on edge signs only; weights of a weighted graph are
//! ignored here.

use serde::{Deserialize, Serialize};

use crate::balance::is_balanced;
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::linalg::SymMatrix;

pub use crate::cycles::{
    cycle_census, degree_of_balance, expected_degree_of_balance, expected_relative_k_balance,
    CycleCensus, Weighting, DEFAULT_CYCLE_LIMIT,
};

/// A reported measure: either a number or the reason it was not computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureValue {
    Value(f64),
    Skipped(String),
}

impl MeasureValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            MeasureValue::Value(v) => Some(*v),
            MeasureValue::Skipped(_) => None,
        }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        MeasureValue::Skipped(reason.into())
    }
}

impl From<Result<f64>> for MeasureValue {
    fn from(r: Result<f64>) -> Self {
        match r {
            Ok(v) => MeasureValue::Value(v),
            Err(Error::Refused { reason, .. }) => MeasureValue::Skipped(reason),
            Err(e) => MeasureValue::Skipped(e.to_string()),
        }
    }
}

pub fn signed_adjacency(g: &SignedGraph) -> SymMatrix {
    let mut a = SymMatrix::zeros(g.n());
    for e in g.edges() {
        a.set(e.u, e.v, e.sign.value() as f64);
    }
    a
}

pub fn unsigned_adjacency(g: &SignedGraph) -> SymMatrix {
    let mut a = SymMatrix::zeros(g.n());
    for e in g.edges() {
        a.set(e.u, e.v, 1.0);
    }
    a
}

/// `D - A` with `D` the diagonal of unsigned degrees.
pub fn signed_laplacian(g: &SignedGraph) -> SymMatrix {
    let mut l = SymMatrix::zeros(g.n());
    for e in g.edges() {
        l.set(e.u, e.v, -(e.sign.value() as f64));
    }
    for v in 0..g.n() {
        l.add_diag(v, g.degree(v) as f64);
    }
    l
}

/// `(Tr(A³), Tr(|A|³))`, evaluated sparsely as `Σ_ij a_ij (A²)_ij`.
pub fn cube_traces(g: &SignedGraph) -> (i64, i64) {
    let mut row = vec![0i64; g.n()];
    let (mut signed, mut unsigned) = (0i64, 0i64);
    for i in 0..g.n() {
        for inc in g.neighbours(i) {
            row[inc.node] = inc.sign.value() as i64;
        }
        for ij in g.neighbours(i) {
            for jk in g.neighbours(ij.node) {
                let aki = row[jk.node];
                if aki != 0 {
                    signed += ij.sign.value() as i64 * jk.sign.value() as i64 * aki;
                    unsigned += 1;
                }
            }
        }
        for inc in g.neighbours(i) {
            row[inc.node] = 0;
        }
    }
    (signed, unsigned)
}

/// `T = (Tr(A³) + Tr(|A|³)) / (2 Tr(|A|³))`, or 1 without triangles.
pub fn triangle_index(g: &SignedGraph) -> f64 {
    let (s, u) = cube_traces(g);
    if u == 0 {
        1.0
    } else {
        (s + u) as f64 / (2 * u) as f64
    }
}

/// `Σ e^{λ_i(A)} / Σ e^{λ_i(|A|)}`, both sums scaled by `e^{-λ_max(|A|)}`.
pub fn walk_ratio(g: &SignedGraph) -> Result<f64> {
    if g.n() == 0 {
        return Err(Error::Refused { measure: "W", reason: "graph has no nodes".into() });
    }
    let signed = signed_adjacency(g).eigenvalues("signed adjacency matrix")?;
    let unsigned = unsigned_adjacency(g).eigenvalues("unsigned adjacency matrix")?;
    let shift = unsigned.last().copied().unwrap_or(0.0);
    let num: f64 = signed.iter().map(|l| (l - shift).exp()).sum();
    let den: f64 = unsigned.iter().map(|l| (l - shift).exp()).sum();
    Ok(num / den)
}

/// Walk-based balance `W = (K + 1) / 2`.
pub fn walk_balance(g: &SignedGraph) -> Result<f64> {
    Ok((walk_ratio(g)? + 1.0) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicConflict {
    pub lambda: f64,
    pub normalised: f64,
    pub mean_endpoint_degree_max: f64,
}

/// Smallest signed-Laplacian eigenvalue and `A = 1 - λ/(d̄_max - 1)`.
/// Refuses disconnected and acyclic graphs.
pub fn algebraic_conflict(g: &SignedGraph) -> Result<AlgebraicConflict> {
    let refuse = |reason: &str| Error::Refused { measure: "A", reason: reason.to_string() };
    if g.n() == 0 {
        return Err(refuse("graph has no nodes"));
    }
    if !g.is_connected() {
        return Err(refuse(
            "graph is disconnected; extract a component first (e.g. the giant component)",
        ));
    }
    if g.m() < g.n() {
        return Err(refuse("graph is acyclic and therefore balanced"));
    }
    let ev = signed_laplacian(g).eigenvalues("signed Laplacian")?;
    let lambda = ev[0].max(0.0);
    let dbar = g
        .edges()
        .iter()
        .map(|e| (g.degree(e.u) + g.degree(e.v)) as f64 / 2.0)
        .fold(0.0, f64::max);
    Ok(AlgebraicConflict { lambda, normalised: 1.0 - lambda / (dbar - 1.0), mean_endpoint_degree_max: dbar })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationMeasures {
    pub f: MeasureValue,
    pub f_prime: MeasureValue,
    pub x: MeasureValue,
}

/// `F`, `F′` and `X` for a known frustration index `l`.
pub fn frustration_measures(l: usize, g: &SignedGraph) -> FrustrationMeasures {
    let (n, m, neg) = (g.n() as i64, g.m() as i64, g.negative_count() as i64);
    let l = l as f64;
    let f = if m == 0 { MeasureValue::Value(1.0) } else { MeasureValue::Value(1.0 - 2.0 * l / m as f64) };
    // ⌊m/2 - (n-1)/4⌋ = ⌊(2m - n + 1) / 4⌋
    let denom = (2 * m - n + 1).div_euclid(4);
    let f_prime = if denom <= 0 {
        MeasureValue::skipped(format!("normalising denominator floor(m/2 - (n-1)/4) = {denom} is not positive"))
    } else {
        MeasureValue::Value(1.0 - l / denom as f64)
    };
    let x = if neg == 0 { MeasureValue::Value(1.0) } else { MeasureValue::Value(1.0 - l / neg as f64) };
    FrustrationMeasures { f, f_prime, x }
}

/// `Y = m⁺/m` (skipped without edges) and the binary `Z`.
pub fn trivial_measures(g: &SignedGraph) -> (MeasureValue, f64) {
    let y = if g.m() == 0 {
        MeasureValue::skipped("graph has no edges")
    } else {
        MeasureValue::Value(g.positive_count() as f64 / g.m() as f64)
    };
    let z = if is_balanced(g).balanced { 1.0 } else { 0.0 };
    (y, z)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bipartivity {
    pub beta: f64,
    pub b_s: f64,
}

/// Spectral bipartivity of the underlying unsigned graph:
/// `β = Σ cosh λ / Σ e^λ` and `b_s = Σ e^{-λ} / Σ e^λ`.
pub fn spectral_bipartivity(g: &SignedGraph) -> Result<Bipartivity> {
    if g.n() == 0 {
        return Err(Error::Refused { measure: "beta", reason: "graph has no nodes".into() });
    }
    let ev = unsigned_adjacency(g).eigenvalues("unsigned adjacency matrix")?;
    let shift = ev.last().copied().unwrap_or(0.0);
    let pos: f64 = ev.iter().map(|l| (l - shift).exp()).sum();
    let neg: f64 = ev.iter().map(|l| (-l - shift).exp()).sum();
    Ok(Bipartivity { beta: 0.5 * (pos + neg) / pos, b_s: neg / pos })
}
