//! Plain-text edge-list format.
//!
//! ```text
//! # comment
//! a b +1        # signed edge between labels a and b
//! b c -0.35     # a decimal weight makes the whole graph weighted
//! d             # single label: declares a node (isolated nodes, id order)
//! ```
//!
//! Labels are arbitrary non-whitespace tokens and are compacted to ids
//! `0..n` in order of first appearance.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, GraphMeta, Sign, SignedGraph};

enum Weight {
    Sign(Sign),
    Real(f64),
}

fn parse_weight(tok: &str, line: usize) -> Result<Weight> {
    let bad = || Error::InvalidWeight { weight: tok.to_string(), line: Some(line) };
    let is_decimal = tok.contains(['.', 'e', 'E']);
    if is_decimal {
        let w: f64 = tok.parse().map_err(|_| bad())?;
        if !w.is_finite() || w == 0.0 || !(-1.0..=1.0).contains(&w) {
            return Err(bad());
        }
        Ok(Weight::Real(w))
    } else {
        match tok.parse::<i64>().map_err(|_| bad())? {
            1 => Ok(Weight::Sign(Sign::Positive)),
            -1 => Ok(Weight::Sign(Sign::Negative)),
            _ => Err(bad()),
        }
    }
}

pub fn parse_edge_list(text: &str) -> Result<SignedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut raw: Vec<(usize, usize, Weight)> = Vec::new();
    let mut weighted = false;

    let mut intern = |label: &str| -> usize {
        match ids.entry(label.to_string()) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                labels.push(label.to_string());
                *e.insert(labels.len() - 1)
            }
        }
    };

    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [label] => {
                intern(label);
            }
            [a, b, w] => {
                if a == b {
                    return Err(Error::SelfLoop { node: a.to_string(), line: Some(line) });
                }
                let weight = parse_weight(w, line)?;
                let (u, v) = (intern(a), intern(b));
                let key = if u < v { (u, v) } else { (v, u) };
                if !seen.insert(key) {
                    return Err(Error::DuplicateEdge {
                        u: a.to_string(),
                        v: b.to_string(),
                        line: Some(line),
                    });
                }
                weighted |= matches!(weight, Weight::Real(_));
                raw.push((u, v, weight));
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `<u> <v> <weight>`, found {} fields", toks.len()),
                })
            }
        }
    }

    let edges = raw
        .into_iter()
        .map(|(u, v, w)| {
            let weight = match w {
                Weight::Sign(s) => s.value() as f64,
                Weight::Real(x) => x,
            };
            Edge { u, v, sign: Sign::of_weight(weight), weight }
        })
        .collect();
    let g = SignedGraph::from_edges(labels.len(), edges, weighted)?;
    Ok(g.with_meta(GraphMeta { name: None, labels: Some(labels) }))
}

pub fn read_edge_list(path: impl AsRef<std::path::Path>) -> std::io::Result<Result<SignedGraph>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    Ok(parse_edge_list(&text).map(|g| {
        let name = path.as_ref().file_stem().map(|s| s.to_string_lossy().into_owned());
        let mut meta = g.meta().clone();
        meta.name = name;
        g.with_meta(meta)
    }))
}

/// Renders `g` in canonical `u < v` order. Node declaration lines are
/// emitted first whenever the edge lines alone would not reproduce the ids.
pub fn write_edge_list(g: &SignedGraph) -> String {
    let mut out = String::new();
    if let Some(name) = &g.meta().name {
        let _ = writeln!(out, "# {name}");
    }
    let _ = writeln!(out, "# n={} m={} m-={}", g.n(), g.m(), g.negative_count());

    let mut order = Vec::with_capacity(g.n());
    let mut placed = vec![false; g.n()];
    for e in g.edges() {
        for v in [e.u, e.v] {
            if !placed[v] {
                placed[v] = true;
                order.push(v);
            }
        }
    }
    let identity = order.len() == g.n() && order.iter().enumerate().all(|(i, &v)| i == v);
    if !identity {
        for v in 0..g.n() {
            let _ = writeln!(out, "{}", g.label(v));
        }
    }
    for e in g.edges() {
        let w = if g.is_weighted() { format!("{:?}", e.weight) } else { e.sign.to_string() };
        let _ = writeln!(out, "{} {} {}", g.label(e.u), g.label(e.v), w);
    }
    out
}
