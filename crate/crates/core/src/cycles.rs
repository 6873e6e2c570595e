//! Simple-cycle census by length and sign.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SignedGraph;

pub const DEFAULT_CYCLE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleCensus {
    /// Cycle length → (balanced, unbalanced) counts.
    pub counts: BTreeMap<usize, (u64, u64)>,
    pub cap: usize,
    pub truncated: bool,
}

impl CycleCensus {
    pub fn balanced(&self, k: usize) -> u64 {
        self.counts.get(&k).map_or(0, |c| c.0)
    }

    pub fn unbalanced(&self, k: usize) -> u64 {
        self.counts.get(&k).map_or(0, |c| c.1)
    }

    pub fn total(&self, k: usize) -> u64 {
        self.balanced(k) + self.unbalanced(k)
    }

    pub fn cycle_count(&self) -> u64 {
        self.counts.values().map(|c| c.0 + c.1).sum()
    }
}

/// Counts every simple cycle of length `3..=cap` exactly once: each cycle is
/// found from its smallest node, in the direction where the second node is
/// smaller than the last. Stops with `truncated = true` once more than
/// `limit` cycles have been seen.
pub fn cycle_census(g: &SignedGraph, cap: usize, limit: u64) -> Result<CycleCensus> {
    if cap < 3 {
        return Err(Error::InvalidSpec(format!("cycle length cap must be at least 3, got {cap}")));
    }
    let mut walker = Walker {
        g,
        cap,
        limit,
        seen: 0,
        on_path: vec![false; g.n()],
        path: Vec::with_capacity(cap),
        counts: vec![(0, 0); cap + 1],
        truncated: false,
    };
    for s in 0..g.n() {
        walker.path.push(s);
        walker.on_path[s] = true;
        walker.extend(s, false);
        walker.on_path[s] = false;
        walker.path.pop();
        if walker.truncated {
            break;
        }
    }
    let counts = walker
        .counts
        .iter()
        .enumerate()
        .filter(|(_, c)| c.0 + c.1 > 0)
        .map(|(k, &c)| (k, c))
        .collect();
    Ok(CycleCensus { counts, cap, truncated: walker.truncated })
}

struct Walker<'a> {
    g: &'a SignedGraph,
    cap: usize,
    limit: u64,
    seen: u64,
    on_path: Vec<bool>,
    path: Vec<usize>,
    counts: Vec<(u64, u64)>,
    truncated: bool,
}

impl Walker<'_> {
    /// `negative` is the parity of negative edges along the current path.
    fn extend(&mut self, v: usize, negative: bool) {
        let start = self.path[0];
        let len = self.path.len();
        for inc in self.g.neighbours(v) {
            let w = inc.node;
            let parity = negative ^ inc.sign.is_negative();
            if w == start {
                if len >= 3 && self.path[1] < v {
                    let slot = &mut self.counts[len];
                    if parity {
                        slot.1 += 1;
                    } else {
                        slot.0 += 1;
                    }
                    self.seen += 1;
                    if self.seen > self.limit {
                        self.truncated = true;
                        return;
                    }
                }
            } else if w > start && !self.on_path[w] && len < self.cap {
                self.on_path[w] = true;
                self.path.push(w);
                self.extend(w, parity);
                self.path.pop();
                self.on_path[w] = false;
                if self.truncated {
                    return;
                }
            }
        }
    }
}

/// Length weighting for the weighted degree of balance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Weighting {
    Uniform,
    Inverse,
    InverseFactorial,
    Single(usize),
}

impl Weighting {
    pub fn weight(self, k: usize) -> f64 {
        match self {
            Weighting::Uniform => 1.0,
            Weighting::Inverse => 1.0 / k as f64,
            Weighting::InverseFactorial => (1..=k).fold(1.0, |acc, i| acc / i as f64),
            Weighting::Single(k0) => {
                if k == k0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// `Σ f(k) O⁺_k / Σ f(k) O_k`, taken as 1 when there is nothing to weigh.
pub fn degree_of_balance(census: &CycleCensus, w: Weighting) -> Result<f64> {
    if census.truncated {
        return Err(Error::Refused {
            measure: "degree_of_balance",
            reason: format!("cycle census truncated at its limit (cap {})", census.cap),
        });
    }
    if let Weighting::Single(k) = w {
        if k > census.cap {
            return Err(Error::Refused {
                measure: "degree_of_balance",
                reason: format!("cycle length {k} exceeds the census cap {}", census.cap),
            });
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&k, &(pos, neg)) in &census.counts {
        let f = w.weight(k);
        num += f * pos as f64;
        den += f * (pos + neg) as f64;
    }
    Ok(if den == 0.0 { 1.0 } else { num / den })
}

/// Expected `D_k` when every edge is negative independently with probability `q`.
pub fn expected_relative_k_balance(q: f64, k: usize) -> f64 {
    (1.0 + (1.0 - 2.0 * q).powi(k as i32)) / 2.0
}

/// Expected `D` under the same sign model, for the cycle counts in `census`.
pub fn expected_degree_of_balance(census: &CycleCensus, q: f64) -> Result<f64> {
    if census.truncated {
        return Err(Error::Refused {
            measure: "expected_degree_of_balance",
            reason: "cycle census truncated".into(),
        });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&k, &(pos, neg)) in &census.counts {
        let total = (pos + neg) as f64;
        num += (1.0 + (1.0 - 2.0 * q).powi(k as i32)) * total;
        den += total;
    }
    Ok(if den == 0.0 { 1.0 } else { 0.5 * num / den })
}
