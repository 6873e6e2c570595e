//! Exact measure values for complete graphs with one negative edge (`K_n^a`)
//! and with every edge negative (`K_n^c`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cycles::Weighting;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    SingleNegativeComplete,
    AllNegativeComplete,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "single-negative-complete" => Ok(Family::SingleNegativeComplete),
            "c" | "all-negative-complete" => Ok(Family::AllNegativeComplete),
            _ => Err(Error::InvalidSpec(format!("unknown family `{s}` (expected `a` or `c`)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SingleNegativeComplete => "single-negative-complete",
            Family::AllNegativeComplete => "all-negative-complete",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub m_neg: usize,
    pub l: usize,
    /// `(measure, value)` in a fixed order; `D_k` rows for `k = 3..=n`.
    pub rows: Vec<(String, f64)>,
}

impl OracleTable {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.rows.iter().find(|(k, _)| k == name).map(|r| r.1)
    }
}

/// `(n-2)!/(n-k)!`: the number of `k`-cycles of `K_n` through a fixed edge.
fn cycles_through_edge(n: usize, k: usize) -> f64 {
    (n - k + 1..=n - 2).map(|i| i as f64).product()
}

/// `n!/(2k(n-k)!)`: the number of `k`-cycles of `K_n`.
fn cycles_of_length(n: usize, k: usize) -> f64 {
    (n * (n - 1)) as f64 / (2 * k) as f64 * cycles_through_edge(n, k)
}

/// Frustration index of the all-negative complete graph.
pub fn all_negative_complete_l(n: usize) -> usize {
    if n % 2 == 0 {
        (n * n - 2 * n) / 4
    } else {
        (n * n - 2 * n + 1) / 4
    }
}

pub fn family_oracle(n: usize, family: Family) -> Result<OracleTable> {
    if n < 3 {
        return Err(Error::InvalidSpec(format!("family oracle needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let m = n * (n - 1) / 2;
    let fp_denom = ((n - 1) * (n - 1) / 4) as f64;
    let mut rows: Vec<(String, f64)> = Vec::new();

    let ratio = |w: Weighting, balanced: &dyn Fn(usize) -> f64| {
        let (mut num, mut den) = (0.0, 0.0);
        for k in 3..=n {
            num += w.weight(k) * balanced(k);
            den += w.weight(k) * cycles_of_length(n, k);
        }
        num / den
    };

    let (m_neg, l) = match family {
        Family::SingleNegativeComplete => {
            let balanced = |k: usize| cycles_of_length(n, k) - cycles_through_edge(n, k);
            let root = ((nf - 2.0) * (nf + 6.0)).sqrt();
            let lambda = (nf + 2.0 - root) / 2.0;
            // spectrum of A: (n-4 ± root)/2, 1, and -1 with multiplicity n-3;
            // spectrum of |A|: n-1 and -1 with multiplicity n-1
            let shift = nf - 1.0;
            let num = (nf - 3.0) * (-1.0 - shift).exp()
                + (1.0 - shift).exp()
                + ((nf - 4.0 - root) / 2.0 - shift).exp()
                + ((nf - 4.0 + root) / 2.0 - shift).exp();
            let den = (nf - 1.0) * (-1.0 - shift).exp() + 1.0;
            let k_ratio = num / den;
            rows.push(("D".into(), ratio(Weighting::Uniform, &balanced)));
            rows.push(("C_inv_k".into(), ratio(Weighting::Inverse, &balanced)));
            rows.push(("C_inv_fact".into(), ratio(Weighting::InverseFactorial, &balanced)));
            for k in 3..=n {
                rows.push((format!("D_{k}"), 1.0 - (2 * k) as f64 / (nf * (nf - 1.0))));
            }
            rows.push(("T".into(), 1.0 - 6.0 / (nf * (nf - 1.0))));
            rows.push(("K".into(), k_ratio));
            rows.push(("W".into(), (k_ratio + 1.0) / 2.0));
            rows.push(("lambda".into(), lambda));
            rows.push(("A".into(), 1.0 - lambda / (nf - 2.0)));
            rows.push(("L".into(), 1.0));
            rows.push(("F".into(), 1.0 - 4.0 / (nf * (nf - 1.0))));
            rows.push(("F_prime".into(), 1.0 - 1.0 / fp_denom));
            rows.push(("X".into(), 0.0));
            rows.push(("Y".into(), 1.0 - 1.0 / m as f64));
            rows.push(("Z".into(), 0.0));
            (1, 1)
        }
        Family::AllNegativeComplete => {
            let balanced = |k: usize| if k % 2 == 0 { cycles_of_length(n, k) } else { 0.0 };
            let l = all_negative_complete_l(n);
            let shift = nf - 1.0;
            let k_ratio = ((nf - 1.0) * (1.0 - shift).exp() + (1.0 - nf - shift).exp())
                / ((nf - 1.0) * (-1.0 - shift).exp() + 1.0);
            rows.push(("D".into(), ratio(Weighting::Uniform, &balanced)));
            rows.push(("C_inv_k".into(), ratio(Weighting::Inverse, &balanced)));
            rows.push(("C_inv_fact".into(), ratio(Weighting::InverseFactorial, &balanced)));
            for k in 3..=n {
                rows.push((format!("D_{k}"), if k % 2 == 0 { 1.0 } else { 0.0 }));
            }
            rows.push(("T".into(), 0.0));
            rows.push(("K".into(), k_ratio));
            rows.push(("W".into(), (k_ratio + 1.0) / 2.0));
            rows.push(("lambda".into(), nf - 2.0));
            rows.push(("A".into(), 0.0));
            rows.push(("L".into(), l as f64));
            rows.push(("F".into(), if n % 2 == 0 { 1.0 / (nf - 1.0) } else { 1.0 / nf }));
            rows.push(("F_prime".into(), 1.0 - l as f64 / fp_denom));
            rows.push(("X".into(), 1.0 - l as f64 / m as f64));
            rows.push(("Y".into(), 0.0));
            rows.push(("Z".into(), 0.0));
            (m, l)
        }
    };
    Ok(OracleTable { family, n, m, m_neg, l, rows })
}
