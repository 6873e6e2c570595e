//! Random and structured signed-graph families.
//!
//! Topology and signs are drawn from separate sub-seeds of the spec's seed, so
//! changing only the sign parameters keeps the same underlying graph.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Sign, SignedGraph};
use crate::rng::{self, Rng};

/// Restarts allowed before the configuration model gives up.
pub const REGULAR_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Topology {
    Gnm { n: usize, m: usize },
    Gnp { n: usize, p: f64 },
    /// Star seed on `attach + 1` nodes, then `attach` edges per new node.
    BarabasiAlbert { n: usize, attach: usize },
    RandomRegular { n: usize, d: usize },
    /// `K_n` with the single edge `(0, 1)` negative.
    CompleteSingleNegative { n: usize },
    CompleteAllNegative { n: usize },
    /// Open-boundary grid, nodes numbered row-major.
    IsingLattice { dims: Vec<usize> },
    Hypercube { d: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "kebab-case")]
pub enum Signing {
    /// Exactly `floor(fraction * m)` negative edges, chosen uniformly.
    Fraction(f64),
    /// Each edge negative independently with probability `q`.
    Probability(f64),
}

impl Default for Signing {
    fn default() -> Self {
        Signing::Fraction(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub topology: Topology,
    /// Ignored by the two complete families, whose signs are fixed.
    pub signing: Signing,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(topology: Topology) -> Self {
        FamilySpec { topology, signing: Signing::default(), seed: 0 }
    }

    pub fn with_signing(mut self, signing: Signing) -> Self {
        self.signing = signing;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        let probability = |name: &str, p: f64| -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must lie in [0, 1], got {p}")))
            }
        };
        match self.signing {
            Signing::Fraction(f) => probability("negative fraction", f)?,
            Signing::Probability(q) => probability("negative probability", q)?,
        }
        match &self.topology {
            Topology::Gnm { n, m } => {
                let max = pairs(*n);
                if *m > max {
                    return bad(format!("gnm: m = {m} exceeds n(n-1)/2 = {max}"));
                }
            }
            Topology::Gnp { p, .. } => probability("gnp: p", *p)?,
            Topology::BarabasiAlbert { n, attach } => {
                if *attach == 0 {
                    return bad("barabasi-albert: attachment count must be at least 1".into());
                }
                if *n < attach + 1 {
                    return bad(format!("barabasi-albert: n = {n} is smaller than the seed star ({} nodes)", attach + 1));
                }
            }
            Topology::RandomRegular { n, d } => {
                if n * d % 2 == 1 {
                    return bad(format!("random-regular: n*d = {} is odd, no {d}-regular graph on {n} nodes", n * d));
                }
                if *d >= (*n).max(1) && *d > 0 {
                    return bad(format!("random-regular: degree {d} needs more than {n} nodes"));
                }
            }
            Topology::CompleteSingleNegative { n } => {
                if *n < 2 {
                    return bad("complete-single-negative: n must be at least 2".into());
                }
            }
            Topology::CompleteAllNegative { .. } => {}
            Topology::IsingLattice { dims } => {
                if dims.is_empty() || dims.contains(&0) {
                    return bad("ising-lattice: dimensions must be a non-empty list of positive sizes".into());
                }
                if dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).is_none() {
                    return bad("ising-lattice: too many nodes".into());
                }
            }
            Topology::Hypercube { d } => {
                if *d > 30 {
                    return bad(format!("hypercube: dimension {d} is too large"));
                }
            }
        }
        Ok(())
    }
}

fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Builds the graph described by `spec`.
pub fn generate(spec: &FamilySpec) -> Result<SignedGraph> {
    spec.validate()?;
    let mut topo_rng = rng::seeded(rng::sub_seed(spec.seed, 0));
    let (n, edges) = match &spec.topology {
        Topology::Gnm { n, m } => (*n, gnm(*n, *m, &mut topo_rng)),
        Topology::Gnp { n, p } => (*n, gnp(*n, *p, &mut topo_rng)),
        Topology::BarabasiAlbert { n, attach } => (*n, barabasi_albert(*n, *attach, &mut topo_rng)),
        Topology::RandomRegular { n, d } => (*n, random_regular(*n, *d, &mut topo_rng)?),
        Topology::CompleteSingleNegative { n } | Topology::CompleteAllNegative { n } => {
            let all_negative = matches!(spec.topology, Topology::CompleteAllNegative { .. });
            let edges = (0..*n).flat_map(|u| (u + 1..*n).map(move |v| (u, v)));
            let signed = edges.map(|(u, v)| {
                let negative = all_negative || (u, v) == (0, 1);
                (u, v, if negative { Sign::Negative } else { Sign::Positive })
            });
            return SignedGraph::from_signs(*n, signed);
        }
        Topology::IsingLattice { dims } => lattice(dims),
        Topology::Hypercube { d } => hypercube(*d),
    };
    let mut sign_rng = rng::seeded(rng::sub_seed(spec.seed, 1));
    let negative = sign_draw(edges.len(), spec.signing, &mut sign_rng);
    SignedGraph::from_signs(
        n,
        edges.into_iter().zip(negative).map(|((u, v), neg)| (u, v, if neg { Sign::Negative } else { Sign::Positive })),
    )
}

/// Negative flags for `m` edges.
pub fn sign_draw(m: usize, signing: Signing, rng: &mut Rng) -> Vec<bool> {
    match signing {
        Signing::Fraction(f) => {
            // small slack so that e.g. 0.29 * 100 gives 29
            let count = ((f * m as f64) + 1e-9).floor().min(m as f64) as usize;
            let mut negative = vec![false; m];
            for i in index::sample(rng, m, count) {
                negative[i] = true;
            }
            negative
        }
        Signing::Probability(q) => (0..m).map(|_| rng.gen_bool(q)).collect(),
    }
}

fn gnm(n: usize, m: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    let mut picks = index::sample(rng, pairs(n), m).into_vec();
    picks.sort_unstable();
    // walk rows of the upper triangle; row u holds n - 1 - u pairs
    let mut edges = Vec::with_capacity(m);
    let (mut u, mut row_start) = (0usize, 0usize);
    for k in picks {
        while k >= row_start + (n - 1 - u) {
            row_start += n - 1 - u;
            u += 1;
        }
        edges.push((u, u + 1 + (k - row_start)));
    }
    edges
}

fn gnp(n: usize, p: f64, rng: &mut Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn barabasi_albert(n: usize, attach: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..=attach).map(|v| (0, v)).collect();
    // every edge endpoint once, so uniform picks are degree-proportional
    let mut ends: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut chosen = Vec::with_capacity(attach);
    for v in attach + 1..n {
        chosen.clear();
        while chosen.len() < attach {
            let t = ends[rng.gen_range(0..ends.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    edges
}

fn random_regular(n: usize, d: usize, rng: &mut Rng) -> Result<Vec<(usize, usize)>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
    'attempt: for _ in 0..REGULAR_ATTEMPTS {
        stubs.shuffle(rng);
        seen.clear();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Ok(edges);
    }
    Err(Error::InvalidSpec(format!(
        "random-regular: no simple {d}-regular pairing on {n} nodes after {REGULAR_ATTEMPTS} attempts"
    )))
}

fn lattice(dims: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let n: usize = dims.iter().product();
    // stride of axis a in row-major numbering
    let mut strides = vec![1usize; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }
    let mut edges = Vec::new();
    for v in 0..n {
        for (a, &size) in dims.iter().enumerate() {
            if (v / strides[a]) % size + 1 < size {
                edges.push((v, v + strides[a]));
            }
        }
    }
    (n, edges)
}

fn hypercube(d: usize) -> (usize, Vec<(usize, usize)>) {
    let n = 1usize << d;
    let edges = (0..n).flat_map(|v| (0..d).map(move |b| (v, v ^ (1 << b)))).filter(|&(u, v)| u < v).collect();
    (n, edges)
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Gnm { n, m } => write!(f, "gnm:n={n},m={m}"),
            Topology::Gnp { n, p } => write!(f, "gnp:n={n},p={p}"),
            Topology::BarabasiAlbert { n, attach } => write!(f, "barabasi-albert:n={n},attach={attach}"),
            Topology::RandomRegular { n, d } => write!(f, "random-regular:n={n},d={d}"),
            Topology::CompleteSingleNegative { n } => write!(f, "complete-single-negative:n={n}"),
            Topology::CompleteAllNegative { n } => write!(f, "complete-all-negative:n={n}"),
            Topology::IsingLattice { dims } => {
                let dims: Vec<String> = dims.iter().map(usize::to_string).collect();
                write!(f, "ising-lattice:dims={}", dims.join("x"))
            }
            Topology::Hypercube { d } => write!(f, "hypercube:d={d}"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    /// `family:key=value,...`, e.g. `gnm:n=20,m=40`, `ising-lattice:dims=50x50`,
    /// `hypercube:d=4`. Short aliases: `ba`, `regular`, `ising`, `a`, `c`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value in `{part}`")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let take = |key: &str| -> Result<String> {
            params.get(key).cloned().ok_or_else(|| Error::InvalidSpec(format!("{name}: missing parameter `{key}`")))
        };
        let int = |key: &str| -> Result<usize> {
            let v = take(key)?;
            v.parse().map_err(|_| Error::InvalidSpec(format!("{name}: `{key}` must be a non-negative integer, got `{v}`")))
        };
        let real = |key: &str| -> Result<f64> {
            let v = take(key)?;
            v.parse().map_err(|_| Error::InvalidSpec(format!("{name}: `{key}` must be a number, got `{v}`")))
        };
        let topology = match name.trim() {
            "gnm" => Topology::Gnm { n: int("n")?, m: int("m")? },
            "gnp" => Topology::Gnp { n: int("n")?, p: real("p")? },
            "barabasi-albert" | "ba" => Topology::BarabasiAlbert { n: int("n")?, attach: int("attach")? },
            "random-regular" | "regular" => Topology::RandomRegular { n: int("n")?, d: int("d")? },
            "complete-single-negative" | "a" => Topology::CompleteSingleNegative { n: int("n")? },
            "complete-all-negative" | "c" => Topology::CompleteAllNegative { n: int("n")? },
            "ising-lattice" | "ising" => {
                let dims = take("dims")?
                    .split('x')
                    .map(|d| d.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidSpec("ising-lattice: dims must look like 50x50".into()))?;
                Topology::IsingLattice { dims }
            }
            "hypercube" => Topology::Hypercube { d: int("d")? },
            other => return Err(Error::InvalidSpec(format!("unknown family `{other}`"))),
        };
        Ok(topology)
    }
}
