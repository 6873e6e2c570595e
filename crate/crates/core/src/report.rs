//! Measure reports: every partial-balance measure of one graph plus the
//! provenance needed to reproduce it.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::SignedGraph;
use crate::linalg::EIGEN_TOLERANCE;
use crate::measures::{
    algebraic_conflict, cycle_census, degree_of_balance, frustration_measures, triangle_index,
    trivial_measures, walk_balance, MeasureValue, Weighting, DEFAULT_CYCLE_LIMIT,
};
use crate::solver::{solve, SolverConfig, Status};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    /// Longest cycle counted; defaults to `n`.
    pub cycle_cap: Option<usize>,
    pub cycle_limit: u64,
    /// Lengths reported as `D_k`.
    pub dk: Vec<usize>,
    pub solver: SolverConfig,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { cycle_cap: None, cycle_limit: DEFAULT_CYCLE_LIMIT, dk: vec![3], solver: SolverConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub input: Option<String>,
    pub n: usize,
    pub m: usize,
    pub m_neg: usize,
    pub density: Option<f64>,
    pub seed: Option<u64>,
    pub giant_component: bool,
    pub options: serde_json::Value,
}

impl Provenance {
    pub fn new(g: &SignedGraph, options: serde_json::Value) -> Self {
        Provenance {
            tool: "sbal".into(),
            version: VERSION.into(),
            input: None,
            n: g.n(),
            m: g.m(),
            m_neg: g.negative_count(),
            density: g.density(),
            seed: None,
            giant_component: false,
            options,
        }
    }

    pub fn text_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# {} {}", self.tool, self.version),
            format!("# n = {}, m = {}, m_neg = {}", self.n, self.m, self.m_neg),
        ];
        if let Some(rho) = self.density {
            lines.push(format!("# density = {rho}"));
        }
        if let Some(input) = &self.input {
            lines.push(format!("# input = {input}"));
        }
        if let Some(seed) = self.seed {
            lines.push(format!("# seed = {seed}"));
        }
        if self.giant_component {
            lines.push("# restricted to the giant component".into());
        }
        lines.push(format!("# options = {}", self.options));
        lines
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub name: String,
    #[serde(flatten)]
    pub value: MeasureValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub l: usize,
    pub status: Status,
    pub lower_bound: usize,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub provenance: Provenance,
    pub cycle_cap: usize,
    pub cycle_truncated: bool,
    pub eigen_tolerance: f64,
    pub solver: Option<SolverSummary>,
    pub measures: Vec<MeasureEntry>,
}

impl MeasureReport {
    pub fn get(&self, name: &str) -> Option<&MeasureValue> {
        self.measures.iter().find(|e| e.name == name).map(|e| &e.value)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(MeasureValue::value)
    }

    /// One `measure = value | skipped(<reason>)` line per measure, after
    /// `#`-prefixed provenance lines.
    pub fn to_text(&self) -> String {
        let mut out = self.provenance.text_lines().join("\n");
        out.push_str(&format!(
            "\n# cycle cap = {}{}, eigen tolerance = {:e}\n",
            self.cycle_cap,
            if self.cycle_truncated { " (truncated)" } else { "" },
            self.eigen_tolerance
        ));
        if let Some(s) = &self.solver {
            out.push_str(&format!("# solver: status = {}, lower bound = {}, nodes = {}\n", s.status, s.lower_bound, s.nodes));
        }
        for e in &self.measures {
            match &e.value {
                MeasureValue::Value(v) => out.push_str(&format!("{} = {}\n", e.name, v)),
                MeasureValue::Skipped(r) => out.push_str(&format!("{} = skipped({})\n", e.name, r)),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Computes every measure of `g`. `L` comes from the exact solver; when the
/// solver stops short of optimality `L`, `F`, `F_prime` and `X` are skipped.
pub fn analyze(g: &SignedGraph, opts: &AnalyzeOptions) -> Result<MeasureReport> {
    opts.solver.validate()?;
    let cap = opts.cycle_cap.unwrap_or(g.n()).max(3);
    let mut measures = Vec::new();
    let mut push = |name: &str, value: MeasureValue| measures.push(MeasureEntry { name: name.into(), value });

    let census = cycle_census(g, cap, opts.cycle_limit)?;
    let all_cycles = |w: Weighting| -> MeasureValue {
        if cap < g.n() {
            MeasureValue::skipped(format!("cycle cap {cap} is below n = {}; only D_k up to the cap is available", g.n()))
        } else {
            degree_of_balance(&census, w).into()
        }
    };
    push("D", all_cycles(Weighting::Uniform));
    push("C_inv_k", all_cycles(Weighting::Inverse));
    push("C_inv_fact", all_cycles(Weighting::InverseFactorial));
    let mut dk = opts.dk.clone();
    dk.sort_unstable();
    dk.dedup();
    for k in dk {
        push(&format!("D_{k}"), degree_of_balance(&census, Weighting::Single(k)).into());
    }
    push("T", MeasureValue::Value(triangle_index(g)));
    push("W", walk_balance(g).into());
    match algebraic_conflict(g) {
        Ok(a) => {
            push("lambda", MeasureValue::Value(a.lambda));
            push("A", MeasureValue::Value(a.normalised));
        }
        Err(e) => {
            let v: MeasureValue = Err(e).into();
            push("lambda", v.clone());
            push("A", v);
        }
    }

    let r = solve(g, &opts.solver)?;
    let summary = SolverSummary { l: r.l, status: r.status, lower_bound: r.lower_bound, nodes: r.nodes };
    if r.status == Status::Optimal {
        let fm = frustration_measures(r.l, g);
        push("L", MeasureValue::Value(r.l as f64));
        push("F", fm.f);
        push("F_prime", fm.f_prime);
        push("X", fm.x);
    } else {
        let reason = format!("solver stopped ({}) with {} <= L <= {}", r.status, r.lower_bound, r.l);
        for name in ["L", "F", "F_prime", "X"] {
            push(name, MeasureValue::skipped(reason.clone()));
        }
    }
    let (y, z) = trivial_measures(g);
    push("Y", y);
    push("Z", MeasureValue::Value(z));

    Ok(MeasureReport {
        provenance: Provenance::new(g, serde_json::to_value(opts).expect("options serialise")),
        cycle_cap: cap,
        cycle_truncated: census.truncated,
        eigen_tolerance: EIGEN_TOLERANCE,
        solver: Some(summary),
        measures,
    })
}
