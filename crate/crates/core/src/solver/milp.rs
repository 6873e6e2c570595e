//! Binary programming models of the frustration index and their LP-format
//! rendering.
//!
//! Node variable `x_i = 1` puts node `i` in the black class. The frustration
//! state of edge `(i, j)` is `(1 - a_ij)/2 + a_ij (x_i + x_j - 2 x_i x_j)`;
//! the formulations differ in how they linearise the product:
//!
//! * `UBQP`: keeps the product (quadratic objective, no constraints).
//! * `AND`: `xe_ij = x_i x_j`, with `xe_ij <= x_i`, `xe_ij <= x_j` on positive
//!   edges and `xe_ij >= x_i + x_j - 1` on negative edges.
//! * `XOR`: one binary `f_ij` per edge bounded below by the frustration state.
//! * `ABS`: `e_ij - h_ij` equals the signed colour difference and
//!   `f_ij = e_ij + h_ij`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::triangles;
use crate::error::{Error, Result};
use crate::graph::SignedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Ubqp,
    And,
    Xor,
    Abs,
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ubqp" => Ok(Formulation::Ubqp),
            "and" => Ok(Formulation::And),
            "xor" => Ok(Formulation::Xor),
            "abs" => Ok(Formulation::Abs),
            _ => Err(Error::InvalidSpec(format!("unknown formulation `{s}` (expected and, xor, abs or ubqp)"))),
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Ubqp => "UBQP",
            Formulation::And => "AND",
            Formulation::Xor => "XOR",
            Formulation::Abs => "ABS",
        })
    }
}

/// Optional valid-inequality blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cuts {
    /// At least one frustrated edge in every unbalanced triangle.
    pub triangle: bool,
    /// At most half of the edges at a node frustrated.
    pub degree: bool,
    /// `x_k = 1` for the node of largest degree (smallest id on ties).
    pub fix: bool,
    /// Four constraints per triangle tying edge products to node variables (AND only).
    pub parity: bool,
}

impl FromStr for Cuts {
    type Err = Error;

    /// Comma-separated list such as `triangle,degree,fix`.
    fn from_str(s: &str) -> Result<Self> {
        let mut cuts = Cuts::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "triangle" => cuts.triangle = true,
                "degree" => cuts.degree = true,
                "fix" => cuts.fix = true,
                "parity" => cuts.parity = true,
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "unknown cut `{part}` (expected triangle, degree, fix or parity)"
                    )))
                }
            }
        }
        Ok(cuts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Core,
    Triangle,
    Degree,
    Fix,
    Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// `(coefficient, variable index)`, sorted by variable.
    pub terms: Vec<(i64, usize)>,
    pub sense: Sense,
    pub rhs: i64,
    pub block: Block,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilpModel {
    pub formulation: Formulation,
    /// Every variable is binary.
    pub variables: Vec<String>,
    pub objective: Vec<(i64, usize)>,
    /// `(coefficient, i, j)` products, UBQP only.
    pub quadratic: Vec<(i64, usize, usize)>,
    pub constant: i64,
    pub constraints: Vec<Constraint>,
}

impl MilpModel {
    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn core_constraint_count(&self) -> usize {
        self.constraints.iter().filter(|c| c.block == Block::Core).count()
    }

    /// Objective value at a 0/1 point, or `None` if a constraint is violated.
    pub fn evaluate(&self, values: &[bool]) -> Option<i64> {
        let val = |i: usize| values[i] as i64;
        for c in &self.constraints {
            let lhs: i64 = c.terms.iter().map(|&(a, i)| a * val(i)).sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Ge => lhs >= c.rhs,
                Sense::Eq => lhs == c.rhs,
            };
            if !ok {
                return None;
            }
        }
        let lin: i64 = self.objective.iter().map(|&(a, i)| a * val(i)).sum();
        let quad: i64 = self.quadratic.iter().map(|&(a, i, j)| a * val(i) * val(j)).sum();
        Some(lin + quad + self.constant)
    }
}

/// Linear expression with a constant.
#[derive(Default)]
struct Expr {
    terms: Vec<(i64, usize)>,
    constant: i64,
}

impl Expr {
    fn add(&mut self, coef: i64, var: usize) {
        self.terms.push((coef, var));
    }

    fn extend(&mut self, other: &Expr) {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
    }

    /// Merges repeated variables, drops zeros and sorts by variable.
    fn normalised(mut self) -> Expr {
        self.terms.sort_by_key(|t| t.1);
        let mut out: Vec<(i64, usize)> = Vec::with_capacity(self.terms.len());
        for (a, v) in self.terms {
            match out.last_mut() {
                Some(last) if last.1 == v => last.0 += a,
                _ => out.push((a, v)),
            }
        }
        out.retain(|t| t.0 != 0);
        Expr { terms: out, constant: self.constant }
    }
}

struct Builder {
    model: MilpModel,
}

impl Builder {
    /// `expr sense rhs`, with the expression's constant moved to the right.
    fn push(&mut self, expr: Expr, sense: Sense, rhs: i64, block: Block) {
        let e = expr.normalised();
        let name = format!("c{}", self.model.constraints.len() + 1);
        self.model.constraints.push(Constraint { name, terms: e.terms, sense, rhs: rhs - e.constant, block });
    }
}

/// Builds the model of `g` (edge signs only).
pub fn export_milp(g: &SignedGraph, formulation: Formulation, cuts: Cuts) -> Result<MilpModel> {
    if formulation == Formulation::Ubqp && (cuts.triangle || cuts.degree || cuts.parity) {
        return Err(Error::Unsupported(
            "the UBQP model has no edge variables; only the `fix` cut applies".into(),
        ));
    }
    if cuts.parity && formulation != Formulation::And {
        return Err(Error::Unsupported("the `parity` cut is defined for the AND model only".into()));
    }

    let (n, m) = (g.n(), g.m());
    let mut variables: Vec<String> = (0..n).map(|i| format!("x_{i}")).collect();
    let name = |prefix: &str, e: usize| format!("{prefix}_{}_{}", g.edge(e).u, g.edge(e).v);
    // index of the first edge-variable block
    let first = n;
    match formulation {
        Formulation::Ubqp => {}
        Formulation::And => variables.extend((0..m).map(|e| name("xe", e))),
        Formulation::Xor => variables.extend((0..m).map(|e| name("f", e))),
        Formulation::Abs => {
            variables.extend((0..m).map(|e| name("e", e)));
            variables.extend((0..m).map(|e| name("h", e)));
        }
    }

    // frustration state of edge e as a linear expression
    let frustration = |e: usize| -> Expr {
        let edge = g.edge(e);
        let mut x = Expr::default();
        match formulation {
            Formulation::Ubqp => unreachable!("UBQP has no linear frustration expression"),
            Formulation::And => {
                let a = edge.sign.value() as i64;
                x.constant = (1 - a) / 2;
                x.add(a, edge.u);
                x.add(a, edge.v);
                x.add(-2 * a, first + e);
            }
            Formulation::Xor => x.add(1, first + e),
            Formulation::Abs => {
                x.add(1, first + e);
                x.add(1, first + m + e);
            }
        }
        x
    };

    let mut b = Builder {
        model: MilpModel {
            formulation,
            variables,
            objective: Vec::new(),
            quadratic: Vec::new(),
            constant: g.negative_count() as i64,
            constraints: Vec::new(),
        },
    };

    match formulation {
        Formulation::Ubqp => {
            // Σ_i x_i Σ_j a_ij - Σ_(i,j) 2 a_ij x_i x_j + m⁻
            let mut obj = Expr::default();
            for e in g.edges() {
                let a = e.sign.value() as i64;
                obj.add(a, e.u);
                obj.add(a, e.v);
                b.model.quadratic.push((-2 * a, e.u, e.v));
            }
            b.model.objective = obj.normalised().terms;
        }
        _ => {
            let mut obj = Expr::default();
            for e in 0..m {
                obj.extend(&frustration(e));
            }
            let obj = obj.normalised();
            b.model.objective = obj.terms;
            b.model.constant = obj.constant;
        }
    }

    for (e, edge) in g.edges().iter().enumerate() {
        let (u, v) = (edge.u, edge.v);
        let negative = edge.sign.is_negative();
        match formulation {
            Formulation::Ubqp => {}
            Formulation::And => {
                if negative {
                    b.push(Expr { terms: vec![(1, first + e), (-1, u), (-1, v)], constant: 0 }, Sense::Ge, -1, Block::Core);
                } else {
                    b.push(Expr { terms: vec![(1, first + e), (-1, u)], constant: 0 }, Sense::Le, 0, Block::Core);
                    b.push(Expr { terms: vec![(1, first + e), (-1, v)], constant: 0 }, Sense::Le, 0, Block::Core);
                }
            }
            Formulation::Xor => {
                let f = first + e;
                if negative {
                    // f >= x_u + x_v - 1 and f >= 1 - x_u - x_v
                    b.push(Expr { terms: vec![(1, f), (-1, u), (-1, v)], constant: 0 }, Sense::Ge, -1, Block::Core);
                    b.push(Expr { terms: vec![(1, f), (1, u), (1, v)], constant: 0 }, Sense::Ge, 1, Block::Core);
                } else {
                    // f >= x_u - x_v and f >= x_v - x_u
                    b.push(Expr { terms: vec![(1, f), (-1, u), (1, v)], constant: 0 }, Sense::Ge, 0, Block::Core);
                    b.push(Expr { terms: vec![(1, f), (1, u), (-1, v)], constant: 0 }, Sense::Ge, 0, Block::Core);
                }
            }
            Formulation::Abs => {
                let (ev, hv) = (first + e, first + m + e);
                if negative {
                    // x_u + x_v - 1 = e - h
                    b.push(Expr { terms: vec![(1, u), (1, v), (-1, ev), (1, hv)], constant: 0 }, Sense::Eq, 1, Block::Core);
                } else {
                    // x_u - x_v = e - h
                    b.push(Expr { terms: vec![(1, u), (-1, v), (-1, ev), (1, hv)], constant: 0 }, Sense::Eq, 0, Block::Core);
                }
            }
        }
    }

    if cuts.triangle {
        for t in triangles(g).into_iter().filter(|t| t.negative % 2 == 1) {
            let mut x = Expr::default();
            for e in t.edges {
                x.extend(&frustration(e));
            }
            b.push(x, Sense::Ge, 1, Block::Triangle);
        }
    }
    if cuts.degree {
        for v in 0..n {
            if g.degree(v) == 0 {
                continue;
            }
            let mut x = Expr::default();
            for inc in g.neighbours(v) {
                x.extend(&frustration(inc.edge));
            }
            b.push(x, Sense::Le, (g.degree(v) / 2) as i64, Block::Degree);
        }
    }
    if cuts.parity {
        for t in triangles(g) {
            let [i, j, k] = t.nodes;
            let [ij, ik, jk] = t.edges.map(|e| first + e);
            let rows: [(Vec<(i64, usize)>, i64); 4] = [
                (vec![(1, i), (1, jk), (-1, ij), (-1, ik)], 0),
                (vec![(1, j), (1, ik), (-1, ij), (-1, jk)], 0),
                (vec![(1, k), (1, ij), (-1, ik), (-1, jk)], 0),
                (vec![(1, ij), (1, ik), (1, jk), (-1, i), (-1, j), (-1, k)], -1),
            ];
            for (terms, rhs) in rows {
                b.push(Expr { terms, constant: 0 }, Sense::Ge, rhs, Block::Parity);
            }
        }
    }
    if cuts.fix && n > 0 {
        let top = (0..n).min_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v)).unwrap();
        b.push(Expr { terms: vec![(1, top)], constant: 0 }, Sense::Eq, 1, Block::Fix);
    }
    Ok(b.model)
}

/// Render target: `Standard` accepts a quadratic objective, `LinearOnly` refuses it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpTarget {
    Standard,
    LinearOnly,
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (i64, String)>) {
    let mut first = true;
    for (a, var) in terms {
        let sign = if a < 0 { "-" } else { "+" };
        let mag = a.unsigned_abs();
        if first {
            if a < 0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        if mag == 1 {
            let _ = write!(out, " {var}");
        } else {
            let _ = write!(out, " {mag} {var}");
        }
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// LP-format text with sections `Minimize`, `Subject To`, `Bounds`,
/// `Binary` and `End`.
pub fn render_lp(model: &MilpModel, target: LpTarget) -> Result<String> {
    if !model.quadratic.is_empty() && target == LpTarget::LinearOnly {
        return Err(Error::Unsupported(format!(
            "the {} model has a quadratic objective and cannot be written as a linear model",
            model.formulation
        )));
    }
    let var = |i: usize| model.variables[i].clone();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ {} model: {} variables, {} constraints",
        model.formulation,
        model.variables.len(),
        model.constraints.len()
    );
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model.objective.iter().map(|&(a, i)| (a, var(i))));
    if !model.quadratic.is_empty() {
        // LP syntax halves the bracketed quadratic part
        out.push_str(" + [");
        write_terms(
            &mut out,
            model.quadratic.iter().map(|&(a, i, j)| (2 * a, format!("{} * {}", var(i), var(j)))),
        );
        out.push_str(" ] / 2");
    }
    match model.constant {
        0 => {}
        c if c > 0 => {
            let _ = write!(out, " + {c}");
        }
        c => {
            let _ = write!(out, " - {}", -c);
        }
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, c.terms.iter().map(|&(a, i)| (a, var(i))));
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let _ = writeln!(out, " 0 <= {v} <= 1");
    }
    out.push_str("Binary\n");
    for v in &model.variables {
        let _ = writeln!(out, " {v}");
    }
    out.push_str("End\n");
    Ok(out)
}
