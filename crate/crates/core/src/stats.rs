//! Significance of a balance statistic against sign-reshuffled replicas, and
//! Monte-Carlo checks of the expected relative k-balance.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::balance::reshuffle;
use crate::error::{Error, Result};
use crate::graph::{Sign, SignedGraph};
use crate::measures::{
    algebraic_conflict, cycle_census, degree_of_balance, frustration_measures, triangle_index, walk_balance,
    MeasureValue, Weighting, DEFAULT_CYCLE_LIMIT,
};
use crate::rng;
use crate::solver::{solve, SolverConfig, Status};

/// A statistic evaluated on the observed graph and on each replica.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    L,
    F,
    FPrime,
    X,
    D,
    CInvK,
    CInvFact,
    Dk(usize),
    T,
    W,
    Lambda,
    A,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::L => f.write_str("L"),
            Statistic::F => f.write_str("F"),
            Statistic::FPrime => f.write_str("F_prime"),
            Statistic::X => f.write_str("X"),
            Statistic::D => f.write_str("D"),
            Statistic::CInvK => f.write_str("C_inv_k"),
            Statistic::CInvFact => f.write_str("C_inv_fact"),
            Statistic::Dk(k) => write!(f, "D_{k}"),
            Statistic::T => f.write_str("T"),
            Statistic::W => f.write_str("W"),
            Statistic::Lambda => f.write_str("lambda"),
            Statistic::A => f.write_str("A"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let stat = match s {
            "L" => Statistic::L,
            "F" => Statistic::F,
            "F_prime" | "F'" => Statistic::FPrime,
            "X" => Statistic::X,
            "D" => Statistic::D,
            "C_inv_k" => Statistic::CInvK,
            "C_inv_fact" => Statistic::CInvFact,
            "T" => Statistic::T,
            "W" => Statistic::W,
            "lambda" => Statistic::Lambda,
            "A" => Statistic::A,
            _ => match s.strip_prefix("D_").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) if k >= 3 => Statistic::Dk(k),
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "unknown statistic `{s}` (expected L, F, F_prime, X, D, C_inv_k, C_inv_fact, D_<k>, T, W, lambda or A)"
                    )))
                }
            },
        };
        Ok(stat)
    }
}

/// One evaluation: the value and, for solver-based statistics, the solver status.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub status: Option<Status>,
}

/// Evaluates `stat` on `g`. Refusals (e.g. `lambda` on a disconnected graph)
/// come back as errors.
pub fn evaluate(g: &SignedGraph, stat: Statistic, cfg: &SolverConfig) -> Result<Evaluation> {
    let plain = |value: f64| Ok(Evaluation { value, status: None });
    let cycles = |w: Weighting, cap: usize| -> Result<f64> {
        let census = cycle_census(g, cap.max(3), DEFAULT_CYCLE_LIMIT)?;
        degree_of_balance(&census, w)
    };
    match stat {
        Statistic::L | Statistic::F | Statistic::FPrime | Statistic::X => {
            let r = solve(g, cfg)?;
            let fm = frustration_measures(r.l, g);
            let value = match stat {
                Statistic::L => MeasureValue::Value(r.l as f64),
                Statistic::F => fm.f,
                Statistic::FPrime => fm.f_prime,
                _ => fm.x,
            };
            match value {
                MeasureValue::Value(value) => Ok(Evaluation { value, status: Some(r.status) }),
                MeasureValue::Skipped(reason) => Err(Error::Refused { measure: "F_prime", reason }),
            }
        }
        Statistic::D => plain(cycles(Weighting::Uniform, g.n())?),
        Statistic::CInvK => plain(cycles(Weighting::Inverse, g.n())?),
        Statistic::CInvFact => plain(cycles(Weighting::InverseFactorial, g.n())?),
        Statistic::Dk(k) => plain(cycles(Weighting::Single(k), k)?),
        Statistic::T => plain(triangle_index(g)),
        Statistic::W => plain(walk_balance(g)?),
        Statistic::Lambda => plain(algebraic_conflict(g)?.lambda),
        Statistic::A => plain(algebraic_conflict(g)?.normalised),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReshuffleSummary {
    pub statistic: String,
    pub observed: f64,
    pub trials: usize,
    pub seed: u64,
    /// Replicas that produced a value.
    pub evaluated: usize,
    /// Replicas whose statistic was refused.
    pub skipped: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation (divisor `evaluated - 1`).
    pub sd: Option<f64>,
    /// `None` when the SD is zero or undefined.
    pub z: Option<f64>,
    pub gap_terminated: usize,
    pub budget_terminated: usize,
    /// False when some solver run (observed or replica) stopped short of
    /// optimality; those runs contribute their best found `L`.
    pub exact: bool,
}

/// Sample mean and SD (divisor `len - 1`; `None` below two values).
pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (Some(mean), Some((ss / (values.len() - 1) as f64).sqrt()))
}

/// Compares `stat(g)` with its values on `trials` reshuffles of `g`. Replica
/// `i` uses sub-seed `i` of `seed`; replicas run on `cfg.workers` threads,
/// each solving single-threaded, and the result does not depend on the
/// thread count.
pub fn reshuffle_experiment(
    g: &SignedGraph,
    stat: Statistic,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<ReshuffleSummary> {
    cfg.validate()?;
    if trials < 2 {
        return Err(Error::InvalidSpec(format!("at least 2 trials are needed, got {trials}")));
    }
    let observed = evaluate(g, stat, cfg)?;
    let replica_cfg = SolverConfig { workers: 1, ..cfg.clone() };

    let run = |i: usize| -> Result<Evaluation> {
        let r = reshuffle(g, rng::sub_seed(seed, i as u64));
        assert_eq!((r.n(), r.m(), r.negative_count()), (g.n(), g.m(), g.negative_count()));
        evaluate(&r, stat, &replica_cfg)
    };
    let workers = cfg.workers.max(1).min(trials);
    let mut outcomes: Vec<Option<Result<Evaluation>>> = (0..trials).map(|_| None).collect();
    if workers == 1 {
        for (i, slot) in outcomes.iter_mut().enumerate() {
            *slot = Some(run(i));
        }
    } else {
        let chunk = trials.div_ceil(workers);
        std::thread::scope(|s| {
            for (c, slots) in outcomes.chunks_mut(chunk).enumerate() {
                let run = &run;
                s.spawn(move || {
                    for (j, slot) in slots.iter_mut().enumerate() {
                        *slot = Some(run(c * chunk + j));
                    }
                });
            }
        });
    }

    let mut values = Vec::with_capacity(trials);
    let (mut skipped, mut gap_terminated, mut budget_terminated) = (0, 0, 0);
    let mut count_status = |s: Option<Status>| match s {
        Some(Status::GapTerminated) => gap_terminated += 1,
        Some(Status::BudgetTerminated) => budget_terminated += 1,
        _ => {}
    };
    for outcome in outcomes.into_iter().flatten() {
        match outcome {
            Ok(e) => {
                count_status(e.status);
                values.push(e.value);
            }
            Err(Error::Refused { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let observed_inexact = matches!(observed.status, Some(s) if s != Status::Optimal);
    let (mean, sd) = mean_sd(&values);
    let z = match (mean, sd) {
        (Some(mean), Some(sd)) if sd > 0.0 => Some((observed.value - mean) / sd),
        _ => None,
    };
    Ok(ReshuffleSummary {
        statistic: stat.to_string(),
        observed: observed.value,
        trials,
        seed,
        evaluated: values.len(),
        skipped,
        mean,
        sd,
        z,
        gap_terminated,
        budget_terminated,
        exact: !observed_inexact && gap_terminated + budget_terminated == 0,
    })
}

/// Mean and standard error of `D_k` over `trials` independent signings of
/// `g`'s edges, each edge negative with probability `q`.
pub fn monte_carlo_expected_dk(g: &SignedGraph, q: f64, k: usize, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidSpec(format!("probability q must lie in [0, 1], got {q}")));
    }
    if trials < 100 {
        return Err(Error::InvalidSpec(format!("at least 100 trials are needed, got {trials}")));
    }
    if k < 3 {
        return Err(Error::InvalidSpec(format!("cycle length must be at least 3, got {k}")));
    }
    if cycle_census(g, k, DEFAULT_CYCLE_LIMIT)?.total(k) == 0 {
        return Err(Error::Refused { measure: "D_k", reason: format!("graph has no cycle of length {k}") });
    }
    let mut rng = rng::seeded(seed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let h = g.map_signs(|_, _| if rng.gen_bool(q) { Sign::Negative } else { Sign::Positive });
        let census = cycle_census(&h, k, DEFAULT_CYCLE_LIMIT)?;
        values.push(degree_of_balance(&census, Weighting::Single(k))?);
    }
    let (mean, sd) = mean_sd(&values);
    Ok((mean.unwrap(), sd.unwrap() / (trials as f64).sqrt()))
}
