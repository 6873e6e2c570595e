//! Acceptance criteria, one line each: `[PASS]`, `[FAIL]` or `[SKIP]`.
//!
//! Published datasets are not bundled. Criteria that need them read edge-list
//! files from the directory named by `SIGNED_BALANCE_DATA`: `G1.sg` .. `G4.sg`,
//! `yeast.sg`, `ecoli.sg`, `egfr.sg`, `macrophage.sg` and `c180.sg`.

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use signed_balance::measures::{
    algebraic_conflict, cycle_census, degree_of_balance, frustration_measures, spectral_bipartivity, triangle_index,
    walk_balance, Weighting,
};
use signed_balance::oracle::{family_oracle, Family};
use signed_balance::solver::{
    export_milp, ising_hamiltonian, render_lp, solve_kcolour, triangle_packing_lower_bound, Cuts, Formulation,
    LpTarget,
};
use signed_balance::{
    analyze, generate, is_balanced, local_search_upper_bound, monte_carlo_expected_dk, read_edge_list,
    reshuffle_experiment, solve, switch, AnalyzeOptions, Colouring, FamilySpec, Sign, SignedGraph, Signing,
    SolverConfig, Statistic, Status, Topology,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn random_graph(n: usize, rho: f64, frac: f64, seed: u64) -> SignedGraph {
    let m = (rho * (n * (n - 1) / 2) as f64).round() as usize;
    generate(&FamilySpec::new(Topology::Gnm { n, m }).with_signing(Signing::Fraction(frac)).with_seed(seed)).unwrap()
}

/// 200 graphs over the full (density, negative fraction) grid, n from 5 to 12.
fn random_suite() -> Vec<SignedGraph> {
    let levels = [0.2, 0.4, 0.6, 0.8, 1.0];
    let fracs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut out = Vec::new();
    let mut seed = 0;
    for rho in levels {
        for frac in fracs {
            for rep in 0..8 {
                out.push(random_graph(5 + rep, rho, frac, seed));
                seed += 1;
            }
        }
    }
    out
}

fn edge_list(g: &SignedGraph) -> Vec<(usize, usize, bool)> {
    g.edges().iter().map(|e| (e.u, e.v, e.sign == Sign::Negative)).collect()
}

/// Minimum frustration over all colourings with the last node fixed.
fn brute_l(g: &SignedGraph) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    let edges = edge_list(g);
    (0u64..1 << (n - 1))
        .map(|mask| edges.iter().filter(|&&(u, v, neg)| ((mask >> u & 1) == (mask >> v & 1)) == neg).count())
        .min()
        .unwrap()
}

fn complete(n: usize, all_negative: bool) -> SignedGraph {
    let t = if all_negative { Topology::CompleteAllNegative { n } } else { Topology::CompleteSingleNegative { n } };
    generate(&FamilySpec::new(t)).unwrap()
}

fn closed_form_l_all_negative(n: usize) -> usize {
    if n % 2 == 0 {
        (n * n - 2 * n) / 4
    } else {
        (n * n - 2 * n + 1) / 4
    }
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os("SIGNED_BALANCE_DATA").map(PathBuf::from)
}

fn load_data(name: &str) -> Option<SignedGraph> {
    let path = data_dir()?.join(name);
    if !path.exists() {
        return None;
    }
    Some(read_edge_list(&path).expect("readable").expect("parseable"))
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn criterion_1() -> Outcome {
    let suite = random_suite();
    let cfg = SolverConfig::default();
    let bad: Vec<usize> = suite
        .iter()
        .enumerate()
        .filter(|(_, g)| solve(g, &cfg).unwrap().l != brute_l(g))
        .map(|(i, _)| i)
        .collect();
    check(bad.is_empty(), format!("{} graphs, n 5..12, 5x5 density/negative-fraction grid; mismatches {:?}", suite.len(), bad))
}

fn criterion_2() -> Outcome {
    let cfg = SolverConfig::default();
    let mut bad = Vec::new();
    for n in 3..=20 {
        let l = solve(&complete(n, false), &cfg).unwrap().l;
        if l != 1 {
            bad.push(format!("K_{n}^a: {l}"));
        }
    }
    let mut k9 = 0;
    for n in 3..=18 {
        let l = solve(&complete(n, true), &cfg).unwrap().l;
        if n == 9 {
            k9 = l;
        }
        if l != closed_form_l_all_negative(n) {
            bad.push(format!("K_{n}^c: {l}"));
        }
    }
    check(bad.is_empty() && k9 == 16, format!("K_n^a n 3..20, K_n^c n 3..18, L(K_9^c) = {k9}; mismatches {bad:?}"))
}

fn criterion_3() -> Outcome {
    if data_dir().is_none() {
        return Skip("SIGNED_BALANCE_DATA not set; G1-G4 and biological networks are not bundled".into());
    }
    let expected = [
        ("G1.sg", 7usize, 60.0),
        ("G2.sg", 5, 60.0),
        ("G3.sg", 4, 60.0),
        ("G4.sg", 6, 60.0),
        ("yeast.sg", 41, 1800.0),
        ("ecoli.sg", 371, 1800.0),
        ("egfr.sg", 193, 1800.0),
        ("macrophage.sg", 332, 1800.0),
    ];
    let (mut checked, mut missing, mut bad) = (Vec::new(), Vec::new(), Vec::new());
    for (file, want, limit) in expected {
        let Some(g) = load_data(file) else {
            missing.push(file);
            continue;
        };
        let cfg = SolverConfig { time_limit: Some(limit), workers: workers(), ..SolverConfig::default() };
        let start = Instant::now();
        let r = solve(&g, &cfg).unwrap();
        checked.push(format!("{file}: L = {} ({}, {:.1}s)", r.l, r.status, start.elapsed().as_secs_f64()));
        if r.l != want || r.status != Status::Optimal {
            bad.push(file);
        }
    }
    if checked.is_empty() {
        return Skip(format!("no dataset files found; missing {missing:?}"));
    }
    check(bad.is_empty(), format!("{}; missing {missing:?}", checked.join(", ")))
}

/// Cycles of length at most `k` in `K_n`, as a float.
fn cycles_up_to(n: usize, k: usize) -> f64 {
    (3..=k).map(|j| (n - j + 1..=n).map(|i| i as f64).product::<f64>() / (2 * j) as f64).sum()
}

fn criterion_4() -> Outcome {
    let tol = 1e-9;
    let mut bad = Vec::new();
    let mut dk_checked = 0;
    let mut f_from_solver = 0;
    for n in 3..=30 {
        let a = complete(n, false);
        let oracle = family_oracle(n, Family::SingleNegativeComplete).unwrap();
        for k in 3..=n {
            let want = 1.0 - 2.0 * k as f64 / (n * (n - 1)) as f64;
            if (oracle.get(&format!("D_{k}")).unwrap() - want).abs() > tol {
                bad.push(format!("oracle D_{k}(K_{n}^a)"));
            }
            // census only while the enumeration stays small
            if cycles_up_to(n, k) <= 2.0e6 {
                let census = cycle_census(&a, k, 10_000_000).unwrap();
                let got = degree_of_balance(&census, Weighting::Single(k)).unwrap();
                dk_checked += 1;
                if (got - want).abs() > tol {
                    bad.push(format!("D_{k}(K_{n}^a) = {got}"));
                }
            }
        }

        let c = complete(n, true);
        let ac = algebraic_conflict(&c).unwrap();
        if (ac.lambda - (n as f64 - 2.0)).abs() > tol {
            bad.push(format!("lambda(K_{n}^c) = {}", ac.lambda));
        }
        if ac.normalised.abs() > tol {
            bad.push(format!("A(K_{n}^c) = {}", ac.normalised));
        }
        let l = if n <= 22 {
            f_from_solver += 1;
            solve(&c, &SolverConfig::default()).unwrap().l
        } else {
            closed_form_l_all_negative(n)
        };
        let f = frustration_measures(l, &c).f.value().unwrap();
        let want_f = if n % 2 == 0 { 1.0 / (n as f64 - 1.0) } else { 1.0 / n as f64 };
        if (f - want_f).abs() > tol {
            bad.push(format!("F(K_{n}^c) = {f}"));
        }
        let nf = n as f64;
        let k = ((nf - 1.0) * 1f64.exp() + (1.0 - nf).exp()) / ((nf - 1.0) * (-1f64).exp() + (nf - 1.0).exp());
        let w = walk_balance(&c).unwrap();
        if (w - (k + 1.0) / 2.0).abs() > tol {
            bad.push(format!("W(K_{n}^c) = {w}"));
        }
    }
    check(
        bad.is_empty(),
        format!(
            "n 3..30: {dk_checked} census D_k values plus every oracle D_k, lambda, A, W; F with solver L for n <= 22 \
             ({f_from_solver} graphs) and closed-form L above; failures {bad:?}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0f64;
    let mut count = 0;
    for seed in 0..200u64 {
        let n = 4 + (seed % 12) as usize;
        let g = random_graph(n, 0.2 + 0.8 * ((seed * 7) % 10) as f64 / 10.0, ((seed * 3) % 11) as f64 / 10.0, 1000 + seed);
        let mut sign = HashMap::new();
        for (u, v, neg) in edge_list(&g) {
            sign.insert((u, v), neg);
        }
        let (mut total, mut balanced) = (0usize, 0usize);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if let (Some(x), Some(y), Some(z)) = (sign.get(&(a, b)), sign.get(&(a, c)), sign.get(&(b, c))) {
                        total += 1;
                        if (*x as u8 + *y as u8 + *z as u8) % 2 == 0 {
                            balanced += 1;
                        }
                    }
                }
            }
        }
        let direct = if total == 0 { 1.0 } else { balanced as f64 / total as f64 };
        worst = worst.max((triangle_index(&g) - direct).abs());
        count += 1;
    }
    check(worst <= 1e-12, format!("{count} graphs, max |T - direct| = {worst:e}"))
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    c
}

/// `Σ_{k=0}^{30} Tr(M^k)/k!`.
fn series_trace_exp(m: &[f64], n: usize) -> f64 {
    let mut power = vec![0.0; n * n];
    for i in 0..n {
        power[i * n + i] = 1.0;
    }
    let (mut total, mut fact) = (n as f64, 1.0);
    for k in 1..=30 {
        power = mat_mul(&power, m, n);
        fact *= k as f64;
        total += (0..n).map(|i| power[i * n + i]).sum::<f64>() / fact;
    }
    total
}

fn criterion_6() -> Outcome {
    let mut worst = 0f64;
    let mut count = 0;
    let mut seed = 0u64;
    while count < 40 {
        seed += 1;
        let n = 5 + (seed % 36) as usize;
        let g = random_graph(n, 0.0, 0.5, seed);
        let g = generate(
            &FamilySpec::new(Topology::Gnm { n, m: n + n / 4 }).with_signing(Signing::Fraction(0.5)).with_seed(seed),
        )
        .unwrap()
        .disjoint_union(&g);
        // a 30-term series only converges to 1e-8 for a small spectral radius
        if g.max_degree() > 6 {
            continue;
        }
        let n = g.n();
        let (mut signed, mut unsigned) = (vec![0.0; n * n], vec![0.0; n * n]);
        for (u, v, neg) in edge_list(&g) {
            let s = if neg { -1.0 } else { 1.0 };
            signed[u * n + v] = s;
            signed[v * n + u] = s;
            unsigned[u * n + v] = 1.0;
            unsigned[v * n + u] = 1.0;
        }
        let w_series = (series_trace_exp(&signed, n) / series_trace_exp(&unsigned, n) + 1.0) / 2.0;
        worst = worst.max((walk_balance(&g).unwrap() - w_series).abs());
        count += 1;
    }
    check(worst <= 1e-8, format!("{count} sparse graphs (n <= 40, max degree <= 6), max |W - series| = {worst:e}"))
}

const RATIO_MEASURES: [&str; 8] = ["D", "C_inv_k", "C_inv_fact", "D_3", "T", "W", "F", "X"];

fn criterion_7() -> Outcome {
    let opts = AnalyzeOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;

    // A1
    let mut a1_bad = 0;
    for seed in 0..500u64 {
        let n = 3 + (seed % 8) as usize;
        let g = random_graph(n, 0.3 + 0.7 * ((seed * 13) % 10) as f64 / 9.0, ((seed * 7) % 11) as f64 / 10.0, 5000 + seed);
        let r = analyze(&g, &opts).unwrap();
        for e in &r.measures {
            if let Some(v) = e.value.value() {
                let in_range = match e.name.as_str() {
                    "lambda" => v >= -1e-12,
                    "L" => true,
                    _ => (-1e-12..=1.0 + 1e-12).contains(&v),
                };
                if !in_range {
                    a1_bad += 1;
                }
            }
        }
    }
    ok &= a1_bad == 0;
    notes.push(format!("A1 500 graphs, {a1_bad} out of range"));

    // A2: all signed graphs on n <= 5 plus random graphs on n 6..8,
    // balance decided by exhaustive colouring search
    let mut corpus = Vec::new();
    for n in 3..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for code in 0..3usize.pow(pairs.len() as u32) {
            let mut c = code;
            let mut edges = Vec::new();
            for &(u, v) in &pairs {
                match c % 3 {
                    1 => edges.push((u, v, Sign::Positive)),
                    2 => edges.push((u, v, Sign::Negative)),
                    _ => {}
                }
                c /= 3;
            }
            corpus.push(SignedGraph::from_signs(n, edges).unwrap());
        }
    }
    for seed in 0..300u64 {
        let n = 6 + (seed % 3) as usize;
        corpus.push(random_graph(n, 0.4 + 0.6 * ((seed * 3) % 7) as f64 / 6.0, ((seed * 5) % 9) as f64 / 16.0, 9000 + seed));
    }
    let (mut balanced_count, mut a2_bad) = (0, Vec::new());
    for g in &corpus {
        let balanced = brute_l(g) == 0;
        balanced_count += balanced as usize;
        let r = analyze(g, &opts).unwrap();
        for name in ["D", "C_inv_k", "C_inv_fact", "W", "F", "X", "Z"] {
            let v = r.value(name).unwrap();
            let good = if balanced { (v - 1.0).abs() <= 1e-12 } else { v < 1.0 - 1e-12 };
            if !good {
                a2_bad.push(format!("{name}={v} on {} graph n={}", if balanced { "balanced" } else { "unbalanced" }, g.n()));
            }
        }
    }
    ok &= a2_bad.is_empty();
    notes.push(format!("A2 {} graphs ({balanced_count} balanced), failures {:?}", corpus.len(), &a2_bad[..a2_bad.len().min(3)]));

    // A4
    let invariant = ["D", "C_inv_k", "C_inv_fact", "D_3", "T", "W", "lambda", "A", "F", "F_prime"];
    let mut a4_worst = 0f64;
    let mut a4_missing = 0;
    for seed in 0..200u64 {
        let n = 3 + (seed % 7) as usize;
        let g = random_graph(n, 0.5 + 0.5 * ((seed * 11) % 6) as f64 / 5.0, ((seed * 7) % 5) as f64 / 4.0, 20_000 + seed);
        let x = Colouring::from_mask(n, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40);
        let h = switch(&g, &x).unwrap();
        let (rg, rh) = (analyze(&g, &opts).unwrap(), analyze(&h, &opts).unwrap());
        for name in invariant {
            match (rg.value(name), rh.value(name)) {
                (Some(a), Some(b)) => a4_worst = a4_worst.max((a - b).abs()),
                (None, None) => {}
                _ => a4_missing += 1,
            }
        }
    }
    let witness = SignedGraph::from_pm(4, &[(0, 1, -1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
    let switched = switch(&witness, &Colouring::new(vec![false, false, true, false])).unwrap();
    let (rw, rs) = (analyze(&witness, &opts).unwrap(), analyze(&switched, &opts).unwrap());
    let x_varies = rw.value("X") != rs.value("X");
    let y_varies = rw.value("Y") != rs.value("Y");
    ok &= a4_worst <= 1e-9 && a4_missing == 0 && x_varies && y_varies;
    notes.push(format!(
        "A4 200 switchings, max diff {a4_worst:e}; witness X {:?} -> {:?}, Y {:?} -> {:?}",
        rw.value("X"),
        rs.value("X"),
        rw.value("Y"),
        rs.value("Y")
    ));

    // A3
    let mut a3_bad = Vec::new();
    for seed in 0..100u64 {
        let g = random_graph(3 + (seed % 5) as usize, 0.6 + 0.4 * (seed % 3) as f64 / 2.0, (seed % 5) as f64 / 4.0, 30_000 + seed);
        let h = random_graph(3 + (seed * 7 % 5) as usize, 0.5 + 0.5 * (seed % 2) as f64, ((seed * 3) % 5) as f64 / 4.0, 40_000 + seed);
        let u = g.disjoint_union(&h);
        let (rg, rh, ru) = (analyze(&g, &opts).unwrap(), analyze(&h, &opts).unwrap(), analyze(&u, &opts).unwrap());
        for name in RATIO_MEASURES {
            let (a, b, c) = (rg.value(name).unwrap(), rh.value(name).unwrap(), ru.value(name).unwrap());
            if c < a.min(b) - 1e-12 || c > a.max(b) + 1e-12 {
                a3_bad.push(format!("{name}: {a} {b} -> {c}"));
            }
        }
    }
    ok &= a3_bad.is_empty();
    notes.push(format!("A3 100 unions, failures {:?}", &a3_bad[..a3_bad.len().min(3)]));
    check(ok, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let k6 = complete(6, false).map_signs(|_, _| Sign::Positive);
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, q) in [0.0, 0.2, 0.5, 0.8, 1.0].into_iter().enumerate() {
        let (mean, se) = monte_carlo_expected_dk(&k6, q, 3, 2000, 77 + i as u64).unwrap();
        let want = (1.0 + (1.0 - 2.0 * q).powi(3)) / 2.0;
        ok &= (mean - want).abs() <= 3.0 * se;
        parts.push(format!("q={q}: {mean:.4} vs {want:.4} (se {se:.4})"));
    }
    check(ok, format!("K_6, 2000 draws each; {}", parts.join(", ")))
}

fn criterion_9() -> Outcome {
    let Some(g) = load_data("G1.sg") else {
        return Skip("needs G1.sg (highland tribes) under SIGNED_BALANCE_DATA".into());
    };
    let cfg = SolverConfig { workers: workers(), ..SolverConfig::default() };
    let s = reshuffle_experiment(&g, Statistic::L, 500, 2024, &cfg).unwrap();
    let (mean, sd, z) = (s.mean.unwrap(), s.sd.unwrap(), s.z.unwrap_or(f64::NAN));
    check(
        (14.0..=15.3).contains(&mean) && (1.1..=1.7).contains(&sd) && (-6.5..=-4.7).contains(&z) && s.exact,
        format!("observed {}, mean {mean:.3}, sd {sd:.3}, z {z:.3}", s.observed),
    )
}

fn criterion_10() -> Outcome {
    let mut ls = Vec::new();
    let mut energy_ok = true;
    for seed in 0..10 {
        let g = generate(
            &FamilySpec::new(Topology::Hypercube { d: 4 }).with_signing(Signing::Fraction(0.5)).with_seed(seed),
        )
        .unwrap();
        let r = solve(&g, &SolverConfig::default()).unwrap();
        // H = -Σ J_ij s_i s_j over the certificate spins
        let h: i64 = edge_list(&g)
            .iter()
            .map(|&(u, v, neg)| {
                let j = if neg { -1 } else { 1 };
                let s = |x: usize| if r.colouring.get(x) { 1 } else { -1 };
                -j * s(u) * s(v)
            })
            .sum();
        energy_ok &= r.status == Status::Optimal
            && h == 2 * r.l as i64 - g.m() as i64
            && ising_hamiltonian(&r, g.m()).unwrap() == h;
        ls.push(r.l as f64);
    }
    let mean = ls.iter().sum::<f64>() / ls.len() as f64;
    check(
        (3.3..=6.3).contains(&mean) && energy_ok,
        format!("hypercube d=4, 50% negative, 10 seeds: L = {ls:?}, mean {mean:.2}; H = 2L - m on all: {energy_ok}"),
    )
}

fn criterion_11() -> Outcome {
    let mut suite = random_suite();
    for seed in 0..10 {
        suite.push(
            generate(&FamilySpec::new(Topology::Hypercube { d: 4 }).with_signing(Signing::Fraction(0.5)).with_seed(seed))
                .unwrap(),
        );
    }
    let mut bad = Vec::new();
    for (i, g) in suite.iter().enumerate() {
        let r = solve(g, &SolverConfig::default()).unwrap();
        let (n, m, c) = (g.n(), g.m(), g.component_count());
        let chain = triangle_packing_lower_bound(g) <= r.lower_bound
            && r.lower_bound <= r.l
            && r.l <= local_search_upper_bound(g).count
            && local_search_upper_bound(g).count <= g.negative_count();
        let caps = r.l <= m / 2 && r.l <= m + c - n && r.l <= (n - 1) * (n - 1) / 4;
        let removed: Vec<usize> = r.frustrated_edges.iter().map(|&(u, v)| g.edge_index(u, v).unwrap()).collect();
        let certified = removed.len() == r.l && is_balanced(&g.without_edges(&removed)).balanced;
        if !(chain && caps && certified && r.status == Status::Optimal) {
            bad.push(i);
        }
    }
    check(bad.is_empty(), format!("{} instances, violations {bad:?}", suite.len()))
}

struct Lp {
    vars: Vec<String>,
    objective: Vec<(i64, String)>,
    constant: i64,
    constraints: Vec<(Vec<(i64, String)>, String, i64)>,
}

fn parse_terms(tokens: &[&str]) -> (Vec<(i64, String)>, i64) {
    let (mut terms, mut constant) = (Vec::new(), 0);
    let mut i = 0;
    while i < tokens.len() {
        let mut sign = 1;
        if tokens[i] == "+" || tokens[i] == "-" {
            sign = if tokens[i] == "-" { -1 } else { 1 };
            i += 1;
        }
        if let Ok(c) = tokens[i].parse::<i64>() {
            i += 1;
            if i < tokens.len() && tokens[i] != "+" && tokens[i] != "-" {
                terms.push((sign * c, tokens[i].to_string()));
                i += 1;
            } else {
                constant += sign * c;
            }
        } else {
            terms.push((sign, tokens[i].to_string()));
            i += 1;
        }
    }
    (terms, constant)
}

fn parse_lp(text: &str) -> Lp {
    let mut lp = Lp { vars: Vec::new(), objective: Vec::new(), constant: 0, constraints: Vec::new() };
    let mut section = "";
    for line in text.lines() {
        if line.starts_with('\\') {
            continue;
        }
        if !line.starts_with(' ') {
            section = match line {
                "Minimize" => "obj",
                "Subject To" => "st",
                "Bounds" => "bounds",
                "Binary" => "bin",
                _ => "end",
            };
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match section {
            "obj" => {
                assert_eq!(tokens[0], "obj:");
                let (terms, constant) = parse_terms(&tokens[1..]);
                lp.objective = terms;
                lp.constant = constant;
            }
            "st" => {
                let sense = tokens.iter().position(|t| matches!(*t, "<=" | ">=" | "=")).unwrap();
                let (terms, constant) = parse_terms(&tokens[1..sense]);
                assert_eq!(constant, 0);
                lp.constraints.push((terms, tokens[sense].to_string(), tokens[sense + 1].parse().unwrap()));
            }
            "bin" => lp.vars.push(tokens[0].to_string()),
            _ => {}
        }
    }
    lp
}

fn satisfied(terms: &[(i64, String)], sense: &str, rhs: i64, val: &dyn Fn(&str) -> i64) -> bool {
    let lhs: i64 = terms.iter().map(|(a, v)| a * val(v)).sum();
    match sense {
        "<=" => lhs <= rhs,
        ">=" => lhs >= rhs,
        _ => lhs == rhs,
    }
}

/// Exact minimum over 0/1 points: node variables enumerated jointly, the
/// remaining variables per group of constraints that share them.
fn lp_minimum(lp: &Lp) -> Option<i64> {
    let node: Vec<&String> = lp.vars.iter().filter(|v| v.starts_with("x_")).collect();
    let other: Vec<&String> = lp.vars.iter().filter(|v| !v.starts_with("x_")).collect();
    let other_idx: HashMap<&str, usize> = other.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..other.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (terms, _, _) in &lp.constraints {
        let ids: Vec<usize> = terms.iter().filter_map(|(_, v)| other_idx.get(v.as_str()).copied()).collect();
        for w in ids.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..other.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut group_cons: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut node_only = Vec::new();
    for (ci, (terms, _, _)) in lp.constraints.iter().enumerate() {
        match terms.iter().find_map(|(_, v)| other_idx.get(v.as_str())) {
            Some(&i) => {
                let r = find(&mut parent, i);
                group_cons.entry(r).or_default().push(ci)
            }
            None => node_only.push(ci),
        }
    }
    let obj: HashMap<&str, i64> = lp.objective.iter().map(|(a, v)| (v.as_str(), *a)).collect();
    let mut best: Option<i64> = None;
    'outer: for mask in 0u64..1 << node.len() {
        let mut values: HashMap<String, i64> = HashMap::new();
        for (i, v) in node.iter().enumerate() {
            values.insert(v.to_string(), (mask >> i & 1) as i64);
        }
        for &ci in &node_only {
            let (t, s, r) = &lp.constraints[ci];
            if !satisfied(t, s, *r, &|v| values[v]) {
                continue 'outer;
            }
        }
        let mut total = lp.constant + node.iter().map(|v| obj.get(v.as_str()).unwrap_or(&0) * values[v.as_str()]).sum::<i64>();
        for (root, members) in &groups {
            assert!(members.len() <= 16, "variable group too large to enumerate");
            let mut group_best: Option<i64> = None;
            for sub in 0u32..1 << members.len() {
                for (j, &i) in members.iter().enumerate() {
                    values.insert(other[i].clone(), (sub >> j & 1) as i64);
                }
                let feasible = group_cons.get(root).map_or(true, |cs| {
                    cs.iter().all(|&ci| {
                        let (t, s, r) = &lp.constraints[ci];
                        satisfied(t, s, *r, &|v| values[v])
                    })
                });
                if feasible {
                    let cost: i64 = members.iter().map(|&i| obj.get(other[i].as_str()).unwrap_or(&0) * values[other[i].as_str()]).sum();
                    group_best = Some(group_best.map_or(cost, |b: i64| b.min(cost)));
                }
            }
            match group_best {
                Some(c) => total += c,
                None => continue 'outer,
            }
        }
        best = Some(best.map_or(total, |b| b.min(total)));
    }
    best
}

/// Values of every model variable implied by a node colouring.
fn implied_point(g: &SignedGraph, x: &Colouring, var: &str) -> i64 {
    let parts: Vec<&str> = var.split('_').collect();
    let xi = |i: usize| x.get(i) as i64;
    if parts[0] == "x" {
        return xi(parts[1].parse().unwrap());
    }
    let (i, j): (usize, usize) = (parts[1].parse().unwrap(), parts[2].parse().unwrap());
    let negative = g.sign_between(i, j).unwrap() == Sign::Negative;
    let frustrated = (x.get(i) == x.get(j)) == negative;
    let d = if negative { xi(i) + xi(j) - 1 } else { xi(i) - xi(j) };
    match parts[0] {
        "xe" => xi(i) * xi(j),
        "f" => frustrated as i64,
        "e" => d.max(0),
        "h" => (-d).max(0),
        other => panic!("unexpected variable {other}"),
    }
}

fn criterion_12() -> Outcome {
    let mut bad = Vec::new();
    let mut count_bad = Vec::new();
    let mut graphs = 0;
    for seed in 0..50u64 {
        let n = 3 + (seed % 6) as usize;
        let g = random_graph(n, 0.4 + 0.6 * ((seed * 7) % 5) as f64 / 4.0, ((seed * 3) % 9) as f64 / 8.0, 60_000 + seed);
        let r = solve(&g, &SolverConfig::default()).unwrap();
        graphs += 1;
        let (m, mn) = (g.m(), g.negative_count());
        let mp = m - mn;
        for form in [Formulation::And, Formulation::Xor, Formulation::Abs] {
            let core_text = render_lp(&export_milp(&g, form, Cuts::default()).unwrap(), LpTarget::LinearOnly).unwrap();
            let core = parse_lp(&core_text);
            let want = match form {
                Formulation::And => (n + m, 2 * mp + mn),
                Formulation::Xor => (n + m, 2 * mp + 2 * mn),
                _ => (n + 2 * m, mp + mn),
            };
            if (core.vars.len(), core.constraints.len()) != want {
                count_bad.push(format!("{form} seed {seed}"));
            }
            if lp_minimum(&core) != Some(r.l as i64) {
                bad.push(format!("{form} core seed {seed}"));
            }
            // cuts only remove points; the certificate point survives them
            let cuts = Cuts { triangle: true, degree: true, fix: true, parity: form == Formulation::And };
            let cut = parse_lp(&render_lp(&export_milp(&g, form, cuts).unwrap(), LpTarget::LinearOnly).unwrap());
            let keeps_core = core.constraints.iter().all(|c| cut.constraints.contains(c));
            // the fix cut pins the top-degree node black; use the matching certificate
            let top = (0..n).min_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v)).unwrap();
            let x = if r.colouring.get(top) { r.colouring.clone() } else { r.colouring.complement() };
            let val = |v: &str| implied_point(&g, &x, v);
            let feasible = cut.constraints.iter().all(|(t, s, rhs)| satisfied(t, s, *rhs, &val));
            let objective = cut.constant + cut.objective.iter().map(|(a, v)| a * val(v)).sum::<i64>();
            if !(keeps_core && feasible && objective == r.l as i64) {
                bad.push(format!("{form} with cuts seed {seed}"));
            }
        }
    }
    check(
        bad.is_empty() && count_bad.is_empty(),
        format!("{graphs} graphs x AND/XOR/ABS; optimum mismatches {bad:?}; size mismatches {count_bad:?}"),
    )
}

/// Minimum k-colour frustration over all set partitions into at most `k` blocks.
fn partition_oracle(g: &SignedGraph, k: usize) -> usize {
    let n = g.n();
    let edges = edge_list(g);
    let mut best = usize::MAX;
    let mut a = vec![0usize; n];
    fn rec(i: usize, max: usize, a: &mut Vec<usize>, k: usize, edges: &[(usize, usize, bool)], best: &mut usize) {
        if i == a.len() {
            let f = edges.iter().filter(|&&(u, v, neg)| (a[u] == a[v]) == neg).count();
            *best = (*best).min(f);
            return;
        }
        for c in 0..=(max + 1).min(k - 1) {
            a[i] = c;
            rec(i + 1, max.max(c), a, k, edges, best);
        }
    }
    if n == 0 {
        return 0;
    }
    rec(1, 0, &mut a, k, &edges, &mut best);
    best
}

fn criterion_13() -> Outcome {
    let cfg = SolverConfig::default();
    let fig = SignedGraph::from_pm(4, &[(0, 1, 1), (0, 2, -1), (1, 2, -1), (2, 3, -1), (0, 3, -1)]).unwrap();
    let fig_ls: Vec<usize> = (1..=3).map(|k| solve_kcolour(&fig, k, &cfg).unwrap().l).collect();
    let mut two_bad = 0;
    for seed in 0..100u64 {
        let g = random_graph(4 + (seed % 6) as usize, 0.5 + 0.5 * (seed % 3) as f64 / 2.0, (seed % 5) as f64 / 4.0, 70_000 + seed);
        if solve_kcolour(&g, 2, &cfg).unwrap().l != solve(&g, &cfg).unwrap().l {
            two_bad += 1;
        }
    }
    let mut part_bad = 0;
    let mut part_count = 0;
    for seed in 0..60u64 {
        let n = 3 + (seed % 6) as usize;
        let g = random_graph(n, 0.5 + 0.5 * (seed % 4) as f64 / 3.0, (seed % 7) as f64 / 6.0, 80_000 + seed);
        for k in [n, n + 1] {
            part_count += 1;
            if solve_kcolour(&g, k, &cfg).unwrap().l != partition_oracle(&g, k) {
                part_bad += 1;
            }
        }
    }
    check(
        fig_ls == [4, 1, 0] && two_bad == 0 && part_bad == 0,
        format!("small instance k=1..3 -> {fig_ls:?}; k=2 vs solve on 100 graphs: {two_bad} mismatches; k >= n vs partitions on {part_count} cases: {part_bad} mismatches"),
    )
}

fn criterion_14() -> Outcome {
    let mut graphs: Vec<SignedGraph> = Vec::new();
    for len in (4..=20).step_by(2) {
        let edges: Vec<(usize, usize, i32)> = (0..len).map(|i| (i, (i + 1) % len, if i % 3 == 0 { -1 } else { 1 })).collect();
        graphs.push(SignedGraph::from_pm(len, &edges).unwrap());
    }
    for d in 1..=6 {
        graphs.push(generate(&FamilySpec::new(Topology::Hypercube { d }).with_signing(Signing::Fraction(0.3))).unwrap());
    }
    for dims in [vec![3, 4], vec![5, 5], vec![2, 3, 4]] {
        graphs.push(generate(&FamilySpec::new(Topology::IsingLattice { dims })).unwrap());
    }
    for seed in 0..20u64 {
        let g = random_graph(12, 0.6, 0.5, 90_000 + seed);
        // keep only edges across the halves {0..6} and {6..12}
        let keep: Vec<usize> =
            g.edges().iter().enumerate().filter(|(_, e)| (e.u < 6) == (e.v < 6)).map(|(i, _)| i).collect();
        graphs.push(g.without_edges(&keep));
    }
    let mut worst = 0f64;
    for g in &graphs {
        let b = spectral_bipartivity(g).unwrap();
        worst = worst.max((b.beta - 1.0).abs()).max((b.b_s - 1.0).abs());
    }
    let mut detail = format!("{} bipartite graphs, max |beta - 1|, |b_s - 1| = {worst:e}", graphs.len());
    let mut ok = worst <= 1e-9;
    match load_data("c180.sg") {
        Some(g) => {
            let b = spectral_bipartivity(&g).unwrap();
            ok &= (b.beta - 0.99765).abs() <= 5e-5 && (b.b_s - 0.99529).abs() <= 5e-5;
            detail.push_str(&format!("; C180 beta {:.5}, b_s {:.5}", b.beta, b.b_s));
        }
        None => detail.push_str("; C180 file not supplied, that part skipped"),
    }
    check(ok, detail)
}

fn median(mut v: Vec<u64>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

fn criterion_15() -> Outcome {
    let suite = random_suite();
    let base = SolverConfig::default();
    let variants: [(&str, SolverConfig); 6] = [
        ("preprocessing", SolverConfig { use_preprocessing: false, ..base.clone() }),
        ("colour fixing", SolverConfig { use_colour_fixing: false, ..base.clone() }),
        ("degree branching", SolverConfig { use_degree_branching: false, ..base.clone() }),
        ("triangle bound", SolverConfig { use_triangle_lower_bound: false, ..base.clone() }),
        ("local search seed", SolverConfig { use_local_search_seed: false, ..base.clone() }),
        ("all", SolverConfig::plain()),
    ];
    let on: Vec<_> = suite.iter().map(|g| solve(g, &base).unwrap()).collect();
    let on_median = median(on.iter().map(|r| r.nodes).collect());
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, cfg) in &variants {
        let off: Vec<_> = suite.iter().map(|g| solve(g, cfg).unwrap()).collect();
        let same_l = off.iter().zip(&on).all(|(a, b)| a.l == b.l);
        let off_median = median(off.iter().map(|r| r.nodes).collect());
        ok &= same_l && on_median <= off_median;
        parts.push(format!("without {name}: median {off_median}{}", if same_l { "" } else { " (L differs)" }));
    }
    check(ok, format!("median nodes with all toggles {on_median}; {}", parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("brute-force oracle equivalence", criterion_1),
        ("closed-form complete families", criterion_2),
        ("published datasets", criterion_3),
        ("measure oracles on complete families", criterion_4),
        ("trace formula vs triangle enumeration", criterion_5),
        ("walk balance vs power series", criterion_6),
        ("axioms A1-A4", criterion_7),
        ("expected D_3 by Monte Carlo", criterion_8),
        ("reshuffle Z-scores", criterion_9),
        ("Ising hypercube", criterion_10),
        ("bound sandwich and certificate", criterion_11),
        ("MILP export fidelity", criterion_12),
        ("k-colour balance", criterion_13),
        ("spectral bipartivity", criterion_14),
        ("speed-up toggles", criterion_15),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Fail(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] criterion {:>2} {name} ({secs:.1}s): {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
