//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p chaoslab-cli --test acceptance`.

use std::path::Path;
use std::time::Instant;

use anyhow::{ensure, Result};
use chaoslab_cli::config::RunConfig;
use chaoslab_cli::runner::{run_config, RunOutcome};
use chaoslab_cli::selftest::selftest;
use chaoslab_core::disorder::SeedSpec;
use chaoslab_core::gibbs::{exact_distribution, exact_moments, mcmc_moments, McmcConfig, Wanted};
use chaoslab_core::models::{couple, make_ea, make_mixed_pspin, make_rfim, make_vector_sk, ChaosTerm, FactorSystem, SpinConfiguration};
use chaoslab_core::observables::{assemble_overlap, intermediate_identity_check};
use chaoslab_core::topology::{lattice_graph, Graph};
use chaoslab_core::{BoundReport, Engine, Verdict};

/// Statistical slack in standard errors for every bound.
const SIGMAS: f64 = 3.0;
/// Coverage band for MCMC vs exact moments.
const MCMC_SIGMAS: f64 = 4.0;
const MCMC_MIN_COVERAGE: f64 = 0.95;
const FACTORIZATION_TOL: f64 = 1e-10;
const FKG_TOL: f64 = -1e-10;
const PAIR_DRAWS: usize = 1000;
const TAIL_DRAWS: usize = 100_000;

const T_GRID: &str = "[0.0, 0.25, 0.5, 0.75, 0.9]";
const EA_LATTICES: &str = r#"[
  { family = "ea", graph = { dims = [2, 2] } },
  { family = "ea", graph = { dims = [2, 3] } },
  { family = "ea", graph = { dims = [3, 3] } },
]"#;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn run_toml(text: &str, threads: Option<usize>) -> Result<(RunOutcome, tempfile::TempDir)> {
    let cfg = RunConfig::parse(text)?;
    let dir = tempfile::tempdir()?;
    let out = run_config(&cfg, text.as_bytes(), dir.path(), None, threads)?;
    Ok((out, dir))
}

/// All rows pass `lhs − 3·stderr ≤ rhs`, recomputed here from the numbers.
fn all_pass(rows: &[BoundReport]) -> Outcome {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.verdict != Verdict::Pass || r.lhs - SIGMAS * r.lhs_stderr > r.rhs)
        .map(|r| format!("{} t={:?} g=({:?},{:?}) lhs={:.4} rhs={:.4}", r.theorem_id, r.t, r.gamma1, r.gamma2, r.lhs, r.rhs))
        .collect();
    let min_ratio = rows.iter().map(|r| r.rhs / r.lhs.max(1e-300)).fold(f64::INFINITY, f64::min);
    if bad.is_empty() {
        Outcome { passed: !rows.is_empty(), detail: format!("{} rows, min rhs/lhs {:.2}", rows.len(), min_ratio) }
    } else {
        Outcome { passed: false, detail: format!("{} of {} rows fail: {}", bad.len(), rows.len(), bad.join("; ")) }
    }
}

fn pair_grid(theorem: &str, b1: f64, b2: f64) -> String {
    format!(
        r#"master_seed = 11
[[experiments]]
theorem = "{theorem}"
n_disorder = {PAIR_DRAWS}
models = {EA_LATTICES}
[experiments.sweep]
strength1 = [{b1:?}]
strength2 = [{b2:?}]
t = {T_GRID}
"#
    )
}

fn bond_overlap_grid() -> Result<Outcome> {
    let (equal, _d1) = run_toml(&pair_grid("thm2_1", 1.0, 1.0), None)?;
    let (unequal, _d2) = run_toml(&pair_grid("thm2_1", 0.5, 2.0), None)?;
    let mut rows = equal.reports;
    rows.extend(unequal.reports);
    ensure!(rows.len() == 30, "expected 30 grid points, got {}", rows.len());
    Ok(all_pass(&rows))
}

fn unequal_temperatures() -> Result<Outcome> {
    let (out, _d) = run_toml(&pair_grid("thm2_1_twotemp", 0.5, 2.0), None)?;
    Ok(all_pass(&out.reports))
}

fn intermediate_identity() -> Result<Outcome> {
    let graphs = [Graph::new(2, [(0, 1)])?, lattice_graph(&[2, 2], false)?];
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    let mut failures = Vec::new();
    for g in &graphs {
        let bound = 1.0 / (g.edge_count() as f64).sqrt();
        for (b1, b2) in [(1.0, 1.0), (0.5, 2.0)] {
            for t in [0.0, 0.25, 0.5, 0.75, 0.9] {
                let pair = couple(
                    make_ea(g, b1, 0.0, ChaosTerm::Bonds)?,
                    make_ea(g, b2, 0.0, ChaosTerm::Bonds)?,
                    t,
                    SeedSpec::new(23, 0),
                )?;
                let c = intermediate_identity_check(&pair, PAIR_DRAWS, &Engine::Exact)?;
                count += 1;
                worst = worst.max(c.value / bound);
                if c.value - SIGMAS * c.stderr > bound {
                    failures.push(format!("|E|={} b=({b1},{b2}) t={t}: {:.4} > {bound:.4}", g.edge_count(), c.value));
                }
            }
        }
    }
    Ok(Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{count} points, max value/bound {worst:.3}")
        } else {
            failures.join("; ")
        },
    })
}

fn example_bounds() -> Result<Outcome> {
    let text = format!(
        r#"master_seed = 13
[[experiments]]
theorem = "mixed_pspin"
n_disorder = 500
models = [
  {{ family = "mixed_pspin", n = 4, p = 1, betas = {{ "2" = 1.0, "3" = 0.8 }} }},
  {{ family = "mixed_pspin", n = 4, p = 2, betas = {{ "1" = 0.5, "3" = 0.8 }} }},
  {{ family = "mixed_pspin", n = 4, p = 3, betas = {{ "1" = 0.5, "2" = 1.0 }} }},
]
[experiments.sweep]
strength1 = [1.0]
strength2 = [1.0, 2.0]
t = [0.0, 0.5, 0.9]

[[experiments]]
theorem = "vector_sk"
n_disorder = 500
model = {{ family = "vector_sk", n = 3, points = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [1.0, 1.0]] }}
[experiments.sweep]
strength1 = [1.0]
strength2 = [1.0, 2.0]
t = [0.0, 0.5, 0.9]

[[experiments]]
theorem = "diluted"
n_disorder = 1000
model = {{ family = "diluted", n = 6, lambda = 1.0, p = 2 }}
[experiments.sweep]
strength1 = [1.0]
strength2 = [1.0, 2.0]
t = [0.0, 0.5, 0.9]

[[experiments]]
theorem = "ea_site"
n_disorder = 500
model = {{ family = "ea", graph = {{ dims = [2, 3] }}, beta = 0.5, chaos = "field" }}
[experiments.sweep]
strength1 = [1.0]
strength2 = [1.0, 2.0]
t = {T_GRID}
"#
    );
    let (out, _d) = run_toml(&text, None)?;
    Ok(all_pass(&out.reports))
}

fn diluted_tail() -> Result<Outcome> {
    let text = format!(
        r#"master_seed = 17
[[experiments]]
theorem = "diluted_tail"
n_disorder = {TAIL_DRAWS}
models = [
  {{ family = "diluted", n = 10, lambda = 1.0, p = 2 }},
  {{ family = "diluted", n = 100, lambda = 1.0, p = 2 }},
]
[experiments.sweep]
strength1 = [1.0]
"#
    );
    let (out, _d) = run_toml(&text, None)?;
    let mut o = all_pass(&out.reports);
    let vals: Vec<String> = out.reports.iter().map(|r| format!("{:.4}<={:.4}", r.lhs, r.rhs)).collect();
    o.detail = format!("{} ({})", o.detail, vals.join(", "));
    Ok(o)
}

fn weighted_magnetization() -> Result<Outcome> {
    let exp = |w: &str| {
        format!(
            r#"
[[experiments]]
theorem = "thm3_1"
n_disorder = {PAIR_DRAWS}
model = {{ family = "rfim", graph = {{ dims = [2, 3] }}, beta = 0.5 }}
[experiments.sweep]
strength1 = [0.25, 1.0, 4.0]
weights = "{w}"
"#
        )
    };
    let text = format!("master_seed = 19\n{}{}", exp("uniform"), exp("random_signed"));
    let (out, _d) = run_toml(&text, None)?;
    Ok(all_pass(&out.reports))
}

fn fkg_overlap() -> Result<Outcome> {
    let mut models = String::new();
    for dims in ["[2, 2]", "[2, 3]"] {
        for beta in ["0.3", "0.6", "1.0"] {
            models.push_str(&format!("  {{ family = \"rfim\", graph = {{ dims = {dims} }}, beta = {beta} }},\n"));
        }
    }
    let text = format!(
        r#"master_seed = 29
[[experiments]]
theorem = "fkg_overlap"
n_disorder = {PAIR_DRAWS}
models = [
{models}]
[experiments.sweep]
strength1 = [0.5, 1.0, 2.0]

[[experiments]]
name = "negative_control"
theorem = "fkg_overlap"
n_disorder = 200
model = {{ family = "rfim", graph = {{ dims = [2, 2] }}, beta = 1.0, sign = -1.0 }}
[experiments.sweep]
strength1 = [0.5]
"#
    );
    let (out, _d) = run_toml(&text, None)?;
    let (control, main): (Vec<_>, Vec<_>) = out.reports.into_iter().partition(|r| {
        matches!(r.model, chaoslab_core::ModelParams::Rfim { sign, .. } if sign < 0.0)
    });
    let worst_gap = main.iter().filter_map(|r| r.extras.get("worst_fkg_gap").copied()).fold(f64::INFINITY, f64::min);
    let mut o = all_pass(&main);
    let gaps_ok = worst_gap >= FKG_TOL;
    let control_gap = control[0].extras.get("worst_fkg_gap").copied().unwrap_or(f64::NAN);
    let control_ok = control[0].verdict == Verdict::HypothesisFailed && control_gap < FKG_TOL;
    o.passed &= gaps_ok && control_ok;
    o.detail = format!(
        "{}; worst gap {worst_gap:.2e}; flipped-sign control gap {control_gap:.3} ({})",
        o.detail, control[0].verdict
    );
    Ok(o)
}

fn normalized_field() -> Result<Outcome> {
    let text = r#"master_seed = 31
[[experiments]]
theorem = "eqlast"
n_disorder = 1000
models = [
  { family = "rfim", graph = { dims = [2, 2] }, beta = 0.5 },
  { family = "rfim", graph = { dims = [2, 3] }, beta = 0.5 },
]
[experiments.sweep]
strength1 = [0.5, 1.0, 2.0]

[[experiments]]
theorem = "eqlast2"
n_disorder = 1000
models = [
  { family = "rfim", graph = { dims = [2, 2] }, beta = 0.5 },
  { family = "rfim", graph = { dims = [2, 3] }, beta = 0.5 },
]
[experiments.sweep]
strength1 = [0.05, 0.5, 1.0, 2.0]
"#;
    let (out, _d) = run_toml(text, None)?;
    Ok(all_pass(&out.reports))
}

fn hermite_fields() -> Result<Outcome> {
    let text = r#"master_seed = 37
[[experiments]]
theorem = "thm5_3_ineq1"
n_disorder = 1000
model = { family = "rfim", graph = { dims = [2, 2] }, beta = 0.5 }
[experiments.sweep]
strength1 = [0.5, 1.0]
k = [1, 2, 3]
weights = "ones"

[[experiments]]
theorem = "thm5_3_ineq2"
n_disorder = 1000
model = { family = "rfim", graph = { dims = [2, 2] }, beta = 0.5 }
[experiments.sweep]
strength1 = [0.5, 1.0]
k = [1]
c_k = 1.0
weights = "ones"

[[experiments]]
theorem = "thm5_3_ineq2"
n_disorder = 1000
model = { family = "rfim", graph = { dims = [2, 2] }, beta = 0.5 }
[experiments.sweep]
strength1 = [0.5, 1.0]
k = [2, 3]
weights = "ones"
"#;
    let (out, _d) = run_toml(text, None)?;
    let mut o = all_pass(&out.reports);
    let cks: Vec<String> = out
        .reports
        .iter()
        .filter_map(|r| Some(format!("k={} g={}: C_k={:.4}", r.k?, r.gamma1?, r.extras.get("c_k")?)))
        .collect();
    o.detail = format!("{}; {}", o.detail, cks.join(", "));
    Ok(o)
}

fn oracle_systems() -> Result<Vec<FactorSystem>> {
    use std::collections::BTreeMap;
    Ok(vec![
        make_ea(&lattice_graph(&[2, 2], false)?, 0.8, 0.0, ChaosTerm::Bonds)?,
        make_ea(&lattice_graph(&[3, 3], false)?, 0.5, 0.3, ChaosTerm::Bonds)?,
        make_rfim(&lattice_graph(&[2, 3], false)?, 0.5, 1.0, 1.0)?,
        make_mixed_pspin(4, &BTreeMap::from([(2, 1.0), (3, 0.6)]), 2)?,
        make_vector_sk(3, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]], None, 1.0)?,
    ])
}

fn engine_oracles() -> Result<Outcome> {
    let cfg = McmcConfig { sweeps: 20_000, burn_in: 2_000, thin: 1, chains: 2, stderr_cap: None };
    let (mut inside, mut total) = (0usize, 0usize);
    for (s, sys) in oracle_systems()?.iter().enumerate() {
        for draw in 0..2u64 {
            let seed = SeedSpec::new(41 + s as u64, draw);
            let r = sys.sample_realization(seed);
            let ex = exact_moments(sys, &r, &Wanted::Full)?;
            let mc = mcmc_moments(sys, &r, &Wanted::Full, &cfg, seed)?;
            let err = mc.stderr.as_ref().expect("mcmc reports errors");
            let n = ex.index_count();
            for a in 0..n {
                total += 1;
                inside += usize::from((ex.first[a] - mc.first[a]).abs() <= MCMC_SIGMAS * err.first[a]);
                for b in a + 1..n {
                    let se = err.second.get(a, b).unwrap_or(0.0);
                    let d = (ex.second(a, b).unwrap() - mc.second(a, b).unwrap()).abs();
                    total += 1;
                    inside += usize::from(d <= MCMC_SIGMAS * se || d <= 1e-12);
                }
            }
        }
    }
    let coverage = inside as f64 / total as f64;

    // Brute-force three-replica enumeration vs factorized assembly.
    let mut worst: f64 = 0.0;
    let small = [
        Graph::new(2, [(0, 1)])?,
        Graph::new(3, [(0, 1), (1, 2), (0, 2)])?,
        lattice_graph(&[2, 2], false)?,
    ];
    for (i, g) in small.iter().enumerate() {
        for (b1, b2, t) in [(1.0, 1.0, 0.3), (0.5, 2.0, 0.8)] {
            let pair = couple(
                make_ea(g, b1, 0.4, ChaosTerm::Bonds)?,
                make_ea(g, b2, 0.4, ChaosTerm::Bonds)?,
                t,
                SeedSpec::new(53, i as u64),
            )?;
            let (r1, r2) = pair.realizations();
            let (p1, _) = exact_distribution(pair.system1(), &r1)?;
            let (p2, _) = exact_distribution(pair.system2(), &r2)?;
            let nv = g.vertex_count();
            let ne = g.edge_count();
            let conf = |m: usize| SpinConfiguration::from_states((0..nv).map(|j| (m >> j & 1) as u8).collect());
            let f1: Vec<Vec<f64>> =
                (0..p1.len()).map(|m| (0..ne).map(|e| pair.system1().bond_eval(e, &conf(m))).collect()).collect();
            let f2: Vec<Vec<f64>> =
                (0..p2.len()).map(|m| (0..ne).map(|e| pair.system2().bond_eval(e, &conf(m))).collect()).collect();
            let (mut q, mut q2) = (0.0, 0.0);
            for (a, pa) in p1.iter().enumerate() {
                for (b, pb) in p2.iter().enumerate() {
                    let o: f64 = (0..ne).map(|e| f1[a][e] * f2[b][e]).sum::<f64>() / ne as f64;
                    q += pa * pb * o;
                    q2 += pa * pb * o * o;
                }
            }
            let m1 = exact_moments(pair.system1(), &r1, &Wanted::Full)?;
            let m2 = exact_moments(pair.system2(), &r2, &Wanted::Full)?;
            let f = assemble_overlap(&m1, &m2)?;
            worst = worst.max((f.mean - q).abs()).max((f.second - q2).abs());
        }
    }
    Ok(Outcome {
        passed: coverage >= MCMC_MIN_COVERAGE && worst <= FACTORIZATION_TOL,
        detail: format!("MCMC {inside}/{total} within 4 stderr ({:.1}%); factorization max diff {worst:.1e}", 100.0 * coverage),
    })
}

fn math_stack() -> Result<Outcome> {
    let out = selftest(Some(43), None);
    let wanted = ["hermite_ibp_residual", "hermite_quadrature_norm", "coupled_correlation"];
    let checks: Vec<_> = out.checks.iter().filter(|c| wanted.contains(&c.name)).collect();
    ensure!(checks.len() == wanted.len(), "self-test check missing");
    Ok(Outcome {
        passed: checks.iter().all(|c| c.passed),
        detail: checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; "),
    })
}

fn reproducibility() -> Result<Outcome> {
    let text = r#"master_seed = 47
[[experiments]]
theorem = "thm2_1"
n_disorder = 64
models = [
  { family = "ea", graph = { dims = [2, 2] } },
  { family = "ea", graph = { dims = [2, 3] } },
]
[experiments.sweep]
strength1 = [1.0]
strength2 = [1.0, 2.0]
t = [0.0, 0.5]

[[experiments]]
theorem = "thm2_1"
n_disorder = 8
engine = { mcmc = { sweeps = 2000, burn_in = 200, chains = 2 } }
model = { family = "ea", graph = { dims = [2, 2] } }
[experiments.sweep]
strength1 = [1.0]
t = [0.5]

[[experiments]]
theorem = "thm3_1"
n_disorder = 64
model = { family = "rfim", graph = { dims = [2, 2] }, beta = 0.5 }
[experiments.sweep]
strength1 = [1.0]
weights = "random_signed"
"#;
    let read = |d: &Path| std::fs::read(d.join("results.csv"));
    let (_, a) = run_toml(text, Some(1))?;
    let (_, b) = run_toml(text, Some(4))?;
    let (_, c) = run_toml(text, Some(4))?;
    let (ra, rb, rc) = (read(a.path())?, read(b.path())?, read(c.path())?);
    Ok(Outcome {
        passed: ra == rb && rb == rc && !ra.is_empty(),
        detail: format!("{} bytes; 1 vs 4 threads equal: {}; repeat equal: {}", ra.len(), ra == rb, rb == rc),
    })
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("bond_overlap_grid", bond_overlap_grid),
        ("unequal_temperatures", unequal_temperatures),
        ("intermediate_identity", intermediate_identity),
        ("example_bounds", example_bounds),
        ("diluted_tail", diluted_tail),
        ("weighted_magnetization", weighted_magnetization),
        ("fkg_site_overlap", fkg_overlap),
        ("normalized_field", normalized_field),
        ("hermite_fields", hermite_fields),
        ("engine_oracles", engine_oracles),
        ("math_stack", math_stack),
        ("reproducibility", reproducibility),
    ];
    let only: Option<String> = std::env::args().nth(1).filter(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.as_deref().is_some_and(|o| !name.contains(o)) {
            continue;
        }
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e:#}") });
        failed += usize::from(!o.passed);
        println!(
            "{} {:>2} {:<24} [{:.1}s] {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            name,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
