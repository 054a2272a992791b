//! `selftest`: quick numerical checks of the math stack and the engines.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use chaoslab_core::disorder::{hermite_eval, hermite_ibp_residual_with, sample_coupled, GaussHermite, SeedSpec};
use chaoslab_core::gibbs::{exact_distribution, exact_moments, mcmc_moments, McmcConfig, Wanted};
use chaoslab_core::models::{couple, make_ea, ChaosTerm, SpinConfiguration};
use chaoslab_core::observables::{assemble_overlap, intermediate_identity_check};
use chaoslab_core::topology::{lattice_graph, Graph};
use chaoslab_core::Engine;

/// Deliberate defects for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Scales `H_k` by `1 + 0.001 k`.
    Hermite,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SelftestOutcome {
    pub checks: Vec<CheckResult>,
    pub seconds: f64,
}

impl SelftestOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<28} {:<6} detail", "check", "result");
        for c in &self.checks {
            let _ = writeln!(s, "{:<28} {:<6} {}", c.name, if c.passed { "ok" } else { "FAIL" }, c.detail);
        }
        let _ = writeln!(s, "{} of {} checks passed in {:.1}s", self.checks.iter().filter(|c| c.passed).count(), self.checks.len(), self.seconds);
        s
    }
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e:#}") },
    }
}

fn ibp_check(fault: Option<Fault>) -> Result<(bool, String)> {
    let skew = if fault == Some(Fault::Hermite) { 1e-3 } else { 0.0 };
    let hermite = move |k: usize, x: f64| (1.0 + skew * k as f64) * hermite_eval(k, x);
    type Pair = (fn(f64) -> f64, fn(f64) -> f64);
    let family: [Pair; 3] = [
        (|x| x.tanh(), |x| 1.0 - x.tanh().powi(2)),
        (|x| (x / 4.0).exp(), |x| (x / 4.0).exp() / 4.0),
        (|x| x * x * x, |x| 3.0 * x * x),
    ];
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        for (f, df) in family {
            worst = worst.max(hermite_ibp_residual_with(hermite, k, f, df, 80)?.residual);
        }
    }
    Ok((worst <= 1e-8, format!("max residual {worst:.2e} (k <= 4)")))
}

fn quadrature_check() -> Result<(bool, String)> {
    let q = GaussHermite::new(64);
    let mut worst: f64 = 0.0;
    let mut fact = 1.0;
    for k in 0..=6 {
        if k > 0 {
            fact *= k as f64;
        }
        let m = q.expect(|x| hermite_eval(k, x).powi(2));
        worst = worst.max((m - fact).abs() / fact);
    }
    Ok((worst <= 1e-8, format!("max relative error {worst:.2e} (k <= 6)")))
}

fn correlation_check(seed: u64) -> Result<(bool, String)> {
    let n = 200_000;
    let mut ok = true;
    let mut detail = String::new();
    for t in [0.0, 0.3, 0.8] {
        let d = sample_coupled(n, t, SeedSpec::new(seed, 0))?;
        let c: f64 = d.g1().iter().zip(d.g2()).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        let tol = 3.0 / (n as f64).sqrt();
        ok &= (c - t).abs() <= tol;
        let _ = write!(detail, "t={t}: {c:.4} ");
    }
    Ok((ok, format!("{detail}(tol 3/sqrt(n))")))
}

fn mcmc_check(seed: u64) -> Result<(bool, String)> {
    let sys = make_ea(&lattice_graph(&[3, 3], false)?, 0.5, 0.0, ChaosTerm::Bonds)?;
    let cfg = McmcConfig { sweeps: 20_000, burn_in: 1_000, thin: 1, chains: 2, stderr_cap: None };
    let (mut inside, mut total) = (0usize, 0usize);
    for draw in 0..3 {
        let r = sys.sample_realization(SeedSpec::new(seed, draw));
        let ex = exact_moments(&sys, &r, &Wanted::Full)?;
        let mc = mcmc_moments(&sys, &r, &Wanted::Full, &cfg, SeedSpec::new(seed, draw))?;
        let err = mc.stderr.as_ref().expect("mcmc errors");
        for e in 0..ex.index_count() {
            total += 1;
            inside += usize::from((ex.first[e] - mc.first[e]).abs() <= 4.0 * err.first[e]);
            for f in e + 1..ex.index_count() {
                let se = err.second.get(e, f).unwrap_or(0.0);
                total += 1;
                inside += usize::from((ex.second(e, f).unwrap() - mc.second(e, f).unwrap()).abs() <= 4.0 * se);
            }
        }
    }
    let frac = inside as f64 / total as f64;
    Ok((frac >= 0.95, format!("{inside}/{total} moments within 4 stderr on 3x3 EA")))
}

fn factorization_check(seed: u64) -> Result<(bool, String)> {
    let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)])?;
    let pair = couple(
        make_ea(&g, 0.9, 0.0, ChaosTerm::Bonds)?,
        make_ea(&g, 1.4, 0.0, ChaosTerm::Bonds)?,
        0.4,
        SeedSpec::new(seed, 0),
    )?;
    let (r1, r2) = pair.realizations();
    let states = |m: usize| SpinConfiguration::from_states((0..3).map(|i| (m >> i & 1) as u8).collect());
    let (p1, _) = exact_distribution(pair.system1(), &r1)?;
    let (p2, _) = exact_distribution(pair.system2(), &r2)?;
    let (mut q, mut q2) = (0.0, 0.0);
    for (a, pa) in p1.iter().enumerate() {
        for (b, pb) in p2.iter().enumerate() {
            let (ca, cb) = (states(a), states(b));
            let o: f64 = (0..3).map(|e| pair.system1().bond_eval(e, &ca) * pair.system2().bond_eval(e, &cb)).sum::<f64>() / 3.0;
            q += pa * pb * o;
            q2 += pa * pb * o * o;
        }
    }
    let m1 = exact_moments(pair.system1(), &r1, &Wanted::Full)?;
    let m2 = exact_moments(pair.system2(), &r2, &Wanted::Full)?;
    let f = assemble_overlap(&m1, &m2)?;
    let diff = (f.mean - q).abs().max((f.second - q2).abs());
    Ok((diff <= 1e-10, format!("max |factorized - enumerated| = {diff:.1e}")))
}

fn identity_check(seed: u64) -> Result<(bool, String)> {
    let g = Graph::new(2, [(0, 1)])?;
    let pair = couple(
        make_ea(&g, 1.0, 0.0, ChaosTerm::Bonds)?,
        make_ea(&g, 1.0, 0.0, ChaosTerm::Bonds)?,
        0.5,
        SeedSpec::new(seed, 0),
    )?;
    let c = intermediate_identity_check(&pair, 2000, &Engine::Exact)?;
    Ok((c.value <= 1.0 + 3.0 * c.stderr, format!("{:.4} <= 1 (1 edge, t=0.5)", c.value)))
}

/// Runs every check. `seed` only moves the random inputs; verdicts should not
/// depend on it.
pub fn selftest(seed: Option<u64>, fault: Option<Fault>) -> SelftestOutcome {
    let start = Instant::now();
    let seed = seed.unwrap_or(20_240_601);
    let checks = vec![
        check("hermite_ibp_residual", || ibp_check(fault)),
        check("hermite_quadrature_norm", quadrature_check),
        check("coupled_correlation", || correlation_check(seed)),
        check("mcmc_vs_exact", || mcmc_check(seed)),
        check("replica_factorization", || factorization_check(seed)),
        check("intermediate_identity", || identity_check(seed)),
    ];
    SelftestOutcome { checks, seconds: start.elapsed().as_secs_f64() }
}
