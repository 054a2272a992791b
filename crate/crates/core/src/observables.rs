//! Quenched variances of overlaps, magnetizations and Hermite random fields,
//! assembled from single-system [`MomentTable`]s.
//!
//! Replicas are independent given the disorder, so every two- and
//! three-replica Gibbs average factors into products of one-system moments:
//!
//! ```text
//! ⟨Q⟩       = |E|⁻¹ Σ_e ⟨f_e⟩₁ ⟨f_e⟩₂
//! ⟨Q²⟩      = |E|⁻² Σ_{e,e'} ⟨f_e f_e'⟩₁ ⟨f_e f_e'⟩₂
//! ⟨Q₁₁Q₂₁⟩  = |E|⁻² Σ_{e,e'} ⟨f_e⟩₁ ⟨f_e'⟩₁ ⟨f_e f_e'⟩₂
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::disorder::{hermite_eval, tags, SeedSpec, MAX_HERMITE_DEGREE};
use crate::error::{Error, Result};
use crate::gibbs::{exact_moments, Engine, Method, MomentTable, Wanted};
use crate::models::{CoupledPair, FactorSystem, Realization};
use crate::stats::{over_replicas, reduce_pairwise, summarize, Summary};

/// Largest Hermite degree accepted by [`field_variance`].
pub const MAX_FIELD_DEGREE: usize = 8;

/// A disorder-averaged Gibbs variance with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchedVariance {
    pub value: f64,
    pub stderr: f64,
    pub n_disorder: usize,
    pub engine: Method,
}

impl QuenchedVariance {
    /// Combines per-draw values and (MCMC) per-draw standard errors.
    pub(crate) fn from_draws(values: &[f64], inner_stderr: &[f64], engine: Method) -> Self {
        let s = summarize(values);
        let n = values.len().max(1) as f64;
        let inner = inner_stderr.iter().map(|e| e * e).sum::<f64>() / (n * n);
        QuenchedVariance {
            value: s.mean,
            stderr: (s.stderr().powi(2) + inner).sqrt(),
            n_disorder: values.len(),
            engine,
        }
    }
}

/// Coefficients `a_e` with cached `‖a‖₁` and `‖a‖₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    a: Vec<f64>,
    norm1: f64,
    norm2: f64,
}

impl WeightVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("weights must be finite"));
        }
        let norm1 = a.iter().map(|x| x.abs()).sum();
        let norm2 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(WeightVector { a, norm1, norm2 })
    }

    pub fn ones(n: usize) -> Self {
        Self::new(vec![1.0; n]).expect("finite")
    }

    /// `a_e = 1/n`.
    pub fn uniform(n: usize) -> Self {
        Self::new(vec![1.0 / n.max(1) as f64; n]).expect("finite")
    }

    /// Independent uniform magnitudes in `[0.5, 1.5)` with random signs,
    /// scaled by `1/n`.
    pub fn random_signed(n: usize, seed: SeedSpec) -> Self {
        let mut rng = seed.derive(tags::WEIGHTS).rng();
        let a = (0..n)
            .map(|_| {
                let mag: f64 = rng.random_range(0.5..1.5);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * mag / n.max(1) as f64
            })
            .collect();
        Self::new(a).expect("finite")
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn norm1(&self) -> f64 {
        self.norm1
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }
}

fn full_moments(engine: &Engine, system: &FactorSystem, r: &Realization, seed: SeedSpec) -> Result<MomentTable> {
    engine.moments(system, r, &Wanted::Full, seed)
}

fn stderr_of(table: &MomentTable, a: usize, b: Option<usize>) -> f64 {
    match (&table.stderr, b) {
        (None, _) => 0.0,
        (Some(err), None) => err.first[a],
        (Some(err), Some(b)) => err.second.get(a, b).unwrap_or(0.0),
    }
}

/// Per-realization two-system overlap moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapMoments {
    /// `⟨Q⟩`
    pub mean: f64,
    /// `⟨Q²⟩`
    pub second: f64,
    /// First-order propagated MCMC error of `⟨Q²⟩ − ⟨Q⟩²` (0 for exact).
    pub stderr: f64,
}

impl OverlapMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// Factorized `⟨Q⟩`, `⟨Q²⟩` from the two systems' moment tables.
pub fn assemble_overlap(m1: &MomentTable, m2: &MomentTable) -> Result<OverlapMoments> {
    let n = m1.index_count();
    if m2.index_count() != n {
        return Err(Error::MismatchedFamilies("moment tables of different sizes".into()));
    }
    if n == 0 {
        return Ok(OverlapMoments { mean: 1.0, second: 1.0, stderr: 0.0 });
    }
    let (_, s1) = m1.require_dense()?;
    let (_, s2) = m2.require_dense()?;
    let nf = n as f64;
    let mean = m1.first.iter().zip(&m2.first).map(|(a, b)| a * b).sum::<f64>() / nf;
    let second = s1.iter().zip(s2).map(|(a, b)| a * b).sum::<f64>() / (nf * nf);
    let mcmc = m1.stderr.is_some() || m2.stderr.is_some();
    let stderr = if mcmc {
        let mut acc = 0.0;
        for a in 0..n {
            let d1 = -2.0 * mean * m2.first[a] / nf;
            let d2 = -2.0 * mean * m1.first[a] / nf;
            acc += (d1 * stderr_of(m1, a, None)).powi(2) + (d2 * stderr_of(m2, a, None)).powi(2);
            for b in 0..n {
                let w1 = s2[a * n + b] / (nf * nf);
                let w2 = s1[a * n + b] / (nf * nf);
                acc += (w1 * stderr_of(m1, a, Some(b))).powi(2) + (w2 * stderr_of(m2, a, Some(b))).powi(2);
            }
        }
        acc.sqrt()
    } else {
        0.0
    };
    Ok(OverlapMoments { mean, second, stderr })
}

/// `⟨Q²⟩ − ⟨Q⟩²` for the pair's current disorder.
pub fn replica_variance(pair: &CoupledPair, engine: &Engine) -> Result<OverlapMoments> {
    let (r1, r2) = pair.realizations();
    if pair.index_count() == 0 {
        return Ok(OverlapMoments { mean: 1.0, second: 1.0, stderr: 0.0 });
    }
    let m1 = full_moments(engine, pair.system1(), &r1, pair.seed())?;
    let m2 = full_moments(engine, pair.system2(), &r2, pair.seed().derive(1))?;
    assemble_overlap(&m1, &m2)
}

/// Bond-overlap variance together with the disorder spread of `⟨Q⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapStudy {
    pub variance: QuenchedVariance,
    /// `E⟨Q⟩`
    pub overlap_mean: f64,
    /// Sample variance of `⟨Q⟩` across disorder draws. Diagnostic only.
    pub overlap_spread: f64,
}

/// Runs [`replica_variance`] over `n_disorder` draws produced by `make_pair(i)`.
pub fn bond_overlap_study_with<F>(n_disorder: usize, engine: &Engine, make_pair: F) -> Result<OverlapStudy>
where
    F: Fn(usize) -> Result<CoupledPair> + Sync + Send,
{
    if n_disorder < 2 {
        return Err(Error::invalid("n_disorder must be at least 2"));
    }
    let draws = over_replicas(n_disorder, |i| replica_variance(&make_pair(i)?, engine))?;
    let values: Vec<f64> = draws.iter().map(OverlapMoments::variance).collect();
    let errs: Vec<f64> = draws.iter().map(|d| d.stderr).collect();
    let means: Vec<f64> = draws.iter().map(|d| d.mean).collect();
    let spread = summarize(&means);
    Ok(OverlapStudy {
        variance: QuenchedVariance::from_draws(&values, &errs, engine.method()),
        overlap_mean: spread.mean,
        overlap_spread: spread.variance(),
    })
}

/// Draw `i` uses `pair.redraw(i)`.
pub fn bond_overlap_study(pair: &CoupledPair, n_disorder: usize, engine: &Engine) -> Result<OverlapStudy> {
    bond_overlap_study_with(n_disorder, engine, |i| pair.redraw(i as u64))
}

/// `E[⟨Q²⟩ − ⟨Q⟩²]` over `n_disorder` independent coupled draws.
pub fn bond_overlap_variance(pair: &CoupledPair, n_disorder: usize, engine: &Engine) -> Result<QuenchedVariance> {
    bond_overlap_study(pair, n_disorder, engine).map(|s| s.variance)
}

fn single_system_loop<F>(
    system: &FactorSystem,
    n_disorder: usize,
    engine: &Engine,
    seed: SeedSpec,
    per_draw: F,
) -> Result<QuenchedVariance>
where
    F: Fn(&Realization, &MomentTable) -> (f64, f64) + Sync + Send,
{
    if n_disorder == 0 {
        return Err(Error::invalid("n_disorder must be positive"));
    }
    let draws = over_replicas(n_disorder, |i| {
        let s = seed.with_stream(i as u64);
        let r = system.sample_realization(s);
        let m = full_moments(engine, system, &r, s)?;
        Ok(per_draw(&r, &m))
    })?;
    let values: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let errs: Vec<f64> = draws.iter().map(|d| d.1).collect();
    Ok(QuenchedVariance::from_draws(&values, &errs, engine.method()))
}

/// `E[⟨R²⟩ − ⟨R⟩²]` for the site overlap `R` of two replicas of one system.
pub fn site_overlap_variance(
    system: &FactorSystem,
    n_disorder: usize,
    engine: &Engine,
    seed: SeedSpec,
) -> Result<QuenchedVariance> {
    if !system.has_site_chaos() {
        return Err(Error::invalid("site overlap needs an Ising system whose chaos term is the site field"));
    }
    single_system_loop(system, n_disorder, engine, seed, |_, m| {
        let over = assemble_overlap(m, m).expect("dense table");
        (over.variance(), over.stderr)
    })
}

/// `Σ_{e,e'} c_e c_e' (⟨f_e f_e'⟩ − ⟨f_e⟩⟨f_e'⟩)` and its propagated error.
fn weighted_variance(m: &MomentTable, c: &[f64]) -> (f64, f64) {
    let n = m.index_count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let (_, s) = m.require_dense().expect("dense table");
    let mean: f64 = c.iter().zip(&m.first).map(|(a, f)| a * f).sum();
    let second: f64 = (0..n).map(|a| c[a] * (0..n).map(|b| c[b] * s[a * n + b]).sum::<f64>()).sum();
    let err = match &m.stderr {
        None => 0.0,
        Some(e) => {
            let mut acc = 0.0;
            for a in 0..n {
                acc += (2.0 * mean * c[a] * e.first[a]).powi(2);
                for b in 0..n {
                    acc += (c[a] * c[b] * e.second.get(a, b).unwrap_or(0.0)).powi(2);
                }
            }
            acc.sqrt()
        }
    };
    (second - mean * mean, err)
}

/// `E⟨(m − ⟨m⟩)²⟩` for `m(σ) = Σ_e a_e f_e(σ)`.
pub fn magnetization_variance(
    system: &FactorSystem,
    weights: &WeightVector,
    n_disorder: usize,
    engine: &Engine,
    seed: SeedSpec,
) -> Result<QuenchedVariance> {
    field_variance(system, weights, 0, n_disorder, engine, seed)
}

/// `E[⟨W²⟩ − ⟨W⟩²]` for `W(σ) = Σ_e a_e He_k(g_e) f_e(σ)`.
pub fn field_variance(
    system: &FactorSystem,
    weights: &WeightVector,
    k: usize,
    n_disorder: usize,
    engine: &Engine,
    seed: SeedSpec,
) -> Result<QuenchedVariance> {
    if k > MAX_FIELD_DEGREE.min(MAX_HERMITE_DEGREE) {
        return Err(Error::invalid(format!("Hermite degree {k} exceeds {MAX_FIELD_DEGREE}")));
    }
    if weights.len() != system.index_count() {
        return Err(Error::invalid(format!(
            "{} weights for {} factors",
            weights.len(),
            system.index_count()
        )));
    }
    let a = weights.as_slice();
    single_system_loop(system, n_disorder, engine, seed, |r, m| {
        let c: Vec<f64> = a.iter().zip(&r.chaos).map(|(a, g)| a * hermite_eval(k, *g)).collect();
        weighted_variance(m, &c)
    })
}

/// Both sides of the Gaussian integration-by-parts step behind the overlap
/// bound, averaged over disorder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    /// `|γ₁ √(1−t) E⟨Q₁₁² − Q₁₁Q₂₁⟩|`
    pub value: f64,
    pub stderr: f64,
    /// `E⟨Q₁₁ Z₁(ρ¹)⟩ / |E|`, which should agree with the signed value.
    pub ibp_side: f64,
    pub ibp_stderr: f64,
    /// `γ₁ √(1−t) E⟨Q₁₁² − Q₁₁Q₂₁⟩` before taking the absolute value.
    pub signed: f64,
}

/// Per-draw `(⟨Q₁₁²⟩ − ⟨Q₁₁Q₂₁⟩, ⟨Q₁₁ Z₁(ρ¹)⟩/|E|)`.
pub fn identity_terms(m1: &MomentTable, m2: &MomentTable, z1: &[f64]) -> Result<(f64, f64)> {
    let n = m1.index_count();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let (_, s1) = m1.require_dense()?;
    let (_, s2) = m2.require_dense()?;
    let nf2 = (n * n) as f64;
    let mut q2 = 0.0;
    let mut cross = 0.0;
    let mut ibp = 0.0;
    for a in 0..n {
        for b in 0..n {
            let p2 = s2[a * n + b];
            q2 += s1[a * n + b] * p2;
            cross += m1.first[a] * m1.first[b] * p2;
            ibp += z1[b] * m1.first[a] * p2;
        }
    }
    Ok(((q2 - cross) / nf2, ibp / nf2))
}

/// Exact-engine check of `|γ₁√(1−t) E⟨Q₁₁² − Q₁₁Q₂₁⟩| ≤ 1/√|E|`; returns the
/// measured left side and the integration-by-parts side.
pub fn intermediate_identity_check(pair: &CoupledPair, n_disorder: usize, engine: &Engine) -> Result<IdentityCheck> {
    if !matches!(engine, Engine::Exact) {
        return Err(Error::Unsupported("the intermediate identity is evaluated with the exact engine only".into()));
    }
    if n_disorder < 2 {
        return Err(Error::invalid("n_disorder must be at least 2"));
    }
    let draws = over_replicas(n_disorder, |i| {
        let p = pair.redraw(i as u64)?;
        let (r1, r2) = p.realizations();
        let m1 = exact_moments(p.system1(), &r1, &Wanted::Full)?;
        let m2 = exact_moments(p.system2(), &r2, &Wanted::Full)?;
        identity_terms(&m1, &m2, p.disorder().z1())
    })?;
    let prefactor = pair.gamma1() * (1.0 - pair.t()).max(0.0).sqrt();
    let diff: Vec<Summary> = draws.iter().map(|d| Summary::single(d.0)).collect();
    let ibp: Vec<Summary> = draws.iter().map(|d| Summary::single(d.1)).collect();
    let diff = reduce_pairwise(&diff);
    let ibp = reduce_pairwise(&ibp);
    let signed = prefactor * diff.mean;
    Ok(IdentityCheck {
        value: signed.abs(),
        stderr: prefactor * diff.stderr(),
        ibp_side: ibp.mean,
        ibp_stderr: ibp.stderr(),
        signed,
    })
}

/// Smallest `⟨σ_iσ_j⟩ − ⟨σ_i⟩⟨σ_j⟩` over `i < j` for one realization of a
/// site-chaos Ising system; `0` with fewer than two sites.
pub fn fkg_check(system: &FactorSystem, realization: &Realization) -> Result<f64> {
    if !system.has_site_chaos() {
        return Err(Error::invalid("fkg_check needs an Ising system whose chaos term is the site field"));
    }
    let m = exact_moments(system, realization, &Wanted::Full)?;
    let n = m.index_count();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.min(m.covariance(i, j).expect("dense table"));
        }
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}
