use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{Method, MomentErrors, MomentTable, SecondMoments, Wanted};
use crate::disorder::{tags, SeedSpec};
use crate::error::{Error, Result};
use crate::models::{Evaluator, FactorSystem, Realization};

/// Batches per chain for batch-means standard errors.
pub const BATCHES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcConfig {
    pub sweeps: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "one")]
    pub thin: usize,
    #[serde(default = "one")]
    pub chains: usize,
    /// Fail if any moment's standard error exceeds this.
    #[serde(default)]
    pub stderr_cap: Option<f64>,
}

fn one() -> usize {
    1
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig { sweeps: 20_000, burn_in: 2_000, thin: 1, chains: 2, stderr_cap: None }
    }
}

impl McmcConfig {
    pub fn recorded_per_chain(&self) -> usize {
        self.sweeps.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.thin == 0 || self.chains == 0 {
            return Err(Error::invalid("sweeps, thin and chains must be positive"));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::invalid(format!("sweeps ({}) must exceed burn_in ({})", self.sweeps, self.burn_in)));
        }
        if self.recorded_per_chain() < BATCHES {
            return Err(Error::invalid(format!(
                "need at least {BATCHES} recorded samples per chain, got {}",
                self.recorded_per_chain()
            )));
        }
        if let Some(cap) = self.stderr_cap {
            if cap.is_nan() || cap <= 0.0 {
                return Err(Error::invalid("stderr_cap must be positive"));
            }
        }
        Ok(())
    }
}

/// Single-site Metropolis chain. One sweep proposes a move at every site in
/// index order.
pub struct MetropolisChain<'a> {
    eval: Evaluator<'a>,
    incidence: Vec<Vec<(usize, usize)>>,
    states: Vec<u8>,
    q: u8,
    rng: ChaCha20Rng,
}

impl<'a> MetropolisChain<'a> {
    /// Starts from a uniformly random configuration.
    pub fn new(system: &'a FactorSystem, realization: &Realization, seed: SeedSpec) -> Result<Self> {
        let eval = Evaluator::new(system, realization)?;
        let q = system.spins().state_count() as u8;
        let mut rng = seed.rng();
        let states = (0..system.site_count()).map(|_| rng.random_range(0..q)).collect();
        let incidence = eval.incidence();
        Ok(MetropolisChain { eval, incidence, states, q, rng })
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn sweep(&mut self) {
        for i in 0..self.states.len() {
            let current = self.states[i];
            let proposal = if self.q == 2 {
                1 - current
            } else {
                let r = self.rng.random_range(0..self.q - 1);
                if r >= current {
                    r + 1
                } else {
                    r
                }
            };
            let before = self.eval.local_energy(&self.incidence[i], &self.states) + self.eval.log_nu(current);
            self.states[i] = proposal;
            let after = self.eval.local_energy(&self.incidence[i], &self.states) + self.eval.log_nu(proposal);
            let delta = after - before;
            if !(delta >= 0.0 || self.rng.random::<f64>() < delta.exp()) {
                self.states[i] = current;
            }
        }
    }

    pub(crate) fn chaos_values(&self, out: &mut [f64]) {
        self.eval.chaos_values(&self.states, out);
    }
}

struct Accumulator {
    first: Vec<f64>,
    second: SecondMoments,
}

impl Accumulator {
    fn new(n: usize, layout: &SecondMoments) -> Self {
        Accumulator { first: vec![0.0; n], second: layout.clone() }
    }

    fn add(&mut self, f: &[f64]) {
        for (a, v) in self.first.iter_mut().zip(f) {
            *a += v;
        }
        match &mut self.second {
            SecondMoments::None => {}
            SecondMoments::Dense { n, values } => {
                for a in 0..*n {
                    let row = &mut values[a * *n..(a + 1) * *n];
                    for b in a..*n {
                        row[b] += f[a] * f[b];
                    }
                }
            }
            SecondMoments::Sparse(map) => {
                for ((a, b), v) in map.iter_mut() {
                    *v += f[*a] * f[*b];
                }
            }
        }
    }

    fn values(&self) -> Vec<f64> {
        let mut out = self.first.clone();
        out.extend(self.second_values());
        out
    }

    fn second_values(&self) -> Vec<f64> {
        match &self.second {
            SecondMoments::None => vec![],
            SecondMoments::Dense { n, values } => {
                let mut out = Vec::new();
                for a in 0..*n {
                    out.extend_from_slice(&values[a * n + a..(a + 1) * n]);
                }
                out
            }
            SecondMoments::Sparse(map) => map.values().copied().collect(),
        }
    }
}

/// Writes a flat vector (first moments, then upper-triangle second moments)
/// back into the layout.
fn unflatten(flat: &[f64], n: usize, layout: &SecondMoments) -> (Vec<f64>, SecondMoments) {
    let first = flat[..n].to_vec();
    let mut rest = flat[n..].iter().copied();
    let second = match layout {
        SecondMoments::None => SecondMoments::None,
        SecondMoments::Dense { n, .. } => {
            let mut values = vec![0.0; n * n];
            for a in 0..*n {
                for b in a..*n {
                    let v = rest.next().unwrap_or(0.0);
                    values[a * n + b] = v;
                    values[b * n + a] = v;
                }
            }
            SecondMoments::Dense { n: *n, values }
        }
        SecondMoments::Sparse(map) => {
            SecondMoments::Sparse(map.keys().map(|k| (*k, rest.next().unwrap_or(0.0))).collect())
        }
    };
    (first, second)
}

/// Metropolis estimates of the chaos-factor moments with batch-means
/// standard errors. Chain `c` draws from `seed.derive(MCMC).derive(c)`.
pub fn mcmc_moments(
    system: &FactorSystem,
    realization: &Realization,
    wanted: &Wanted,
    config: &McmcConfig,
    seed: SeedSpec,
) -> Result<MomentTable> {
    config.validate()?;
    let n = system.index_count();
    let layout = wanted.layout(n)?;
    let batch_len = config.recorded_per_chain() / BATCHES;
    let base = seed.derive(tags::MCMC);
    let mut batch_means: Vec<Vec<f64>> = Vec::with_capacity(BATCHES * config.chains);
    let mut f = vec![0.0; n];
    for c in 0..config.chains {
        let mut chain = MetropolisChain::new(system, realization, base.derive(c as u64))?;
        for _ in 0..config.burn_in {
            chain.sweep();
        }
        for _ in 0..BATCHES {
            let mut acc = Accumulator::new(n, &layout);
            for _ in 0..batch_len {
                for _ in 0..config.thin {
                    chain.sweep();
                }
                chain.chaos_values(&mut f);
                acc.add(&f);
            }
            batch_means.push(acc.values().into_iter().map(|v| v / batch_len as f64).collect());
        }
    }
    let width = batch_means[0].len();
    let nb = batch_means.len() as f64;
    let mut mean = vec![0.0; width];
    for b in &batch_means {
        for (m, v) in mean.iter_mut().zip(b) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= nb);
    let mut err = vec![0.0; width];
    for b in &batch_means {
        for ((e, v), m) in err.iter_mut().zip(b).zip(&mean) {
            *e += (v - m) * (v - m);
        }
    }
    err.iter_mut().for_each(|e| *e = (*e / (nb - 1.0) / nb).sqrt());
    if let Some(cap) = config.stderr_cap {
        let worst = err.iter().copied().fold(0.0, f64::max);
        if worst > cap {
            return Err(Error::McmcNonConvergence { stderr: worst, cap });
        }
    }
    let (first, second) = unflatten(&mean, n, &layout);
    let (first_err, second_err) = unflatten(&err, n, &layout);
    Ok(MomentTable {
        first,
        second,
        log_partition: None,
        method: Method::Mcmc,
        stderr: Some(MomentErrors { first: first_err, second: second_err }),
    })
}
