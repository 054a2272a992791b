use super::{Method, MomentTable, SecondMoments, Wanted};
use crate::error::{Error, Result};
use crate::models::{Evaluator, FactorSystem, Realization};

/// Largest configuration space enumerated exactly.
pub const EXACT_CAPACITY: usize = 1 << 24;

fn checked_size(system: &FactorSystem) -> Result<usize> {
    let states = system.configuration_count();
    if states > EXACT_CAPACITY as f64 {
        return Err(Error::CapacityExceeded { states, cap: EXACT_CAPACITY });
    }
    Ok(states as usize)
}

/// State labels of configuration number `index`; site 0 is the fastest digit.
pub fn config_from_index(index: usize, q: usize, n: usize, out: &mut [u8]) {
    let mut rest = index;
    for slot in out.iter_mut().take(n) {
        *slot = (rest % q) as u8;
        rest /= q;
    }
}

fn advance(states: &mut [u8], q: u8) {
    for s in states.iter_mut() {
        *s += 1;
        if *s < q {
            return;
        }
        *s = 0;
    }
}

/// Normalised Gibbs probabilities in [`config_from_index`] order, plus `log Z`.
pub fn exact_distribution(system: &FactorSystem, realization: &Realization) -> Result<(Vec<f64>, f64)> {
    let size = checked_size(system)?;
    let eval = Evaluator::new(system, realization)?;
    let q = system.spins().state_count() as u8;
    let mut states = vec![0u8; system.site_count()];
    let mut logw = Vec::with_capacity(size);
    for _ in 0..size {
        let lw = eval.log_weight(&states);
        if lw.is_nan() || lw == f64::INFINITY {
            return Err(Error::NonFiniteWeight);
        }
        logw.push(lw);
        advance(&mut states, q);
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::NonFiniteWeight);
    }
    let mut probs: Vec<f64> = logw.iter().map(|lw| (lw - max).exp()).collect();
    let z: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= z;
    }
    Ok((probs, max + z.ln()))
}

/// Exact moments by enumerating `|S|^N` configurations with max-shifted
/// log-weights.
pub fn exact_moments(system: &FactorSystem, realization: &Realization, wanted: &Wanted) -> Result<MomentTable> {
    let (probs, log_partition) = exact_distribution(system, realization)?;
    let eval = Evaluator::new(system, realization)?;
    let n = eval.chaos_len();
    let q = system.spins().state_count() as u8;
    let mut second = wanted.layout(n)?;
    let mut first = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut states = vec![0u8; system.site_count()];
    for &p in &probs {
        if p > 0.0 {
            eval.chaos_values(&states, &mut f);
            for (acc, v) in first.iter_mut().zip(&f) {
                *acc += p * v;
            }
            match &mut second {
                SecondMoments::None => {}
                SecondMoments::Dense { values, .. } => {
                    for a in 0..n {
                        let pa = p * f[a];
                        let row = &mut values[a * n..(a + 1) * n];
                        for b in a..n {
                            row[b] += pa * f[b];
                        }
                    }
                }
                SecondMoments::Sparse(map) => {
                    for ((a, b), v) in map.iter_mut() {
                        *v += p * f[*a] * f[*b];
                    }
                }
            }
        }
        advance(&mut states, q);
    }
    if let SecondMoments::Dense { values, .. } = &mut second {
        for a in 0..n {
            for b in 0..a {
                values[a * n + b] = values[b * n + a];
            }
        }
    }
    Ok(MomentTable { first, second, log_partition: Some(log_partition), method: Method::Exact, stderr: None })
}
