//! Gibbs moments `⟨f_e⟩`, `⟨f_e f_e'⟩` of the chaos factors for one disorder
//! realization, by exact enumeration or single-site Metropolis.

mod exact;
mod mcmc;

pub use exact::{config_from_index, exact_distribution, exact_moments, EXACT_CAPACITY};
pub use mcmc::{mcmc_moments, McmcConfig, MetropolisChain, BATCHES};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::disorder::SeedSpec;
use crate::error::{Error, Result};
use crate::models::{FactorSystem, Realization};

/// Full `|E|²` tables are only built up to this many factors.
pub const MAX_DENSE_FACTORS: usize = 512;

/// Which second moments to compute.
#[derive(Clone, Debug, PartialEq)]
pub enum Wanted {
    FirstOnly,
    Full,
    Pairs(Vec<(usize, usize)>),
}

impl Wanted {
    pub(crate) fn layout(&self, n: usize) -> Result<SecondMoments> {
        match self {
            Wanted::FirstOnly => Ok(SecondMoments::None),
            Wanted::Full => {
                if n > MAX_DENSE_FACTORS {
                    return Err(Error::invalid(format!(
                        "full second-moment table requested for {n} > {MAX_DENSE_FACTORS} factors"
                    )));
                }
                Ok(SecondMoments::Dense { n, values: vec![0.0; n * n] })
            }
            Wanted::Pairs(pairs) => {
                let mut map = BTreeMap::new();
                for &(a, b) in pairs {
                    if a >= n || b >= n {
                        return Err(Error::invalid(format!("pair ({a}, {b}) out of range for {n} factors")));
                    }
                    map.insert((a.min(b), a.max(b)), 0.0);
                }
                Ok(SecondMoments::Sparse(map))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SecondMoments {
    None,
    /// Row-major symmetric `n × n` table.
    Dense { n: usize, values: Vec<f64> },
    /// Keys normalised to `(min, max)`.
    Sparse(BTreeMap<(usize, usize), f64>),
}

impl SecondMoments {
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        match self {
            SecondMoments::None => None,
            SecondMoments::Dense { n, values } => (a < *n && b < *n).then(|| values[a * n + b]),
            SecondMoments::Sparse(map) => map.get(&(a.min(b), a.max(b))).copied(),
        }
    }

    /// Iterates `((a, b), value)` over stored entries with `a <= b`.
    pub fn entries(&self) -> Vec<((usize, usize), f64)> {
        match self {
            SecondMoments::None => vec![],
            SecondMoments::Dense { n, values } => {
                let mut out = Vec::with_capacity(n * (n + 1) / 2);
                for a in 0..*n {
                    for b in a..*n {
                        out.push(((a, b), values[a * n + b]));
                    }
                }
                out
            }
            SecondMoments::Sparse(map) => map.iter().map(|(k, v)| (*k, *v)).collect(),
        }
    }

    pub(crate) fn dense(&self) -> Option<(usize, &[f64])> {
        match self {
            SecondMoments::Dense { n, values } => Some((*n, values)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Mcmc,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Mcmc => "mcmc",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentErrors {
    pub first: Vec<f64>,
    pub second: SecondMoments,
}

/// Gibbs moments of the chaos factors for one realization.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    pub first: Vec<f64>,
    pub second: SecondMoments,
    /// `log Z` (exact engine only).
    pub log_partition: Option<f64>,
    pub method: Method,
    pub stderr: Option<MomentErrors>,
}

impl MomentTable {
    pub fn index_count(&self) -> usize {
        self.first.len()
    }

    pub fn second(&self, a: usize, b: usize) -> Option<f64> {
        self.second.get(a, b)
    }

    /// `⟨f_a f_b⟩ − ⟨f_a⟩⟨f_b⟩`.
    pub fn covariance(&self, a: usize, b: usize) -> Option<f64> {
        self.second(a, b).map(|m| m - self.first[a] * self.first[b])
    }

    pub(crate) fn require_dense(&self) -> Result<(usize, &[f64])> {
        self.second
            .dense()
            .ok_or_else(|| Error::invalid("a full second-moment table is required"))
    }
}

/// Moment engine selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    Mcmc(McmcConfig),
}

impl Engine {
    pub fn method(&self) -> Method {
        match self {
            Engine::Exact => Method::Exact,
            Engine::Mcmc(_) => Method::Mcmc,
        }
    }

    pub fn label(&self) -> &'static str {
        self.method().as_str()
    }

    /// `seed` only matters for MCMC.
    pub fn moments(
        &self,
        system: &FactorSystem,
        realization: &Realization,
        wanted: &Wanted,
        seed: SeedSpec,
    ) -> Result<MomentTable> {
        match self {
            Engine::Exact => exact_moments(system, realization, wanted),
            Engine::Mcmc(cfg) => mcmc_moments(system, realization, wanted, cfg, seed),
        }
    }
}
