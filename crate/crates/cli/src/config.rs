//! Run configuration (TOML).
//!
//! ```toml
//! master_seed = 42
//!
//! [[experiments]]
//! name = "ea-2x2"
//! theorem = "thm2_1"
//! n_disorder = 1000
//! engine = "exact"                 # or { mcmc = { sweeps = 20000, burn_in = 2000 } }
//! model = { family = "ea", graph = { dims = [2, 2] } }
//!
//! [experiments.sweep]
//! strength1 = [1.0]
//! t = [0.0, 0.5, 0.9]
//! ```

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use chaoslab_core::gibbs::Engine;
use chaoslab_core::harness::{ModelParams, PointParams, TheoremId, WeightSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
}

fn default_engine() -> Engine {
    Engine::Exact
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    #[serde(default)]
    pub name: Option<String>,
    pub theorem: TheoremId,
    pub n_disorder: usize,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    /// Fixed seed for this experiment; derived from `master_seed` otherwise.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub model: Option<ModelParams>,
    /// Several models (e.g. a size sweep); exclusive with `model`.
    #[serde(default)]
    pub models: Option<Vec<ModelParams>>,
    pub sweep: Sweep,
}

/// Grids whose Cartesian product gives the points of an experiment, nested
/// in the order model, strength1, strength2, t, k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub strength1: Vec<f64>,
    #[serde(default)]
    pub strength2: Option<Vec<f64>>,
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default)]
    pub k: Option<Vec<usize>>,
    #[serde(default)]
    pub weights: WeightSpec,
    #[serde(default)]
    pub c_k: Option<f64>,
    #[serde(default)]
    pub ck_draws: Option<usize>,
    #[serde(default)]
    pub ck_halfwidth: Option<f64>,
    #[serde(default)]
    pub residual_t: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow::anyhow!("config parse error: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let text = std::str::from_utf8(&bytes).context("config is not UTF-8")?;
        let cfg = Self::parse(text).with_context(|| format!("in {}", path.display()))?;
        Ok((cfg, bytes))
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.experiments.iter().enumerate() {
            e.validate().with_context(|| format!("experiments[{i}]"))?;
        }
        Ok(())
    }
}

fn non_empty<T>(key: &str, grid: &Option<Vec<T>>) -> Result<()> {
    if matches!(grid, Some(g) if g.is_empty()) {
        bail!("sweep.{key}: grid is empty");
    }
    Ok(())
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        match (&self.model, &self.models) {
            (Some(_), None) => {}
            (None, Some(m)) if !m.is_empty() => {}
            (None, Some(_)) => bail!("models: list is empty"),
            _ => bail!("give exactly one of `model` or `models`"),
        }
        if self.sweep.strength1.is_empty() {
            bail!("sweep.strength1: grid is empty");
        }
        non_empty("strength2", &self.sweep.strength2)?;
        non_empty("t", &self.sweep.t)?;
        non_empty("k", &self.sweep.k)?;
        if self.n_disorder == 0 {
            bail!("n_disorder: must be positive");
        }
        if let Engine::Mcmc(cfg) = &self.engine {
            cfg.validate().context("engine.mcmc")?;
        }
        Ok(())
    }

    pub fn model_list(&self) -> Vec<ModelParams> {
        match (&self.model, &self.models) {
            (Some(m), _) => vec![m.clone()],
            (None, Some(ms)) => ms.clone(),
            (None, None) => vec![],
        }
    }

    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("exp{index:02}"))
    }

    /// All `(model, point)` pairs in run order.
    pub fn points(&self) -> Vec<(ModelParams, PointParams)> {
        let s = &self.sweep;
        let strength2: Vec<Option<f64>> = match &s.strength2 {
            Some(g) => g.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let ts: Vec<Option<f64>> = match &s.t {
            Some(g) => g.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let ks: Vec<Option<usize>> = match &s.k {
            Some(g) => g.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let mut out = Vec::new();
        for model in self.model_list() {
            for &s1 in &s.strength1 {
                for &s2 in &strength2 {
                    for &t in &ts {
                        for &k in &ks {
                            let mut p = PointParams::new(s1);
                            p.strength2 = s2;
                            p.t = t;
                            p.k = k;
                            p.weights = s.weights.clone();
                            p.c_k = s.c_k;
                            if let Some(d) = s.ck_draws {
                                p.ck_draws = d;
                            }
                            if let Some(w) = s.ck_halfwidth {
                                p.ck_halfwidth = w;
                            }
                            p.residual_t = s.residual_t;
                            out.push((model.clone(), p));
                        }
                    }
                }
            }
        }
        out
    }
}
