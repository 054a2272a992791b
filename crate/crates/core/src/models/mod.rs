//! Factor systems `Y(σ) = Σ_e g_e f_e(σ)` with a reference measure, and
//! constructors for the model families.
//!
//! A system's Gibbs weight is
//!
//! ```text
//! log w(σ) = γ Σ_e g_e f_e(σ)                       (chaos term)
//!          + Σ_terms s_t Σ_k c_{t,k} φ_{t,k}(σ)     (residual Hamiltonian H′)
//!          + Σ_i log ν(σ_i)                         (vector spins only)
//! ```
//!
//! The residual terms and `ν` make up the reference measure `μ`; their random
//! couplings are drawn from streams independent of the chaos Gaussians.

mod eval;
mod families;
mod pair;

pub use families::{make_diluted, make_ea, make_mixed_pspin, make_rfim, make_vector_sk};
pub use pair::{couple, CoupledPair};

pub(crate) use eval::Evaluator;

use serde::{Deserialize, Serialize};

use crate::disorder::{sample_gaussians, tags, SeedSpec};
use crate::error::{Error, Result};
use crate::topology::IndexFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ea,
    Rfim,
    MixedPspin,
    VectorSk,
    Diluted,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ea => "ea",
            Family::Rfim => "rfim",
            Family::MixedPspin => "mixed_pspin",
            Family::VectorSk => "vector_sk",
            Family::Diluted => "diluted",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which Gaussian family of an EA model with external field carries the
/// chaos analysis; the other one is folded into the reference measure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChaosTerm {
    #[default]
    Bonds,
    Field,
}

/// Finite single-site spin set `S ⊂ R^d` with product reference weights `ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSpins {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    scale: f64,
    gram: Vec<f64>,
}

impl VectorSpins {
    /// Validates `S` and `ν`; if some `|(a, b)| > 1` the points are multiplied
    /// by `1/√max|(a, b)|` and the factor is kept in [`VectorSpins::scale`].
    pub fn new(points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("spin set S is empty"));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid("points of S must share a positive dimension and be finite"));
        }
        let q = points.len();
        let weights = weights.unwrap_or_else(|| vec![1.0 / q as f64; q]);
        if weights.len() != q || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("nu must give a non-negative weight to every point of S"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("nu is not normalized (sums to {total})")));
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let max_dot = points
            .iter()
            .flat_map(|a| points.iter().map(move |b| dot(a, b).abs()))
            .fold(0.0f64, f64::max);
        let scale = if max_dot > 1.0 { 1.0 / max_dot.sqrt() } else { 1.0 };
        let points: Vec<Vec<f64>> = points.into_iter().map(|p| p.into_iter().map(|x| x * scale).collect()).collect();
        let mut gram = vec![0.0; q * q];
        for a in 0..q {
            for b in 0..q {
                gram[a * q + b] = dot(&points[a], &points[b]).clamp(-1.0, 1.0);
            }
        }
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(VectorSpins { points, weights, log_weights, scale, gram })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Scalar product of points `a` and `b` after rescaling.
    pub fn dot(&self, a: usize, b: usize) -> f64 {
        self.gram[a * self.points.len() + b]
    }

    pub(crate) fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub(crate) fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpinSpace {
    Ising,
    Vector(VectorSpins),
}

impl SpinSpace {
    pub fn state_count(&self) -> usize {
        match self {
            SpinSpace::Ising => 2,
            SpinSpace::Vector(v) => v.len(),
        }
    }
}

/// Couplings of one residual term.
#[derive(Clone, Debug, PartialEq)]
pub enum Couplings {
    /// Deterministic per-factor couplings (e.g. ferromagnetic `+1`).
    Fixed(Vec<f64>),
    /// Fresh i.i.d. standard Gaussians per disorder realization.
    Gaussian,
}

/// One term `strength · Σ_k c_k φ_k(σ)` of the residual Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualTerm {
    pub label: String,
    pub factors: IndexFamily,
    pub strength: f64,
    pub couplings: Couplings,
}

impl ResidualTerm {
    pub fn is_gaussian(&self) -> bool {
        matches!(self.couplings, Couplings::Gaussian)
    }
}

/// One configuration `σ`; entries are state labels (`0 ↦ −1`, `1 ↦ +1` for
/// Ising spins, an index into `S` for vector spins).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    states: Vec<u8>,
}

impl SpinConfiguration {
    pub fn from_states(states: Vec<u8>) -> Self {
        SpinConfiguration { states }
    }

    /// From `±1` spins.
    pub fn ising(spins: &[i8]) -> Self {
        assert!(spins.iter().all(|s| *s == 1 || *s == -1), "Ising spins must be ±1");
        SpinConfiguration { states: spins.iter().map(|&s| u8::from(s > 0)).collect() }
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `±1` value of an Ising site.
    pub fn spin(&self, i: usize) -> f64 {
        if self.states[i] == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Random couplings for one system: the chaos Gaussians `g_e` and, per
/// residual term, its Gaussian couplings (empty for fixed terms).
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub chaos: Vec<f64>,
    pub residual: Vec<Vec<f64>>,
}

impl Realization {
    /// Realization of a system with no Gaussian residual terms.
    pub fn chaos_only(chaos: Vec<f64>) -> Self {
        Realization { chaos, residual: Vec::new() }
    }
}

/// A factor system: index set, bond functions `f_e: Σ → [−1, 1]`, coupling
/// strength `γ` and reference measure.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSystem {
    family: Family,
    site_count: usize,
    spins: SpinSpace,
    chaos: IndexFamily,
    gamma: f64,
    residual: Vec<ResidualTerm>,
}

impl FactorSystem {
    pub fn new(
        family: Family,
        spins: SpinSpace,
        chaos: IndexFamily,
        gamma: f64,
        residual: Vec<ResidualTerm>,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be positive and finite, got {gamma}")));
        }
        let site_count = chaos.site_count();
        let vector = matches!(spins, SpinSpace::Vector(_));
        let mut sites = Vec::new();
        let families = std::iter::once(&chaos).chain(residual.iter().map(|r| &r.factors));
        for fam in families {
            if fam.site_count() != site_count {
                return Err(Error::invalid("all factor families must live on the same sites"));
            }
            if vector {
                for e in 0..fam.cardinality() {
                    fam.factor_sites(e, &mut sites);
                    if sites.len() != 2 {
                        return Err(Error::invalid("vector-spin factors must be pairwise scalar products"));
                    }
                }
            }
        }
        for term in &residual {
            if !term.strength.is_finite() {
                return Err(Error::invalid(format!("residual term {} has non-finite strength", term.label)));
            }
            if let Couplings::Fixed(c) = &term.couplings {
                if c.len() != term.factors.cardinality() {
                    return Err(Error::invalid(format!("residual term {}: coupling count mismatch", term.label)));
                }
            }
        }
        Ok(FactorSystem { family, site_count, spins, chaos, gamma, residual })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn index_count(&self) -> usize {
        self.chaos.cardinality()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn spins(&self) -> &SpinSpace {
        &self.spins
    }

    pub fn chaos(&self) -> &IndexFamily {
        &self.chaos
    }

    pub fn residual(&self) -> &[ResidualTerm] {
        &self.residual
    }

    /// Whether the chaos factors are the single-site spins `f_i(σ) = σ_i`.
    pub fn has_site_chaos(&self) -> bool {
        matches!(self.chaos, IndexFamily::Sites { .. }) && matches!(self.spins, SpinSpace::Ising)
    }

    /// `|S|^N`, the size of the configuration space.
    pub fn configuration_count(&self) -> f64 {
        (self.spins.state_count() as f64).powi(self.site_count as i32)
    }

    fn factor_value(&self, family: &IndexFamily, e: usize, states: &[u8]) -> f64 {
        let mut sites = Vec::new();
        family.factor_sites(e, &mut sites);
        eval::factor_value(&self.spins, &sites, states)
    }

    /// `f_e(σ)` for the chaos family.
    pub fn bond_eval(&self, e: usize, config: &SpinConfiguration) -> f64 {
        self.factor_value(&self.chaos, e, config.states())
    }

    /// `Y(σ) = Σ_e g_e f_e(σ)`.
    pub fn hamiltonian(&self, config: &SpinConfiguration, chaos: &[f64]) -> f64 {
        (0..self.index_count()).map(|e| chaos[e] * self.bond_eval(e, config)).sum()
    }

    /// `log μ(σ)`: residual Hamiltonian plus single-site `log ν`.
    pub fn log_reference(&self, config: &SpinConfiguration, realization: &Realization) -> f64 {
        let mut acc = 0.0;
        for (t, term) in self.residual.iter().enumerate() {
            for k in 0..term.factors.cardinality() {
                let c = match &term.couplings {
                    Couplings::Fixed(c) => c[k],
                    Couplings::Gaussian => realization.residual[t][k],
                };
                acc += term.strength * c * self.factor_value(&term.factors, k, config.states());
            }
        }
        if let SpinSpace::Vector(v) = &self.spins {
            acc += config.states().iter().map(|&s| v.log_weights()[s as usize]).sum::<f64>();
        }
        acc
    }

    /// Unnormalised log Gibbs weight `γ Y(σ) + log μ(σ)`.
    pub fn log_weight(&self, config: &SpinConfiguration, realization: &Realization) -> f64 {
        self.gamma * self.hamiltonian(config, &realization.chaos) + self.log_reference(config, realization)
    }

    pub fn check_realization(&self, realization: &Realization) -> Result<()> {
        if realization.chaos.len() != self.index_count() {
            return Err(Error::invalid(format!(
                "realization has {} chaos couplings, system has {} factors",
                realization.chaos.len(),
                self.index_count()
            )));
        }
        let gaussian_terms = self.residual.iter().filter(|t| t.is_gaussian()).count();
        if gaussian_terms == 0 && realization.residual.is_empty() {
            return Ok(());
        }
        if realization.residual.len() != self.residual.len() {
            return Err(Error::invalid("realization residual terms do not match the system"));
        }
        for (term, draws) in self.residual.iter().zip(&realization.residual) {
            let want = if term.is_gaussian() { term.factors.cardinality() } else { 0 };
            if draws.len() != want {
                return Err(Error::invalid(format!("residual term {}: expected {want} couplings", term.label)));
            }
        }
        Ok(())
    }

    /// Independent standard Gaussians for the chaos term and every Gaussian
    /// residual term, each from its own derived stream.
    pub fn sample_realization(&self, seed: SeedSpec) -> Realization {
        let chaos = sample_gaussians(self.index_count(), seed.derive(tags::CHAOS));
        let residual = self
            .residual
            .iter()
            .enumerate()
            .map(|(t, term)| {
                if term.is_gaussian() {
                    sample_gaussians(term.factors.cardinality(), seed.derive(tags::RESIDUAL + t as u64))
                } else {
                    Vec::new()
                }
            })
            .collect();
        Realization { chaos, residual }
    }
}

#[cfg(test)]
mod tests;
