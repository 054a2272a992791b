//! Correlated Gaussian disorder, Hermite polynomials and reproducible streams.

mod hermite;
mod quadrature;
mod seed;

pub use hermite::{
    hermite_all, hermite_derivative, hermite_eval, hermite_ibp_residual, hermite_ibp_residual_with,
    hermite_second_moment, IbpResidual, MAX_HERMITE_DEGREE,
};
pub use quadrature::GaussHermite;
pub use seed::{splitmix64, tags, SeedSpec};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Pairs `(g1[e], g2[e])` of standard Gaussians with `E g1[e] g2[e] = t`,
/// independent across `e`, built from a latent triple:
///
/// ```text
/// g1 = √t·z + √(1−t)·z1
/// g2 = √t·z + √(1−t)·z2
/// ```
///
/// The latent draws are kept so that quantities like `Σ_e z1[e] f_e(ρ)` can be
/// evaluated for the same realization.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledDisorder {
    t: f64,
    g1: Vec<f64>,
    g2: Vec<f64>,
    z: Vec<f64>,
    z1: Vec<f64>,
    z2: Vec<f64>,
}

impl CoupledDisorder {
    /// Builds the pair from explicit latent draws.
    pub fn from_latent(t: f64, z: Vec<f64>, z1: Vec<f64>, z2: Vec<f64>) -> Result<Self> {
        check_correlation(t)?;
        if z.len() != z1.len() || z.len() != z2.len() {
            return Err(Error::invalid("latent sequences must have equal length"));
        }
        let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
        let g1 = z.iter().zip(&z1).map(|(z, z1)| a * z + b * z1).collect();
        let g2 = z.iter().zip(&z2).map(|(z, z2)| a * z + b * z2).collect();
        Ok(CoupledDisorder { t, g1, g2, z, z1, z2 })
    }

    pub(crate) fn empty(t: f64) -> Self {
        CoupledDisorder { t, g1: vec![], g2: vec![], z: vec![], z1: vec![], z2: vec![] }
    }

    pub fn index_count(&self) -> usize {
        self.g1.len()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn g1(&self) -> &[f64] {
        &self.g1
    }

    pub fn g2(&self) -> &[f64] {
        &self.g2
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn z1(&self) -> &[f64] {
        &self.z1
    }

    pub fn z2(&self) -> &[f64] {
        &self.z2
    }
}

fn check_correlation(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("correlation t={t} outside [0,1]")));
    }
    Ok(())
}

/// Draws `index_count` i.i.d. standard Gaussians from the stream.
pub fn sample_gaussians(index_count: usize, seed: SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..index_count).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Samples coupled Gaussian disorder with cross-correlation `t`.
///
/// The three latent sequences come from separate derived streams, so at
/// `t = 0` the couplings are exactly the `z1`/`z2` streams and at `t = 1`
/// both equal `z`.
pub fn sample_coupled(index_count: usize, t: f64, seed: SeedSpec) -> Result<CoupledDisorder> {
    if index_count == 0 {
        return Err(Error::invalid("index_count must be positive"));
    }
    check_correlation(t)?;
    sample_coupled_unchecked(index_count, t, seed)
}

pub(crate) fn sample_coupled_unchecked(index_count: usize, t: f64, seed: SeedSpec) -> Result<CoupledDisorder> {
    if index_count == 0 {
        return Ok(CoupledDisorder::empty(t));
    }
    let z = sample_gaussians(index_count, seed.derive(tags::LATENT_Z));
    let z1 = sample_gaussians(index_count, seed.derive(tags::LATENT_Z1));
    let z2 = sample_gaussians(index_count, seed.derive(tags::LATENT_Z2));
    CoupledDisorder::from_latent(t, z, z1, z2)
}
