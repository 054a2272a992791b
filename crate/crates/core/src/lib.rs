//! Spin-glass models with coupled Gaussian disorder, exact and Monte Carlo
//! Gibbs moments, and the quenched variance observables needed to check
//! disorder-chaos and self-averaging inequalities at finite size.
//!
//! The crate is organised bottom-up:
//!
//! * [`disorder`] draws correlated Gaussian couplings, evaluates
//!   (probabilists') Hermite polynomials and Gauss–Hermite quadrature, and
//!   hands out reproducible random streams.
//! * [`topology`] builds the index sets (graph edges, p-tuples, diluted
//!   clauses, sites) that factors are attached to.
//! * [`models`] turns index sets into factor systems
//!   `log G(σ) = γ Σ_e g_e f_e(σ) + log μ(σ) − log Z` and couples two of them.
//! * [`gibbs`] computes Gibbs moments per disorder realization.
//! * [`observables`] assembles overlaps, magnetizations and random-field
//!   variances averaged over disorder.
//! * [`harness`] evaluates the right-hand sides of the bounds and produces
//!   [`harness::BoundReport`]s.

pub mod disorder;
pub mod error;
pub mod gibbs;
pub mod harness;
pub mod models;
pub mod observables;
pub mod stats;
pub mod topology;

pub use disorder::{sample_coupled, CoupledDisorder, GaussHermite, SeedSpec};
pub use error::{Error, Result};
pub use gibbs::{exact_moments, mcmc_moments, Engine, McmcConfig, MomentTable, Wanted};
pub use harness::{run_theorem, BoundReport, ModelParams, PointParams, TheoremId, Verdict};
pub use models::{couple, CoupledPair, Family, FactorSystem, Realization, SpinConfiguration};
pub use observables::{QuenchedVariance, WeightVector};
pub use topology::{Graph, IndexFamily};
