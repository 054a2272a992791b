use std::collections::BTreeMap;

use super::{ChaosTerm, Couplings, FactorSystem, Family, ResidualTerm, SpinSpace, VectorSpins};
use crate::disorder::SeedSpec;
use crate::error::{Error, Result};
use crate::topology::{diluted_clauses, Graph, IndexFamily};

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {x}")))
    }
}

/// Edwards–Anderson model `β Σ_{(i,j)} g_ij σ_i σ_j + h Σ_i g_i σ_i` on `graph`.
///
/// `chaos` selects which Gaussian family is the chaos term (`γ = β` for bonds,
/// `γ = h` for the field); the other family, if present, becomes a Gaussian
/// residual term.
pub fn make_ea(graph: &Graph, beta: f64, h: f64, chaos: ChaosTerm) -> Result<FactorSystem> {
    positive("beta", beta)?;
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("field strength h must be non-negative, got {h}")));
    }
    let n = graph.vertex_count();
    let bonds = IndexFamily::GraphEdges(graph.clone());
    let sites = IndexFamily::Sites { n };
    let gaussian = |label: &str, factors, strength| ResidualTerm {
        label: label.into(),
        factors,
        strength,
        couplings: Couplings::Gaussian,
    };
    match chaos {
        ChaosTerm::Bonds => {
            if graph.edge_count() == 0 {
                return Err(Error::invalid("bond chaos term needs at least one edge"));
            }
            let residual = if h > 0.0 { vec![gaussian("field", sites, h)] } else { vec![] };
            FactorSystem::new(Family::Ea, SpinSpace::Ising, bonds, beta, residual)
        }
        ChaosTerm::Field => {
            positive("h", h)?;
            let residual = if graph.edge_count() > 0 { vec![gaussian("bonds", bonds, beta)] } else { vec![] };
            FactorSystem::new(Family::Ea, SpinSpace::Ising, sites, h, residual)
        }
    }
}

/// Random field model `β Σ_{(i,j)} J σ_i σ_j + h Σ_i g_i σ_i` with a
/// deterministic coupling `J = coupling_sign` on every edge. The random field
/// is the chaos term (`γ = h`); `β = 0` gives independent spins.
pub fn make_rfim(graph: &Graph, beta: f64, h: f64, coupling_sign: f64) -> Result<FactorSystem> {
    positive("h", h)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be non-negative, got {beta}")));
    }
    let n = graph.vertex_count();
    let residual = if beta > 0.0 && graph.edge_count() > 0 {
        vec![ResidualTerm {
            label: "bonds".into(),
            factors: IndexFamily::GraphEdges(graph.clone()),
            strength: beta,
            couplings: Couplings::Fixed(vec![coupling_sign; graph.edge_count()]),
        }]
    } else {
        vec![]
    };
    FactorSystem::new(Family::Rfim, SpinSpace::Ising, IndexFamily::Sites { n }, h, residual)
}

/// Mixed p-spin model with finitely many terms `β_p / N^{(p−1)/2} Σ g σ_{i_1}⋯σ_{i_p}`.
///
/// The `chaos_p` term is the chaos term; every other `p` with `β_p > 0`
/// becomes a Gaussian residual term with its own couplings.
pub fn make_mixed_pspin(n: usize, betas: &BTreeMap<usize, f64>, chaos_p: usize) -> Result<FactorSystem> {
    if n == 0 {
        return Err(Error::invalid("mixed p-spin needs N >= 1"));
    }
    for (&p, &b) in betas {
        if p == 0 || !(b >= 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("invalid mixture entry p={p}, beta={b}")));
        }
    }
    let beta = *betas
        .get(&chaos_p)
        .filter(|b| **b > 0.0)
        .ok_or_else(|| Error::invalid(format!("chaos_p={chaos_p} has no positive beta in the mixture")))?;
    let norm = |p: usize| (n as f64).powf((p as f64 - 1.0) / 2.0);
    let mut residual = Vec::new();
    for (&p, &b) in betas {
        if p != chaos_p && b > 0.0 {
            residual.push(ResidualTerm {
                label: format!("p={p}"),
                factors: IndexFamily::p_tuples(n, p)?,
                strength: b / norm(p),
                couplings: Couplings::Gaussian,
            });
        }
    }
    FactorSystem::new(
        Family::MixedPspin,
        SpinSpace::Ising,
        IndexFamily::p_tuples(n, chaos_p)?,
        beta / norm(chaos_p),
        residual,
    )
}

/// SK model with spins in a finite `S ⊂ R^d`: factors `(σ_i, σ_j)` over all
/// `N²` ordered pairs, `γ = β/√N`, reference measure `ν^N`.
pub fn make_vector_sk(n: usize, points: Vec<Vec<f64>>, nu: Option<Vec<f64>>, beta: f64) -> Result<FactorSystem> {
    positive("beta", beta)?;
    if n == 0 {
        return Err(Error::invalid("vector SK needs N >= 1"));
    }
    let spins = VectorSpins::new(points, nu)?;
    FactorSystem::new(
        Family::VectorSk,
        SpinSpace::Vector(spins),
        IndexFamily::p_tuples(n, 2)?,
        beta / (n as f64).sqrt(),
        vec![],
    )
}

/// Diluted p-spin model over a freshly drawn clause family, `γ = β`.
pub fn make_diluted(n: usize, lambda: f64, p: usize, beta: f64, seed: SeedSpec) -> Result<FactorSystem> {
    positive("beta", beta)?;
    let clauses = diluted_clauses(n, lambda, p, seed)?;
    FactorSystem::new(Family::Diluted, SpinSpace::Ising, clauses, beta, vec![])
}
