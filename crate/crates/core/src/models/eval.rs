//! Flattened factor tables shared by the exact and MCMC engines.

use super::{Couplings, FactorSystem, Realization, SpinSpace};
use crate::error::Result;
use crate::topology::IndexFamily;

pub(crate) fn factor_value(spins: &SpinSpace, sites: &[usize], states: &[u8]) -> f64 {
    match spins {
        SpinSpace::Ising => {
            let downs = sites.iter().filter(|&&s| states[s] == 0).count();
            if downs % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        SpinSpace::Vector(v) => v.gram()[states[sites[0]] as usize * v.len() + states[sites[1]] as usize],
    }
}

#[derive(Clone, Debug)]
pub(crate) struct FactorTable {
    offsets: Vec<usize>,
    sites: Vec<usize>,
}

impl FactorTable {
    pub(crate) fn new(family: &IndexFamily) -> Self {
        let mut offsets = Vec::with_capacity(family.cardinality() + 1);
        let mut sites = Vec::new();
        let mut buf = Vec::new();
        offsets.push(0);
        for e in 0..family.cardinality() {
            family.factor_sites(e, &mut buf);
            sites.extend_from_slice(&buf);
            offsets.push(sites.len());
        }
        FactorTable { offsets, sites }
    }

    pub(crate) fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub(crate) fn sites(&self, e: usize) -> &[usize] {
        &self.sites[self.offsets[e]..self.offsets[e + 1]]
    }
}

/// A system bound to one realization, ready for repeated evaluation.
pub(crate) struct Evaluator<'a> {
    pub(crate) spins: &'a SpinSpace,
    pub(crate) site_count: usize,
    /// Term 0 is the chaos family; the rest are residual terms.
    pub(crate) terms: Vec<(FactorTable, Vec<f64>)>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(system: &'a FactorSystem, realization: &Realization) -> Result<Self> {
        system.check_realization(realization)?;
        let mut terms = Vec::with_capacity(1 + system.residual().len());
        let chaos_coeff = realization.chaos.iter().map(|g| system.gamma() * g).collect();
        terms.push((FactorTable::new(system.chaos()), chaos_coeff));
        for (t, term) in system.residual().iter().enumerate() {
            let coeff = match &term.couplings {
                Couplings::Fixed(c) => c.iter().map(|c| term.strength * c).collect(),
                Couplings::Gaussian => realization.residual[t].iter().map(|c| term.strength * c).collect(),
            };
            terms.push((FactorTable::new(&term.factors), coeff));
        }
        Ok(Evaluator { spins: system.spins(), site_count: system.site_count(), terms })
    }

    pub(crate) fn chaos_len(&self) -> usize {
        self.terms[0].0.len()
    }

    pub(crate) fn log_nu(&self, state: u8) -> f64 {
        match self.spins {
            SpinSpace::Ising => 0.0,
            SpinSpace::Vector(v) => v.log_weights()[state as usize],
        }
    }

    pub(crate) fn log_weight(&self, states: &[u8]) -> f64 {
        let mut acc = 0.0;
        for (table, coeff) in &self.terms {
            for (e, c) in coeff.iter().enumerate() {
                acc += c * factor_value(self.spins, table.sites(e), states);
            }
        }
        if let SpinSpace::Vector(_) = self.spins {
            acc += states.iter().map(|&s| self.log_nu(s)).sum::<f64>();
        }
        acc
    }

    pub(crate) fn chaos_values(&self, states: &[u8], out: &mut [f64]) {
        let table = &self.terms[0].0;
        for (e, slot) in out.iter_mut().enumerate() {
            *slot = factor_value(self.spins, table.sites(e), states);
        }
    }

    /// For each site, the `(term, factor)` pairs touching it (each once).
    pub(crate) fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.site_count];
        for (t, (table, _)) in self.terms.iter().enumerate() {
            for e in 0..table.len() {
                let sites = table.sites(e);
                for (pos, &s) in sites.iter().enumerate() {
                    if !sites[..pos].contains(&s) {
                        inc[s].push((t, e));
                    }
                }
            }
        }
        inc
    }

    /// Sum of the factor contributions touching one site.
    pub(crate) fn local_energy(&self, incident: &[(usize, usize)], states: &[u8]) -> f64 {
        incident
            .iter()
            .map(|&(t, e)| {
                let (table, coeff) = &self.terms[t];
                coeff[e] * factor_value(self.spins, table.sites(e), states)
            })
            .sum()
    }
}
