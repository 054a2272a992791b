use super::{FactorSystem, Realization};
use crate::disorder::{sample_coupled_unchecked, tags, CoupledDisorder, SeedSpec};
use crate::error::{Error, Result};

/// Two systems sharing index set and bond functions, with chaos couplings
/// correlated by `t`.
///
/// Gaussian residual terms (the parts of the reference measures that are
/// random) are drawn from their own streams with correlation `residual_t`
/// between the two systems, `1` by default.
#[derive(Clone, Debug)]
pub struct CoupledPair {
    system1: FactorSystem,
    system2: FactorSystem,
    t: f64,
    residual_t: f64,
    seed: SeedSpec,
    disorder: CoupledDisorder,
    residual1: Vec<Vec<f64>>,
    residual2: Vec<Vec<f64>>,
}

fn check_compatible(a: &FactorSystem, b: &FactorSystem) -> Result<()> {
    if a.chaos() != b.chaos() {
        return Err(Error::MismatchedFamilies("chaos index families differ".into()));
    }
    if a.spins() != b.spins() {
        return Err(Error::MismatchedFamilies("spin spaces differ".into()));
    }
    if a.residual().len() != b.residual().len() {
        return Err(Error::MismatchedFamilies("residual term counts differ".into()));
    }
    for (x, y) in a.residual().iter().zip(b.residual()) {
        if x.factors != y.factors || x.is_gaussian() != y.is_gaussian() {
            return Err(Error::MismatchedFamilies(format!("residual terms {} and {} differ", x.label, y.label)));
        }
    }
    Ok(())
}

/// Couples two compatible systems with chaos correlation `t`.
pub fn couple(system1: FactorSystem, system2: FactorSystem, t: f64, seed: SeedSpec) -> Result<CoupledPair> {
    check_compatible(&system1, &system2)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("correlation t={t} outside [0,1]")));
    }
    let mut pair = CoupledPair {
        system1,
        system2,
        t,
        residual_t: 1.0,
        seed,
        disorder: CoupledDisorder::empty(t),
        residual1: vec![],
        residual2: vec![],
    };
    pair.draw()?;
    Ok(pair)
}

impl CoupledPair {
    fn draw(&mut self) -> Result<()> {
        self.disorder = sample_coupled_unchecked(self.system1.index_count(), self.t, self.seed.derive(tags::CHAOS))?;
        self.residual1.clear();
        self.residual2.clear();
        for (k, term) in self.system1.residual().iter().enumerate() {
            if term.is_gaussian() {
                let d = sample_coupled_unchecked(
                    term.factors.cardinality(),
                    self.residual_t,
                    self.seed.derive(tags::RESIDUAL + k as u64),
                )?;
                self.residual1.push(d.g1().to_vec());
                self.residual2.push(d.g2().to_vec());
            } else {
                self.residual1.push(vec![]);
                self.residual2.push(vec![]);
            }
        }
        Ok(())
    }

    /// Sets the correlation of the Gaussian residual couplings and redraws.
    pub fn with_residual_correlation(mut self, residual_t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&residual_t) {
            return Err(Error::invalid(format!("residual correlation {residual_t} outside [0,1]")));
        }
        self.residual_t = residual_t;
        self.draw()?;
        Ok(self)
    }

    /// Same structure, fresh disorder from stream `stream_id`.
    pub fn redraw(&self, stream_id: u64) -> Result<Self> {
        let mut next = self.clone();
        next.seed = self.seed.with_stream(stream_id);
        next.draw()?;
        Ok(next)
    }

    pub fn system1(&self) -> &FactorSystem {
        &self.system1
    }

    pub fn system2(&self) -> &FactorSystem {
        &self.system2
    }

    pub fn gamma1(&self) -> f64 {
        self.system1.gamma()
    }

    pub fn gamma2(&self) -> f64 {
        self.system2.gamma()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn residual_t(&self) -> f64 {
        self.residual_t
    }

    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    pub fn index_count(&self) -> usize {
        self.system1.index_count()
    }

    pub fn disorder(&self) -> &CoupledDisorder {
        &self.disorder
    }

    pub fn realizations(&self) -> (Realization, Realization) {
        (
            Realization { chaos: self.disorder.g1().to_vec(), residual: self.residual1.clone() },
            Realization { chaos: self.disorder.g2().to_vec(), residual: self.residual2.clone() },
        )
    }
}
