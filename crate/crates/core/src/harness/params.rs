use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::disorder::SeedSpec;
use crate::error::{Error, Result};
use crate::models::{
    make_diluted, make_ea, make_mixed_pspin, make_rfim, make_vector_sk, ChaosTerm, FactorSystem, Family,
};
use crate::observables::WeightVector;
use crate::topology::{complete_graph, lattice_graph, Graph};

/// Graph description: exactly one of `dims`, `complete`, `edges` or
/// `edge_list_file`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default)]
    pub periodic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<usize>,
    /// Vertex count for an inline `edges` list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_list_file: Option<PathBuf>,
}

impl GraphSpec {
    pub fn lattice(dims: &[usize]) -> Self {
        GraphSpec { dims: Some(dims.to_vec()), ..Default::default() }
    }

    pub fn edges(vertices: usize, edges: &[(usize, usize)]) -> Self {
        GraphSpec { vertices: Some(vertices), edges: Some(edges.to_vec()), ..Default::default() }
    }

    pub fn build(&self) -> Result<Graph> {
        let given = [self.dims.is_some(), self.complete.is_some(), self.edges.is_some(), self.edge_list_file.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if given != 1 {
            return Err(Error::InvalidGraph(
                "give exactly one of dims, complete, edges or edge_list_file".into(),
            ));
        }
        if let Some(d) = &self.dims {
            return lattice_graph(d, self.periodic);
        }
        if let Some(n) = self.complete {
            return complete_graph(n);
        }
        if let Some(e) = &self.edges {
            let n = self.vertices.ok_or_else(|| Error::InvalidGraph("inline edges need `vertices`".into()))?;
            return Graph::new(n, e.iter().copied());
        }
        let path = self.edge_list_file.as_ref().expect("checked above");
        Graph::from_edge_list(&std::fs::read_to_string(path)?)
    }
}

fn one() -> f64 {
    1.0
}

/// Model family and the parameters that do not vary along a sweep. The
/// chaos-term strength comes from [`PointParams`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelParams {
    /// Edwards–Anderson. With `chaos = "bonds"` the strength is `β` and `h`
    /// is the Gaussian field; with `chaos = "field"` the strength is `h` and
    /// `beta` the bond temperature.
    Ea {
        graph: GraphSpec,
        #[serde(default)]
        beta: f64,
        #[serde(default)]
        h: f64,
        #[serde(default)]
        chaos: ChaosTerm,
    },
    /// Random field Ising model; the strength is the field `h`.
    Rfim {
        graph: GraphSpec,
        beta: f64,
        #[serde(default = "one")]
        sign: f64,
    },
    /// Mixed p-spin on `n` spins; `betas` maps `p` to `β_p` for the other
    /// mixture terms, the strength is `β_p` of the chaos term `p`.
    MixedPspin {
        n: usize,
        p: usize,
        #[serde(default)]
        betas: BTreeMap<String, f64>,
    },
    /// Vector-spin SK; the strength is `β`.
    VectorSk {
        n: usize,
        points: Vec<Vec<f64>>,
        #[serde(default)]
        nu: Option<Vec<f64>>,
    },
    /// Diluted p-spin with `Poisson(λN)` clauses; the strength is `β`.
    Diluted { n: usize, lambda: f64, p: usize },
}

impl ModelParams {
    pub fn family(&self) -> Family {
        match self {
            ModelParams::Ea { .. } => Family::Ea,
            ModelParams::Rfim { .. } => Family::Rfim,
            ModelParams::MixedPspin { .. } => Family::MixedPspin,
            ModelParams::VectorSk { .. } => Family::VectorSk,
            ModelParams::Diluted { .. } => Family::Diluted,
        }
    }

    /// `N`, the number of sites.
    pub fn site_count(&self) -> Result<usize> {
        match self {
            ModelParams::Ea { graph, .. } | ModelParams::Rfim { graph, .. } => Ok(graph.build()?.vertex_count()),
            ModelParams::MixedPspin { n, .. } | ModelParams::VectorSk { n, .. } | ModelParams::Diluted { n, .. } => {
                Ok(*n)
            }
        }
    }

    pub(crate) fn mixture(&self) -> Result<BTreeMap<usize, f64>> {
        let ModelParams::MixedPspin { betas, .. } = self else {
            return Ok(BTreeMap::new());
        };
        betas
            .iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<usize>()
                    .map(|p| (p, *v))
                    .map_err(|_| Error::invalid(format!("mixture key {k:?} is not an integer p")))
            })
            .collect()
    }

    /// Builds the system whose chaos term has model-unit strength `strength`.
    /// `seed` is only used for random structure (diluted clauses).
    pub fn build(&self, strength: f64, seed: SeedSpec) -> Result<FactorSystem> {
        match self {
            ModelParams::Ea { graph, beta, h, chaos } => {
                let g = graph.build()?;
                match chaos {
                    ChaosTerm::Bonds => make_ea(&g, strength, *h, ChaosTerm::Bonds),
                    ChaosTerm::Field => make_ea(&g, *beta, strength, ChaosTerm::Field),
                }
            }
            ModelParams::Rfim { graph, beta, sign } => make_rfim(&graph.build()?, *beta, strength, *sign),
            ModelParams::MixedPspin { n, p, .. } => {
                let mut mix = self.mixture()?;
                mix.insert(*p, strength);
                make_mixed_pspin(*n, &mix, *p)
            }
            ModelParams::VectorSk { n, points, nu } => make_vector_sk(*n, points.clone(), nu.clone(), strength),
            ModelParams::Diluted { n, lambda, p } => make_diluted(*n, *lambda, *p, strength, seed),
        }
    }
}

/// Coefficients `a` of a weighted magnetization or random field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    /// `a_e = 1/|E|`
    #[default]
    Uniform,
    Ones,
    /// Random signs and magnitudes, scaled by `1/|E|`, drawn from the run seed.
    RandomSigned,
    Explicit(Vec<f64>),
}

impl WeightSpec {
    pub fn resolve(&self, n: usize, seed: SeedSpec) -> Result<WeightVector> {
        match self {
            WeightSpec::Uniform => Ok(WeightVector::uniform(n)),
            WeightSpec::Ones => Ok(WeightVector::ones(n)),
            WeightSpec::RandomSigned => Ok(WeightVector::random_signed(n, seed)),
            WeightSpec::Explicit(a) => {
                if a.len() != n {
                    return Err(Error::invalid(format!("{} explicit weights for {n} factors", a.len())));
                }
                WeightVector::new(a.clone())
            }
        }
    }
}

fn default_ck_draws() -> usize {
    8
}

fn default_ck_halfwidth() -> f64 {
    3.0
}

/// One point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointParams {
    /// Chaos-term strength of the first (or only) system, in model units.
    pub strength1: f64,
    /// Second system; defaults to `strength1`.
    #[serde(default)]
    pub strength2: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub weights: WeightSpec,
    /// Fixed `C_k`; estimated when absent.
    #[serde(default)]
    pub c_k: Option<f64>,
    #[serde(default = "default_ck_draws")]
    pub ck_draws: usize,
    #[serde(default = "default_ck_halfwidth")]
    pub ck_halfwidth: f64,
    /// Correlation of Gaussian residual couplings between the two systems.
    #[serde(default)]
    pub residual_t: Option<f64>,
}

impl PointParams {
    pub fn new(strength1: f64) -> Self {
        PointParams {
            strength1,
            strength2: None,
            t: None,
            k: None,
            weights: WeightSpec::default(),
            c_k: None,
            ck_draws: default_ck_draws(),
            ck_halfwidth: default_ck_halfwidth(),
            residual_t: None,
        }
    }

    pub fn pair(strength1: f64, strength2: f64, t: f64) -> Self {
        PointParams { strength2: Some(strength2), t: Some(t), ..Self::new(strength1) }
    }

    pub fn with_weights(mut self, weights: WeightSpec) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn strength2(&self) -> f64 {
        self.strength2.unwrap_or(self.strength1)
    }
}
