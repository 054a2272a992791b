//! Index sets underlying the factor systems: graphs, p-tuples, diluted
//! clauses and plain site sets.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::disorder::{tags, SeedSpec};
use crate::error::{Error, Result};

/// Simple undirected graph. Edges are stored as `(i, j)` with `i < j`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {vertex_count} vertices"
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Graph { vertex_count, edges: seen.into_iter().collect() })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Parses the text edge list: a `vertices <n>` header followed by one
    /// 0-based `i j` pair per line. Blank lines and `#` comments are skipped.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidGraph("missing `vertices <n>` header".into()))?;
        let vertex_count = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["vertices", n] => n
                .parse::<usize>()
                .map_err(|_| Error::InvalidGraph(format!("line {line_no}: bad vertex count `{n}`")))?,
            _ => return Err(Error::InvalidGraph(format!("line {line_no}: expected `vertices <n>`"))),
        };
        let mut edges = Vec::new();
        for (line_no, line) in lines {
            let parts: Vec<_> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidGraph(format!("line {line_no}: bad vertex `{s}`")))
            };
            match parts[..] {
                [a, b] => edges.push((parse(a)?, parse(b)?)),
                _ => return Err(Error::InvalidGraph(format!("line {line_no}: expected `i j`"))),
            }
        }
        Graph::new(vertex_count, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for (i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

/// Largest lattice accepted by [`lattice_graph`].
pub const MAX_LATTICE_VERTICES: usize = 1 << 26;

/// Nearest-neighbour graph on the box `Π [0, dims_i)`; the first coordinate
/// varies fastest in the vertex numbering. With `periodic`, wraparound edges
/// are added along every dimension of length at least 3 (shorter dimensions
/// would produce a self-loop or a duplicate).
pub fn lattice_graph(dims: &[usize], periodic: bool) -> Result<Graph> {
    if dims.is_empty() {
        return Err(Error::InvalidGraph("lattice needs at least one dimension".into()));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidGraph("lattice dimensions must be positive".into()));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= MAX_LATTICE_VERTICES)
        .ok_or_else(|| Error::InvalidGraph(format!("lattice {dims:?} exceeds {MAX_LATTICE_VERTICES} vertices")))?;
    let mut strides = Vec::with_capacity(dims.len());
    let mut s = 1;
    for &d in dims {
        strides.push(s);
        s *= d;
    }
    let mut edges = Vec::new();
    for v in 0..total {
        for (&len, &stride) in dims.iter().zip(&strides) {
            let coord = (v / stride) % len;
            if coord + 1 < len {
                edges.push((v, v + stride));
            } else if periodic && len >= 3 {
                edges.push((v - coord * stride, v));
            }
        }
    }
    Graph::new(total, edges)
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidGraph("complete graph needs n >= 2".into()));
    }
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// The index set `E` carrying one factor per element.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexFamily {
    /// One factor `σ_i σ_j` per edge.
    GraphEdges(Graph),
    /// All `n^p` ordered tuples `(i_1, …, i_p)`; decoded on demand.
    PTuples { n: usize, p: usize },
    /// Clause `k` touches `clauses[k]` (0-based sites, repeats allowed).
    DilutedClauses { n: usize, p: usize, clauses: Vec<Vec<usize>> },
    /// One factor per site.
    Sites { n: usize },
}

impl IndexFamily {
    pub fn p_tuples(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::invalid("p-tuples need n >= 1 and p >= 1"));
        }
        n.checked_pow(p as u32)
            .ok_or_else(|| Error::invalid(format!("{n}^{p} tuples overflow")))?;
        Ok(IndexFamily::PTuples { n, p })
    }

    pub fn cardinality(&self) -> usize {
        match self {
            IndexFamily::GraphEdges(g) => g.edge_count(),
            IndexFamily::PTuples { n, p } => n.pow(*p as u32),
            IndexFamily::DilutedClauses { clauses, .. } => clauses.len(),
            IndexFamily::Sites { n } => *n,
        }
    }

    /// Number of vertices/sites the factors live on.
    pub fn site_count(&self) -> usize {
        match self {
            IndexFamily::GraphEdges(g) => g.vertex_count(),
            IndexFamily::PTuples { n, .. } | IndexFamily::DilutedClauses { n, .. } | IndexFamily::Sites { n } => *n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            IndexFamily::GraphEdges(_) => "graph_edges",
            IndexFamily::PTuples { .. } => "p_tuples",
            IndexFamily::DilutedClauses { .. } => "diluted_clauses",
            IndexFamily::Sites { .. } => "sites",
        }
    }

    /// Writes the sites of factor `e` into `out` (cleared first).
    pub fn factor_sites(&self, e: usize, out: &mut Vec<usize>) {
        out.clear();
        match self {
            IndexFamily::GraphEdges(g) => {
                let (i, j) = g.edges()[e];
                out.extend([i, j]);
            }
            IndexFamily::PTuples { n, p } => {
                // most significant digit first, so tuples iterate lexicographically
                let mut rest = e;
                out.resize(*p, 0);
                for slot in out.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
            }
            IndexFamily::DilutedClauses { clauses, .. } => out.extend_from_slice(&clauses[e]),
            IndexFamily::Sites { .. } => out.push(e),
        }
    }

    /// Iterates factor site lists without materialising the family.
    pub fn iter_factors(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.cardinality()).map(move |e| {
            let mut v = Vec::new();
            self.factor_sites(e, &mut v);
            v
        })
    }
}

/// Draws a diluted clause family: `clause_count ~ Poisson(λN)`, then
/// `clause_count × p` i.i.d. uniform sites in `0..N`.
pub fn diluted_clauses(n: usize, lambda: f64, p: usize, seed: SeedSpec) -> Result<IndexFamily> {
    if n == 0 || p == 0 {
        return Err(Error::invalid("diluted clauses need N >= 1 and p >= 1"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    let clause_count = poisson_draw(lambda * n as f64, seed.derive(tags::POISSON))?;
    let mut rng = seed.derive(tags::STRUCTURE).rng();
    let clauses = (0..clause_count)
        .map(|_| (0..p).map(|_| rng.random_range(0..n)).collect())
        .collect();
    Ok(IndexFamily::DilutedClauses { n, p, clauses })
}

/// One Poisson(mean) draw from the stream.
pub fn poisson_draw(mean: f64, seed: SeedSpec) -> Result<usize> {
    let dist = Poisson::new(mean).map_err(|e| Error::invalid(format!("Poisson({mean}): {e}")))?;
    Ok(dist.sample(&mut seed.rng()) as usize)
}
