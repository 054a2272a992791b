//! Fixtures shared by the benchmarks.

use chaoslab_core::models::{make_ea, ChaosTerm};
use chaoslab_core::topology::lattice_graph;
use chaoslab_core::{couple, CoupledPair, FactorSystem, SeedSpec};

/// EA on an open `rows × cols` lattice at inverse temperature `beta`.
pub fn ea(rows: usize, cols: usize, beta: f64) -> FactorSystem {
    make_ea(&lattice_graph(&[rows, cols], false).expect("lattice"), beta, 0.0, ChaosTerm::Bonds).expect("ea")
}

pub fn ea_pair(rows: usize, cols: usize, t: f64) -> CoupledPair {
    couple(ea(rows, cols, 1.0), ea(rows, cols, 2.0), t, SeedSpec::new(1, 0)).expect("pair")
}
