//! Seeded inputs for the benchmarks.

use polyscale::fixtures;
use polyscale::layout::{self, EnergyConfig, Layout};
use polyscale::Hypergraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// About 100 vertices on 40 hyperedges, three of them injected clusters.
pub fn clustered(seed: u64) -> Hypergraph {
    fixtures::clustered(&mut ChaCha8Rng::seed_from_u64(seed), 100, 40, 3)
}

/// A tree of `count` triangles and quadrilaterals.
pub fn polygon_tree(seed: u64, count: usize) -> Hypergraph {
    fixtures::polygon_tree(&mut ChaCha8Rng::seed_from_u64(seed), count)
}

/// A connected random hypergraph with at most `max_size` elements.
pub fn random(seed: u64, max_size: usize) -> Hypergraph {
    fixtures::random_connected(&mut ChaCha8Rng::seed_from_u64(seed), max_size)
}

/// The seeded starting layout the pipeline would use.
pub fn initial_layout(h: &Hypergraph, with_dual: bool, seed: u64) -> Layout {
    layout::initialize(h, with_dual, &EnergyConfig { seed, ..Default::default() })
}
