//! Seeded random instances for property suites: connected weighted graphs,
//! vertex functions, subsets, and dart fields. All draws go through a caller
//! supplied ChaCha stream; nothing touches global randomness.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::space::{build_space, EdgeDescription, Space, SpaceDescription, VertexDescription};
use crate::subset::Subset;
use crate::tangent::DartField;
use crate::sobolev::VertexFunction;

/// Connected graph on `n` vertices: a random spanning tree plus extra random
/// edges, masses in `mass_range`, weights in `weight_range`.
pub fn random_connected_space(
    rng: &mut ChaCha8Rng,
    n: usize,
    mass_range: (f64, f64),
    weight_range: (f64, f64),
) -> Space {
    assert!(n >= 1);
    let mut edges: Vec<EdgeDescription> = Vec::new();
    let mut pair_seen = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        pair_seen.insert((u, v));
        edges.push(EdgeDescription {
            u: format!("v{u}"),
            v: format!("v{v}"),
            w: rng.random_range(weight_range.0..weight_range.1),
        });
    }
    let extra = if n >= 3 { rng.random_range(0..n) } else { 0 };
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let (a, b) = (u.min(v), u.max(v));
        if a != b && pair_seen.insert((a, b)) {
            edges.push(EdgeDescription {
                u: format!("v{a}"),
                v: format!("v{b}"),
                w: rng.random_range(weight_range.0..weight_range.1),
            });
        }
    }
    let vertices = (0..n)
        .map(|i| VertexDescription {
            id: format!("v{i}"),
            mass: rng.random_range(mass_range.0..mass_range.1),
        })
        .collect();
    build_space(&SpaceDescription {
        vertices,
        edges,
        exhaustion: None,
    })
    .expect("generated description is valid")
}

pub fn random_vertex_function(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> VertexFunction {
    VertexFunction((0..n).map(|_| rng.random_range(lo..hi)).collect())
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Subset {
    let mut s = Subset::empty(n);
    for i in 0..n {
        if rng.random::<bool>() {
            s.insert(i);
        }
    }
    s
}

pub fn random_dart_field(rng: &mut ChaCha8Rng, space: &Space, lo: f64, hi: f64) -> DartField {
    DartField(
        (0..2 * space.edges().len())
            .map(|_| rng.random_range(lo..hi))
            .collect(),
    )
}

/// Monotone set function on n points with values drawn from `levels` (scaled
/// by `scale`), made monotone by propagating maxima up the subset lattice.
pub fn random_monotone_set_function(
    rng: &mut ChaCha8Rng,
    n: usize,
    levels: u32,
    scale: f64,
) -> Vec<f64> {
    let size = 1usize << n;
    let mut table = vec![0.0; size];
    for m in 1..size {
        table[m] = rng.random_range(0..=levels) as f64 * scale;
    }
    // enforce monotonicity: mu(S) >= mu(S \ {i}) for every i in S
    for m in 1..size {
        let mut v: f64 = table[m];
        for i in 0..n {
            if m >> i & 1 == 1 {
                v = v.max(table[m & !(1 << i)]);
            }
        }
        table[m] = v;
    }
    table
}

/// Derives an independent child stream; the suites use one root stream per
/// seed and split per battery so orderings stay reproducible.
pub fn split(rng: &mut ChaCha8Rng) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(rng.random())
}
